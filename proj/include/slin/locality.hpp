#pragma once

#include <map>
#include <optional>
#include <string>

#include "slin/strong_lin.hpp"

namespace slin {

/// The tree of projections onto `o` of the combined tree's histories.
HistoryTree project_tree(const HistoryTree& combined, ObjectId o);

enum class LocalityVerdict { holds, counterexample, not_applicable };
std::string to_string(LocalityVerdict v);

struct LocalityResult {
  LocalityVerdict verdict = LocalityVerdict::not_applicable;
  std::map<ObjectId, bool> per_object;
  std::optional<LinearizationWitness> combined;
};

/// If every per-object tree has a strong linearization, the combined tree
/// must have one too; a failure is reported as a counterexample. Coin
/// objects count as atomic and need no tree. Throws HistoryError when the
/// per-object trees are not the projections of `combined`.
LocalityResult check_locality(const std::map<ObjectId, HistoryTree>& per_object, const HistoryTree& combined,
                              const SpecRegistry& specs);

}  // namespace slin
