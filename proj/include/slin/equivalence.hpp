#pragma once

#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "slin/game.hpp"
#include "slin/strong_lin.hpp"

namespace slin {

/// Runs keyed by the full coin vector that produced them.
using RunSet = std::map<std::vector<Value>, RunRecord>;

/// One run per vector in omega^horizon, each with a fresh policy.
RunSet collect_runs(const Algorithm& alg, const PolicyFactory& adversary, const std::vector<Value>& omega,
                    std::size_t horizon, const RunOptions& options = {});

struct EquivalenceResult {
  bool equivalent = false;
  /// First coin vector without a common linearization.
  std::optional<std::vector<Value>> counterexample;
  std::map<std::vector<Value>, History> common;
};

/// Per coin vector, looks for one sequential history that linearizes both
/// interpreted runs. Throws HistoryError if the sets are keyed differently.
EquivalenceResult check_equivalence(const RunSet& implemented, const RunSet& atomic, const SpecRegistry& specs);

/// Same steps up to level and index.
bool same_steps(const History& a, const History& b);

/// A strong adversary for the atomic version of an algorithm that schedules
/// the operations of some leaf image consistent with the run so far, one
/// operation per grant.
std::unique_ptr<AdversaryPolicy> adversary_from_witness(const HistoryTree& tree, const LinearizationWitness& w);

/// True iff one adversary of `options.cls` produces, for every coin
/// vector, a complete run whose history equals `images` at the consumed coins.
bool schedulable_by_one_adversary(const Algorithm& alg, const GameOptions& options,
                                  const std::map<std::vector<Value>, History>& images, std::size_t* nodes = nullptr);

}  // namespace slin
