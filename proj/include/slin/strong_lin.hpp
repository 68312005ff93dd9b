#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>

#include "slin/history_tree.hpp"
#include "slin/seq_spec.hpp"

namespace slin {

/// Node id -> sequential history.
struct LinearizationWitness {
  std::map<std::size_t, History> images;
};

struct StrongLinOptions {
  std::size_t max_nodes = 100'000;
  std::size_t max_pending = 8;
  /// Nodes whose image is fixed in advance.
  std::map<std::size_t, History> pinned;
};

struct StrongLinResult {
  std::optional<LinearizationWitness> witness;
  /// (node, parent image) pairs evaluated.
  std::size_t explored = 0;
};

/// Searches for images satisfying (L) at every node and (P) along every
/// edge. A node's image extends its parent's by the fewest new operations
/// first, and must admit completions in all children before it is kept.
/// Throws HistoryError on a malformed tree or one beyond the size guards.
StrongLinResult check_strong_lin(const HistoryTree& tree, const SpecRegistry& specs,
                                 const StrongLinOptions& options = {});
StrongLinResult check_strong_lin(const HistoryTree& tree);

/// Is `image` a linearization of interpret(h)?
bool is_linearization(const History& image, const History& h, const SpecRegistry& specs, std::string* why = nullptr);
bool is_history_prefix(const History& a, const History& b);

struct WitnessCheck {
  bool ok = false;
  std::string reason;
};

/// Re-checks (L) at every node and (P) along every edge.
WitnessCheck validate_witness(const HistoryTree& tree, const LinearizationWitness& w, const SpecRegistry& specs);
/// (N): a flip immediately after another operation in an image must be
/// preceded by it in happens-before order of the node's history.
WitnessCheck check_normal_form(const HistoryTree& tree, const LinearizationWitness& w);

/// Per node: drop trailing ops that do not complete, remove flips, then put
/// each completed flip right after the last image op that happens before it.
/// Throws HistoryError if `w` does not satisfy (L) and (P).
LinearizationWitness normalize_witness(const HistoryTree& tree, const LinearizationWitness& w,
                                       const SpecRegistry& specs);

}  // namespace slin
