#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "slin/history.hpp"
#include "slin/seq_spec.hpp"

namespace slin {

/// One operation shared by every history of a linearization problem.
struct LinOp {
  OpKey key;
  ObjectId object = 0;
  std::string op;
  Payload args;
  Level level = Level::base;
  /// Known response: the recorded one if the op completes in any history.
  std::optional<Payload> ret;
  /// Complete in some history, so every linearization must contain it.
  bool required = false;
  /// Ops that must be committed first (happens-before in some history).
  std::vector<std::size_t> preds;
  /// Missing from some history, or inconsistent across them.
  bool excluded = false;
};

/// Search space for sequential histories that linearize every given
/// (interpreted) history at once. Ops are identified across histories by
/// their OpKey and must agree on object, name and arguments.
class LinProblem {
 public:
  LinProblem(const std::vector<History>& histories, const SpecRegistry& specs);

  struct Cursor {
    std::uint64_t mask = 0;
    std::vector<State> states;
    std::vector<std::size_t> order;
    std::vector<Payload> responses;
  };

  /// False when some required op cannot appear at all (missing from a
  /// history or with conflicting arguments or responses).
  bool feasible() const { return feasible_; }
  const std::vector<LinOp>& ops() const { return ops_; }
  std::optional<std::size_t> find(const OpKey& key) const;

  Cursor start() const;
  /// Transition of `op` if it may be committed next, else empty.
  std::optional<Transition> try_commit(const Cursor& c, std::size_t op) const;
  void commit(Cursor& c, std::size_t op, Transition t) const;
  bool done(const Cursor& c) const { return (c.mask & required_mask_) == required_mask_; }
  /// Commits `keys` in order; empty if any step is not allowed.
  std::optional<Cursor> replay(const std::vector<OpKey>& keys) const;

  /// Candidates in search order: required ops first, then by process and ordinal.
  const std::vector<std::size_t>& candidate_order() const { return order_; }

  /// First linearization in search order; state-memoized DFS.
  std::optional<Cursor> search() const;
  /// Calls `visit` on every cursor reachable from `from` that is done; stops
  /// early when `visit` returns false.
  void enumerate(const Cursor& from, const std::function<bool(const Cursor&)>& visit) const;

  History to_history(const Cursor& c) const;

 private:
  const SeqSpec& spec_of(std::size_t op) const;

  std::vector<LinOp> ops_;
  std::vector<ObjectId> objects_;
  std::vector<std::size_t> object_slot_;
  std::vector<SeqSpec> specs_;
  std::vector<std::size_t> order_;
  std::uint64_t required_mask_ = 0;
  bool feasible_ = true;
  History shape_;
};

/// Largest op count the search accepts.
inline constexpr std::size_t kMaxLinOps = 64;

/// A linearization of interpret(h), or empty if none exists. Pending ops are
/// included only when needed, with responses from the sequential spec.
std::optional<History> linearize_one(const History& h, const SpecRegistry& specs);
std::optional<History> linearize_one(const History& h);

/// A sequential history that linearizes every history in `hs`.
std::optional<History> common_linearization(const std::vector<History>& hs, const SpecRegistry& specs);

}  // namespace slin
