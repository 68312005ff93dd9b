#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "slin/engine.hpp"
#include "slin/rational.hpp"

namespace slin {

enum class Goal { maximize, minimize };

using Payoff = std::function<Rational(const RunRecord&)>;
using LeafPredicate = std::function<bool(const RunRecord&)>;

/// Exhaustive search over adversary decision trees. Decisions see the
/// history so far (every node of the search is a distinct history) and coins
/// are drawn uniformly from `omega` the moment a flip is granted.
struct GameOptions {
  AdversaryClass cls = AdversaryClass::strong;
  std::vector<Value> omega;
  std::size_t max_grants = 64;
  std::size_t node_limit = 5'000'000;
};

struct GameResult {
  Rational value;
  std::size_t nodes = 0;
};

/// Optimal expected payoff over complete runs (all processes halted).
/// Throws SimulationError if a path exceeds max_grants or the node limit.
GameResult optimal_value(const Algorithm& alg, const GameOptions& options, Goal goal, const Payoff& payoff);

/// True iff some adversary of the class drives every coin outcome to a
/// complete run satisfying `leaf`. Paths longer than max_grants fail.
bool exists_adversary(const Algorithm& alg, const GameOptions& options, const LeafPredicate& leaf,
                      std::size_t* nodes = nullptr);

/// Exact expectation of `payoff` over all coin vectors in omega^horizon, one
/// fresh policy per vector. Throws SimulationError if a run needs more than
/// `horizon` coins.
Rational enumerate_expectation(const Algorithm& alg, const PolicyFactory& adversary, const std::vector<Value>& omega,
                               std::size_t horizon, const Payoff& payoff, const RunOptions& options = {});

}  // namespace slin
