#include "slin/game.hpp"

#include <cmath>
#include <optional>

namespace slin {
namespace {

class Search {
 public:
  Search(const Algorithm& alg, const GameOptions& options) : alg_(alg), options_(options) {
    if (options.omega.empty()) throw SimulationError("game search needs a non-empty coin domain");
  }

  std::size_t nodes() const { return nodes_; }

  enum class Outcome { chance, leaf, inner, too_long };

  // Replays `path` under `coins`. On `leaf` the finished record is stored.
  Outcome replay(const std::vector<ProcessId>& path, const std::vector<Value>& coins, RunRecord* leaf,
                 std::vector<ProcessId>* live) {
    if (++nodes_ > options_.node_limit) throw SimulationError("game search exceeded its node limit");
    CoinVector source(coins);
    Simulation sim(alg_, source, options_.cls);
    for (ProcessId p : path)
      if (sim.grant(p) == GrantResult::coins_exhausted) return Outcome::chance;
    if (sim.all_halted()) {
      if (leaf) *leaf = sim.finish(RunStatus::completed);
      return Outcome::leaf;
    }
    if (path.size() >= options_.max_grants) return Outcome::too_long;
    if (live)
      for (std::size_t p = 0; p < sim.status().size(); ++p)
        if (!sim.status()[p].halted) live->push_back(static_cast<ProcessId>(p));
    return Outcome::inner;
  }

  Rational value(std::vector<ProcessId>& path, std::vector<Value>& coins, Goal goal, const Payoff& payoff) {
    RunRecord leaf;
    std::vector<ProcessId> live;
    switch (replay(path, coins, &leaf, &live)) {
      case Outcome::chance: {
        Rational sum = 0;
        for (Value w : options_.omega) {
          coins.push_back(w);
          sum += value(path, coins, goal, payoff);
          coins.pop_back();
        }
        return sum / static_cast<std::int64_t>(options_.omega.size());
      }
      case Outcome::leaf:
        return payoff(leaf);
      case Outcome::too_long:
        throw SimulationError("game search: a run exceeds " + std::to_string(options_.max_grants) + " grants");
      case Outcome::inner:
        break;
    }
    std::optional<Rational> best;
    for (ProcessId p : live) {
      path.push_back(p);
      const Rational v = value(path, coins, goal, payoff);
      path.pop_back();
      if (!best || (goal == Goal::maximize ? v > *best : v < *best)) best = v;
    }
    return *best;
  }

  bool exists(std::vector<ProcessId>& path, std::vector<Value>& coins, const LeafPredicate& pred) {
    RunRecord leaf;
    std::vector<ProcessId> live;
    switch (replay(path, coins, &leaf, &live)) {
      case Outcome::chance:
        for (Value w : options_.omega) {
          coins.push_back(w);
          const bool ok = exists(path, coins, pred);
          coins.pop_back();
          if (!ok) return false;
        }
        return true;
      case Outcome::leaf:
        return pred(leaf);
      case Outcome::too_long:
        return false;
      case Outcome::inner:
        break;
    }
    for (ProcessId p : live) {
      path.push_back(p);
      const bool ok = exists(path, coins, pred);
      path.pop_back();
      if (ok) return true;
    }
    return false;
  }

 private:
  const Algorithm& alg_;
  const GameOptions& options_;
  std::size_t nodes_ = 0;
};

}  // namespace

GameResult optimal_value(const Algorithm& alg, const GameOptions& options, Goal goal, const Payoff& payoff) {
  Search s(alg, options);
  std::vector<ProcessId> path;
  std::vector<Value> coins;
  GameResult r;
  r.value = s.value(path, coins, goal, payoff);
  r.nodes = s.nodes();
  return r;
}

bool exists_adversary(const Algorithm& alg, const GameOptions& options, const LeafPredicate& leaf,
                      std::size_t* nodes) {
  Search s(alg, options);
  std::vector<ProcessId> path;
  std::vector<Value> coins;
  const bool ok = s.exists(path, coins, leaf);
  if (nodes) *nodes = s.nodes();
  return ok;
}

Rational enumerate_expectation(const Algorithm& alg, const PolicyFactory& adversary, const std::vector<Value>& omega,
                               std::size_t horizon, const Payoff& payoff, const RunOptions& options) {
  if (omega.empty()) throw SimulationError("enumerate_expectation: empty coin domain");
  const double total = std::pow(static_cast<double>(omega.size()), static_cast<double>(horizon));
  if (total > 1e6) throw SimulationError("enumerate_expectation: omega^horizon exceeds 10^6 vectors");
  const auto count = static_cast<std::size_t>(total);
  Rational sum = 0;
  std::vector<std::size_t> digits(horizon, 0);
  for (std::size_t v = 0; v < count; ++v) {
    std::vector<Value> coins(horizon);
    for (std::size_t i = 0; i < horizon; ++i) coins[i] = omega[digits[i]];
    std::unique_ptr<AdversaryPolicy> policy = adversary();
    const RunRecord rec = run(alg, *policy, CoinVector(coins), options);
    if (rec.status == RunStatus::coins_exhausted)
      throw SimulationError("enumerate_expectation: run needs more than " + std::to_string(horizon) + " coins");
    sum += payoff(rec);
    for (std::size_t i = horizon; i-- > 0;) {
      if (++digits[i] < omega.size()) break;
      digits[i] = 0;
    }
  }
  return sum / static_cast<std::int64_t>(count);
}

}  // namespace slin
