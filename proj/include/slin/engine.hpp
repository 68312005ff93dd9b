#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "slin/history.hpp"
#include "slin/objects.hpp"
#include "slin/routine.hpp"
#include "slin/seq_spec.hpp"

namespace slin {

class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class AdversaryClass { oblivious, weak, strong, offline };
std::string to_string(AdversaryClass c);

/// An algorithm object: atomic (`impl` empty) or implemented by `impl`.
struct ObjectBinding {
  std::string name;
  SeqSpec spec;
  std::optional<ImplProgram> impl;
};

ObjectBinding atomic_object(std::string name, SeqSpec spec);
ObjectBinding implemented_object(std::string name, ImplProgram impl);

/// Process programs use `invoke(object, ...)` with object = index into
/// `objects` and `flip()`; the value they co_return is the process's result.
struct Algorithm {
  std::string name;
  int processes = 0;
  std::vector<ObjectBinding> objects;
  std::function<Routine(ProcessId)> program;
};

/// Coin outcomes, addressed by the global flip index and the flipping
/// process's own flip index. Empty means the source is exhausted.
class CoinSource {
 public:
  virtual ~CoinSource() = default;
  virtual std::optional<Value> coin(ProcessId p, std::size_t global_index, std::size_t process_index) const = 0;
};

/// The i-th flip of the run, whoever performs it, receives values[i].
class CoinVector final : public CoinSource {
 public:
  CoinVector() = default;
  explicit CoinVector(std::vector<Value> values) : values_(std::move(values)) {}
  std::optional<Value> coin(ProcessId, std::size_t global_index, std::size_t) const override;
  const std::vector<Value>& values() const { return values_; }

 private:
  std::vector<Value> values_;
};

/// The k-th flip of process p receives values[p][k].
class PerProcessCoins final : public CoinSource {
 public:
  explicit PerProcessCoins(std::vector<std::vector<Value>> values) : values_(std::move(values)) {}
  std::optional<Value> coin(ProcessId p, std::size_t, std::size_t process_index) const override;

 private:
  std::vector<std::vector<Value>> values_;
};

struct ProcessStatus {
  bool started = false;
  bool halted = false;
  bool in_method = false;
};

/// What a policy may observe. Oblivious policies get an empty history and no
/// statuses; only offline policies get the coin source.
struct AdversaryView {
  const History& history;
  const std::vector<ProcessId>& schedule;
  std::size_t grants = 0;
  const std::vector<ProcessStatus>& status;
  const CoinSource* coins = nullptr;
};

class AdversaryPolicy {
 public:
  virtual ~AdversaryPolicy() = default;
  virtual AdversaryClass kind() const = 0;
  virtual std::string name() const = 0;
  /// Next process to grant a step to; empty stops the run.
  virtual std::optional<ProcessId> decide(const AdversaryView& view) = 0;
};

using PolicyFactory = std::function<std::unique_ptr<AdversaryPolicy>()>;

enum class RunStatus { completed, stopped, budget_exhausted, coins_exhausted };
std::string to_string(RunStatus s);

struct RunRecord {
  History history;
  std::vector<Value> coins;
  std::vector<ProcessId> schedule;
  std::size_t max_point_contention = 0;
  std::vector<std::optional<Payload>> returns;
  RunStatus status = RunStatus::stopped;
  std::size_t grants = 0;
  /// Final state of every atomic object, algorithm-level and base.
  std::map<ObjectId, State> final_states;
};

struct RunOptions {
  std::size_t budget = 10000;
};

enum class GrantResult { ok, coins_exhausted };

/// One execution in progress. A grant runs one base-level step of a process;
/// under the weak class a flip grant also carries the process's next
/// invocation (with its response when that invocation is atomic).
class Simulation {
 public:
  Simulation(const Algorithm& alg, const CoinSource& coins, AdversaryClass cls);
  ~Simulation();
  Simulation(const Simulation&) = delete;
  Simulation& operator=(const Simulation&) = delete;

  /// Leaves the simulation untouched and returns coins_exhausted when the
  /// grant needs a coin the source does not have.
  GrantResult grant(ProcessId p);

  bool halted(ProcessId p) const;
  bool all_halted() const;
  const std::vector<ProcessStatus>& status() const;
  const RunRecord& record() const;
  /// Record with final_states filled in.
  RunRecord finish(RunStatus status);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Runs `alg` under `policy` until the policy stops, every process halts, the
/// coin source runs out, or the grant budget is spent.
RunRecord run(const Algorithm& alg, AdversaryPolicy& policy, const CoinSource& coins, const RunOptions& options = {});

}  // namespace slin
