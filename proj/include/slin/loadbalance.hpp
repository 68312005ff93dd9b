#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "slin/adversaries.hpp"
#include "slin/engine.hpp"
#include "slin/marks.hpp"

namespace slin {

enum class CounterKind { atomic, llsc, writefirst };
std::string to_string(CounterKind k);
CounterKind counter_kind_from_string(const std::string& s);

/// n processes; each flips i over {0..m-1} with m = sqrt(n), runs
/// x := F_i.fetch&inc, then F_i.fetch&dec, and returns x. F_i is object i.
Algorithm loadbalance_algorithm(int n, CounterKind counters);
/// m for a perfect square n; throws SimulationError otherwise.
int loadbalance_width(int n);
/// ceil((1 + delta) * sqrt(n)).
std::size_t loadbalance_k_max(int n, double delta);

/// Per-process view of a LoadBalance history, consumed incrementally.
class LoadBalanceTracker {
 public:
  explicit LoadBalanceTracker(int counters) : counters_(counters) {}

  struct Proc {
    std::optional<int> counter;
    std::optional<std::string> first_op;
    std::optional<ObjectId> first_object;
    std::size_t accesses = 0;
    bool fai_done = false;
    std::optional<Value> fai_value;
    bool fad_started = false;
  };

  void consume(const History& h);
  const Proc& proc(ProcessId p) const;
  const MarkState& marks() const { return marks_; }

 private:
  std::optional<int> counter_of(const History& h, ObjectId o) const;

  int counters_;
  std::size_t cursor_ = 0;
  std::map<ProcessId, Proc> procs_;
  MarkState marks_;
};

/// The weak adversary that tries to fool `target`: run the target to its
/// first shared-memory access, then every other process in ID order to its
/// first access (finishing it solo if it chose another counter). At that
/// configuration, if the target is visible, round-robin the processes whose
/// first access was a write; otherwise round-robin the target's counter
/// group minus the target and the processes that saw it, then run the target.
/// Processes stop after their fetch&inc.
class ApPolicy final : public AdversaryPolicy {
 public:
  ApPolicy(ProcessId target, int n);
  AdversaryClass kind() const override { return AdversaryClass::weak; }
  std::string name() const override { return "A_p"; }
  std::optional<ProcessId> decide(const AdversaryView& view) override;

  struct Diagnostics {
    bool reached_c = false;
    int counter = -1;
    std::set<ProcessId> group;
    bool target_visible = false;
    /// First access kinds at the configuration: no write, unique write, shared write.
    std::set<ProcessId> q_set, v_set, w_set;
    std::set<ProcessId> saw_target;
    /// Every group member made exactly one access, every other process halted.
    bool postcondition = false;
    std::size_t contention_at_c = 0;
  };
  const Diagnostics& diagnostics() const { return diag_; }
  ProcessId target() const { return target_; }

 private:
  enum class Phase { target_first, others, case1, case2_others, case2_target, done };
  void reach_c(const AdversaryView& view);
  std::optional<ProcessId> round_robin(const std::vector<ProcessId>& members);

  ProcessId target_;
  int n_;
  LoadBalanceTracker tracker_;
  Phase phase_ = Phase::target_first;
  ProcessId scan_ = 0;
  std::vector<ProcessId> rr_;
  std::size_t rr_pos_ = 0;
  Diagnostics diag_;
};

/// Result of checking the helper claim on a finished A_p run (case 2 only):
/// with P = group - S, if (a) P and the target finished fetch&inc, (b) nobody
/// called fetch&dec on the counter and (c) no process in P sees a process
/// outside P, then the target's fetch&inc returned at least |P|. Not
/// applicable when the counters are atomic.
struct HelperCheck {
  bool applicable = false;
  bool premises = false;
  bool conclusion = false;
  std::size_t p_size = 0;
};
HelperCheck check_lb_helper(const ApPolicy& policy, const RunRecord& rec, int n);

/// Scripted weak families for the atomic upper bound.
std::unique_ptr<AdversaryPolicy> capped_loader(ProcessId target, int n, std::size_t k_max);

/// The target's fetch&inc result, if it completed.
std::optional<Value> fai_result(const RunRecord& rec, ProcessId p, int n);

using AdversaryFamily = std::function<std::unique_ptr<AdversaryPolicy>(ProcessId target, std::uint64_t trial_seed)>;

struct PhiConfig {
  int n = 16;
  std::size_t k_max = 6;
  std::size_t trials = 2000;
  std::uint64_t seed = 42;
  std::size_t budget = 10000;
  unsigned threads = 1;
};

struct TrialObservation {
  std::size_t trial = 0;
  ProcessId target = 0;
  double x = 0;
  bool flagged = false;
  bool over_contention = false;
};

struct PhiEstimate {
  double mean = 0;
  double variance = 0;
  double ci95 = 0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  /// Runs whose target did not finish fetch&inc within the budget.
  std::size_t flagged = 0;
  std::size_t over_contention = 0;
  std::map<std::size_t, std::size_t> contention_histogram;
};

/// Observer hook; gets the run and the policy that produced it. Calls are
/// serialized.
using TrialObserver = std::function<void(const TrialObservation&, const RunRecord&, const AdversaryPolicy&)>;

/// Monte Carlo estimate of E[X] with p uniform and per-process coins uniform,
/// trial t drawing from mt19937_64(seed + t). X is the target's fetch&inc
/// result, or 0 when contention exceeds k_max or the call does not finish.
PhiEstimate estimate_phi(const Algorithm& alg, const AdversaryFamily& family, const PhiConfig& cfg,
                         const TrialObserver& observe = {});

}  // namespace slin
