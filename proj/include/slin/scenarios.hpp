#pragma once

#include <map>
#include <memory>
#include <vector>

#include "slin/adversaries.hpp"
#include "slin/engine.hpp"
#include "slin/history_tree.hpp"
#include "slin/rational.hpp"

namespace slin::scenarios {

// Snapshot example. p = 0 scans once; q = 1 updates 6, flips c over {-1, 1}
// and updates 8c; r = 2 updates 2 then 0.
Algorithm snapshot_example(bool implemented);
const std::vector<Value>& snapshot_omega();
/// Sum of the view returned by p's scan.
Rational scan_sum(const RunRecord& rec);
/// The weak schedule that drives the implemented snapshot to (-6 + 2) / 2.
std::unique_ptr<AdversaryPolicy> snapshot_bad_schedule();
/// Hand-written strong strategy for atomic objects: p scans before q's second
/// update iff the flip is 1.
std::unique_ptr<AdversaryPolicy> snapshot_strong_strategy();

// Register example. w = 0 writes 2, flips c over {0, 2} and writes c;
// p = 1 reads once. The register holds {0, 1, 2} and starts at 1.
Algorithm register_example(bool implemented);
const std::vector<Value>& register_omega();
/// p's read.
Rational read_result(const RunRecord& rec);
/// Oblivious schedule: p reads up to A[1], w runs to completion, p reads down.
std::unique_ptr<AdversaryPolicy> register_oblivious_schedule();

// Two-reader register example. w = 0 writes 1, flips cf over {-1, 1} and
// writes cf; readers r1 = 1 and r2 = 2 read once.
Algorithm mrsw_example(bool implemented);
const std::vector<Value>& mrsw_omega();
/// r1's read.
Rational r1_result(const RunRecord& rec);
std::unique_ptr<AdversaryPolicy> mrsw_weak_schedule();

// Queue example. q0 = 0 enqueues 0; q1 = 1 enqueues 1; p = 2 enqueues 2,
// flips cf over {0, 1} and dequeues three times.
Algorithm queue_example(bool implemented);
const std::vector<Value>& queue_omega();
/// Which goals count: (a) every dequeue succeeds, (b) the dequeue returning 1
/// precedes the one returning 2, (c) the first dequeue returns the flip.
struct QueueGoal {
  bool a = true;
  bool b = true;
  bool c = true;
};
bool queue_goal_met(const RunRecord& rec, const QueueGoal& goal = {});
std::unique_ptr<AdversaryPolicy> queue_weak_schedule();
/// Same scenario with each dequeue run contiguously, under the strong class.
std::unique_ptr<AdversaryPolicy> queue_contiguous_dequeue_schedule();

// Three atomic operations on separate registers: p = 0 and q = 1 write once,
// r = 2 writes once and then flips over {0, 1}.
Algorithm three_op_example();
const std::vector<Value>& three_op_omega();
/// Normalization example over three_op_example's objects: p, q and r invoke
/// their writes, r's write completes, r flips i, then p's and q's complete.
History three_op_history(Value i);
/// Steps in the common prefix of the two histories; it ends with r's flip
/// invocation.
inline constexpr std::size_t kThreeOpCommonPrefix = 5;
/// The example's prefix-preserving images: the common prefix maps to r's
/// write; outcome 0 continues p, q, flip and outcome 1 continues flip, q, p.
struct ThreeOpImages {
  History common;
  std::map<Value, History> leaves;
};
ThreeOpImages three_op_printed_images();

/// Two processes; each flips over {0, 1}, then runs one or two counter
/// operations chosen by the flip. `counters` selects how many counter objects
/// there are (operations alternate between them).
Algorithm counter_example(bool mutex, int counters = 1);
const std::vector<Value>& counter_omega();

/// Interpreted runs of counter_example(true) under random strong schedules,
/// one seed per schedule, every coin vector of length 2.
HistoryTree mutex_counter_tree(const std::vector<std::uint64_t>& seeds = {0, 1, 2, 3, 4, 5, 6, 7});
/// Interpreted runs of queue_example(true) under `schedule`, both flips.
HistoryTree queue_tree(const PolicyFactory& schedule);
/// The two normalization-example histories merged.
HistoryTree three_op_tree();

}  // namespace slin::scenarios
