#include "slin/scenarios.hpp"

#include "slin/equivalence.hpp"

#include <algorithm>

namespace slin::scenarios {
namespace {

std::vector<ProcessId> times(ProcessId p, std::size_t k) { return std::vector<ProcessId>(k, p); }

std::vector<ProcessId> concat(std::initializer_list<std::vector<ProcessId>> parts) {
  std::vector<ProcessId> out;
  for (const auto& part : parts) out.insert(out.end(), part.begin(), part.end());
  return out;
}

Routine snapshot_program(ProcessId p) {
  if (p == 0) {
    Payload view = co_await invoke(0, "scan");
    co_return view;
  }
  if (p == 1) {
    co_await invoke(0, "update", {6});
    Payload c = co_await flip();
    co_await invoke(0, "update", {8 * c.at(0)});
    co_return Payload{};
  }
  co_await invoke(0, "update", {2});
  co_await invoke(0, "update", {0});
  co_return Payload{};
}

Routine register_program(ProcessId p) {
  if (p == 0) {
    co_await invoke(0, "write", {2});
    Payload c = co_await flip();
    co_await invoke(0, "write", {c.at(0)});
    co_return Payload{};
  }
  Payload v = co_await invoke(0, "read");
  co_return v;
}

Routine mrsw_program(ProcessId p) {
  if (p == 0) {
    co_await invoke(0, "write", {1});
    Payload c = co_await flip();
    co_await invoke(0, "write", {c.at(0)});
    co_return Payload{};
  }
  Payload v = co_await invoke(0, "read");
  co_return v;
}

Routine queue_program(ProcessId p) {
  if (p < 2) {
    co_await invoke(0, "enqueue", {p});
    co_return Payload{};
  }
  co_await invoke(0, "enqueue", {2});
  co_await flip();
  Payload out;
  for (int i = 0; i < 3; ++i) {
    Payload v = co_await invoke(0, "dequeue");
    out.push_back(v.at(0));
  }
  co_return out;
}

Routine three_op_program(ProcessId p) {
  co_await invoke(p, "write", {1});
  if (p == 2) co_await flip();
  co_return Payload{};
}

Routine counter_program(ProcessId p, int counters) {
  Payload c = co_await flip();
  Payload out;
  Payload first = co_await invoke(p % counters, "fetch&inc");
  out.push_back(first.at(0));
  if (c.at(0) == 1) {
    Payload second = co_await invoke((p + 1) % counters, "fetch&dec");
    out.push_back(second.at(0));
  }
  co_return out;
}

Value payload_sum(const Payload& v) {
  Value s = 0;
  for (Value x : v) s += x;
  return s;
}

const Payload& result_of(const RunRecord& rec, ProcessId p) {
  const auto& r = rec.returns.at(static_cast<std::size_t>(p));
  if (!r) throw SimulationError("process " + std::to_string(p) + " did not finish");
  return *r;
}

}  // namespace

Algorithm snapshot_example(bool implemented) {
  Algorithm a;
  a.name = implemented ? "snapshot-example/aadgms" : "snapshot-example/atomic";
  a.processes = 3;
  a.objects.push_back(implemented ? implemented_object("S", impl::aadgms_snapshot(3))
                                  : atomic_object("S", specs::snapshot(3)));
  a.program = snapshot_program;
  return a;
}

const std::vector<Value>& snapshot_omega() {
  static const std::vector<Value> omega{-1, 1};
  return omega;
}

Rational scan_sum(const RunRecord& rec) { return payload_sum(result_of(rec, 0)); }

std::unique_ptr<AdversaryPolicy> snapshot_bad_schedule() {
  // p's first collect; r's Update(2); r's Update(0) up to its write; q's
  // Update(6); q's flip with its next invocation; q's Update(8c); p's second
  // collect. Then r's write goes before p's third collect iff the flip is 1.
  auto prefix = concat({times(0, 3), times(2, 7), times(2, 6), times(1, 7), times(1, 1), times(1, 7), times(0, 3)});
  std::map<Value, std::vector<ProcessId>> suffix{{1, {2, 0, 0, 0}}, {-1, {0, 0, 0, 2}}};
  return std::make_unique<FlipBranchPolicy>(AdversaryClass::weak, "snapshot-bad-schedule", std::move(prefix),
                                            std::move(suffix));
}

std::unique_ptr<AdversaryPolicy> snapshot_strong_strategy() {
  return std::make_unique<FlipBranchPolicy>(AdversaryClass::strong, "snapshot-strong-strategy",
                                            std::vector<ProcessId>{2, 2, 1, 1},
                                            std::map<Value, std::vector<ProcessId>>{{1, {0, 1}}, {-1, {1, 0}}});
}

Algorithm register_example(bool implemented) {
  Algorithm a;
  a.name = implemented ? "register-example/vidyasankar" : "register-example/atomic";
  a.processes = 2;
  a.objects.push_back(implemented ? implemented_object("R", impl::vidyasankar_register(2, 1))
                                  : atomic_object("R", specs::bounded_register(2, 1)));
  a.program = register_program;
  return a;
}

const std::vector<Value>& register_omega() {
  static const std::vector<Value> omega{0, 2};
  return omega;
}

Rational read_result(const RunRecord& rec) { return result_of(rec, 1).at(0); }

std::unique_ptr<AdversaryPolicy> register_oblivious_schedule() {
  return std::make_unique<ObliviousSchedule>(concat({times(1, 2), times(0, 7), times(1, 1)}));
}

Algorithm mrsw_example(bool implemented) {
  Algorithm a;
  a.name = implemented ? "mrsw-example/va" : "mrsw-example/atomic";
  a.processes = 3;
  a.objects.push_back(implemented ? implemented_object("R", impl::vitanyi_awerbuch_mrsw(2, 0))
                                  : atomic_object("R", specs::register_spec({0})));
  a.program = mrsw_program;
  return a;
}

const std::vector<Value>& mrsw_omega() {
  static const std::vector<Value> omega{-1, 1};
  return omega;
}

Rational r1_result(const RunRecord& rec) { return result_of(rec, 1).at(0); }

std::unique_ptr<AdversaryPolicy> mrsw_weak_schedule() {
  // r1 reads R_{w-r1}; w runs to completion (the flip carries its second
  // write's invocation); then r1 finishes first iff the flip is 1.
  return std::make_unique<FlipBranchPolicy>(AdversaryClass::weak, "mrsw-weak-schedule",
                                            concat({times(1, 1), times(0, 5)}),
                                            std::map<Value, std::vector<ProcessId>>{{1, times(1, 4)}, {-1, times(2, 5)}});
}

Algorithm queue_example(bool implemented) {
  Algorithm a;
  a.name = implemented ? "queue-example/herlihy-wing" : "queue-example/atomic";
  a.processes = 3;
  a.objects.push_back(implemented ? implemented_object("Q", impl::herlihy_wing_queue())
                                  : atomic_object("Q", specs::queue()));
  a.program = queue_program;
  return a;
}

const std::vector<Value>& queue_omega() {
  static const std::vector<Value> omega{0, 1};
  return omega;
}

bool queue_goal_met(const RunRecord& rec, const QueueGoal& goal) {
  const Payload& d = result_of(rec, 2);
  if (rec.coins.empty()) return false;
  if (goal.a && std::find(d.begin(), d.end(), kBottom) != d.end()) return false;
  if (goal.b) {
    auto one = std::find(d.begin(), d.end(), 1);
    auto two = std::find(d.begin(), d.end(), 2);
    if (one == d.end() || two == d.end() || one > two) return false;
  }
  if (goal.c && d.at(0) != rec.coins.front()) return false;
  return true;
}

std::unique_ptr<AdversaryPolicy> queue_weak_schedule() {
  // q0's fetch&inc; q1's and p's enqueues; p's flip with its first dequeue's
  // invocation. On 0, q0 writes before the dequeues run; on 1, after the first.
  return std::make_unique<FlipBranchPolicy>(AdversaryClass::weak, "queue-weak-schedule",
                                            concat({times(0, 1), times(1, 2), times(2, 2), times(2, 1)}),
                                            std::map<Value, std::vector<ProcessId>>{{0, {0}}, {1, {2, 2, 2, 0}}});
}

std::unique_ptr<AdversaryPolicy> queue_contiguous_dequeue_schedule() {
  return std::make_unique<FlipBranchPolicy>(AdversaryClass::strong, "queue-contiguous-dequeues",
                                            concat({times(0, 1), times(1, 2), times(2, 2), times(2, 1)}),
                                            std::map<Value, std::vector<ProcessId>>{{0, {0}}, {1, {2, 2, 2, 0}}});
}

Algorithm three_op_example() {
  Algorithm a;
  a.name = "three-op-example";
  a.processes = 3;
  for (const char* n : {"X_p", "X_q", "X_r"}) a.objects.push_back(atomic_object(n, specs::register_spec({0})));
  a.program = three_op_program;
  return a;
}

const std::vector<Value>& three_op_omega() {
  static const std::vector<Value> omega{0, 1};
  return omega;
}

namespace {

History three_op_shape() {
  RoundRobinPolicy rr(AdversaryClass::strong);
  RunRecord rec = run(three_op_example(), rr, CoinVector({0}));
  History h;
  h.objects = rec.history.objects;
  h.processes = rec.history.processes;
  return h;
}

Step three_op_step(StepKind kind, ProcessId p, Payload payload) {
  return Step{0, kind, p, p, "write", std::move(payload), Level::base};
}

Step three_op_flip(StepKind kind, Payload payload) {
  return Step{0, kind, 2, coin_object(2), "flip", std::move(payload), Level::base};
}

void add_write(History& h, ProcessId p) {
  h.append(three_op_step(StepKind::invocation, p, {1}));
  h.append(three_op_step(StepKind::response, p, {}));
}

void add_flip(History& h, Value i) {
  h.append(three_op_flip(StepKind::invocation, {}));
  h.append(three_op_flip(StepKind::response, {i}));
}

}  // namespace

History three_op_history(Value i) {
  History h = three_op_shape();
  h.append(three_op_step(StepKind::invocation, 0, {1}));
  h.append(three_op_step(StepKind::invocation, 1, {1}));
  add_write(h, 2);
  add_flip(h, i);
  h.append(three_op_step(StepKind::response, 0, {}));
  h.append(three_op_step(StepKind::response, 1, {}));
  return h;
}

ThreeOpImages three_op_printed_images() {
  ThreeOpImages out;
  out.common = three_op_shape();
  add_write(out.common, 2);
  History zero = out.common;
  add_write(zero, 0);
  add_write(zero, 1);
  add_flip(zero, 0);
  History one = out.common;
  add_flip(one, 1);
  add_write(one, 1);
  add_write(one, 0);
  out.leaves.emplace(0, std::move(zero));
  out.leaves.emplace(1, std::move(one));
  return out;
}

Algorithm counter_example(bool mutex, int counters) {
  if (counters < 1) throw SimulationError("counter example needs at least one counter");
  Algorithm a;
  a.name = mutex ? "counter-example/mutex" : "counter-example/atomic";
  a.processes = 2;
  for (int i = 0; i < counters; ++i) {
    const std::string name = "C" + std::to_string(i);
    a.objects.push_back(mutex ? implemented_object(name, impl::mutex_wrapped(specs::counter()))
                              : atomic_object(name, specs::counter()));
  }
  a.program = [counters](ProcessId p) { return counter_program(p, counters); };
  return a;
}

const std::vector<Value>& counter_omega() {
  static const std::vector<Value> omega{0, 1};
  return omega;
}

namespace {

HistoryTree tree_of(const RunSet& runs) {
  std::vector<RunRecord> rs;
  for (const auto& [coins, rec] : runs) rs.push_back(rec);
  return HistoryTree::from_runs(rs);
}

}  // namespace

HistoryTree mutex_counter_tree(const std::vector<std::uint64_t>& seeds) {
  std::vector<RunRecord> rs;
  for (std::uint64_t s : seeds) {
    auto runs = collect_runs(
        counter_example(true), [s] { return std::make_unique<RandomPolicy>(AdversaryClass::strong, s); },
        counter_omega(), 2);
    for (auto& [coins, rec] : runs) rs.push_back(std::move(rec));
  }
  return HistoryTree::from_runs(rs);
}

HistoryTree queue_tree(const PolicyFactory& schedule) {
  return tree_of(collect_runs(queue_example(true), schedule, queue_omega(), 1));
}

HistoryTree three_op_tree() { return HistoryTree::from_histories({three_op_history(0), three_op_history(1)}); }

}  // namespace slin::scenarios
