#include "slin/properties.hpp"

#include <algorithm>
#include <functional>
#include <random>

#include "slin/adversaries.hpp"
#include "slin/equivalence.hpp"
#include "slin/lin_points.hpp"
#include "slin/linearize.hpp"
#include "slin/locality.hpp"
#include "slin/scenarios.hpp"
#include "slin/strong_lin.hpp"
#include "slin/timed.hpp"

namespace slin {

namespace sc = scenarios;

void PropertyResult::fail(const std::string& why) {
  if (failures++ == 0) first_failure = why;
}

namespace {

struct Case {
  Algorithm alg;
  std::vector<Value> omega;
};

std::vector<Case> small_cases(bool weak) {
  std::vector<Case> out = {
      {sc::counter_example(false), sc::counter_omega()},   {sc::counter_example(true), sc::counter_omega()},
      {sc::counter_example(true, 2), sc::counter_omega()}, {sc::snapshot_example(true), sc::snapshot_omega()},
      {sc::snapshot_example(false), sc::snapshot_omega()}, {sc::register_example(true), sc::register_omega()},
      {sc::mrsw_example(true), sc::mrsw_omega()},          {sc::queue_example(false), sc::queue_omega()},
  };
  // Its program ends with a flip, which the weak class rejects.
  if (!weak) out.push_back({sc::three_op_example(), sc::three_op_omega()});
  return out;
}

bool same_record(const RunRecord& a, const RunRecord& b) {
  return a.history == b.history && a.coins == b.coins && a.schedule == b.schedule &&
         a.max_point_contention == b.max_point_contention && a.returns == b.returns && a.status == b.status &&
         a.grants == b.grants && a.final_states == b.final_states;
}

HistoryTree runs_tree(const Algorithm& alg, const std::vector<Value>& omega, std::size_t horizon,
                      const std::vector<std::uint64_t>& seeds) {
  std::vector<RunRecord> runs;
  for (std::uint64_t s : seeds) {
    auto rs = collect_runs(
        alg, [s] { return std::make_unique<RandomPolicy>(AdversaryClass::strong, s); }, omega, horizon);
    for (auto& [c, r] : rs) runs.push_back(std::move(r));
  }
  return HistoryTree::from_runs(runs);
}

// ---- histories over one object ----------------------------------------------

struct PlannedOp {
  std::string op;
  Payload args;
  Payload ret;
};

std::vector<PlannedOp> op_menu(bool queue) {
  if (queue)
    return {{"enqueue", {1}, {}},      {"enqueue", {2}, {}},  {"dequeue", {}, {kBottom}},
            {"dequeue", {}, {1}},      {"dequeue", {}, {2}}};
  return {{"write", {1}, {}}, {"write", {2}, {}}, {"read", {}, {0}}, {"read", {}, {1}}, {"read", {}, {2}}};
}

History empty_history(bool queue, int procs) {
  History h;
  h.objects[0] = ObjectInfo{queue ? "queue" : "register:0", Level::base, std::nullopt, "X"};
  for (int p = 0; p < procs; ++p) h.processes.insert(p);
  return h;
}

/// Every interleaving of the per-process event sequences; a process's last
/// op is pending when its event count is odd.
void interleavings(const std::vector<std::vector<PlannedOp>>& plan, const std::vector<std::size_t>& events,
                   std::vector<std::size_t>& done, History& h, const std::function<void(const History&)>& visit) {
  bool any = false;
  for (std::size_t p = 0; p < plan.size(); ++p) {
    if (done[p] == events[p]) continue;
    any = true;
    const PlannedOp& op = plan[p][done[p] / 2];
    const bool invocation = done[p] % 2 == 0;
    h.append(Step{0, invocation ? StepKind::invocation : StepKind::response, static_cast<ProcessId>(p), 0, op.op,
                  invocation ? op.args : op.ret, Level::base});
    ++done[p];
    interleavings(plan, events, done, h, visit);
    --done[p];
    h.steps.pop_back();
  }
  if (!any) visit(h);
}

void enumerate_histories(bool queue, int procs, int ops_each, const std::function<void(const History&)>& visit) {
  const auto menu = op_menu(queue);
  const std::size_t slots = static_cast<std::size_t>(procs * ops_each);
  std::vector<std::size_t> choice(slots, 0);
  for (;;) {
    std::vector<std::vector<PlannedOp>> plan(static_cast<std::size_t>(procs));
    for (std::size_t s = 0; s < slots; ++s) plan[s / static_cast<std::size_t>(ops_each)].push_back(menu[choice[s]]);
    for (std::size_t mask = 0; mask < (std::size_t{1} << procs); ++mask) {
      std::vector<std::size_t> events(static_cast<std::size_t>(procs), static_cast<std::size_t>(2 * ops_each));
      for (int p = 0; p < procs; ++p)
        if (mask >> p & 1) --events[static_cast<std::size_t>(p)];
      std::vector<std::size_t> done(static_cast<std::size_t>(procs), 0);
      History h = empty_history(queue, procs);
      interleavings(plan, events, done, h, visit);
    }
    std::size_t k = 0;
    while (k < slots && ++choice[k] == menu.size()) choice[k++] = 0;
    if (k == slots) break;
  }
}

History random_history(std::mt19937_64& rng, bool queue, int procs, int ops) {
  History h = empty_history(queue, procs);
  std::vector<std::optional<std::string>> open(static_cast<std::size_t>(procs));
  auto pick = [&](int k) { return std::uniform_int_distribution<int>(0, k - 1)(rng); };
  int issued = 0;
  for (;;) {
    std::vector<ProcessId> movable;
    for (ProcessId p = 0; p < procs; ++p)
      if (open[static_cast<std::size_t>(p)] || issued < ops) movable.push_back(p);
    if (movable.empty() || pick(12) == 0) break;
    const ProcessId p = movable[static_cast<std::size_t>(pick(static_cast<int>(movable.size())))];
    auto& slot = open[static_cast<std::size_t>(p)];
    Step s{0, StepKind::invocation, p, 0, "", {}, Level::base};
    if (slot) {
      s.kind = StepKind::response;
      s.op = *slot;
      if (*slot == "dequeue") {
        const Value r = pick(3);
        s.payload = {r == 0 ? kBottom : r};
      } else if (*slot == "read") {
        s.payload = {pick(3)};
      }
      slot.reset();
    } else {
      const bool update = pick(2) == 0;
      s.op = queue ? (update ? "enqueue" : "dequeue") : (update ? "write" : "read");
      if (update) s.payload = {1 + pick(2)};
      slot = s.op;
      ++issued;
    }
    h.append(std::move(s));
  }
  return h;
}

/// Some subset of the pending ops plus all complete ops, in some order that
/// respects real time, replays through the spec with the recorded responses.
bool brute_linearizable(const History& h, const SeqSpec& spec) {
  const auto ops = operations(h);
  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < ops.size(); ++i)
    if (!ops[i].complete()) pending.push_back(i);
  for (std::size_t mask = 0; mask < (std::size_t{1} << pending.size()); ++mask) {
    std::vector<std::size_t> chosen;
    for (std::size_t i = 0; i < ops.size(); ++i) {
      auto it = std::find(pending.begin(), pending.end(), i);
      if (it == pending.end() || (mask >> (it - pending.begin()) & 1)) chosen.push_back(i);
    }
    do {
      bool ok = true;
      for (std::size_t a = 0; a < chosen.size() && ok; ++a)
        for (std::size_t b = a + 1; b < chosen.size() && ok; ++b)
          if (happens_before(ops[chosen[b]], ops[chosen[a]])) ok = false;
      State st = spec.initial;
      for (std::size_t i = 0; i < chosen.size() && ok; ++i) {
        const Operation& op = ops[chosen[i]];
        Transition t = spec.apply(st, op.process, op.op, op.args);
        if (op.ret && *op.ret != t.response) ok = false;
        st = std::move(t.state);
      }
      if (ok) return true;
    } while (std::next_permutation(chosen.begin(), chosen.end()));
  }
  return false;
}

void compare_with_oracle(const History& h, PropertyResult& r) {
  ++r.cases;
  const auto specs = SpecRegistry::from_history(h);
  const bool expected = brute_linearizable(h, specs.at(0));
  auto img = linearize_one(h, specs);
  if (img.has_value() != expected) {
    r.fail("linearize_one disagrees with the oracle on case " + std::to_string(r.cases));
    return;
  }
  if (img && !(is_sequential(*img) && is_linearization(*img, h, specs)))
    r.fail("linearize_one returned a non-linearization on case " + std::to_string(r.cases));
}

}  // namespace

PropertyResult property_engine_determinism(std::size_t runs, std::uint64_t seed) {
  PropertyResult r;
  r.name = "engine determinism";
  std::mt19937_64 rng(seed);
  const auto cases = small_cases(true);
  for (std::size_t trial = 0; trial < runs; ++trial) {
    const Case& c = cases[trial % cases.size()];
    std::vector<Value> coins;
    for (int k = 0; k < 3; ++k) coins.push_back(c.omega[rng() % c.omega.size()]);
    const std::uint64_t s = rng();
    const AdversaryClass cls = trial % 2 ? AdversaryClass::weak : AdversaryClass::strong;
    RandomPolicy p1(cls, s), p2(cls, s);
    ++r.cases;
    if (!same_record(run(c.alg, p1, CoinVector(coins)), run(c.alg, p2, CoinVector(coins))))
      r.fail(c.alg.name + " trial " + std::to_string(trial));
  }
  return r;
}

PropertyResult property_strong_prefix_agreement() {
  PropertyResult r;
  r.name = "strong-class prefix agreement";
  for (const Case& c : small_cases(false)) {
    std::vector<std::vector<Value>> vectors;
    for (Value x : c.omega)
      for (Value y : c.omega) vectors.push_back({x, y});
    std::vector<PolicyFactory> policies;
    for (std::uint64_t s = 0; s < 6; ++s)
      policies.push_back([s] { return std::make_unique<RandomPolicy>(AdversaryClass::strong, s); });
    policies.push_back([] { return std::make_unique<RoundRobinPolicy>(AdversaryClass::strong); });
    for (const auto& make : policies) {
      std::vector<History> hs;
      for (const auto& v : vectors) {
        auto policy = make();
        hs.push_back(run(c.alg, *policy, CoinVector(v)).history);
      }
      for (std::size_t i = 0; i < vectors.size(); ++i)
        for (std::size_t j = 0; j < vectors.size(); ++j)
          for (std::size_t k = 0; k <= 2; ++k) {
            if (!std::equal(vectors[i].begin(), vectors[i].begin() + static_cast<std::ptrdiff_t>(k),
                            vectors[j].begin()))
              continue;
            ++r.cases;
            if (prefix_to_flip(hs[i], k + 1) != prefix_to_flip(hs[j], k + 1)) r.fail(c.alg.name);
          }
    }
  }
  return r;
}

PropertyResult property_weak_flip_adjacency(std::size_t runs, std::uint64_t seed) {
  PropertyResult r;
  r.name = "weak-class flip adjacency";
  std::mt19937_64 rng(seed);
  const auto cases = small_cases(true);
  for (std::size_t trial = 0; trial < runs; ++trial) {
    const Case& c = cases[trial % cases.size()];
    std::vector<Value> coins;
    for (int k = 0; k < 3; ++k) coins.push_back(c.omega[rng() % c.omega.size()]);
    RandomPolicy policy(AdversaryClass::weak, rng());
    const History h = run(c.alg, policy, CoinVector(coins)).history;
    ++r.cases;
    for (std::size_t i = 0; i < h.size(); ++i) {
      if (!is_flip(h[i]) || h[i].kind != StepKind::response) continue;
      if (i + 1 >= h.size() || h[i + 1].process != h[i].process || h[i + 1].kind != StepKind::invocation) {
        r.fail(c.alg.name + " trial " + std::to_string(trial) + " step " + std::to_string(i));
        break;
      }
    }
  }
  return r;
}

PropertyResult property_linearize_oracle(std::size_t random_cases, std::uint64_t seed) {
  PropertyResult r;
  r.name = "linearize_one vs permutation oracle";
  for (bool queue : {false, true}) {
    enumerate_histories(queue, 3, 1, [&](const History& h) { compare_with_oracle(h, r); });
    enumerate_histories(queue, 2, 2, [&](const History& h) { compare_with_oracle(h, r); });
  }
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < random_cases; ++i) compare_with_oracle(random_history(rng, i % 2 == 1, 3, 6), r);
  return r;
}

PropertyResult property_normalization(std::size_t cases, std::uint64_t seed) {
  PropertyResult r;
  r.name = "normalization (L), (P), (N)";
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; r.cases < cases && i < 4 * cases; ++i) {
    const bool mutex = i % 3 != 0;
    const int counters = 1 + static_cast<int>(i % 2);
    std::vector<std::uint64_t> seeds;
    for (std::size_t k = 0; k < 1 + i % 3; ++k) seeds.push_back(rng());
    HistoryTree t = runs_tree(sc::counter_example(mutex, counters), sc::counter_omega(), 2, seeds);
    auto specs = SpecRegistry::from_history(t.history(0));
    auto found = check_strong_lin(t, specs);
    if (!found.witness) continue;
    ++r.cases;
    auto norm = normalize_witness(t, *found.witness, specs);
    auto l = validate_witness(t, norm, specs);
    if (!l.ok) {
      r.fail("case " + std::to_string(r.cases) + ": " + l.reason);
      continue;
    }
    auto n = check_normal_form(t, norm);
    if (!n.ok) {
      r.fail("case " + std::to_string(r.cases) + ": " + n.reason);
      continue;
    }
    auto again = normalize_witness(t, norm, specs);
    for (const auto& [id, img] : norm.images)
      if (!same_steps(img, again.images.at(id))) {
        r.fail("case " + std::to_string(r.cases) + ": not a fixed point");
        break;
      }
  }
  return r;
}

PropertyResult property_linearization_points(std::size_t cases, std::uint64_t seed) {
  PropertyResult r;
  r.name = "linearization points (a), (b), (P')";
  std::mt19937_64 rng(seed);
  std::size_t histories = 0;
  for (std::size_t i = 0; histories < cases && i < 4 * cases; ++i) {
    History h = random_history(rng, i % 2 == 1, 3, 6);
    auto specs = SpecRegistry::from_history(h);
    auto img = linearize_one(h, specs);
    if (!img) continue;
    ++histories;
    ++r.cases;
    const TimedExecution e = timed_from_history(h);
    PointMap pt = extract_linearization_points(e, *img, specs);
    auto c = check_linearization_points(e, pt, specs);
    if (!c.ok) r.fail("history " + std::to_string(histories) + ": " + c.reason);
  }
  std::size_t edges = 0;
  for (std::size_t i = 0; edges < cases && i < cases; ++i) {
    HistoryTree t = runs_tree(sc::counter_example(i % 2 == 0, 2), sc::counter_omega(), 2, {rng(), rng()});
    auto specs = SpecRegistry::from_history(t.history(0));
    auto w = check_strong_lin(t, specs).witness;
    if (!w) continue;
    for (const TreeNode& n : t.nodes()) {
      if (!n.parent) continue;
      ++edges;
      ++r.cases;
      const TimedExecution child = timed_from_history(t.history(n.id));
      const TimedExecution parent = timed_from_history(t.history(*n.parent));
      PointMap pc = extract_linearization_points(child, w->images.at(n.id), specs);
      PointMap pp = extract_linearization_points(parent, w->images.at(*n.parent), specs);
      if (!check_linearization_points(child, pc, specs).ok ||
          !is_history_prefix(history_of(linearized_execution(parent, pp, specs)),
                             history_of(linearized_execution(child, pc, specs))))
        r.fail("tree " + std::to_string(i) + " node " + std::to_string(n.id));
    }
  }
  if (histories < cases) r.fail("only " + std::to_string(histories) + " linearizable histories sampled");
  if (edges < cases) r.fail("only " + std::to_string(edges) + " tree edges sampled");
  return r;
}

PropertyResult property_locality(std::size_t trees, std::uint64_t seed) {
  PropertyResult r;
  r.name = "locality";
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < trees; ++i) {
    HistoryTree combined = runs_tree(sc::counter_example(i % 2 == 0, 2), sc::counter_omega(), 2, {rng(), rng()});
    std::map<ObjectId, HistoryTree> per_object;
    for (ObjectId o : {0, 1}) per_object.emplace(o, project_tree(combined, o));
    auto specs = SpecRegistry::from_history(combined.history(0));
    auto res = check_locality(per_object, combined, specs);
    ++r.cases;
    if (res.verdict == LocalityVerdict::counterexample)
      r.fail("tree " + std::to_string(i) + ": counterexample");
    else if (res.verdict == LocalityVerdict::holds && !validate_witness(combined, *res.combined, specs).ok)
      r.fail("tree " + std::to_string(i) + ": combined witness does not validate");
  }
  return r;
}

}  // namespace slin
