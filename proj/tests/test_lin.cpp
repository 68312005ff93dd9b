#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "slin/adversaries.hpp"
#include "slin/equivalence.hpp"
#include "slin/lin_points.hpp"
#include "slin/linearize.hpp"
#include "slin/locality.hpp"
#include "slin/objects.hpp"
#include "slin/scenarios.hpp"

using namespace slin;
namespace sc = slin::scenarios;

namespace {

History single_object(const std::string& type, std::set<ProcessId> procs) {
  History h;
  h.objects[0] = ObjectInfo{type, Level::base, std::nullopt, "X"};
  h.processes = std::move(procs);
  return h;
}

void inv(History& h, ProcessId p, const std::string& op, Payload args = {}) {
  h.append(Step{0, StepKind::invocation, p, 0, op, std::move(args), Level::base});
}

void rsp(History& h, ProcessId p, const std::string& op, Payload ret = {}) {
  h.append(Step{0, StepKind::response, p, 0, op, std::move(ret), Level::base});
}

// Random interleaving of up to `ops` calls on one register or queue, with
// responses drawn from a small domain so that both outcomes occur.
History random_history(std::mt19937_64& rng, bool queue, int procs, int ops) {
  std::set<ProcessId> ps;
  for (int p = 0; p < procs; ++p) ps.insert(p);
  History h = single_object(queue ? "queue" : "register:0", ps);
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
    if (slot) {
      if (*slot == "write" || *slot == "enqueue") {
        rsp(h, p, *slot);
      } else if (queue) {
        const Value r = pick(3);
        rsp(h, p, *slot, {r == 0 ? kBottom : r});
      } else {
        rsp(h, p, *slot, {pick(3)});
      }
      slot.reset();
    } else {
      const bool update = pick(2) == 0;
      const std::string op = queue ? (update ? "enqueue" : "dequeue") : (update ? "write" : "read");
      inv(h, p, op, update ? Payload{1 + pick(2)} : Payload{});
      slot = op;
      ++issued;
    }
  }
  return h;
}

// Exhaustive oracle: some subset of the pending ops plus all complete ops, in
// some order respecting real time, replays through the spec.
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
    std::sort(chosen.begin(), chosen.end());
    do {
      bool ok = true;
      for (std::size_t a = 0; a < chosen.size() && ok; ++a)
        for (std::size_t b = a + 1; b < chosen.size() && ok; ++b) {
          const Operation& later = ops[chosen[a]];
          const Operation& earlier = ops[chosen[b]];
          if (earlier.rsp && *earlier.rsp < later.inv) ok = false;
        }
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

std::size_t ancestor(const HistoryTree& t, std::size_t n, std::size_t depth) {
  while (t.depth(n) > depth) n = *t.node(n).parent;
  return n;
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

GameOptions strong(const std::vector<Value>& omega) {
  GameOptions o;
  o.cls = AdversaryClass::strong;
  o.omega = omega;
  return o;
}

std::map<std::vector<Value>, History> leaf_images(const HistoryTree& tree, const LinearizationWitness& w) {
  std::map<std::vector<Value>, History> out;
  for (std::size_t leaf : tree.leaves()) {
    std::vector<Value> coins;
    for (const Step& s : tree.history(leaf).steps)
      if (is_flip(s) && s.kind == StepKind::response) coins.push_back(s.payload.at(0));
    out[coins] = w.images.at(leaf);
  }
  return out;
}

}  // namespace

// ---- single-history linearizability ----------------------------------------

TEST(LinearizeOne, SequentialHistoryIsItsOwnImage) {
  History h = single_object("register:0", {0, 1});
  inv(h, 0, "write", {1});
  rsp(h, 0, "write");
  inv(h, 1, "read");
  rsp(h, 1, "read", {1});
  auto img = linearize_one(h);
  ASSERT_TRUE(img.has_value());
  EXPECT_TRUE(same_steps(*img, h));
}

TEST(LinearizeOne, ReadOfUnwrittenValueHasNoImage) {
  History h = single_object("register:0", {0, 1});
  inv(h, 0, "write", {1});
  inv(h, 1, "read");
  rsp(h, 1, "read", {2});
  rsp(h, 0, "write");
  EXPECT_FALSE(linearize_one(h).has_value());
}

TEST(LinearizeOne, ConcurrentDequeuesMayReturnInEitherOrder) {
  History h = single_object("queue", {0, 1, 2});
  inv(h, 0, "enqueue", {1});
  rsp(h, 0, "enqueue");
  inv(h, 0, "enqueue", {2});
  rsp(h, 0, "enqueue");
  inv(h, 1, "dequeue");
  inv(h, 2, "dequeue");
  rsp(h, 2, "dequeue", {1});
  rsp(h, 1, "dequeue", {2});
  EXPECT_TRUE(linearize_one(h).has_value());
}

TEST(LinearizeOne, SequentialDequeuesMustFollowFifo) {
  History h = single_object("queue", {0, 1});
  inv(h, 0, "enqueue", {1});
  rsp(h, 0, "enqueue");
  inv(h, 0, "enqueue", {2});
  rsp(h, 0, "enqueue");
  inv(h, 1, "dequeue");
  rsp(h, 1, "dequeue", {2});
  EXPECT_FALSE(linearize_one(h).has_value());
}

TEST(LinearizeOne, PendingWriteMayTakeEffect) {
  History h = single_object("register:0", {0, 1});
  inv(h, 0, "write", {1});
  inv(h, 1, "read");
  rsp(h, 1, "read", {1});
  EXPECT_TRUE(linearize_one(h).has_value());
}

TEST(LinearizeOne, AgreesWithPermutationOracle) {
  std::mt19937_64 rng(42);
  int yes = 0;
  int no = 0;
  for (int i = 0; i < 1500; ++i) {
    const bool queue = i % 2 == 1;
    History h = random_history(rng, queue, 2 + i % 2, 6);
    const SeqSpec spec = queue ? specs::queue() : specs::register_spec({0});
    const bool expected = brute_linearizable(h, spec);
    auto img = linearize_one(h);
    ASSERT_EQ(img.has_value(), expected) << "case " << i;
    if (img) {
      EXPECT_TRUE(is_sequential(*img));
      EXPECT_TRUE(is_linearization(*img, h, SpecRegistry::from_history(h)));
      ++yes;
    } else {
      ++no;
    }
  }
  EXPECT_GT(yes, 100);
  EXPECT_GT(no, 100);
}

TEST(LinearizeOne, RejectsMoreThanSixtyFourOperations) {
  History h = single_object("register:0", {0});
  for (int i = 0; i < 65; ++i) {
    inv(h, 0, "write", {1});
    rsp(h, 0, "write");
  }
  EXPECT_THROW(linearize_one(h), HistoryError);
}

TEST(CommonLinearization, SharedImageForTwoInterleavings) {
  History a = single_object("register:0", {0, 1});
  inv(a, 0, "write", {1});
  inv(a, 1, "read");
  rsp(a, 1, "read", {0});
  rsp(a, 0, "write");
  History b = single_object("register:0", {0, 1});
  inv(b, 1, "read");
  inv(b, 0, "write", {1});
  rsp(b, 0, "write");
  rsp(b, 1, "read", {0});
  auto specs = SpecRegistry::from_history(a);
  auto common = common_linearization({a, b}, specs);
  ASSERT_TRUE(common.has_value());
  EXPECT_TRUE(is_linearization(*common, a, specs));
  EXPECT_TRUE(is_linearization(*common, b, specs));
}

TEST(CommonLinearization, DifferentResponsesHaveNone) {
  History a = single_object("register:0", {0, 1});
  inv(a, 0, "write", {1});
  rsp(a, 0, "write");
  inv(a, 1, "read");
  rsp(a, 1, "read", {1});
  History b = single_object("register:0", {0, 1});
  inv(b, 1, "read");
  rsp(b, 1, "read", {0});
  inv(b, 0, "write", {1});
  rsp(b, 0, "write");
  EXPECT_FALSE(common_linearization({a, b}, SpecRegistry::from_history(a)).has_value());
}

// ---- history trees ----------------------------------------------------------

TEST(HistoryTree, InsertSharesPrefixes) {
  HistoryTree t = sc::three_op_tree();
  EXPECT_EQ(t.leaves().size(), 2u);
  EXPECT_EQ(t.size(), 1 + sc::kThreeOpCommonPrefix + 2 * 3);
  EXPECT_TRUE(t.branches_only_at_flips());
  EXPECT_NO_THROW(t.validate());
  for (std::size_t leaf : t.leaves()) EXPECT_EQ(t.depth(leaf), sc::three_op_history(0).size());
}

TEST(HistoryTree, PreorderPutsParentsFirst) {
  HistoryTree t = runs_tree(sc::counter_example(true), sc::counter_omega(), 2, {1, 2, 3});
  std::vector<std::size_t> pos(t.size());
  auto order = t.preorder();
  ASSERT_EQ(order.size(), t.size());
  for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = i;
  for (const TreeNode& n : t.nodes())
    if (n.parent) EXPECT_LT(pos[*n.parent], pos[n.id]);
}

TEST(HistoryTree, AddChildDeduplicatesSiblings) {
  HistoryTree t = sc::three_op_tree();
  const std::size_t before = t.size();
  t.insert(sc::three_op_history(0));
  EXPECT_EQ(t.size(), before);
}

// ---- strong linearizability -------------------------------------------------

TEST(StrongLin, MutexCounterTreeHasWitness) {
  HistoryTree t = runs_tree(sc::counter_example(true), sc::counter_omega(), 2, {0, 1, 2, 3, 4, 5, 6, 7});
  auto specs = SpecRegistry::from_history(t.history(0));
  auto r = check_strong_lin(t, specs);
  ASSERT_TRUE(r.witness.has_value());
  auto v = validate_witness(t, *r.witness, specs);
  EXPECT_TRUE(v.ok) << v.reason;
}

TEST(StrongLin, HerlihyWingTreeHasNoWitness) {
  for (auto schedule : {sc::queue_weak_schedule, sc::queue_contiguous_dequeue_schedule}) {
    auto rs = collect_runs(sc::queue_example(true), schedule, sc::queue_omega(), 1);
    std::vector<RunRecord> runs;
    for (auto& [c, r] : rs) {
      // Each branch alone is linearizable.
      EXPECT_TRUE(linearize_one(r.history).has_value());
      runs.push_back(r);
    }
    EXPECT_FALSE(check_strong_lin(HistoryTree::from_runs(runs)).witness.has_value());
  }
}

TEST(StrongLin, WorkedExampleHasWitness) {
  HistoryTree t = sc::three_op_tree();
  auto specs = SpecRegistry::from_history(t.history(0));
  auto r = check_strong_lin(t, specs);
  ASSERT_TRUE(r.witness.has_value());
  EXPECT_TRUE(validate_witness(t, *r.witness, specs).ok);
}

TEST(StrongLin, WorkedExamplePrintedImagesExtendToWitness) {
  HistoryTree t = sc::three_op_tree();
  auto specs = SpecRegistry::from_history(t.history(0));
  const auto printed = sc::three_op_printed_images();
  StrongLinOptions opt;
  opt.pinned[ancestor(t, t.leaves().front(), sc::kThreeOpCommonPrefix)] = printed.common;
  for (std::size_t leaf : t.leaves())
    opt.pinned[leaf] = printed.leaves.at(t.history(leaf)[sc::kThreeOpCommonPrefix].payload.at(0));
  auto r = check_strong_lin(t, specs, opt);
  ASSERT_TRUE(r.witness.has_value());
  EXPECT_TRUE(validate_witness(t, *r.witness, specs).ok);
  // The printed leaf images put the flip after p's and q's writes, which do
  // not happen before it.
  EXPECT_FALSE(check_normal_form(t, *r.witness).ok);
  auto game = strong(sc::three_op_omega());
  EXPECT_FALSE(schedulable_by_one_adversary(sc::three_op_example(), game, leaf_images(t, *r.witness)));

  auto norm = normalize_witness(t, *r.witness, specs);
  EXPECT_TRUE(validate_witness(t, norm, specs).ok);
  EXPECT_TRUE(check_normal_form(t, norm).ok);
  EXPECT_TRUE(schedulable_by_one_adversary(sc::three_op_example(), game, leaf_images(t, norm)));
}

TEST(StrongLin, PinnedImageThatIsNotALinearizationFails) {
  HistoryTree t = sc::three_op_tree();
  StrongLinOptions opt;
  opt.pinned[t.leaves().front()] = History{};
  EXPECT_FALSE(check_strong_lin(t, SpecRegistry::from_history(t.history(0)), opt).witness.has_value());
}

TEST(StrongLin, SinglePathAgreesWithLinearizeOne) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 600; ++i) {
    History h = random_history(rng, i % 2 == 1, 2 + i % 2, 5);
    HistoryTree t = HistoryTree::from_histories({h});
    auto specs = SpecRegistry::from_history(h);
    auto r = check_strong_lin(t, specs);
    auto one = linearize_one(h);
    // A single path needs every prefix linearizable, with images nested.
    bool prefixes = true;
    for (std::size_t k = 0; k <= h.size(); ++k) prefixes = prefixes && linearize_one(h.prefix(k)).has_value();
    if (!one) {
      EXPECT_FALSE(r.witness.has_value()) << "case " << i;
    } else if (r.witness) {
      EXPECT_TRUE(prefixes);
      EXPECT_TRUE(validate_witness(t, *r.witness, specs).ok);
    }
  }
}

TEST(StrongLin, RejectsOversizedTrees) {
  HistoryTree t = runs_tree(sc::counter_example(true), sc::counter_omega(), 2, {1});
  StrongLinOptions opt;
  opt.max_nodes = 3;
  EXPECT_THROW(check_strong_lin(t, SpecRegistry::from_history(t.history(0)), opt), HistoryError);
}

TEST(StrongLin, ValidateWitnessCatchesBrokenPrefix) {
  HistoryTree t = sc::three_op_tree();
  auto specs = SpecRegistry::from_history(t.history(0));
  auto w = *check_strong_lin(t, specs).witness;
  const std::size_t leaf = t.leaves().front();
  w.images.at(*t.node(leaf).parent) = History{};
  EXPECT_FALSE(validate_witness(t, w, specs).ok);
}

// ---- normalization ----------------------------------------------------------

TEST(Normalize, PreservesLinearizationPrefixAndReachesNormalForm) {
  std::mt19937_64 rng(2024);
  int cases = 0;
  int rewritten = 0;
  for (int i = 0; cases < 500; ++i) {
    ASSERT_LT(i, 2000);
    const bool mutex = i % 3 != 0;
    const int counters = 1 + i % 2;
    std::vector<std::uint64_t> seeds;
    for (int k = 0; k < 1 + i % 3; ++k) seeds.push_back(rng());
    HistoryTree t = runs_tree(sc::counter_example(mutex, counters), sc::counter_omega(), 2, seeds);
    auto specs = SpecRegistry::from_history(t.history(0));
    auto r = check_strong_lin(t, specs);
    if (!r.witness) continue;
    ++cases;
    auto norm = normalize_witness(t, *r.witness, specs);
    auto l = validate_witness(t, norm, specs);
    ASSERT_TRUE(l.ok) << l.reason;
    auto n = check_normal_form(t, norm);
    ASSERT_TRUE(n.ok) << n.reason;
    if (!check_normal_form(t, *r.witness).ok) ++rewritten;
    // Normalizing twice changes nothing.
    auto again = normalize_witness(t, norm, specs);
    for (const auto& [id, img] : norm.images) ASSERT_TRUE(same_steps(img, again.images.at(id)));
  }
  EXPECT_EQ(cases, 500);
  RecordProperty("non_normal_inputs", rewritten);
}

TEST(Normalize, RejectsInvalidWitness) {
  HistoryTree t = sc::three_op_tree();
  LinearizationWitness w;
  for (const TreeNode& n : t.nodes()) w.images[n.id] = History{};
  EXPECT_THROW(normalize_witness(t, w, SpecRegistry::from_history(t.history(0))), HistoryError);
}

// ---- linearization points ---------------------------------------------------

TEST(LinPoints, ExtractedPointsSatisfyIntervalsAndOrder) {
  std::mt19937_64 rng(11);
  int checked = 0;
  for (int i = 0; i < 800; ++i) {
    History h = random_history(rng, i % 2 == 1, 3, 6);
    auto img = linearize_one(h);
    if (!img) continue;
    auto specs = SpecRegistry::from_history(h);
    const TimedExecution e = timed_from_history(h);
    PointMap pt = extract_linearization_points(e, *img, specs);
    auto c = check_linearization_points(e, pt, specs);
    ASSERT_TRUE(c.ok) << c.reason;
    // The point order is the image order.
    const History l = history_of(linearized_execution(e, pt, specs));
    ASSERT_EQ(l.size(), img->size());
    for (std::size_t k = 0; k < l.size(); ++k) {
      ASSERT_EQ(l[k].process, (*img)[k].process);
      ASSERT_EQ(l[k].op, (*img)[k].op);
    }
    ++checked;
  }
  EXPECT_GT(checked, 300);
}

TEST(LinPoints, PrefixPointsGivePrefixExecutions) {
  for (bool mutex : {true, false}) {
    HistoryTree t = runs_tree(sc::counter_example(mutex, 2), sc::counter_omega(), 2, {3, 4, 5, 6});
    auto specs = SpecRegistry::from_history(t.history(0));
    auto w = check_strong_lin(t, specs).witness;
    ASSERT_TRUE(w.has_value());
    for (const TreeNode& n : t.nodes()) {
      if (!n.parent) continue;
      const TimedExecution child = timed_from_history(t.history(n.id));
      const TimedExecution parent = timed_from_history(t.history(*n.parent));
      PointMap pc = extract_linearization_points(child, w->images.at(n.id), specs);
      PointMap pp = extract_linearization_points(parent, w->images.at(*n.parent), specs);
      ASSERT_TRUE(check_linearization_points(child, pc, specs).ok);
      ASSERT_TRUE(is_history_prefix(history_of(linearized_execution(parent, pp, specs)),
                                    history_of(linearized_execution(child, pc, specs))));
    }
  }
}

TEST(LinPoints, PointOutsideIntervalIsRejected) {
  History h = single_object("register:0", {0, 1});
  inv(h, 0, "write", {1});
  rsp(h, 0, "write");
  inv(h, 1, "read");
  rsp(h, 1, "read", {1});
  const TimedExecution e = timed_from_history(h);
  auto specs = SpecRegistry::from_history(h);
  PointMap pt{{OpKey{0, 0}, 0.5}, {OpKey{1, 0}, 2.5}};
  EXPECT_TRUE(check_linearization_points(e, pt, specs).ok);
  pt[OpKey{1, 0}] = 3.5;
  EXPECT_FALSE(check_linearization_points(e, pt, specs).ok);
  pt[OpKey{1, 0}] = 0.25;
  EXPECT_FALSE(check_linearization_points(e, pt, specs).ok);
}

TEST(LinPoints, CasFromRegistersPointsOnRandomRuns) {
  constexpr int kProcs = 3;
  std::mt19937_64 plan_rng(5);
  int prefixes = 0;
  for (int trial = 0; trial < 200; ++trial) {
    // Two calls per process with arguments from {0, 1, 2}.
    std::vector<std::vector<std::pair<std::string, Payload>>> plan(kProcs);
    for (auto& calls : plan)
      for (int k = 0; k < 2; ++k) {
        const Value x = static_cast<Value>(plan_rng() % 3);
        const Value y = static_cast<Value>(plan_rng() % 3);
        if (plan_rng() % 4 == 0)
          calls.emplace_back("read", Payload{});
        else
          calls.emplace_back("CAS", Payload{x, y});
      }
    Algorithm a;
    a.name = "cas-points";
    a.processes = kProcs;
    a.objects.push_back(implemented_object("X", impl::cas_from_registers(0)));
    a.program = [plan](ProcessId p) -> Routine {
      Payload out;
      for (const auto& [op, args] : plan[static_cast<std::size_t>(p)]) {
        Payload r = co_await invoke(0, op, args);
        out.push_back(r.at(0));
      }
      co_return out;
    };
    RandomPolicy policy(AdversaryClass::strong, static_cast<std::uint64_t>(trial));
    RunRecord rec = run(a, policy, CoinVector(std::vector<Value>{}));
    ASSERT_EQ(rec.status, RunStatus::completed);
    auto specs = SpecRegistry::from_history(rec.history);
    for (std::size_t k = 1; k <= rec.history.size(); k += 3) {
      const TimedExecution e = timed_from_history(rec.history.prefix(k));
      PointMap pt = cas_linearization_points(e, 0, kProcs);
      auto c = check_linearization_points(e, pt, specs);
      ASSERT_TRUE(c.ok) << "trial " << trial << " prefix " << k << ": " << c.reason;
      ++prefixes;
    }
  }
  EXPECT_GT(prefixes, 1000);
}

// ---- locality ---------------------------------------------------------------

TEST(Locality, HoldsOnSampledCounterTrees) {
  std::mt19937_64 rng(99);
  int holds = 0;
  for (int i = 0; i < 100; ++i) {
    HistoryTree combined =
        runs_tree(sc::counter_example(i % 2 == 0, 2), sc::counter_omega(), 2, {rng(), rng()});
    std::map<ObjectId, HistoryTree> per_object;
    for (ObjectId o : {0, 1}) per_object.emplace(o, project_tree(combined, o));
    auto specs = SpecRegistry::from_history(combined.history(0));
    auto r = check_locality(per_object, combined, specs);
    ASSERT_NE(r.verdict, LocalityVerdict::counterexample) << "tree " << i;
    if (r.verdict == LocalityVerdict::holds) {
      ++holds;
      EXPECT_TRUE(validate_witness(combined, *r.combined, specs).ok);
    }
  }
  EXPECT_EQ(holds, 100);
}

TEST(Locality, RejectsTreesThatAreNotProjections) {
  HistoryTree combined = runs_tree(sc::counter_example(true, 2), sc::counter_omega(), 2, {1});
  std::map<ObjectId, HistoryTree> per_object;
  per_object.emplace(0, project_tree(combined, 0));
  per_object.emplace(1, project_tree(combined, 0));
  EXPECT_THROW(check_locality(per_object, combined, SpecRegistry::from_history(combined.history(0))), HistoryError);
}

// ---- equivalence ------------------------------------------------------------

TEST(Equivalence, IdenticalRunSetsAreEquivalent) {
  auto rr = [] { return std::make_unique<RoundRobinPolicy>(AdversaryClass::strong); };
  auto a = collect_runs(sc::counter_example(false), rr, sc::counter_omega(), 2);
  auto b = collect_runs(sc::counter_example(false), rr, sc::counter_omega(), 2);
  auto r = check_equivalence(a, b, SpecRegistry::from_history(a.begin()->second.history));
  EXPECT_TRUE(r.equivalent);
  EXPECT_EQ(r.common.size(), 4u);
}

TEST(Equivalence, KeyMismatchThrows) {
  auto rr = [] { return std::make_unique<RoundRobinPolicy>(AdversaryClass::strong); };
  auto a = collect_runs(sc::counter_example(false), rr, sc::counter_omega(), 2);
  auto b = a;
  b.erase(b.begin());
  EXPECT_THROW(check_equivalence(a, b, SpecRegistry::from_history(a.begin()->second.history)), HistoryError);
}

TEST(Equivalence, SnapshotBadScheduleMatchesNoAtomicAdversary) {
  auto impl = collect_runs(sc::snapshot_example(true), sc::snapshot_bad_schedule, sc::snapshot_omega(), 1);
  auto specs = SpecRegistry::from_history(interpret(impl.begin()->second.history));
  bool found = exists_adversary(sc::snapshot_example(false), strong(sc::snapshot_omega()), [&](const RunRecord& rec) {
    auto it = impl.find(rec.coins);
    return it != impl.end() && common_linearization({it->second.history, rec.history}, specs).has_value();
  });
  EXPECT_FALSE(found);
}

TEST(Equivalence, MutexCounterMatchesAtomicUnderWitnessAdversary) {
  for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
    auto impl = collect_runs(
        sc::counter_example(true), [seed] { return std::make_unique<RandomPolicy>(AdversaryClass::strong, seed); },
        sc::counter_omega(), 2);
    std::vector<RunRecord> runs;
    for (auto& [c, r] : impl) runs.push_back(r);
    HistoryTree t = HistoryTree::from_runs(runs);
    auto specs = SpecRegistry::from_history(t.history(0));
    auto w = check_strong_lin(t, specs).witness;
    ASSERT_TRUE(w.has_value());
    const LinearizationWitness norm = normalize_witness(t, *w, specs);
    auto atomic = collect_runs(
        sc::counter_example(false), [&] { return adversary_from_witness(t, norm); }, sc::counter_omega(), 2);
    for (const auto& [c, r] : atomic) ASSERT_EQ(r.status, RunStatus::completed);
    auto eq = check_equivalence(impl, atomic, specs);
    EXPECT_TRUE(eq.equivalent) << "seed " << seed;
  }
}

TEST(LinPoints, HandExamples) {
  History solo = single_object("register:0", {0});
  inv(solo, 0, "write", {1});
  rsp(solo, 0, "write");
  auto specs = SpecRegistry::from_history(solo);
  PointMap pt = extract_linearization_points(timed_from_history(solo), solo, specs);
  EXPECT_EQ(pt, (PointMap{{OpKey{0, 0}, 0.0}}));

  // w: inv 0, rsp 2; r: inv 1, rsp 3 returning 1. The read sits at the
  // larger of its invocation (1) and the midpoint of 0 and 1.
  History h = single_object("register:0", {0, 1});
  inv(h, 0, "write", {1});
  inv(h, 1, "read");
  rsp(h, 0, "write");
  rsp(h, 1, "read", {1});
  auto img = linearize_one(h);
  ASSERT_TRUE(img.has_value());
  pt = extract_linearization_points(timed_from_history(h), *img, specs);
  EXPECT_EQ(pt, (PointMap{{OpKey{0, 0}, 0.0}, {OpKey{1, 0}, 1.0}}));
}

TEST(LinPoints, WitnessThroughPointsIsAWitness) {
  HistoryTree t = sc::mutex_counter_tree({2, 3});
  auto specs = SpecRegistry::from_history(t.history(0));
  auto w = check_strong_lin(t, specs).witness;
  ASSERT_TRUE(w.has_value());
  LinearizationWitness back;
  for (const TreeNode& n : t.nodes()) {
    const TimedExecution e = timed_from_history(t.history(n.id));
    PointMap pt = extract_linearization_points(e, w->images.at(n.id), specs);
    History image = history_of(linearized_execution(e, pt, specs));
    image.objects = t.objects();
    image.processes = t.processes();
    back.images[n.id] = std::move(image);
  }
  auto v = validate_witness(t, back, specs);
  EXPECT_TRUE(v.ok) << v.reason;
}

TEST(Normalize, WorkedExampleFlipFollowsTheWrite) {
  HistoryTree t = sc::three_op_tree();
  auto specs = SpecRegistry::from_history(t.history(0));
  const auto printed = sc::three_op_printed_images();
  StrongLinOptions opt;
  opt.pinned[ancestor(t, t.leaves().front(), sc::kThreeOpCommonPrefix)] = printed.common;
  for (std::size_t leaf : t.leaves())
    opt.pinned[leaf] = printed.leaves.at(t.history(leaf)[sc::kThreeOpCommonPrefix].payload.at(0));
  auto r = check_strong_lin(t, specs, opt);
  ASSERT_TRUE(r.witness.has_value());
  auto norm = normalize_witness(t, *r.witness, specs);
  for (std::size_t leaf : t.leaves()) {
    const History& img = norm.images.at(leaf);
    std::size_t k = 0;
    while (k < img.size() && !(img[k].process == 2 && img[k].op == "write" && img[k].kind == StepKind::response)) ++k;
    ASSERT_LT(k + 1, img.size());
    EXPECT_EQ(img[k + 1].process, 2);
    EXPECT_TRUE(is_flip(img[k + 1]));
    EXPECT_EQ(img[k + 1].kind, StepKind::invocation);
  }
}
