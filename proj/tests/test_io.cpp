#include <gtest/gtest.h>

#include <random>

#include "slin/adversaries.hpp"
#include "slin/equivalence.hpp"
#include "slin/io.hpp"
#include "slin/scenarios.hpp"

using namespace slin;
namespace sc = slin::scenarios;

namespace {

std::vector<RunRecord> sample_runs(std::size_t count, std::uint64_t seed) {
  const std::vector<std::pair<Algorithm, std::vector<Value>>> algs = {
      {sc::snapshot_example(true), sc::snapshot_omega()}, {sc::register_example(true), sc::register_omega()},
      {sc::mrsw_example(true), sc::mrsw_omega()},         {sc::queue_example(true), sc::queue_omega()},
      {sc::counter_example(true, 2), sc::counter_omega()}, {sc::snapshot_example(false), sc::snapshot_omega()},
  };
  std::mt19937_64 rng(seed);
  std::vector<RunRecord> out;
  while (out.size() < count) {
    const auto& [alg, omega] = algs[out.size() % algs.size()];
    std::vector<Value> coins;
    for (int i = 0; i < 4; ++i) coins.push_back(omega[rng() % omega.size()]);
    RandomPolicy policy(AdversaryClass::strong, rng());
    RunOptions opt;
    opt.budget = 200;
    out.push_back(run(alg, policy, CoinVector(coins), opt));
  }
  return out;
}

HistoryTree sample_tree(std::uint64_t seed) {
  auto runs = collect_runs(
      sc::counter_example(true), [seed] { return std::make_unique<RandomPolicy>(AdversaryClass::strong, seed); },
      sc::counter_omega(), 2);
  std::vector<RunRecord> rs;
  for (auto& [c, r] : runs) rs.push_back(std::move(r));
  return HistoryTree::from_runs(rs);
}

std::string header_only() {
  return R"({"format":"slin-history","version":1,"processes":[0],"objects":[]})"
         "\n";
}

}  // namespace

TEST(HistoryJsonl, CanonicalLayout) {
  History h;
  h.processes = {0};
  h.objects[5] = ObjectInfo{"register:0,1", Level::base, std::nullopt, "R"};
  h.append(Step{0, StepKind::invocation, 0, 5, "write", {1}, Level::base});
  h.append(Step{0, StepKind::response, 0, 5, "write", {}, Level::base});
  EXPECT_EQ(history_to_jsonl(h),
            R"({"format":"slin-history","version":1,"processes":[0],"objects":[{"id":5,"type":"register:0,1","level":"base","owner":null,"name":"R"}]})"
            "\n"
            R"({"index":0,"kind":"inv","process":0,"object":5,"op":"write","payload":[1],"level":"base"})"
            "\n"
            R"({"index":1,"kind":"rsp","process":0,"object":5,"op":"write","payload":[],"level":"base"})"
            "\n");
}

TEST(HistoryJsonl, RoundTripIsByteIdentical) {
  std::size_t cases = 0;
  for (const RunRecord& rec : sample_runs(500, 3)) {
    for (const History& h : {rec.history, interpret(rec.history)}) {
      const std::string text = history_to_jsonl(h);
      History back = history_from_jsonl(text);
      ASSERT_EQ(back, h);
      ASSERT_EQ(history_to_jsonl(back), text);
      ++cases;
    }
  }
  EXPECT_EQ(cases, 1000u);
}

TEST(HistoryJsonl, BottomSurvives) {
  History h;
  h.processes = {0};
  h.append(Step{0, StepKind::response, 0, 1, "deq", {kBottom}, Level::interpreted});
  EXPECT_EQ(history_from_jsonl(history_to_jsonl(h)), h);
}

TEST(HistoryJsonl, FieldOrderDoesNotMatterOnInput) {
  std::string text = header_only() +
                     R"({"level":"base","payload":[],"op":"read","object":2,"process":0,"kind":"inv","index":0})"
                     "\n";
  History h = history_from_jsonl(text);
  ASSERT_EQ(h.size(), 1u);
  EXPECT_EQ(h[0].op, "read");
  EXPECT_NE(history_to_jsonl(h), text);
  EXPECT_EQ(history_to_jsonl(history_from_jsonl(history_to_jsonl(h))), history_to_jsonl(h));
}

TEST(HistoryJsonl, RejectsMalformedInput) {
  const std::string step0 = R"({"index":0,"kind":"inv","process":0,"object":2,"op":"read","payload":[],"level":"base"})";
  EXPECT_THROW(history_from_jsonl(""), HistoryError);
  EXPECT_THROW(history_from_jsonl(step0 + "\n"), HistoryError);
  EXPECT_THROW(history_from_jsonl(header_only() + "{not json\n"), HistoryError);
  EXPECT_THROW(history_from_jsonl(header_only() + "\n"), HistoryError);
  std::string bad_index = step0;
  bad_index.replace(bad_index.find("\"index\":0"), 9, "\"index\":3");
  EXPECT_THROW(history_from_jsonl(header_only() + bad_index + "\n"), HistoryError);
  std::string bad_kind = step0;
  bad_kind.replace(bad_kind.find("\"inv\""), 5, "\"call\"");
  EXPECT_THROW(history_from_jsonl(header_only() + bad_kind + "\n"), HistoryError);
  std::string extra = step0;
  extra.insert(1, R"("time":4,)");
  EXPECT_THROW(history_from_jsonl(header_only() + extra + "\n"), HistoryError);
  std::string text_payload = step0;
  text_payload.replace(text_payload.find("[]"), 2, R"(["x"])");
  EXPECT_THROW(history_from_jsonl(header_only() + text_payload + "\n"), HistoryError);
  EXPECT_THROW(history_from_jsonl(R"({"format":"other","version":1,"processes":[],"objects":[]})"
                                  "\n"),
               HistoryError);
  EXPECT_NO_THROW(history_from_jsonl(header_only() + step0 + "\n"));
}

TEST(TreeJson, RoundTrip) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    HistoryTree t = sample_tree(seed);
    const std::string text = tree_to_json(t);
    HistoryTree back = tree_from_json(text);
    ASSERT_EQ(back.size(), t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
      EXPECT_EQ(back.node(i).parent, t.node(i).parent);
      EXPECT_EQ(back.node(i).appended, t.node(i).appended);
      EXPECT_EQ(back.node(i).coin_outcome, t.node(i).coin_outcome);
    }
    EXPECT_EQ(back.objects(), t.objects());
    EXPECT_EQ(back.processes(), t.processes());
    EXPECT_EQ(tree_to_json(back), text);
  }
}

TEST(TreeJson, EmptyNodeListIsTheRootOnlyTree) {
  HistoryTree t = tree_from_json(R"({"format":"slin-tree","version":1,"processes":[],"objects":[],"nodes":[]})");
  EXPECT_EQ(t.size(), 1u);
  HistoryTree root = tree_from_json(tree_to_json(HistoryTree()));
  EXPECT_EQ(root.size(), 1u);
}

TEST(TreeJson, RejectsBrokenTrees) {
  HistoryTree t = HistoryTree::from_histories({sc::three_op_history(0), sc::three_op_history(1)});
  const std::string good = tree_to_json(t);
  EXPECT_NO_THROW(tree_from_json(good));
  auto mutate = [&](const std::string& from, const std::string& to) {
    std::string s = good;
    auto at = s.find(from, s.find("\"nodes\""));
    EXPECT_NE(at, std::string::npos) << from;
    s.replace(at, from.size(), to);
    return s;
  };
  EXPECT_THROW(tree_from_json(mutate("\"id\": 2", "\"id\": 7")), HistoryError);
  EXPECT_THROW(tree_from_json(mutate("\"parent\": 1", "\"parent\": 9")), HistoryError);
  EXPECT_THROW(tree_from_json(mutate("\"coin_outcome\": 0", "\"coin_outcome\": 5")), HistoryError);
  std::string renamed = good;
  renamed.replace(renamed.find("slin-tree"), 9, "x");
  EXPECT_THROW(tree_from_json(renamed), HistoryError);
  EXPECT_THROW(tree_from_json("[]"), HistoryError);
}

TEST(WitnessJson, RoundTripOfSolverOutput) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    HistoryTree t = sample_tree(seed);
    StrongLinResult r = check_strong_lin(t);
    ASSERT_TRUE(r.witness);
    const std::string text = witness_to_json(*r.witness);
    LinearizationWitness back = witness_from_json(text, t);
    ASSERT_EQ(back.images.size(), r.witness->images.size());
    for (const auto& [id, image] : r.witness->images) EXPECT_EQ(back.images.at(id).steps, image.steps);
    EXPECT_EQ(witness_to_json(back), text);
    EXPECT_TRUE(validate_witness(t, back, SpecRegistry::from_history(t.history(0))).ok);
  }
}

TEST(WitnessJson, RejectsUnknownNodes) {
  HistoryTree t;
  EXPECT_EQ(witness_to_json(LinearizationWitness{}), "{}\n");
  EXPECT_TRUE(witness_from_json("{}", t).images.empty());
  EXPECT_THROW(witness_from_json(R"({"3": []})", t), HistoryError);
  EXPECT_THROW(witness_from_json(R"({"x": []})", t), HistoryError);
  EXPECT_THROW(witness_from_json(R"({"0": 4})", t), HistoryError);
}

TEST(RunSummary, CarriesStatusAndCoins) {
  RunRecord rec = sample_runs(1, 9).front();
  const std::string s = run_summary_to_json(rec);
  EXPECT_NE(s.find("\"status\": \"" + to_string(rec.status) + "\""), std::string::npos);
  EXPECT_NE(s.find("\"coins\""), std::string::npos);
}
