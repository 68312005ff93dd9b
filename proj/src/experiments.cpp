#include "slin/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <stdexcept>

#include "json.hpp"
#include "slin/adversaries.hpp"
#include "slin/equivalence.hpp"
#include "slin/game.hpp"
#include "slin/loadbalance.hpp"
#include "slin/scenarios.hpp"
#include "slin/strong_lin.hpp"

namespace slin {

namespace sc = scenarios;
using Json = nlohmann::ordered_json;

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"snapshot", "srsw-register", "mrsw-register",
                                              "hw-queue", "loadbalance",   "strong-lin-suite"};
  return names;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

const std::vector<ExpectedValue>& expected_values() {
  static const std::vector<ExpectedValue> table{
      {"snapshot.atomic-strong", Rational(-1), "-1", "snapshot example: atomic snapshot, best strong adversary"},
      {"snapshot.atomic-weak", Rational(0), "0", "snapshot example: atomic snapshot, best weak adversary"},
      {"snapshot.implemented-weak", Rational(-2), "-2", "snapshot example: double-collect snapshot, weak schedule"},
      {"srsw-register.atomic-strong", Rational(1), "1", "register example: atomic register, best strong adversary"},
      {"srsw-register.implemented-oblivious", Rational(1, 2), "1/2",
       "register example: unary register, oblivious schedule"},
      {"mrsw-register.implemented-weak", Rational(-1, 2), "-1/2",
       "two-reader register example: implementation, weak schedule"},
      {"mrsw-register.atomic-strong", Rational(0), "0",
       "two-reader register example: atomic register, best strong adversary"},
      {"hw-queue.implemented-weak", Rational(1), "1", "queue example: Herlihy-Wing queue, weak schedule"},
      {"hw-queue.atomic-strong", Rational(1, 2), "1/2", "queue example: atomic queue, best strong adversary"},
      {"loadbalance.atomic", std::nullopt, "<= (K_max-1)/sqrt(n) + 3*ci95",
       "load balancing: upper bound for atomic counters against weak adversaries"},
      {"loadbalance.implemented", std::nullopt, "ci95 lower end > (K_max-1)/sqrt(n)",
       "load balancing: lower bound for linearizable counters against A_p"},
      {"loadbalance.monotone", std::nullopt, "means increase with n",
       "load balancing: lower bound grows with sqrt(n)"},
      {"strong-lin-suite.mutex-counter", std::nullopt, "witness",
       "mutex-wrapped counter is strongly linearizable"},
      {"strong-lin-suite.hw-queue", std::nullopt, "none", "Herlihy-Wing queue is not strongly linearizable"},
      {"strong-lin-suite.worked-example", std::nullopt, "witness",
       "normalization example: the history set has a strong linearization"},
      {"strong-lin-suite.printed-images", std::nullopt, "unschedulable",
       "normalization example: the given images are not produced by one strong adversary"},
      {"strong-lin-suite.normalized-images", std::nullopt, "schedulable",
       "normalization example: normalized images are produced by one strong adversary"},
  };
  return table;
}

const ExpectedValue& expected_value(const std::string& key) {
  for (const ExpectedValue& e : expected_values())
    if (e.key == key) return e;
  throw std::out_of_range("no expected value for " + key);
}

Verdict Report::verdict() const {
  bool failed = false;
  for (const ReportRow& r : rows) {
    if (r.verdict == Verdict::inconclusive) return Verdict::inconclusive;
    failed = failed || r.verdict == Verdict::fail;
  }
  return failed ? Verdict::fail : Verdict::pass;
}

namespace {

std::string decimal(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  return buf;
}

Verdict verdict_of(bool ok) { return ok ? Verdict::pass : Verdict::fail; }

ReportRow row_for(const std::string& experiment, const std::string& variant, const std::string& metric) {
  const ExpectedValue& e = expected_value(experiment + "." + variant);
  ReportRow r;
  r.variant = variant;
  r.metric = metric;
  r.expected = e.text;
  r.citation = e.citation;
  return r;
}

ReportRow exact_row(const std::string& experiment, const std::string& variant, const std::string& metric,
                    const std::function<Rational()>& compute) {
  ReportRow r = row_for(experiment, variant, metric);
  const ExpectedValue& e = expected_value(experiment + "." + variant);
  try {
    Rational v = compute();
    r.value = to_string(v);
    r.verdict = verdict_of(v == *e.exact);
  } catch (const SimulationError& err) {
    r.value = "n/a";
    r.verdict = Verdict::inconclusive;
    r.note = err.what();
  }
  return r;
}

GameOptions game(AdversaryClass cls, const std::vector<Value>& omega) {
  GameOptions o;
  o.cls = cls;
  o.omega = omega;
  return o;
}

RunOptions run_options(const ExperimentConfig& cfg) {
  RunOptions o;
  o.budget = cfg.budget;
  return o;
}

Rational indicator(bool b) { return b ? 1 : 0; }

void snapshot(const ExperimentConfig& cfg, Report& rep) {
  const std::string e = "snapshot";
  rep.rows.push_back(exact_row(e, "atomic-strong", "expected-scan-sum", [] {
    return optimal_value(sc::snapshot_example(false), game(AdversaryClass::strong, sc::snapshot_omega()),
                         Goal::minimize, sc::scan_sum)
        .value;
  }));
  rep.rows.push_back(exact_row(e, "atomic-weak", "expected-scan-sum", [] {
    return optimal_value(sc::snapshot_example(false), game(AdversaryClass::weak, sc::snapshot_omega()),
                         Goal::minimize, sc::scan_sum)
        .value;
  }));
  rep.rows.push_back(exact_row(e, "implemented-weak", "expected-scan-sum", [&] {
    return enumerate_expectation(sc::snapshot_example(true), sc::snapshot_bad_schedule, sc::snapshot_omega(), 1,
                                 sc::scan_sum, run_options(cfg));
  }));
}

void srsw_register(const ExperimentConfig& cfg, Report& rep) {
  const std::string e = "srsw-register";
  rep.rows.push_back(exact_row(e, "atomic-strong", "expected-read", [] {
    return optimal_value(sc::register_example(false), game(AdversaryClass::strong, sc::register_omega()),
                         Goal::minimize, sc::read_result)
        .value;
  }));
  rep.rows.push_back(exact_row(e, "implemented-oblivious", "expected-read", [&] {
    return enumerate_expectation(sc::register_example(true), sc::register_oblivious_schedule, sc::register_omega(), 1,
                                 sc::read_result, run_options(cfg));
  }));
}

void mrsw_register(const ExperimentConfig& cfg, Report& rep) {
  const std::string e = "mrsw-register";
  rep.rows.push_back(exact_row(e, "atomic-strong", "expected-read", [] {
    return optimal_value(sc::mrsw_example(false), game(AdversaryClass::strong, sc::mrsw_omega()), Goal::minimize,
                         sc::r1_result)
        .value;
  }));
  rep.rows.push_back(exact_row(e, "implemented-weak", "expected-read", [&] {
    return enumerate_expectation(sc::mrsw_example(true), sc::mrsw_weak_schedule, sc::mrsw_omega(), 1, sc::r1_result,
                                 run_options(cfg));
  }));
}

void hw_queue(const ExperimentConfig& cfg, Report& rep) {
  const std::string e = "hw-queue";
  auto goal = [](const RunRecord& rec) { return indicator(sc::queue_goal_met(rec)); };
  rep.rows.push_back(exact_row(e, "atomic-strong", "max-goal-probability", [&] {
    return optimal_value(sc::queue_example(false), game(AdversaryClass::strong, sc::queue_omega()), Goal::maximize,
                         goal)
        .value;
  }));
  rep.rows.push_back(exact_row(e, "implemented-weak", "goal-probability", [&] {
    return enumerate_expectation(sc::queue_example(true), sc::queue_weak_schedule, sc::queue_omega(), 1, goal,
                                 run_options(cfg));
  }));
}

struct Family {
  std::string name;
  std::function<AdversaryFamily(int n, std::size_t k_max)> make;
};

const std::vector<Family>& atomic_families() {
  static const std::vector<Family> families{
      {"A_p",
       [](int n, std::size_t) -> AdversaryFamily {
         return [n](ProcessId p, std::uint64_t) { return std::make_unique<ApPolicy>(p, n); };
       }},
      {"round-robin",
       [](int, std::size_t) -> AdversaryFamily {
         return [](ProcessId, std::uint64_t) { return std::make_unique<RoundRobinPolicy>(AdversaryClass::weak); };
       }},
      {"random",
       [](int, std::size_t) -> AdversaryFamily {
         return [](ProcessId, std::uint64_t s) { return std::make_unique<RandomPolicy>(AdversaryClass::weak, s); };
       }},
      {"capped-loader",
       [](int n, std::size_t k_max) -> AdversaryFamily {
         return [n, k_max](ProcessId p, std::uint64_t) { return capped_loader(p, n, k_max); };
       }},
  };
  return families;
}

std::string lb_note(const PhiEstimate& est, std::size_t k_max, double bound) {
  return "k_max=" + std::to_string(k_max) + " bound=" + decimal(bound) + " flagged=" + std::to_string(est.flagged) +
         " over_contention=" + std::to_string(est.over_contention);
}

void loadbalance(const ExperimentConfig& cfg, Report& rep) {
  const std::string e = "loadbalance";
  std::vector<int> sizes = cfg.n > 0 ? std::vector<int>{cfg.n} : std::vector<int>{16, 64, 256};
  std::map<CounterKind, std::vector<double>> means;
  for (int n : sizes) {
    PhiConfig pc;
    pc.n = n;
    pc.k_max = loadbalance_k_max(n, cfg.delta);
    pc.trials = cfg.trials;
    pc.seed = cfg.seed;
    pc.budget = cfg.budget;
    pc.threads = cfg.threads;
    const double bound = (static_cast<double>(pc.k_max) - 1) / std::sqrt(static_cast<double>(n));
    const std::string suffix = "/n=" + std::to_string(n);
    const Algorithm atomic = loadbalance_algorithm(n, CounterKind::atomic);
    for (const Family& f : atomic_families()) {
      PhiEstimate est = estimate_phi(atomic, f.make(n, pc.k_max), pc);
      ReportRow r = row_for(e, "atomic", "phi");
      r.variant = "atomic/" + f.name + suffix;
      r.value = decimal(est.mean);
      r.ci95 = est.ci95;
      r.expected = "<= " + decimal(bound) + " + 3*ci95";
      r.note = lb_note(est, pc.k_max, bound);
      r.verdict = est.flagged > 0 ? Verdict::inconclusive : verdict_of(est.mean <= bound + 3 * est.ci95);
      rep.rows.push_back(std::move(r));
    }
    for (CounterKind kind : {CounterKind::llsc, CounterKind::writefirst}) {
      PhiEstimate est = estimate_phi(loadbalance_algorithm(n, kind), atomic_families().front().make(n, pc.k_max), pc);
      means[kind].push_back(est.mean);
      ReportRow r = row_for(e, "implemented", "phi");
      r.variant = to_string(kind) + "/A_p" + suffix;
      r.value = decimal(est.mean);
      r.ci95 = est.ci95;
      r.expected = "ci95 lower end > " + decimal(bound);
      r.note = lb_note(est, pc.k_max, bound);
      r.verdict = est.flagged > 0 ? Verdict::inconclusive : verdict_of(est.mean - est.ci95 > bound);
      rep.rows.push_back(std::move(r));
    }
  }
  if (sizes.size() < 2) return;
  for (const auto& [kind, ms] : means) {
    ReportRow r = row_for(e, "monotone", "phi-means");
    r.variant = to_string(kind) + "/A_p";
    bool increasing = true;
    for (std::size_t i = 0; i < ms.size(); ++i) {
      if (i > 0) {
        r.value += " < ";
        increasing = increasing && ms[i - 1] < ms[i];
      }
      r.value += decimal(ms[i]);
    }
    r.verdict = verdict_of(increasing);
    rep.rows.push_back(std::move(r));
  }
}

std::size_t ancestor(const HistoryTree& t, std::size_t node, std::size_t depth) {
  while (t.depth(node) > depth) node = *t.node(node).parent;
  return node;
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

void strong_lin_suite(const ExperimentConfig&, Report& rep) {
  const std::string e = "strong-lin-suite";
  const StrongLinSuite s = run_strong_lin_suite();
  auto add = [&](const std::string& variant, const std::string& value, bool ok, std::string note = {}) {
    ReportRow r = row_for(e, variant, "result");
    r.value = value;
    r.verdict = verdict_of(ok);
    r.note = std::move(note);
    rep.rows.push_back(std::move(r));
  };
  add("mutex-counter", s.mutex_witness ? "witness" : "none", s.mutex_witness && s.mutex_revalidated,
      "nodes=" + std::to_string(s.mutex_nodes) + (s.mutex_revalidated ? " revalidated" : " revalidation failed"));
  bool all_none = !s.queue_none.empty();
  for (bool b : s.queue_none) all_none = all_none && b;
  add("hw-queue", all_none ? "none" : "witness", all_none, std::to_string(s.queue_none.size()) + " schedules");
  add("worked-example", s.worked_witness ? "witness" : "none", s.worked_witness && s.worked_revalidated);
  add("printed-images", s.printed_schedulable ? "schedulable" : "unschedulable",
      s.printed_extends && !s.printed_normal && !s.printed_schedulable,
      std::string(s.printed_extends ? "extends to a witness" : "does not extend") +
          (s.printed_normal ? ", normal form" : ", not normal form"));
  add("normalized-images", s.normalized_schedulable ? "schedulable" : "unschedulable",
      s.normalized_valid && s.normalized_normal && s.normalized_schedulable,
      std::string(s.normalized_valid ? "valid" : "invalid") + (s.normalized_normal ? ", normal form" : ", not normal"));
}

Json config_json(const ExperimentConfig& c) {
  Json j;
  j["name"] = c.name;
  j["n"] = c.n;
  j["delta"] = c.delta;
  j["trials"] = c.trials;
  j["seed"] = c.seed;
  j["budget"] = c.budget;
  j["format"] = c.format;
  j["out"] = c.out;
  return j;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

StrongLinSuite run_strong_lin_suite() {
  StrongLinSuite s;
  {
    HistoryTree t = sc::mutex_counter_tree();
    auto specs = SpecRegistry::from_history(t.history(0));
    s.mutex_nodes = t.size();
    auto r = check_strong_lin(t, specs);
    s.mutex_witness = r.witness.has_value();
    s.mutex_revalidated = s.mutex_witness && validate_witness(t, *r.witness, specs).ok;
  }
  for (auto schedule : {sc::queue_weak_schedule, sc::queue_contiguous_dequeue_schedule})
    s.queue_none.push_back(!check_strong_lin(sc::queue_tree(schedule)).witness.has_value());

  HistoryTree t = sc::three_op_tree();
  auto specs = SpecRegistry::from_history(t.history(0));
  auto found = check_strong_lin(t, specs);
  s.worked_witness = found.witness.has_value();
  s.worked_revalidated = s.worked_witness && validate_witness(t, *found.witness, specs).ok;

  const auto printed = sc::three_op_printed_images();
  StrongLinOptions opt;
  opt.pinned[ancestor(t, t.leaves().front(), sc::kThreeOpCommonPrefix)] = printed.common;
  for (std::size_t leaf : t.leaves())
    opt.pinned[leaf] = printed.leaves.at(t.history(leaf)[sc::kThreeOpCommonPrefix].payload.at(0));
  auto pinned = check_strong_lin(t, specs, opt);
  s.printed_extends = pinned.witness.has_value() && validate_witness(t, *pinned.witness, specs).ok;
  if (!s.printed_extends) return s;
  GameOptions g = game(AdversaryClass::strong, sc::three_op_omega());
  s.printed_normal = check_normal_form(t, *pinned.witness).ok;
  s.printed_schedulable = schedulable_by_one_adversary(sc::three_op_example(), g, leaf_images(t, *pinned.witness));
  auto norm = normalize_witness(t, *pinned.witness, specs);
  s.normalized_valid = validate_witness(t, norm, specs).ok;
  s.normalized_normal = check_normal_form(t, norm).ok;
  s.normalized_schedulable = schedulable_by_one_adversary(sc::three_op_example(), g, leaf_images(t, norm));
  return s;
}

Report run_named_experiment(const ExperimentConfig& cfg) {
  if (cfg.trials == 0) throw std::invalid_argument("trials must be positive");
  if (cfg.budget == 0) throw std::invalid_argument("budget must be positive");
  if (!(cfg.delta >= 0)) throw std::invalid_argument("delta must be non-negative");
  if (cfg.format != "json" && cfg.format != "csv") throw std::invalid_argument("format must be json or csv");
  if (cfg.n < 0) throw std::invalid_argument("n must be positive");
  if (cfg.n > 0) {
    const int m = static_cast<int>(std::lround(std::sqrt(static_cast<double>(cfg.n))));
    if (m * m != cfg.n) throw std::invalid_argument("n must be a perfect square");
  }
  Report rep;
  rep.experiment = cfg.name;
  rep.config = cfg;
  if (cfg.name == "snapshot")
    snapshot(cfg, rep);
  else if (cfg.name == "srsw-register")
    srsw_register(cfg, rep);
  else if (cfg.name == "mrsw-register")
    mrsw_register(cfg, rep);
  else if (cfg.name == "hw-queue")
    hw_queue(cfg, rep);
  else if (cfg.name == "loadbalance")
    loadbalance(cfg, rep);
  else if (cfg.name == "strong-lin-suite")
    strong_lin_suite(cfg, rep);
  else
    throw std::invalid_argument("unknown experiment \"" + cfg.name + "\"");
  return rep;
}

std::string report_to_json(const Report& r) {
  Json j;
  j["experiment"] = r.experiment;
  j["config"] = config_json(r.config);
  Json rows = Json::array();
  for (const ReportRow& row : r.rows) {
    Json o;
    o["variant"] = row.variant;
    o["metric"] = row.metric;
    o["value"] = row.value;
    o["ci95"] = row.ci95 ? Json(*row.ci95) : Json(nullptr);
    o["expected"] = row.expected;
    o["citation"] = row.citation;
    o["verdict"] = to_string(row.verdict);
    o["note"] = row.note;
    rows.push_back(std::move(o));
  }
  j["results"] = std::move(rows);
  j["verdict"] = to_string(r.verdict());
  return j.dump(2) + "\n";
}

std::string report_to_csv(const Report& r) {
  std::string out = "experiment,variant,metric,value,ci95,expected,citation,verdict\n";
  for (const ReportRow& row : r.rows) {
    out += csv_field(r.experiment) + "," + csv_field(row.variant) + "," + csv_field(row.metric) + "," +
           csv_field(row.value) + "," + (row.ci95 ? decimal(*row.ci95) : "") + "," + csv_field(row.expected) + "," +
           csv_field(row.citation) + "," + to_string(row.verdict) + "\n";
  }
  return out;
}

std::string render_report(const Report& r) { return r.config.format == "csv" ? report_to_csv(r) : report_to_json(r); }

}  // namespace slin
