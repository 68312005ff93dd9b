#include "slin/cli.hpp"

#include <random>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "slin/adversaries.hpp"
#include "slin/experiments.hpp"
#include "slin/io.hpp"
#include "slin/linearize.hpp"
#include "slin/loadbalance.hpp"
#include "slin/scenarios.hpp"
#include "slin/strong_lin.hpp"

namespace slin {

namespace sc = scenarios;

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SimulateArgs {
  std::string alg;
  std::string adversary = "round-robin";
  std::string cls = "strong";
  std::string coins;
  ProcessId target = 0;
  bool summary = false;
};

struct Scenario {
  Algorithm alg;
  std::vector<Value> omega;
  PolicyFactory canonical;
};

Scenario scenario(const std::string& name) {
  if (name == "snapshot") return {sc::snapshot_example(true), sc::snapshot_omega(), sc::snapshot_bad_schedule};
  if (name == "snapshot-atomic")
    return {sc::snapshot_example(false), sc::snapshot_omega(), sc::snapshot_strong_strategy};
  if (name == "srsw-register")
    return {sc::register_example(true), sc::register_omega(), sc::register_oblivious_schedule};
  if (name == "srsw-register-atomic") return {sc::register_example(false), sc::register_omega(), {}};
  if (name == "mrsw-register") return {sc::mrsw_example(true), sc::mrsw_omega(), sc::mrsw_weak_schedule};
  if (name == "mrsw-register-atomic") return {sc::mrsw_example(false), sc::mrsw_omega(), {}};
  if (name == "hw-queue") return {sc::queue_example(true), sc::queue_omega(), sc::queue_weak_schedule};
  if (name == "hw-queue-atomic") return {sc::queue_example(false), sc::queue_omega(), {}};
  if (name == "counter") return {sc::counter_example(false), sc::counter_omega(), {}};
  if (name == "counter-mutex") return {sc::counter_example(true), sc::counter_omega(), {}};
  if (name == "three-op") return {sc::three_op_example(), sc::three_op_omega(), {}};
  throw UsageError("unknown algorithm \"" + name + "\"");
}

const char* kAlgorithms =
    "snapshot, snapshot-atomic, srsw-register, srsw-register-atomic, mrsw-register, mrsw-register-atomic, "
    "hw-queue, hw-queue-atomic, counter, counter-mutex, three-op, loadbalance-atomic, loadbalance-llsc, "
    "loadbalance-writefirst";

AdversaryClass class_from(const std::string& s) {
  if (s == "oblivious") return AdversaryClass::oblivious;
  if (s == "weak") return AdversaryClass::weak;
  if (s == "strong") return AdversaryClass::strong;
  if (s == "offline") return AdversaryClass::offline;
  throw UsageError("unknown adversary class \"" + s + "\"");
}

std::vector<Value> parse_coins(const std::string& text) {
  std::vector<Value> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    Value v = 0;
    try {
      v = std::stoll(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (item.empty() || used != item.size()) throw UsageError("bad coin value \"" + item + "\"");
    out.push_back(v);
  }
  return out;
}

int simulate(const SimulateArgs& a, const ExperimentConfig& cfg, std::ostream& out, std::ostream& err) {
  std::mt19937_64 rng(cfg.seed);
  Algorithm alg;
  std::unique_ptr<CoinSource> coins;
  std::unique_ptr<AdversaryPolicy> policy;
  const bool lb = a.alg.rfind("loadbalance-", 0) == 0;
  if (lb) {
    const int n = cfg.n > 0 ? cfg.n : 16;
    CounterKind kind;
    try {
      kind = counter_kind_from_string(a.alg.substr(12));
      alg = loadbalance_algorithm(n, kind);
    } catch (const std::exception& e) {
      throw UsageError(e.what());
    }
    const int m = loadbalance_width(n);
    std::vector<std::vector<Value>> per(n);
    std::vector<Value> given = parse_coins(a.coins);
    if (!given.empty() && given.size() != static_cast<std::size_t>(n))
      throw UsageError("loadbalance takes one coin per process");
    for (int p = 0; p < n; ++p) per[p] = {given.empty() ? static_cast<Value>(rng() % m) : given[p]};
    coins = std::make_unique<PerProcessCoins>(std::move(per));
    if (a.target < 0 || a.target >= n) throw UsageError("target out of range");
    if (a.adversary == "A_p") policy = std::make_unique<ApPolicy>(a.target, n);
    if (a.adversary == "capped-loader") policy = capped_loader(a.target, n, loadbalance_k_max(n, cfg.delta));
  } else {
    Scenario s = scenario(a.alg);
    alg = s.alg;
    std::vector<Value> given = parse_coins(a.coins);
    if (given.empty())
      for (int i = 0; i < 64; ++i) given.push_back(s.omega[rng() % s.omega.size()]);
    coins = std::make_unique<CoinVector>(std::move(given));
    if (a.adversary == "scheduled") {
      if (!s.canonical) throw UsageError("no canonical schedule for " + a.alg);
      policy = s.canonical();
    }
  }
  if (!policy) {
    if (a.adversary == "round-robin")
      policy = std::make_unique<RoundRobinPolicy>(class_from(a.cls));
    else if (a.adversary == "random")
      policy = std::make_unique<RandomPolicy>(class_from(a.cls), rng());
    else if (a.adversary == "first-live")
      policy = std::make_unique<FunctionPolicy>(class_from(a.cls), "first-live", first_live);
    else
      throw UsageError("adversary \"" + a.adversary + "\" does not apply to " + a.alg);
  }
  RunOptions opt;
  opt.budget = cfg.budget;
  RunRecord rec = run(alg, *policy, *coins, opt);
  const std::string text = history_to_jsonl(rec.history);
  if (cfg.out.empty())
    out << text;
  else
    write_file(cfg.out, text);
  if (a.summary) err << run_summary_to_json(rec);
  return rec.status == RunStatus::budget_exhausted ? 1 : 0;
}

void emit(const ExperimentConfig& cfg, const std::string& text, std::ostream& out) {
  if (cfg.out.empty())
    out << text;
  else
    write_file(cfg.out, text);
}

int check_lin(const std::string& path, const ExperimentConfig& cfg, std::ostream& out) {
  History h = history_from_jsonl(read_file(path));
  check_well_formed(h);
  auto lin = linearize_one(h);
  if (!lin) {
    emit(cfg, "NONE\n", out);
    return 1;
  }
  emit(cfg, history_to_jsonl(*lin), out);
  return 0;
}

int check_strong(const std::string& path, std::size_t max_nodes, const ExperimentConfig& cfg, std::ostream& out) {
  HistoryTree t = tree_from_json(read_file(path));
  t.validate();
  StrongLinOptions opt;
  opt.max_nodes = max_nodes;
  auto r = check_strong_lin(t, SpecRegistry::from_history(t.history(0)), opt);
  if (!r.witness) {
    emit(cfg, "NONE\n", out);
    return 1;
  }
  emit(cfg, witness_to_json(*r.witness), out);
  return 0;
}

std::string joined_names() {
  std::string s;
  for (const std::string& n : experiment_names()) s += (s.empty() ? "" : ", ") + n;
  return s;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Strong linearizability experiments and checkers", "slin"};
  app.require_subcommand(1, 1);
  ExperimentConfig cfg;
  cfg.threads = std::max(1u, std::thread::hardware_concurrency());
  app.add_option("--seed", cfg.seed, "Seed for all sampled randomness")->capture_default_str();
  app.add_option("--trials", cfg.trials, "Monte Carlo trials")->capture_default_str();
  app.add_option("--n", cfg.n, "Processes for loadbalance (perfect square; 0 = 16, 64, 256)");
  app.add_option("--delta", cfg.delta, "K_max slack")->capture_default_str();
  app.add_option("--budget", cfg.budget, "Step budget per run")->capture_default_str();
  app.add_option("--format", cfg.format, "Report format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
  app.add_option("--out", cfg.out, "Output file (default stdout)");
  app.add_option("--threads", cfg.threads, "Worker threads for sampled experiments");

  auto* experiment = app.add_subcommand("experiment", "Run a named experiment: " + joined_names());
  std::string name;
  experiment->add_option("name", name, "Experiment name")->required();

  auto* sim = app.add_subcommand("simulate", "Run one algorithm under one adversary and print its history");
  SimulateArgs sa;
  sim->add_option("--alg", sa.alg, std::string("Algorithm: ") + kAlgorithms)->required();
  sim->add_option("--adversary", sa.adversary,
                  "round-robin, random, first-live, scheduled, A_p or capped-loader")
      ->capture_default_str();
  sim->add_option("--class", sa.cls, "Adversary class for round-robin, random and first-live")->capture_default_str();
  sim->add_option("--coins", sa.coins, "Comma-separated coin values (default: drawn from --seed)");
  sim->add_option("--target", sa.target, "Target process for A_p and capped-loader")->capture_default_str();
  sim->add_flag("--summary", sa.summary, "Print run metadata to stderr");

  auto* lin = app.add_subcommand("check-lin", "Find a linearization of a history file");
  std::string history_path;
  lin->add_option("history", history_path, "History JSON Lines file")->required();

  auto* strong = app.add_subcommand("check-strong-lin", "Find a strong linearization of a history tree file");
  std::string tree_path;
  std::size_t max_nodes = 100'000;
  strong->add_option("tree", tree_path, "History tree JSON file")->required();
  strong->add_option("--max-nodes", max_nodes, "Largest tree accepted")->capture_default_str();

  for (CLI::App* sub : {experiment, sim, lin, strong}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return 2;
  }
  if (cfg.threads == 0) cfg.threads = 1;

  try {
    if (experiment->parsed()) {
      const auto& names = experiment_names();
      if (std::find(names.begin(), names.end(), name) == names.end()) {
        err << "error: unknown experiment \"" << name << "\"; expected one of: " << joined_names() << "\n";
        return 2;
      }
      cfg.name = name;
      Report rep = run_named_experiment(cfg);
      emit(cfg, render_report(rep), out);
      return rep.verdict() == Verdict::pass ? 0 : 1;
    }
    if (sim->parsed()) return simulate(sa, cfg, out, err);
    if (lin->parsed()) return check_lin(history_path, cfg, out);
    if (strong->parsed()) return check_strong(tree_path, max_nodes, cfg, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const HistoryError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const SimulationError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace slin
