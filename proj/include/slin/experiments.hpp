#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "slin/rational.hpp"

namespace slin {

struct ExperimentConfig {
  std::string name;
  /// 0 runs the default sizes {16, 64, 256}.
  int n = 0;
  double delta = 0.5;
  std::size_t trials = 2000;
  std::uint64_t seed = 42;
  std::size_t budget = 10000;
  /// "json" or "csv".
  std::string format = "json";
  std::string out;
  /// Worker threads for sampled experiments; output does not depend on it.
  unsigned threads = 1;
};

const std::vector<std::string>& experiment_names();

enum class Verdict { pass, fail, inconclusive };
std::string to_string(Verdict v);

/// Reference values for every experiment row, keyed "<experiment>.<variant>".
/// Exact entries compare by rational equality; the rest describe a relation.
struct ExpectedValue {
  std::string key;
  std::optional<Rational> exact;
  std::string text;
  std::string citation;
};
const std::vector<ExpectedValue>& expected_values();
/// Throws std::out_of_range for an unknown key.
const ExpectedValue& expected_value(const std::string& key);

struct ReportRow {
  std::string variant;
  std::string metric;
  /// Exact rational, decimal estimate or a word such as "witness".
  std::string value;
  std::optional<double> ci95;
  std::string expected;
  std::string citation;
  Verdict verdict = Verdict::fail;
  std::string note;
};

struct Report {
  std::string experiment;
  ExperimentConfig config;
  std::vector<ReportRow> rows;
  /// Inconclusive if any row is, else fail if any row fails.
  Verdict verdict() const;
};

/// Throws std::invalid_argument for an unknown name or a bad config.
Report run_named_experiment(const ExperimentConfig& cfg);

std::string report_to_json(const Report& r);
/// Columns: experiment, variant, metric, value, ci95, expected, citation, verdict.
std::string report_to_csv(const Report& r);
std::string render_report(const Report& r);

/// Outcomes of the strong-linearizability fixtures.
struct StrongLinSuite {
  bool mutex_witness = false;
  bool mutex_revalidated = false;
  std::size_t mutex_nodes = 0;
  /// One entry per queue schedule (interleaved, contiguous dequeues).
  std::vector<bool> queue_none;
  bool worked_witness = false;
  bool worked_revalidated = false;
  /// The printed images extend to a witness that is not in normal form and
  /// whose leaves no single strong adversary schedules.
  bool printed_extends = false;
  bool printed_normal = false;
  bool printed_schedulable = false;
  /// Its normalization.
  bool normalized_valid = false;
  bool normalized_normal = false;
  bool normalized_schedulable = false;
};
StrongLinSuite run_strong_lin_suite();

}  // namespace slin
