#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

namespace slin {

/// Outcome of one generated property suite.
struct PropertyResult {
  std::string name;
  std::size_t cases = 0;
  std::size_t failures = 0;
  std::string first_failure;
  void fail(const std::string& why);
};

/// Two runs with the same algorithm, coins and seeded policy are identical.
PropertyResult property_engine_determinism(std::size_t runs, std::uint64_t seed);
/// Strong class: runs whose coin vectors agree on the first k coins agree up
/// to the (k+1)-th flip. Exhaustive over omega^2, k = 0..2, seven policies.
PropertyResult property_strong_prefix_agreement();
/// Weak class: every flip response is followed by an invocation of the
/// flipping process.
PropertyResult property_weak_flip_adjacency(std::size_t runs, std::uint64_t seed);
/// linearize_one against a permutation oracle: every register and queue
/// history with three one-op processes or two two-op processes (each last op
/// possibly pending), then `random_cases` random histories of up to six ops.
PropertyResult property_linearize_oracle(std::size_t random_cases, std::uint64_t seed);
/// Normalized witnesses satisfy (L), (P) and (N) and are fixed points.
PropertyResult property_normalization(std::size_t cases, std::uint64_t seed);
/// Extracted points lie in their intervals, order a linearization and give
/// prefix executions along every tree edge.
PropertyResult property_linearization_points(std::size_t cases, std::uint64_t seed);
/// Sampled two-counter trees: per-object witnesses imply a combined one.
PropertyResult property_locality(std::size_t trees, std::uint64_t seed);

}  // namespace slin
