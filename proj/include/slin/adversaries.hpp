#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "slin/engine.hpp"

namespace slin {

/// A constant process sequence; the same for every coin vector.
class ObliviousSchedule final : public AdversaryPolicy {
 public:
  explicit ObliviousSchedule(std::vector<ProcessId> sequence) : sequence_(std::move(sequence)) {}
  AdversaryClass kind() const override { return AdversaryClass::oblivious; }
  std::string name() const override { return "oblivious-sequence"; }
  std::optional<ProcessId> decide(const AdversaryView&) override;

 private:
  std::vector<ProcessId> sequence_;
  std::size_t next_ = 0;
};

/// Follows a fixed sequence under a declared class, skipping halted
/// processes, then stops.
class ScriptedPolicy final : public AdversaryPolicy {
 public:
  ScriptedPolicy(AdversaryClass cls, std::vector<ProcessId> sequence) : cls_(cls), sequence_(std::move(sequence)) {}
  AdversaryClass kind() const override { return cls_; }
  std::string name() const override { return "scripted"; }
  std::optional<ProcessId> decide(const AdversaryView& view) override;

 private:
  AdversaryClass cls_;
  std::vector<ProcessId> sequence_;
  std::size_t next_ = 0;
};

/// Grants one step at a time to the live processes in ascending cyclic order.
class RoundRobinPolicy final : public AdversaryPolicy {
 public:
  explicit RoundRobinPolicy(AdversaryClass cls) : cls_(cls) {}
  AdversaryClass kind() const override { return cls_; }
  std::string name() const override { return "round-robin"; }
  std::optional<ProcessId> decide(const AdversaryView& view) override;

 private:
  AdversaryClass cls_;
  ProcessId last_ = -1;
};

/// Uniform choice among live processes from a seeded generator.
class RandomPolicy final : public AdversaryPolicy {
 public:
  RandomPolicy(AdversaryClass cls, std::uint64_t seed) : cls_(cls), rng_(seed) {}
  AdversaryClass kind() const override { return cls_; }
  std::string name() const override { return "random"; }
  std::optional<ProcessId> decide(const AdversaryView& view) override;

 private:
  AdversaryClass cls_;
  std::mt19937_64 rng_;
};

/// Wraps a decision function; handy for hand-written strategies.
class FunctionPolicy final : public AdversaryPolicy {
 public:
  using Decide = std::function<std::optional<ProcessId>(const AdversaryView&)>;
  FunctionPolicy(AdversaryClass cls, std::string name, Decide decide)
      : cls_(cls), name_(std::move(name)), decide_(std::move(decide)) {}
  AdversaryClass kind() const override { return cls_; }
  std::string name() const override { return name_; }
  std::optional<ProcessId> decide(const AdversaryView& view) override { return decide_(view); }

 private:
  AdversaryClass cls_;
  std::string name_;
  Decide decide_;
};

/// Lowest-numbered live process.
std::optional<ProcessId> first_live(const AdversaryView& view);
/// Number of flip responses in the history and the value of the last one.
std::size_t flip_count(const History& h);
std::optional<Value> last_flip(const History& h);

/// Follows `prefix`, then the suffix keyed by the most recent flip outcome,
/// then (optionally) runs the lowest-numbered live process until all halt.
class FlipBranchPolicy final : public AdversaryPolicy {
 public:
  FlipBranchPolicy(AdversaryClass cls, std::string name, std::vector<ProcessId> prefix,
                   std::map<Value, std::vector<ProcessId>> suffix, bool run_to_completion = true)
      : cls_(cls),
        name_(std::move(name)),
        prefix_(std::move(prefix)),
        suffix_(std::move(suffix)),
        finish_(run_to_completion) {}
  AdversaryClass kind() const override { return cls_; }
  std::string name() const override { return name_; }
  std::optional<ProcessId> decide(const AdversaryView& view) override;

 private:
  AdversaryClass cls_;
  std::string name_;
  std::vector<ProcessId> prefix_;
  std::map<Value, std::vector<ProcessId>> suffix_;
  bool finish_;
  std::size_t pos_ = 0;
};

}  // namespace slin
