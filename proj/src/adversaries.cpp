#include "slin/adversaries.hpp"

namespace slin {

std::optional<ProcessId> ObliviousSchedule::decide(const AdversaryView&) {
  if (next_ >= sequence_.size()) return std::nullopt;
  return sequence_[next_++];
}

std::optional<ProcessId> ScriptedPolicy::decide(const AdversaryView& view) {
  while (next_ < sequence_.size()) {
    const ProcessId p = sequence_[next_++];
    if (p >= 0 && static_cast<std::size_t>(p) < view.status.size() && view.status[static_cast<std::size_t>(p)].halted)
      continue;
    return p;
  }
  return std::nullopt;
}

std::optional<ProcessId> RoundRobinPolicy::decide(const AdversaryView& view) {
  const auto n = static_cast<ProcessId>(view.status.size());
  for (ProcessId k = 1; k <= n; ++k) {
    const ProcessId p = (last_ + k) % n;
    if (!view.status[static_cast<std::size_t>(p)].halted) {
      last_ = p;
      return p;
    }
  }
  return std::nullopt;
}

std::optional<ProcessId> RandomPolicy::decide(const AdversaryView& view) {
  std::vector<ProcessId> live;
  for (std::size_t p = 0; p < view.status.size(); ++p)
    if (!view.status[p].halted) live.push_back(static_cast<ProcessId>(p));
  if (live.empty()) return std::nullopt;
  std::uniform_int_distribution<std::size_t> pick(0, live.size() - 1);
  return live[pick(rng_)];
}

std::optional<ProcessId> first_live(const AdversaryView& view) {
  for (std::size_t p = 0; p < view.status.size(); ++p)
    if (!view.status[p].halted) return static_cast<ProcessId>(p);
  return std::nullopt;
}

std::size_t flip_count(const History& h) {
  std::size_t n = 0;
  for (const Step& s : h.steps)
    if (s.kind == StepKind::response && is_flip(s)) ++n;
  return n;
}

std::optional<Value> last_flip(const History& h) {
  for (auto it = h.steps.rbegin(); it != h.steps.rend(); ++it)
    if (it->kind == StepKind::response && is_flip(*it)) return it->payload.at(0);
  return std::nullopt;
}

std::optional<ProcessId> FlipBranchPolicy::decide(const AdversaryView& view) {
  if (cls_ == AdversaryClass::oblivious) throw SimulationError("flip-dependent schedules cannot be oblivious");
  auto live = [&](ProcessId p) {
    return p >= 0 && static_cast<std::size_t>(p) < view.status.size() && !view.status[static_cast<std::size_t>(p)].halted;
  };
  while (pos_ < prefix_.size()) {
    const ProcessId p = prefix_[pos_++];
    if (live(p)) return p;
  }
  const std::optional<Value> flip = last_flip(view.history);
  if (flip) {
    auto it = suffix_.find(*flip);
    if (it != suffix_.end()) {
      while (pos_ - prefix_.size() < it->second.size()) {
        const ProcessId p = it->second[pos_++ - prefix_.size()];
        if (live(p)) return p;
      }
    }
  }
  if (!finish_) return std::nullopt;
  return first_live(view);
}

}  // namespace slin
