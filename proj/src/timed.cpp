#include "slin/timed.hpp"

namespace slin {

TimedExecution timed_from_history(const History& h) {
  TimedExecution e;
  e.objects = h.objects;
  e.processes = h.processes;
  e.pairs.reserve(h.steps.size());
  for (const Step& s : h.steps) e.pairs.push_back({s, static_cast<double>(s.index)});
  return e;
}

History history_of(const TimedExecution& e) {
  History h;
  h.objects = e.objects;
  h.processes = e.processes;
  for (const TimedStep& p : e.pairs) h.append(p.step);
  return h;
}

void check_timed(const TimedExecution& e) {
  for (std::size_t i = 1; i < e.pairs.size(); ++i) {
    const TimedStep& a = e.pairs[i - 1];
    const TimedStep& b = e.pairs[i];
    if (b.time < a.time) throw HistoryError("timed execution: times decrease at pair " + std::to_string(i));
    if (b.time == a.time) {
      const bool matching = a.step.kind == StepKind::invocation && b.step.kind == StepKind::response &&
                            a.step.process == b.step.process && a.step.object == b.step.object &&
                            a.step.op == b.step.op;
      if (!matching) throw HistoryError("timed execution: equal times at pair " + std::to_string(i));
    }
  }
}

}  // namespace slin
