#pragma once

#include <vector>

#include "slin/history.hpp"

namespace slin {

struct TimedStep {
  Step step;
  double time = 0;
};

struct TimedExecution {
  std::vector<TimedStep> pairs;
  std::map<ObjectId, ObjectInfo> objects;
  std::set<ProcessId> processes;
};

/// The i-th step occurs at time i.
TimedExecution timed_from_history(const History& h);
History history_of(const TimedExecution& e);

/// Times non-decreasing; equal adjacent times only for an invocation followed
/// by its own response. Throws HistoryError otherwise.
void check_timed(const TimedExecution& e);

}  // namespace slin
