#pragma once

#include <limits>
#include <map>
#include <string>

#include "slin/history.hpp"
#include "slin/seq_spec.hpp"
#include "slin/timed.hpp"

namespace slin {

inline constexpr double kNever = std::numeric_limits<double>::infinity();

/// Operation -> linearization point; +inf for ops left out.
using PointMap = std::map<OpKey, double>;

/// Points for the linearization `f_image` of interpret(history_of(e)): the
/// first op sits at its invocation, each later op at the larger of its
/// invocation time and the midpoint between the previous point and the next
/// step after it (previous point + 1 past the last step). Throws HistoryError
/// if `f_image` is not a linearization.
PointMap extract_linearization_points(const TimedExecution& e, const History& f_image, const SpecRegistry& specs);

/// L(E, pt): each op with a finite point as an atomic pair at that time, in
/// point order. Responses of pending ops come from the sequential spec.
TimedExecution linearized_execution(const TimedExecution& e, const PointMap& pt, const SpecRegistry& specs);

struct PointCheck {
  bool ok = false;
  std::string reason;
};

/// (a) every point lies in its op's interval, and (b) the points order the
/// ops into a linearization of interpret(history_of(e)).
PointCheck check_linearization_points(const TimedExecution& e, const PointMap& pt, const SpecRegistry& specs);

/// Points for the CAS-from-registers object `cas` in a base-level execution
/// with `n` processes: reads, CAS(X, X) and failing CAS sit at their read of
/// Cur; a successful CAS sits at the leader's write of Cur and the other
/// CAS calls on the same block at that time plus (p + 1) / (n + 2).
PointMap cas_linearization_points(const TimedExecution& e, ObjectId cas, int n);

}  // namespace slin
