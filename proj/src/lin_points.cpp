#include "slin/lin_points.hpp"

#include <algorithm>

#include "slin/objects.hpp"
#include "slin/strong_lin.hpp"

namespace slin {

namespace {

std::map<OpKey, Operation> top_ops(const History& h) {
  std::map<OpKey, Operation> out;
  for (Operation& op : top_level_operations(h)) out.emplace(op.key, std::move(op));
  return out;
}

double time_of(const TimedExecution& e, std::size_t index) { return e.pairs.at(index).time; }

}  // namespace

PointMap extract_linearization_points(const TimedExecution& e, const History& f_image, const SpecRegistry& specs) {
  const History h = history_of(e);
  std::string why;
  if (!is_linearization(f_image, h, specs, &why))
    throw HistoryError("extract_linearization_points: image is not a linearization: " + why);
  const auto ops = top_ops(h);
  auto t_star = [&](double t) {
    for (const TimedStep& s : e.pairs)
      if (s.time > t) return (t + s.time) / 2;
    return t + 1;
  };
  PointMap pt;
  for (const auto& [key, op] : ops) pt[key] = kNever;
  std::optional<double> prev;
  for (const Operation& op : operations(f_image)) {
    const double inv = time_of(e, ops.at(op.key).inv);
    const double p = prev ? std::max(inv, t_star(*prev)) : inv;
    pt[op.key] = p;
    prev = p;
  }
  return pt;
}

TimedExecution linearized_execution(const TimedExecution& e, const PointMap& pt, const SpecRegistry& specs) {
  const History h = history_of(e);
  const History g = interpret(h);
  const auto ops = top_ops(h);
  std::vector<std::pair<double, OpKey>> order;
  for (const auto& [key, p] : pt) {
    if (p == kNever) continue;
    if (!ops.contains(key)) throw HistoryError("linearization point for an unknown operation");
    order.emplace_back(p, key);
  }
  std::sort(order.begin(), order.end());
  TimedExecution out;
  out.objects = g.objects;
  out.processes = g.processes;
  std::map<ObjectId, State> states;
  for (const auto& [p, key] : order) {
    const Operation& op = ops.at(key);
    const SeqSpec& spec = specs.at(op.object);
    Payload response;
    if (spec.nondeterministic) {
      if (!op.ret) throw HistoryError("pending flip cannot be linearized");
      response = *op.ret;
    } else {
      auto [it, fresh] = states.try_emplace(op.object, spec.initial);
      Transition t = spec.apply(it->second, op.process, op.op, op.args);
      it->second = std::move(t.state);
      response = op.ret ? *op.ret : std::move(t.response);
    }
    const std::size_t i = out.pairs.size();
    out.pairs.push_back({Step{i, StepKind::invocation, op.process, op.object, op.op, op.args, op.level}, p});
    out.pairs.push_back({Step{i + 1, StepKind::response, op.process, op.object, op.op, response, op.level}, p});
  }
  return out;
}

PointCheck check_linearization_points(const TimedExecution& e, const PointMap& pt, const SpecRegistry& specs) {
  const History h = history_of(e);
  const auto ops = top_ops(h);
  for (const auto& [key, op] : ops) {
    auto it = pt.find(key);
    const double p = it == pt.end() ? kNever : it->second;
    const double lo = time_of(e, op.inv);
    const double hi = op.rsp ? time_of(e, *op.rsp) : kNever;
    if (p < lo || p > hi)
      return {false, "(a) fails for p" + std::to_string(key.process) + "#" + std::to_string(key.ordinal)};
  }
  std::vector<double> finite;
  for (const auto& [key, p] : pt)
    if (p != kNever) finite.push_back(p);
  std::sort(finite.begin(), finite.end());
  if (std::adjacent_find(finite.begin(), finite.end()) != finite.end()) return {false, "(b) fails: two equal points"};
  TimedExecution l;
  try {
    l = linearized_execution(e, pt, specs);
  } catch (const std::exception& ex) {
    return {false, std::string("(b) fails: ") + ex.what()};
  }
  std::string why;
  if (!is_linearization(history_of(l), h, specs, &why)) return {false, "(b) fails: " + why};
  return {true, {}};
}

PointMap cas_linearization_points(const TimedExecution& e, ObjectId cas, int n) {
  const History h = history_of(e);
  const ObjectId cur = base_object_id(cas, 0, 0);
  auto val = [&](Value b) { return base_object_id(cas, 1, b); };
  auto elect = [&](Value b) { return base_object_id(cas, 2, b); };
  const Value initial = SpecRegistry::from_history(h).at(cas).initial.at(0);

  // Nested base steps per top-level op on the CAS object.
  struct Call {
    Operation op;
    std::vector<std::size_t> inner;
  };
  std::map<OpKey, Call> calls;
  std::map<std::size_t, OpKey> by_inv;
  std::map<ProcessId, OpKey> open;
  for (const Operation& op : operations(h)) {
    if (op.nested || op.object != cas) continue;
    calls[op.key] = Call{op, {}};
    by_inv[op.inv] = op.key;
  }
  for (std::size_t i = 0; i < h.size(); ++i) {
    const Step& s = h[i];
    if (s.object == cas && s.level == Level::interpreted) {
      if (s.kind == StepKind::invocation) {
        open[s.process] = by_inv.at(i);
      } else {
        open.erase(s.process);
      }
      continue;
    }
    if (auto it = open.find(s.process); it != open.end()) calls[it->second].inner.push_back(i);
  }

  // Block b -> (winning process, index of the winner's test&set response).
  std::map<Value, std::pair<ProcessId, std::size_t>> winner;
  for (std::size_t i = 0; i < h.size(); ++i) {
    const Step& s = h[i];
    if (s.kind != StepKind::response || s.op != "test&set" || s.payload != Payload{0}) continue;
    const Value b = s.object & 0xFFFFFF;
    if (s.object == elect(b)) winner.emplace(b, std::make_pair(s.process, i));
  }
  auto block_state = [&](Value b, std::size_t before) {
    std::optional<Value> v;
    for (std::size_t i = 0; i < before; ++i)
      if (h[i].kind == StepKind::invocation && h[i].op == "write" && h[i].object == val(b)) v = h[i].payload.at(0);
    return v ? *v : (b == 0 ? initial : 0);
  };
  auto cur_write_after = [&](ProcessId p, std::size_t from) -> std::optional<std::size_t> {
    for (std::size_t i = from; i < h.size(); ++i)
      if (h[i].process == p && h[i].kind == StepKind::invocation && h[i].object == cur && h[i].op == "write") return i;
    return std::nullopt;
  };

  PointMap pt;
  for (const auto& [key, c] : calls) {
    pt[key] = kNever;
    std::optional<std::size_t> read_inv;
    for (std::size_t i : c.inner)
      if (h[i].object == cur && h[i].op == "read" && h[i].kind == StepKind::invocation) {
        read_inv = i;
        break;
      }
    if (!read_inv) continue;
    const double t = time_of(e, *read_inv);
    const bool trivial = c.op.op != "CAS" || c.op.args.at(0) == c.op.args.at(1);
    if (trivial) {
      pt[key] = t;
      continue;
    }
    const std::size_t read_rsp = *read_inv + 1;
    if (read_rsp >= h.size() || h[read_rsp].kind != StepKind::response || h[read_rsp].process != key.process) continue;
    const Value b = h[read_rsp].payload.at(0);
    if (block_state(b, *read_inv) != c.op.args.at(0)) {
      pt[key] = t;
      continue;
    }
    auto w = winner.find(b);
    if (w == winner.end()) continue;
    auto write = cur_write_after(w->second.first, w->second.second);
    if (!write) continue;
    const double tw = time_of(e, *write);
    const bool leader = std::find(c.inner.begin(), c.inner.end(), w->second.second) != c.inner.end();
    pt[key] = leader ? tw : tw + static_cast<double>(key.process + 1) / static_cast<double>(n + 2);
  }
  return pt;
}

}  // namespace slin
