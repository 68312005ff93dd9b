#include "slin/history.hpp"

#include <string>
#include <utility>

namespace slin {

const Step& History::append(Step s) {
  s.index = steps.size();
  steps.push_back(std::move(s));
  return steps.back();
}

History History::prefix(std::size_t length) const {
  History out;
  out.objects = objects;
  out.processes = processes;
  if (length > steps.size()) length = steps.size();
  out.steps.assign(steps.begin(), steps.begin() + static_cast<std::ptrdiff_t>(length));
  return out;
}

namespace {

std::string where(const Step& s) { return "step " + std::to_string(s.index); }

struct ProcessTrack {
  std::optional<std::size_t> pending_outer;  // index into ops
  std::optional<std::size_t> pending_base;
  std::size_t top_count = 0;
  std::size_t nested_count = 0;
};

}  // namespace

std::vector<Operation> operations(const History& h) {
  std::vector<Operation> ops;
  std::map<ProcessId, ProcessTrack> track;
  for (std::size_t i = 0; i < h.steps.size(); ++i) {
    const Step& s = h.steps[i];
    if (s.index != i) throw HistoryError(where(s) + ": index is not consecutive");
    if (!h.processes.contains(s.process))
      throw HistoryError(where(s) + ": unknown process " + std::to_string(s.process));
    if (!h.objects.contains(s.object))
      throw HistoryError(where(s) + ": unregistered object " + std::to_string(s.object));
    ProcessTrack& t = track[s.process];
    const bool outer = s.level == Level::interpreted;
    if (s.kind == StepKind::invocation) {
      if (t.pending_base) throw HistoryError(where(s) + ": invocation while a base op is pending");
      if (outer && t.pending_outer)
        throw HistoryError(where(s) + ": nested implemented-object invocation");
      Operation op;
      op.inv = i;
      op.process = s.process;
      op.object = s.object;
      op.op = s.op;
      op.args = s.payload;
      op.level = s.level;
      op.nested = !outer && t.pending_outer.has_value();
      op.key = {s.process, op.nested ? t.nested_count++ : t.top_count++};
      (outer ? t.pending_outer : t.pending_base) = ops.size();
      ops.push_back(std::move(op));
      if (is_flip(s) && i + 1 < h.steps.size()) {
        const Step& n = h.steps[i + 1];
        if (n.kind != StepKind::response || n.process != s.process || n.object != s.object || !is_flip(n))
          throw HistoryError(where(s) + ": flip invocation not immediately followed by its response");
      }
    } else {
      std::optional<std::size_t>& slot = outer ? t.pending_outer : t.pending_base;
      if (!slot) throw HistoryError(where(s) + ": response without pending invocation");
      if (outer && t.pending_base)
        throw HistoryError(where(s) + ": method response while an inner base op is pending");
      Operation& op = ops[*slot];
      if (op.object != s.object || op.op != s.op)
        throw HistoryError(where(s) + ": response does not match its invocation");
      op.rsp = i;
      op.ret = s.payload;
      slot.reset();
    }
  }
  return ops;
}

std::vector<Operation> top_level_operations(const History& h) {
  std::vector<Operation> out;
  for (Operation& op : operations(h))
    if (!op.nested) out.push_back(std::move(op));
  return out;
}

void check_well_formed(const History& h) { (void)operations(h); }

History project_process(const History& h, ProcessId p) {
  if (!h.processes.contains(p)) throw HistoryError("unknown process " + std::to_string(p));
  History out;
  out.objects = h.objects;
  out.processes = {p};
  for (const Step& s : h.steps)
    if (s.process == p) out.append(s);
  return out;
}

History project_object(const History& h, ObjectId o) {
  auto it = h.objects.find(o);
  if (it == h.objects.end()) throw HistoryError("unknown object " + std::to_string(o));
  History out;
  out.objects.emplace(o, it->second);
  out.processes = h.processes;
  for (const Step& s : h.steps)
    if (s.object == o) out.append(s);
  return out;
}

History project_method_intervals(const History& h, ObjectId o) {
  auto it = h.objects.find(o);
  if (it == h.objects.end()) throw HistoryError("unknown object " + std::to_string(o));
  if (it->second.level != Level::interpreted)
    throw HistoryError("object " + std::to_string(o) + " is not an implemented object");
  History out;
  out.processes = h.processes;
  out.objects.emplace(o, it->second);
  std::set<ProcessId> inside;
  for (const Step& s : h.steps) {
    const bool boundary = s.object == o && s.level == Level::interpreted;
    if (boundary && s.kind == StepKind::invocation) inside.insert(s.process);
    if (inside.contains(s.process)) {
      out.append(s);
      out.objects.emplace(s.object, h.objects.at(s.object));
    }
    if (boundary && s.kind == StepKind::response) inside.erase(s.process);
  }
  return out;
}

History interpret(const History& h) {
  History out;
  out.processes = h.processes;
  for (const auto& [id, info] : h.objects)
    if (!info.owner) out.objects.emplace(id, info);
  std::set<ProcessId> inside;
  for (const Step& s : h.steps) {
    if (s.level == Level::interpreted) {
      out.append(s);
      if (s.kind == StepKind::invocation)
        inside.insert(s.process);
      else
        inside.erase(s.process);
    } else if (!inside.contains(s.process)) {
      out.append(s);
    }
  }
  return out;
}

History prefix_to_flip(const History& h, std::size_t k) {
  if (k == 0) throw std::invalid_argument("prefix_to_flip: k must be at least 1");
  std::size_t seen = 0;
  for (const Step& s : h.steps) {
    if (s.kind == StepKind::invocation && is_flip(s) && ++seen == k) return h.prefix(s.index + 1);
  }
  return h;
}

bool happens_before(const Operation& a, const Operation& b) { return a.rsp && *a.rsp < b.inv; }

bool is_sequential(const History& h) {
  if (h.steps.size() % 2 != 0) return false;
  for (std::size_t i = 0; i < h.steps.size(); i += 2) {
    const Step& a = h.steps[i];
    const Step& b = h.steps[i + 1];
    if (a.kind != StepKind::invocation || b.kind != StepKind::response) return false;
    if (a.process != b.process || a.object != b.object || a.op != b.op || a.level != b.level) return false;
  }
  return true;
}

}  // namespace slin
