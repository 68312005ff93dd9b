#include "slin/marks.hpp"

namespace slin {

void MarkState::consume(const Step& s) {
  if (s.level != Level::base || is_coin_object(s.object)) return;
  if (s.kind == StepKind::invocation) {
    pending_[s.process] = s;
    return;
  }
  auto it = pending_.find(s.process);
  if (it == pending_.end()) return;
  const Step inv = std::move(it->second);
  pending_.erase(it);
  const ProcessId q = s.process;
  const ObjectId r = s.object;
  const std::optional<ProcessId> owner = mark(r);
  const bool foreign = owner && *owner != q;
  if (s.op == "read" || s.op == "LL") {
    if (foreign) sees_.insert({q, *owner});
    if (s.op == "LL") linked_.insert({q, r});
  } else if (s.op == "SC") {
    if (foreign && linked_.contains({q, r})) sees_.insert({q, *owner});
    if (!s.payload.empty() && s.payload[0] == 1) marks_[r] = q;
  } else if (s.op == "write") {
    marks_[r] = q;
  }
}

std::optional<ProcessId> MarkState::mark(ObjectId register_id) const {
  auto it = marks_.find(register_id);
  if (it == marks_.end()) return std::nullopt;
  return it->second;
}

bool MarkState::visible(ProcessId p) const {
  for (const auto& [r, owner] : marks_)
    if (owner == p) return true;
  return false;
}

MarkState replay_marks(const History& h) {
  MarkState m;
  for (const Step& s : h.steps) m.consume(s);
  return m;
}

}  // namespace slin
