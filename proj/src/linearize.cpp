#include "slin/linearize.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace slin {

LinProblem::LinProblem(const std::vector<History>& histories, const SpecRegistry& specs) {
  if (histories.empty()) throw HistoryError("linearization problem needs at least one history");
  std::map<OpKey, std::size_t> index;
  std::vector<std::vector<Operation>> per_history;
  for (const History& raw : histories) {
    History h = interpret(raw);
    for (const auto& [id, info] : h.objects) shape_.objects.emplace(id, info);
    shape_.processes.insert(h.processes.begin(), h.processes.end());
    per_history.push_back(top_level_operations(h));
  }
  for (std::size_t hi = 0; hi < per_history.size(); ++hi) {
    for (const Operation& o : per_history[hi]) {
      auto [it, fresh] = index.try_emplace(o.key, ops_.size());
      if (fresh) {
        LinOp op;
        op.key = o.key;
        op.object = o.object;
        op.op = o.op;
        op.args = o.args;
        op.level = o.level;
        ops_.push_back(std::move(op));
      }
      LinOp& op = ops_[it->second];
      if (op.object != o.object || op.op != o.op || op.args != o.args) op.excluded = true;
      if (o.ret) {
        if (op.ret && *op.ret != *o.ret) op.excluded = true;
        op.ret = o.ret;
        op.required = true;
      }
    }
  }
  if (ops_.size() > kMaxLinOps)
    throw HistoryError("linearization search supports at most " + std::to_string(kMaxLinOps) + " operations");
  for (const auto& hops : per_history) {
    std::set<OpKey> present;
    for (const Operation& o : hops) present.insert(o.key);
    for (LinOp& op : ops_)
      if (!present.contains(op.key)) op.excluded = true;
    for (const Operation& a : hops)
      for (const Operation& b : hops)
        if (happens_before(a, b)) ops_[index.at(b.key)].preds.push_back(index.at(a.key));
  }
  for (std::size_t i = 0; i < ops_.size(); ++i) {
    LinOp& op = ops_[i];
    std::sort(op.preds.begin(), op.preds.end());
    op.preds.erase(std::unique(op.preds.begin(), op.preds.end()), op.preds.end());
    auto slot = std::find(objects_.begin(), objects_.end(), op.object);
    if (slot == objects_.end()) {
      objects_.push_back(op.object);
      specs_.push_back(specs.at(op.object));
      slot = objects_.end() - 1;
    }
    object_slot_.push_back(static_cast<std::size_t>(slot - objects_.begin()));
    if (specs_[object_slot_[i]].nondeterministic && !op.ret) op.excluded = true;
    if (op.required) {
      required_mask_ |= std::uint64_t{1} << i;
      if (op.excluded) feasible_ = false;
    }
    order_.push_back(i);
  }
  std::stable_sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) {
    if (ops_[a].required != ops_[b].required) return ops_[a].required;
    return ops_[a].key < ops_[b].key;
  });
}

std::optional<std::size_t> LinProblem::find(const OpKey& key) const {
  for (std::size_t i = 0; i < ops_.size(); ++i)
    if (ops_[i].key == key) return i;
  return std::nullopt;
}

const SeqSpec& LinProblem::spec_of(std::size_t op) const { return specs_[object_slot_[op]]; }

LinProblem::Cursor LinProblem::start() const {
  Cursor c;
  for (const SeqSpec& s : specs_) c.states.push_back(s.initial);
  return c;
}

std::optional<Transition> LinProblem::try_commit(const Cursor& c, std::size_t i) const {
  const LinOp& op = ops_[i];
  if (op.excluded || (c.mask >> i) & 1) return std::nullopt;
  for (std::size_t p : op.preds)
    if (!((c.mask >> p) & 1)) return std::nullopt;
  const SeqSpec& spec = spec_of(i);
  const State& state = c.states[object_slot_[i]];
  if (spec.nondeterministic) return Transition{state, *op.ret};
  try {
    Transition t = spec.apply(state, op.key.process, op.op, op.args);
    if (op.ret && t.response != *op.ret) return std::nullopt;
    return t;
  } catch (const SpecError&) {
    return std::nullopt;
  }
}

void LinProblem::commit(Cursor& c, std::size_t i, Transition t) const {
  c.mask |= std::uint64_t{1} << i;
  c.states[object_slot_[i]] = std::move(t.state);
  c.order.push_back(i);
  c.responses.push_back(std::move(t.response));
}

std::optional<LinProblem::Cursor> LinProblem::replay(const std::vector<OpKey>& keys) const {
  Cursor c = start();
  for (const OpKey& k : keys) {
    auto i = find(k);
    if (!i) return std::nullopt;
    auto t = try_commit(c, *i);
    if (!t) return std::nullopt;
    commit(c, *i, std::move(*t));
  }
  return c;
}

std::optional<LinProblem::Cursor> LinProblem::search() const {
  if (!feasible_) return std::nullopt;
  std::set<std::pair<std::uint64_t, std::vector<State>>> failed;
  std::function<bool(Cursor&)> dfs = [&](Cursor& c) -> bool {
    if (done(c)) return true;
    if (failed.contains({c.mask, c.states})) return false;
    for (std::size_t i : order_) {
      auto t = try_commit(c, i);
      if (!t) continue;
      Cursor next = c;
      commit(next, i, std::move(*t));
      if (dfs(next)) {
        c = std::move(next);
        return true;
      }
    }
    failed.insert({c.mask, c.states});
    return false;
  };
  Cursor c = start();
  if (dfs(c)) return c;
  return std::nullopt;
}

void LinProblem::enumerate(const Cursor& from, const std::function<bool(const Cursor&)>& visit) const {
  if (!feasible_) return;
  bool stop = false;
  std::function<void(const Cursor&)> dfs = [&](const Cursor& c) {
    if (done(c) && !visit(c)) {
      stop = true;
      return;
    }
    for (std::size_t i : order_) {
      if (stop) return;
      auto t = try_commit(c, i);
      if (!t) continue;
      Cursor next = c;
      commit(next, i, std::move(*t));
      dfs(next);
    }
  };
  dfs(from);
}

History LinProblem::to_history(const Cursor& c) const {
  History out;
  out.objects = shape_.objects;
  out.processes = shape_.processes;
  for (std::size_t k = 0; k < c.order.size(); ++k) {
    const LinOp& op = ops_[c.order[k]];
    out.append(Step{0, StepKind::invocation, op.key.process, op.object, op.op, op.args, op.level});
    out.append(Step{0, StepKind::response, op.key.process, op.object, op.op, c.responses[k], op.level});
  }
  return out;
}

std::optional<History> linearize_one(const History& h, const SpecRegistry& specs) {
  return common_linearization({h}, specs);
}

std::optional<History> linearize_one(const History& h) { return linearize_one(h, SpecRegistry::from_history(h)); }

std::optional<History> common_linearization(const std::vector<History>& hs, const SpecRegistry& specs) {
  LinProblem problem(hs, specs);
  auto c = problem.search();
  if (!c) return std::nullopt;
  return problem.to_history(*c);
}

}  // namespace slin
