#include "slin/locality.hpp"

#include <set>

namespace slin {

namespace {

using StepSeq = std::vector<std::tuple<StepKind, ProcessId, ObjectId, std::string, Payload, Level>>;

std::set<StepSeq> node_histories(const HistoryTree& t) {
  std::set<StepSeq> out;
  for (const TreeNode& n : t.nodes()) {
    StepSeq seq;
    for (const Step& s : t.history(n.id).steps) seq.emplace_back(s.kind, s.process, s.object, s.op, s.payload, s.level);
    out.insert(std::move(seq));
  }
  return out;
}

}  // namespace

std::string to_string(LocalityVerdict v) {
  switch (v) {
    case LocalityVerdict::holds: return "holds";
    case LocalityVerdict::counterexample: return "counterexample";
    case LocalityVerdict::not_applicable: return "not-applicable";
  }
  return "?";
}

HistoryTree project_tree(const HistoryTree& combined, ObjectId o) {
  HistoryTree out;
  for (std::size_t leaf : combined.leaves()) out.insert(project_object(interpret(combined.history(leaf)), o));
  return out;
}

LocalityResult check_locality(const std::map<ObjectId, HistoryTree>& per_object, const HistoryTree& combined,
                              const SpecRegistry& specs) {
  combined.validate();
  for (const auto& [id, info] : combined.objects())
    if (!is_coin_object(id) && !per_object.contains(id))
      throw HistoryError("check_locality: no tree for object " + std::to_string(id));
  for (const auto& [o, tree] : per_object) {
    if (!combined.objects().contains(o)) throw HistoryError("check_locality: unknown object " + std::to_string(o));
    if (node_histories(tree) != node_histories(project_tree(combined, o)))
      throw HistoryError("check_locality: tree for object " + std::to_string(o) + " is not the projection");
  }
  LocalityResult r;
  bool all = true;
  for (const auto& [o, tree] : per_object) {
    const bool ok = check_strong_lin(tree, specs).witness.has_value();
    r.per_object[o] = ok;
    all = all && ok;
  }
  if (!all) return r;
  r.combined = check_strong_lin(combined, specs).witness;
  r.verdict = r.combined ? LocalityVerdict::holds : LocalityVerdict::counterexample;
  return r;
}

}  // namespace slin
