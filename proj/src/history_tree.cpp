#include "slin/history_tree.hpp"

#include <algorithm>

namespace slin {

namespace {

bool same_step(const Step& a, const Step& b) {
  return a.kind == b.kind && a.process == b.process && a.object == b.object && a.op == b.op &&
         a.payload == b.payload && a.level == b.level;
}

}  // namespace

HistoryTree::HistoryTree() { nodes_.push_back(TreeNode{}); }

HistoryTree::HistoryTree(std::map<ObjectId, ObjectInfo> objects, std::set<ProcessId> processes)
    : objects_(std::move(objects)), processes_(std::move(processes)) {
  nodes_.push_back(TreeNode{});
}

HistoryTree HistoryTree::from_runs(const std::vector<RunRecord>& runs) {
  std::vector<History> hs;
  hs.reserve(runs.size());
  for (const RunRecord& r : runs) hs.push_back(interpret(r.history));
  return from_histories(hs);
}

HistoryTree HistoryTree::from_histories(const std::vector<History>& histories) {
  HistoryTree t;
  for (const History& h : histories) t.insert(h);
  return t;
}

void HistoryTree::register_objects(const std::map<ObjectId, ObjectInfo>& objects) {
  for (const auto& [id, info] : objects) {
    auto [it, fresh] = objects_.emplace(id, info);
    if (!fresh && it->second != info) throw HistoryError("object " + std::to_string(id) + " registered twice");
  }
}

void HistoryTree::register_processes(const std::set<ProcessId>& processes) {
  processes_.insert(processes.begin(), processes.end());
}

std::size_t HistoryTree::add_child(std::size_t parent, Step step) {
  if (parent >= nodes_.size()) throw HistoryError("no tree node " + std::to_string(parent));
  for (std::size_t c : nodes_[parent].children)
    if (same_step(*nodes_[c].appended, step)) return c;
  step.index = depth(parent);
  TreeNode n;
  n.id = nodes_.size();
  n.parent = parent;
  if (step.kind == StepKind::response && is_flip(step) && !step.payload.empty()) n.coin_outcome = step.payload[0];
  n.appended = std::move(step);
  nodes_[parent].children.push_back(n.id);
  nodes_.push_back(std::move(n));
  return nodes_.back().id;
}

std::size_t HistoryTree::insert(const History& h) {
  register_objects(h.objects);
  register_processes(h.processes);
  std::size_t at = 0;
  for (const Step& s : h.steps) at = add_child(at, s);
  return at;
}

std::size_t HistoryTree::depth(std::size_t id) const {
  std::size_t d = 0;
  for (auto p = nodes_.at(id).parent; p; p = nodes_.at(*p).parent) ++d;
  return d;
}

History HistoryTree::history(std::size_t id) const {
  std::vector<const Step*> path;
  for (std::optional<std::size_t> n = id; n && nodes_.at(*n).appended; n = nodes_.at(*n).parent)
    path.push_back(&*nodes_.at(*n).appended);
  History h;
  h.objects = objects_;
  h.processes = processes_;
  for (auto it = path.rbegin(); it != path.rend(); ++it) h.append(**it);
  return h;
}

std::vector<std::size_t> HistoryTree::leaves() const {
  std::vector<std::size_t> out;
  for (const TreeNode& n : nodes_)
    if (n.children.empty()) out.push_back(n.id);
  return out;
}

std::vector<std::size_t> HistoryTree::preorder() const {
  std::vector<std::size_t> out;
  std::vector<std::size_t> stack{0};
  while (!stack.empty()) {
    const std::size_t n = stack.back();
    stack.pop_back();
    out.push_back(n);
    const auto& ch = nodes_[n].children;
    for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.push_back(*it);
  }
  return out;
}

void HistoryTree::validate() const {
  if (nodes_.empty() || nodes_[0].parent || nodes_[0].appended) throw HistoryError("tree: node 0 must be the root");
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const TreeNode& n = nodes_[i];
    if (n.id != i) throw HistoryError("tree: node ids must be consecutive");
    if (i == 0) continue;
    if (!n.parent || *n.parent >= i) throw HistoryError("tree: node " + std::to_string(i) + " has no earlier parent");
    if (!n.appended) throw HistoryError("tree: node " + std::to_string(i) + " has no step");
    const auto& siblings = nodes_[*n.parent].children;
    if (std::find(siblings.begin(), siblings.end(), i) == siblings.end())
      throw HistoryError("tree: node " + std::to_string(i) + " is missing from its parent's children");
    for (std::size_t s : siblings)
      if (s != i && same_step(*nodes_[s].appended, *n.appended))
        throw HistoryError("tree: nodes " + std::to_string(s) + " and " + std::to_string(i) + " repeat a step");
    if (n.appended->index != depth(*n.parent))
      throw HistoryError("tree: step index of node " + std::to_string(i) + " does not match its depth");
    for (std::size_t c : n.children)
      if (c >= nodes_.size() || nodes_[c].parent != i) throw HistoryError("tree: broken child link");
  }
  for (std::size_t leaf : leaves()) check_well_formed(history(leaf));
}

bool HistoryTree::branches_only_at_flips() const {
  for (const TreeNode& n : nodes_) {
    if (n.children.size() < 2) continue;
    if (!n.appended || n.appended->kind != StepKind::invocation || !is_flip(*n.appended)) return false;
    for (std::size_t c : n.children) {
      const Step& s = *nodes_[c].appended;
      if (s.kind != StepKind::response || !is_flip(s) || s.process != n.appended->process) return false;
    }
  }
  return true;
}

}  // namespace slin
