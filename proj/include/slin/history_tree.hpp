#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "slin/engine.hpp"
#include "slin/history.hpp"

namespace slin {

struct TreeNode {
  std::size_t id = 0;
  std::optional<std::size_t> parent;
  /// Empty only at the root.
  std::optional<Step> appended;
  /// Set when the appended step is a flip response.
  std::optional<Value> coin_outcome;
  std::vector<std::size_t> children;
};

/// A finite prefix-closed set of histories stored as a trie: node i is the
/// history spelled by the steps on the path from the root.
class HistoryTree {
 public:
  HistoryTree();
  HistoryTree(std::map<ObjectId, ObjectInfo> objects, std::set<ProcessId> processes);

  /// Interprets every run history and merges the results.
  static HistoryTree from_runs(const std::vector<RunRecord>& runs);
  /// Merges the histories as given.
  static HistoryTree from_histories(const std::vector<History>& histories);

  /// The child of `parent` spelled by `step`, created if needed. The step's
  /// index is set to the depth of the parent.
  std::size_t add_child(std::size_t parent, Step step);
  std::size_t insert(const History& h);

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  const TreeNode& node(std::size_t id) const { return nodes_.at(id); }
  std::size_t size() const { return nodes_.size(); }
  std::size_t depth(std::size_t id) const;
  History history(std::size_t id) const;
  std::vector<std::size_t> leaves() const;
  /// Nodes in an order where every parent precedes its children.
  std::vector<std::size_t> preorder() const;

  const std::map<ObjectId, ObjectInfo>& objects() const { return objects_; }
  const std::set<ProcessId>& processes() const { return processes_; }
  void register_objects(const std::map<ObjectId, ObjectInfo>& objects);
  void register_processes(const std::set<ProcessId>& processes);

  /// Throws HistoryError unless ids are consecutive with node 0 the only
  /// root, parents precede children, siblings differ, step indices match
  /// depths and every node's history is well formed.
  void validate() const;

  /// True iff every node with more than one child ends with a flip
  /// invocation and its children differ only in the flip response.
  bool branches_only_at_flips() const;

 private:
  std::map<ObjectId, ObjectInfo> objects_;
  std::set<ProcessId> processes_;
  std::vector<TreeNode> nodes_;
};

}  // namespace slin
