#include "slin/strong_lin.hpp"

#include <algorithm>
#include <functional>
#include <memory>

#include "slin/linearize.hpp"

namespace slin {

namespace {

using Keys = std::vector<OpKey>;

Keys image_keys(const History& image) {
  Keys out;
  for (const Operation& op : operations(image)) out.push_back(op.key);
  return out;
}

class StrongSearch {
 public:
  StrongSearch(const HistoryTree& tree, const SpecRegistry& specs, const StrongLinOptions& options)
      : tree_(tree), specs_(specs), options_(options), problems_(tree.size()) {
    for (const auto& [node, image] : options.pinned) {
      if (node >= tree.size()) throw HistoryError("pinned image for unknown node " + std::to_string(node));
      pinned_[node] = image_keys(image);
    }
  }

  std::optional<Keys> solve(std::size_t node, const Keys& parent) {
    auto memo_key = std::make_pair(node, parent);
    if (auto it = memo_.find(memo_key); it != memo_.end()) return it->second;
    ++explored_;
    const LinProblem& prob = problem(node);
    std::optional<Keys> found;
    if (auto start = prob.replay(parent)) {
      for (const Keys& cand : candidates(node, prob, *start)) {
        bool all = true;
        for (std::size_t c : tree_.node(node).children)
          if (!solve(c, cand)) {
            all = false;
            break;
          }
        if (all) {
          found = cand;
          break;
        }
      }
    }
    memo_.emplace(std::move(memo_key), found);
    return found;
  }

  History image(std::size_t node, const Keys& keys) {
    const LinProblem& prob = problem(node);
    return prob.to_history(*prob.replay(keys));
  }

  std::size_t explored() const { return explored_; }

 private:
  const LinProblem& problem(std::size_t node) {
    auto& slot = problems_[node];
    if (!slot) {
      History h = interpret(tree_.history(node));
      std::size_t pending = 0;
      for (const Operation& op : top_level_operations(h))
        if (!op.complete()) ++pending;
      if (pending > options_.max_pending)
        throw HistoryError("tree node " + std::to_string(node) + " has " + std::to_string(pending) +
                           " pending operations; the limit is " + std::to_string(options_.max_pending));
      slot = std::make_unique<LinProblem>(std::vector<History>{h}, specs_);
    }
    return *slot;
  }

  std::vector<Keys> candidates(std::size_t node, const LinProblem& prob, const LinProblem::Cursor& start) {
    auto keys_of = [&](const LinProblem::Cursor& c) {
      Keys k;
      for (std::size_t i : c.order) k.push_back(prob.ops()[i].key);
      return k;
    };
    std::vector<Keys> out;
    if (auto pin = pinned_.find(node); pin != pinned_.end()) {
      const Keys& want = pin->second;
      const Keys have = keys_of(start);
      if (want.size() >= have.size() && std::equal(have.begin(), have.end(), want.begin())) {
        auto c = prob.replay(want);
        if (c && prob.done(*c)) out.push_back(want);
      }
      return out;
    }
    prob.enumerate(start, [&](const LinProblem::Cursor& c) {
      out.push_back(keys_of(c));
      return true;
    });
    std::stable_sort(out.begin(), out.end(), [](const Keys& a, const Keys& b) {
      if (a.size() != b.size()) return a.size() < b.size();
      return a < b;
    });
    return out;
  }

  const HistoryTree& tree_;
  const SpecRegistry& specs_;
  const StrongLinOptions& options_;
  std::vector<std::unique_ptr<LinProblem>> problems_;
  std::map<std::size_t, Keys> pinned_;
  std::map<std::pair<std::size_t, Keys>, std::optional<Keys>> memo_;
  std::size_t explored_ = 0;
};

bool same_step(const Step& a, const Step& b) {
  return a.kind == b.kind && a.process == b.process && a.object == b.object && a.op == b.op &&
         a.payload == b.payload && a.level == b.level;
}

WitnessCheck fail(std::string reason) { return WitnessCheck{false, std::move(reason)}; }

}  // namespace

StrongLinResult check_strong_lin(const HistoryTree& tree, const SpecRegistry& specs, const StrongLinOptions& options) {
  tree.validate();
  if (tree.size() > options.max_nodes)
    throw HistoryError("tree has " + std::to_string(tree.size()) + " nodes; the limit is " +
                       std::to_string(options.max_nodes));
  StrongSearch search(tree, specs, options);
  StrongLinResult result;
  auto root = search.solve(0, {});
  if (root) {
    LinearizationWitness w;
    std::vector<std::pair<std::size_t, Keys>> stack{{0, *root}};
    while (!stack.empty()) {
      auto [node, keys] = std::move(stack.back());
      stack.pop_back();
      w.images[node] = search.image(node, keys);
      for (std::size_t c : tree.node(node).children) stack.emplace_back(c, *search.solve(c, keys));
    }
    result.witness = std::move(w);
  }
  result.explored = search.explored();
  return result;
}

StrongLinResult check_strong_lin(const HistoryTree& tree) {
  return check_strong_lin(tree, SpecRegistry::from_history(tree.history(0)));
}

bool is_linearization(const History& image, const History& h, const SpecRegistry& specs, std::string* why) {
  auto no = [&](const std::string& reason) {
    if (why) *why = reason;
    return false;
  };
  if (!is_sequential(image)) return no("image is not sequential");
  try {
    if (!validate_sequential(image, specs)) return no("image violates a sequential specification");
  } catch (const std::exception& e) {
    return no(std::string("image cannot be replayed: ") + e.what());
  }
  const History g = interpret(h);
  std::map<OpKey, Operation> hist;
  for (Operation& op : top_level_operations(g)) hist.emplace(op.key, std::move(op));
  std::map<OpKey, std::size_t> position;
  for (const Operation& op : operations(image)) {
    auto it = hist.find(op.key);
    const std::string name = "p" + std::to_string(op.key.process) + "#" + std::to_string(op.key.ordinal);
    if (it == hist.end()) return no("image op " + name + " is not in the history");
    const Operation& ho = it->second;
    if (ho.object != op.object || ho.op != op.op || ho.args != op.args)
      return no("image op " + name + " differs from the history's");
    if (ho.ret && ho.ret != op.ret) return no("image op " + name + " has a different response");
    position[op.key] = position.size();
  }
  for (const auto& [key, op] : hist)
    if (op.complete() && !position.contains(key))
      return no("complete op p" + std::to_string(key.process) + "#" + std::to_string(key.ordinal) + " is missing");
  for (const auto& [ka, a] : hist)
    for (const auto& [kb, b] : hist)
      if (happens_before(a, b) && position.contains(ka) && position.contains(kb) && position[ka] > position[kb])
        return no("image reverses happens-before");
  return true;
}

bool is_history_prefix(const History& a, const History& b) {
  if (a.size() > b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!same_step(a[i], b[i])) return false;
  return true;
}

WitnessCheck validate_witness(const HistoryTree& tree, const LinearizationWitness& w, const SpecRegistry& specs) {
  for (const TreeNode& n : tree.nodes()) {
    auto it = w.images.find(n.id);
    if (it == w.images.end()) return fail("node " + std::to_string(n.id) + " has no image");
    std::string why;
    if (!is_linearization(it->second, tree.history(n.id), specs, &why))
      return fail("(L) fails at node " + std::to_string(n.id) + ": " + why);
    if (n.parent && !is_history_prefix(w.images.at(*n.parent), it->second))
      return fail("(P) fails on edge " + std::to_string(*n.parent) + " -> " + std::to_string(n.id));
  }
  return WitnessCheck{true, {}};
}

WitnessCheck check_normal_form(const HistoryTree& tree, const LinearizationWitness& w) {
  for (const TreeNode& n : tree.nodes()) {
    auto it = w.images.find(n.id);
    if (it == w.images.end()) return fail("node " + std::to_string(n.id) + " has no image");
    std::map<OpKey, Operation> hist;
    for (Operation& op : top_level_operations(interpret(tree.history(n.id)))) hist.emplace(op.key, std::move(op));
    const auto ops = operations(it->second);
    for (std::size_t i = 1; i < ops.size(); ++i) {
      if (ops[i].op != "flip") continue;
      auto a = hist.find(ops[i - 1].key), b = hist.find(ops[i].key);
      if (a == hist.end() || b == hist.end() || !happens_before(a->second, b->second))
        return fail("(N) fails at node " + std::to_string(n.id) + ", image position " + std::to_string(i));
    }
  }
  return WitnessCheck{true, {}};
}

LinearizationWitness normalize_witness(const HistoryTree& tree, const LinearizationWitness& w,
                                       const SpecRegistry& specs) {
  if (auto check = validate_witness(tree, w, specs); !check.ok)
    throw HistoryError("normalize_witness: input is not a strong linearization: " + check.reason);
  LinearizationWitness out;
  for (const TreeNode& n : tree.nodes()) {
    const History& image = w.images.at(n.id);
    const History g = interpret(tree.history(n.id));
    std::map<OpKey, Operation> hist;
    for (Operation& op : top_level_operations(g)) hist.emplace(op.key, std::move(op));

    struct Entry {
      OpKey key;
      Step inv, rsp;
    };
    std::vector<Entry> seq;
    for (const Operation& op : operations(image)) seq.push_back({op.key, image[op.inv], image[*op.rsp]});
    while (!seq.empty() && !hist.at(seq.back().key).complete()) seq.pop_back();
    std::erase_if(seq, [](const Entry& e) { return is_flip(e.inv); });

    std::vector<const Operation*> flips;
    for (const auto& [key, op] : hist)
      if (op.op == "flip" && op.complete()) flips.push_back(&op);
    std::sort(flips.begin(), flips.end(), [](const Operation* a, const Operation* b) { return a->inv < b->inv; });
    for (const Operation* cf : flips) {
      std::size_t at = 0;
      for (std::size_t i = 0; i < seq.size(); ++i)
        if (happens_before(hist.at(seq[i].key), *cf)) at = i + 1;
      Step inv{0, StepKind::invocation, cf->process, cf->object, cf->op, cf->args, cf->level};
      Step rsp{0, StepKind::response, cf->process, cf->object, cf->op, *cf->ret, cf->level};
      seq.insert(seq.begin() + static_cast<std::ptrdiff_t>(at), Entry{cf->key, inv, rsp});
    }
    History h;
    h.objects = image.objects;
    h.processes = image.processes;
    for (const Entry& e : seq) {
      h.append(e.inv);
      h.append(e.rsp);
    }
    out.images[n.id] = std::move(h);
  }
  return out;
}

}  // namespace slin
