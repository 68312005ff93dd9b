#include "slin/equivalence.hpp"

#include "slin/adversaries.hpp"
#include "slin/linearize.hpp"

namespace slin {

RunSet collect_runs(const Algorithm& alg, const PolicyFactory& adversary, const std::vector<Value>& omega,
                    std::size_t horizon, const RunOptions& options) {
  if (omega.empty()) throw SimulationError("collect_runs: empty coin domain");
  double count = 1;
  for (std::size_t i = 0; i < horizon; ++i) count *= static_cast<double>(omega.size());
  if (count > 1e6) throw SimulationError("collect_runs: more than 10^6 coin vectors");
  RunSet out;
  std::vector<std::size_t> digits(horizon, 0);
  for (;;) {
    std::vector<Value> coins;
    for (std::size_t d : digits) coins.push_back(omega[d]);
    auto policy = adversary();
    RunRecord rec = run(alg, *policy, CoinVector(coins), options);
    if (rec.status == RunStatus::coins_exhausted)
      throw SimulationError("collect_runs: a run needs more than " + std::to_string(horizon) + " coins");
    out.emplace(std::move(coins), std::move(rec));
    std::size_t k = 0;
    while (k < horizon && ++digits[k] == omega.size()) digits[k++] = 0;
    if (k == horizon) break;
  }
  return out;
}

EquivalenceResult check_equivalence(const RunSet& implemented, const RunSet& atomic, const SpecRegistry& specs) {
  if (implemented.size() != atomic.size()) throw HistoryError("check_equivalence: run sets differ in size");
  for (const auto& [coins, rec] : implemented)
    if (!atomic.contains(coins)) throw HistoryError("check_equivalence: run sets are keyed differently");
  EquivalenceResult r;
  r.equivalent = true;
  for (const auto& [coins, rec] : implemented) {
    auto common = common_linearization({rec.history, atomic.at(coins).history}, specs);
    if (!common) {
      r.equivalent = false;
      r.counterexample = coins;
      return r;
    }
    r.common.emplace(coins, std::move(*common));
  }
  return r;
}

bool same_steps(const History& a, const History& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Step& x = a[i];
    const Step& y = b[i];
    if (x.kind != y.kind || x.process != y.process || x.object != y.object || x.op != y.op || x.payload != y.payload)
      return false;
  }
  return true;
}

namespace {

class ImageReplay final : public AdversaryPolicy {
 public:
  explicit ImageReplay(std::vector<History> images) : images_(std::move(images)) {}
  AdversaryClass kind() const override { return AdversaryClass::strong; }
  std::string name() const override { return "image-replay"; }

  std::optional<ProcessId> decide(const AdversaryView& view) override {
    const History& h = view.history;
    for (const History& image : images_) {
      if (image.size() <= h.size()) continue;
      if (!same_steps(h, image.prefix(h.size()))) continue;
      return image[h.size()].process;
    }
    return std::nullopt;
  }

 private:
  std::vector<History> images_;
};

}  // namespace

std::unique_ptr<AdversaryPolicy> adversary_from_witness(const HistoryTree& tree, const LinearizationWitness& w) {
  std::vector<History> images;
  for (std::size_t leaf : tree.leaves()) images.push_back(w.images.at(leaf));
  return std::make_unique<ImageReplay>(std::move(images));
}

bool schedulable_by_one_adversary(const Algorithm& alg, const GameOptions& options,
                                  const std::map<std::vector<Value>, History>& images, std::size_t* nodes) {
  return exists_adversary(
      alg, options,
      [&](const RunRecord& rec) {
        auto it = images.find(rec.coins);
        return it != images.end() && same_steps(rec.history, it->second);
      },
      nodes);
}

}  // namespace slin
