#include "slin/loadbalance.hpp"

#include <cmath>
#include <mutex>
#include <random>
#include <thread>

namespace slin {

std::string to_string(CounterKind k) {
  switch (k) {
    case CounterKind::atomic: return "atomic";
    case CounterKind::llsc: return "llsc";
    case CounterKind::writefirst: return "writefirst";
  }
  return "?";
}

CounterKind counter_kind_from_string(const std::string& s) {
  if (s == "atomic") return CounterKind::atomic;
  if (s == "llsc") return CounterKind::llsc;
  if (s == "writefirst") return CounterKind::writefirst;
  throw SimulationError("unknown counter kind '" + s + "'");
}

int loadbalance_width(int n) {
  if (n < 1) throw SimulationError("loadbalance needs at least one process");
  const auto m = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n))));
  if (m * m != n) throw SimulationError("loadbalance needs a perfect square process count, got " + std::to_string(n));
  return m;
}

std::size_t loadbalance_k_max(int n, double delta) {
  const double m = std::sqrt(static_cast<double>(n));
  // Guard against 1.5 * 8 = 12.000000000000002 style rounding.
  return static_cast<std::size_t>(std::ceil((1.0 + delta) * m - 1e-9));
}

namespace {

Routine loadbalance_program(ProcessId) {
  Payload i = co_await flip();
  const auto counter = static_cast<int>(i.at(0));
  Payload x = co_await invoke(counter, "fetch&inc");
  co_await invoke(counter, "fetch&dec");
  co_return x;
}

}  // namespace

Algorithm loadbalance_algorithm(int n, CounterKind counters) {
  const int m = loadbalance_width(n);
  Algorithm a;
  a.name = "loadbalance/" + to_string(counters);
  a.processes = n;
  for (int i = 0; i < m; ++i) {
    const std::string name = "F" + std::to_string(i);
    switch (counters) {
      case CounterKind::atomic: a.objects.push_back(atomic_object(name, specs::counter())); break;
      case CounterKind::llsc: a.objects.push_back(implemented_object(name, impl::llsc_counter())); break;
      case CounterKind::writefirst: a.objects.push_back(implemented_object(name, impl::writefirst_counter(n))); break;
    }
  }
  a.program = loadbalance_program;
  return a;
}

// ---- tracker ----------------------------------------------------------------

std::optional<int> LoadBalanceTracker::counter_of(const History& h, ObjectId o) const {
  if (o >= 0 && o < counters_) return static_cast<int>(o);
  auto it = h.objects.find(o);
  if (it != h.objects.end() && it->second.owner) return static_cast<int>(*it->second.owner);
  return std::nullopt;
}

void LoadBalanceTracker::consume(const History& h) {
  for (; cursor_ < h.steps.size(); ++cursor_) {
    const Step& s = h.steps[cursor_];
    marks_.consume(s);
    if (is_coin_object(s.object)) continue;
    Proc& p = procs_[s.process];
    if (s.level == Level::base && s.kind == StepKind::invocation) {
      ++p.accesses;
      if (!p.first_op) {
        p.first_op = s.op;
        p.first_object = s.object;
        p.counter = counter_of(h, s.object);
      }
    }
    const bool top = s.object >= 0 && s.object < counters_;
    if (!top) continue;
    if (s.op == "fetch&inc" && s.kind == StepKind::response) {
      p.fai_done = true;
      p.fai_value = s.payload.at(0);
    }
    if (s.op == "fetch&dec" && s.kind == StepKind::invocation) p.fad_started = true;
  }
}

const LoadBalanceTracker::Proc& LoadBalanceTracker::proc(ProcessId p) const {
  static const Proc kEmpty;
  auto it = procs_.find(p);
  return it == procs_.end() ? kEmpty : it->second;
}

// ---- A_p ----------------------------------------------------------------------

ApPolicy::ApPolicy(ProcessId target, int n) : target_(target), n_(n), tracker_(loadbalance_width(n)) {
  if (target < 0 || target >= n) throw SimulationError("A_p: no process " + std::to_string(target));
}

std::optional<ProcessId> ApPolicy::round_robin(const std::vector<ProcessId>& members) {
  for (std::size_t k = 0; k < members.size(); ++k) {
    const std::size_t idx = (rr_pos_ + k) % members.size();
    if (!tracker_.proc(members[idx]).fai_done) {
      rr_pos_ = idx + 1;
      return members[idx];
    }
  }
  return std::nullopt;
}

void ApPolicy::reach_c(const AdversaryView& view) {
  diag_.reached_c = true;
  std::map<ObjectId, std::size_t> writers;
  for (ProcessId q = 0; q < n_; ++q) {
    const auto& pr = tracker_.proc(q);
    if (pr.counter == diag_.counter) {
      diag_.group.insert(q);
      if (pr.first_op == "write") ++writers[*pr.first_object];
    }
  }
  for (ProcessId q : diag_.group) {
    const auto& pr = tracker_.proc(q);
    if (pr.first_op != "write")
      diag_.q_set.insert(q);
    else if (writers[*pr.first_object] == 1)
      diag_.v_set.insert(q);
    else
      diag_.w_set.insert(q);
  }
  const MarkState& marks = tracker_.marks();
  diag_.target_visible = marks.visible(target_);
  for (ProcessId q = 0; q < n_; ++q)
    if (q != target_ && marks.sees(q, target_)) diag_.saw_target.insert(q);
  bool post = true;
  for (ProcessId q = 0; q < n_; ++q) {
    if (diag_.group.contains(q))
      post = post && tracker_.proc(q).accesses == 1;
    else
      post = post && view.status[static_cast<std::size_t>(q)].halted;
  }
  diag_.postcondition = post;
  for (const ProcessStatus& s : view.status)
    if (s.started && !s.halted) ++diag_.contention_at_c;

  rr_.clear();
  rr_pos_ = 0;
  if (diag_.target_visible) {
    for (ProcessId q : diag_.group)
      if (tracker_.proc(q).first_op == "write") rr_.push_back(q);
    phase_ = Phase::case1;
  } else {
    for (ProcessId q : diag_.group)
      if (q != target_ && !diag_.saw_target.contains(q)) rr_.push_back(q);
    phase_ = Phase::case2_others;
  }
}

std::optional<ProcessId> ApPolicy::decide(const AdversaryView& view) {
  tracker_.consume(view.history);
  auto halted = [&](ProcessId q) { return view.status[static_cast<std::size_t>(q)].halted; };
  if (phase_ == Phase::target_first) {
    const auto& pr = tracker_.proc(target_);
    if (!pr.first_op) {
      if (halted(target_)) throw SimulationError("A_p: target halted without a shared-memory access");
      return target_;
    }
    diag_.counter = *pr.counter;
    phase_ = Phase::others;
  }
  if (phase_ == Phase::others) {
    for (; scan_ < n_; ++scan_) {
      const ProcessId q = scan_;
      if (q == target_) continue;
      const auto& pr = tracker_.proc(q);
      if (!pr.first_op) {
        if (halted(q)) throw SimulationError("A_p: process halted without a shared-memory access");
        return q;
      }
      if (pr.counter != diag_.counter && !halted(q)) return q;
    }
    reach_c(view);
  }
  if (phase_ == Phase::case1) {
    if (auto q = round_robin(rr_)) return q;
    phase_ = Phase::done;
  }
  if (phase_ == Phase::case2_others) {
    if (auto q = round_robin(rr_)) return q;
    phase_ = Phase::case2_target;
  }
  if (phase_ == Phase::case2_target) {
    if (!tracker_.proc(target_).fai_done) return target_;
    phase_ = Phase::done;
  }
  return std::nullopt;
}

HelperCheck check_lb_helper(const ApPolicy& policy, const RunRecord& rec, int n) {
  HelperCheck out;
  const auto& d = policy.diagnostics();
  if (!d.reached_c || d.target_visible) return out;
  const ProcessId target = policy.target();
  const int m = loadbalance_width(n);
  LoadBalanceTracker t(m);
  t.consume(rec.history);
  // The claim concerns counters built from registers; an atomic counter's
  // first access is the fetch&inc itself.
  const auto& first = t.proc(target).first_object;
  if (!first || (*first >= 0 && *first < m)) return out;
  out.applicable = true;
  std::set<ProcessId> p_set;
  for (ProcessId q : d.group)
    if (q != target && !d.saw_target.contains(q)) p_set.insert(q);
  out.p_size = p_set.size();
  bool a = t.proc(target).fai_done;
  for (ProcessId q : p_set) a = a && t.proc(q).fai_done;
  bool b = true;
  for (ProcessId q = 0; q < n; ++q)
    if (t.proc(q).counter == d.counter && t.proc(q).fad_started) b = false;
  bool c = true;
  for (const auto& [q, seen] : t.marks().sees_relation())
    if (p_set.contains(q) && !p_set.contains(seen)) c = false;
  out.premises = a && b && c;
  out.conclusion = out.premises && t.proc(target).fai_value && *t.proc(target).fai_value >= static_cast<Value>(p_set.size());
  return out;
}

// ---- scripted families -----------------------------------------------------------

namespace {

class CappedLoader final : public AdversaryPolicy {
 public:
  CappedLoader(ProcessId target, int n, std::size_t k_max)
      : target_(target), n_(n), k_max_(k_max), tracker_(loadbalance_width(n)) {}
  AdversaryClass kind() const override { return AdversaryClass::weak; }
  std::string name() const override { return "capped-loader"; }

  std::optional<ProcessId> decide(const AdversaryView& view) override {
    tracker_.consume(view.history);
    while (next_ < n_ && held_ + 1 < k_max_) {
      if (next_ == target_) {
        ++next_;
        continue;
      }
      if (!tracker_.proc(next_).fai_done) return next_;
      ++held_;
      ++next_;
    }
    if (!tracker_.proc(target_).fai_done) return target_;
    return std::nullopt;
  }

 private:
  ProcessId target_;
  int n_;
  std::size_t k_max_;
  LoadBalanceTracker tracker_;
  ProcessId next_ = 0;
  std::size_t held_ = 0;
};

}  // namespace

std::unique_ptr<AdversaryPolicy> capped_loader(ProcessId target, int n, std::size_t k_max) {
  return std::make_unique<CappedLoader>(target, n, k_max);
}

std::optional<Value> fai_result(const RunRecord& rec, ProcessId p, int n) {
  const int m = loadbalance_width(n);
  for (const Step& s : rec.history.steps)
    if (s.process == p && s.kind == StepKind::response && s.op == "fetch&inc" && s.object >= 0 && s.object < m)
      return s.payload.at(0);
  return std::nullopt;
}

// ---- estimation -------------------------------------------------------------------

PhiEstimate estimate_phi(const Algorithm& alg, const AdversaryFamily& family, const PhiConfig& cfg,
                         const TrialObserver& observe) {
  if (cfg.trials == 0) throw SimulationError("estimate_phi: trials must be at least 1");
  const int m = loadbalance_width(cfg.n);
  if (alg.processes != cfg.n) throw SimulationError("estimate_phi: algorithm and configuration disagree on n");

  std::vector<double> xs(cfg.trials, 0.0);
  std::vector<std::size_t> contention(cfg.trials, 0);
  std::vector<char> flagged(cfg.trials, 0), over(cfg.trials, 0);
  std::mutex observe_mutex;
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto work = [&](std::size_t first, std::size_t stride) {
    try {
      for (std::size_t t = first; t < cfg.trials; t += stride) {
        const std::uint64_t trial_seed = cfg.seed + t;
        std::mt19937_64 rng(trial_seed);
        std::uniform_int_distribution<Value> pick_counter(0, m - 1);
        std::vector<std::vector<Value>> coins(static_cast<std::size_t>(cfg.n));
        for (auto& row : coins) row.push_back(pick_counter(rng));
        std::uniform_int_distribution<ProcessId> pick_target(0, cfg.n - 1);
        const ProcessId target = pick_target(rng);

        std::unique_ptr<AdversaryPolicy> policy = family(target, trial_seed);
        const RunRecord rec = run(alg, *policy, PerProcessCoins(std::move(coins)), RunOptions{cfg.budget});
        const std::optional<Value> fai = fai_result(rec, target, cfg.n);
        TrialObservation obs;
        obs.trial = t;
        obs.target = target;
        obs.flagged = !fai;
        obs.over_contention = rec.max_point_contention > cfg.k_max;
        obs.x = (fai && !obs.over_contention) ? static_cast<double>(*fai) : 0.0;
        xs[t] = obs.x;
        contention[t] = rec.max_point_contention;
        flagged[t] = obs.flagged;
        over[t] = obs.over_contention;
        if (observe) {
          std::lock_guard<std::mutex> lock(observe_mutex);
          observe(obs, rec, *policy);
        }
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  };

  const std::size_t threads = std::max<std::size_t>(1, std::min<std::size_t>(cfg.threads, cfg.trials));
  if (threads == 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < threads; ++w) pool.emplace_back(work, w, threads);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  PhiEstimate est;
  est.trials = cfg.trials;
  est.seed = cfg.seed;
  double sum = 0;
  for (std::size_t t = 0; t < cfg.trials; ++t) {
    sum += xs[t];
    est.flagged += flagged[t] ? 1 : 0;
    est.over_contention += over[t] ? 1 : 0;
    ++est.contention_histogram[contention[t]];
  }
  est.mean = sum / static_cast<double>(cfg.trials);
  double sq = 0;
  for (double x : xs) sq += (x - est.mean) * (x - est.mean);
  est.variance = cfg.trials > 1 ? sq / static_cast<double>(cfg.trials - 1) : 0.0;
  est.ci95 = 1.96 * std::sqrt(est.variance / static_cast<double>(cfg.trials));
  return est;
}

}  // namespace slin
