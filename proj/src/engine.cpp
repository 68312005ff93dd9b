#include "slin/engine.hpp"

#include <algorithm>

namespace slin {

std::string to_string(AdversaryClass c) {
  switch (c) {
    case AdversaryClass::oblivious: return "oblivious";
    case AdversaryClass::weak: return "weak";
    case AdversaryClass::strong: return "strong";
    case AdversaryClass::offline: return "offline";
  }
  return "?";
}

std::string to_string(RunStatus s) {
  switch (s) {
    case RunStatus::completed: return "completed";
    case RunStatus::stopped: return "stopped";
    case RunStatus::budget_exhausted: return "budget_exhausted";
    case RunStatus::coins_exhausted: return "coins_exhausted";
  }
  return "?";
}

ObjectBinding atomic_object(std::string name, SeqSpec spec) { return {std::move(name), std::move(spec), std::nullopt}; }

ObjectBinding implemented_object(std::string name, ImplProgram impl) {
  SeqSpec target = impl.target;
  return {std::move(name), std::move(target), std::move(impl)};
}

std::optional<Value> CoinVector::coin(ProcessId, std::size_t global_index, std::size_t) const {
  if (global_index >= values_.size()) return std::nullopt;
  return values_[global_index];
}

std::optional<Value> PerProcessCoins::coin(ProcessId p, std::size_t, std::size_t process_index) const {
  if (p < 0 || static_cast<std::size_t>(p) >= values_.size()) return std::nullopt;
  const auto& row = values_[static_cast<std::size_t>(p)];
  if (process_index >= row.size()) return std::nullopt;
  return row[process_index];
}

struct Simulation::Impl {
  struct Proc {
    std::optional<Routine> program;
    std::optional<Routine> method;
    ObjectId method_object = 0;
    std::string method_op;
    std::size_t flips = 0;
  };
  struct Atomic {
    SeqSpec spec;
    State state;
  };

  const Algorithm& alg;
  const CoinSource& coins;
  AdversaryClass cls;
  RunRecord rec;
  std::vector<Proc> procs;
  std::vector<ProcessStatus> status;
  std::map<ObjectId, Atomic> atomics;
  std::map<std::pair<ObjectId, ProcessId>, Payload> locals;

  Impl(const Algorithm& a, const CoinSource& c, AdversaryClass k) : alg(a), coins(c), cls(k) {
    if (alg.processes < 1) throw SimulationError("algorithm needs at least one process");
    procs.resize(static_cast<std::size_t>(alg.processes));
    status.resize(procs.size());
    rec.returns.resize(procs.size());
    for (ProcessId p = 0; p < alg.processes; ++p) {
      rec.history.processes.insert(p);
      rec.history.objects[coin_object(p)] = {"coin", Level::base, std::nullopt, "coin[" + std::to_string(p) + "]"};
    }
    for (std::size_t i = 0; i < alg.objects.size(); ++i) {
      const ObjectBinding& b = alg.objects[i];
      const auto id = static_cast<ObjectId>(i);
      const Level level = b.impl ? Level::interpreted : Level::base;
      rec.history.objects[id] = {b.spec.type, level, std::nullopt, b.name};
      if (!b.impl) atomics[id] = {b.spec, b.spec.initial};
    }
  }

  Proc& proc(ProcessId p) {
    if (p < 0 || p >= alg.processes) throw SimulationError("no process " + std::to_string(p));
    return procs[static_cast<std::size_t>(p)];
  }

  Payload apply_atomic(ObjectId o, ProcessId p, const std::string& op, const Payload& args, Level level) {
    Atomic& a = atomics.at(o);
    Transition t = a.spec.apply(a.state, p, op, args);
    a.state = std::move(t.state);
    rec.history.append({0, StepKind::invocation, p, o, op, args, level});
    rec.history.append({0, StepKind::response, p, o, op, t.response, level});
    return std::move(t.response);
  }

  ObjectId base_object(ObjectId owner, const Request& r) {
    const ImplProgram& prog = *alg.objects.at(static_cast<std::size_t>(owner)).impl;
    if (r.object < 0 || static_cast<std::size_t>(r.object) >= prog.families.size())
      throw SimulationError(prog.name + ": no base family " + std::to_string(r.object));
    const ObjectId id = base_object_id(owner, r.object, r.element);
    if (!atomics.contains(id)) {
      const BaseFamily& fam = prog.families[static_cast<std::size_t>(r.object)];
      SeqSpec spec = fam.spec(r.element);
      rec.history.objects[id] = {spec.type, Level::base, owner, fam.name + "[" + std::to_string(r.element) + "]"};
      State init = spec.initial;
      atomics[id] = {std::move(spec), std::move(init)};
    }
    return id;
  }

  // The program finished an operation: resume it and note a halt.
  void resume_program(ProcessId p, Payload response) {
    Proc& pr = proc(p);
    pr.program->resume(std::move(response));
    settle(p);
  }

  void settle(ProcessId p) {
    Proc& pr = proc(p);
    if (pr.program->done()) {
      status[static_cast<std::size_t>(p)].halted = true;
      rec.returns[static_cast<std::size_t>(p)] = pr.program->result();
    }
  }

  // Executes the pending base request of p's active method call.
  void method_step(ProcessId p) {
    Proc& pr = proc(p);
    const Request& r = pr.method->request();
    if (r.kind != Request::Kind::invoke) throw SimulationError("method bodies cannot flip coins");
    const ObjectId id = base_object(pr.method_object, r);
    Payload rsp = apply_atomic(id, p, r.op, r.args, Level::base);
    pr.method->resume(std::move(rsp));
    if (!pr.method->done()) return;
    Payload result = pr.method->result();
    rec.history.append({0, StepKind::response, p, pr.method_object, pr.method_op, result, Level::interpreted});
    pr.method.reset();
    status[static_cast<std::size_t>(p)].in_method = false;
    resume_program(p, std::move(result));
  }

  // Issues p's pending program invocation. With `first_step` an implemented
  // invocation also runs the method's first base step.
  void issue(ProcessId p, bool first_step) {
    Proc& pr = proc(p);
    const Request r = pr.program->request();
    if (r.object < 0 || static_cast<std::size_t>(r.object) >= alg.objects.size())
      throw SimulationError("process " + std::to_string(p) + " invokes unknown object " + std::to_string(r.object));
    const auto o = static_cast<ObjectId>(r.object);
    const ObjectBinding& b = alg.objects[static_cast<std::size_t>(r.object)];
    if (!b.impl) {
      Payload rsp = apply_atomic(o, p, r.op, r.args, Level::base);
      resume_program(p, std::move(rsp));
      return;
    }
    rec.history.append({0, StepKind::invocation, p, o, r.op, r.args, Level::interpreted});
    pr.method_object = o;
    pr.method_op = r.op;
    pr.method.emplace(b.impl->method(MethodCall{p, r.op, r.args, &locals[{o, p}]}));
    pr.method->start();
    if (pr.method->done()) throw SimulationError(b.impl->name + ": method returned without a base step");
    status[static_cast<std::size_t>(p)].in_method = true;
    if (first_step) method_step(p);
  }

  GrantResult grant(ProcessId p) {
    Proc& pr = proc(p);
    ProcessStatus& st = status[static_cast<std::size_t>(p)];
    if (st.halted) throw SimulationError("process " + std::to_string(p) + " is scheduled after halting");
    if (!pr.program) {
      pr.program.emplace(alg.program(p));
      pr.program->start();
      settle(p);
      if (st.halted) {
        st.started = true;
        note_grant(p);
        return GrantResult::ok;
      }
    }
    if (pr.method) {
      st.started = true;
      method_step(p);
      note_grant(p);
      return GrantResult::ok;
    }
    const Request& r = pr.program->request();
    if (r.kind == Request::Kind::flip) {
      const std::optional<Value> c = coins.coin(p, rec.coins.size(), pr.flips);
      if (!c) return GrantResult::coins_exhausted;
      st.started = true;
      ++pr.flips;
      rec.coins.push_back(*c);
      const std::size_t flip_index = rec.coins.size() - 1;
      const ObjectId co = coin_object(p);
      rec.history.append({0, StepKind::invocation, p, co, "flip", {}, Level::base});
      rec.history.append({0, StepKind::response, p, co, "flip", {*c}, Level::base});
      resume_program(p, {*c});
      if (cls == AdversaryClass::weak) {
        if (st.halted || pr.program->request().kind != Request::Kind::invoke)
          throw SimulationError("weak-class violation: flip " + std::to_string(flip_index) + " of process " +
                                std::to_string(p) + " is not followed by an invocation");
        issue(p, false);
      }
      note_grant(p);
      return GrantResult::ok;
    }
    st.started = true;
    issue(p, true);
    note_grant(p);
    return GrantResult::ok;
  }

  void note_grant(ProcessId p) {
    rec.schedule.push_back(p);
    ++rec.grants;
    std::size_t active = 0;
    for (const ProcessStatus& s : status)
      if (s.started && !s.halted) ++active;
    rec.max_point_contention = std::max(rec.max_point_contention, active);
  }
};

Simulation::Simulation(const Algorithm& alg, const CoinSource& coins, AdversaryClass cls)
    : impl_(std::make_unique<Impl>(alg, coins, cls)) {}

Simulation::~Simulation() = default;

GrantResult Simulation::grant(ProcessId p) { return impl_->grant(p); }

bool Simulation::halted(ProcessId p) const {
  if (p < 0 || static_cast<std::size_t>(p) >= impl_->status.size())
    throw SimulationError("no process " + std::to_string(p));
  return impl_->status[static_cast<std::size_t>(p)].halted;
}

bool Simulation::all_halted() const {
  return std::all_of(impl_->status.begin(), impl_->status.end(), [](const ProcessStatus& s) { return s.halted; });
}

const std::vector<ProcessStatus>& Simulation::status() const { return impl_->status; }

const RunRecord& Simulation::record() const { return impl_->rec; }

RunRecord Simulation::finish(RunStatus status) {
  RunRecord out = impl_->rec;
  out.status = status;
  for (const auto& [id, a] : impl_->atomics) out.final_states[id] = a.state;
  return out;
}

RunRecord run(const Algorithm& alg, AdversaryPolicy& policy, const CoinSource& coins, const RunOptions& options) {
  const AdversaryClass cls = policy.kind();
  Simulation sim(alg, coins, cls);
  static const History kHidden;
  static const std::vector<ProcessId> kNoSchedule;
  static const std::vector<ProcessStatus> kNoStatus;
  for (;;) {
    if (sim.all_halted()) return sim.finish(RunStatus::completed);
    if (sim.record().grants >= options.budget) return sim.finish(RunStatus::budget_exhausted);
    const RunRecord& rec = sim.record();
    std::optional<ProcessId> next;
    if (cls == AdversaryClass::oblivious) {
      // A fixed sequence: entries naming halted processes are skipped.
      for (;;) {
        next = policy.decide(AdversaryView{kHidden, kNoSchedule, 0, kNoStatus, nullptr});
        if (!next || !sim.halted(*next)) break;
      }
    } else {
      const CoinSource* visible = cls == AdversaryClass::offline ? &coins : nullptr;
      next = policy.decide(AdversaryView{rec.history, rec.schedule, rec.grants, sim.status(), visible});
    }
    if (!next) return sim.finish(RunStatus::stopped);
    if (sim.grant(*next) == GrantResult::coins_exhausted) return sim.finish(RunStatus::coins_exhausted);
  }
}

}  // namespace slin
