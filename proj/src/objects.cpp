#include "slin/objects.hpp"

#include <cmath>
#include <optional>

namespace slin {

ObjectId base_object_id(ObjectId owner, int family, std::int64_t element) {
  if (owner < 0 || family < 0 || family > 0xff || element < 0 || element > 0xffffff)
    throw SpecError("base object address out of range");
  return ((owner + 1) << 32) | (static_cast<ObjectId>(family) << 24) | element;
}

namespace impl {
namespace {

Value arg0(const MethodCall& call) {
  if (call.args.empty()) throw SpecError(call.op + ": missing argument");
  return call.args[0];
}

// ---- AADGMS snapshot -------------------------------------------------------
// A[j] holds (value, seq, view[0..n-1]).

Routine aadgms_method(MethodCall call, int n) {
  const bool update = call.op == "update";
  if (!update && call.op != "scan") throw SpecError("aadgms-snapshot: unknown operation '" + call.op + "'");
  if (update && (call.process < 0 || call.process >= n))
    throw SpecError("aadgms-snapshot: process has no component");
  const Value value = update ? arg0(call) : 0;

  std::vector<Payload> prev(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    Payload r = co_await base(0, j, "read");
    prev[static_cast<std::size_t>(j)] = std::move(r);
  }
  std::vector<bool> moved(static_cast<std::size_t>(n), false);
  Payload view;
  for (;;) {
    std::vector<Payload> cur(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
      Payload r = co_await base(0, j, "read");
      cur[static_cast<std::size_t>(j)] = std::move(r);
    }
    bool same = true;
    std::optional<std::size_t> borrow;
    for (std::size_t j = 0; j < cur.size(); ++j) {
      if (cur[j][1] == prev[j][1]) continue;
      same = false;
      if (moved[j]) {
        borrow = j;
        break;
      }
      moved[j] = true;
    }
    if (same) {
      for (const Payload& cell : cur) view.push_back(cell[0]);
      break;
    }
    if (borrow) {
      view.assign(cur[*borrow].begin() + 2, cur[*borrow].end());
      break;
    }
    prev = std::move(cur);
  }
  if (!update) co_return view;

  Payload& local = *call.local;
  if (local.empty()) local = {0};
  const Value seq = ++local[0];
  Payload cell{value, seq};
  cell.insert(cell.end(), view.begin(), view.end());
  co_await base(0, call.process, "write", std::move(cell));
  co_return Payload{};
}

// ---- Vidyasankar register ---------------------------------------------------

Routine vidyasankar_method(MethodCall call, Value max) {
  if (call.op == "write") {
    const Value v = arg0(call);
    if (v < 0 || v > max) throw SpecError("vidyasankar-register: write argument outside domain");
    co_await base(0, v, "write", {1});
    for (Value i = v - 1; i >= 0; --i) co_await base(0, i, "write", {0});
    co_return Payload{};
  }
  if (call.op == "read") {
    Value i = -1;
    for (;;) {
      ++i;
      Payload r = co_await base(0, i, "read");
      if (r.at(0) == 1) break;
    }
    Value val = i;
    for (i = val - 1; i >= 0; --i) {
      Payload r = co_await base(0, i, "read");
      if (r.at(0) == 1) val = i;
    }
    co_return Payload{val};
  }
  throw SpecError("vidyasankar-register: unknown operation '" + call.op + "'");
}

// ---- Vitanyi-Awerbuch MRSW register -----------------------------------------
// Family 0: R_{w-ri} at element i. Family 1: R_{rj-ri} at element j*(readers+1)+i.

Routine mrsw_method(MethodCall call, int readers) {
  if (call.op == "write") {
    if (call.process != 0) throw SpecError("va-mrsw-register: only process 0 writes");
    const Value v = arg0(call);
    Payload& local = *call.local;
    if (local.empty()) local = {1};
    const Value seq = ++local[0];
    for (int i = 1; i <= readers; ++i) co_await base(0, i, "write", {v, seq});
    co_return Payload{};
  }
  if (call.op == "read") {
    const int ri = call.process;
    if (ri < 1 || ri > readers) throw SpecError("va-mrsw-register: process is not a reader");
    std::vector<Payload> cells;
    Payload own = co_await base(0, ri, "read");
    cells.push_back(std::move(own));
    for (int j = 1; j <= readers; ++j) {
      Payload r = co_await base(1, j * (readers + 1) + ri, "read");
      cells.push_back(std::move(r));
    }
    std::size_t best = 0;
    for (std::size_t j = 1; j < cells.size(); ++j)
      if (cells[j][1] > cells[best][1]) best = j;
    for (int i = 1; i <= readers; ++i) co_await base(1, ri * (readers + 1) + i, "write", cells[best]);
    co_return Payload{cells[best][0]};
  }
  throw SpecError("va-mrsw-register: unknown operation '" + call.op + "'");
}

// ---- Herlihy-Wing queue -----------------------------------------------------
// Family 0: tail. Family 1: item[i].

Routine hw_queue_method(MethodCall call) {
  if (call.op == "enqueue") {
    const Value v = arg0(call);
    if (v == kBottom) throw SpecError("hw-queue: cannot enqueue the empty marker");
    Payload pos = co_await base(0, 0, "fetch&inc");
    co_await base(1, pos.at(0), "write", {v});
    co_return Payload{};
  }
  if (call.op == "dequeue") {
    for (;;) {
      Payload max = co_await base(0, 0, "read");
      for (Value i = 0; i < max.at(0); ++i) {
        Payload v = co_await base(1, i, "fetch&set", {kBottom});
        if (v.at(0) != kBottom) co_return v;
      }
    }
  }
  throw SpecError("hw-queue: unknown operation '" + call.op + "'");
}

// ---- LL/SC counters ---------------------------------------------------------

// `pool` > 0 adds an announce write to ann[process mod pool] before the loop.
Routine llsc_counter_method(MethodCall call, int counter_family, std::int64_t pool) {
  Value delta = 0;
  if (call.op == "fetch&inc")
    delta = 1;
  else if (call.op == "fetch&dec")
    delta = -1;
  else if (call.op == "read") {
    Payload v = co_await base(counter_family, 0, "read");
    co_return v;
  } else {
    throw SpecError("counter: unknown operation '" + call.op + "'");
  }
  if (pool > 0) co_await base(0, call.process % pool, "write", {call.process, delta});
  for (;;) {
    Payload v = co_await base(counter_family, 0, "LL");
    Payload ok = co_await base(counter_family, 0, "SC", {v.at(0) + delta});
    if (ok.at(0) == 1) co_return v;
  }
}

// ---- CAS from registers -----------------------------------------------------
// Family 0: Cur. Family 1: Val per block. Family 2: per-block election.
// Family 3: per-block signal.

Routine cas_method(MethodCall call) {
  if (call.op == "read") {
    Payload b = co_await base(0, 0, "read");
    Payload v = co_await base(1, b.at(0), "read");
    co_return v;
  }
  if (call.op != "CAS") throw SpecError("cas-from-registers: unknown operation '" + call.op + "'");
  if (call.args.size() < 2) throw SpecError("CAS: missing argument");
  const Value x = call.args[0];
  const Value y = call.args[1];
  Payload b = co_await base(0, 0, "read");
  Payload v = co_await base(1, b.at(0), "read");
  // CAS(X, X) never changes the state; it behaves like a read.
  if (v.at(0) != x || x == y) co_return v;
  Payload won = co_await base(2, b[0], "test&set");
  if (won.at(0) == 0) {
    const Value next = b[0] + 1;
    co_await base(1, next, "write", {y});
    co_await base(0, 0, "write", {next});
    co_await base(3, b[0], "write", {y});
    co_return Payload{x};
  }
  for (;;) {
    Payload s = co_await base(3, b[0], "read");
    if (s.at(0) != kBottom) co_return s;
  }
}

// ---- mutex-wrapped sequential object ----------------------------------------
// Family 0: lock (LL/SC). Family 1: state register.

Routine mutex_method(MethodCall call, SeqSpec spec) {
  for (;;) {
    Payload held = co_await base(0, 0, "LL");
    if (held.at(0) != 0) continue;
    Payload ok = co_await base(0, 0, "SC", {1});
    if (ok.at(0) == 1) break;
  }
  Payload state = co_await base(1, 0, "read");
  Transition t = spec.apply(state, call.process, call.op, call.args);
  co_await base(1, 0, "write", std::move(t.state));
  co_await base(0, 0, "write", {0});
  co_return t.response;
}

std::function<SeqSpec(std::int64_t)> fixed(SeqSpec s) {
  return [s](std::int64_t) { return s; };
}

}  // namespace

ImplProgram aadgms_snapshot(int n) {
  if (n < 1) throw SpecError("aadgms-snapshot: needs at least one component");
  ImplProgram p;
  p.name = "aadgms-snapshot";
  p.target = specs::snapshot(n);
  p.families.push_back({"A", [n](std::int64_t j) {
                          if (j >= n) throw SpecError("aadgms-snapshot: no component " + std::to_string(j));
                          return specs::register_spec(Payload(static_cast<std::size_t>(n) + 2, 0));
                        }});
  p.method = [n](MethodCall c) { return aadgms_method(std::move(c), n); };
  return p;
}

ImplProgram vidyasankar_register(Value max, Value initial) {
  if (max < 0 || initial < 0 || initial > max)
    throw SpecError("vidyasankar-register: initial value outside domain");
  ImplProgram p;
  p.name = "vidyasankar-register";
  p.target = specs::bounded_register(max, initial);
  p.families.push_back({"A", [max, initial](std::int64_t i) {
                          if (i > max) throw SpecError("vidyasankar-register: no cell " + std::to_string(i));
                          return specs::binary_register(i == initial ? 1 : 0);
                        }});
  p.method = [max](MethodCall c) { return vidyasankar_method(std::move(c), max); };
  return p;
}

ImplProgram vitanyi_awerbuch_mrsw(int readers, Value initial) {
  if (readers != 2) throw SpecError("va-mrsw-register: exactly two readers are supported");
  ImplProgram p;
  p.name = "va-mrsw-register";
  p.target = specs::register_spec({initial});
  p.families.push_back({"Rw", fixed(specs::register_spec({initial, 1}))});
  p.families.push_back({"Rr", fixed(specs::register_spec({initial, 1}))});
  p.method = [readers](MethodCall c) { return mrsw_method(std::move(c), readers); };
  return p;
}

ImplProgram herlihy_wing_queue() {
  ImplProgram p;
  p.name = "hw-queue";
  p.target = specs::queue();
  p.families.push_back({"tail", fixed(specs::rmw_cell(0))});
  p.families.push_back({"item", fixed(specs::rmw_cell(kBottom))});
  p.method = [](MethodCall c) { return hw_queue_method(std::move(c)); };
  return p;
}

ImplProgram llsc_counter() {
  ImplProgram p;
  p.name = "llsc-counter";
  p.target = specs::counter();
  p.families.push_back({"C", fixed(specs::llsc(0))});
  p.method = [](MethodCall c) { return llsc_counter_method(std::move(c), 0, 0); };
  return p;
}

ImplProgram writefirst_counter(int n) {
  if (n < 1) throw SpecError("writefirst-counter: needs at least one process");
  const auto pool = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::sqrt(static_cast<double>(n))));
  ImplProgram p;
  p.name = "writefirst-counter";
  p.target = specs::counter();
  p.families.push_back({"ann", fixed(specs::register_spec({-1, 0}))});
  p.families.push_back({"C", fixed(specs::llsc(0))});
  p.method = [pool](MethodCall c) { return llsc_counter_method(std::move(c), 1, pool); };
  return p;
}

ImplProgram cas_from_registers(Value initial) {
  ImplProgram p;
  p.name = "cas-from-registers";
  p.target = specs::cas(initial);
  p.families.push_back({"Cur", fixed(specs::register_spec({0}))});
  p.families.push_back({"Val", [initial](std::int64_t b) { return specs::register_spec({b == 0 ? initial : 0}); }});
  p.families.push_back({"elect", fixed(specs::test_and_set())});
  p.families.push_back({"signal", fixed(specs::register_spec({kBottom}))});
  p.method = [](MethodCall c) { return cas_method(std::move(c)); };
  return p;
}

ImplProgram mutex_wrapped(SeqSpec spec) {
  ImplProgram p;
  p.name = "mutex-wrapped";
  p.target = spec;
  p.families.push_back({"lock", fixed(specs::llsc(0))});
  p.families.push_back({"state", fixed(specs::register_spec(spec.initial))});
  p.method = [spec](MethodCall c) { return mutex_method(std::move(c), spec); };
  return p;
}

const std::vector<std::string>& catalog_names() {
  static const std::vector<std::string> names = {
      "aadgms-snapshot", "vidyasankar-register", "va-mrsw-register", "hw-queue",    "llsc-counter",
      "writefirst-counter", "cas-from-registers", "mutex-counter",   "mutex-queue"};
  return names;
}

ImplProgram by_name(const std::string& name, const Params& params) {
  if (name == "aadgms-snapshot") return aadgms_snapshot(params.n);
  if (name == "vidyasankar-register") return vidyasankar_register(params.max, params.initial);
  if (name == "va-mrsw-register") return vitanyi_awerbuch_mrsw(params.readers, params.initial);
  if (name == "hw-queue") return herlihy_wing_queue();
  if (name == "llsc-counter") return llsc_counter();
  if (name == "writefirst-counter") return writefirst_counter(params.n);
  if (name == "cas-from-registers") return cas_from_registers(params.initial);
  if (name == "mutex-counter") return mutex_wrapped(specs::counter());
  if (name == "mutex-queue") return mutex_wrapped(specs::queue());
  throw SpecError("unknown object implementation '" + name + "'");
}

}  // namespace impl
}  // namespace slin
