#pragma once

#include <functional>
#include <string>
#include <vector>

#include "slin/routine.hpp"
#include "slin/seq_spec.hpp"

namespace slin {

/// Arguments of one method call. `local` is the calling process's persistent
/// private state for this object instance (e.g. a writer's sequence number);
/// it starts empty and outlives individual calls.
struct MethodCall {
  ProcessId process = 0;
  std::string op;
  Payload args;
  Payload* local = nullptr;
};

/// A family of base objects; element i is created lazily with spec(i).
struct BaseFamily {
  std::string name;
  std::function<SeqSpec(std::int64_t element)> spec;
};

struct ImplProgram {
  std::string name;
  SeqSpec target;
  std::vector<BaseFamily> families;
  std::function<Routine(MethodCall)> method;
};

/// Deterministic, schedule-independent id of a base object:
/// ((owner + 1) << 32) | (family << 24) | element.
ObjectId base_object_id(ObjectId owner, int family, std::int64_t element);

namespace impl {

ImplProgram aadgms_snapshot(int n);
/// Register over {0..max} from max+1 binary registers.
ImplProgram vidyasankar_register(Value max, Value initial);
/// Two-reader register from six SRSW registers; the writer is process 0 and
/// reader i is process i.
ImplProgram vitanyi_awerbuch_mrsw(int readers, Value initial);
ImplProgram herlihy_wing_queue();
ImplProgram llsc_counter();
/// Announce-then-agree counter; the announce pool has isqrt(n) cells.
ImplProgram writefirst_counter(int n);
ImplProgram cas_from_registers(Value initial);
ImplProgram mutex_wrapped(SeqSpec spec);

struct Params {
  int n = 3;
  Value initial = 0;
  Value max = 2;
  int readers = 2;
};

const std::vector<std::string>& catalog_names();
/// Catalog lookup: aadgms-snapshot, vidyasankar-register, va-mrsw-register,
/// hw-queue, llsc-counter, writefirst-counter, cas-from-registers,
/// mutex-counter, mutex-queue.
ImplProgram by_name(const std::string& name, const Params& params = {});

}  // namespace impl
}  // namespace slin
