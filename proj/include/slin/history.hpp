#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace slin {

using Value = std::int64_t;
using Payload = std::vector<Value>;
using ProcessId = int;
using ObjectId = std::int64_t;

/// Reserved sentinel: the empty marker of queues and the ⊥ content of cells.
inline constexpr Value kBottom = std::numeric_limits<Value>::min();

enum class StepKind { invocation, response };
enum class Level { base, interpreted };

struct Step {
  std::size_t index = 0;
  StepKind kind = StepKind::invocation;
  ProcessId process = 0;
  ObjectId object = 0;
  std::string op;
  Payload payload;
  Level level = Level::base;

  bool operator==(const Step&) const = default;
};

/// Registry entry. `type` is a spec descriptor (see seq_spec.hpp); `owner` is
/// set for base objects that belong to an implemented object.
struct ObjectInfo {
  std::string type;
  Level level = Level::base;
  std::optional<ObjectId> owner;
  std::string name;

  bool operator==(const ObjectInfo&) const = default;
};

struct History {
  std::vector<Step> steps;
  std::map<ObjectId, ObjectInfo> objects;
  std::set<ProcessId> processes;

  std::size_t size() const { return steps.size(); }
  bool empty() const { return steps.empty(); }
  const Step& operator[](std::size_t i) const { return steps[i]; }

  /// Appends a copy of `s` with its index set to the current length.
  const Step& append(Step s);
  History prefix(std::size_t length) const;

  bool operator==(const History&) const = default;
};

/// Operation identity that survives prefixes: the k-th operation of a process
/// at a given level.
struct OpKey {
  ProcessId process = 0;
  std::size_t ordinal = 0;

  auto operator<=>(const OpKey&) const = default;
};

struct Operation {
  std::size_t inv = 0;
  std::optional<std::size_t> rsp;
  ProcessId process = 0;
  ObjectId object = 0;
  std::string op;
  Payload args;
  std::optional<Payload> ret;
  Level level = Level::base;
  /// Nested ops are base operations inside a method call of the same process.
  bool nested = false;
  /// Ordinal among the process's ops with the same `nested` flag.
  OpKey key;

  bool complete() const { return rsp.has_value(); }
};

class HistoryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline bool is_coin_object(ObjectId o) { return o < 0; }
inline ObjectId coin_object(ProcessId p) { return -1 - static_cast<ObjectId>(p); }
inline bool is_flip(const Step& s) { return s.op == "flip"; }

/// Matches invocations with responses per (process, level), in invocation
/// order. Throws HistoryError on malformed input.
std::vector<Operation> operations(const History& h);

/// The non-nested operations; for an interpreted history that is all of them.
std::vector<Operation> top_level_operations(const History& h);

void check_well_formed(const History& h);

History project_process(const History& h, ProcessId p);
History project_object(const History& h, ObjectId o);
History project_method_intervals(const History& h, ObjectId o);
History interpret(const History& h);
History prefix_to_flip(const History& h, std::size_t k);

bool happens_before(const Operation& a, const Operation& b);

/// True iff every invocation is immediately followed by its matching response.
bool is_sequential(const History& h);

}  // namespace slin
