#pragma once

#include <map>
#include <optional>
#include <set>
#include <utility>

#include "slin/history.hpp"

namespace slin {

/// Register ownership bookkeeping over base-level steps. A successful write
/// or SC marks the register with the writer. q sees p != q when q reads or
/// LLs a p-marked register, or SCs a p-marked register after having LL'd it.
class MarkState {
 public:
  /// Feeds one step; base-level operations take effect at their response.
  void consume(const Step& s);

  std::optional<ProcessId> mark(ObjectId register_id) const;
  bool visible(ProcessId p) const;
  bool sees(ProcessId q, ProcessId p) const { return sees_.contains({q, p}); }
  const std::set<std::pair<ProcessId, ProcessId>>& sees_relation() const { return sees_; }
  const std::map<ObjectId, ProcessId>& marks() const { return marks_; }

 private:
  std::map<ProcessId, Step> pending_;
  std::map<ObjectId, ProcessId> marks_;
  std::set<std::pair<ProcessId, ObjectId>> linked_;
  std::set<std::pair<ProcessId, ProcessId>> sees_;
};

MarkState replay_marks(const History& h);

}  // namespace slin
