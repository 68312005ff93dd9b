#pragma once

#include <string>

#include "slin/engine.hpp"
#include "slin/history.hpp"
#include "slin/history_tree.hpp"
#include "slin/strong_lin.hpp"

namespace slin {

// History interchange is JSON Lines. The first line is the header
//   {"format":"slin-history","version":1,"processes":[...],"objects":[...]}
// with objects as {"id","type","level","owner","name"}; each later line is a
// step {"index","kind","process","object","op","payload","level"} with kind
// "inv" | "rsp" and level "base" | "interpreted". Output uses exactly this
// field order, so serialize -> parse -> serialize is byte-identical.
// Parsers throw HistoryError on malformed input.

std::string history_to_jsonl(const History& h);
History history_from_jsonl(const std::string& text);

/// One step as a single JSON line, without the trailing newline.
std::string step_to_json(const Step& s);
Step step_from_json(const std::string& line);

// Tree interchange:
//   {"format":"slin-tree","version":1,"processes":[...],"objects":[...],
//    "nodes":[{"id","parent","appended_step","coin_outcome"?}]}
// with parent and appended_step null at the root. An empty node list reads
// as the root-only tree.

std::string tree_to_json(const HistoryTree& tree);
HistoryTree tree_from_json(const std::string& text);

/// {"<node id>": [step, ...], ...} ordered by node id.
std::string witness_to_json(const LinearizationWitness& w);
/// Images take the tree's registry; node ids must exist in the tree.
LinearizationWitness witness_from_json(const std::string& text, const HistoryTree& tree);

/// Run metadata: coins, schedule, status, grants, contention and returns.
/// The history itself goes through history_to_jsonl.
std::string run_summary_to_json(const RunRecord& rec);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

}  // namespace slin
