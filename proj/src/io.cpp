#include "slin/io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace slin {

using Json = nlohmann::ordered_json;

namespace {

const char* kind_name(StepKind k) { return k == StepKind::invocation ? "inv" : "rsp"; }
const char* level_name(Level l) { return l == Level::base ? "base" : "interpreted"; }

[[noreturn]] void fail(const std::string& what) { throw HistoryError("io: " + what); }

const Json& field(const Json& j, const char* key) {
  if (!j.is_object()) fail("expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(std::string("missing field \"") + key + "\"");
  return *it;
}

std::int64_t as_int(const Json& j, const char* what) {
  if (!j.is_number_integer()) fail(std::string(what) + " must be an integer");
  return j.get<std::int64_t>();
}

std::size_t as_index(const Json& j, const char* what) {
  if (!j.is_number_unsigned()) fail(std::string(what) + " must be a non-negative integer");
  return j.get<std::size_t>();
}

std::string as_string(const Json& j, const char* what) {
  if (!j.is_string()) fail(std::string(what) + " must be a string");
  return j.get<std::string>();
}

void expect_keys(const Json& j, std::initializer_list<const char*> allowed) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) fail("unexpected field \"" + it.key() + "\"");
  }
}

StepKind kind_from(const Json& j) {
  std::string s = as_string(j, "kind");
  if (s == "inv") return StepKind::invocation;
  if (s == "rsp") return StepKind::response;
  fail("unknown step kind \"" + s + "\"");
}

Level level_from(const Json& j) {
  std::string s = as_string(j, "level");
  if (s == "base") return Level::base;
  if (s == "interpreted") return Level::interpreted;
  fail("unknown level \"" + s + "\"");
}

Json step_json(const Step& s) {
  Json j;
  j["index"] = s.index;
  j["kind"] = kind_name(s.kind);
  j["process"] = s.process;
  j["object"] = s.object;
  j["op"] = s.op;
  j["payload"] = Json::array();
  for (Value v : s.payload) j["payload"].push_back(v);
  j["level"] = level_name(s.level);
  return j;
}

Step step_of(const Json& j) {
  if (!j.is_object()) fail("a step must be an object");
  expect_keys(j, {"index", "kind", "process", "object", "op", "payload", "level"});
  Step s;
  s.index = as_index(field(j, "index"), "index");
  s.kind = kind_from(field(j, "kind"));
  s.process = static_cast<ProcessId>(as_int(field(j, "process"), "process"));
  s.object = as_int(field(j, "object"), "object");
  s.op = as_string(field(j, "op"), "op");
  const Json& payload = field(j, "payload");
  if (!payload.is_array()) fail("payload must be an array");
  for (const Json& v : payload) s.payload.push_back(as_int(v, "payload entry"));
  s.level = level_from(field(j, "level"));
  return s;
}

Json registry_objects(const std::map<ObjectId, ObjectInfo>& objects) {
  Json arr = Json::array();
  for (const auto& [id, info] : objects) {
    Json o;
    o["id"] = id;
    o["type"] = info.type;
    o["level"] = level_name(info.level);
    o["owner"] = info.owner ? Json(*info.owner) : Json(nullptr);
    o["name"] = info.name;
    arr.push_back(std::move(o));
  }
  return arr;
}

std::map<ObjectId, ObjectInfo> objects_of(const Json& arr) {
  if (!arr.is_array()) fail("objects must be an array");
  std::map<ObjectId, ObjectInfo> out;
  for (const Json& o : arr) {
    if (!o.is_object()) fail("an object entry must be an object");
    expect_keys(o, {"id", "type", "level", "owner", "name"});
    ObjectInfo info;
    ObjectId id = as_int(field(o, "id"), "object id");
    info.type = as_string(field(o, "type"), "type");
    info.level = level_from(field(o, "level"));
    const Json& owner = field(o, "owner");
    if (!owner.is_null()) info.owner = as_int(owner, "owner");
    info.name = as_string(field(o, "name"), "name");
    if (!out.emplace(id, std::move(info)).second) fail("object " + std::to_string(id) + " listed twice");
  }
  return out;
}

Json registry_processes(const std::set<ProcessId>& processes) {
  Json arr = Json::array();
  for (ProcessId p : processes) arr.push_back(p);
  return arr;
}

std::set<ProcessId> processes_of(const Json& arr) {
  if (!arr.is_array()) fail("processes must be an array");
  std::set<ProcessId> out;
  for (const Json& p : arr)
    if (!out.insert(static_cast<ProcessId>(as_int(p, "process"))).second) fail("process listed twice");
  return out;
}

void check_format(const Json& j, const char* name) {
  if (as_string(field(j, "format"), "format") != name) fail(std::string("expected format \"") + name + "\"");
  if (as_int(field(j, "version"), "version") != 1) fail("unsupported version");
}

Json parse(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    fail(std::string("malformed JSON: ") + e.what());
  }
}

}  // namespace

std::string step_to_json(const Step& s) { return step_json(s).dump(); }

Step step_from_json(const std::string& line) { return step_of(parse(line)); }

std::string history_to_jsonl(const History& h) {
  Json header;
  header["format"] = "slin-history";
  header["version"] = 1;
  header["processes"] = registry_processes(h.processes);
  header["objects"] = registry_objects(h.objects);
  std::string out = header.dump() + "\n";
  for (const Step& s : h.steps) out += step_json(s).dump() + "\n";
  return out;
}

History history_from_jsonl(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  History h;
  bool have_header = false;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) fail("empty line " + std::to_string(lineno));
    Json j = parse(line);
    if (!have_header) {
      if (!j.is_object()) fail("header must be an object");
      expect_keys(j, {"format", "version", "processes", "objects"});
      check_format(j, "slin-history");
      h.processes = processes_of(field(j, "processes"));
      h.objects = objects_of(field(j, "objects"));
      have_header = true;
      continue;
    }
    Step s = step_of(j);
    if (s.index != h.size())
      fail("line " + std::to_string(lineno) + ": index " + std::to_string(s.index) + ", expected " +
           std::to_string(h.size()));
    h.steps.push_back(std::move(s));
  }
  if (!have_header) fail("missing header line");
  return h;
}

std::string tree_to_json(const HistoryTree& tree) {
  Json j;
  j["format"] = "slin-tree";
  j["version"] = 1;
  j["processes"] = registry_processes(tree.processes());
  j["objects"] = registry_objects(tree.objects());
  Json nodes = Json::array();
  for (const TreeNode& n : tree.nodes()) {
    Json node;
    node["id"] = n.id;
    node["parent"] = n.parent ? Json(*n.parent) : Json(nullptr);
    node["appended_step"] = n.appended ? step_json(*n.appended) : Json(nullptr);
    if (n.coin_outcome) node["coin_outcome"] = *n.coin_outcome;
    nodes.push_back(std::move(node));
  }
  j["nodes"] = std::move(nodes);
  return j.dump(2) + "\n";
}

HistoryTree tree_from_json(const std::string& text) {
  Json j = parse(text);
  if (!j.is_object()) fail("tree must be an object");
  expect_keys(j, {"format", "version", "processes", "objects", "nodes"});
  check_format(j, "slin-tree");
  HistoryTree tree(objects_of(field(j, "objects")), processes_of(field(j, "processes")));
  const Json& nodes = field(j, "nodes");
  if (!nodes.is_array()) fail("nodes must be an array");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const Json& n = nodes[i];
    if (!n.is_object()) fail("a node must be an object");
    expect_keys(n, {"id", "parent", "appended_step", "coin_outcome"});
    if (as_index(field(n, "id"), "id") != i) fail("node ids must be 0, 1, 2, ... in order");
    const Json& parent = field(n, "parent");
    const Json& step = field(n, "appended_step");
    if (i == 0) {
      if (!parent.is_null() || !step.is_null()) fail("node 0 must be the root");
      if (n.contains("coin_outcome")) fail("the root has no coin outcome");
      continue;
    }
    if (parent.is_null() || step.is_null()) fail("node " + std::to_string(i) + " is a second root");
    std::size_t p = as_index(parent, "parent");
    if (p >= i) fail("node " + std::to_string(i) + " precedes its parent");
    Step s = step_of(step);
    if (s.index != tree.depth(p))
      fail("node " + std::to_string(i) + ": step index does not match its depth");
    if (tree.add_child(p, std::move(s)) != i) fail("node " + std::to_string(i) + " duplicates a sibling");
    const std::optional<Value>& derived = tree.node(i).coin_outcome;
    if (n.contains("coin_outcome")) {
      if (!derived || *derived != as_int(n["coin_outcome"], "coin_outcome"))
        fail("node " + std::to_string(i) + ": coin_outcome does not match its step");
    } else if (derived) {
      fail("node " + std::to_string(i) + ": missing coin_outcome");
    }
  }
  return tree;
}

std::string witness_to_json(const LinearizationWitness& w) {
  Json j = Json::object();
  for (const auto& [id, image] : w.images) {
    Json steps = Json::array();
    for (const Step& s : image.steps) steps.push_back(step_json(s));
    j[std::to_string(id)] = std::move(steps);
  }
  return j.dump(2) + "\n";
}

LinearizationWitness witness_from_json(const std::string& text, const HistoryTree& tree) {
  Json j = parse(text);
  if (!j.is_object()) fail("witness must be an object");
  LinearizationWitness w;
  for (auto it = j.begin(); it != j.end(); ++it) {
    std::size_t id = 0;
    std::size_t used = 0;
    try {
      id = std::stoul(it.key(), &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != it.key().size()) fail("bad node id \"" + it.key() + "\"");
    if (id >= tree.size()) fail("witness names node " + it.key() + " outside the tree");
    if (!it.value().is_array()) fail("an image must be an array of steps");
    History image;
    image.objects = tree.objects();
    image.processes = tree.processes();
    for (const Json& s : it.value()) {
      Step step = step_of(s);
      if (step.index != image.size()) fail("image of node " + it.key() + " has a bad step index");
      image.steps.push_back(std::move(step));
    }
    if (!w.images.emplace(id, std::move(image)).second) fail("node " + it.key() + " listed twice");
  }
  return w;
}

std::string run_summary_to_json(const RunRecord& rec) {
  Json j;
  j["status"] = to_string(rec.status);
  j["grants"] = rec.grants;
  j["steps"] = rec.history.size();
  j["max_point_contention"] = rec.max_point_contention;
  j["coins"] = rec.coins;
  j["schedule"] = rec.schedule;
  Json returns = Json::array();
  for (const auto& r : rec.returns) returns.push_back(r ? Json(*r) : Json(nullptr));
  j["returns"] = std::move(returns);
  return j.dump(2) + "\n";
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail("cannot write " + path);
  out << contents;
  if (!out) fail("write failed: " + path);
}

}  // namespace slin
