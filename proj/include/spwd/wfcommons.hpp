#pragma once

// WfCommons instance files and machine pool files.

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "spwd/common.hpp"
#include "spwd/workflow.hpp"

namespace spwd {

namespace detail {

inline const nlohmann::json* find_path(const nlohmann::json& root, std::initializer_list<const char*> keys) {
  const nlohmann::json* node = &root;
  for (const char* key : keys) {
    if (!node->is_object()) return nullptr;
    auto it = node->find(key);
    if (it == node->end()) return nullptr;
    node = &*it;
  }
  return node;
}

inline std::optional<double> number_field(const nlohmann::json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_number()) throw Error(ErrorKind::parse, std::string("field '") + key + "' is not a number");
  return it->get<double>();
}

inline std::vector<std::string> string_list(const nlohmann::json& obj, const char* key) {
  std::vector<std::string> out;
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return out;
  if (!it->is_array()) throw Error(ErrorKind::parse, std::string("field '") + key + "' is not a list");
  for (const auto& item : *it) {
    if (!item.is_string()) throw Error(ErrorKind::parse, std::string("field '") + key + "' holds a non-string");
    out.push_back(item.get<std::string>());
  }
  return out;
}

}  // namespace detail

/// Reads a WfCommons instance (1.4 `workflow.tasks` or 1.5 `workflow.specification.tasks`).
inline Workflow parse_wfcommons(std::string_view document) {
  using nlohmann::json;
  json root;
  try {
    root = json::parse(document.begin(), document.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::parse, e.what());
  }

  const json* tasks = detail::find_path(root, {"workflow", "specification", "tasks"});
  if (tasks == nullptr) tasks = detail::find_path(root, {"workflow", "tasks"});
  if (tasks == nullptr || !tasks->is_array()) throw Error(ErrorKind::parse, "no workflow task list found");

  // 1.5 keeps runtimes in the execution section, keyed by task id.
  std::unordered_map<std::string, double> execution_runtime;
  if (const json* exec = detail::find_path(root, {"workflow", "execution", "tasks"}); exec && exec->is_array()) {
    for (const auto& item : *exec) {
      if (!item.is_object() || !item.contains("id") || !item["id"].is_string()) continue;
      std::optional<double> r = detail::number_field(item, "runtimeInSeconds");
      if (!r) r = detail::number_field(item, "runtime");
      if (r) execution_runtime[item["id"].get<std::string>()] = *r;
    }
  }

  struct RawTask {
    std::string key;
    std::string name;
    double runtime;
    std::vector<std::string> children;
    std::vector<std::string> parents;
  };
  std::vector<RawTask> raw;
  std::unordered_map<std::string, int> by_id;
  std::unordered_map<std::string, int> by_name;
  std::set<std::string> names;
  bool names_unique = true;

  for (const auto& item : *tasks) {
    if (!item.is_object()) throw Error(ErrorKind::parse, "task entry is not an object");
    std::optional<std::string> id, name;
    if (item.contains("id") && item["id"].is_string()) id = item["id"].get<std::string>();
    if (item.contains("name") && item["name"].is_string()) name = item["name"].get<std::string>();
    if (!id && !name) throw Error(ErrorKind::parse, "task entry without name or id");
    const std::string key = id ? *id : *name;

    std::optional<double> runtime = detail::number_field(item, "runtimeInSeconds");
    if (!runtime) runtime = detail::number_field(item, "runtime");
    if (!runtime) {
      auto it = execution_runtime.find(key);
      if (it != execution_runtime.end()) runtime = it->second;
    }
    if (!runtime) throw Error(ErrorKind::parse, "task '" + key + "' has no runtime");
    if (*runtime < 0.0) throw Error(ErrorKind::invalid_input, "task '" + key + "' has negative runtime");

    const int index = static_cast<int>(raw.size());
    if (by_id.contains(key)) throw Error(ErrorKind::parse, "duplicate task '" + key + "'");
    by_id[key] = index;
    if (name) {
      if (!names.insert(*name).second) names_unique = false;
      by_name.emplace(*name, index);
    }
    raw.push_back(RawTask{key, name.value_or(key), *runtime, detail::string_list(item, "children"),
                          detail::string_list(item, "parents")});
  }

  auto resolve = [&](const std::string& ref) {
    if (auto it = by_id.find(ref); it != by_id.end()) return it->second;
    if (auto it = by_name.find(ref); it != by_name.end()) return it->second;
    throw Error(ErrorKind::parse, "relation references unknown task '" + ref + "'");
  };

  std::set<Edge> edge_set;
  for (int i = 0; i < static_cast<int>(raw.size()); ++i) {
    for (const auto& c : raw[i].children) edge_set.insert(Edge{i, resolve(c)});
    for (const auto& p : raw[i].parents) edge_set.insert(Edge{resolve(p), i});
  }

  std::vector<Task> task_list;
  task_list.reserve(raw.size());
  for (int i = 0; i < static_cast<int>(raw.size()); ++i)
    task_list.push_back(Task{i, names_unique ? raw[i].name : raw[i].key, raw[i].runtime});
  return Workflow::create(std::move(task_list), std::vector<Edge>(edge_set.begin(), edge_set.end()));
}

/// Canonical 1.5-layout document; runtimes are written both inline and in the execution section.
inline std::string serialize_wfcommons(const Workflow& wf, std::string_view name = "spwd-workflow") {
  using nlohmann::ordered_json;
  ordered_json spec_tasks = ordered_json::array();
  ordered_json exec_tasks = ordered_json::array();
  for (const Task& t : wf.tasks()) {
    ordered_json children = ordered_json::array();
    ordered_json parents = ordered_json::array();
    for (TaskId c : wf.successors(t.id)) children.push_back(wf.task(c).name);
    for (TaskId p : wf.predecessors(t.id)) parents.push_back(wf.task(p).name);
    ordered_json entry;
    entry["name"] = t.name;
    entry["id"] = t.name;
    entry["runtimeInSeconds"] = t.base_runtime;
    entry["children"] = std::move(children);
    entry["parents"] = std::move(parents);
    spec_tasks.push_back(std::move(entry));
    ordered_json exec;
    exec["id"] = t.name;
    exec["runtimeInSeconds"] = t.base_runtime;
    exec_tasks.push_back(std::move(exec));
  }
  ordered_json doc;
  doc["name"] = std::string(name);
  doc["schemaVersion"] = "1.5";
  doc["workflow"]["specification"]["tasks"] = std::move(spec_tasks);
  doc["workflow"]["execution"]["tasks"] = std::move(exec_tasks);
  return doc.dump(2) + "\n";
}

/// Machine pool: either a top-level array or an object with a `machines` array.
inline std::vector<Machine> parse_machines(std::string_view document) {
  using nlohmann::json;
  json root;
  try {
    root = json::parse(document.begin(), document.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::parse, e.what());
  }
  const json* list = root.is_array() ? &root : detail::find_path(root, {"machines"});
  if (list == nullptr || !list->is_array()) throw Error(ErrorKind::parse, "no machine list found");
  std::vector<Machine> machines;
  for (const auto& item : *list) {
    if (!item.is_object()) throw Error(ErrorKind::parse, "machine entry is not an object");
    Machine m;
    m.id = static_cast<MachineId>(machines.size());
    m.name = item.value("name", "Machine" + std::to_string(m.id + 1));
    auto speed = detail::number_field(item, "speed_ghz");
    auto price = detail::number_field(item, "price_per_second");
    if (!speed || !price) throw Error(ErrorKind::parse, "machine '" + m.name + "' lacks speed_ghz or price_per_second");
    m.speed = *speed;
    m.price = *price;
    m.core_count = static_cast<int>(detail::number_field(item, "core_count").value_or(1.0));
    if (!(m.speed > 0.0)) throw Error(ErrorKind::invalid_input, "machine '" + m.name + "' has non-positive speed");
    if (!(m.price >= 0.0)) throw Error(ErrorKind::invalid_input, "machine '" + m.name + "' has negative price");
    machines.push_back(std::move(m));
  }
  if (machines.empty()) throw Error(ErrorKind::invalid_input, "machine list is empty");
  return machines;
}

inline std::string serialize_machines(std::span<const Machine> machines) {
  using nlohmann::ordered_json;
  ordered_json list = ordered_json::array();
  for (const Machine& m : machines) {
    ordered_json entry;
    entry["name"] = m.name;
    entry["speed_ghz"] = m.speed;
    entry["price_per_second"] = m.price;
    entry["core_count"] = m.core_count;
    list.push_back(std::move(entry));
  }
  ordered_json doc;
  doc["machines"] = std::move(list);
  return doc.dump(2) + "\n";
}

}  // namespace spwd
