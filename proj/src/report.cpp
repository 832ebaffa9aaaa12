#include "lieflow/report.hpp"

#include <cstdint>
#include <iomanip>
#include <regex>
#include <sstream>

namespace lieflow {

using nlohmann::json;
using nlohmann::ordered_json;

ReportBuilder::ReportBuilder(std::string command, ordered_json config) {
  root_["tool"] = kToolName;
  root_["version"] = kToolVersion;
  root_["command"] = std::move(command);
  root_["config"] = config;
  root_["config_hash"] = stable_hash(config);
  root_["checks"] = ordered_json::array();
}

void ReportBuilder::add_check(const std::string& name, bool pass, ordered_json detail) {
  ordered_json entry;
  entry["name"] = name;
  for (auto& [k, v] : detail.items()) entry[k] = v;
  entry["pass"] = pass;
  root_["checks"].push_back(std::move(entry));
  ++total_;
  if (!pass) ++failed_;
}

ordered_json ReportBuilder::finish() const {
  ordered_json out = root_;
  out["summary"] =
      ordered_json{{"total", total_}, {"passed", total_ - failed_}, {"failed", failed_},
                   {"pass", failed_ == 0}};
  return out;
}

std::string render_report(const ordered_json& report) { return report.dump(2) + "\n"; }

std::string stable_hash(const ordered_json& value) {
  std::string bytes = value.dump();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  std::ostringstream out;
  out << "fnv1a64:" << std::hex << std::setw(16) << std::setfill('0') << h;
  return out.str();
}

namespace {

bool type_matches(const std::string& t, const json& doc) {
  if (t == "object") return doc.is_object();
  if (t == "array") return doc.is_array();
  if (t == "string") return doc.is_string();
  if (t == "number") return doc.is_number();
  if (t == "integer") return doc.is_number_integer() || doc.is_number_unsigned();
  if (t == "boolean") return doc.is_boolean();
  if (t == "null") return doc.is_null();
  return false;
}

void walk(const json& schema, const json& doc, const std::string& path,
          std::vector<SchemaIssue>& issues) {
  if (!schema.is_object()) return;

  if (schema.contains("type")) {
    const json& t = schema["type"];
    bool ok = false;
    if (t.is_string()) {
      ok = type_matches(t.get<std::string>(), doc);
    } else if (t.is_array()) {
      for (const auto& alt : t)
        if (type_matches(alt.get<std::string>(), doc)) ok = true;
    }
    if (!ok) {
      issues.push_back({path, "type mismatch, expected " + t.dump()});
      return;  // further keyword checks would only cascade
    }
  }

  if (schema.contains("const") && doc != schema["const"])
    issues.push_back({path, "value must equal " + schema["const"].dump()});

  if (schema.contains("enum")) {
    bool found = false;
    for (const auto& alt : schema["enum"])
      if (doc == alt) found = true;
    if (!found) issues.push_back({path, "value not in enum " + schema["enum"].dump()});
  }

  if (schema.contains("minimum") && doc.is_number() &&
      doc.get<double>() < schema["minimum"].get<double>())
    issues.push_back({path, "value below minimum " + schema["minimum"].dump()});

  if (schema.contains("pattern") && doc.is_string()) {
    std::regex re(schema["pattern"].get<std::string>());
    if (!std::regex_search(doc.get<std::string>(), re))
      issues.push_back({path, "string does not match pattern " + schema["pattern"].dump()});
  }

  if (doc.is_object()) {
    if (schema.contains("required"))
      for (const auto& key : schema["required"])
        if (!doc.contains(key.get<std::string>()))
          issues.push_back({path, "missing required property \"" + key.get<std::string>() + "\""});
    const json* props = schema.contains("properties") ? &schema["properties"] : nullptr;
    if (props)
      for (auto& [key, sub] : props->items())
        if (doc.contains(key)) walk(sub, doc[key], path + "/" + key, issues);
    if (schema.contains("additionalProperties") && schema["additionalProperties"].is_boolean() &&
        !schema["additionalProperties"].get<bool>())
      for (auto& [key, val] : doc.items())
        if (!props || !props->contains(key))
          issues.push_back({path, "unexpected property \"" + key + "\""});
  }

  if (doc.is_array()) {
    if (schema.contains("minItems") &&
        doc.size() < schema["minItems"].get<std::size_t>())
      issues.push_back({path, "array shorter than minItems"});
    if (schema.contains("items") && schema["items"].is_object()) {
      for (std::size_t i = 0; i < doc.size(); ++i)
        walk(schema["items"], doc[i], path + "/" + std::to_string(i), issues);
    }
  }
}

}  // namespace

std::vector<SchemaIssue> schema_validate(const json& schema, const json& doc) {
  std::vector<SchemaIssue> issues;
  walk(schema, doc, "", issues);
  return issues;
}

}  // namespace lieflow
