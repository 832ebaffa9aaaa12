#pragma once
#include <json.hpp>
#include <string>
#include <vector>

namespace lieflow {

inline constexpr const char* kToolName = "lieflow";
inline constexpr const char* kToolVersion = "0.1.0";

/// Accumulates named checks into a JSON report.  Everything written here must
/// be a pure function of (config, seed): no timestamps, hostnames, or
/// runtimes, so identical runs produce byte-identical files.
class ReportBuilder {
 public:
  ReportBuilder(std::string command, nlohmann::ordered_json config);

  void add_check(const std::string& name, bool pass,
                 nlohmann::ordered_json detail = nlohmann::ordered_json::object());

  bool all_passed() const { return failed_ == 0; }
  int total() const { return total_; }
  int failed() const { return failed_; }

  /// Report with the summary block appended.
  nlohmann::ordered_json finish() const;

 private:
  nlohmann::ordered_json root_;
  int total_ = 0;
  int failed_ = 0;
};

/// Canonical serialized form (two-space indent, trailing newline).
std::string render_report(const nlohmann::ordered_json& report);

/// FNV-1a hash of the canonical serialization, hex encoded.  Used to tag a
/// report with the configuration it came from.
std::string stable_hash(const nlohmann::ordered_json& value);

/// One violation found by schema validation.
struct SchemaIssue {
  std::string path;
  std::string message;
};

/// Validates a document against the subset of JSON Schema draft-07 that the
/// shipped report schema uses: type, properties, required, items, enum,
/// const, minimum, pattern, and boolean additionalProperties.
std::vector<SchemaIssue> schema_validate(const nlohmann::json& schema, const nlohmann::json& doc);

}  // namespace lieflow
