#pragma once

// Command reports in two renderings: a deterministic JSON document
// (docs/report.schema.json) and a plain-text summary.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lightlike/condition.hpp"

namespace lightlike {

inline constexpr int kReportSchemaVersion = 1;

/// Connection coefficients Gamma^k_ij at chosen points.
struct ConnectionDump {
  std::string provenance;
  std::vector<ChartPoint> points;
  std::vector<TensorValue> coefficients;  // one (1,2) value per point
};

struct CommandReport {
  std::string command;
  std::string pipeline;
  std::string manifest_name;
  std::string manifest_digest;
  std::size_t dimension = 0;
  std::size_t nullity = 0;
  std::uint64_t seed = 0;
  std::size_t samples = 0;
  Tolerances tolerances;
  std::vector<ConditionReport> conditions;
  std::string status;
  std::string failed_condition;
  std::string message;
  std::map<std::string, double> diagnostics;
  std::optional<ConnectionDump> connection;
  int exit_code = 0;
};

/// Single JSON document; non-finite numbers render as null. Byte-identical for
/// identical reports.
std::string render_machine(const CommandReport& report);

std::string render_text(const CommandReport& report);

}  // namespace lightlike
