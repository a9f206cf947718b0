#include "lightlike/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "json.hpp"

namespace lightlike {

namespace {

using Json = nlohmann::ordered_json;

Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json point_json(const ChartPoint& p) {
  Json a = Json::array();
  for (double c : p.coords()) a.push_back(number(c));
  return a;
}

Json coefficients_json(const TensorValue& gamma) {
  const std::size_t n = gamma.dimension();
  Json outer = Json::array();
  for (std::size_t k = 0; k < n; ++k) {
    Json mid = Json::array();
    for (std::size_t i = 0; i < n; ++i) {
      Json inner = Json::array();
      for (std::size_t j = 0; j < n; ++j) inner.push_back(number(gamma(k, i, j)));
      mid.push_back(std::move(inner));
    }
    outer.push_back(std::move(mid));
  }
  return outer;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

std::string fmt_point(const ChartPoint& p) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < p.dimension(); ++i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", p[i]);
    os << (i ? ", " : "") << buf;
  }
  os << ")";
  return os.str();
}

}  // namespace

std::string render_machine(const CommandReport& r) {
  Json doc;
  doc["schema_version"] = kReportSchemaVersion;
  doc["command"] = r.command;
  doc["pipeline"] = r.pipeline;
  doc["manifest"] = {{"name", r.manifest_name},
                     {"digest", r.manifest_digest},
                     {"dimension", r.dimension},
                     {"nullity", r.nullity}};
  doc["seed"] = r.seed;
  doc["samples"] = r.samples;
  doc["tolerances"] = {{"exact", number(r.tolerances.exact)},
                       {"analytic", number(r.tolerances.analytic)},
                       {"finite_difference", number(r.tolerances.finite_difference)}};
  Json conditions = Json::array();
  for (const auto& c : r.conditions) {
    Json entry;
    entry["id"] = c.id;
    entry["description"] = c.description;
    entry["passed"] = c.passed;
    entry["max_residual"] = number(c.max_residual);
    entry["mean_residual"] = number(c.mean_residual);
    entry["tolerance"] = number(c.tolerance);
    entry["worst_point"] = c.worst_point ? point_json(*c.worst_point) : Json(nullptr);
    Json per = Json::array();
    for (double v : c.per_sample) per.push_back(number(v));
    entry["per_sample"] = std::move(per);
    conditions.push_back(std::move(entry));
  }
  doc["conditions"] = std::move(conditions);
  Json diagnostics = Json::object();
  for (const auto& [key, value] : r.diagnostics) diagnostics[key] = number(value);
  doc["diagnostics"] = std::move(diagnostics);
  if (r.connection) {
    Json points = Json::array();
    for (std::size_t s = 0; s < r.connection->points.size(); ++s)
      points.push_back({{"point", point_json(r.connection->points[s])},
                        {"gamma", coefficients_json(r.connection->coefficients[s])}});
    doc["connection"] = {{"provenance", r.connection->provenance}, {"points", std::move(points)}};
  } else {
    doc["connection"] = nullptr;
  }
  doc["status"] = r.status;
  doc["failed_condition"] = r.failed_condition.empty() ? Json(nullptr) : Json(r.failed_condition);
  doc["message"] = r.message;
  doc["exit_code"] = r.exit_code;
  return doc.dump(2) + "\n";
}

std::string render_text(const CommandReport& r) {
  std::ostringstream os;
  os << r.command << " " << (r.manifest_name.empty() ? "(unnamed)" : r.manifest_name) << "  [" << r.pipeline
     << "]\n";
  os << "  manifest sha256 " << r.manifest_digest << "\n";
  os << "  n=" << r.dimension << " r=" << r.nullity << " samples=" << r.samples << " seed=" << r.seed << "\n";
  for (const auto& c : r.conditions) {
    os << (c.passed ? "  PASS  " : "  FAIL  ") << c.id << "  max=" << fmt(c.max_residual)
       << " tol=" << fmt(c.tolerance);
    if (!c.passed && c.worst_point) os << "  worst at " << fmt_point(*c.worst_point);
    os << "\n";
  }
  for (const auto& [key, value] : r.diagnostics) os << "  diagnostic " << key << " = " << fmt(value) << "\n";
  if (r.connection) {
    os << "  connection (" << r.connection->provenance << "), nonzero Gamma^k_ij:\n";
    for (std::size_t s = 0; s < r.connection->points.size(); ++s) {
      const auto& g = r.connection->coefficients[s];
      const std::size_t n = g.dimension();
      os << "    at " << fmt_point(r.connection->points[s]) << ":";
      bool any = false;
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < n; ++j)
            if (g(k, i, j) != 0.0) {
              char buf[48];
              std::snprintf(buf, sizeof buf, "%.12g", g(k, i, j));
              os << "\n      Gamma^" << k << "_" << i << j << " = " << buf;
              any = true;
            }
      os << (any ? "\n" : " all zero\n");
    }
  }
  os << "status: " << r.status;
  if (!r.failed_condition.empty()) os << " (" << r.failed_condition << ")";
  os << "\n";
  if (!r.message.empty()) os << "message: " << r.message << "\n";
  os << "exit code: " << r.exit_code << "\n";
  return os.str();
}

}  // namespace lightlike
