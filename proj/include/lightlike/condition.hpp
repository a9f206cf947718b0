#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lightlike/tensor.hpp"

namespace lightlike {

/// Residual tolerance tiers. Must satisfy exact < analytic < finite_difference.
struct Tolerances {
  double exact = 1e-12;
  double analytic = 1e-8;
  double finite_difference = 1e-4;
};

struct VerificationConfig {
  std::size_t sample_count = 200;
  std::uint64_t seed = 0;
  Tolerances tolerances;
  /// Overrides the bundle's domain box when set.
  std::optional<DomainBox> box;

  /// Throws std::invalid_argument on a malformed config.
  void validate() const;

  /// Tolerance for a residual built from exact (symbolic) or finite-difference
  /// partials.
  double tier(bool exact_partials) const {
    return exact_partials ? tolerances.analytic : tolerances.finite_difference;
  }

  std::vector<ChartPoint> samples(const DomainBox& fallback) const;
};

/// Sampled max-norm residual of one named condition.
struct ConditionReport {
  std::string id;
  std::string description;
  std::vector<double> per_sample;  // max residual at each sample point
  double max_residual = 0.0;
  double mean_residual = 0.0;
  double tolerance = 0.0;
  bool passed = true;
  std::optional<ChartPoint> worst_point;
};

/// Aggregates per-sample residuals in sample order; passed <=> max <= tolerance.
ConditionReport make_report(std::string id, std::string description, std::vector<double> per_sample,
                            const std::vector<ChartPoint>& samples, double tolerance);

/// Evaluates `residual` at every sample (possibly concurrently) and aggregates.
template <class F>
ConditionReport sample_condition(std::string id, std::string description, const std::vector<ChartPoint>& samples,
                                 double tolerance, F&& residual) {
  std::vector<double> values(samples.size(), 0.0);
  parallel_for(samples.size(), [&](std::size_t s) { values[s] = residual(samples[s]); });
  return make_report(std::move(id), std::move(description), std::move(values), samples, tolerance);
}

}  // namespace lightlike
