#include "lightlike/condition.hpp"

#include <cmath>
#include <stdexcept>

namespace lightlike {

void VerificationConfig::validate() const {
  if (sample_count < 1) throw std::invalid_argument("sample_count must be at least 1");
  const auto& t = tolerances;
  if (!(t.exact > 0.0 && t.analytic > 0.0 && t.finite_difference > 0.0))
    throw std::invalid_argument("tolerances must be positive");
  if (!(t.exact < t.analytic && t.analytic < t.finite_difference))
    throw std::invalid_argument("tolerances must be ordered exact < analytic < finite-difference");
}

std::vector<ChartPoint> VerificationConfig::samples(const DomainBox& fallback) const {
  validate();
  return sample_cloud(box ? *box : fallback, sample_count, seed);
}

ConditionReport make_report(std::string id, std::string description, std::vector<double> per_sample,
                            const std::vector<ChartPoint>& samples, double tolerance) {
  ConditionReport r;
  r.id = std::move(id);
  r.description = std::move(description);
  r.tolerance = tolerance;
  double sum = 0.0;
  std::size_t worst = 0;
  for (double& v : per_sample) {
    if (std::isnan(v)) v = INFINITY;
  }
  for (std::size_t s = 0; s < per_sample.size(); ++s) {
    sum += per_sample[s];
    if (per_sample[s] > r.max_residual) {
      r.max_residual = per_sample[s];
      worst = s;
    }
  }
  if (!per_sample.empty()) {
    r.mean_residual = sum / static_cast<double>(per_sample.size());
    r.worst_point = samples.at(worst);
  }
  r.passed = r.max_residual <= tolerance;
  r.per_sample = std::move(per_sample);
  return r;
}

}  // namespace lightlike
