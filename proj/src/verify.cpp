#include "lightlike/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <utility>

#include "lightlike/errors.hpp"
#include "linalg.hpp"

namespace lightlike {

namespace {

bool exact(const DegenerateMetricBundle& b, const TorsionField* t = nullptr, const NonMetricityField* q = nullptr) {
  return b.exact_partials() && (!t || t->field.is_expression_backed()) && (!q || q->field.is_expression_backed());
}

}  // namespace

ConditionReport check_eq1(const DegenerateMetricBundle& b, const TorsionField& t, const VerificationConfig& cfg) {
  const auto samples = cfg.samples(b.box());
  const std::size_t n = b.dimension();
  return sample_condition("eq1", "(d tau_i)(X,Y) = tau_i(T(X,Y))", samples, cfg.tier(exact(b, &t)),
                          [&](const ChartPoint& p) {
                            const TensorValue tv = t.field.evaluate(p);
                            double worst = 0.0;
                            for (const auto& tau_field : b.coframe()) {
                              const TensorValue dtau = exterior_derivative_1form(tau_field, p);
                              const TensorValue tau = tau_field.evaluate(p);
                              for (std::size_t j = 0; j < n; ++j)
                                for (std::size_t k = 0; k < n; ++k) {
                                  double rhs = 0.0;
                                  for (std::size_t m = 0; m < n; ++m) rhs += tau(m) * tv(m, j, k);
                                  worst = std::max(worst, std::fabs(dtau(j, k) - rhs));
                                }
                            }
                            return worst;
                          });
}

ConditionReport check_eq2(const DegenerateMetricBundle& b, const TorsionField& t, const NonMetricityField& q,
                          const VerificationConfig& cfg) {
  const auto samples = cfg.samples(b.box());
  const std::size_t n = b.dimension();
  return sample_condition(
      "eq2", "(L_xi g)(X,Y) = g(X,T(xi,Y)) + g(Y,T(xi,X)) + Q(xi,X,Y) - Q(X,Y,xi) - Q(Y,X,xi)", samples,
      cfg.tier(exact(b, &t, &q)), [&](const ChartPoint& p) {
        const TensorValue g = b.metric().evaluate(p);
        const TensorValue tv = t.field.evaluate(p);
        const TensorValue qv = q.field.evaluate(p);
        double worst = 0.0;
        for (const auto& xi_field : b.radical_frame()) {
          const TensorValue lie = lie_derivative_metric(xi_field, b.metric(), p);
          const TensorValue xi = xi_field.evaluate(p);
          // T(xi, e_k)^m and the Q contractions with xi
          TensorValue t_xi({Slot::Upper, Slot::Lower}, n);
          TensorValue q_first(signatures::kBilinear, n), q_last(signatures::kBilinear, n);
          for (std::size_t a = 0; a < n; ++a)
            for (std::size_t x = 0; x < n; ++x)
              for (std::size_t y = 0; y < n; ++y) {
                t_xi(x, y) += xi(a) * tv(x, a, y);
                q_first(x, y) += xi(a) * qv(a, x, y);
                q_last(x, y) += qv(x, y, a) * xi(a);
              }
          for (std::size_t x = 0; x < n; ++x)
            for (std::size_t y = 0; y < n; ++y) {
              double rhs = q_first(x, y) - q_last(x, y) - q_last(y, x);
              for (std::size_t m = 0; m < n; ++m) rhs += g(x, m) * t_xi(m, y) + g(y, m) * t_xi(m, x);
              worst = std::max(worst, std::fabs(lie(x, y) - rhs));
            }
        }
        return worst;
      });
}

ConditionReport check_killing(const DegenerateMetricBundle& b, const VerificationConfig& cfg) {
  const auto samples = cfg.samples(b.box());
  return sample_condition("killing", "L_xi_i g = 0 for each frame field of the radical", samples, cfg.tier(exact(b)),
                          [&](const ChartPoint& p) {
                            double worst = 0.0;
                            for (const auto& xi : b.radical_frame())
                              worst = std::max(worst, lie_derivative_metric(xi, b.metric(), p).max_abs());
                            return worst;
                          });
}

ConditionReport check_closed_coframe(const DegenerateMetricBundle& b, const VerificationConfig& cfg) {
  const auto samples = cfg.samples(b.box());
  return sample_condition("closed-coframe", "d tau_i = 0", samples, cfg.tier(exact(b)), [&](const ChartPoint& p) {
    double worst = 0.0;
    for (const auto& tau : b.coframe()) worst = std::max(worst, exterior_derivative_1form(tau, p).max_abs());
    return worst;
  });
}

ConditionReport check_parallel_coframe(const ConnectionField& gamma, const DegenerateMetricBundle& b,
                                       const VerificationConfig& cfg) {
  const auto samples = cfg.samples(b.box());
  return sample_condition("parallel-coframe", "nabla tau_i = 0", samples,
                          cfg.tier(exact(b) && gamma.exact_partials()), [&](const ChartPoint& p) {
                            const TensorValue coeffs = gamma.evaluate(p);
                            double worst = 0.0;
                            for (const auto& tau : b.coframe())
                              worst = std::max(worst, covariant_derivative(coeffs, tau, p).max_abs());
                            return worst;
                          });
}

ConditionReport check_nonmetricity_condition(const ConnectionField& gamma, const DegenerateMetricBundle& b,
                                             const NonMetricityField& q, const VerificationConfig& cfg) {
  const auto samples = cfg.samples(b.box());
  return sample_condition("nonmetricity", "(nabla_Z g)(X,Y) = Q(Z,X,Y)", samples,
                          cfg.tier(exact(b, nullptr, &q) && gamma.exact_partials()), [&](const ChartPoint& p) {
                            return max_abs_difference(nonmetricity_of(gamma, b.metric(), p), q.field.evaluate(p));
                          });
}

ConditionReport check_parallel_radical_frame(const ConnectionField& gamma, const DegenerateMetricBundle& b,
                                             const VerificationConfig& cfg) {
  const auto samples = cfg.samples(b.box());
  return sample_condition("parallel-radical-frame", "nabla xi_i = 0", samples,
                          cfg.tier(exact(b) && gamma.exact_partials()), [&](const ChartPoint& p) {
                            const TensorValue coeffs = gamma.evaluate(p);
                            double worst = 0.0;
                            for (const auto& xi : b.radical_frame())
                              worst = std::max(worst, covariant_derivative(coeffs, xi, p).max_abs());
                            return worst;
                          });
}

ConditionReport check_augmented_killing(const DegenerateMetricBundle& b, const AugmentedMetric& gbar,
                                        const VerificationConfig& cfg) {
  const auto samples = cfg.samples(b.box());
  return sample_condition("augmented-killing", "L_xi_i gbar = 0", samples,
                          cfg.tier(exact(b) && gbar.metric.is_expression_backed()), [&](const ChartPoint& p) {
                            double worst = 0.0;
                            for (const auto& xi : b.radical_frame())
                              worst = std::max(worst, lie_derivative_metric(xi, gbar.metric, p).max_abs());
                            return worst;
                          });
}

ConditionReport check_torsion_free(const ConnectionField& gamma, const DegenerateMetricBundle& b,
                                   const VerificationConfig& cfg) {
  const auto samples = cfg.samples(b.box());
  return sample_condition("torsion-free", "T = 0", samples, cfg.tolerances.exact,
                          [&](const ChartPoint& p) { return torsion_of(gamma, p).max_abs(); });
}

ConditionReport check_uniqueness(const DegenerateMetricBundle& b, const AugmentedMetric& gbar, const TorsionField& t,
                                 const NonMetricityField& q, const VerificationConfig& cfg) {
  const auto samples = cfg.samples(b.box());
  return sample_condition("uniqueness", "closed-form construction equals the pointwise Koszul solve", samples,
                          kUniquenessTolerance, [&](const ChartPoint& p) {
                            return max_abs_difference(koszul_closed_form(gbar.metric, t, q, p),
                                                      koszul_pointwise_solve(gbar.metric, t, q, p));
                          });
}

ConditionReport check_levi_civita_match(const ConnectionField& gamma, const DegenerateMetricBundle& b,
                                        const AugmentedMetric& gbar, const VerificationConfig& cfg) {
  const auto samples = cfg.samples(b.box());
  return sample_condition("levi-civita-match", "connection equals the Levi-Civita connection of gbar", samples,
                          cfg.tier(exact(b) && gamma.exact_partials()), [&](const ChartPoint& p) {
                            return max_abs_difference(gamma.evaluate(p), levi_civita(gbar.metric, p));
                          });
}

// ---------------------------------------------------------------------------

const char* to_string(PipelineStatus s) {
  switch (s) {
    case PipelineStatus::Passed: return "passed";
    case PipelineStatus::HypothesisFailed: return "hypothesis-failed";
    case PipelineStatus::ConclusionFailed: return "conclusion-failed";
    case PipelineStatus::ConsistencyFault: return "consistency-fault";
  }
  return "?";
}

const ConditionReport* PipelineReport::find(const std::string& id) const {
  for (const auto& c : conditions)
    if (c.id == id) return &c;
  return nullptr;
}

namespace {

// Appends a condition; on failure records `status` and returns false.
bool record(PipelineReport& report, ConditionReport condition, PipelineStatus status_on_failure) {
  const bool ok = condition.passed;
  if (!ok) {
    report.status = status_on_failure;
    report.failed_condition = condition.id;
    report.message = "condition '" + condition.id + "' failed: " + condition.description;
  }
  report.conditions.push_back(std::move(condition));
  return ok;
}

bool record_bundle(PipelineReport& report, const DegenerateMetricBundle& b, const VerificationConfig& cfg) {
  for (auto& c : validate_bundle(b, cfg).conditions) {
    c.id = "bundle:" + c.id;
    if (!record(report, std::move(c), PipelineStatus::HypothesisFailed)) return false;
  }
  return true;
}

// gbar non-degenerate at every sample, recorded as a 0/1 indicator condition.
std::optional<AugmentedMetric> record_augmented(PipelineReport& report, const DegenerateMetricBundle& b,
                                                const VerificationConfig& cfg) {
  const auto samples = cfg.samples(b.box());
  AugmentedMetric gbar{augmented_metric_field(b)};
  double smallest = INFINITY;
  std::vector<double> eig(samples.size());
  parallel_for(samples.size(),
               [&](std::size_t s) { eig[s] = linalg::min_abs_eigenvalue(gbar.metric.evaluate(samples[s])); });
  std::vector<double> indicator;
  for (double e : eig) {
    smallest = std::min(smallest, e);
    indicator.push_back(e > linalg::kDegeneracyTolerance ? 0.0 : 1.0);
  }
  report.diagnostics["augmented-min-abs-eigenvalue"] = smallest;
  auto c = make_report("augmented-nondegenerate", "gbar = g + sum tau_k (x) tau_k non-degenerate (indicator)",
                       std::move(indicator), samples, 0.0);
  if (!record(report, std::move(c), PipelineStatus::HypothesisFailed)) return std::nullopt;
  return gbar;
}

ConditionReport round_trip_condition(const ConnectionField& gamma, const DegenerateMetricBundle& b,
                                     const AugmentedMetric& gbar, const TorsionField& t, const NonMetricityField& q,
                                     const VerificationConfig& cfg) {
  const auto samples = cfg.samples(b.box());
  return sample_condition("construction-round-trip", "torsion and non-metricity of the construction match T and Q",
                          samples, cfg.tier(exact(b, &t, &q)), [&](const ChartPoint& p) {
                            const TensorValue coeffs = gamma.evaluate(p);
                            return std::max(max_abs_difference(torsion_of(coeffs), t.field.evaluate(p)),
                                            max_abs_difference(nonmetricity_of(coeffs, gbar.metric, p),
                                                               q.field.evaluate(p)));
                          });
}

bool is_identically_zero(const TensorField& f, const std::vector<ChartPoint>& samples) {
  if (f.is_expression_backed()) {
    const auto& e = *f.expressions();
    return std::all_of(e.begin(), e.end(), [](const auto& c) { return c.is_zero(); });
  }
  return std::all_of(samples.begin(), samples.end(), [&](const auto& p) { return f.evaluate(p).max_abs() == 0.0; });
}

}  // namespace

PipelineReport run_theorem_ii(const DegenerateMetricBundle& b, const TorsionField& t, const NonMetricityField& q,
                              const VerificationConfig& cfg) {
  PipelineReport report;
  report.pipeline = "theorem-ii";
  const auto samples = cfg.samples(b.box());

  if (!record_bundle(report, b, cfg)) return report;
  if (!record(report,
              make_report("torsion-antisymmetry", "T^k_ij = -T^k_ji",
                          [&] {
                            std::vector<double> v;
                            for (const auto& p : samples)
                              v.push_back(t.field.evaluate(p).asymmetry(Symmetry::AntisymmetricLastTwo));
                            return v;
                          }(),
                          samples, cfg.tolerances.exact),
              PipelineStatus::HypothesisFailed))
    return report;
  if (!record(report,
              make_report("nonmetricity-symmetry", "Q(Z,X,Y) = Q(Z,Y,X)",
                          [&] {
                            std::vector<double> v;
                            for (const auto& p : samples)
                              v.push_back(q.field.evaluate(p).asymmetry(Symmetry::SymmetricLastTwo));
                            return v;
                          }(),
                          samples, cfg.tolerances.exact),
              PipelineStatus::HypothesisFailed))
    return report;
  if (!record(report, check_eq1(b, t, cfg), PipelineStatus::HypothesisFailed)) return report;
  if (!record(report, check_eq2(b, t, q, cfg), PipelineStatus::HypothesisFailed)) {
    if (is_identically_zero(t.field, samples) && is_identically_zero(q.field, samples)) {
      try {
        const auto probe = contrapositive_probe(b, cfg);
        report.diagnostics["contrapositive-parallel-coframe"] = probe.parallel_residual;
        report.diagnostics["contrapositive-kappa"] = probe.kappa;
      } catch (const DegeneracyError&) {
        // no Levi-Civita connection to probe
      }
    }
    return report;
  }

  const auto gbar = record_augmented(report, b, cfg);
  if (!gbar) return report;

  const ConnectionField gamma = koszul_connection(*gbar, t, q);
  try {
    if (!record(report, round_trip_condition(gamma, b, *gbar, t, q, cfg), PipelineStatus::ConsistencyFault))
      return report;
    if (!record(report, check_parallel_coframe(gamma, b, cfg), PipelineStatus::ConclusionFailed)) return report;
    if (!record(report, check_nonmetricity_condition(gamma, b, q, cfg), PipelineStatus::ConclusionFailed))
      return report;
    if (!record(report, check_uniqueness(b, *gbar, t, q, cfg), PipelineStatus::ConsistencyFault)) return report;
  } catch (const ConsistencyFault& e) {
    report.status = PipelineStatus::ConsistencyFault;
    report.failed_condition = "construction-round-trip";
    report.message = e.what();
    return report;
  }
  report.connection = gamma;
  return report;
}

PipelineReport run_proposition1(const DegenerateMetricBundle& b, Direction direction, const VerificationConfig& cfg,
                                const std::optional<ConnectionField>& user) {
  PipelineReport report;
  report.pipeline = direction == Direction::Forward ? "proposition1-forward" : "proposition1-reverse";
  const auto samples = cfg.samples(b.box());

  if (!record(report,
              make_report("nullity-one", "declared nullity degree is 1 (|r - 1|)",
                          std::vector<double>(samples.size(), std::fabs(static_cast<double>(b.nullity()) - 1.0)),
                          samples, 0.0),
              PipelineStatus::HypothesisFailed))
    return report;
  if (!record_bundle(report, b, cfg)) return report;

  const auto zero_q = NonMetricityField::zero(b.dimension());

  if (direction == Direction::Forward) {
    if (!record(report, check_closed_coframe(b, cfg), PipelineStatus::HypothesisFailed)) return report;
    if (!record(report, check_killing(b, cfg), PipelineStatus::HypothesisFailed)) return report;
    const auto gbar = record_augmented(report, b, cfg);
    if (!gbar) return report;
    const ConnectionField gamma = levi_civita_connection(*gbar);
    if (!record(report, check_nonmetricity_condition(gamma, b, zero_q, cfg), PipelineStatus::ConclusionFailed))
      return report;
    if (!record(report, check_parallel_coframe(gamma, b, cfg), PipelineStatus::ConclusionFailed)) return report;
    if (!record(report, check_parallel_radical_frame(gamma, b, cfg), PipelineStatus::ConclusionFailed))
      return report;
    if (!record(report, check_augmented_killing(b, *gbar, cfg), PipelineStatus::ConclusionFailed)) return report;
    report.connection = gamma;
    return report;
  }

  const auto gbar = record_augmented(report, b, cfg);
  if (!gbar) return report;
  const ConnectionField gamma = user ? *user : levi_civita_connection(*gbar);
  if (!record(report, check_torsion_free(gamma, b, cfg), PipelineStatus::HypothesisFailed)) return report;
  if (!record(report, check_nonmetricity_condition(gamma, b, zero_q, cfg), PipelineStatus::HypothesisFailed))
    return report;
  if (!record(report, check_parallel_coframe(gamma, b, cfg), PipelineStatus::HypothesisFailed)) return report;
  if (!record(report, check_closed_coframe(b, cfg), PipelineStatus::ConclusionFailed)) return report;
  if (!record(report, check_killing(b, cfg), PipelineStatus::ConclusionFailed)) return report;
  if (!record(report, check_levi_civita_match(gamma, b, *gbar, cfg), PipelineStatus::ConclusionFailed))
    return report;
  report.connection = gamma;
  return report;
}

ContrapositiveProbe contrapositive_probe(const DegenerateMetricBundle& b, const VerificationConfig& cfg) {
  const std::size_t n = b.dimension();
  ContrapositiveProbe probe;
  probe.eq2_residual = check_eq2(b, TorsionField::zero(n), NonMetricityField::zero(n), cfg).max_residual;
  const AugmentedMetric gbar = build_augmented_metric(b, cfg.samples(b.box()));
  probe.parallel_residual = check_parallel_coframe(levi_civita_connection(gbar), b, cfg).max_residual;
  probe.kappa = probe.parallel_residual > 0.0 ? probe.eq2_residual / probe.parallel_residual : INFINITY;
  return probe;
}

}  // namespace lightlike
