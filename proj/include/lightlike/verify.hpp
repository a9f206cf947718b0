#pragma once

// Named, sampled checks of the compatibility conditions between a light-like
// bundle (g, xi_i, tau_i), a torsion T, a non-metricity Q and a connection,
// and the pipelines that chain them.
//
// Condition ids used in reports:
//   eq1          (d tau_i)(X,Y) = tau_i(T(X,Y))
//   eq2          (L_xi_i g)(X,Y) = g(X,T(xi_i,Y)) + g(Y,T(xi_i,X))
//                                  + Q(xi_i,X,Y) - Q(X,Y,xi_i) - Q(Y,X,xi_i)
//   killing      L_xi_i g = 0
//   closed-coframe, parallel-coframe, nonmetricity, parallel-radical-frame,
//   augmented-killing, torsion-free, uniqueness, levi-civita-match, ...

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lightlike/condition.hpp"
#include "lightlike/connection.hpp"
#include "lightlike/degenerate.hpp"

namespace lightlike {

/// Agreement required between the closed-form and linear-solve constructions.
inline constexpr double kUniquenessTolerance = 1e-9;

ConditionReport check_eq1(const DegenerateMetricBundle& b, const TorsionField& t, const VerificationConfig& cfg);
ConditionReport check_eq2(const DegenerateMetricBundle& b, const TorsionField& t, const NonMetricityField& q,
                          const VerificationConfig& cfg);
ConditionReport check_killing(const DegenerateMetricBundle& b, const VerificationConfig& cfg);
ConditionReport check_closed_coframe(const DegenerateMetricBundle& b, const VerificationConfig& cfg);
ConditionReport check_parallel_coframe(const ConnectionField& gamma, const DegenerateMetricBundle& b,
                                       const VerificationConfig& cfg);

/// max |nabla g - Q|; with Q = 0 this is compatibility with g.
ConditionReport check_nonmetricity_condition(const ConnectionField& gamma, const DegenerateMetricBundle& b,
                                             const NonMetricityField& q, const VerificationConfig& cfg);

/// max |nabla xi_i|.
ConditionReport check_parallel_radical_frame(const ConnectionField& gamma, const DegenerateMetricBundle& b,
                                             const VerificationConfig& cfg);

/// max |L_xi_i gbar|.
ConditionReport check_augmented_killing(const DegenerateMetricBundle& b, const AugmentedMetric& gbar,
                                        const VerificationConfig& cfg);

/// max |T^k_ij| of the connection, at the exact tier.
ConditionReport check_torsion_free(const ConnectionField& gamma, const DegenerateMetricBundle& b,
                                   const VerificationConfig& cfg);

/// Closed-form construction against the pointwise linear solve.
ConditionReport check_uniqueness(const DegenerateMetricBundle& b, const AugmentedMetric& gbar, const TorsionField& t,
                                 const NonMetricityField& q, const VerificationConfig& cfg);

/// Compares a connection against the Levi-Civita connection of gbar.
ConditionReport check_levi_civita_match(const ConnectionField& gamma, const DegenerateMetricBundle& b,
                                        const AugmentedMetric& gbar, const VerificationConfig& cfg);

enum class PipelineStatus { Passed, HypothesisFailed, ConclusionFailed, ConsistencyFault };

const char* to_string(PipelineStatus s);

struct PipelineReport {
  std::string pipeline;
  std::vector<ConditionReport> conditions;
  PipelineStatus status = PipelineStatus::Passed;
  std::string failed_condition;
  std::string message;
  std::map<std::string, double> diagnostics;
  std::optional<ConnectionField> connection;

  bool passed() const noexcept { return status == PipelineStatus::Passed; }
  const ConditionReport* find(const std::string& id) const;
};

/// Checks the hypotheses (bundle, eq1, eq2), builds the connection with
/// torsion T and non-metricity Q relative to gbar, then certifies that tau_i
/// are parallel, that nabla g = Q and that both constructions agree. Stops at
/// the first failing condition.
PipelineReport run_theorem_ii(const DegenerateMetricBundle& b, const TorsionField& t, const NonMetricityField& q,
                              const VerificationConfig& cfg);

enum class Direction { Forward, Reverse };

/// Nullity-one round trip. Forward: d tau = 0 and L_xi g = 0 imply that the
/// Levi-Civita connection of gbar has nabla g = 0, nabla tau = 0, nabla xi = 0
/// and L_xi gbar = 0. Reverse: a torsion-free connection with nabla g = 0 and
/// nabla tau = 0 forces d tau = 0, L_xi g = 0 and equals Levi-Civita of gbar.
/// Reverse uses `user` when given, else the Levi-Civita connection of gbar.
PipelineReport run_proposition1(const DegenerateMetricBundle& b, Direction direction, const VerificationConfig& cfg,
                                const std::optional<ConnectionField>& user = std::nullopt);

/// eq2 violation against the resulting parallel-coframe residual of the
/// Levi-Civita connection of gbar (T = Q = 0). kappa = eq2 / parallel.
struct ContrapositiveProbe {
  double eq2_residual = 0.0;
  double parallel_residual = 0.0;
  double kappa = 0.0;
};
ContrapositiveProbe contrapositive_probe(const DegenerateMetricBundle& b, const VerificationConfig& cfg);

}  // namespace lightlike
