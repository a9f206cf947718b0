#pragma once

// Linear connections on a chart.
//
// Coefficient convention: nabla_{d_i} d_j = Gamma^k_ij d_k, stored as a (1,2)
// tensor with components gamma(k, i, j); the derivative slot is i. From this:
//
//   torsion        T^k_ij  = Gamma^k_ij - Gamma^k_ji
//   non-metricity  Q_ijl   = (nabla_i m)_jl
//                          = d_i m_jl - Gamma^k_ij m_kl - Gamma^k_il m_jk
//
// Covariant derivatives put the derivative slot first.

#include <cstddef>
#include <functional>

#include "lightlike/degenerate.hpp"
#include "lightlike/tensor.hpp"

namespace lightlike {

enum class Provenance { LeviCivita, KoszulGeneral, User };

const char* to_string(Provenance p);

/// Torsion (1,2) field, antisymmetric in its two lower slots.
struct TorsionField {
  TensorField field;

  explicit TorsionField(TensorField f);
  static TorsionField zero(std::size_t dimension);

  /// Largest |T^k_ij + T^k_ji| over `points`.
  double asymmetry(const std::vector<ChartPoint>& points) const;
};

/// Non-metricity (0,3) field Q(Z,X,Y), symmetric in its last two slots.
struct NonMetricityField {
  TensorField field;

  explicit NonMetricityField(TensorField f);
  static NonMetricityField zero(std::size_t dimension);

  double asymmetry(const std::vector<ChartPoint>& points) const;
};

class ConnectionField {
public:
  using Coefficients = std::function<TensorValue(const ChartPoint&)>;

  ConnectionField(std::size_t dimension, Provenance provenance, Coefficients coefficients, bool exact_partials);

  /// A user-supplied connection given as a (1,2) coefficient field.
  static ConnectionField from_field(const TensorField& gamma);

  /// Gamma^k_ij at p; throws ConsistencyFault on non-finite coefficients.
  TensorValue evaluate(const ChartPoint& p) const;

  std::size_t dimension() const noexcept { return dimension_; }
  Provenance provenance() const noexcept { return provenance_; }
  bool exact_partials() const noexcept { return exact_partials_; }

private:
  std::size_t dimension_;
  Provenance provenance_;
  Coefficients coefficients_;
  bool exact_partials_;
};

/// Christoffel symbols of a non-degenerate metric:
///   Gamma^k_ij = 1/2 gbar^kl (d_i gbar_jl + d_j gbar_il - d_l gbar_ij).
TensorValue levi_civita(const TensorField& gbar, const ChartPoint& p);
ConnectionField levi_civita_connection(const AugmentedMetric& gbar);

/// Closed form of the unique connection with torsion T and non-metricity Q
/// relative to gbar: Levi-Civita plus contorsion plus disformation.
TensorValue koszul_closed_form(const TensorField& gbar, const TorsionField& torsion, const NonMetricityField& q,
                               const ChartPoint& p);

/// Same connection by solving the n^3 linear equations that define torsion
/// and non-metricity directly. Independent of the closed form.
TensorValue koszul_pointwise_solve(const TensorField& gbar, const TorsionField& torsion,
                                   const NonMetricityField& q, const ChartPoint& p);

/// Connection built from the closed form; every evaluation re-derives T and Q
/// from the coefficients and throws ConsistencyFault if they do not match.
ConnectionField koszul_connection(const AugmentedMetric& gbar, const TorsionField& torsion,
                                  const NonMetricityField& q);

/// Throws ConsistencyFault unless torsion_of(gamma) = T(p) and
/// nonmetricity_of(gamma, gbar) = Q(p) within `tolerance` (scaled by the
/// magnitude of the inputs).
void check_round_trip(const TensorValue& gamma, const TensorField& gbar, const TorsionField& torsion,
                      const NonMetricityField& q, const ChartPoint& p, double tolerance);

/// nabla f for f of rank (1,0), (0,1) or (0,2). Derivative slot first.
TensorValue covariant_derivative(const TensorValue& gamma, const TensorField& f, const ChartPoint& p);
TensorValue covariant_derivative(const ConnectionField& connection, const TensorField& f, const ChartPoint& p);

TensorValue torsion_of(const TensorValue& gamma);
TensorValue torsion_of(const ConnectionField& connection, const ChartPoint& p);

TensorValue nonmetricity_of(const TensorValue& gamma, const TensorField& m, const ChartPoint& p);
TensorValue nonmetricity_of(const ConnectionField& connection, const TensorField& m, const ChartPoint& p);

}  // namespace lightlike
