#include "lightlike/connection.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lightlike/errors.hpp"
#include "linalg.hpp"

namespace lightlike {

const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::LeviCivita: return "levi-civita";
    case Provenance::KoszulGeneral: return "koszul-general";
    case Provenance::User: return "user";
  }
  return "?";
}

// ---------------------------------------------------------------------------

TorsionField::TorsionField(TensorField f) : field(std::move(f)) {
  if (field.signature() != signatures::kConnection) throw SignatureError("torsion must be a (1,2) field");
}

TorsionField TorsionField::zero(std::size_t dimension) {
  return TorsionField(TensorField::zero(signatures::kConnection, dimension));
}

double TorsionField::asymmetry(const std::vector<ChartPoint>& points) const {
  double worst = 0.0;
  for (const auto& p : points)
    worst = std::max(worst, field.evaluate(p).asymmetry(Symmetry::AntisymmetricLastTwo));
  return worst;
}

NonMetricityField::NonMetricityField(TensorField f) : field(std::move(f)) {
  if (field.signature() != signatures::kCovariant3) throw SignatureError("non-metricity must be a (0,3) field");
}

NonMetricityField NonMetricityField::zero(std::size_t dimension) {
  return NonMetricityField(TensorField::zero(signatures::kCovariant3, dimension));
}

double NonMetricityField::asymmetry(const std::vector<ChartPoint>& points) const {
  double worst = 0.0;
  for (const auto& p : points) worst = std::max(worst, field.evaluate(p).asymmetry(Symmetry::SymmetricLastTwo));
  return worst;
}

// ---------------------------------------------------------------------------

ConnectionField::ConnectionField(std::size_t dimension, Provenance provenance, Coefficients coefficients,
                                 bool exact_partials)
    : dimension_(dimension), provenance_(provenance), coefficients_(std::move(coefficients)),
      exact_partials_(exact_partials) {
  if (!coefficients_) throw std::invalid_argument("empty connection coefficients");
}

ConnectionField ConnectionField::from_field(const TensorField& gamma) {
  if (gamma.signature() != signatures::kConnection)
    throw SignatureError("connection coefficients must form a (1,2) field");
  return ConnectionField(
      gamma.dimension(), Provenance::User, [gamma](const ChartPoint& p) { return gamma.evaluate(p); },
      gamma.is_expression_backed());
}

TensorValue ConnectionField::evaluate(const ChartPoint& p) const {
  TensorValue g = coefficients_(p);
  if (g.signature() != signatures::kConnection || g.dimension() != dimension_)
    throw SignatureError("connection coefficients have the wrong shape");
  for (double c : g.components())
    if (!std::isfinite(c)) throw ConsistencyFault("non-finite connection coefficient");
  return g;
}

// ---------------------------------------------------------------------------

namespace {

struct MetricJet {
  TensorValue metric;
  TensorValue inverse;
  std::vector<TensorValue> partials;  // partials[i](j, l) = d_i gbar_jl
};

MetricJet metric_jet(const TensorField& gbar, const ChartPoint& p) {
  if (gbar.signature() != signatures::kBilinear) throw SignatureError("metric must be a (0,2) field");
  MetricJet jet{gbar.evaluate(p), TensorValue(signatures::kBilinear, gbar.dimension()), {}};
  jet.inverse = linalg::inverse_metric(jet.metric);
  for (std::size_t i = 0; i < gbar.dimension(); ++i) jet.partials.push_back(gbar.partial(p, i));
  return jet;
}

// Raises the first index of a lowered coefficient array A_lij.
TensorValue raise_first(const TensorValue& inverse, const std::vector<double>& lowered, std::size_t n) {
  TensorValue gamma(signatures::kConnection, n);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double acc = 0.0;
        for (std::size_t l = 0; l < n; ++l) acc += inverse(k, l) * lowered[(l * n + i) * n + j];
        gamma(k, i, j) = acc;
      }
  return gamma;
}

TensorValue christoffel(const MetricJet& jet, std::size_t n) {
  std::vector<double> lowered(n * n * n, 0.0);
  for (std::size_t l = 0; l < n; ++l)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) {
        const double v = 0.5 * (jet.partials[i](j, l) + jet.partials[j](i, l) - jet.partials[l](i, j));
        lowered[(l * n + i) * n + j] = v;
        lowered[(l * n + j) * n + i] = v;
      }
  TensorValue gamma = raise_first(jet.inverse, lowered, n);
  // symmetric in the lower pair by construction; keep it bitwise so
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) gamma(k, j, i) = gamma(k, i, j);
  return gamma;
}

// Contorsion plus disformation, lowered: K_lij. With
//   R_ijl = -Q_ijl - 1/2 (T_lij + T_jil),   T_lij = gbar_lk T^k_ij,
// the lowered coefficients of the full connection are
//   A_lij = A^LC_lij + 1/2 (R_ijl + R_jil - R_lij) + 1/2 T_lij.
std::vector<double> distortion(const TensorValue& metric, const TensorValue& t, const TensorValue& q, std::size_t n) {
  std::vector<double> t_low(n * n * n, 0.0);
  for (std::size_t l = 0; l < n; ++l)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double acc = 0.0;
        for (std::size_t k = 0; k < n; ++k) acc += metric(l, k) * t(k, i, j);
        t_low[(l * n + i) * n + j] = acc;
      }
  auto tl = [&](std::size_t a, std::size_t b, std::size_t c) { return t_low[(a * n + b) * n + c]; };
  auto r = [&](std::size_t i, std::size_t j, std::size_t l) { return -q(i, j, l) - 0.5 * (tl(l, i, j) + tl(j, i, l)); };
  std::vector<double> k(n * n * n, 0.0);
  for (std::size_t l = 0; l < n; ++l)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        k[(l * n + i) * n + j] = 0.5 * (r(i, j, l) + r(j, i, l) - r(l, i, j)) + 0.5 * tl(l, i, j);
  return k;
}

TensorValue nonmetricity_from_jet(const TensorValue& gamma, const TensorValue& m, const std::vector<TensorValue>& dm,
                                  std::size_t n) {
  TensorValue out(signatures::kCovariant3, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t l = 0; l < n; ++l) {
        double acc = dm[i](j, l);
        for (std::size_t k = 0; k < n; ++k) acc -= gamma(k, i, j) * m(k, l) + gamma(k, i, l) * m(j, k);
        out(i, j, l) = acc;
      }
  return out;
}

void require_chart(const TensorField& gbar, const TorsionField& t, const NonMetricityField& q) {
  if (t.field.dimension() != gbar.dimension() || q.field.dimension() != gbar.dimension())
    throw SignatureError("metric, torsion and non-metricity live on different charts");
}

}  // namespace

TensorValue levi_civita(const TensorField& gbar, const ChartPoint& p) {
  return christoffel(metric_jet(gbar, p), gbar.dimension());
}

ConnectionField levi_civita_connection(const AugmentedMetric& gbar) {
  const TensorField metric = gbar.metric;
  return ConnectionField(
      metric.dimension(), Provenance::LeviCivita, [metric](const ChartPoint& p) { return levi_civita(metric, p); },
      metric.is_expression_backed());
}

TensorValue koszul_closed_form(const TensorField& gbar, const TorsionField& torsion, const NonMetricityField& q,
                               const ChartPoint& p) {
  require_chart(gbar, torsion, q);
  const std::size_t n = gbar.dimension();
  const MetricJet jet = metric_jet(gbar, p);
  TensorValue gamma = christoffel(jet, n);
  const TensorValue t = torsion.field.evaluate(p);
  const TensorValue qv = q.field.evaluate(p);
  if (t.max_abs() == 0.0 && qv.max_abs() == 0.0) return gamma;
  gamma += raise_first(jet.inverse, distortion(jet.metric, t, qv, n), n);
  return gamma;
}

TensorValue koszul_pointwise_solve(const TensorField& gbar, const TorsionField& torsion,
                                   const NonMetricityField& q, const ChartPoint& p) {
  require_chart(gbar, torsion, q);
  const std::size_t n = gbar.dimension();
  const TensorValue m = gbar.evaluate(p);
  const TensorValue t = torsion.field.evaluate(p);
  const TensorValue qv = q.field.evaluate(p);
  std::vector<TensorValue> dm;
  for (std::size_t i = 0; i < n; ++i) dm.push_back(gbar.partial(p, i));

  const auto dim = static_cast<Eigen::Index>(n * n * n);
  auto unknown = [n](std::size_t k, std::size_t i, std::size_t j) {
    return static_cast<Eigen::Index>((k * n + i) * n + j);
  };
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dim);
  Eigen::Index row = 0;
  // d_i m_jl - Gamma^k_ij m_kl - Gamma^k_il m_jk = Q_ijl, for j <= l
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t l = j; l < n; ++l, ++row) {
        for (std::size_t k = 0; k < n; ++k) {
          a(row, unknown(k, i, j)) += m(k, l);
          a(row, unknown(k, i, l)) += m(j, k);
        }
        rhs(row) = dm[i](j, l) - qv(i, j, l);
      }
  // Gamma^k_ij - Gamma^k_ji = T^k_ij, for i < j
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j, ++row) {
        a(row, unknown(k, i, j)) = 1.0;
        a(row, unknown(k, j, i)) = -1.0;
        rhs(row) = t(k, i, j);
      }

  const Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  if (!lu.isInvertible()) throw DegeneracyError("singular Koszul system (metric degenerate at sample)");
  const Eigen::VectorXd x = lu.solve(rhs);
  TensorValue gamma(signatures::kConnection, n);
  for (Eigen::Index u = 0; u < dim; ++u) gamma.components()[static_cast<std::size_t>(u)] = x(u);
  return gamma;
}

void check_round_trip(const TensorValue& gamma, const TensorField& gbar, const TorsionField& torsion,
                      const NonMetricityField& q, const ChartPoint& p, double tolerance) {
  const std::size_t n = gbar.dimension();
  const TensorValue t = torsion.field.evaluate(p);
  const TensorValue qv = q.field.evaluate(p);
  const TensorValue m = gbar.evaluate(p);
  std::vector<TensorValue> dm;
  double scale = 1.0 + std::max({t.max_abs(), qv.max_abs(), m.max_abs(), gamma.max_abs()});
  for (std::size_t i = 0; i < n; ++i) {
    dm.push_back(gbar.partial(p, i));
    scale = std::max(scale, 1.0 + dm.back().max_abs());
  }
  const double torsion_err = max_abs_difference(torsion_of(gamma), t);
  const double q_err = max_abs_difference(nonmetricity_from_jet(gamma, m, dm, n), qv);
  if (torsion_err > tolerance * scale || q_err > tolerance * scale) {
    std::ostringstream msg;
    msg << "connection round-trip failed: torsion error " << torsion_err << ", non-metricity error " << q_err;
    throw ConsistencyFault(msg.str());
  }
}

ConnectionField koszul_connection(const AugmentedMetric& gbar, const TorsionField& torsion,
                                  const NonMetricityField& q) {
  require_chart(gbar.metric, torsion, q);
  const TensorField metric = gbar.metric;
  const bool exact =
      metric.is_expression_backed() && torsion.field.is_expression_backed() && q.field.is_expression_backed();
  return ConnectionField(
      metric.dimension(), Provenance::KoszulGeneral,
      [metric, torsion, q](const ChartPoint& p) {
        TensorValue gamma = koszul_closed_form(metric, torsion, q, p);
        check_round_trip(gamma, metric, torsion, q, p, 1e-10);
        return gamma;
      },
      exact);
}

// ---------------------------------------------------------------------------

TensorValue covariant_derivative(const TensorValue& gamma, const TensorField& f, const ChartPoint& p) {
  const std::size_t n = f.dimension();
  if (gamma.dimension() != n || gamma.signature() != signatures::kConnection)
    throw SignatureError("connection and field live on different charts");
  const TensorValue v = f.evaluate(p);
  std::vector<TensorValue> d;
  for (std::size_t i = 0; i < n; ++i) d.push_back(f.partial(p, i));

  if (f.signature() == signatures::kVector) {
    TensorValue out({Slot::Lower, Slot::Upper}, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k) {
        double acc = d[i](k);
        for (std::size_t j = 0; j < n; ++j) acc += gamma(k, i, j) * v(j);
        out(i, k) = acc;
      }
    return out;
  }
  if (f.signature() == signatures::kCovector) {
    TensorValue out(signatures::kBilinear, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double acc = d[i](j);
        for (std::size_t k = 0; k < n; ++k) acc -= gamma(k, i, j) * v(k);
        out(i, j) = acc;
      }
    return out;
  }
  if (f.signature() == signatures::kBilinear) return nonmetricity_from_jet(gamma, v, d, n);
  throw SignatureError("covariant derivative supports ranks (1,0), (0,1) and (0,2) only");
}

TensorValue covariant_derivative(const ConnectionField& connection, const TensorField& f, const ChartPoint& p) {
  return covariant_derivative(connection.evaluate(p), f, p);
}

TensorValue torsion_of(const TensorValue& gamma) {
  if (gamma.signature() != signatures::kConnection) throw SignatureError("expected connection coefficients");
  const std::size_t n = gamma.dimension();
  TensorValue out(signatures::kConnection, n);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        const double v = gamma(k, i, j) - gamma(k, j, i);
        out(k, i, j) = v;
        out(k, j, i) = -v;
      }
  return out;
}

TensorValue torsion_of(const ConnectionField& connection, const ChartPoint& p) {
  return torsion_of(connection.evaluate(p));
}

TensorValue nonmetricity_of(const TensorValue& gamma, const TensorField& m, const ChartPoint& p) {
  if (m.signature() != signatures::kBilinear) throw SignatureError("non-metricity needs a (0,2) field");
  return covariant_derivative(gamma, m, p);
}

TensorValue nonmetricity_of(const ConnectionField& connection, const TensorField& m, const ChartPoint& p) {
  return nonmetricity_of(connection.evaluate(p), m, p);
}

}  // namespace lightlike
