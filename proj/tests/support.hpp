#pragma once

// Fixture builders and independent oracles shared by the unit tests and the
// acceptance suite.

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "lightlike/connection.hpp"
#include "lightlike/degenerate.hpp"
#include "lightlike/expr.hpp"
#include "lightlike/tensor.hpp"

namespace lightlike::testing {

inline expr::Expression ex(const std::string& source, std::size_t n, const expr::ParameterMap& params = {}) {
  return expr::parse_expression(source, n, params);
}

inline TensorField field(const Signature& sig, std::size_t n, const std::vector<std::string>& comps,
                         const expr::ParameterMap& params = {}) {
  std::vector<expr::Expression> e;
  for (const auto& c : comps) e.push_back(ex(c, n, params));
  return TensorField::from_expressions(sig, n, std::move(e));
}

inline TensorField vector_field(std::size_t n, const std::vector<std::string>& comps) {
  return field(signatures::kVector, n, comps);
}
inline TensorField covector_field(std::size_t n, const std::vector<std::string>& comps) {
  return field(signatures::kCovector, n, comps);
}
inline TensorField matrix_field(std::size_t n, const std::vector<std::string>& comps) {
  return field(signatures::kBilinear, n, comps);
}

/// Diagonal (0,2) field from diagonal entry sources.
inline TensorField diagonal_field(const std::vector<std::string>& diag) {
  const std::size_t n = diag.size();
  std::vector<std::string> comps(n * n, "0");
  for (std::size_t a = 0; a < n; ++a) comps[a * n + a] = diag[a];
  return matrix_field(n, comps);
}

using Sparse3 = std::map<std::array<std::size_t, 3>, std::string>;

/// Rank-3 expression field from sparse entries keyed by storage index.
inline TensorField rank3_field(const Signature& sig, std::size_t n, const Sparse3& entries,
                               const expr::ParameterMap& params = {}) {
  std::vector<std::string> comps(n * n * n, "0");
  for (const auto& [idx, src] : entries) comps[(idx[0] * n + idx[1]) * n + idx[2]] = src;
  return field(sig, n, comps, params);
}

inline TorsionField torsion(std::size_t n, const Sparse3& entries, const expr::ParameterMap& params = {}) {
  return TorsionField(rank3_field(signatures::kConnection, n, entries, params));
}
inline NonMetricityField nonmetricity(std::size_t n, const Sparse3& entries, const expr::ParameterMap& params = {}) {
  return NonMetricityField(rank3_field(signatures::kCovariant3, n, entries, params));
}

/// Nullity-one bundle with xi = d/dx0 on [-1,1]^n.
inline DegenerateMetricBundle null_x0_bundle(const TensorField& g, const std::vector<std::string>& tau) {
  const std::size_t n = g.dimension();
  std::vector<std::string> xi(n, "0");
  xi[0] = "1";
  return DegenerateMetricBundle(g, 1, 0, {vector_field(n, xi)}, {covector_field(n, tau)}, DomainBox::cube(n, -1, 1));
}

// Fixtures by name.
inline DegenerateMetricBundle flat3() { return null_x0_bundle(diagonal_field({"0", "1", "1"}), {"1", "0", "0"}); }

inline DegenerateMetricBundle ppwavelike() {
  return null_x0_bundle(diagonal_field({"0", "1 + x1^2", "1"}), {"1", "0", "0"});
}

inline DegenerateMetricBundle nonkilling() {
  return null_x0_bundle(diagonal_field({"0", "1 + x0^2", "1"}), {"1", "0", "0"});
}

inline DegenerateMetricBundle twisted() { return null_x0_bundle(diagonal_field({"0", "1", "1"}), {"1", "0", "x1"}); }

inline DegenerateMetricBundle flat4r2() {
  const std::size_t n = 4;
  return DegenerateMetricBundle(diagonal_field({"0", "0", "1", "1"}), 2, 0,
                                {vector_field(n, {"1", "0", "0", "0"}), vector_field(n, {"0", "1", "0", "0"})},
                                {covector_field(n, {"1", "0", "0", "0"}), covector_field(n, {"0", "1", "0", "0"})},
                                DomainBox::cube(n, -1, 1));
}

/// Rotational constant torsion compatible with eq1 and eq2 on flat3.
inline TorsionField rotational_torsion(double c) {
  const expr::ParameterMap p{{"c", c}};
  return torsion(3, {{{1, 0, 2}, "c"}, {{1, 2, 0}, "-c"}, {{2, 0, 1}, "-c"}, {{2, 1, 0}, "c"}}, p);
}

/// T^0_12 = 1 = -T^0_21, balancing d(dx0 + x1 dx2).
inline TorsionField twisted_torsion() { return torsion(3, {{{0, 1, 2}, "1"}, {{0, 2, 1}, "-1"}}); }

/// Spatial constant non-metricity with no index 0.
inline NonMetricityField spatial_nonmetricity() {
  return nonmetricity(3, {{{1, 1, 1}, "0.25"}, {{1, 2, 2}, "0.5"}, {{2, 1, 2}, "-0.5"}, {{2, 2, 1}, "-0.5"}});
}

/// Q_011 = 2 x0, absorbing L_xi g of the nonkilling metric.
inline NonMetricityField balancing_nonmetricity() { return nonmetricity(3, {{{0, 1, 1}, "2*x0"}}); }

/// Central difference of a scalar expression.
inline double central_difference(const expr::Expression& e, const std::vector<double>& p, std::size_t i,
                                 double h = 1e-5) {
  auto plus = p, minus = p;
  plus[i] += h;
  minus[i] -= h;
  return (e.evaluate(plus) - e.evaluate(minus)) / (2.0 * h);
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Random expression that is smooth and moderately sized on [-1,1]^n.
inline expr::NodePtr random_node(std::mt19937_64& rng, std::size_t n, int depth) {
  using namespace expr;
  const auto leaf = [&]() -> NodePtr {
    if (rng() % 3 == 0) return build::constant(std::round(uniform(rng, -2.0, 2.0) * 8.0) / 8.0);
    return build::coordinate(rng() % n);
  };
  if (depth <= 0) return leaf();
  const auto sub = [&] { return random_node(rng, n, depth - 1); };
  const auto positive = [&] {
    const auto s = sub();
    return build::add(build::constant(1.0), build::mul(s, s));
  };
  switch (rng() % 11) {
    case 0: return build::add(sub(), sub());
    case 1: return build::sub(sub(), sub());
    case 2: return build::mul(sub(), sub());
    case 3: return build::div(sub(), positive());
    case 4: return build::call(Op::Sin, sub());
    case 5: return build::call(Op::Cos, sub());
    case 6: return build::call(Op::Exp, build::call(Op::Sin, sub()));
    case 7: return build::call(Op::Log, positive());
    case 8: return build::call(Op::Sqrt, positive());
    case 9: return build::pow(sub(), Rational(static_cast<std::int64_t>(2 + rng() % 2)));
    default: return build::neg(sub());
  }
}

inline expr::Expression random_expression(std::mt19937_64& rng, std::size_t n, int depth) {
  return expr::Expression(random_node(rng, n, depth), n);
}

/// Random polynomial of total degree <= 2 as source text.
inline std::string random_polynomial(std::mt19937_64& rng, std::size_t n) {
  const auto coeff = [&] { return std::to_string(static_cast<int>(rng() % 7) - 3); };
  std::string s = coeff();
  for (std::size_t a = 0; a < n; ++a) {
    s += " + (" + coeff() + ")*x" + std::to_string(a);
    for (std::size_t b = a; b < n; ++b)
      if (rng() % 2) s += " + (" + coeff() + ")*x" + std::to_string(a) + "*x" + std::to_string(b);
  }
  return s;
}

inline TensorField random_polynomial_vector(std::mt19937_64& rng, std::size_t n) {
  std::vector<std::string> comps;
  for (std::size_t a = 0; a < n; ++a) comps.push_back(random_polynomial(rng, n));
  return vector_field(n, comps);
}

/// Christoffel symbols of gbar by the textbook formula with central
/// differences of the metric; independent of the library's LC path.
inline TensorValue fd_christoffel(const TensorField& gbar, const ChartPoint& p, double h = 1e-5) {
  const std::size_t n = gbar.dimension();
  std::vector<TensorValue> dg;
  for (std::size_t i = 0; i < n; ++i) {
    auto d = gbar.evaluate(p.shifted(i, h));
    d -= gbar.evaluate(p.shifted(i, -h));
    d *= 1.0 / (2.0 * h);
    dg.push_back(d);
  }
  // Gauss-Jordan inverse of gbar(p).
  const auto g = gbar.evaluate(p);
  std::vector<double> a(n * 2 * n, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) a[r * 2 * n + c] = g(r, c);
    a[r * 2 * n + n + r] = 1.0;
  }
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::fabs(a[r * 2 * n + c]) > std::fabs(a[piv * 2 * n + c])) piv = r;
    for (std::size_t k = 0; k < 2 * n; ++k) std::swap(a[c * 2 * n + k], a[piv * 2 * n + k]);
    const double d = a[c * 2 * n + c];
    for (std::size_t k = 0; k < 2 * n; ++k) a[c * 2 * n + k] /= d;
    for (std::size_t r = 0; r < n; ++r)
      if (r != c) {
        const double f = a[r * 2 * n + c];
        for (std::size_t k = 0; k < 2 * n; ++k) a[r * 2 * n + k] -= f * a[c * 2 * n + k];
      }
  }
  TensorValue gamma(signatures::kConnection, n);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double acc = 0.0;
        for (std::size_t l = 0; l < n; ++l)
          acc += a[k * 2 * n + n + l] * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
        gamma(k, i, j) = 0.5 * acc;
      }
  return gamma;
}

}  // namespace lightlike::testing
