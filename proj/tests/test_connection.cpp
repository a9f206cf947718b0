#include <cmath>
#include <random>

#include "doctest.h"
#include "lightlike/errors.hpp"
#include "support.hpp"

using namespace lightlike;
using namespace lightlike::testing;

namespace {

const std::vector<ChartPoint>& cloud() {
  static const auto pts = sample_cloud(DomainBox::cube(3, -1, 1), 100, 9);
  return pts;
}

TensorField identity3() { return diagonal_field({"1", "1", "1"}); }

/// Random symmetric positive-definite polynomial metric on [-1,1]^3.
TensorField random_metric(std::mt19937_64& rng) {
  std::vector<std::string> g(9);
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = a; b < 3; ++b)
      g[a * 3 + b] = g[b * 3 + a] =
          a == b ? "4 + 0.25*(" + random_polynomial(rng, 3) + ")^2" : "0.1*(" + random_polynomial(rng, 3) + ")";
  return matrix_field(3, g);
}

Sparse3 random_torsion_entries(std::mt19937_64& rng, bool polynomial) {
  Sparse3 t;
  for (std::size_t k = 0; k < 3; ++k)
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = i + 1; j < 3; ++j) {
        const std::string c = std::to_string(uniform(rng, -1.0, 1.0));
        const std::string v = polynomial ? c + "*(" + random_polynomial(rng, 3) + ")" : c;
        t[{k, i, j}] = v;
        t[{k, j, i}] = "-(" + v + ")";
      }
  return t;
}

Sparse3 random_nonmetricity_entries(std::mt19937_64& rng, bool polynomial) {
  Sparse3 q;
  for (std::size_t z = 0; z < 3; ++z)
    for (std::size_t x = 0; x < 3; ++x)
      for (std::size_t y = x; y < 3; ++y) {
        const std::string c = std::to_string(uniform(rng, -1.0, 1.0));
        const std::string v = polynomial ? c + "*(" + random_polynomial(rng, 3) + ")" : c;
        q[{z, x, y}] = v;
        q[{z, y, x}] = v;
      }
  return q;
}

}  // namespace

TEST_CASE("levi-civita of constant metrics vanishes") {
  for (const auto& p : cloud()) {
    CHECK(levi_civita(identity3(), p).max_abs() == 0.0);
    CHECK(levi_civita(diagonal_field({"2.5", "2.5", "2.5"}), p).max_abs() == 0.0);
  }
}

TEST_CASE("levi-civita matches hand christoffel symbols") {
  // gbar = diag(1, 1 + x1^2, 1): only Gamma^1_11 = x1/(1 + x1^2).
  const auto g1 = diagonal_field({"1", "1 + x1^2", "1"});
  const auto at_one = levi_civita(g1, ChartPoint{0.0, 1.0, 0.0});
  CHECK(at_one(1, 1, 1) == doctest::Approx(0.5).epsilon(1e-15));
  for (const auto& p : cloud()) {
    const auto gamma = levi_civita(g1, p);
    TensorValue oracle(signatures::kConnection, 3);
    oracle(1, 1, 1) = p[1] / (1.0 + p[1] * p[1]);
    CHECK(max_abs_difference(gamma, oracle) <= 1e-12);
  }

  // gbar = diag(1, 1 + x0^2, 1): Gamma^0_11 = -x0, Gamma^1_01 = Gamma^1_10 = x0/(1 + x0^2).
  const auto g0 = diagonal_field({"1", "1 + x0^2", "1"});
  for (const auto& p : cloud()) {
    const auto gamma = levi_civita(g0, p);
    TensorValue oracle(signatures::kConnection, 3);
    oracle(0, 1, 1) = -p[0];
    oracle(1, 0, 1) = oracle(1, 1, 0) = p[0] / (1.0 + p[0] * p[0]);
    CHECK(max_abs_difference(gamma, oracle) <= 1e-12);
  }
}

TEST_CASE("levi-civita agrees with a finite-difference christoffel oracle") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    const auto g = random_metric(rng);
    for (std::size_t s = 0; s < 10; ++s) {
      const auto& p = cloud()[s];
      const auto exact = levi_civita(g, p);
      CHECK(max_abs_difference(exact, fd_christoffel(g, p)) <= 1e-6 * (1.0 + exact.max_abs()));
      CHECK(exact.asymmetry(Symmetry::SymmetricLastTwo) == 0.0);
    }
  }
}

TEST_CASE("levi-civita is metric and torsion-free") {
  std::mt19937_64 rng(29);
  const auto g = random_metric(rng);
  for (const auto& p : cloud()) {
    const auto gamma = levi_civita(g, p);
    CHECK(nonmetricity_of(gamma, g, p).max_abs() <= 1e-9);
    CHECK(torsion_of(gamma).max_abs() == 0.0);
  }
}

TEST_CASE("levi-civita rejects a singular metric") {
  CHECK_THROWS_AS(levi_civita(diagonal_field({"0", "1", "1"}), ChartPoint{0.0, 0.0, 0.0}), DegeneracyError);
}

TEST_CASE("koszul reduces to levi-civita when T and Q vanish") {
  std::mt19937_64 rng(31);
  const auto g = random_metric(rng);
  for (const auto& p : cloud()) {
    const auto lc = levi_civita(g, p);
    CHECK(max_abs_difference(koszul_closed_form(g, TorsionField::zero(3), NonMetricityField::zero(3), p), lc) == 0.0);
    CHECK(max_abs_difference(koszul_pointwise_solve(g, TorsionField::zero(3), NonMetricityField::zero(3), p), lc) <=
          1e-12);
  }
}

TEST_CASE("koszul recovers a single torsion component on the identity metric") {
  const double c = 0.75;
  const auto t = torsion(3, {{{2, 0, 1}, "0.75"}, {{2, 1, 0}, "-0.75"}});
  for (const auto& p : cloud()) {
    const auto gamma = koszul_closed_form(identity3(), t, NonMetricityField::zero(3), p);
    const auto solved = koszul_pointwise_solve(identity3(), t, NonMetricityField::zero(3), p);
    CHECK(max_abs_difference(torsion_of(gamma), t.field.evaluate(p)) <= 1e-10);
    CHECK(nonmetricity_of(gamma, identity3(), p).max_abs() <= 1e-10);
    CHECK(max_abs_difference(gamma, solved) <= 1e-9);
    CHECK(torsion_of(gamma)(2, 0, 1) == doctest::Approx(c).epsilon(1e-15));
  }
}

TEST_CASE("koszul recovers a single non-metricity component on the identity metric") {
  const auto q = nonmetricity(3, {{{0, 0, 0}, "0.4"}});
  for (const auto& p : cloud()) {
    const auto gamma = koszul_closed_form(identity3(), TorsionField::zero(3), q, p);
    const auto solved = koszul_pointwise_solve(identity3(), TorsionField::zero(3), q, p);
    CHECK(max_abs_difference(nonmetricity_of(gamma, identity3(), p), q.field.evaluate(p)) <= 1e-10);
    CHECK(torsion_of(gamma).max_abs() <= 1e-10);
    CHECK(max_abs_difference(gamma, solved) <= 1e-9);
  }
}

TEST_CASE("round trip and uniqueness for random torsion and non-metricity") {
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 20; ++trial) {
    const bool polynomial = trial % 2 == 1;
    const auto g = trial < 10 ? identity3() : random_metric(rng);
    const auto t = TorsionField(rank3_field(signatures::kConnection, 3, random_torsion_entries(rng, polynomial)));
    const auto q =
        NonMetricityField(rank3_field(signatures::kCovariant3, 3, random_nonmetricity_entries(rng, polynomial)));
    const auto gamma = koszul_connection(AugmentedMetric{g}, t, q);
    CHECK(gamma.provenance() == Provenance::KoszulGeneral);
    for (std::size_t s = 0; s < 20; ++s) {
      const auto& p = cloud()[s];
      const auto value = gamma.evaluate(p);
      CHECK(max_abs_difference(torsion_of(value), t.field.evaluate(p)) <= 1e-8);
      CHECK(max_abs_difference(nonmetricity_of(value, g, p), q.field.evaluate(p)) <= 1e-8);
      CHECK(max_abs_difference(value, koszul_pointwise_solve(g, t, q, p)) <= 1e-9);
    }
  }
}

TEST_CASE("round trip on callback-backed inputs") {
  std::mt19937_64 rng(41);
  const auto g_exact = random_metric(rng);
  const auto t_exact = rank3_field(signatures::kConnection, 3, random_torsion_entries(rng, true));
  const auto q_exact = rank3_field(signatures::kCovariant3, 3, random_nonmetricity_entries(rng, true));
  const auto wrap = [](const TensorField& f) {
    return TensorField::from_callback(f.signature(), f.dimension(), [f](const ChartPoint& p) { return f.evaluate(p); });
  };
  const auto g = wrap(g_exact);
  const TorsionField t(wrap(t_exact));
  const NonMetricityField q(wrap(q_exact));
  for (std::size_t s = 0; s < 20; ++s) {
    const auto& p = cloud()[s];
    const auto gamma = koszul_closed_form(g, t, q, p);
    CHECK(max_abs_difference(torsion_of(gamma), t.field.evaluate(p)) <= 1e-4);
    CHECK(max_abs_difference(nonmetricity_of(gamma, g, p), q.field.evaluate(p)) <= 1e-4);
    CHECK(max_abs_difference(gamma, koszul_closed_form(g_exact, t, q, p)) <= 1e-4);
  }
}

TEST_CASE("round-trip self-check flags an inconsistent connection") {
  const auto t = rotational_torsion(0.5);
  TensorValue wrong(signatures::kConnection, 3);
  CHECK_THROWS_AS(check_round_trip(wrong, identity3(), t, NonMetricityField::zero(3), ChartPoint{0, 0, 0}, 1e-10),
                  ConsistencyFault);
  const auto right = koszul_closed_form(identity3(), t, NonMetricityField::zero(3), ChartPoint{0, 0, 0});
  CHECK_NOTHROW(check_round_trip(right, identity3(), t, NonMetricityField::zero(3), ChartPoint{0, 0, 0}, 1e-10));
}

TEST_CASE("torsion and non-metricity fields check their signatures") {
  CHECK_THROWS_AS(TorsionField(diagonal_field({"1", "1", "1"})), SignatureError);
  CHECK_THROWS_AS(NonMetricityField(rank3_field(signatures::kConnection, 3, {})), SignatureError);
  const TorsionField bad(rank3_field(signatures::kConnection, 3, {{{0, 1, 2}, "1"}}));
  CHECK(bad.asymmetry(cloud()) == 1.0);
}

TEST_CASE("covariant derivatives with a flat connection are partials") {
  const ConnectionField zero = ConnectionField::from_field(TensorField::zero(signatures::kConnection, 3));
  const auto v = vector_field(3, {"x0*x1", "sin(x2)", "1"});
  const auto tau = covector_field(3, {"x1^2", "0", "x0"});
  const auto m = diagonal_field({"x0", "1", "x2^2"});
  for (std::size_t s = 0; s < 10; ++s) {
    const auto& p = cloud()[s];
    const auto dv = covariant_derivative(zero, v, p);
    CHECK(dv.signature() == Signature{Slot::Lower, Slot::Upper});
    for (std::size_t i = 0; i < 3; ++i) {
      const auto pv = v.partial(p, i);
      const auto pt = tau.partial(p, i);
      const auto pm = m.partial(p, i);
      for (std::size_t k = 0; k < 3; ++k) {
        CHECK(dv(i, k) == pv(k));
        CHECK(covariant_derivative(zero, tau, p)(i, k) == pt(k));
        for (std::size_t l = 0; l < 3; ++l) CHECK(covariant_derivative(zero, m, p)(i, k, l) == pm(k, l));
      }
    }
  }
  CHECK(nonmetricity_of(zero, diagonal_field({"2", "3", "1"}), cloud()[0]).max_abs() == 0.0);
  CHECK(torsion_of(zero, cloud()[0]).max_abs() == 0.0);
  CHECK_THROWS_AS(covariant_derivative(zero, rank3_field(signatures::kCovariant3, 3, {}), cloud()[0]),
                  SignatureError);
}

TEST_CASE("covariant derivative formulas") {
  // Gamma^1_01 = Gamma^1_10 = a constant, applied to v = (1, 0, 0) and tau = (0, 1, 0).
  const auto gamma_field = rank3_field(signatures::kConnection, 3, {{{1, 0, 1}, "2"}, {{1, 1, 0}, "2"}});
  const auto gamma = ConnectionField::from_field(gamma_field);
  const ChartPoint p{0.1, 0.2, 0.3};
  const auto dv = covariant_derivative(gamma, vector_field(3, {"1", "0", "0"}), p);
  CHECK(dv(1, 1) == 2.0);  // d_1 v^1 + Gamma^1_10 v^0
  CHECK(dv(0, 1) == 0.0);
  const auto dt = covariant_derivative(gamma, covector_field(3, {"0", "1", "0"}), p);
  CHECK(dt(0, 1) == -2.0);  // -Gamma^1_01 tau_1
  CHECK(dt(1, 0) == -2.0);
}

TEST_CASE("leibniz rule for the covariant derivative of tau (x) tau") {
  std::mt19937_64 rng(43);
  const auto g = random_metric(rng);
  const auto t = TorsionField(rank3_field(signatures::kConnection, 3, random_torsion_entries(rng, true)));
  const auto q = NonMetricityField(rank3_field(signatures::kCovariant3, 3, random_nonmetricity_entries(rng, false)));
  const auto gamma = koszul_connection(AugmentedMetric{g}, t, q);
  const auto tau = covector_field(3, {"1 + x1*x2", "sin(x0)", "x2^2"});
  const auto tt = tensor_product(tau, tau);
  for (std::size_t s = 0; s < 20; ++s) {
    const auto& p = cloud()[s];
    const auto direct = covariant_derivative(gamma, tt, p);
    const auto nt = covariant_derivative(gamma, tau, p);
    const auto tv = tau.evaluate(p);
    double worst = 0.0;
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j)
        for (std::size_t l = 0; l < 3; ++l)
          worst = std::max(worst, std::fabs(direct(i, j, l) - (nt(i, j) * tv(l) + tv(j) * nt(i, l))));
    CHECK(worst <= 1e-9);
  }
}

TEST_CASE("levi-civita connection of the augmented metric is parallel to gbar") {
  const auto b = ppwavelike();
  const auto gbar = build_augmented_metric(b, cloud());
  const auto lc = levi_civita_connection(gbar);
  CHECK(lc.provenance() == Provenance::LeviCivita);
  for (const auto& p : cloud()) CHECK(covariant_derivative(lc, gbar.metric, p).max_abs() <= 1e-9);
}

TEST_CASE("connections refuse non-finite coefficients") {
  const ConnectionField bad(3, Provenance::User,
                            [](const ChartPoint&) {
                              TensorValue v(signatures::kConnection, 3);
                              v(0, 0, 0) = NAN;
                              return v;
                            },
                            true);
  CHECK_THROWS_AS(bad.evaluate(ChartPoint{0, 0, 0}), ConsistencyFault);
}
