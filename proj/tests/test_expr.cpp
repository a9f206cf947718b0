#include <cmath>
#include <random>

#include "doctest.h"
#include "lightlike/errors.hpp"
#include "support.hpp"

using namespace lightlike;
using namespace lightlike::expr;
using lightlike::testing::central_difference;
using lightlike::testing::ex;

TEST_CASE("parse builds the expected tree") {
  const auto e = ex("x0^2 + sin(x1)", 2);
  const Node& root = e.root();
  REQUIRE(root.op == Op::Add);
  REQUIRE(root.lhs->op == Op::Pow);
  CHECK(root.lhs->exponent == Rational(2));
  CHECK(root.lhs->lhs->op == Op::Coordinate);
  CHECK(root.lhs->lhs->index == 0);
  REQUIRE(root.rhs->op == Op::Sin);
  CHECK(root.rhs->lhs->op == Op::Coordinate);
  CHECK(root.rhs->lhs->index == 1);

  const auto one = ex("1", 4);
  CHECK(one.root().op == Op::Constant);
  CHECK(one.constant_value() == 1.0);
}

TEST_CASE("precedence and associativity") {
  const std::vector<double> p{2.0, 3.0};
  CHECK(ex("x0 - x1 - 1", 2).evaluate(p) == -2.0);
  CHECK(ex("x1 / x0 / 2", 2).evaluate(p) == 0.75);
  CHECK(ex("-x0^2", 2).evaluate(p) == -4.0);
  CHECK(ex("(-x0)^2", 2).evaluate(p) == 4.0);
  CHECK(ex("1 + 2 * x1", 2).evaluate(p) == 7.0);
  CHECK(ex("x0^(-1)", 2).evaluate(p) == 0.5);
  CHECK(ex("x0^-1", 2).evaluate(p) == 0.5);
  CHECK(ex("pow(x1 + 1, 1/2)", 2).evaluate(p) == 2.0);
  CHECK(ex("x1^(3/2)", 2).evaluate(p) == doctest::Approx(std::pow(3.0, 1.5)).epsilon(1e-15));
}

TEST_CASE("parse errors") {
  CHECK_THROWS_AS(ex("x2", 2), ParseError);
  CHECK_THROWS_WITH(ex("x2", 2), doctest::Contains("out of range"));
  CHECK_THROWS_WITH(ex("foo + 1", 2), doctest::Contains("unknown identifier"));
  CHECK_THROWS_AS(ex("", 2), ParseError);
  CHECK_THROWS_AS(ex("x0 +", 2), ParseError);
  CHECK_THROWS_AS(ex("(x0", 2), ParseError);
  CHECK_THROWS_AS(ex("sin x0", 2), ParseError);
  CHECK_THROWS_AS(ex("x0^x1", 2), ParseError);
  CHECK_THROWS_AS(ex("x0^2^3", 2), ParseError);
  CHECK_THROWS_AS(ex("x0^0.5", 2), ParseError);
  CHECK_THROWS_AS(ex("x0 x1", 2), ParseError);

  try {
    ex("x0 + $", 2);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.position() == 5);
  }
}

TEST_CASE("parameters are bound at parse time") {
  const auto e = ex("a * x0 + b", 1, {{"a", 3.0}, {"b", -1.0}});
  CHECK(e.evaluate(std::vector<double>{2.0}) == 5.0);
  CHECK(e.derivative(0).evaluate(std::vector<double>{7.0}) == 3.0);
}

TEST_CASE("evaluation examples") {
  CHECK(ex("x0^2 + sin(x1)", 2).evaluate(std::vector<double>{2.0, 0.0}) == 4.0);
  CHECK(ex("1/(1+x0^2)", 1).evaluate(std::vector<double>{1.0}) == 0.5);
  CHECK_THROWS_AS(ex("log(x0)", 1).evaluate(std::vector<double>{0.0}), DomainError);
  CHECK_THROWS_WITH(ex("log(x0)", 1).evaluate(std::vector<double>{0.0}), doctest::Contains("log(x0)"));
  CHECK_THROWS_AS(ex("1/x0", 1).evaluate(std::vector<double>{0.0}), DomainError);
  CHECK_THROWS_AS(ex("sqrt(x0)", 1).evaluate(std::vector<double>{-1.0}), DomainError);
  CHECK(ex("x0^(1/3)", 1).evaluate(std::vector<double>{-8.0}) == doctest::Approx(-2.0).epsilon(1e-15));
  CHECK_THROWS_AS(ex("x0^(1/2)", 1).evaluate(std::vector<double>{-4.0}), DomainError);
}

TEST_CASE("derivative examples") {
  const auto e = ex("x0^2 + sin(x1)", 2);
  CHECK(e.derivative(0).to_string() == "2*x0");
  CHECK(e.derivative(1).to_string() == "cos(x1)");

  const auto f = ex("1/(1+x0^2)", 1);
  const std::vector<double> p{1.0};
  const double exact = f.derivative(0).evaluate(p);
  CHECK(exact == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(std::fabs(exact - central_difference(f, p, 0)) <= 1e-8);
}

TEST_CASE("derivative simplifications") {
  CHECK(ex("3*x1", 2).derivative(0).is_zero());
  CHECK(ex("x0", 2).derivative(0).to_string() == "1");
  CHECK(ex("x0^2", 1).derivative(0).derivative(0).to_string() == "2");
  CHECK(ex("5 + x0", 1).derivative(0).to_string() == "1");
}

TEST_CASE("symbolic derivatives agree with central differences on random expressions") {
  std::mt19937_64 rng(20261016);
  int checked = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng() % 3;
    const auto e = lightlike::testing::random_expression(rng, n, 4);
    std::vector<double> p(n);
    for (auto& c : p) c = lightlike::testing::uniform(rng, -1.0, 1.0);
    const std::size_t i = rng() % n;
    const double exact = e.derivative(i).evaluate(p);
    const double fd = central_difference(e, p, i);
    CHECK_MESSAGE(std::fabs(exact - fd) <= 1e-6 * (1.0 + std::fabs(exact)), e.to_string());
    ++checked;
  }
  CHECK(checked == 1000);
}

TEST_CASE("parse-print-parse round trip preserves evaluation") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng() % 3;
    const auto e = lightlike::testing::random_expression(rng, n, 4);
    const auto printed = e.to_string();
    const auto again = ex(printed, n);
    CHECK_MESSAGE(again.to_string() == printed, printed);
    for (int s = 0; s < 100; ++s) {
      std::vector<double> p(n);
      for (auto& c : p) c = lightlike::testing::uniform(rng, -1.0, 1.0);
      const double a = e.evaluate(p), b = again.evaluate(p);
      if (structurally_equal(e, again))
        CHECK(a == b);
      else
        CHECK(std::fabs(a - b) <= 1e-12 * (1.0 + std::fabs(a)));
    }
  }
  const auto fixed = ex("-(x0 - x1)^(-2) + 2^(1/2) * pow(x0, 3) / (1 + x1)", 2);
  CHECK(structurally_equal(fixed, ex(fixed.to_string(), 2)));
}

TEST_CASE("evaluation is deterministic across threads") {
  const auto e = ex("exp(sin(x0)) * log(2 + x1^2) / sqrt(3 + x0*x1)", 2);
  const std::vector<double> p{0.3, -0.7};
  const double reference = e.evaluate(p);
  std::vector<double> results(64);
  parallel_for(results.size(), [&](std::size_t k) { results[k] = e.evaluate(p); });
  for (double r : results) CHECK(r == reference);
}

TEST_CASE("expression arithmetic") {
  const auto a = Expression::coordinate(0, 2);
  const auto b = Expression::coordinate(1, 2);
  const auto c = (a * b - Expression::constant(1.0, 2)) / (a + b);
  CHECK(c.evaluate(std::vector<double>{2.0, 3.0}) == 1.0);
  CHECK((-a).evaluate(std::vector<double>{2.0, 3.0}) == -2.0);
  CHECK((a * Expression::constant(0.0, 2)).is_zero());
}
