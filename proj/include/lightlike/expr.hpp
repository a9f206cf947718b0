#pragma once

// Scalar expression language for tensor-component functions on a chart.
//
// Grammar (see docs/grammar.md for the full EBNF):
//
//   expr     := term { ('+' | '-') term }
//   term     := unary { ('*' | '/') unary }
//   unary    := '-' unary | power
//   power    := primary [ '^' exponent ]
//   primary  := number | coordinate | parameter | call | '(' expr ')'
//
// Coordinates are x0..x9; the chart dimension bounds the admissible index.
// Exponents are integer or rational constants only.

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace lightlike::expr {

/// Reduced fraction with positive denominator.
struct Rational {
  std::int64_t num = 1;
  std::int64_t den = 1;

  Rational() = default;
  Rational(std::int64_t n, std::int64_t d = 1);

  bool is_integer() const noexcept { return den == 1; }
  double to_double() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }
  friend bool operator==(const Rational&, const Rational&) = default;
};

enum class Op {
  Constant,
  Coordinate,
  Parameter,
  Add,
  Sub,
  Mul,
  Div,
  Neg,
  Pow,
  Sin,
  Cos,
  Tan,
  Exp,
  Log,
  Sqrt,
};

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  Op op = Op::Constant;
  double value = 0.0;       // Constant
  std::size_t index = 0;    // Coordinate
  std::string name;         // Parameter
  Rational exponent;        // Pow
  NodePtr lhs;              // first (or only) operand
  NodePtr rhs;              // second operand of binary operators
};

using ParameterMap = std::map<std::string, double, std::less<>>;

/// Immutable closed-form function of the chart coordinates.
class Expression {
public:
  Expression(NodePtr root, std::size_t dimension, std::shared_ptr<const ParameterMap> parameters = nullptr);

  static Expression constant(double value, std::size_t dimension);
  static Expression coordinate(std::size_t index, std::size_t dimension);

  const Node& root() const noexcept { return *root_; }
  const NodePtr& root_ptr() const noexcept { return root_; }
  std::size_t dimension() const noexcept { return dimension_; }
  const ParameterMap& parameters() const noexcept { return *parameters_; }
  const std::shared_ptr<const ParameterMap>& parameters_ptr() const noexcept { return parameters_; }

  /// Throws DomainError naming the offending subexpression.
  double evaluate(std::span<const double> point) const;

  /// Symbolic partial derivative with respect to coordinate `index`.
  Expression derivative(std::size_t index) const;

  std::string to_string() const;

  std::optional<double> constant_value() const;
  bool is_zero() const;

  friend Expression operator+(const Expression& a, const Expression& b);
  friend Expression operator-(const Expression& a, const Expression& b);
  friend Expression operator*(const Expression& a, const Expression& b);
  friend Expression operator/(const Expression& a, const Expression& b);
  friend Expression operator-(const Expression& a);

private:
  NodePtr root_;
  std::size_t dimension_;
  std::shared_ptr<const ParameterMap> parameters_;
};

/// Parses `source` over a chart of the given dimension. Identifiers other than
/// coordinates and known functions must appear in `parameters`.
Expression parse_expression(std::string_view source, std::size_t dimension,
                            const ParameterMap& parameters = {});

inline double evaluate(const Expression& e, std::span<const double> point) { return e.evaluate(point); }

inline Expression differentiate(const Expression& e, std::size_t index) { return e.derivative(index); }

/// Exact tree comparison (constants compared bitwise by value).
bool structurally_equal(const Node& a, const Node& b);
inline bool structurally_equal(const Expression& a, const Expression& b) {
  return structurally_equal(a.root(), b.root());
}

std::string to_string(const Node& node);

// Node builders with light algebraic simplification (constant folding and the
// identities 0+e, e*1, e*0, e^1, e^0, --e). The parser does not simplify.
namespace build {
NodePtr constant(double v);
NodePtr coordinate(std::size_t i);
NodePtr parameter(std::string name);
NodePtr add(NodePtr a, NodePtr b);
NodePtr sub(NodePtr a, NodePtr b);
NodePtr mul(NodePtr a, NodePtr b);
NodePtr div(NodePtr a, NodePtr b);
NodePtr neg(NodePtr a);
NodePtr pow(NodePtr base, Rational exponent);
NodePtr call(Op fn, NodePtr arg);
}  // namespace build

}  // namespace lightlike::expr
