#include "lightlike/expr.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

#include "lightlike/errors.hpp"

namespace lightlike::expr {

Rational::Rational(std::int64_t n, std::int64_t d) : num(n), den(d) {
  if (d == 0) throw std::invalid_argument("rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const auto g = std::gcd(num < 0 ? -num : num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
}

namespace {

const std::shared_ptr<const ParameterMap>& empty_parameters() {
  static const auto empty = std::make_shared<const ParameterMap>();
  return empty;
}

std::shared_ptr<const ParameterMap> merge_parameters(const Expression& a, const Expression& b) {
  if (a.parameters_ptr() == b.parameters_ptr() || b.parameters().empty()) return a.parameters_ptr();
  if (a.parameters().empty()) return b.parameters_ptr();
  auto merged = std::make_shared<ParameterMap>(a.parameters());
  for (const auto& [name, value] : b.parameters()) {
    auto [it, inserted] = merged->emplace(name, value);
    if (!inserted && it->second != value)
      throw std::invalid_argument("conflicting values for parameter '" + name + "'");
  }
  return merged;
}

bool is_const(const NodePtr& n, double v) { return n->op == Op::Constant && n->value == v; }

NodePtr make_node(Op op, NodePtr lhs, NodePtr rhs = nullptr) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

NodePtr fold_or(double folded, NodePtr fallback) {
  return std::isfinite(folded) ? build::constant(folded) : std::move(fallback);
}

// ---------------------------------------------------------------------------
// Lexer

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, Comma, End };

struct Token {
  Tok kind;
  std::size_t pos;
  std::string_view text;
  double number = 0.0;
};

const char* describe(Tok t) {
  switch (t) {
    case Tok::Number: return "number";
    case Tok::Ident: return "identifier";
    case Tok::Plus: return "'+'";
    case Tok::Minus: return "'-'";
    case Tok::Star: return "'*'";
    case Tok::Slash: return "'/'";
    case Tok::Caret: return "'^'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::Comma: return "','";
    case Tok::End: return "end of input";
  }
  return "?";
}

std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < src.size()) {
    const char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      while (i < src.size() && (std::isdigit(static_cast<unsigned char>(src[i])) || src[i] == '.')) ++i;
      if (i < src.size() && (src[i] == 'e' || src[i] == 'E')) {
        std::size_t j = i + 1;
        if (j < src.size() && (src[j] == '+' || src[j] == '-')) ++j;
        if (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) {
          i = j;
          while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) ++i;
        }
      }
      Token t{Tok::Number, start, src.substr(start, i - start)};
      const auto [ptr, ec] = std::from_chars(src.data() + start, src.data() + i, t.number);
      if (ec != std::errc() || ptr != src.data() + i)
        throw ParseError(start, "malformed number '" + std::string(t.text) + "'");
      out.push_back(t);
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (i < src.size() && (std::isalnum(static_cast<unsigned char>(src[i])) || src[i] == '_')) ++i;
      out.push_back({Tok::Ident, start, src.substr(start, i - start)});
      continue;
    }
    Tok kind;
    switch (c) {
      case '+': kind = Tok::Plus; break;
      case '-': kind = Tok::Minus; break;
      case '*': kind = Tok::Star; break;
      case '/': kind = Tok::Slash; break;
      case '^': kind = Tok::Caret; break;
      case '(': kind = Tok::LParen; break;
      case ')': kind = Tok::RParen; break;
      case ',': kind = Tok::Comma; break;
      default: throw ParseError(start, std::string("unexpected character '") + c + "'");
    }
    out.push_back({kind, start, src.substr(start, 1)});
    ++i;
  }
  out.push_back({Tok::End, src.size(), {}});
  return out;
}

// ---------------------------------------------------------------------------
// Parser

struct FunctionName {
  std::string_view name;
  Op op;
};

constexpr std::array<FunctionName, 6> kFunctions{{
    {"sin", Op::Sin},
    {"cos", Op::Cos},
    {"tan", Op::Tan},
    {"exp", Op::Exp},
    {"log", Op::Log},
    {"sqrt", Op::Sqrt},
}};

std::optional<Op> lookup_function(std::string_view name) {
  for (const auto& f : kFunctions)
    if (f.name == name) return f.op;
  return std::nullopt;
}

// Coordinate names are 'x' followed by decimal digits only.
std::optional<std::size_t> coordinate_index(std::string_view name) {
  if (name.size() < 2 || name[0] != 'x') return std::nullopt;
  std::size_t idx = 0;
  const auto [ptr, ec] = std::from_chars(name.data() + 1, name.data() + name.size(), idx);
  if (ec != std::errc() || ptr != name.data() + name.size()) return std::nullopt;
  return idx;
}

class Parser {
public:
  Parser(std::string_view src, std::size_t dimension, const ParameterMap& params)
      : tokens_(tokenize(src)), dimension_(dimension), params_(params) {}

  NodePtr parse() {
    NodePtr e = expression();
    if (peek().kind != Tok::End) fail("expected operator or end of input");
    return e;
  }

private:
  const Token& peek() const { return tokens_[pos_]; }
  const Token& advance() { return tokens_[pos_++]; }
  bool accept(Tok k) {
    if (peek().kind != k) return false;
    ++pos_;
    return true;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    const Token& t = peek();
    std::string found = t.kind == Tok::End ? "end of input" : "'" + std::string(t.text) + "'";
    throw ParseError(t.pos, msg + ", found " + found);
  }
  void expect(Tok k) {
    if (!accept(k)) fail(std::string("expected ") + describe(k));
  }

  NodePtr expression() {
    NodePtr lhs = term();
    for (;;) {
      if (accept(Tok::Plus))
        lhs = make_node(Op::Add, lhs, term());
      else if (accept(Tok::Minus))
        lhs = make_node(Op::Sub, lhs, term());
      else
        return lhs;
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (accept(Tok::Star))
        lhs = make_node(Op::Mul, lhs, unary());
      else if (accept(Tok::Slash))
        lhs = make_node(Op::Div, lhs, unary());
      else
        return lhs;
    }
  }

  NodePtr unary() {
    if (accept(Tok::Minus)) return make_node(Op::Neg, unary());
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (!accept(Tok::Caret)) return base;
    Rational ex = exponent_literal();
    if (peek().kind == Tok::Caret) fail("chained '^' is ambiguous; parenthesize the base");
    auto n = std::make_shared<Node>();
    n->op = Op::Pow;
    n->lhs = std::move(base);
    n->exponent = ex;
    return n;
  }

  std::int64_t integer_literal() {
    const Token& t = peek();
    if (t.kind != Tok::Number) fail("expected integer exponent");
    if (t.number != std::floor(t.number) || std::fabs(t.number) > 1e15 ||
        t.text.find_first_of(".eE") != std::string_view::npos)
      fail("exponent must be an integer or rational constant");
    advance();
    return static_cast<std::int64_t>(t.number);
  }

  // ['-'] INT | '(' ['-'] INT [ '/' ['-'] INT ] ')'
  Rational exponent_literal() {
    if (accept(Tok::LParen)) {
      Rational r = rational_body();
      expect(Tok::RParen);
      return r;
    }
    const bool negative = accept(Tok::Minus);
    const auto v = integer_literal();
    return Rational(negative ? -v : v);
  }

  Rational rational_body() {
    const bool negative = accept(Tok::Minus);
    std::int64_t num = integer_literal();
    std::int64_t den = 1;
    if (accept(Tok::Slash)) {
      const bool neg_den = accept(Tok::Minus);
      const std::size_t at = peek().pos;
      den = integer_literal();
      if (den == 0) throw ParseError(at, "zero denominator in exponent");
      if (neg_den) den = -den;
    }
    return Rational(negative ? -num : num, den);
  }

  NodePtr primary() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Number:
        advance();
        return build::constant(t.number);
      case Tok::LParen: {
        advance();
        NodePtr e = expression();
        expect(Tok::RParen);
        return e;
      }
      case Tok::Ident:
        return identifier();
      default:
        fail("expected number, identifier or '('");
    }
  }

  NodePtr identifier() {
    const Token t = advance();
    if (t.text == "pow") {
      expect(Tok::LParen);
      NodePtr base = expression();
      expect(Tok::Comma);
      const bool grouped = accept(Tok::LParen);
      Rational ex = rational_body();
      if (grouped) expect(Tok::RParen);
      expect(Tok::RParen);
      auto n = std::make_shared<Node>();
      n->op = Op::Pow;
      n->lhs = std::move(base);
      n->exponent = ex;
      return n;
    }
    if (auto fn = lookup_function(t.text)) {
      if (peek().kind != Tok::LParen) fail("expected '(' after function name '" + std::string(t.text) + "'");
      advance();
      NodePtr arg = expression();
      expect(Tok::RParen);
      return make_node(*fn, std::move(arg));
    }
    if (auto idx = coordinate_index(t.text)) {
      if (*idx >= dimension_)
        throw ParseError(t.pos, "coordinate index out of range: '" + std::string(t.text) +
                                    "' on a chart of dimension " + std::to_string(dimension_));
      return build::coordinate(*idx);
    }
    if (params_.find(t.text) != params_.end()) return build::parameter(std::string(t.text));
    throw ParseError(t.pos, "unknown identifier '" + std::string(t.text) + "'");
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  std::size_t dimension_;
  const ParameterMap& params_;
};

// ---------------------------------------------------------------------------
// Evaluation

[[noreturn]] void domain_error(const std::string& what, const Node& n) {
  throw DomainError(what + " in '" + to_string(n) + "'");
}

double eval(const Node& n, std::span<const double> p, const ParameterMap& params) {
  switch (n.op) {
    case Op::Constant: return n.value;
    case Op::Coordinate: return p[n.index];
    case Op::Parameter: {
      auto it = params.find(n.name);
      if (it == params.end()) domain_error("unbound parameter '" + n.name + "'", n);
      return it->second;
    }
    case Op::Add: return eval(*n.lhs, p, params) + eval(*n.rhs, p, params);
    case Op::Sub: return eval(*n.lhs, p, params) - eval(*n.rhs, p, params);
    case Op::Mul: return eval(*n.lhs, p, params) * eval(*n.rhs, p, params);
    case Op::Div: {
      const double a = eval(*n.lhs, p, params);
      const double b = eval(*n.rhs, p, params);
      if (b == 0.0) domain_error("division by zero", n);
      return a / b;
    }
    case Op::Neg: return -eval(*n.lhs, p, params);
    case Op::Pow: {
      const double b = eval(*n.lhs, p, params);
      const Rational& r = n.exponent;
      if (b == 0.0 && r.num < 0) domain_error("division by zero", n);
      if (r.is_integer()) return std::pow(b, static_cast<double>(r.num));
      if (b < 0.0) {
        if (r.den % 2 == 0) domain_error("even root of negative value", n);
        const double m = std::pow(-b, r.to_double());
        return (r.num % 2 != 0) ? -m : m;
      }
      return std::pow(b, r.to_double());
    }
    case Op::Sin: return std::sin(eval(*n.lhs, p, params));
    case Op::Cos: return std::cos(eval(*n.lhs, p, params));
    case Op::Tan: return std::tan(eval(*n.lhs, p, params));
    case Op::Exp: return std::exp(eval(*n.lhs, p, params));
    case Op::Log: {
      const double a = eval(*n.lhs, p, params);
      if (a <= 0.0) domain_error("log of non-positive value", n);
      return std::log(a);
    }
    case Op::Sqrt: {
      const double a = eval(*n.lhs, p, params);
      if (a < 0.0) domain_error("sqrt of negative value", n);
      return std::sqrt(a);
    }
  }
  throw std::logic_error("unhandled expression node");
}

// ---------------------------------------------------------------------------
// Differentiation

NodePtr diff(const NodePtr& n, std::size_t i) {
  using namespace build;
  switch (n->op) {
    case Op::Constant:
    case Op::Parameter: return constant(0.0);
    case Op::Coordinate: return constant(n->index == i ? 1.0 : 0.0);
    case Op::Add: return add(diff(n->lhs, i), diff(n->rhs, i));
    case Op::Sub: return sub(diff(n->lhs, i), diff(n->rhs, i));
    case Op::Neg: return neg(diff(n->lhs, i));
    case Op::Mul: return add(mul(diff(n->lhs, i), n->rhs), mul(n->lhs, diff(n->rhs, i)));
    case Op::Div: {
      NodePtr du = diff(n->lhs, i);
      NodePtr dv = diff(n->rhs, i);
      if (is_const(dv, 0.0)) return div(du, n->rhs);
      return div(sub(mul(du, n->rhs), mul(n->lhs, dv)), pow(n->rhs, Rational(2)));
    }
    case Op::Pow: {
      const Rational& r = n->exponent;
      NodePtr du = diff(n->lhs, i);
      if (is_const(du, 0.0)) return constant(0.0);
      NodePtr coeff = constant(r.to_double());
      return mul(mul(coeff, pow(n->lhs, Rational(r.num - r.den, r.den))), du);
    }
    case Op::Sin: return mul(call(Op::Cos, n->lhs), diff(n->lhs, i));
    case Op::Cos: return neg(mul(call(Op::Sin, n->lhs), diff(n->lhs, i)));
    case Op::Tan: return div(diff(n->lhs, i), pow(call(Op::Cos, n->lhs), Rational(2)));
    case Op::Exp: return mul(n, diff(n->lhs, i));
    case Op::Log: return div(diff(n->lhs, i), n->lhs);
    case Op::Sqrt: return div(diff(n->lhs, i), mul(constant(2.0), n));
  }
  throw std::logic_error("unhandled expression node");
}

// ---------------------------------------------------------------------------
// Printing

int precedence(const Node& n) {
  switch (n.op) {
    case Op::Add:
    case Op::Sub: return 1;
    case Op::Mul:
    case Op::Div: return 2;
    case Op::Neg: return 3;
    case Op::Pow: return 4;
    case Op::Constant: return n.value < 0.0 || std::signbit(n.value) ? 3 : 5;
    default: return 5;
  }
}

std::string format_number(double v) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

std::string format_exponent(const Rational& r) {
  if (r.is_integer()) return r.num < 0 ? "(" + std::to_string(r.num) + ")" : std::to_string(r.num);
  return "(" + std::to_string(r.num) + "/" + std::to_string(r.den) + ")";
}

std::string wrap(const Node& n, bool parens) {
  std::string s = to_string(n);
  return parens ? "(" + s + ")" : s;
}

const char* function_name(Op op) {
  for (const auto& f : kFunctions)
    if (f.op == op) return f.name.data();
  return "?";
}

}  // namespace

// ---------------------------------------------------------------------------
// Builders

namespace build {

NodePtr constant(double v) {
  auto n = std::make_shared<Node>();
  n->op = Op::Constant;
  n->value = v;
  return n;
}

NodePtr coordinate(std::size_t i) {
  auto n = std::make_shared<Node>();
  n->op = Op::Coordinate;
  n->index = i;
  return n;
}

NodePtr parameter(std::string name) {
  auto n = std::make_shared<Node>();
  n->op = Op::Parameter;
  n->name = std::move(name);
  return n;
}

NodePtr add(NodePtr a, NodePtr b) {
  if (a->op == Op::Constant && b->op == Op::Constant)
    return fold_or(a->value + b->value, make_node(Op::Add, a, b));
  if (is_const(a, 0.0)) return b;
  if (is_const(b, 0.0)) return a;
  return make_node(Op::Add, std::move(a), std::move(b));
}

NodePtr sub(NodePtr a, NodePtr b) {
  if (a->op == Op::Constant && b->op == Op::Constant)
    return fold_or(a->value - b->value, make_node(Op::Sub, a, b));
  if (is_const(b, 0.0)) return a;
  if (is_const(a, 0.0)) return neg(std::move(b));
  return make_node(Op::Sub, std::move(a), std::move(b));
}

NodePtr mul(NodePtr a, NodePtr b) {
  if (a->op == Op::Constant && b->op == Op::Constant)
    return fold_or(a->value * b->value, make_node(Op::Mul, a, b));
  if (is_const(a, 0.0) || is_const(b, 0.0)) return constant(0.0);
  if (is_const(a, 1.0)) return b;
  if (is_const(b, 1.0)) return a;
  if (is_const(a, -1.0)) return neg(std::move(b));
  if (is_const(b, -1.0)) return neg(std::move(a));
  return make_node(Op::Mul, std::move(a), std::move(b));
}

NodePtr div(NodePtr a, NodePtr b) {
  if (a->op == Op::Constant && b->op == Op::Constant && b->value != 0.0)
    return fold_or(a->value / b->value, make_node(Op::Div, a, b));
  if (is_const(a, 0.0) && !is_const(b, 0.0)) return constant(0.0);
  if (is_const(b, 1.0)) return a;
  return make_node(Op::Div, std::move(a), std::move(b));
}

NodePtr neg(NodePtr a) {
  if (a->op == Op::Constant) return constant(-a->value);
  if (a->op == Op::Neg) return a->lhs;
  return make_node(Op::Neg, std::move(a));
}

NodePtr pow(NodePtr base, Rational exponent) {
  if (exponent.num == 0) return constant(1.0);
  if (exponent.num == 1 && exponent.den == 1) return base;
  if (base->op == Op::Constant && exponent.is_integer() && !(base->value == 0.0 && exponent.num < 0)) {
    const double folded = std::pow(base->value, static_cast<double>(exponent.num));
    if (std::isfinite(folded)) return constant(folded);
  }
  auto n = std::make_shared<Node>();
  n->op = Op::Pow;
  n->lhs = std::move(base);
  n->exponent = exponent;
  return n;
}

NodePtr call(Op fn, NodePtr arg) { return make_node(fn, std::move(arg)); }

}  // namespace build

// ---------------------------------------------------------------------------
// Expression

Expression::Expression(NodePtr root, std::size_t dimension, std::shared_ptr<const ParameterMap> parameters)
    : root_(std::move(root)), dimension_(dimension),
      parameters_(parameters ? std::move(parameters) : empty_parameters()) {
  if (!root_) throw std::invalid_argument("expression without root");
  if (dimension_ == 0) throw std::invalid_argument("chart dimension must be positive");
}

Expression Expression::constant(double value, std::size_t dimension) {
  return Expression(build::constant(value), dimension);
}

Expression Expression::coordinate(std::size_t index, std::size_t dimension) {
  if (index >= dimension) throw std::out_of_range("coordinate index out of range");
  return Expression(build::coordinate(index), dimension);
}

double Expression::evaluate(std::span<const double> point) const {
  if (point.size() != dimension_)
    throw std::invalid_argument("point has " + std::to_string(point.size()) + " coordinates, chart has " +
                                std::to_string(dimension_));
  return eval(*root_, point, *parameters_);
}

Expression Expression::derivative(std::size_t index) const {
  if (index >= dimension_) throw std::out_of_range("derivative index out of range");
  return Expression(diff(root_, index), dimension_, parameters_);
}

std::string Expression::to_string() const { return expr::to_string(*root_); }

std::optional<double> Expression::constant_value() const {
  if (root_->op == Op::Constant) return root_->value;
  return std::nullopt;
}

bool Expression::is_zero() const { return root_->op == Op::Constant && root_->value == 0.0; }

namespace {
void require_same_chart(const Expression& a, const Expression& b) {
  if (a.dimension() != b.dimension()) throw std::invalid_argument("expressions live on different charts");
}
}  // namespace

Expression operator+(const Expression& a, const Expression& b) {
  require_same_chart(a, b);
  return Expression(build::add(a.root_, b.root_), a.dimension_, merge_parameters(a, b));
}

Expression operator-(const Expression& a, const Expression& b) {
  require_same_chart(a, b);
  return Expression(build::sub(a.root_, b.root_), a.dimension_, merge_parameters(a, b));
}

Expression operator*(const Expression& a, const Expression& b) {
  require_same_chart(a, b);
  return Expression(build::mul(a.root_, b.root_), a.dimension_, merge_parameters(a, b));
}

Expression operator/(const Expression& a, const Expression& b) {
  require_same_chart(a, b);
  return Expression(build::div(a.root_, b.root_), a.dimension_, merge_parameters(a, b));
}

Expression operator-(const Expression& a) { return Expression(build::neg(a.root_), a.dimension_, a.parameters_); }

Expression parse_expression(std::string_view source, std::size_t dimension, const ParameterMap& parameters) {
  if (dimension == 0) throw std::invalid_argument("chart dimension must be positive");
  bool blank = true;
  for (char c : source)
    if (!std::isspace(static_cast<unsigned char>(c))) blank = false;
  if (blank) throw ParseError(0, "empty expression");
  Parser parser(source, dimension, parameters);
  NodePtr root = parser.parse();
  return Expression(std::move(root), dimension, std::make_shared<const ParameterMap>(parameters));
}

bool structurally_equal(const Node& a, const Node& b) {
  if (a.op != b.op) return false;
  switch (a.op) {
    case Op::Constant: return a.value == b.value;
    case Op::Coordinate: return a.index == b.index;
    case Op::Parameter: return a.name == b.name;
    case Op::Pow: return a.exponent == b.exponent && structurally_equal(*a.lhs, *b.lhs);
    default: break;
  }
  if (!structurally_equal(*a.lhs, *b.lhs)) return false;
  if (a.rhs || b.rhs) return a.rhs && b.rhs && structurally_equal(*a.rhs, *b.rhs);
  return true;
}

std::string to_string(const Node& n) {
  switch (n.op) {
    case Op::Constant: return format_number(n.value);
    case Op::Coordinate: return "x" + std::to_string(n.index);
    case Op::Parameter: return n.name;
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div: {
      const int p = precedence(n);
      const char* sym = n.op == Op::Add ? " + " : n.op == Op::Sub ? " - " : n.op == Op::Mul ? "*" : "/";
      return wrap(*n.lhs, precedence(*n.lhs) < p) + sym + wrap(*n.rhs, precedence(*n.rhs) <= p);
    }
    case Op::Neg: return "-" + wrap(*n.lhs, precedence(*n.lhs) <= 3);
    case Op::Pow: return wrap(*n.lhs, precedence(*n.lhs) < 5) + "^" + format_exponent(n.exponent);
    default: return std::string(function_name(n.op)) + "(" + to_string(*n.lhs) + ")";
  }
}

}  // namespace lightlike::expr
