#pragma once

// Tensor values and tensor fields on a single coordinate chart.
//
// Components are stored densely in row-major order, one axis of length n per
// slot. Derivative conventions used throughout the library:
//
//   [X,Y]^k     = X^i d_i Y^k - Y^i d_i X^k
//   (d tau)_ij  = d_i tau_j - d_j tau_i
//   (L_xi g)_ij = xi^k d_k g_ij + g_kj d_i xi^k + g_ik d_j xi^k

#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <memory>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "lightlike/expr.hpp"

namespace lightlike {

inline constexpr std::size_t kMaxDimension = 8;
inline constexpr double kDefaultStep = 1e-5;
inline constexpr double kNestedStep = 1e-4;

enum class Slot : unsigned char { Upper, Lower };
using Signature = std::vector<Slot>;

namespace signatures {
inline const Signature kScalar{};
inline const Signature kVector{Slot::Upper};
inline const Signature kCovector{Slot::Lower};
inline const Signature kBilinear{Slot::Lower, Slot::Lower};
inline const Signature kConnection{Slot::Upper, Slot::Lower, Slot::Lower};
inline const Signature kCovariant3{Slot::Lower, Slot::Lower, Slot::Lower};
}  // namespace signatures

/// Declared pairwise symmetry of the last two slots.
enum class Symmetry { None, SymmetricLastTwo, AntisymmetricLastTwo };

class ChartPoint {
public:
  explicit ChartPoint(std::vector<double> coords);
  ChartPoint(std::initializer_list<double> coords) : ChartPoint(std::vector<double>(coords)) {}

  std::size_t dimension() const noexcept { return coords_.size(); }
  std::span<const double> coords() const noexcept { return coords_; }
  double operator[](std::size_t i) const { return coords_[i]; }

  /// Copy with coordinate `i` shifted by `delta`.
  ChartPoint shifted(std::size_t i, double delta) const;

private:
  std::vector<double> coords_;
};

class TensorValue {
public:
  TensorValue(Signature signature, std::size_t dimension);
  TensorValue(Signature signature, std::size_t dimension, std::vector<double> components);

  static TensorValue scalar(double v, std::size_t dimension);
  static TensorValue vector(std::vector<double> components);
  static TensorValue covector(std::vector<double> components);

  const Signature& signature() const noexcept { return signature_; }
  std::size_t rank() const noexcept { return signature_.size(); }
  std::size_t dimension() const noexcept { return dimension_; }
  std::span<const double> components() const noexcept { return components_; }
  std::span<double> components() noexcept { return components_; }
  std::size_t size() const noexcept { return components_.size(); }

  Symmetry symmetry() const noexcept { return symmetry_; }

  /// Declares a symmetry of the last two slots; throws SignatureError unless it
  /// holds exactly.
  TensorValue& declare(Symmetry s);

  /// Largest componentwise violation of `s` in the last two slots.
  double asymmetry(Symmetry s) const;

  double max_abs() const noexcept;

  std::size_t flat_index(std::span<const std::size_t> idx) const;

  double at(std::span<const std::size_t> idx) const { return components_[flat_index(idx)]; }
  double& at(std::span<const std::size_t> idx) { return components_[flat_index(idx)]; }

  template <class... I>
  double operator()(I... idx) const {
    const std::size_t arr[] = {static_cast<std::size_t>(idx)...};
    return components_[flat_index(arr)];
  }
  template <class... I>
  double& operator()(I... idx) {
    const std::size_t arr[] = {static_cast<std::size_t>(idx)...};
    return components_[flat_index(arr)];
  }

  TensorValue& operator+=(const TensorValue& other);
  TensorValue& operator-=(const TensorValue& other);
  TensorValue& operator*=(double s);

  friend TensorValue operator+(TensorValue a, const TensorValue& b) { return a += b; }
  friend TensorValue operator-(TensorValue a, const TensorValue& b) { return a -= b; }
  friend TensorValue operator*(double s, TensorValue a) { return a *= s; }

private:
  void require_same_shape(const TensorValue& other) const;

  Signature signature_;
  std::size_t dimension_;
  std::vector<double> components_;
  Symmetry symmetry_ = Symmetry::None;
};

/// Largest componentwise |a - b|. Shapes must match.
double max_abs_difference(const TensorValue& a, const TensorValue& b);

/// Number of components of a tensor with `rank` slots on an n-dimensional chart.
std::size_t component_count(std::size_t rank, std::size_t dimension);

/// A tensor-valued function of a chart point. Either expression-backed (exact
/// partials) or callback-backed (central differences with step h).
class TensorField {
public:
  using Callback = std::function<TensorValue(const ChartPoint&)>;

  static TensorField from_expressions(Signature signature, std::size_t dimension,
                                      std::vector<expr::Expression> components);
  static TensorField from_callback(Signature signature, std::size_t dimension, Callback callback,
                                   double step = kDefaultStep);
  static TensorField constant(const TensorValue& value);
  static TensorField zero(Signature signature, std::size_t dimension);

  const Signature& signature() const noexcept;
  std::size_t dimension() const noexcept;
  std::size_t rank() const noexcept { return signature().size(); }
  bool is_expression_backed() const noexcept;
  double step() const noexcept;

  /// Component expressions, or nullptr for callback-backed fields.
  const std::vector<expr::Expression>* expressions() const noexcept;

  TensorValue evaluate(const ChartPoint& p) const;
  TensorValue partial(const ChartPoint& p, std::size_t i) const;

private:
  struct Impl;
  explicit TensorField(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

inline TensorValue evaluate_field(const TensorField& f, const ChartPoint& p) { return f.evaluate(p); }
inline TensorValue partial_field(const TensorField& f, const ChartPoint& p, std::size_t i) {
  return f.partial(p, i);
}

/// Signature-preserving sum. Stays expression-backed when both inputs are.
TensorField operator+(const TensorField& a, const TensorField& b);

/// Scalar multiple of a field.
TensorField scale(const TensorField& f, const expr::Expression& factor);

/// Outer product of two fields.
TensorField tensor_product(const TensorField& a, const TensorField& b);

TensorValue lie_bracket(const TensorField& x, const TensorField& y, const ChartPoint& p);

/// [X,Y] as a field; symbolic for expression-backed inputs, otherwise nested
/// central differences with step kNestedStep.
TensorField lie_bracket_field(const TensorField& x, const TensorField& y);

TensorValue exterior_derivative_1form(const TensorField& tau, const ChartPoint& p);

TensorValue lie_derivative_metric(const TensorField& xi, const TensorField& g, const ChartPoint& p);

/// (L_xi tau)_i = xi^k d_k tau_i + tau_k d_i xi^k
TensorValue lie_derivative_1form(const TensorField& xi, const TensorField& tau, const ChartPoint& p);

TensorValue tensor_product(const TensorValue& a, const TensorValue& b);

/// Trace over one upper and one lower slot of the same tensor.
TensorValue contract(const TensorValue& a, std::size_t slot_a, std::size_t slot_b);

/// Pairs slot `first` of `a` with slot `second` of `b` and sums; each pair must
/// match an upper slot against a lower one.
TensorValue contract(const TensorValue& a, const TensorValue& b,
                     std::span<const std::pair<std::size_t, std::size_t>> pairs);

/// Per-coordinate closed interval [lo, hi].
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

class DomainBox {
public:
  explicit DomainBox(std::vector<Interval> intervals);
  static DomainBox cube(std::size_t dimension, double lo, double hi);

  std::size_t dimension() const noexcept { return intervals_.size(); }
  const std::vector<Interval>& intervals() const noexcept { return intervals_; }
  bool contains(const ChartPoint& p) const;
  ChartPoint center() const;

private:
  std::vector<Interval> intervals_;
};

/// Deterministic uniform samples in `box`. Bit-identical for a given seed on
/// every platform.
std::vector<ChartPoint> sample_cloud(const DomainBox& box, std::size_t count, std::uint64_t seed);

/// Applies `fn` to every index in [0, count) across hardware threads. Each
/// index is visited once; results must be written to per-index storage.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace lightlike
