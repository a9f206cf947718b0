#include "lightlike/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>

#include "lightlike/errors.hpp"

namespace lightlike {

namespace {

void require_dimension(std::size_t n) {
  if (n == 0 || n > kMaxDimension)
    throw SignatureError("chart dimension must be in [1, " + std::to_string(kMaxDimension) + "], got " +
                         std::to_string(n));
}

std::vector<std::size_t> unflatten(std::size_t flat, std::size_t rank, std::size_t n) {
  std::vector<std::size_t> idx(rank);
  for (std::size_t s = rank; s-- > 0;) {
    idx[s] = flat % n;
    flat /= n;
  }
  return idx;
}

bool is_signature(const TensorField& f, const Signature& s) { return f.signature() == s; }

}  // namespace

// ---------------------------------------------------------------------------

ChartPoint::ChartPoint(std::vector<double> coords) : coords_(std::move(coords)) {
  require_dimension(coords_.size());
  for (double c : coords_)
    if (!std::isfinite(c)) throw std::invalid_argument("chart point has a non-finite coordinate");
}

ChartPoint ChartPoint::shifted(std::size_t i, double delta) const {
  std::vector<double> c = coords_;
  c.at(i) += delta;
  return ChartPoint(std::move(c));
}

// ---------------------------------------------------------------------------

std::size_t component_count(std::size_t rank, std::size_t dimension) {
  std::size_t count = 1;
  for (std::size_t s = 0; s < rank; ++s) count *= dimension;
  return count;
}

TensorValue::TensorValue(Signature signature, std::size_t dimension)
    : signature_(std::move(signature)), dimension_(dimension),
      components_(component_count(signature_.size(), dimension), 0.0) {
  require_dimension(dimension);
}

TensorValue::TensorValue(Signature signature, std::size_t dimension, std::vector<double> components)
    : signature_(std::move(signature)), dimension_(dimension), components_(std::move(components)) {
  require_dimension(dimension);
  if (components_.size() != component_count(signature_.size(), dimension))
    throw SignatureError("component count does not match signature");
}

TensorValue TensorValue::scalar(double v, std::size_t dimension) {
  return TensorValue(signatures::kScalar, dimension, {v});
}

TensorValue TensorValue::vector(std::vector<double> components) {
  const auto n = components.size();
  return TensorValue(signatures::kVector, n, std::move(components));
}

TensorValue TensorValue::covector(std::vector<double> components) {
  const auto n = components.size();
  return TensorValue(signatures::kCovector, n, std::move(components));
}

std::size_t TensorValue::flat_index(std::span<const std::size_t> idx) const {
  if (idx.size() != rank()) throw SignatureError("index count does not match tensor rank");
  std::size_t flat = 0;
  for (std::size_t i : idx) {
    if (i >= dimension_) throw std::out_of_range("tensor index out of range");
    flat = flat * dimension_ + i;
  }
  return flat;
}

double TensorValue::asymmetry(Symmetry s) const {
  if (s == Symmetry::None) return 0.0;
  if (rank() < 2) throw SignatureError("symmetry needs at least two slots");
  if (signature_[rank() - 1] != signature_[rank() - 2])
    throw SignatureError("symmetry between slots of different variance");
  const std::size_t n = dimension_;
  const std::size_t outer = components_.size() / (n * n);
  const double sign = s == Symmetry::SymmetricLastTwo ? 1.0 : -1.0;
  double worst = 0.0;
  for (std::size_t o = 0; o < outer; ++o)
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a; b < n; ++b) {
        const double ab = components_[(o * n + a) * n + b];
        const double ba = components_[(o * n + b) * n + a];
        worst = std::max(worst, std::fabs(ab - sign * ba));
      }
  return worst;
}

TensorValue& TensorValue::declare(Symmetry s) {
  if (asymmetry(s) != 0.0) throw SignatureError("declared symmetry does not hold exactly");
  symmetry_ = s;
  return *this;
}

double TensorValue::max_abs() const noexcept {
  double m = 0.0;
  for (double c : components_) m = std::max(m, std::fabs(c));
  return m;
}

void TensorValue::require_same_shape(const TensorValue& other) const {
  if (signature_ != other.signature_ || dimension_ != other.dimension_)
    throw SignatureError("tensor shapes differ");
}

TensorValue& TensorValue::operator+=(const TensorValue& other) {
  require_same_shape(other);
  for (std::size_t i = 0; i < components_.size(); ++i) components_[i] += other.components_[i];
  symmetry_ = Symmetry::None;
  return *this;
}

TensorValue& TensorValue::operator-=(const TensorValue& other) {
  require_same_shape(other);
  for (std::size_t i = 0; i < components_.size(); ++i) components_[i] -= other.components_[i];
  symmetry_ = Symmetry::None;
  return *this;
}

TensorValue& TensorValue::operator*=(double s) {
  for (double& c : components_) c *= s;
  return *this;
}

double max_abs_difference(const TensorValue& a, const TensorValue& b) {
  if (a.signature() != b.signature() || a.dimension() != b.dimension())
    throw SignatureError("tensor shapes differ");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a.components()[i] - b.components()[i]));
  return m;
}

// ---------------------------------------------------------------------------

struct TensorField::Impl {
  Signature signature;
  std::size_t dimension = 0;
  std::vector<expr::Expression> components;
  std::vector<std::vector<expr::Expression>> partials;  // [i][component]
  Callback callback;
  double step = kDefaultStep;
};

TensorField TensorField::from_expressions(Signature signature, std::size_t dimension,
                                          std::vector<expr::Expression> components) {
  require_dimension(dimension);
  if (components.size() != component_count(signature.size(), dimension))
    throw SignatureError("expected " + std::to_string(component_count(signature.size(), dimension)) +
                         " component expressions, got " + std::to_string(components.size()));
  for (const auto& c : components)
    if (c.dimension() != dimension) throw SignatureError("component expression lives on a different chart");
  auto impl = std::make_shared<Impl>();
  impl->signature = std::move(signature);
  impl->dimension = dimension;
  impl->partials.resize(dimension);
  for (std::size_t i = 0; i < dimension; ++i) {
    impl->partials[i].reserve(components.size());
    for (const auto& c : components) impl->partials[i].push_back(c.derivative(i));
  }
  impl->components = std::move(components);
  return TensorField(std::move(impl));
}

TensorField TensorField::from_callback(Signature signature, std::size_t dimension, Callback callback,
                                       double step) {
  require_dimension(dimension);
  if (!callback) throw std::invalid_argument("empty field callback");
  if (!(step > 0.0)) throw std::invalid_argument("finite-difference step must be positive");
  auto impl = std::make_shared<Impl>();
  impl->signature = std::move(signature);
  impl->dimension = dimension;
  impl->callback = std::move(callback);
  impl->step = step;
  return TensorField(std::move(impl));
}

TensorField TensorField::constant(const TensorValue& value) {
  std::vector<expr::Expression> comps;
  comps.reserve(value.size());
  for (double c : value.components()) comps.push_back(expr::Expression::constant(c, value.dimension()));
  return from_expressions(value.signature(), value.dimension(), std::move(comps));
}

TensorField TensorField::zero(Signature signature, std::size_t dimension) {
  return constant(TensorValue(std::move(signature), dimension));
}

const Signature& TensorField::signature() const noexcept { return impl_->signature; }
std::size_t TensorField::dimension() const noexcept { return impl_->dimension; }
bool TensorField::is_expression_backed() const noexcept { return !impl_->callback; }
double TensorField::step() const noexcept { return impl_->step; }

const std::vector<expr::Expression>* TensorField::expressions() const noexcept {
  return is_expression_backed() ? &impl_->components : nullptr;
}

TensorValue TensorField::evaluate(const ChartPoint& p) const {
  if (p.dimension() != impl_->dimension) throw SignatureError("point dimension does not match chart");
  if (impl_->callback) {
    TensorValue v = impl_->callback(p);
    if (v.signature() != impl_->signature || v.dimension() != impl_->dimension)
      throw SignatureError("field callback returned a tensor of the wrong shape");
    return v;
  }
  std::vector<double> out;
  out.reserve(impl_->components.size());
  for (const auto& c : impl_->components) out.push_back(c.evaluate(p.coords()));
  return TensorValue(impl_->signature, impl_->dimension, std::move(out));
}

TensorValue TensorField::partial(const ChartPoint& p, std::size_t i) const {
  if (p.dimension() != impl_->dimension) throw SignatureError("point dimension does not match chart");
  if (i >= impl_->dimension) throw std::out_of_range("partial derivative index out of range");
  if (!impl_->callback) {
    std::vector<double> out;
    out.reserve(impl_->partials[i].size());
    for (const auto& c : impl_->partials[i]) out.push_back(c.evaluate(p.coords()));
    return TensorValue(impl_->signature, impl_->dimension, std::move(out));
  }
  const double h = impl_->step;
  try {
    TensorValue fwd = evaluate(p.shifted(i, h));
    const TensorValue bwd = evaluate(p.shifted(i, -h));
    fwd -= bwd;
    fwd *= 1.0 / (2.0 * h);
    return fwd;
  } catch (const DomainError& e) {
    throw StencilError(std::string("finite-difference stencil failure along x") + std::to_string(i) + ": " +
                       e.what());
  }
}

// ---------------------------------------------------------------------------

TensorField operator+(const TensorField& a, const TensorField& b) {
  if (a.signature() != b.signature() || a.dimension() != b.dimension())
    throw SignatureError("cannot add fields of different shape");
  if (a.is_expression_backed() && b.is_expression_backed()) {
    const auto& ea = *a.expressions();
    const auto& eb = *b.expressions();
    std::vector<expr::Expression> comps;
    comps.reserve(ea.size());
    for (std::size_t c = 0; c < ea.size(); ++c) comps.push_back(ea[c] + eb[c]);
    return TensorField::from_expressions(a.signature(), a.dimension(), std::move(comps));
  }
  return TensorField::from_callback(
      a.signature(), a.dimension(), [a, b](const ChartPoint& p) { return a.evaluate(p) + b.evaluate(p); },
      std::max(a.is_expression_backed() ? 0.0 : a.step(), b.is_expression_backed() ? 0.0 : b.step()));
}

TensorField scale(const TensorField& f, const expr::Expression& factor) {
  if (f.is_expression_backed()) {
    std::vector<expr::Expression> comps;
    for (const auto& c : *f.expressions()) comps.push_back(factor * c);
    return TensorField::from_expressions(f.signature(), f.dimension(), std::move(comps));
  }
  return TensorField::from_callback(
      f.signature(), f.dimension(),
      [f, factor](const ChartPoint& p) { return factor.evaluate(p.coords()) * f.evaluate(p); }, f.step());
}

TensorField tensor_product(const TensorField& a, const TensorField& b) {
  if (a.dimension() != b.dimension()) throw SignatureError("fields live on different charts");
  Signature sig = a.signature();
  sig.insert(sig.end(), b.signature().begin(), b.signature().end());
  if (a.is_expression_backed() && b.is_expression_backed()) {
    std::vector<expr::Expression> comps;
    for (const auto& x : *a.expressions())
      for (const auto& y : *b.expressions()) comps.push_back(x * y);
    return TensorField::from_expressions(std::move(sig), a.dimension(), std::move(comps));
  }
  return TensorField::from_callback(
      std::move(sig), a.dimension(),
      [a, b](const ChartPoint& p) { return tensor_product(a.evaluate(p), b.evaluate(p)); },
      std::max(a.is_expression_backed() ? 0.0 : a.step(), b.is_expression_backed() ? 0.0 : b.step()));
}

TensorValue lie_bracket(const TensorField& x, const TensorField& y, const ChartPoint& p) {
  if (!is_signature(x, signatures::kVector) || !is_signature(y, signatures::kVector))
    throw SignatureError("lie_bracket needs two vector fields");
  const std::size_t n = x.dimension();
  if (y.dimension() != n) throw SignatureError("fields live on different charts");
  const TensorValue xv = x.evaluate(p);
  const TensorValue yv = y.evaluate(p);
  TensorValue out(signatures::kVector, n);
  for (std::size_t i = 0; i < n; ++i) {
    const TensorValue dy = y.partial(p, i);
    const TensorValue dx = x.partial(p, i);
    for (std::size_t k = 0; k < n; ++k) out(k) += xv(i) * dy(k) - yv(i) * dx(k);
  }
  return out;
}

TensorField lie_bracket_field(const TensorField& x, const TensorField& y) {
  if (!is_signature(x, signatures::kVector) || !is_signature(y, signatures::kVector))
    throw SignatureError("lie_bracket needs two vector fields");
  const std::size_t n = x.dimension();
  if (x.is_expression_backed() && y.is_expression_backed()) {
    const auto& xe = *x.expressions();
    const auto& ye = *y.expressions();
    std::vector<expr::Expression> comps;
    for (std::size_t k = 0; k < n; ++k) {
      auto acc = expr::Expression::constant(0.0, n);
      for (std::size_t i = 0; i < n; ++i)
        acc = acc + (xe[i] * ye[k].derivative(i) - ye[i] * xe[k].derivative(i));
      comps.push_back(acc);
    }
    return TensorField::from_expressions(signatures::kVector, n, std::move(comps));
  }
  return TensorField::from_callback(
      signatures::kVector, n, [x, y](const ChartPoint& p) { return lie_bracket(x, y, p); }, kNestedStep);
}

TensorValue exterior_derivative_1form(const TensorField& tau, const ChartPoint& p) {
  if (!is_signature(tau, signatures::kCovector)) throw SignatureError("exterior derivative needs a 1-form");
  const std::size_t n = tau.dimension();
  std::vector<TensorValue> d;
  for (std::size_t i = 0; i < n; ++i) d.push_back(tau.partial(p, i));
  TensorValue out(signatures::kBilinear, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = d[i](j) - d[j](i);
      out(i, j) = v;
      out(j, i) = -v;
    }
  out.declare(Symmetry::AntisymmetricLastTwo);
  return out;
}

TensorValue lie_derivative_metric(const TensorField& xi, const TensorField& g, const ChartPoint& p) {
  if (!is_signature(xi, signatures::kVector) || !is_signature(g, signatures::kBilinear))
    throw SignatureError("lie_derivative_metric needs a vector field and a (0,2) field");
  const std::size_t n = xi.dimension();
  if (g.dimension() != n) throw SignatureError("fields live on different charts");
  const TensorValue xv = xi.evaluate(p);
  const TensorValue gv = g.evaluate(p);
  std::vector<TensorValue> dg, dxi;
  for (std::size_t k = 0; k < n; ++k) {
    dg.push_back(g.partial(p, k));
    dxi.push_back(xi.partial(p, k));
  }
  TensorValue out(signatures::kBilinear, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < n; ++k)
        acc += xv(k) * dg[k](i, j) + gv(k, j) * dxi[i](k) + gv(i, k) * dxi[j](k);
      out(i, j) = acc;
    }
  return out;
}

TensorValue lie_derivative_1form(const TensorField& xi, const TensorField& tau, const ChartPoint& p) {
  if (!is_signature(xi, signatures::kVector) || !is_signature(tau, signatures::kCovector))
    throw SignatureError("lie_derivative_1form needs a vector field and a 1-form");
  const std::size_t n = xi.dimension();
  const TensorValue xv = xi.evaluate(p);
  const TensorValue tv = tau.evaluate(p);
  TensorValue out(signatures::kCovector, n);
  for (std::size_t k = 0; k < n; ++k) {
    const TensorValue dt = tau.partial(p, k);
    const TensorValue dx = xi.partial(p, k);
    for (std::size_t i = 0; i < n; ++i) out(i) += xv(k) * dt(i);
    // tau_m d_k xi^m
    for (std::size_t m = 0; m < n; ++m) out(k) += tv(m) * dx(m);
  }
  return out;
}

TensorValue tensor_product(const TensorValue& a, const TensorValue& b) {
  if (a.dimension() != b.dimension()) throw SignatureError("tensors live on different charts");
  Signature sig = a.signature();
  sig.insert(sig.end(), b.signature().begin(), b.signature().end());
  std::vector<double> comps;
  comps.reserve(a.size() * b.size());
  for (double x : a.components())
    for (double y : b.components()) comps.push_back(x * y);
  return TensorValue(std::move(sig), a.dimension(), std::move(comps));
}

TensorValue contract(const TensorValue& a, std::size_t slot_a, std::size_t slot_b) {
  if (slot_a >= a.rank() || slot_b >= a.rank() || slot_a == slot_b)
    throw SignatureError("invalid contraction slots");
  if (a.signature()[slot_a] == a.signature()[slot_b])
    throw SignatureError("contraction must pair an upper slot with a lower slot");
  const std::size_t n = a.dimension();
  Signature sig;
  for (std::size_t s = 0; s < a.rank(); ++s)
    if (s != slot_a && s != slot_b) sig.push_back(a.signature()[s]);
  TensorValue out(sig, n);
  const std::size_t rank = sig.size();
  for (std::size_t flat = 0; flat < out.size(); ++flat) {
    const auto rest = unflatten(flat, rank, n);
    std::vector<std::size_t> full(a.rank());
    double acc = 0.0;
    for (std::size_t m = 0; m < n; ++m) {
      std::size_t r = 0;
      for (std::size_t s = 0; s < a.rank(); ++s) full[s] = (s == slot_a || s == slot_b) ? m : rest[r++];
      acc += a.at(full);
    }
    out.components()[flat] = acc;
  }
  return out;
}

TensorValue contract(const TensorValue& a, const TensorValue& b,
                     std::span<const std::pair<std::size_t, std::size_t>> pairs) {
  TensorValue t = tensor_product(a, b);
  std::vector<std::pair<std::size_t, std::size_t>> slots;
  for (const auto& [sa, sb] : pairs) {
    if (sa >= a.rank() || sb >= b.rank()) throw SignatureError("contraction slot out of range");
    slots.emplace_back(sa, a.rank() + sb);
  }
  for (std::size_t k = 0; k < slots.size(); ++k) {
    const auto [s1, s2] = slots[k];
    t = contract(t, s1, s2);
    for (std::size_t m = k + 1; m < slots.size(); ++m) {
      auto shift = [&](std::size_t s) { return s - (s > s1 ? 1 : 0) - (s > s2 ? 1 : 0); };
      if (slots[m].first == s1 || slots[m].first == s2 || slots[m].second == s1 || slots[m].second == s2)
        throw SignatureError("slot used in more than one contraction pair");
      slots[m] = {shift(slots[m].first), shift(slots[m].second)};
    }
  }
  return t;
}

// ---------------------------------------------------------------------------

DomainBox::DomainBox(std::vector<Interval> intervals) : intervals_(std::move(intervals)) {
  require_dimension(intervals_.size());
  for (const auto& iv : intervals_)
    if (!(std::isfinite(iv.lo) && std::isfinite(iv.hi) && iv.lo <= iv.hi))
      throw std::invalid_argument("domain box interval must satisfy lo <= hi and be finite");
}

DomainBox DomainBox::cube(std::size_t dimension, double lo, double hi) {
  return DomainBox(std::vector<Interval>(dimension, Interval{lo, hi}));
}

bool DomainBox::contains(const ChartPoint& p) const {
  if (p.dimension() != dimension()) return false;
  for (std::size_t i = 0; i < dimension(); ++i)
    if (p[i] < intervals_[i].lo || p[i] > intervals_[i].hi) return false;
  return true;
}

ChartPoint DomainBox::center() const {
  std::vector<double> c;
  for (const auto& iv : intervals_) c.push_back(0.5 * (iv.lo + iv.hi));
  return ChartPoint(std::move(c));
}

std::vector<ChartPoint> sample_cloud(const DomainBox& box, std::size_t count, std::uint64_t seed) {
  // mt19937_64 output is fixed by the standard; distributions are not.
  std::mt19937_64 rng(seed);
  std::vector<ChartPoint> out;
  out.reserve(count);
  for (std::size_t s = 0; s < count; ++s) {
    std::vector<double> c;
    for (const auto& iv : box.intervals()) {
      const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      c.push_back(iv.lo + u * (iv.hi - iv.lo));
    }
    out.emplace_back(std::move(c));
  }
  return out;
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers =
      std::min<std::size_t>(count, std::max(1u, std::thread::hardware_concurrency()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(count);
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < count; i += workers) {
          try {
            fn(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
  }
  // lowest failing index wins, independent of scheduling
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace lightlike
