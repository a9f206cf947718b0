#include "lightlike/degenerate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "lightlike/errors.hpp"
#include "linalg.hpp"

namespace lightlike {

DegenerateMetricBundle::DegenerateMetricBundle(TensorField metric, std::size_t nullity, std::size_t index,
                                               std::vector<TensorField> radical_frame,
                                               std::vector<TensorField> coframe, DomainBox box)
    : metric_(std::move(metric)), nullity_(nullity), index_(index), radical_frame_(std::move(radical_frame)),
      coframe_(std::move(coframe)), box_(std::move(box)) {
  const std::size_t n = metric_.dimension();
  if (metric_.signature() != signatures::kBilinear) throw SignatureError("metric must be a (0,2) field");
  if (nullity_ < 1 || nullity_ >= n + 1) throw SignatureError("nullity degree must be in [1, n]");
  if (index_ + nullity_ > n) throw SignatureError("index plus nullity exceeds the dimension");
  if (radical_frame_.size() != nullity_ || coframe_.size() != nullity_)
    throw SignatureError("radical frame and coframe must each have exactly r fields");
  for (const auto& xi : radical_frame_)
    if (xi.signature() != signatures::kVector || xi.dimension() != n)
      throw SignatureError("radical frame entries must be vector fields on the chart");
  for (const auto& tau : coframe_)
    if (tau.signature() != signatures::kCovector || tau.dimension() != n)
      throw SignatureError("coframe entries must be 1-form fields on the chart");
  if (box_.dimension() != n) throw SignatureError("domain box dimension does not match the chart");
}

bool DegenerateMetricBundle::exact_partials() const noexcept {
  auto exact = [](const TensorField& f) { return f.is_expression_backed(); };
  return exact(metric_) && std::all_of(radical_frame_.begin(), radical_frame_.end(), exact) &&
         std::all_of(coframe_.begin(), coframe_.end(), exact);
}

NullityIndex nullity_and_index(const TensorValue& g) {
  const auto eig = linalg::symmetric_eigen(g);
  const Eigen::VectorXd& lambda = eig.eigenvalues();
  const double largest = lambda.cwiseAbs().maxCoeff();
  const double cutoff = linalg::kRankTolerance * largest;
  NullityIndex out;
  for (Eigen::Index k = 0; k < lambda.size(); ++k) {
    if (std::fabs(lambda(k)) <= cutoff)
      ++out.nullity;
    else if (lambda(k) < 0.0)
      ++out.index;
  }
  return out;
}

std::vector<std::vector<double>> radical_basis(const TensorValue& g, std::size_t expected_nullity) {
  if (g.signature() != signatures::kBilinear) throw SignatureError("radical_basis needs a (0,2) value");
  const auto eig = linalg::symmetric_eigen(g);
  const Eigen::VectorXd& lambda = eig.eigenvalues();
  const double cutoff = linalg::kRankTolerance * lambda.cwiseAbs().maxCoeff();
  std::vector<std::vector<double>> basis;
  for (Eigen::Index k = 0; k < lambda.size(); ++k) {
    if (std::fabs(lambda(k)) > cutoff) continue;
    const Eigen::VectorXd v = eig.eigenvectors().col(k);
    basis.emplace_back(v.data(), v.data() + v.size());
  }
  if (basis.size() != expected_nullity)
    throw NullityMismatch("computed nullity " + std::to_string(basis.size()) + " differs from declared " +
                          std::to_string(expected_nullity));
  return basis;
}

std::vector<std::vector<double>> radical_basis(const TensorField& g, const ChartPoint& p,
                                               std::size_t expected_nullity) {
  return radical_basis(g.evaluate(p), expected_nullity);
}

bool BundleReport::passed() const {
  return std::all_of(conditions.begin(), conditions.end(), [](const auto& c) { return c.passed; });
}

namespace {

std::size_t numerical_rank(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0;
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& sigma = svd.singularValues();
  const double cutoff = linalg::kRankTolerance * sigma.maxCoeff();
  std::size_t rank = 0;
  for (Eigen::Index k = 0; k < sigma.size(); ++k)
    if (sigma(k) > cutoff) ++rank;
  return rank;
}

}  // namespace

BundleReport validate_bundle(const DegenerateMetricBundle& b, const VerificationConfig& cfg) {
  const auto samples = cfg.samples(b.box());
  const std::size_t n = b.dimension();
  const std::size_t r = b.nullity();
  const double tol = cfg.tier(b.exact_partials());
  BundleReport report;

  report.conditions.push_back(sample_condition("metric-symmetry", "g(p) symmetric", samples,
                                               cfg.tolerances.exact, [&](const ChartPoint& p) {
                                                 return b.metric().evaluate(p).asymmetry(Symmetry::SymmetricLastTwo);
                                               }));

  report.conditions.push_back(sample_condition(
      "constant-nullity", "nullity of g(p) equals the declared degree r", samples, 0.0, [&](const ChartPoint& p) {
        const auto ni = nullity_and_index(b.metric().evaluate(p));
        return std::fabs(static_cast<double>(ni.nullity) - static_cast<double>(r));
      }));

  report.conditions.push_back(sample_condition(
      "declared-index", "negative eigenvalue count of g(p) equals the declared index", samples, 0.0,
      [&](const ChartPoint& p) {
        const auto ni = nullity_and_index(b.metric().evaluate(p));
        return std::fabs(static_cast<double>(ni.index) - static_cast<double>(b.index()));
      }));

  report.conditions.push_back(sample_condition(
      "radical-membership", "g(xi_i, e_v) = 0 for every basis vector e_v", samples, tol, [&](const ChartPoint& p) {
        const TensorValue g = b.metric().evaluate(p);
        double worst = 0.0;
        for (const auto& xi_field : b.radical_frame()) {
          const TensorValue xi = xi_field.evaluate(p);
          for (std::size_t v = 0; v < n; ++v) {
            double acc = 0.0;
            for (std::size_t a = 0; a < n; ++a) acc += g(a, v) * xi(a);
            worst = std::max(worst, std::fabs(acc));
          }
        }
        return worst;
      }));

  report.conditions.push_back(sample_condition(
      "frame-independence", "xi_1..xi_r linearly independent (rank deficit)", samples, 0.0,
      [&](const ChartPoint& p) {
        Eigen::MatrixXd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(r));
        for (std::size_t i = 0; i < r; ++i) {
          const TensorValue xi = b.radical_frame()[i].evaluate(p);
          for (std::size_t a = 0; a < n; ++a) m(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(i)) = xi(a);
        }
        return static_cast<double>(r - numerical_rank(m));
      }));

  report.conditions.push_back(sample_condition(
      "coframe-duality", "tau_i(xi_j) = delta_ij", samples, tol, [&](const ChartPoint& p) {
        double worst = 0.0;
        for (std::size_t i = 0; i < r; ++i) {
          const TensorValue tau = b.coframe()[i].evaluate(p);
          for (std::size_t j = 0; j < r; ++j) {
            const TensorValue xi = b.radical_frame()[j].evaluate(p);
            double pairing = 0.0;
            for (std::size_t a = 0; a < n; ++a) pairing += tau(a) * xi(a);
            worst = std::max(worst, std::fabs(pairing - (i == j ? 1.0 : 0.0)));
          }
        }
        return worst;
      }));

  return report;
}

TensorField augmented_metric_field(const DegenerateMetricBundle& b) {
  TensorField gbar = b.metric();
  for (const auto& tau : b.coframe()) gbar = gbar + tensor_product(tau, tau);
  return gbar;
}

AugmentedMetric build_augmented_metric(const DegenerateMetricBundle& b, const std::vector<ChartPoint>& samples) {
  AugmentedMetric out{augmented_metric_field(b)};
  for (const auto& p : samples) {
    const double smallest = linalg::min_abs_eigenvalue(out.metric.evaluate(p));
    if (!(smallest > linalg::kDegeneracyTolerance)) {
      std::ostringstream msg;
      msg << "augmented metric is degenerate at (";
      for (std::size_t i = 0; i < p.dimension(); ++i) msg << (i ? ", " : "") << p[i];
      msg << "): min |eigenvalue| = " << smallest;
      throw DegeneracyError(msg.str());
    }
  }
  return out;
}

std::pair<std::vector<TensorField>, std::vector<TensorField>> constant_frame_for(const TensorValue& g,
                                                                                 std::size_t nullity) {
  const auto basis = radical_basis(g, nullity);
  std::vector<TensorField> frame, coframe;
  for (const auto& v : basis) {
    frame.push_back(TensorField::constant(TensorValue::vector(v)));
    coframe.push_back(TensorField::constant(TensorValue::covector(v)));
  }
  return {std::move(frame), std::move(coframe)};
}

}  // namespace lightlike
