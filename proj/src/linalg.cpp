#include "linalg.hpp"

#include <cmath>
#include <sstream>

#include "lightlike/errors.hpp"

namespace lightlike::linalg {

Eigen::MatrixXd to_matrix(const TensorValue& bilinear) {
  if (bilinear.rank() != 2) throw SignatureError("expected a rank-2 tensor");
  const auto n = static_cast<Eigen::Index>(bilinear.dimension());
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = bilinear(i, j);
  return m;
}

Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> symmetric_eigen(const TensorValue& bilinear) {
  const Eigen::MatrixXd m = to_matrix(bilinear);
  const Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(sym);
}

double min_abs_eigenvalue(const TensorValue& bilinear) {
  return symmetric_eigen(bilinear).eigenvalues().cwiseAbs().minCoeff();
}

TensorValue inverse_metric(const TensorValue& bilinear) {
  const double smallest = min_abs_eigenvalue(bilinear);
  if (!(smallest > kDegeneracyTolerance)) {
    std::ostringstream msg;
    msg << "metric is degenerate: min |eigenvalue| = " << smallest;
    throw DegeneracyError(msg.str());
  }
  const Eigen::MatrixXd inv = to_matrix(bilinear).inverse();
  const std::size_t n = bilinear.dimension();
  TensorValue out({Slot::Upper, Slot::Upper}, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      out(i, j) = 0.5 * (inv(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) +
                         inv(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)));
  return out;
}

}  // namespace lightlike::linalg
