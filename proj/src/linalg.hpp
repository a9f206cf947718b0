#pragma once

// Small dense linear algebra on chart-sized matrices, backed by Eigen.

#include <Eigen/Dense>

#include "lightlike/tensor.hpp"

namespace lightlike::linalg {

inline constexpr double kDegeneracyTolerance = 1e-10;
inline constexpr double kRankTolerance = 1e-10;

Eigen::MatrixXd to_matrix(const TensorValue& bilinear);

/// Eigen-decomposition of the symmetric part of a (0,2) value, ascending.
Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> symmetric_eigen(const TensorValue& bilinear);

/// Smallest |eigenvalue| of a symmetric (0,2) value.
double min_abs_eigenvalue(const TensorValue& bilinear);

/// Inverse of a non-degenerate symmetric (0,2) value as an (2,0) tensor.
/// Throws DegeneracyError when min |eigenvalue| <= kDegeneracyTolerance.
TensorValue inverse_metric(const TensorValue& bilinear);

}  // namespace lightlike::linalg
