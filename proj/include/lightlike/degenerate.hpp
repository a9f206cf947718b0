#pragma once

// Light-like structure on a chart: a degenerate metric g of constant nullity
// degree r, a frame xi_1..xi_r of its radical, a dual coframe tau_1..tau_r
// (tau_i(xi_j) = delta_ij) and the non-degenerate completion
//
//   gbar = g + sum_k tau_k (x) tau_k.

#include <cstddef>
#include <utility>
#include <vector>

#include "lightlike/condition.hpp"
#include "lightlike/tensor.hpp"

namespace lightlike {

class DegenerateMetricBundle {
public:
  /// Checks shapes only; numerical hypotheses are checked by validate_bundle.
  DegenerateMetricBundle(TensorField metric, std::size_t nullity, std::size_t index,
                         std::vector<TensorField> radical_frame, std::vector<TensorField> coframe, DomainBox box);

  const TensorField& metric() const noexcept { return metric_; }
  std::size_t nullity() const noexcept { return nullity_; }
  std::size_t index() const noexcept { return index_; }
  const std::vector<TensorField>& radical_frame() const noexcept { return radical_frame_; }
  const std::vector<TensorField>& coframe() const noexcept { return coframe_; }
  const DomainBox& box() const noexcept { return box_; }
  std::size_t dimension() const noexcept { return metric_.dimension(); }

  /// True when g, every xi_i and every tau_i have exact partials.
  bool exact_partials() const noexcept;

private:
  TensorField metric_;
  std::size_t nullity_;
  std::size_t index_;
  std::vector<TensorField> radical_frame_;
  std::vector<TensorField> coframe_;
  DomainBox box_;
};

struct AugmentedMetric {
  TensorField metric;
};

/// Euclidean-orthonormal basis of the null space of g(p). Eigenvalues below
/// 1e-10 times the largest |eigenvalue| count as zero. Throws NullityMismatch
/// when the computed nullity differs from `expected_nullity`.
std::vector<std::vector<double>> radical_basis(const TensorValue& g, std::size_t expected_nullity);
std::vector<std::vector<double>> radical_basis(const TensorField& g, const ChartPoint& p,
                                               std::size_t expected_nullity);

/// Numerical nullity and index (count of negative eigenvalues) of g(p).
struct NullityIndex {
  std::size_t nullity = 0;
  std::size_t index = 0;
};
NullityIndex nullity_and_index(const TensorValue& g);

struct BundleReport {
  std::vector<ConditionReport> conditions;
  bool passed() const;
};

/// Checks every bundle hypothesis over the sample cloud. Failures are report
/// entries, never exceptions.
BundleReport validate_bundle(const DegenerateMetricBundle& bundle, const VerificationConfig& cfg);

/// gbar = g + sum tau_k (x) tau_k as a field. Expression-backed when the
/// bundle is.
TensorField augmented_metric_field(const DegenerateMetricBundle& bundle);

/// Builds gbar and checks it is non-degenerate (min |eigenvalue| > 1e-10) at
/// every sample; throws DegeneracyError naming the first bad point otherwise.
AugmentedMetric build_augmented_metric(const DegenerateMetricBundle& bundle, const std::vector<ChartPoint>& samples);

/// Non-canonical convenience for constant metrics: xi_i from the radical
/// basis and tau_i its Euclidean dual, so that tau_i(xi_j) = delta_ij.
std::pair<std::vector<TensorField>, std::vector<TensorField>> constant_frame_for(const TensorValue& g,
                                                                                 std::size_t nullity);

}  // namespace lightlike
