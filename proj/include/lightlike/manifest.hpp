#pragma once

// Manifold manifests: the YAML serialization of a light-like bundle with its
// torsion, non-metricity and verification settings. See docs/manifest.md and
// docs/manifest.schema.json.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lightlike/condition.hpp"
#include "lightlike/connection.hpp"
#include "lightlike/degenerate.hpp"
#include "lightlike/expr.hpp"

namespace lightlike {

struct VerificationOverrides {
  std::optional<std::size_t> samples;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol_exact;
  std::optional<double> tol_analytic;
  std::optional<double> tol_fd;

  /// Applies every set field on top of `cfg`.
  void apply(VerificationConfig& cfg) const;
};

struct ManifoldManifest {
  std::string name;
  std::string description;
  std::string digest;  // SHA-256 of the manifest bytes, lowercase hex
  std::size_t dimension = 0;
  std::size_t nullity = 0;
  std::size_t index = 0;
  DomainBox box = DomainBox::cube(1, 0.0, 1.0);
  expr::ParameterMap parameters;
  TensorField metric = TensorField::zero(signatures::kBilinear, 1);
  std::vector<TensorField> radical_frame;
  std::vector<TensorField> coframe;
  TorsionField torsion = TorsionField::zero(1);
  NonMetricityField nonmetricity = NonMetricityField::zero(1);
  std::optional<TensorField> connection;
  VerificationOverrides verification;

  DegenerateMetricBundle bundle() const;

  /// Defaults, then the manifest's verification block.
  VerificationConfig config() const;
};

/// Parses and validates manifest text. Throws InputError naming the line and
/// field at fault.
ManifoldManifest parse_manifest(std::string_view text);

ManifoldManifest load_manifest(const std::filesystem::path& path);

std::string sha256_hex(std::string_view bytes);

}  // namespace lightlike
