#include "lightlike/cli.hpp"

#include <charconv>
#include <cmath>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lightlike/errors.hpp"
#include "lightlike/manifest.hpp"
#include "lightlike/report.hpp"

namespace lightlike {

namespace {

constexpr std::size_t kMaxGridPoints = 100000;

struct SharedOptions {
  std::string manifest;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  double tol_analytic = 0.0;
  double tol_fd = 0.0;
  std::string format = "text";
  CLI::Option* samples_opt = nullptr;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* tol_analytic_opt = nullptr;
  CLI::Option* tol_fd_opt = nullptr;
};

void add_shared(CLI::App* sub, SharedOptions& o) {
  sub->add_option("manifest", o.manifest, "Manifold manifest file")->required();
  o.samples_opt = sub->add_option("--samples", o.samples, "Number of sample points")->check(CLI::PositiveNumber);
  o.seed_opt = sub->add_option("--seed", o.seed, "Sampling seed");
  o.tol_analytic_opt =
      sub->add_option("--tol-analytic", o.tol_analytic, "Tolerance for exact-partial residuals")
          ->check(CLI::PositiveNumber);
  o.tol_fd_opt =
      sub->add_option("--tol-fd", o.tol_fd, "Tolerance for finite-difference residuals")->check(CLI::PositiveNumber);
  sub->add_option("--format", o.format, "Report format")->check(CLI::IsMember({"text", "machine"}));
}

VerificationConfig resolve_config(const ManifoldManifest& m, const SharedOptions& o) {
  VerificationConfig cfg = m.config();
  if (o.samples_opt->count()) cfg.sample_count = o.samples;
  if (o.seed_opt->count()) cfg.seed = o.seed;
  if (o.tol_analytic_opt->count()) cfg.tolerances.analytic = o.tol_analytic;
  if (o.tol_fd_opt->count()) cfg.tolerances.finite_difference = o.tol_fd;
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  return cfg;
}

CommandReport base_report(const std::string& command, const ManifoldManifest& m, const VerificationConfig& cfg) {
  CommandReport r;
  r.command = command;
  r.manifest_name = m.name;
  r.manifest_digest = m.digest;
  r.dimension = m.dimension;
  r.nullity = m.nullity;
  r.seed = cfg.seed;
  r.samples = cfg.sample_count;
  r.tolerances = cfg.tolerances;
  return r;
}

void absorb(CommandReport& r, PipelineReport p) {
  r.pipeline = p.pipeline;
  r.conditions = std::move(p.conditions);
  r.status = to_string(p.status);
  r.failed_condition = std::move(p.failed_condition);
  r.message = std::move(p.message);
  r.diagnostics = std::move(p.diagnostics);
  r.exit_code = exit_code_for(p.status);
}

ChartPoint parse_point(const std::string& text, std::size_t n) {
  std::vector<double> coords;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = text.find(',', start);
    const std::string part = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (part.empty() || ec != std::errc() || ptr != part.data() + part.size() || !std::isfinite(v))
      throw InputError("--point '" + text + "': '" + part + "' is not a finite number");
    coords.push_back(v);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (coords.size() != n)
    throw InputError("--point '" + text + "': expected " + std::to_string(n) + " coordinates, got " +
                     std::to_string(coords.size()));
  return ChartPoint(std::move(coords));
}

std::vector<ChartPoint> grid_points(const DomainBox& box, std::size_t k) {
  const std::size_t n = box.dimension();
  std::size_t total = 1;
  for (std::size_t a = 0; a < n; ++a) {
    total *= k;
    if (total > kMaxGridPoints)
      throw InputError("--grid " + std::to_string(k) + " yields more than " + std::to_string(kMaxGridPoints) +
                       " points");
  }
  std::vector<ChartPoint> out;
  out.reserve(total);
  std::vector<std::size_t> idx(n, 0);
  for (std::size_t s = 0; s < total; ++s) {
    std::vector<double> c(n);
    for (std::size_t a = 0; a < n; ++a) {
      const auto& iv = box.intervals()[a];
      c[a] = k == 1 ? 0.5 * (iv.lo + iv.hi)
                    : iv.lo + (iv.hi - iv.lo) * static_cast<double>(idx[a]) / static_cast<double>(k - 1);
    }
    out.emplace_back(std::move(c));
    for (std::size_t a = n; a-- > 0;) {
      if (++idx[a] < k) break;
      idx[a] = 0;
    }
  }
  return out;
}

CommandReport run_validate(const ManifoldManifest& m, const VerificationConfig& cfg) {
  CommandReport r = base_report("validate", m, cfg);
  r.pipeline = "bundle-validation";
  r.conditions = validate_bundle(m.bundle(), cfg).conditions;
  r.status = to_string(PipelineStatus::Passed);
  for (const auto& c : r.conditions)
    if (!c.passed) {
      r.status = to_string(PipelineStatus::HypothesisFailed);
      r.failed_condition = c.id;
      r.message = "condition '" + c.id + "' failed: " + c.description;
      r.exit_code = kExitConditionFailed;
      break;
    }
  return r;
}

CommandReport run_build(const ManifoldManifest& m, const VerificationConfig& cfg, std::vector<ChartPoint> points) {
  CommandReport r = base_report("build", m, cfg);
  r.pipeline = "koszul-construction";
  r.samples = points.size();
  try {
    const AugmentedMetric gbar = build_augmented_metric(m.bundle(), points);
    const ConnectionField gamma = koszul_connection(gbar, m.torsion, m.nonmetricity);
    ConnectionDump dump;
    dump.provenance = to_string(gamma.provenance());
    for (const auto& p : points) dump.coefficients.push_back(gamma.evaluate(p));
    dump.points = std::move(points);
    r.connection = std::move(dump);
    r.status = to_string(PipelineStatus::Passed);
  } catch (const DegeneracyError& e) {
    r.status = to_string(PipelineStatus::HypothesisFailed);
    r.failed_condition = "augmented-nondegenerate";
    r.message = e.what();
    r.exit_code = kExitConditionFailed;
  } catch (const ConsistencyFault& e) {
    r.status = to_string(PipelineStatus::ConsistencyFault);
    r.failed_condition = "construction-round-trip";
    r.message = e.what();
    r.exit_code = kExitConsistencyFault;
  }
  return r;
}

}  // namespace

int exit_code_for(PipelineStatus status) noexcept {
  switch (status) {
    case PipelineStatus::Passed: return kExitPassed;
    case PipelineStatus::HypothesisFailed:
    case PipelineStatus::ConclusionFailed: return kExitConditionFailed;
    case PipelineStatus::ConsistencyFault: return kExitConsistencyFault;
  }
  return kExitConsistencyFault;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Connections on light-like manifolds: validate, build and verify manifold manifests.", "lightlike"};
  app.require_subcommand(1, 1);

  SharedOptions validate_opts, build_opts, verify_opts, prop1_opts;
  auto* validate = app.add_subcommand("validate", "Check the degenerate-metric bundle invariants");
  add_shared(validate, validate_opts);

  auto* build = app.add_subcommand("build", "Dump connection coefficients at points or on a grid");
  add_shared(build, build_opts);
  std::vector<std::string> point_args;
  std::size_t grid = 5;
  auto* point_opt = build->add_option("--point", point_args, "Chart point c0,c1,... (repeatable)");
  point_opt->allow_extra_args(false);
  auto* grid_opt = build->add_option("--grid", grid, "Grid points per axis over the domain box")
                       ->check(CLI::PositiveNumber);
  point_opt->excludes(grid_opt);

  auto* verify = app.add_subcommand("verify", "Run the torsion/non-metricity construction pipeline");
  add_shared(verify, verify_opts);

  auto* prop1 = app.add_subcommand("prop1", "Run the nullity-one Levi-Civita round trip");
  add_shared(prop1, prop1_opts);
  std::string direction = "forward";
  prop1->add_option("--direction", direction, "Pipeline direction")->check(CLI::IsMember({"forward", "reverse"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitPassed : kExitInputError;
  }

  const SharedOptions& opts = validate->parsed()  ? validate_opts
                              : build->parsed()   ? build_opts
                              : verify->parsed()  ? verify_opts
                                                  : prop1_opts;
  try {
    const ManifoldManifest m = load_manifest(opts.manifest);
    const VerificationConfig cfg = resolve_config(m, opts);
    CommandReport report;
    if (validate->parsed()) {
      report = run_validate(m, cfg);
    } else if (build->parsed()) {
      std::vector<ChartPoint> points;
      for (const auto& s : point_args) points.push_back(parse_point(s, m.dimension));
      if (points.empty()) points = grid_points(m.box, grid);
      report = run_build(m, cfg, std::move(points));
    } else if (verify->parsed()) {
      report = base_report("verify", m, cfg);
      absorb(report, run_theorem_ii(m.bundle(), m.torsion, m.nonmetricity, cfg));
    } else {
      report = base_report("prop1", m, cfg);
      std::optional<ConnectionField> user;
      if (m.connection) user = ConnectionField::from_field(*m.connection);
      absorb(report, run_proposition1(m.bundle(), direction == "forward" ? Direction::Forward : Direction::Reverse,
                                      cfg, user));
    }
    out << (opts.format == "machine" ? render_machine(report) : render_text(report));
    return report.exit_code;
  } catch (const ConsistencyFault& e) {
    err << "lightlike: internal consistency fault: " << e.what() << "\n";
    return kExitConsistencyFault;
  } catch (const DegeneracyError& e) {
    err << "lightlike: " << e.what() << "\n";
    return kExitConditionFailed;
  } catch (const Error& e) {
    err << "lightlike: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    err << "lightlike: internal error: " << e.what() << "\n";
    return kExitConsistencyFault;
  }
}

}  // namespace lightlike
