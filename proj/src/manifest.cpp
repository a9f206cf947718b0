#include "lightlike/manifest.hpp"

#include <openssl/evp.h>
#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "lightlike/errors.hpp"

namespace lightlike {

namespace {

constexpr std::uint64_t kProbeSeed = 1;
constexpr std::size_t kProbeCount = 10;
constexpr double kProbeTolerance = 1e-12;

const std::set<std::string, std::less<>> kTopLevelKeys{
    "name",   "description", "dimension", "nullity",      "index",      "domain",       "parameters",
    "metric", "radical_frame", "coframe", "torsion", "nonmetricity", "connection", "verification"};

const std::set<std::string, std::less<>> kVerificationKeys{"samples", "seed", "tol_exact", "tol_analytic",
                                                           "tol_fd"};

const std::set<std::string, std::less<>> kReservedNames{"sin", "cos", "tan", "exp", "log", "sqrt", "pow"};

std::string at_line(const YAML::Node& node) {
  const auto mark = node.Mark();
  return mark.is_null() ? std::string() : "line " + std::to_string(mark.line + 1) + ": ";
}

[[noreturn]] void fail(const YAML::Node& node, const std::string& field, const std::string& message) {
  throw InputError(at_line(node) + "field '" + field + "': " + message);
}

template <class T>
T scalar_as(const YAML::Node& node, const std::string& field) {
  if (!node.IsScalar()) fail(node, field, "expected a scalar");
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    fail(node, field, "cannot convert '" + node.Scalar() + "'");
  }
}

std::size_t non_negative(const YAML::Node& node, const std::string& field) {
  const auto v = scalar_as<long long>(node, field);
  if (v < 0) fail(node, field, "must be non-negative");
  return static_cast<std::size_t>(v);
}

const YAML::Node required(const YAML::Node& root, const std::string& key) {
  const YAML::Node n = root[key];
  if (!n) throw InputError(at_line(root) + "missing required field '" + key + "'");
  return n;
}

void require_sequence(const YAML::Node& node, const std::string& field, std::size_t length) {
  if (!node.IsSequence()) fail(node, field, "expected a list");
  if (node.size() != length)
    fail(node, field,
         "dimension mismatch: expected " + std::to_string(length) + " entries, got " + std::to_string(node.size()));
}

struct Context {
  std::size_t n = 0;
  expr::ParameterMap params;
};

expr::Expression expression_at(const YAML::Node& node, const std::string& field, const Context& ctx) {
  if (!node.IsScalar()) fail(node, field, "expected an expression string");
  try {
    return expr::parse_expression(node.Scalar(), ctx.n, ctx.params);
  } catch (const ParseError& e) {
    fail(node, field, e.what());
  }
}

std::string indexed(const std::string& base, std::initializer_list<std::size_t> idx) {
  std::string s = base;
  for (auto i : idx) s += "[" + std::to_string(i) + "]";
  return s;
}

std::vector<expr::Expression> read_vector(const YAML::Node& node, const std::string& field, const Context& ctx) {
  require_sequence(node, field, ctx.n);
  std::vector<expr::Expression> out;
  for (std::size_t a = 0; a < ctx.n; ++a) out.push_back(expression_at(node[a], indexed(field, {a}), ctx));
  return out;
}

std::vector<expr::Expression> read_matrix(const YAML::Node& node, const std::string& field, const Context& ctx) {
  require_sequence(node, field, ctx.n);
  std::vector<expr::Expression> out;
  for (std::size_t a = 0; a < ctx.n; ++a) {
    require_sequence(node[a], indexed(field, {a}), ctx.n);
    for (std::size_t b = 0; b < ctx.n; ++b) out.push_back(expression_at(node[a][b], indexed(field, {a, b}), ctx));
  }
  return out;
}

// Rank-3 component arrays, either dense [a][b][c] lists or a sparse map with
// keys "a,b,c". Omitted sparse entries are zero.
std::vector<expr::Expression> read_rank3(const YAML::Node& node, const std::string& field, const Context& ctx) {
  const std::size_t n = ctx.n;
  std::vector<expr::Expression> out(n * n * n, expr::Expression::constant(0.0, n));
  if (node.IsMap()) {
    for (const auto& kv : node) {
      const std::string key = kv.first.as<std::string>();
      std::array<std::size_t, 3> idx{};
      std::stringstream ss(key);
      std::string part;
      std::size_t count = 0;
      while (std::getline(ss, part, ',')) {
        if (count >= 3) fail(kv.first, field, "key '" + key + "' must have exactly three indices");
        try {
          std::size_t used = 0;
          const long long v = std::stoll(part, &used);
          const bool trailing = part.find_first_not_of(" ", used) != std::string::npos;
          if (v < 0 || static_cast<std::size_t>(v) >= n || trailing) throw std::out_of_range(part);
          idx[count++] = static_cast<std::size_t>(v);
        } catch (const std::exception&) {
          fail(kv.first, field, "index '" + part + "' in key '" + key + "' is not in [0, " + std::to_string(n) + ")");
        }
      }
      if (count != 3) fail(kv.first, field, "key '" + key + "' must have exactly three indices");
      out[(idx[0] * n + idx[1]) * n + idx[2]] =
          expression_at(kv.second, field + "[" + key + "]", ctx);
    }
    return out;
  }
  require_sequence(node, field, n);
  for (std::size_t a = 0; a < n; ++a) {
    require_sequence(node[a], indexed(field, {a}), n);
    for (std::size_t b = 0; b < n; ++b) {
      require_sequence(node[a][b], indexed(field, {a, b}), n);
      for (std::size_t c = 0; c < n; ++c)
        out[(a * n + b) * n + c] = expression_at(node[a][b][c], indexed(field, {a, b, c}), ctx);
    }
  }
  return out;
}

std::string describe_point(const ChartPoint& p) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < p.dimension(); ++i) os << (i ? ", " : "") << p[i];
  os << ")";
  return os.str();
}

// Checks that the trailing pair of every component satisfies the symmetry
// (sign = +1) or antisymmetry (sign = -1), syntactically or on probe points.
void check_pair_symmetry(const std::vector<expr::Expression>& comps, std::size_t rank, std::size_t n, double sign,
                         const std::vector<ChartPoint>& probes, const YAML::Node& node, const std::string& field) {
  const std::size_t outer = rank == 2 ? 1 : n;
  for (std::size_t o = 0; o < outer; ++o)
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a; b < n; ++b) {
        const auto& ab = comps[(o * n + a) * n + b];
        const auto& ba = comps[(o * n + b) * n + a];
        if (sign > 0 && a != b && expr::structurally_equal(ab, ba)) continue;
        for (const auto& p : probes) {
          double x = 0.0, y = 0.0;
          try {
            x = ab.evaluate(p.coords());
            y = ba.evaluate(p.coords());
          } catch (const DomainError& e) {
            fail(node, field, std::string("evaluation failed at probe ") + describe_point(p) + ": " + e.what());
          }
          const double scale = std::max({1.0, std::fabs(x), std::fabs(y)});
          if (std::fabs(x - sign * y) > kProbeTolerance * scale) {
            const std::string lhs = rank == 2 ? indexed(field, {a, b}) : indexed(field, {o, a, b});
            const std::string rhs = rank == 2 ? indexed(field, {b, a}) : indexed(field, {o, b, a});
            std::ostringstream msg;
            msg << (sign > 0 ? "symmetry violation: " : "antisymmetry violation: ") << lhs << " = " << x << " but "
                << rhs << " = " << y << " at probe " << describe_point(p);
            fail(node, field, msg.str());
          }
        }
      }
}

}  // namespace

void VerificationOverrides::apply(VerificationConfig& cfg) const {
  if (samples) cfg.sample_count = *samples;
  if (seed) cfg.seed = *seed;
  if (tol_exact) cfg.tolerances.exact = *tol_exact;
  if (tol_analytic) cfg.tolerances.analytic = *tol_analytic;
  if (tol_fd) cfg.tolerances.finite_difference = *tol_fd;
}

DegenerateMetricBundle ManifoldManifest::bundle() const {
  return DegenerateMetricBundle(metric, nullity, index, radical_frame, coframe, box);
}

VerificationConfig ManifoldManifest::config() const {
  VerificationConfig cfg;
  verification.apply(cfg);
  return cfg;
}

ManifoldManifest parse_manifest(std::string_view text) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::ParserException& e) {
    throw InputError("line " + std::to_string(e.mark.line + 1) + ": malformed manifest: " + e.msg);
  }
  if (!root.IsMap()) throw InputError("manifest must be a mapping of fields");
  for (const auto& kv : root) {
    const auto key = kv.first.as<std::string>();
    if (!kTopLevelKeys.contains(key)) fail(kv.first, key, "unknown field");
  }

  ManifoldManifest m;
  m.digest = sha256_hex(text);
  if (root["name"]) m.name = scalar_as<std::string>(root["name"], "name");
  if (root["description"]) m.description = scalar_as<std::string>(root["description"], "description");

  Context ctx;
  {
    const YAML::Node dim = required(root, "dimension");
    ctx.n = non_negative(dim, "dimension");
    if (ctx.n < 1 || ctx.n > kMaxDimension)
      fail(dim, "dimension", "must be in [1, " + std::to_string(kMaxDimension) + "]");
  }
  const std::size_t n = ctx.n;
  m.dimension = n;
  {
    const YAML::Node r = required(root, "nullity");
    m.nullity = non_negative(r, "nullity");
    if (m.nullity < 1 || m.nullity > n) fail(r, "nullity", "must be in [1, dimension]");
  }
  m.index = root["index"] ? non_negative(root["index"], "index") : 0;
  if (m.index + m.nullity > n) fail(root["index"], "index", "index plus nullity exceeds dimension");

  if (const YAML::Node params = root["parameters"]) {
    if (!params.IsMap()) fail(params, "parameters", "expected a mapping of name to value");
    for (const auto& kv : params) {
      const auto name = kv.first.as<std::string>();
      const std::string field = "parameters." + name;
      const bool identifier = !name.empty() && (std::isalpha(static_cast<unsigned char>(name[0])) || name[0] == '_') &&
                              std::all_of(name.begin(), name.end(), [](char c) {
                                return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
                              });
      if (!identifier) fail(kv.first, field, "not a valid identifier");
      if (kReservedNames.contains(name)) fail(kv.first, field, "shadows a function name");
      if (name.size() > 1 && name[0] == 'x' &&
          std::all_of(name.begin() + 1, name.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
        fail(kv.first, field, "shadows a coordinate name");
      const double v = scalar_as<double>(kv.second, field);
      if (!std::isfinite(v)) fail(kv.second, field, "must be finite");
      ctx.params.emplace(name, v);
    }
  }
  m.parameters = ctx.params;

  {
    const YAML::Node dom = required(root, "domain");
    require_sequence(dom, "domain", n);
    std::vector<Interval> iv;
    for (std::size_t a = 0; a < n; ++a) {
      const std::string field = indexed("domain", {a});
      require_sequence(dom[a], field, 2);
      const double lo = scalar_as<double>(dom[a][0], field);
      const double hi = scalar_as<double>(dom[a][1], field);
      if (!(std::isfinite(lo) && std::isfinite(hi) && lo <= hi)) fail(dom[a], field, "need finite lo <= hi");
      iv.push_back({lo, hi});
    }
    m.box = DomainBox(std::move(iv));
  }
  const auto probes = sample_cloud(m.box, kProbeCount, kProbeSeed);

  {
    const YAML::Node g = required(root, "metric");
    auto comps = read_matrix(g, "metric", ctx);
    check_pair_symmetry(comps, 2, n, +1.0, probes, g, "metric");
    m.metric = TensorField::from_expressions(signatures::kBilinear, n, std::move(comps));
  }
  {
    const YAML::Node xi = required(root, "radical_frame");
    require_sequence(xi, "radical_frame", m.nullity);
    for (std::size_t i = 0; i < m.nullity; ++i)
      m.radical_frame.push_back(
          TensorField::from_expressions(signatures::kVector, n, read_vector(xi[i], indexed("radical_frame", {i}), ctx)));
  }
  {
    const YAML::Node tau = required(root, "coframe");
    require_sequence(tau, "coframe", m.nullity);
    for (std::size_t i = 0; i < m.nullity; ++i)
      m.coframe.push_back(
          TensorField::from_expressions(signatures::kCovector, n, read_vector(tau[i], indexed("coframe", {i}), ctx)));
  }
  if (const YAML::Node t = root["torsion"]) {
    auto comps = read_rank3(t, "torsion", ctx);
    check_pair_symmetry(comps, 3, n, -1.0, probes, t, "torsion");
    m.torsion = TorsionField(TensorField::from_expressions(signatures::kConnection, n, std::move(comps)));
  } else {
    m.torsion = TorsionField::zero(n);
  }
  if (const YAML::Node q = root["nonmetricity"]) {
    auto comps = read_rank3(q, "nonmetricity", ctx);
    check_pair_symmetry(comps, 3, n, +1.0, probes, q, "nonmetricity");
    m.nonmetricity = NonMetricityField(TensorField::from_expressions(signatures::kCovariant3, n, std::move(comps)));
  } else {
    m.nonmetricity = NonMetricityField::zero(n);
  }
  if (const YAML::Node c = root["connection"])
    m.connection = TensorField::from_expressions(signatures::kConnection, n, read_rank3(c, "connection", ctx));

  if (const YAML::Node v = root["verification"]) {
    if (!v.IsMap()) fail(v, "verification", "expected a mapping");
    for (const auto& kv : v) {
      const auto key = kv.first.as<std::string>();
      if (!kVerificationKeys.contains(key)) fail(kv.first, "verification." + key, "unknown field");
    }
    if (v["samples"]) {
      m.verification.samples = non_negative(v["samples"], "verification.samples");
      if (*m.verification.samples < 1) fail(v["samples"], "verification.samples", "must be at least 1");
    }
    if (v["seed"]) m.verification.seed = scalar_as<std::uint64_t>(v["seed"], "verification.seed");
    if (v["tol_exact"]) m.verification.tol_exact = scalar_as<double>(v["tol_exact"], "verification.tol_exact");
    if (v["tol_analytic"])
      m.verification.tol_analytic = scalar_as<double>(v["tol_analytic"], "verification.tol_analytic");
    if (v["tol_fd"]) m.verification.tol_fd = scalar_as<double>(v["tol_fd"], "verification.tol_fd");
    try {
      m.config().validate();
    } catch (const std::invalid_argument& e) {
      fail(v, "verification", e.what());
    }
  }
  return m;
}

ManifoldManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open manifest '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_manifest(buf.str());
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

std::string sha256_hex(std::string_view bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 digest failed");
  std::ostringstream os;
  os << std::hex << std::setfill('0');
  for (unsigned int i = 0; i < len; ++i) os << std::setw(2) << static_cast<int>(md[i]);
  return os.str();
}

}  // namespace lightlike
