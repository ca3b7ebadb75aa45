#include "kvn/scenario.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "kvn/diagnostics.hpp"

namespace kvn {

namespace {

std::string locate(const std::string& key, int line) {
  std::string s = "key '" + key + "'";
  if (line > 0) s += " (line " + std::to_string(line) + ")";
  return s;
}

}  // namespace

ConfigError::ConfigError(std::string key, int line, const std::string& message)
    : std::runtime_error(locate(key, line) + ": " + message), key_(std::move(key)), line_(line) {}

const char* to_string(InitialKind kind) {
  switch (kind) {
    case InitialKind::gaussian: return "gaussian";
    case InitialKind::indicator_smoothed: return "indicator_smoothed";
    case InitialKind::constant: return "constant";
  }
  return "unknown";
}

Complex InitialCondition::operator()(const Vec& x) const {
  switch (kind) {
    case InitialKind::gaussian: {
      double r2 = 0.0, phase = 0.0;
      for (int a = 0; a < 3; ++a) {
        r2 += (x[a] - center[a]) * (x[a] - center[a]);
        phase += wavenumber[a] * x[a];
      }
      return std::exp(-r2 / (2.0 * sigma * sigma)) * Complex{std::cos(phase), std::sin(phase)};
    }
    case InitialKind::indicator_smoothed: {
      double r2 = 0.0;
      for (int a = 0; a < 3; ++a) r2 += (x[a] - center[a]) * (x[a] - center[a]);
      return 0.5 * (1.0 - std::tanh((std::sqrt(r2) - radius) / width));
    }
    case InitialKind::constant: return 1.0;
  }
  return 0.0;
}

namespace {

struct Entry {
  std::string value;
  int line = 0;
  bool used = false;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(trim(cur));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class Reader {
 public:
  Reader(const std::string& text, const std::string& source) : source_(source) {
    std::istringstream is(text);
    std::string raw;
    int line = 0;
    while (std::getline(is, raw)) {
      ++line;
      const auto hash = raw.find('#');
      const std::string body = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
      if (body.empty()) continue;
      const auto eq = body.find('=');
      if (eq == std::string::npos) throw ConfigError(body, line, "expected 'key = value' in " + source_);
      const std::string key = trim(body.substr(0, eq));
      const std::string value = trim(body.substr(eq + 1));
      if (key.empty()) throw ConfigError(key, line, "empty key in " + source_);
      if (value.empty()) throw ConfigError(key, line, "empty value");
      if (entries_.count(key)) throw ConfigError(key, line, "duplicate key (first set on line " +
                                                                std::to_string(entries_[key].line) + ")");
      entries_[key] = {value, line};
    }
  }

  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  int line(const std::string& key) const { return has(key) ? entries_.at(key).line : 0; }

  const std::string& text(const std::string& key) {
    auto it = entries_.find(key);
    if (it == entries_.end()) throw ConfigError(key, 0, "required key missing in " + source_);
    it->second.used = true;
    return it->second.value;
  }

  double number(const std::string& key) { return to_double(key, text(key)); }

  double number(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }

  std::int64_t integer(const std::string& key) { return to_int(key, text(key)); }

  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const std::string& v = text(key);
    if (v == "true") return true;
    if (v == "false") return false;
    throw ConfigError(key, line(key), "expected true or false, got '" + v + "'");
  }

  std::vector<double> numbers(const std::string& key) {
    std::vector<double> out;
    for (const auto& part : split(text(key), ',')) out.push_back(to_double(key, part));
    return out;
  }

  std::vector<int> integers(const std::string& key) {
    std::vector<int> out;
    for (const auto& part : split(text(key), ',')) {
      const auto v = to_int(key, part);
      if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
        throw ConfigError(key, line(key), "integer out of range: '" + part + "'");
      }
      out.push_back(static_cast<int>(v));
    }
    return out;
  }

  Vec point(const std::string& key, int dim) {
    const auto v = numbers(key);
    if (static_cast<int>(v.size()) != dim) {
      throw ConfigError(key, line(key), "expected " + std::to_string(dim) + " coordinates, got " +
                                            std::to_string(v.size()));
    }
    Vec p{};
    for (int a = 0; a < dim; ++a) p[a] = v[a];
    return p;
  }

  void reject_unused() const {
    for (const auto& [key, e] : entries_) {
      if (!e.used) throw ConfigError(key, e.line, "unknown key");
    }
  }

  [[noreturn]] void fail(const std::string& key, const std::string& message) const {
    throw ConfigError(key, line(key), message);
  }

  double to_double(const std::string& key, const std::string& raw) const {
    const std::string s = !raw.empty() && raw[0] == '+' ? raw.substr(1) : raw;
    double v = 0.0;
    const char* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (s.empty() || ec != std::errc() || ptr != end || !std::isfinite(v)) {
      fail(key, "expected a finite number, got '" + s + "'");
    }
    return v;
  }

  std::int64_t to_int(const std::string& key, const std::string& s) const {
    std::int64_t v = 0;
    const char* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (s.empty() || ec != std::errc() || ptr != end) fail(key, "expected an integer, got '" + s + "'");
    return v;
  }

 private:
  std::string source_;
  std::map<std::string, Entry> entries_;
};

/// "c:p0,p1,p2; c:p0,p1,p2; ..." with one exponent per axis.
Polynomial parse_polynomial(Reader& r, const std::string& key, int dim) {
  Polynomial p;
  for (const auto& term : split(r.text(key), ';')) {
    const auto colon = term.find(':');
    if (colon == std::string::npos) r.fail(key, "polynomial term '" + term + "' is not 'coeff:powers'");
    Monomial m;
    m.coeff = r.to_double(key, trim(term.substr(0, colon)));
    const auto powers = split(trim(term.substr(colon + 1)), ',');
    if (static_cast<int>(powers.size()) != dim) {
      r.fail(key, "polynomial term '" + term + "' needs " + std::to_string(dim) + " exponents");
    }
    for (int a = 0; a < dim; ++a) {
      const auto e = r.to_int(key, powers[a]);
      if (e < 0 || e > 16) r.fail(key, "exponent out of range in '" + term + "'");
      m.powers[a] = static_cast<int>(e);
    }
    if (m.coeff != 0.0) p.push_back(m);
  }
  return p;
}

std::string format_polynomial(const Polynomial& p, int dim) {
  if (p.empty()) return "0:" + std::string(dim == 1 ? "0" : (dim == 2 ? "0,0" : "0,0,0"));
  std::string s;
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (k) s += "; ";
    s += fmt(p[k].coeff) + ":";
    for (int a = 0; a < dim; ++a) s += (a ? "," : "") + std::to_string(p[k].powers[a]);
  }
  return s;
}

/// The declared divergence must match central differences of the components
/// (step 1e-5, tolerance 1e-6 (1 + |div|)) on a fixed lattice over the bounding box.
void check_divergence(Reader& r, const std::vector<Polynomial>& comps, const Polynomial& div, const Domain& dom) {
  const int d = dom.dim();
  const auto b = dom.bounds();
  const int n = 5;
  const int total = d == 1 ? n : (d == 2 ? n * n : n * n * n);
  const double step = 1e-5;
  for (int k = 0; k < total; ++k) {
    Vec x{};
    int rem = k;
    for (int a = 0; a < d; ++a) {
      x[a] = b[a].lo + (b[a].hi - b[a].lo) * (rem % n) / (n - 1);
      rem /= n;
    }
    double fd = 0.0;
    for (int a = 0; a < d; ++a) {
      Vec hi = x, lo = x;
      hi[a] += step;
      lo[a] -= step;
      fd += (evaluate(comps[a], hi) - evaluate(comps[a], lo)) / (2.0 * step);
    }
    const double declared = evaluate(div, x);
    if (std::abs(fd - declared) > 1e-6 * (1.0 + std::abs(declared))) {
      r.fail("field.poly.div", "declared divergence " + fmt(declared) + " disagrees with finite differences " +
                                   fmt(fd) + " at a lattice point");
    }
  }
}

Domain parse_domain(Reader& r) {
  const std::string kind = r.text("domain.kind");
  try {
    if (kind == "interval" || kind == "rectangle") {
      std::vector<Interval> bounds;
      for (const auto& part : split(r.text("domain.bounds"), ';')) {
        const auto v = split(part, ',');
        if (v.size() != 2) r.fail("domain.bounds", "each axis needs 'lo, hi', got '" + part + "'");
        bounds.push_back({r.to_double("domain.bounds", v[0]), r.to_double("domain.bounds", v[1])});
      }
      if (kind == "interval") {
        if (bounds.size() != 1) r.fail("domain.bounds", "an interval has exactly one axis");
        return Domain::interval(bounds[0].lo, bounds[0].hi);
      }
      return Domain::rectangle(bounds);
    }
    if (kind == "disk") {
      const Vec c = r.point("domain.center", 2);
      return Domain::disk(c, r.number("domain.radius"));
    }
  } catch (const GeometryError& e) {
    r.fail(kind == "disk" ? "domain.radius" : "domain.bounds", e.what());
  }
  r.fail("domain.kind", "unknown domain kind '" + kind + "'");
}

VectorField parse_field(Reader& r, const Domain& dom) {
  const int d = dom.dim();
  FieldKind kind{};
  try {
    kind = field_kind_from_string(r.text("field.kind"));
  } catch (const FieldError& e) {
    r.fail("field.kind", e.what());
  }
  if (kind == FieldKind::custom_polynomial) {
    std::vector<Polynomial> comps;
    for (int a = 0; a < d; ++a) comps.push_back(parse_polynomial(r, "field.poly." + std::to_string(a), d));
    Polynomial div = parse_polynomial(r, "field.poly.div", d);
    check_divergence(r, comps, div, dom);
    try {
      return VectorField::custom_polynomial(std::move(comps), std::move(div));
    } catch (const FieldError& e) {
      r.fail("field.poly.0", e.what());
    }
  }
  std::vector<double> params;
  if (r.has("field.params")) params = r.numbers("field.params");
  try {
    return VectorField::make(kind, d, params);
  } catch (const FieldError& e) {
    r.fail(r.has("field.params") ? "field.params" : "field.kind", e.what());
  }
}

InitialCondition parse_initial(Reader& r, const Domain& dom) {
  InitialCondition ic;
  const int d = dom.dim();
  const std::string kind = r.has("initial.kind") ? r.text("initial.kind") : "gaussian";
  ic.center = dom.center();
  if (kind == "gaussian") {
    ic.kind = InitialKind::gaussian;
    ic.sigma = r.number("initial.sigma", 0.1 * dom.diameter());
    if (!(ic.sigma > 0.0)) r.fail("initial.sigma", "sigma must be > 0");
    if (r.has("initial.k")) ic.wavenumber = r.point("initial.k", d);
  } else if (kind == "indicator_smoothed") {
    ic.kind = InitialKind::indicator_smoothed;
    ic.radius = r.number("initial.radius", 0.25 * dom.diameter());
    ic.width = r.number("initial.width", 0.05 * dom.diameter());
    if (!(ic.radius > 0.0)) r.fail("initial.radius", "radius must be > 0");
    if (!(ic.width > 0.0)) r.fail("initial.width", "width must be > 0");
  } else if (kind == "constant") {
    ic.kind = InitialKind::constant;
  } else {
    r.fail("initial.kind", "unknown initial condition '" + kind + "'");
  }
  if (ic.kind != InitialKind::constant && r.has("initial.center")) ic.center = r.point("initial.center", d);
  return ic;
}

void parse_propagator(Reader& r, PropagatorConfig& p) {
  if (r.has("propagator.scheme")) {
    try {
      p.scheme = scheme_from_string(r.text("propagator.scheme"));
    } catch (const std::invalid_argument& e) {
      r.fail("propagator.scheme", e.what());
    }
  }
  p.dt = r.number("propagator.dt");
  if (!(p.dt > 0.0)) r.fail("propagator.dt", "dt must be > 0");
  p.linear_solver_tol = r.number("propagator.solver_tol", p.linear_solver_tol);
  if (!(p.linear_solver_tol > 0.0 && p.linear_solver_tol <= 1e-6)) {
    r.fail("propagator.solver_tol", "solver tolerance must lie in (0, 1e-6]");
  }
  if (r.has("propagator.max_dense_dim")) {
    const auto v = r.integer("propagator.max_dense_dim");
    if (v < 1) r.fail("propagator.max_dense_dim", "must be >= 1");
    p.max_dense_dim = static_cast<std::size_t>(v);
  }
  if (r.has("propagator.max_iterations")) {
    const auto v = r.integer("propagator.max_iterations");
    if (v < 1 || v > 1000000) r.fail("propagator.max_iterations", "must lie in [1, 1000000]");
    p.max_iterations = static_cast<int>(v);
  }
}

}  // namespace

ScenarioConfig parse_config(const std::string& text, const std::string& source) {
  Reader r(text, source);
  ScenarioConfig cfg;
  if (r.has("name")) {
    cfg.name = r.text("name");
    for (char c : cfg.name) {
      if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.')) {
        r.fail("name", "name may only contain letters, digits, '_', '-' and '.'");
      }
    }
  }

  cfg.domain = parse_domain(r);
  const int d = cfg.domain.dim();

  cfg.resolution = r.integers("grid.resolution");
  if (cfg.resolution.size() != 1 && static_cast<int>(cfg.resolution.size()) != d) {
    r.fail("grid.resolution", "give one resolution or one per axis");
  }
  for (int n : cfg.resolution) {
    if (n < 3) r.fail("grid.resolution", "resolution must be >= 3 per axis");
  }

  cfg.field = parse_field(r, cfg.domain);
  cfg.classify_tol = r.number("field.tol", cfg.classify_tol);
  if (!(cfg.classify_tol >= 0.0)) r.fail("field.tol", "tolerance must be >= 0");

  cfg.initial = parse_initial(r, cfg.domain);

  cfg.t_end = r.number("t_end");
  if (!(cfg.t_end >= 0.0)) r.fail("t_end", "t_end must be >= 0");
  if (r.has("snapshots")) {
    cfg.snapshots = r.numbers("snapshots");
    for (double t : cfg.snapshots) {
      if (t < 0.0 || t > cfg.t_end) r.fail("snapshots", "snapshot time " + fmt(t) + " outside [0, t_end]");
    }
  }

  parse_propagator(r, cfg.propagator);

  cfg.oracle_enabled = r.boolean("oracle.enabled", true);
  if (r.has("oracle.dt_ode")) {
    cfg.oracle_dt = r.number("oracle.dt_ode");
    if (!(*cfg.oracle_dt > 0.0)) r.fail("oracle.dt_ode", "dt_ode must be > 0");
  }

  cfg.output_dir = r.has("output.dir") ? std::filesystem::path(r.text("output.dir"))
                                       : std::filesystem::path("out") / cfg.name;
  if (r.has("output.trajectory")) {
    cfg.trajectory_start = r.point("output.trajectory", d);
    if (cfg.domain.distance_outside(*cfg.trajectory_start) > 1e-9 * cfg.domain.diameter()) {
      r.fail("output.trajectory", "start point lies outside the closed domain");
    }
  }
  cfg.export_operators = r.boolean("output.operators", false);

  if (r.has("probe.seed")) {
    const auto v = r.integer("probe.seed");
    if (v < 0) r.fail("probe.seed", "seed must be >= 0");
    cfg.probe_seed = static_cast<std::uint64_t>(v);
  }
  if (r.has("probe.count")) {
    const auto v = r.integer("probe.count");
    if (v < 1) r.fail("probe.count", "probe count must be >= 1");
    cfg.probe_count = static_cast<std::size_t>(v);
  }

  auto& cv = cfg.converge;
  if (r.has("converge.ladder")) {
    cv.ladder = r.integers("converge.ladder");
    for (int n : cv.ladder) {
      if (n < 3) r.fail("converge.ladder", "every rung must be >= 3");
    }
  }
  if (r.has("converge.dt_factor")) {
    cv.dt_factor = r.number("converge.dt_factor");
    if (!(*cv.dt_factor > 0.0)) r.fail("converge.dt_factor", "dt factor must be > 0");
  }
  cv.order_min = r.number("converge.order_min", cv.order_min);
  cv.order_max = r.number("converge.order_max", cv.order_max);
  if (!(cv.order_min <= cv.order_max)) r.fail("converge.order_max", "order_max must be >= order_min");
  cv.born_order_min = r.number("converge.born_order_min", cv.born_order_min);

  r.reject_unused();
  return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("<file>", 0, "cannot read config file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw ConfigError("<file>", 0, "error while reading '" + path.string() + "'");
  return parse_config(ss.str(), path.string());
}

namespace {

std::string join(std::span<const double> v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) s += (k ? ", " : "") + fmt(v[k]);
  return s;
}

std::string join(const std::vector<int>& v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) s += (k ? ", " : "") + std::to_string(v[k]);
  return s;
}

std::string join(const Vec& v, int dim) { return join(std::span<const double>(v.data(), dim)); }

}  // namespace

std::string serialize_config(const ScenarioConfig& cfg) {
  std::ostringstream os;
  const int d = cfg.domain.dim();
  os << "name = " << cfg.name << '\n';
  os << "domain.kind = " << to_string(cfg.domain.kind()) << '\n';
  if (cfg.domain.kind() == DomainKind::disk) {
    os << "domain.center = " << join(cfg.domain.center(), 2) << '\n';
    os << "domain.radius = " << fmt(cfg.domain.radius()) << '\n';
  } else {
    os << "domain.bounds = ";
    const auto b = cfg.domain.bounds();
    for (int a = 0; a < d; ++a) os << (a ? "; " : "") << fmt(b[a].lo) << ", " << fmt(b[a].hi);
    os << '\n';
  }
  os << "grid.resolution = " << join(cfg.resolution) << '\n';

  os << "field.kind = " << to_string(cfg.field.kind()) << '\n';
  if (cfg.field.kind() == FieldKind::custom_polynomial) {
    for (int a = 0; a < d; ++a) os << "field.poly." << a << " = " << format_polynomial(cfg.field.components()[a], d) << '\n';
    os << "field.poly.div = " << format_polynomial(cfg.field.divergence_polynomial(), d) << '\n';
  } else if (!cfg.field.params().empty()) {
    os << "field.params = " << join(cfg.field.params()) << '\n';
  }
  os << "field.tol = " << fmt(cfg.classify_tol) << '\n';

  const auto& ic = cfg.initial;
  os << "initial.kind = " << to_string(ic.kind) << '\n';
  if (ic.kind != InitialKind::constant) os << "initial.center = " << join(ic.center, d) << '\n';
  if (ic.kind == InitialKind::gaussian) {
    os << "initial.sigma = " << fmt(ic.sigma) << '\n';
    os << "initial.k = " << join(ic.wavenumber, d) << '\n';
  } else if (ic.kind == InitialKind::indicator_smoothed) {
    os << "initial.radius = " << fmt(ic.radius) << '\n';
    os << "initial.width = " << fmt(ic.width) << '\n';
  }

  os << "t_end = " << fmt(cfg.t_end) << '\n';
  if (!cfg.snapshots.empty()) os << "snapshots = " << join(cfg.snapshots) << '\n';

  os << "propagator.scheme = " << to_string(cfg.propagator.scheme) << '\n';
  os << "propagator.dt = " << fmt(cfg.propagator.dt) << '\n';
  os << "propagator.solver_tol = " << fmt(cfg.propagator.linear_solver_tol) << '\n';
  os << "propagator.max_dense_dim = " << cfg.propagator.max_dense_dim << '\n';
  os << "propagator.max_iterations = " << cfg.propagator.max_iterations << '\n';

  os << "oracle.enabled = " << (cfg.oracle_enabled ? "true" : "false") << '\n';
  if (cfg.oracle_dt) os << "oracle.dt_ode = " << fmt(*cfg.oracle_dt) << '\n';

  os << "output.dir = " << cfg.output_dir.string() << '\n';
  if (cfg.trajectory_start) os << "output.trajectory = " << join(*cfg.trajectory_start, d) << '\n';
  os << "output.operators = " << (cfg.export_operators ? "true" : "false") << '\n';

  os << "probe.seed = " << cfg.probe_seed << '\n';
  os << "probe.count = " << cfg.probe_count << '\n';

  const auto& cv = cfg.converge;
  if (!cv.ladder.empty()) os << "converge.ladder = " << join(cv.ladder) << '\n';
  if (cv.dt_factor) os << "converge.dt_factor = " << fmt(*cv.dt_factor) << '\n';
  os << "converge.order_min = " << fmt(cv.order_min) << '\n';
  os << "converge.order_max = " << fmt(cv.order_max) << '\n';
  os << "converge.born_order_min = " << fmt(cv.born_order_min) << '\n';
  return os.str();
}

InitialState make_initial_state(const InitialCondition& ic, const Grid& grid) {
  InitialState s;
  s.psi = sample(grid, ic);
  const double n = weighted_norm(s.psi, grid.volumes());
  if (!(n > 0.0) || !std::isfinite(n)) throw ConfigError("initial.kind", 0, "initial condition vanishes on the grid");
  s.scale = 1.0 / n;
  for (auto& v : s.psi) v *= s.scale;
  s.analytic = [ic, scale = s.scale](const Vec& x) { return scale * ic(x); };
  return s;
}

}  // namespace kvn
