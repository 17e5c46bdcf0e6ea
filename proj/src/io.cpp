#include "dwellcert/io.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace dwellcert {

using nlohmann::json;

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

double parse_number(const std::string& s, const std::string& what) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument(what + ": '" + s + "' is not a number");
  }
  while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  if (pos != s.size() || !std::isfinite(v)) throw std::invalid_argument(what + ": '" + s + "' is not a finite number");
  return v;
}

}  // namespace

Vec parse_vector_spec(const std::string& spec) {
  const auto parts = split(spec, ',');
  if (parts.empty()) throw std::invalid_argument("vector: empty specification");
  Vec v(static_cast<Eigen::Index>(parts.size()));
  for (std::size_t i = 0; i < parts.size(); ++i) v(static_cast<Eigen::Index>(i)) = parse_number(parts[i], "vector entry");
  return v;
}

Mat parse_matrix_spec(const std::string& spec, int n) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("matrix: expected diag:... or full:...");
  const std::string kind = spec.substr(0, colon), body = spec.substr(colon + 1);
  Mat m;
  if (kind == "diag") {
    m = parse_vector_spec(body).asDiagonal();
  } else if (kind == "full") {
    const auto rows = split(body, ';');
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const Vec row = parse_vector_spec(rows[r]);
      if (r == 0) m.resize(static_cast<Eigen::Index>(rows.size()), row.size());
      if (row.size() != m.cols()) throw std::invalid_argument("matrix: ragged rows");
      m.row(static_cast<Eigen::Index>(r)) = row.transpose();
    }
  } else {
    throw std::invalid_argument("matrix: unknown form '" + kind + "'");
  }
  if (n > 0 && (m.rows() != n || m.cols() != n))
    throw DimensionError("matrix: expected " + std::to_string(n) + "x" + std::to_string(n) + ", got " +
                         std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  return m;
}

ImpulseSequence parse_sequence_spec(const std::string& spec, int horizon) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::string body = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (kind == "periodic") return ImpulseSequence::periodic(parse_number(body, "periodic T"), horizon);
  if (kind == "log") return ImpulseSequence::log_spaced(horizon);
  if (kind == "random") {
    const auto p = split(body, ',');
    if (p.size() != 3) throw std::invalid_argument("random sequence: expected random:tmin,tmax,seed");
    const double seed = parse_number(p[2], "seed");
    if (seed < 0 || seed != std::floor(seed)) throw std::invalid_argument("random sequence: seed must be a nonnegative integer");
    return ImpulseSequence::random(parse_number(p[0], "tmin"), parse_number(p[1], "tmax"),
                                   std::stoull(p[2]), horizon);
  }
  if (kind == "file") {
    std::ifstream in(body);
    if (!in) throw std::invalid_argument("sequence file: cannot open " + body);
    std::vector<double> t;
    std::string line;
    while (std::getline(in, line)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
      t.push_back(parse_number(line, "sequence file"));
    }
    return ImpulseSequence::explicit_times(std::move(t));
  }
  throw std::invalid_argument("sequence: unknown generator '" + kind + "'");
}

json to_json(const Mat& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

json to_json(const ImpulsiveSystem& sys) { return json::parse(system_to_json(sys)); }

json to_json(const SolveReport& r) {
  json res = json::array();
  for (const auto& b : r.residuals) res.push_back({{"label", b.label}, {"max_eig", b.max_eig}, {"min_eig", b.min_eig}});
  return {{"status", to_string(r.status)},
          {"t_star", r.t_star},
          {"dual_bound", r.dual_bound},
          {"margin", r.margin},
          {"scale", r.scale},
          {"iterations", r.iterations},
          {"converged", r.converged},
          {"message", r.message},
          {"wall_seconds", r.wall_seconds},
          {"residuals", res},
          {"options",
           {{"tol", r.options.tol},
            {"strict_margin", r.options.strict_margin},
            {"var_cap", r.options.var_cap},
            {"max_scalars", r.options.max_scalars},
            {"max_iterations", r.options.max_iterations}}}};
}

json to_json(const Verdict& v, bool with_certificate) {
  json checks = json::array();
  for (const auto& c : v.checks)
    checks.push_back({{"name", c.name}, {"value", c.value}, {"points", c.points}, {"passed", c.passed}});
  json j = {{"stable", v.stable},
            {"verdict", v.stable ? "stable" : "unknown"},
            {"method", to_string(v.method)},
            {"evidence", to_string(v.evidence)},
            {"checks", checks},
            {"note", v.note}};
  if (v.radius >= 0.0) j["radius"] = v.radius;
  if (v.report) j["solver"] = to_json(*v.report);
  if (with_certificate && v.certificate) {
    json cert = json::object();
    for (const auto& [name, m] : v.certificate->vars) cert[name] = to_json(m);
    j["certificate"] = cert;
  }
  return j;
}

json to_json(const BoundaryResult& b) {
  json probes = json::array();
  for (const auto& p : b.probes) probes.push_back({p.T, p.feasible});
  return {{"bound", b.bound},
          {"infeasible_end", b.infeasible},
          {"direction", to_string(b.direction)},
          {"bracket", {b.lo, b.hi}},
          {"tol", b.tol},
          {"probes", probes}};
}

json to_json(const NumericConfig& c) {
  return {{"eig_margin", c.eig_margin},       {"dwell_epsilon", c.dwell_epsilon},
          {"strict_margin", c.strict_margin}, {"pd_margin", c.pd_margin},
          {"solve_tol", c.solve_tol},         {"var_cap", c.var_cap},
          {"max_scalars", c.max_scalars},     {"interval_grid", c.interval_grid},
          {"simplex_grid", c.simplex_grid}};
}

json to_json(const AnalysisOptions& o) {
  return {{"config", to_json(o.cfg)},
          {"solver", {{"tol", o.solver.tol}, {"var_cap", o.solver.var_cap}, {"max_iterations", o.solver.max_iterations}}},
          {"verify_grid", o.verify_grid},
          {"simplex_grid", o.simplex_grid}};
}

json to_json(const SearchOptions& o) { return {{"tol", o.tol}, {"prescan", o.prescan}, {"threads", o.threads}}; }

json report_header(const std::string& command, const std::vector<std::string>& argv) {
  return {{"schema_version", kReportSchemaVersion},
          {"tool", {{"name", "dwellcert"}, {"version", kToolVersion}}},
          {"command", command},
          {"argv", argv}};
}

void apply_environment(AnalysisOptions& ao, SearchOptions& so) {
  if (const char* t = std::getenv("DWELLCERT_THREADS")) {
    const int n = std::atoi(t);
    if (n < 0) throw std::invalid_argument("DWELLCERT_THREADS must be nonnegative");
    so.threads = n;
  }
  if (const char* p = std::getenv("DWELLCERT_PROFILE")) {
    const std::string profile(p);
    if (profile == "fine") {
      ao.verify_grid = 400;
      ao.simplex_grid = 21;
      so.tol = 1e-5;
    } else if (profile != "default") {
      throw std::invalid_argument("DWELLCERT_PROFILE must be 'default' or 'fine'");
    }
  }
}

// ---------------------------------------------------------------------------

namespace {

ReproRow row(const std::string& suite, const std::string& q, double expected, double computed, double tol,
             std::string note = {}) {
  return {suite, q, expected, computed, tol, std::abs(computed - expected) <= tol, std::move(note)};
}

double boundary(const ImpulsiveSystem& sys, Method m, double lo, double hi, const AnalysisOptions& ao,
                SearchOptions so) {
  return bisect_boundary(method_predicate(sys, m, ao), lo, hi, so).bound;
}

Predicate oracle_predicate(const ImpulsiveSystem& sys, int points) {
  return [sys, points](double T) { return eig_oracle_grid(sys, T, points).worst_radius < 1.0; };
}

void suite_ex1(std::vector<ReproRow>& out, const AnalysisOptions& ao, const SearchOptions& so) {
  const auto s = examples::ex1();
  SearchOptions fine = so;
  fine.tol = std::min(so.tol, 1e-5);
  out.push_back(row("ex1", "spectral Tmax", 2.0 * std::log(2.0) / 3.0, boundary(s, Method::Spectral, 0.01, 1.0, ao, fine), 1e-4));
  out.push_back(row("ex1", "periodic-looped Tmax", 0.4471, boundary(s, Method::PeriodicLooped, 0.01, 1.0, ao, so), 5e-3));
  out.push_back(row("ex1", "max-dt-lemma Tmax", 0.4620, boundary(s, Method::MaximalLemma, 0.01, 1.0, ao, so), 1e-3));
  out.push_back(row("ex1", "max-dt Tmax", 0.4471, boundary(s, Method::MaximalLooped, 0.01, 1.0, ao, so), 5e-3));
}

void suite_ex2(std::vector<ReproRow>& out, const AnalysisOptions& ao, const SearchOptions& so) {
  const auto s = examples::ex2();
  out.push_back(row("ex2", "spectral Tmin", 1.1405, boundary(s, Method::Spectral, 0.5, 3.0, ao, so), 1e-3));
  out.push_back(row("ex2", "min-dt-lemma Tmin", 1.1405, boundary(s, Method::MinimalLemma, 0.5, 3.0, ao, so), 1e-3));
  out.push_back(row("ex2", "periodic-looped Tmin", 1.2323, boundary(s, Method::PeriodicLooped, 0.5, 3.0, ao, so), 5e-3));
  out.push_back(row("ex2", "min-dt Tmin", 1.2323, boundary(s, Method::MinimalLooped, 0.5, 3.0, ao, so), 5e-3));
}

void suite_ex3(std::vector<ReproRow>& out, const AnalysisOptions& ao, const SearchOptions& so) {
  const auto s = examples::ex3();
  const IntervalResult looped = find_ranged_interval(s, Method::PeriodicLooped, 0.3, so, ao);
  out.push_back(row("ex3", "periodic-looped Tmin", 0.1824, looped.tmin, 2e-3));
  out.push_back(row("ex3", "periodic-looped Tmax", 0.5760, looped.tmax, 5e-3));
  SearchOptions fine = so;
  fine.tol = std::min(so.tol, 1e-5);
  const IntervalResult spectral = find_ranged_interval(s, Method::Spectral, 0.3, fine, ao);
  out.push_back(row("ex3", "spectral Tmin", 0.1824, spectral.tmin, 1e-4));
  out.push_back(row("ex3", "spectral Tmax", 0.5776, spectral.tmax, 1e-4));
  const IntervalResult ranged = find_ranged_interval(s, Method::RangedLooped, 0.3, so, ao);
  out.push_back(row("ex3", "ranged Tmin", 0.1907, ranged.tmin, 5e-3));
  out.push_back(row("ex3", "ranged Tmax", 0.5063, ranged.tmax, 5e-3));
  Mat p(2, 2);
  p << 2.3622, 0.0, 0.0, 1.4752;
  const AlphaConstants a = alpha_stability_constants(s.A(), s.J(), p);
  out.push_back(row("ex3", "alpha c", -2.4036, a.c, 1e-3));
  out.push_back(row("ex3", "alpha d", -0.3646, a.d, 1e-3));
}

void suite_ex4(std::vector<ReproRow>& out, const AnalysisOptions& ao, const SearchOptions& so) {
  const auto s = examples::ex4();
  out.push_back(row("ex4", "periodic-looped Tmax", 1.7239, boundary(s, Method::PeriodicLooped, 0.1, 2.5, ao, so), 1e-2));
  out.push_back(row("ex4", "spectral Tmax", 1.7294, boundary(s, Method::Spectral, 0.1, 2.5, ao, so), 1e-3));
  const double tmin = 1e-5;
  const double tmax =
      bisect_boundary([&](double T) { return ranged_looped(s.A(), s.J(), tmin, T, ao).stable; }, 0.1, 2.5, so).bound;
  out.push_back(row("ex4", "ranged Tmax (Tmin=1e-5)", 1.7239, tmax, 1e-2));
}

void suite_robust1(std::vector<ReproRow>& out, const AnalysisOptions& ao, const SearchOptions& so) {
  const auto s = examples::robust1();
  SearchOptions fine = so;
  fine.tol = std::min(so.tol, 1e-5);
  out.push_back(row("robust1", "eig oracle Tmax", 0.11555,
                    bisect_boundary(oracle_predicate(s, 201), 0.01, 0.3, fine).bound, 5e-5));
  out.push_back(row("robust1", "robust-periodic Tmax", 0.1148, boundary(s, Method::RobustPeriodic, 0.01, 0.3, ao, so), 2e-3));
  out.push_back(row("robust1", "robust-max-dt Tmax", 0.1148, boundary(s, Method::RobustMaximal, 0.01, 0.3, ao, so), 2e-3));
}

void suite_robust2(std::vector<ReproRow>& out, const AnalysisOptions& ao, const SearchOptions& so) {
  const auto s = examples::robust2();
  SearchOptions fine = so;
  fine.tol = std::min(so.tol, 1e-5);
  const Predicate oracle = oracle_predicate(s, 201);
  const IntervalResult orc = find_ranged_interval([&](double a, double) { return oracle(a); }, 0.4, 0.05, 2.0, false, fine);
  out.push_back(row("robust2", "eig oracle Tmin", 0.2624, orc.tmin, 1e-3));
  out.push_back(row("robust2", "eig oracle Tmax", 0.5776, orc.tmax, 1e-3));
  const IntervalResult rr = find_ranged_interval(s, Method::RobustRanged, 0.4, so, ao);
  out.push_back(row("robust2", "robust-ranged Tmin", 0.2625, rr.tmin, 5e-3));
  out.push_back(row("robust2", "robust-ranged Tmax", 0.5761, rr.tmax, 5e-3));
}

}  // namespace

std::vector<std::string> suite_names() { return {"all", "ex1", "ex2", "ex3", "ex4", "robust1", "robust2"}; }

std::vector<ReproRow> reproduce(const std::string& suite, const AnalysisOptions& ao, const SearchOptions& so) {
  std::vector<ReproRow> out;
  const bool all = suite == "all";
  bool known = all;
  auto want = [&](const char* name) {
    const bool w = all || suite == name;
    known = known || w;
    return w;
  };
  if (want("ex1")) suite_ex1(out, ao, so);
  if (want("ex2")) suite_ex2(out, ao, so);
  if (want("ex3")) suite_ex3(out, ao, so);
  if (want("ex4")) suite_ex4(out, ao, so);
  if (want("robust1")) suite_robust1(out, ao, so);
  if (want("robust2")) suite_robust2(out, ao, so);
  if (!known) throw std::invalid_argument("unknown suite '" + suite + "'");
  return out;
}

}  // namespace dwellcert
