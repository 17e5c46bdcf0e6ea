// dwellcert: command-line front end for dwell-time stability analysis of
// linear impulsive systems.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>

#include "CLI11.hpp"
#include "dwellcert/io.hpp"

using namespace dwellcert;
using nlohmann::json;

namespace {

constexpr int kExitStable = 0;
constexpr int kExitError = 1;
constexpr int kExitUnknown = 2;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string system_file;
  std::string example;
  std::string out;
  double strict_margin = default_config().strict_margin;
  double pd_margin = default_config().pd_margin;
  double solve_tol = default_config().solve_tol;
  int grid = default_config().interval_grid;
  int simplex_grid = default_config().simplex_grid;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--system", c.system_file, "system JSON file");
  app->add_option("--example", c.example, "built-in system: ex1, ex2, ex3, ex4, robust1, robust2");
  app->add_option("--out", c.out, "write the JSON report to this file");
  app->add_option("--strict-margin", c.strict_margin, "strictness margin eps for F(y) <= -eps I")->capture_default_str();
  app->add_option("--pd-margin", c.pd_margin, "positivity margin for P, Z, ...")->capture_default_str();
  app->add_option("--solve-tol", c.solve_tol, "interior-point tolerance")->capture_default_str();
  app->add_option("--grid", c.grid, "verification / oracle points per interval")->capture_default_str();
  app->add_option("--simplex-grid", c.simplex_grid, "verification points per simplex edge")->capture_default_str();
}

ImpulsiveSystem load(const Common& c) {
  if (c.system_file.empty() == c.example.empty()) throw UsageError("give exactly one of --system or --example");
  if (!c.system_file.empty()) return load_system_file(c.system_file);
  if (c.example == "ex1") return examples::ex1();
  if (c.example == "ex2") return examples::ex2();
  if (c.example == "ex3") return examples::ex3();
  if (c.example == "ex4") return examples::ex4();
  if (c.example == "robust1") return examples::robust1();
  if (c.example == "robust2") return examples::robust2();
  throw UsageError("unknown example '" + c.example + "'");
}

AnalysisOptions analysis_options(const Common& c) {
  AnalysisOptions ao;
  ao.cfg.strict_margin = c.strict_margin;
  ao.cfg.pd_margin = c.pd_margin;
  ao.cfg.solve_tol = c.solve_tol;
  ao.solver.tol = c.solve_tol;
  ao.solver.strict_margin = c.strict_margin;
  if (c.grid < 2) throw UsageError("--grid must be at least 2");
  if (c.simplex_grid < 2) throw UsageError("--simplex-grid must be at least 2");
  ao.verify_grid = c.grid;
  ao.simplex_grid = c.simplex_grid;
  return ao;
}

Method method_or_throw(const std::string& name) {
  if (auto m = parse_method(name)) return *m;
  throw UsageError("unknown method '" + name + "'");
}

bool is_ranged(Method m) { return m == Method::RangedGrid || m == Method::RangedLooped || m == Method::RobustRanged; }

void emit(const json& report, const std::string& out) {
  if (out.empty()) return;
  std::ofstream f(out);
  if (!f) throw std::runtime_error("cannot write report to " + out);
  f << report.dump(2) << "\n";
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------------------

struct AnalyzeArgs {
  Common c;
  std::string method;
  std::optional<double> T, tmin, tmax;
  std::string p;
  bool no_certificate = false;
};

int run_analyze(const AnalyzeArgs& a, const json& header) {
  const auto t0 = std::chrono::steady_clock::now();
  const ImpulsiveSystem sys = load(a.c);
  const AnalysisOptions ao = analysis_options(a.c);
  json report = header;
  report["input"] = {{"system", to_json(sys)}, {"method", a.method}, {"options", to_json(ao)}};

  if (a.method == "alpha") {
    if (a.p.empty()) throw UsageError("--method alpha needs --P");
    if (a.T || a.tmin || a.tmax) throw UsageError("--method alpha takes no dwell time");
    if (!sys.nominal()) throw UsageError("--method alpha needs a nominal system");
    const Mat p = parse_matrix_spec(a.p, sys.n);
    const AlphaConstants ac = alpha_stability_constants(sys.A(), sys.J(), p);
    const bool conclusive = ac.c > 0.0 || ac.d > 0.0;
    std::printf("%-10s %14.6f\n%-10s %14.6f\n%-10s %14s\n", "c", ac.c, "d", ac.d, "verdict",
                conclusive ? "stable" : "unknown");
    report["input"]["P"] = to_json(p);
    report["result"] = {{"c", ac.c}, {"d", ac.d}, {"verdict", conclusive ? "stable" : "unknown"}};
    report["wall_seconds"] = seconds_since(t0);
    emit(report, a.c.out);
    return conclusive ? kExitStable : kExitUnknown;
  }

  const Method m = method_or_throw(a.method);
  if (!a.p.empty()) throw UsageError("--P is only used with --method alpha");
  DwellTimeSpec spec;
  if (m == Method::Arbitrary) {
    if (a.T || a.tmin || a.tmax) throw UsageError("arbitrary takes no dwell time");
    spec = Arbitrary{};
  } else if (is_ranged(m)) {
    if (a.T) {
      if (a.tmin || a.tmax) throw UsageError("--T contradicts --Tmin/--Tmax");
      spec = Ranged{*a.T, *a.T};
    } else {
      if (!a.tmin || !a.tmax) throw UsageError(std::string(to_string(m)) + " needs --Tmin and --Tmax");
      spec = Ranged{*a.tmin, *a.tmax};
    }
  } else {
    if (a.tmin || a.tmax) throw UsageError(std::string(to_string(m)) + " takes --T, not --Tmin/--Tmax");
    if (!a.T) throw UsageError(std::string(to_string(m)) + " needs --T");
    switch (m) {
      case Method::MinimalLemma:
      case Method::MinimalLooped:
      case Method::RobustMinimal: spec = MinimalDT{*a.T}; break;
      case Method::MaximalLemma:
      case Method::MaximalLooped:
      case Method::MaximalAlt:
      case Method::RobustMaximal: spec = MaximalDT{*a.T}; break;
      default: spec = Periodic{*a.T};
    }
  }
  validate(spec, ao.cfg.dwell_epsilon);
  report["input"]["dwell"] = describe(spec);

  const Verdict v = analyze(sys, m, spec, ao);
  std::printf("%-12s %s\n%-12s %s\n%-12s %s\n%-12s %s\n", "system", sys.label.c_str(), "method", to_string(m), "dwell",
              describe(spec).c_str(), "verdict", v.stable ? "stable" : "unknown");
  std::printf("%-12s %s\n", "evidence", to_string(v.evidence));
  if (v.radius >= 0.0) std::printf("%-12s %.10g\n", "radius", v.radius);
  if (v.report) {
    std::printf("%-12s %s\n%-12s %.3e\n%-12s %d\n", "solver", to_string(v.report->status), "margin", v.report->margin,
                "iterations", v.report->iterations);
  }
  for (const auto& ch : v.checks)
    std::printf("%-12s %-28s %12.4e %6d %s\n", "check", ch.name.c_str(), ch.value, ch.points, ch.passed ? "ok" : "FAIL");
  if (!v.note.empty()) std::printf("%-12s %s\n", "note", v.note.c_str());

  report["result"] = to_json(v, !a.no_certificate);
  report["wall_seconds"] = seconds_since(t0);
  emit(report, a.c.out);
  return v.stable ? kExitStable : kExitUnknown;
}

// ---------------------------------------------------------------------------

struct SearchArgs {
  Common c;
  std::string mode = "boundary";
  std::string method = "periodic-looped";
  std::vector<double> bracket;
  double tol = 1e-4;
  int prescan = 20;
  std::optional<double> seed_T, tmin;
};

int run_search(const SearchArgs& a, const json& header) {
  const auto t0 = std::chrono::steady_clock::now();
  const ImpulsiveSystem sys = load(a.c);
  AnalysisOptions ao = analysis_options(a.c);
  SearchOptions so;
  so.tol = a.tol;
  so.prescan = a.prescan;
  apply_environment(ao, so);
  if (!(so.tol > 0.0)) throw UsageError("--tol must be positive");
  if (!a.bracket.empty() && a.bracket.size() != 2) throw UsageError("--bracket takes lo,hi");
  auto [lo, hi] = a.bracket.empty() ? default_bracket(sys) : std::pair{a.bracket[0], a.bracket[1]};
  if (!(lo > 0.0 && lo < hi)) throw UsageError("--bracket needs 0 < lo < hi");

  json report = header;
  report["input"] = {{"system", to_json(sys)}, {"mode", a.mode},          {"bracket", {lo, hi}},
                     {"options", to_json(ao)}, {"search", to_json(so)}};
  json result;
  auto print_bound = [](const char* what, const BoundaryResult& b) {
    std::printf("%-12s %.6f  (%s, infeasible end %.6f, %zu probes)\n", what, b.bound, to_string(b.direction),
                b.infeasible, b.probes.size());
  };

  if (a.mode == "oracle") {
    if (a.tmin) throw UsageError("--Tmin is not used in oracle mode");
    const int pts = a.c.grid;
    report["input"]["grid"] = pts;
    Predicate oracle = [&sys, pts](double T) { return eig_oracle_grid(sys, T, pts).worst_radius < 1.0; };
    if (a.seed_T) {
      const IntervalResult r =
          find_ranged_interval([&](double x, double) { return oracle(x); }, *a.seed_T, lo, hi, false, so);
      print_bound("Tmin", r.lower);
      print_bound("Tmax", r.upper);
      result = {{"tmin", r.tmin}, {"tmax", r.tmax}, {"lower", to_json(r.lower)}, {"upper", to_json(r.upper)}};
    } else {
      const BoundaryResult b = bisect_boundary(oracle, lo, hi, so);
      print_bound("boundary", b);
      result = to_json(b);
    }
  } else {
    const Method m = method_or_throw(a.method);
    report["input"]["method"] = to_string(m);
    if (a.mode == "boundary") {
      if (a.seed_T) throw UsageError("--seed-T is only used in interval mode");
      Predicate test;
      if (a.tmin) {
        if (!is_ranged(m)) throw UsageError("--Tmin needs a ranged method");
        report["input"]["Tmin"] = *a.tmin;
        const double fixed = *a.tmin;
        test = [&sys, m, fixed, &ao](double T) { return analyze(sys, m, Ranged{fixed, T}, ao).stable; };
      } else {
        test = method_predicate(sys, m, ao);
      }
      const BoundaryResult b = bisect_boundary(test, lo, hi, so);
      print_bound("boundary", b);
      result = to_json(b);
    } else if (a.mode == "interval") {
      if (!a.seed_T) throw UsageError("interval mode needs --seed-T");
      if (a.tmin) throw UsageError("--Tmin is only used in boundary mode");
      report["input"]["seed_T"] = *a.seed_T;
      const double ilo = a.bracket.empty() ? *a.seed_T / 100.0 : lo;
      const double ihi = a.bracket.empty() ? 10.0 * *a.seed_T : hi;
      report["input"]["bracket"] = {ilo, ihi};
      const IntervalResult r = find_ranged_interval(sys, m, *a.seed_T, so, ao, ilo, ihi);
      print_bound("Tmin", r.lower);
      print_bound("Tmax", r.upper);
      result = {{"tmin", r.tmin}, {"tmax", r.tmax}, {"lower", to_json(r.lower)}, {"upper", to_json(r.upper)}};
    } else {
      throw UsageError("--mode must be boundary, interval or oracle");
    }
  }
  report["result"] = result;
  report["wall_seconds"] = seconds_since(t0);
  emit(report, a.c.out);
  return kExitStable;
}

// ---------------------------------------------------------------------------

// P from the certificate of an analyze report.
Mat certificate_p(const std::string& path, int n) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read report " + path);
  const json r = json::parse(f);
  const json* cert = nullptr;
  if (r.contains("result") && r["result"].contains("certificate")) cert = &r["result"]["certificate"];
  if (!cert || !cert->contains("P")) throw UsageError(path + " holds no certificate P");
  const auto rows = (*cert)["P"].get<std::vector<std::vector<double>>>();
  Mat p(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.size()) throw UsageError(path + ": P is not square");
    for (std::size_t k = 0; k < rows.size(); ++k) p(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
  }
  if (p.rows() != n) throw UsageError(path + ": P has the wrong size");
  return p;
}

struct SimulateArgs {
  Common c;
  std::string seq;
  int horizon = 20;
  int samples = 50;
  std::string x0;
  std::string p;
  std::string csv;
};

int run_simulate(const SimulateArgs& a, const json& header) {
  const auto t0 = std::chrono::steady_clock::now();
  const ImpulsiveSystem sys = load(a.c);
  if (!sys.nominal()) throw UsageError("simulate needs a nominal system");
  if (a.horizon < 1) throw UsageError("--horizon must be positive");
  if (a.samples < 2) throw UsageError("--samples must be at least 2");
  const ImpulseSequence seq = parse_sequence_spec(a.seq, a.horizon);
  const Vec x0 = a.x0.empty() ? Vec::Ones(sys.n) : parse_vector_spec(a.x0);
  if (x0.size() != sys.n) throw UsageError("--x0 has the wrong length");
  const Mat p = a.p.empty() ? Mat::Identity(sys.n, sys.n)
                : a.p.rfind("report:", 0) == 0 ? certificate_p(a.p.substr(7), sys.n)
                                               : parse_matrix_spec(a.p, sys.n);

  const auto segs = simulate(sys.A(), sys.J(), x0, seq, a.samples);
  const LyapunovTrace trace = lyapunov_trace(segs, p);
  std::optional<EmpiricalReport> emp;
  if (segs.size() >= 10) emp = empirical_stability(segs, p);

  if (!a.csv.empty()) {
    if (a.csv == "-") {
      write_csv(std::cout, segs, p);
    } else {
      std::ofstream f(a.csv);
      if (!f) throw std::runtime_error("cannot write " + a.csv);
      write_csv(f, segs, p);
    }
  }
  FILE* human = a.csv == "-" ? stderr : stdout;
  std::fprintf(human, "%-20s %s\n%-20s %zu\n%-20s %.6g\n", "sequence", seq.describe().c_str(), "segments", segs.size(),
               "V(end)", trace.lower.empty() ? 0.0 : trace.lower.back());
  if (emp) {
    std::fprintf(human, "%-20s %.6g\n%-20s %.6g\n%-20s %.6g\n%-20s %s\n", "max norm growth", emp->max_norm_growth,
                 "terminal norm", emp->terminal_norm, "mean log rate", emp->mean_log_rate, "decreasing envelope",
                 emp->decreasing_envelope ? "yes" : "no");
  }

  json report = header;
  report["input"] = {{"system", to_json(sys)}, {"sequence", seq.describe()}, {"seed", seq.seed()},
                     {"horizon", a.horizon},   {"samples", a.samples},       {"x0", std::vector<double>(x0.data(), x0.data() + x0.size())},
                     {"P", to_json(p)},        {"times", seq.times()}};
  json result = {{"v_lower", trace.lower}, {"v_upper", trace.upper}};
  if (emp) {
    result["empirical"] = {{"max_norm_growth", emp->max_norm_growth},
                           {"terminal_norm", emp->terminal_norm},
                           {"mean_log_rate", emp->mean_log_rate},
                           {"decreasing_envelope", emp->decreasing_envelope}};
  }
  report["result"] = result;
  report["wall_seconds"] = seconds_since(t0);
  emit(report, a.c.out);
  return kExitStable;
}

// ---------------------------------------------------------------------------

struct ReproduceArgs {
  std::string suite = "all";
  bool tol_report = false;
  std::string out;
};

int run_reproduce(const ReproduceArgs& a, const json& header) {
  const auto names = suite_names();
  if (std::find(names.begin(), names.end(), a.suite) == names.end())
    throw UsageError("unknown suite '" + a.suite + "'");
  const auto t0 = std::chrono::steady_clock::now();
  AnalysisOptions ao;
  SearchOptions so;
  apply_environment(ao, so);
  const auto rows = reproduce(a.suite, ao, so);

  bool all = true;
  std::printf("%-8s %-26s %10s %10s", "suite", "quantity", "expected", "computed");
  if (a.tol_report) std::printf(" %9s %10s", "tol", "|diff|");
  std::printf("  %s\n", "result");
  json jrows = json::array();
  for (const auto& r : rows) {
    all = all && r.pass;
    std::printf("%-8s %-26s %10.5f %10.5f", r.suite.c_str(), r.quantity.c_str(), r.expected, r.computed);
    if (a.tol_report) std::printf(" %9.1e %10.2e", r.tol, std::abs(r.computed - r.expected));
    std::printf("  %s\n", r.pass ? "pass" : "FAIL");
    jrows.push_back({{"suite", r.suite},
                     {"quantity", r.quantity},
                     {"expected", r.expected},
                     {"computed", r.computed},
                     {"tol", r.tol},
                     {"pass", r.pass},
                     {"note", r.note}});
  }
  json report = header;
  report["input"] = {{"suite", a.suite}, {"options", to_json(ao)}, {"search", to_json(so)}};
  report["result"] = {{"rows", jrows}, {"all_pass", all}};
  report["wall_seconds"] = seconds_since(t0);
  emit(report, a.out);
  return all ? kExitStable : kExitUnknown;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dwellcert: dwell-time stability certificates for linear impulsive systems"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  AnalyzeArgs an;
  auto* analyze_cmd = app.add_subcommand("analyze", "run one stability test");
  add_common(analyze_cmd, an.c);
  analyze_cmd->add_option("--method", an.method, "method name, or alpha")->required();
  analyze_cmd->add_option("--T", an.T, "dwell time");
  analyze_cmd->add_option("--Tmin", an.tmin, "lower dwell bound (ranged methods)");
  analyze_cmd->add_option("--Tmax", an.tmax, "upper dwell bound (ranged methods)");
  analyze_cmd->add_option("--P", an.p, "matrix for --method alpha, e.g. diag:1,2");
  analyze_cmd->add_flag("--no-certificate", an.no_certificate, "omit certificate matrices from the report");

  SearchArgs se;
  auto* search_cmd = app.add_subcommand("search", "bisect a stability boundary");
  add_common(search_cmd, se.c);
  search_cmd->add_option("--mode", se.mode, "boundary, interval or oracle")->capture_default_str();
  search_cmd->add_option("--method", se.method, "method name")->capture_default_str();
  search_cmd->add_option("--bracket", se.bracket, "lo,hi")->delimiter(',');
  search_cmd->add_option("--tol", se.tol, "bisection tolerance")->capture_default_str();
  search_cmd->add_option("--prescan", se.prescan, "pre-scan points, 0 disables")->capture_default_str();
  search_cmd->add_option("--seed-T", se.seed_T, "feasible seed for interval searches");
  search_cmd->add_option("--Tmin", se.tmin, "fixed lower bound; bisects Tmax of a ranged method");

  SimulateArgs si;
  auto* simulate_cmd = app.add_subcommand("simulate", "simulate a trajectory and write a CSV trace");
  add_common(simulate_cmd, si.c);
  simulate_cmd->add_option("--seq", si.seq, "periodic:T | random:tmin,tmax,seed | log | file:path")->required();
  simulate_cmd->add_option("--horizon", si.horizon, "number of impulses")->capture_default_str();
  simulate_cmd->add_option("--samples", si.samples, "samples per segment")->capture_default_str();
  simulate_cmd->add_option("--x0", si.x0, "initial state, e.g. 1,0 (default all ones)");
  simulate_cmd->add_option("--P", si.p, "matrix for V(x) = x'Px, or report:FILE (default identity)");
  simulate_cmd->add_option("--csv", si.csv, "CSV output file, - for standard output");

  ReproduceArgs re;
  auto* reproduce_cmd = app.add_subcommand("reproduce", "recompute the reference values");
  reproduce_cmd->add_option("--suite", re.suite, "all, ex1, ex2, ex3, ex4, robust1, robust2")->capture_default_str();
  reproduce_cmd->add_flag("--tol-report", re.tol_report, "print tolerances and deviations");
  reproduce_cmd->add_option("--out", re.out, "write the JSON report to this file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitError;
  }

  const std::vector<std::string> args(argv + 1, argv + argc);
  try {
    if (*analyze_cmd) return run_analyze(an, report_header("analyze", args));
    if (*search_cmd) return run_search(se, report_header("search", args));
    if (*simulate_cmd) return run_simulate(si, report_header("simulate", args));
    if (*reproduce_cmd) return run_reproduce(re, report_header("reproduce", args));
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitError;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << " (at " << e.field() << ")\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
