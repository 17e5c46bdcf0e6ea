#include "dwellcert/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace dwellcert {

namespace {

struct MethodName {
  Method method;
  const char* name;
};

constexpr MethodName kMethodNames[] = {
    {Method::Spectral, "spectral"},
    {Method::PeriodicLmi, "periodic-lmi"},
    {Method::PeriodicLooped, "periodic-looped"},
    {Method::MinimalLemma, "min-dt-lemma"},
    {Method::MinimalLooped, "min-dt"},
    {Method::Arbitrary, "arbitrary"},
    {Method::MaximalLemma, "max-dt-lemma"},
    {Method::MaximalLooped, "max-dt"},
    {Method::MaximalAlt, "max-dt-alt"},
    {Method::RangedGrid, "ranged-grid"},
    {Method::RangedLooped, "ranged"},
    {Method::RobustPeriodic, "robust-periodic"},
    {Method::RobustMinimal, "robust-min-dt"},
    {Method::RobustMaximal, "robust-max-dt"},
    {Method::RobustRanged, "robust-ranged"},
};

using Verifier = std::function<std::vector<Check>(const Certificate&)>;

SolverOptions solver_options(const AnalysisOptions& o) {
  SolverOptions s = o.solver;
  s.strict_margin = o.cfg.strict_margin;
  return s;
}

void require_positive(double T, const char* what) {
  if (!std::isfinite(T) || T <= 0.0) throw std::invalid_argument(std::string(what) + " must be positive");
}

void require_pair(const Mat& a, const Mat& j) {
  require_square(a, "A");
  require_square(j, "J");
  if (a.rows() != j.rows()) throw DimensionError("A and J have different dimensions");
}

std::vector<double> linspace(double lo, double hi, int points) {
  if (points <= 1 || lo == hi) return {hi};
  std::vector<double> v(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) v[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (points - 1);
  return v;
}

// theta grids for the dwell-time claims of each regime.
std::vector<double> theta_at_least(double T, int points) { return linspace(T, 5.0 * T, points); }
std::vector<double> theta_up_to(double T, int points) { return linspace(T / points, T, points); }

Check impulsive_check(const std::vector<std::pair<Mat, Mat>>& systems, const Mat& p,
                      const std::vector<double>& thetas, const std::string& name) {
  Check c{name, -std::numeric_limits<double>::infinity(), 0, false};
  for (const auto& [a, j] : systems) {
    for (double th : thetas) {
      c.value = std::max(c.value, impulsive_residual(a, j, p, th));
      ++c.points;
    }
  }
  c.passed = c.value < 0.0;
  return c;
}

Check sign_check(const std::vector<Mat>& as, const Mat& p, double sign, const std::string& name) {
  Check c{name, -std::numeric_limits<double>::infinity(), 0, false};
  for (const Mat& a : as) {
    c.value = std::max(c.value, max_eig(SymMat::symmetrize(sign * (a.transpose() * p + p * a))));
    ++c.points;
  }
  c.passed = c.value < 0.0;
  return c;
}

Check jump_check(const std::vector<Mat>& js, const Mat& p, const std::string& name) {
  Check c{name, -std::numeric_limits<double>::infinity(), 0, false};
  for (const Mat& j : js) {
    c.value = std::max(c.value, max_eig(SymMat::symmetrize(j.transpose() * p * j - p)));
    ++c.points;
  }
  c.passed = c.value < 0.0;
  return c;
}

Verdict run(Method m, const VarRegistry& reg, std::vector<LabeledMap> cons, const AnalysisOptions& o,
            const Verifier& verify, Evidence evidence = Evidence::Certified) {
  Verdict v;
  v.method = m;
  FeasibilityProblem prob = assemble_problem(std::move(cons), reg, o.cfg);
  SolveReport rep = solve(prob, solver_options(o));
  v.report = rep;
  if (rep.status != SolveStatus::StrictlyFeasible) {
    v.note = std::string("solver: ") + to_string(rep.status) + " (" + rep.message + ")";
    return v;
  }
  Certificate cert = extract(rep, reg);
  v.checks = verify(cert);
  v.stable = std::all_of(v.checks.begin(), v.checks.end(), [](const Check& c) { return c.passed; });
  v.evidence = v.stable ? evidence : Evidence::None;
  if (!v.stable) v.note = "certificate failed verification";
  v.certificate = std::move(cert);
  return v;
}

void add_looped(std::vector<LabeledMap>& cons, const Mat& a, const Mat& j, double T, const VarRegistry& reg) {
  const LoopedBlocks b = build_nominal_blocks(a, j, T, reg);
  const std::string t = std::to_string(T);
  cons.push_back({"Psi(" + t + ")", b.psi});
  cons.push_back({"Phi(" + t + ")", b.phi});
}

VarRegistry looped_registry(Eigen::Index n) {
  VarRegistry reg;
  register_looped_vars(reg, n, LoopedVars::nominal());
  return reg;
}

VarRegistry p_registry(Eigen::Index n) {
  VarRegistry reg;
  reg.add_symmetric("P", n, true);
  return reg;
}

}  // namespace

const char* to_string(Method m) {
  for (const auto& e : kMethodNames)
    if (e.method == m) return e.name;
  return "?";
}

std::optional<Method> parse_method(const std::string& s) {
  for (const auto& e : kMethodNames)
    if (s == e.name) return e.method;
  return std::nullopt;
}

std::vector<Method> all_methods() {
  std::vector<Method> v;
  for (const auto& e : kMethodNames) v.push_back(e.method);
  return v;
}

const char* to_string(Evidence e) {
  switch (e) {
    case Evidence::None: return "none";
    case Evidence::Spectral: return "spectral";
    case Evidence::Certified: return "certified";
    case Evidence::GridEvidence: return "grid evidence";
  }
  return "?";
}

double impulsive_residual(const Mat& a, const Mat& j, const Mat& p, double theta) {
  const Mat e = expm(a, theta) * j;
  return max_eig(SymMat::symmetrize(e.transpose() * p * e - p));
}

std::vector<std::vector<double>> simplex_grid(std::size_t dim, int points) {
  if (dim == 0) throw std::invalid_argument("simplex_grid: zero dimension");
  if (dim == 1) return {{1.0}};
  if (points < 2) throw std::invalid_argument("simplex_grid: need at least 2 points per edge");
  const int steps = points - 1;
  std::vector<std::vector<double>> out;
  std::vector<int> parts(dim, 0);
  // Enumerate compositions of `steps` into `dim` nonnegative parts.
  std::function<void(std::size_t, int)> rec = [&](std::size_t k, int left) {
    if (k + 1 == dim) {
      parts[k] = left;
      std::vector<double> w(dim);
      for (std::size_t i = 0; i < dim; ++i) w[i] = static_cast<double>(parts[i]) / steps;
      out.push_back(std::move(w));
      return;
    }
    for (int i = 0; i <= left; ++i) {
      parts[k] = i;
      rec(k + 1, left - i);
    }
  };
  rec(0, steps);
  return out;
}

Verdict periodic_spectral(const Mat& a, const Mat& j, double T, const AnalysisOptions& o) {
  require_pair(a, j);
  require_positive(T, "T");
  Verdict v;
  v.method = Method::Spectral;
  v.radius = spectral_radius(expm(a, T) * j);
  v.stable = v.radius < 1.0 - o.cfg.eig_margin;
  v.evidence = v.stable ? Evidence::Spectral : Evidence::None;
  return v;
}

Verdict periodic_lmi(const Mat& a, const Mat& j, double T, const AnalysisOptions& o) {
  require_pair(a, j);
  require_positive(T, "T");
  VarRegistry reg = p_registry(a.rows());
  std::vector<LabeledMap> cons{{"I(T)", op_I_schur(a, j, T, reg)}};
  return run(Method::PeriodicLmi, reg, std::move(cons), o, [&](const Certificate& c) {
    return std::vector<Check>{impulsive_check({{a, j}}, c.P(), {T}, "I(P,A,J,T)")};
  });
}

Verdict periodic_looped(const Mat& a, const Mat& j, double T, const AnalysisOptions& o) {
  require_pair(a, j);
  require_positive(T, "T");
  VarRegistry reg = looped_registry(a.rows());
  std::vector<LabeledMap> cons;
  add_looped(cons, a, j, T, reg);
  return run(Method::PeriodicLooped, reg, std::move(cons), o, [&](const Certificate& c) {
    return std::vector<Check>{impulsive_check({{a, j}}, c.P(), {T}, "I(P,A,J,T)")};
  });
}

Verdict minimal_dwell_lemma(const Mat& a, const Mat& j, double T, const AnalysisOptions& o) {
  require_pair(a, j);
  require_positive(T, "T");
  VarRegistry reg = p_registry(a.rows());
  std::vector<LabeledMap> cons{{"C(P,A)", op_C(a, reg)}, {"I(T)", op_I_schur(a, j, T, reg)}};
  return run(Method::MinimalLemma, reg, std::move(cons), o, [&](const Certificate& c) {
    return std::vector<Check>{
        sign_check({a}, c.P(), 1.0, "C(P,A) < 0"),
        impulsive_check({{a, j}}, c.P(), theta_at_least(T, o.verify_grid), "I on [T, 5T]")};
  });
}

Verdict minimal_dwell_looped(const Mat& a, const Mat& j, double T, const AnalysisOptions& o) {
  require_pair(a, j);
  require_positive(T, "T");
  VarRegistry reg = looped_registry(a.rows());
  std::vector<LabeledMap> cons;
  add_looped(cons, a, j, T, reg);
  cons.push_back({"C(P,A)", op_C(a, reg)});
  return run(Method::MinimalLooped, reg, std::move(cons), o, [&](const Certificate& c) {
    return std::vector<Check>{
        sign_check({a}, c.P(), 1.0, "C(P,A) < 0"),
        impulsive_check({{a, j}}, c.P(), theta_at_least(T, o.verify_grid), "I on [T, 5T]")};
  });
}

Verdict arbitrary_impulses(const Mat& a, const Mat& j, const AnalysisOptions& o) {
  require_pair(a, j);
  VarRegistry reg = p_registry(a.rows());
  std::vector<LabeledMap> cons{{"C(P,A)", op_C(a, reg)}, {"D(P,J)", op_D(j, reg)}};
  return run(Method::Arbitrary, reg, std::move(cons), o, [&](const Certificate& c) {
    return std::vector<Check>{sign_check({a}, c.P(), 1.0, "C(P,A) < 0"),
                              jump_check({j}, c.P(), "D(P,J) < 0")};
  });
}

Verdict maximal_dwell_lemma(const Mat& a, const Mat& j, double T, const AnalysisOptions& o) {
  require_pair(a, j);
  require_positive(T, "T");
  VarRegistry reg = p_registry(a.rows());
  std::vector<LabeledMap> cons{{"-C(P,A)", op_C(a, reg).negated()}, {"I(T)", op_I_schur(a, j, T, reg)}};
  return run(Method::MaximalLemma, reg, std::move(cons), o, [&](const Certificate& c) {
    return std::vector<Check>{
        sign_check({a}, c.P(), -1.0, "C(P,A) > 0"),
        impulsive_check({{a, j}}, c.P(), theta_up_to(T, o.verify_grid), "I on (0, T]")};
  });
}

Verdict maximal_dwell_looped(const Mat& a, const Mat& j, double T, const AnalysisOptions& o) {
  require_pair(a, j);
  require_positive(T, "T");
  VarRegistry reg = looped_registry(a.rows());
  std::vector<LabeledMap> cons;
  add_looped(cons, a, j, T, reg);
  cons.push_back({"-C(P,A)", op_C(a, reg).negated()});
  return run(Method::MaximalLooped, reg, std::move(cons), o, [&](const Certificate& c) {
    return std::vector<Check>{
        sign_check({a}, c.P(), -1.0, "C(P,A) > 0"),
        impulsive_check({{a, j}}, c.P(), theta_up_to(T, o.verify_grid), "I on (0, T]")};
  });
}

Verdict maximal_dwell_alt(const Mat& a, const Mat& j, double T, const AnalysisOptions& o) {
  require_pair(a, j);
  require_positive(T, "T");
  VarRegistry reg = looped_registry(a.rows());
  std::vector<LabeledMap> cons;
  add_looped(cons, a, j, T, reg);
  cons.push_back({"D(P,J)", op_D(j, reg)});
  return run(Method::MaximalAlt, reg, std::move(cons), o, [&](const Certificate& c) {
    return std::vector<Check>{
        jump_check({j}, c.P(), "D(P,J) < 0"),
        impulsive_check({{a, j}}, c.P(), theta_up_to(T, o.verify_grid), "I on (0, T]")};
  });
}

Verdict ranged_lemma_grid(const Mat& a, const Mat& j, double tmin, double tmax, int grid,
                          const AnalysisOptions& o) {
  require_pair(a, j);
  validate(Ranged{tmin, tmax}, o.cfg.dwell_epsilon);
  if (grid < 1 || (grid < 2 && tmin < tmax)) throw std::invalid_argument("ranged_lemma_grid: grid too coarse");
  const std::vector<double> thetas = linspace(tmin, tmax, grid);
  VarRegistry reg = p_registry(a.rows());
  std::vector<LabeledMap> cons;
  for (double th : thetas) cons.push_back({"I(" + std::to_string(th) + ")", op_I_schur(a, j, th, reg)});
  Verdict v = run(
      Method::RangedGrid, reg, std::move(cons), o,
      [&](const Certificate& c) {
        return std::vector<Check>{impulsive_check({{a, j}}, c.P(), thetas, "I on grid")};
      },
      tmin == tmax ? Evidence::Certified : Evidence::GridEvidence);
  if (tmin < tmax) v.note += (v.note.empty() ? "" : "; ") + std::string("grid density ") + std::to_string(grid);
  return v;
}

Verdict ranged_looped(const Mat& a, const Mat& j, double tmin, double tmax, const AnalysisOptions& o) {
  require_pair(a, j);
  validate(Ranged{tmin, tmax}, o.cfg.dwell_epsilon);
  VarRegistry reg = looped_registry(a.rows());
  std::vector<LabeledMap> cons;
  add_looped(cons, a, j, tmin, reg);
  if (tmax > tmin) add_looped(cons, a, j, tmax, reg);
  return run(Method::RangedLooped, reg, std::move(cons), o, [&](const Certificate& c) {
    return std::vector<Check>{
        impulsive_check({{a, j}}, c.P(), linspace(tmin, tmax, o.verify_grid), "I on [Tmin, Tmax]")};
  });
}

namespace {

enum class RobustSide { None, Hurwitz, AntiHurwitz };

Verdict robust(Method m, const ImpulsiveSystem& sys, const std::vector<double>& Ts, RobustSide side,
               const std::vector<double>& thetas, const AnalysisOptions& o) {
  sys.validate();
  VarRegistry reg;
  reg.add_symmetric("P", sys.n, true);
  for (std::size_t jv = 0; jv < sys.j_vertices.size(); ++jv)
    register_looped_vars(reg, sys.n, LoopedVars::vertex(static_cast<int>(jv) + 1));
  std::vector<LabeledMap> cons;
  for (double T : Ts) {
    for (std::size_t iv = 0; iv < sys.a_vertices.size(); ++iv) {
      for (std::size_t jv = 0; jv < sys.j_vertices.size(); ++jv) {
        const LoopedBlocks b =
            build_robust_blocks(sys.a_vertices[iv], sys.j_vertices[jv], T, reg, static_cast<int>(jv) + 1);
        const std::string tag = std::to_string(iv + 1) + std::to_string(jv + 1) + "(" + std::to_string(T) + ")";
        cons.push_back({"Psi_" + tag, b.psi});
        cons.push_back({"Phi_" + tag, b.phi});
      }
    }
  }
  for (std::size_t iv = 0; iv < sys.a_vertices.size(); ++iv) {
    const std::string i = std::to_string(iv + 1);
    if (side == RobustSide::Hurwitz) cons.push_back({"C(P,A_" + i + ")", op_C(sys.a_vertices[iv], reg)});
    if (side == RobustSide::AntiHurwitz)
      cons.push_back({"-C(P,A_" + i + ")", op_C(sys.a_vertices[iv], reg).negated()});
  }
  return run(m, reg, std::move(cons), o, [&](const Certificate& c) {
    std::vector<std::pair<Mat, Mat>> combos;
    std::vector<Mat> as;
    for (const auto& ka : simplex_grid(sys.a_vertices.size(), o.simplex_grid)) {
      for (const auto& kj : simplex_grid(sys.j_vertices.size(), o.simplex_grid)) {
        combos.push_back(instantiate(sys, ConvexCombination{ka, kj}));
      }
    }
    for (const auto& ka : simplex_grid(sys.a_vertices.size(), o.simplex_grid))
      as.push_back(instantiate(sys, ConvexCombination{ka, std::vector<double>(sys.j_vertices.size(),
                                                                              1.0 / sys.j_vertices.size())})
                       .first);
    std::vector<Check> checks{impulsive_check(combos, c.P(), thetas, "I on (kappa, theta) grid")};
    if (side == RobustSide::Hurwitz) checks.push_back(sign_check(as, c.P(), 1.0, "C(P,A) < 0 on kappa grid"));
    if (side == RobustSide::AntiHurwitz)
      checks.push_back(sign_check(as, c.P(), -1.0, "C(P,A) > 0 on kappa grid"));
    return checks;
  });
}

}  // namespace

Verdict robust_periodic(const ImpulsiveSystem& sys, double T, const AnalysisOptions& o) {
  require_positive(T, "T");
  return robust(Method::RobustPeriodic, sys, {T}, RobustSide::None, {T}, o);
}

Verdict robust_minimal(const ImpulsiveSystem& sys, double T, const AnalysisOptions& o) {
  require_positive(T, "T");
  return robust(Method::RobustMinimal, sys, {T}, RobustSide::Hurwitz, theta_at_least(T, o.verify_grid), o);
}

Verdict robust_maximal(const ImpulsiveSystem& sys, double T, const AnalysisOptions& o) {
  require_positive(T, "T");
  return robust(Method::RobustMaximal, sys, {T}, RobustSide::AntiHurwitz, theta_up_to(T, o.verify_grid), o);
}

Verdict robust_ranged(const ImpulsiveSystem& sys, double tmin, double tmax, const AnalysisOptions& o) {
  validate(Ranged{tmin, tmax}, o.cfg.dwell_epsilon);
  std::vector<double> Ts{tmin};
  if (tmax > tmin) Ts.push_back(tmax);
  return robust(Method::RobustRanged, sys, Ts, RobustSide::None, linspace(tmin, tmax, o.verify_grid), o);
}

Verdict analyze(const ImpulsiveSystem& sys, Method m, const DwellTimeSpec& spec, const AnalysisOptions& o) {
  sys.validate();
  validate(spec, o.cfg.dwell_epsilon);
  double T = 0.0, tmin = 0.0, tmax = 0.0;
  const bool arbitrary = std::holds_alternative<Arbitrary>(spec);
  if (const auto* r = std::get_if<Ranged>(&spec)) {
    tmin = r->tmin;
    tmax = r->tmax;
    T = tmax;
  } else if (!arbitrary) {
    std::visit(
        [&](const auto& s) {
          if constexpr (!std::is_same_v<std::decay_t<decltype(s)>, Arbitrary> &&
                        !std::is_same_v<std::decay_t<decltype(s)>, Ranged>)
            T = s.T;
        },
        spec);
    tmin = tmax = T;
  }
  const bool robust_method = m == Method::RobustPeriodic || m == Method::RobustMinimal ||
                             m == Method::RobustMaximal || m == Method::RobustRanged;
  if (!robust_method && !sys.nominal())
    throw std::invalid_argument(std::string(to_string(m)) + " needs a nominal system; use a robust method");
  const bool needs_T = m != Method::Arbitrary;
  if (needs_T && arbitrary) throw std::invalid_argument(std::string(to_string(m)) + " needs a dwell time");
  const bool ranged_method = m == Method::RangedGrid || m == Method::RangedLooped || m == Method::RobustRanged;
  if (!ranged_method && std::holds_alternative<Ranged>(spec) && tmin != tmax)
    throw std::invalid_argument(std::string(to_string(m)) + " takes a single T, not a range");

  switch (m) {
    case Method::Spectral: return periodic_spectral(sys.A(), sys.J(), T, o);
    case Method::PeriodicLmi: return periodic_lmi(sys.A(), sys.J(), T, o);
    case Method::PeriodicLooped: return periodic_looped(sys.A(), sys.J(), T, o);
    case Method::MinimalLemma: return minimal_dwell_lemma(sys.A(), sys.J(), T, o);
    case Method::MinimalLooped: return minimal_dwell_looped(sys.A(), sys.J(), T, o);
    case Method::Arbitrary: return arbitrary_impulses(sys.A(), sys.J(), o);
    case Method::MaximalLemma: return maximal_dwell_lemma(sys.A(), sys.J(), T, o);
    case Method::MaximalLooped: return maximal_dwell_looped(sys.A(), sys.J(), T, o);
    case Method::MaximalAlt: return maximal_dwell_alt(sys.A(), sys.J(), T, o);
    case Method::RangedGrid: return ranged_lemma_grid(sys.A(), sys.J(), tmin, tmax, o.verify_grid, o);
    case Method::RangedLooped: return ranged_looped(sys.A(), sys.J(), tmin, tmax, o);
    case Method::RobustPeriodic: return robust_periodic(sys, T, o);
    case Method::RobustMinimal: return robust_minimal(sys, T, o);
    case Method::RobustMaximal: return robust_maximal(sys, T, o);
    case Method::RobustRanged: return robust_ranged(sys, tmin, tmax, o);
  }
  throw std::logic_error("analyze: unhandled method");
}

AlphaConstants alpha_stability_constants(const Mat& a, const Mat& j, const Mat& p) {
  require_pair(a, j);
  if (p.rows() != a.rows() || p.cols() != a.cols()) throw DimensionError("alpha constants: P has wrong size");
  const Mat ps = 0.5 * (p + p.transpose());
  Eigen::LLT<Mat> llt(ps);
  if (llt.info() != Eigen::Success || min_eig(SymMat::from_upper(ps)) <= 0.0)
    throw std::invalid_argument("alpha constants: P is not positive definite");
  const Eigen::Index n = a.rows();
  const Mat l_inv = llt.matrixL().solve(Mat::Identity(n, n));
  auto reduced = [&](const Mat& m) { return SymMat::symmetrize(l_inv * m * l_inv.transpose()); };
  AlphaConstants out;
  out.c = -max_eig(reduced(a.transpose() * ps + ps * a));
  const double arg = 1.0 + max_eig(reduced(j.transpose() * ps * j - ps));
  if (!(arg > 0.0)) throw std::domain_error("alpha constants: 1 + lambda_max is not positive, d undefined");
  out.d = -std::log(arg);
  return out;
}

}  // namespace dwellcert
