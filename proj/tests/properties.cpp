#include "properties.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "dwellcert/analysis.hpp"
#include "dwellcert/search.hpp"
#include "dwellcert/trajectory.hpp"
#include "support.hpp"

namespace dwellcert::properties {

using testing::random_mat;

namespace {

void violation(Result& r, const std::string& what) {
  if (r.violations++ == 0) r.first_violation = what;
}

std::string fmt(const char* label, double v) {
  std::ostringstream os;
  os << label << "=" << v;
  return os.str();
}

Mat sym_random(std::mt19937_64& gen, Eigen::Index n, double scale) {
  const Mat m = random_mat(gen, n, n, scale);
  return 0.5 * (m + m.transpose());
}

// max eigenvalue of J' e^{A' th} P e^{A th} J - P over a theta list, from scratch.
double impulsive_worst(const Mat& a, const Mat& j, const Mat& p, const std::vector<double>& thetas) {
  double worst = -1e300;
  for (double th : thetas) {
    const Mat e = expm(a, th) * j;
    const Mat m = e.transpose() * p * e - p;
    worst = std::max(worst, Eigen::SelfAdjointEigenSolver<Mat>(0.5 * (m + m.transpose())).eigenvalues().maxCoeff());
  }
  return worst;
}

double flow_extreme(const Mat& a, const Mat& p, bool want_max) {
  const Mat c = a.transpose() * p + p * a;
  const Vec ev = Eigen::SelfAdjointEigenSolver<Mat>(0.5 * (c + c.transpose())).eigenvalues();
  return want_max ? ev.maxCoeff() : ev.minCoeff();
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v;
  for (int i = 0; i < n; ++i) v.push_back(n == 1 ? lo : lo + (hi - lo) * i / (n - 1));
  return v;
}

struct Draw {
  TrajectorySegment seg;
  Vec prev_pre;
  FunctionalVars vars;
  Mat a;
  double scale = 1.0;
};

Draw random_draw(std::mt19937_64& gen) {
  std::uniform_int_distribution<int> dim(1, 3);
  std::uniform_real_distribution<double> dwell(0.05, 1.0);
  const int n = dim(gen);
  Draw d;
  d.a = random_mat(gen, n, n, 1.5);
  const Mat j = random_mat(gen, n, n, 1.2);
  const Vec x0 = random_mat(gen, n, 1, 2.0);
  const double t1 = dwell(gen), t2 = dwell(gen);
  const auto segs = simulate(d.a, j, x0, ImpulseSequence::explicit_times({0.0, t1, t1 + t2}), 8);
  d.seg = segs[1];
  d.prev_pre = segs[0].pre;
  const Mat l = random_mat(gen, n, n);
  d.vars.P = l * l.transpose() + 0.1 * Mat::Identity(n, n);
  const Mat lz = random_mat(gen, n, n);
  d.vars.Z = lz * lz.transpose();
  d.vars.Q = sym_random(gen, n, 2.0);
  d.vars.U = sym_random(gen, n, 2.0);
  d.vars.R = random_mat(gen, n, n, 2.0);
  double xmax = std::max(d.prev_pre.norm(), d.seg.start.norm());
  for (const Vec& x : d.seg.states) xmax = std::max(xmax, x.norm());
  const double vnorm = d.vars.P.norm() + d.vars.Q.norm() + d.vars.R.norm() + d.vars.U.norm() +
                       d.vars.Z.norm() * (1.0 + d.a.norm() * d.a.norm());
  d.scale = std::max(1.0, vnorm * xmax * xmax);
  return d;
}

}  // namespace

Result spectral_vs_lmi(int systems, unsigned seed) {
  Result r{"spectral vs periodic LMI", 0, 0, {}};
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> dwell(0.05, 2.0);
  while (r.cases < systems) {
    const Mat a = random_mat(gen, 2, 2, 2.0), j = random_mat(gen, 2, 2, 1.5);
    const double T = dwell(gen);
    const double rho = spectral_radius(expm(a, T) * j);
    if (rho > 0.98 && rho < 1.02) continue;
    ++r.cases;
    const bool spec = periodic_spectral(a, j, T).stable;
    const bool lmi = periodic_lmi(a, j, T).stable;
    if (spec != lmi) violation(r, fmt("radius", rho) + " " + fmt("T", T));
  }
  return r;
}

Result certificate_implication(int systems, unsigned seed) {
  Result r{"certificate implication", 0, 0, {}};
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> dwell(0.05, 1.5);
  const int grid = 60;

  auto check = [&](const Verdict& v, const Mat& a, const Mat& j, const std::vector<double>& thetas,
                   const std::string& what) {
    if (!v.stable || !v.certificate) return;
    ++r.cases;
    const Mat& p = v.certificate->P();
    const double worst = impulsive_worst(a, j, p, thetas);
    if (!(worst < 0.0)) violation(r, what + " " + fmt("lambda_max", worst));
  };

  std::vector<std::pair<Mat, Mat>> nominal;
  for (const auto& s : {examples::ex1(), examples::ex2(), examples::ex3(), examples::ex4()})
    nominal.emplace_back(s.A(), s.J());
  for (int s = 0; s < systems; ++s) nominal.emplace_back(random_mat(gen, 2, 2, 1.5), random_mat(gen, 2, 2, 1.2));

  for (const auto& [a, j] : nominal) {
    for (int rep = 0; rep < 3; ++rep) {
      const double T = dwell(gen);
      check(periodic_lmi(a, j, T), a, j, {T}, "periodic-lmi");
      check(periodic_looped(a, j, T), a, j, {T}, "periodic-looped");
      for (const Verdict& v : {minimal_dwell_lemma(a, j, T), minimal_dwell_looped(a, j, T)}) {
        check(v, a, j, linspace(T, 5 * T, grid), to_string(v.method));
        if (v.stable && !(flow_extreme(a, v.certificate->P(), true) < 0.0)) violation(r, "min-dt C(P,A) sign");
      }
      for (const Verdict& v : {maximal_dwell_lemma(a, j, T), maximal_dwell_looped(a, j, T)}) {
        check(v, a, j, linspace(T / grid, T, grid), to_string(v.method));
        if (v.stable && !(flow_extreme(a, v.certificate->P(), false) > 0.0)) violation(r, "max-dt C(P,A) sign");
      }
      check(maximal_dwell_alt(a, j, T), a, j, linspace(T / grid, T, grid), "max-dt-alt");
      const double tmax = T * 1.3;
      check(ranged_looped(a, j, T, tmax), a, j, linspace(T, tmax, grid), "ranged");

      // Soundness against the eigenvalue test at the same period.
      const double rho = spectral_radius(expm(a, T) * j);
      for (const Verdict& v : {periodic_lmi(a, j, T), periodic_looped(a, j, T)})
        if (v.stable && !(rho < 1.0)) violation(r, "stable verdict with " + fmt("radius", rho));
    }
  }

  // Robust: shared P over the vertex hulls.
  auto robust_check = [&](const ImpulsiveSystem& sys, const Verdict& v, double lo, double hi) {
    if (!v.stable || !v.certificate) return;
    ++r.cases;
    const Mat& p = v.certificate->P();
    double worst = -1e300;
    for (const auto& ka : simplex_grid(sys.a_vertices.size(), 11))
      for (const auto& kj : simplex_grid(sys.j_vertices.size(), 11)) {
        const auto [a, j] = instantiate(sys, {ka, kj});
        worst = std::max(worst, impulsive_worst(a, j, p, linspace(lo, hi, lo == hi ? 1 : 20)));
      }
    if (!(worst < 0.0)) violation(r, sys.label + " " + fmt("lambda_max", worst));
  };
  const auto r1 = examples::robust1(), r2 = examples::robust2();
  robust_check(r1, robust_periodic(r1, 0.1), 0.1, 0.1);
  robust_check(r1, robust_maximal(r1, 0.1), 0.005, 0.1);
  robust_check(r2, robust_periodic(r2, 0.4), 0.4, 0.4);
  robust_check(r2, robust_ranged(r2, 0.3, 0.5), 0.3, 0.5);
  return r;
}

Result loop_condition(int draws, unsigned seed) {
  Result r{"loop condition", 0, 0, {}};
  std::mt19937_64 gen(seed);
  for (int i = 0; i < draws; ++i) {
    const Draw d = random_draw(gen);
    ++r.cases;
    const double v0 = eval_looped_functional(d.a, d.seg, 0.0, d.vars);
    const double vT = eval_looped_functional(d.a, d.seg, d.seg.T, d.vars);
    if (std::abs(v0) > 1e-9 * d.scale || std::abs(vT) > 1e-9 * d.scale)
      violation(r, fmt("V(0)", v0) + " " + fmt("V(T)", vT) + " " + fmt("scale", d.scale));
  }
  return r;
}

Result integral_identity(int draws, unsigned seed) {
  Result r{"integral identity", 0, 0, {}};
  std::mt19937_64 gen(seed);
  for (int i = 0; i < draws; ++i) {
    const Draw d = random_draw(gen);
    ++r.cases;
    const double lhs = integrate_w_derivative(d.a, d.seg, d.prev_pre, d.vars);
    const double rhs = d.seg.pre.dot(d.vars.P * d.seg.pre) - d.prev_pre.dot(d.vars.P * d.prev_pre);
    if (std::abs(lhs - rhs) > 1e-7 * d.scale) violation(r, fmt("integral", lhs) + " " + fmt("dV", rhs));
  }
  return r;
}

Result small_t_dichotomy(int draws, unsigned seed) {
  Result r{"small-T Schur dichotomy", 0, 0, {}};
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> small(0.1, 0.9), large(1.1, 2.0);
  std::uniform_int_distribution<int> dim(1, 3);
  for (int i = 0; i < draws; ++i) {
    const int n = dim(gen);
    const Mat a = random_mat(gen, n, n, 2.0);
    const bool schur = i % 2 == 0;
    const Mat j = testing::with_radius(random_mat(gen, n, n), schur ? small(gen) : large(gen));
    ++r.cases;
    const bool spectral = periodic_spectral(a, j, 1e-7).stable;
    const bool lmi = periodic_lmi(a, j, 1e-7).stable;
    if (spectral != schur || lmi != schur)
      violation(r, fmt("rho(J)", spectral_radius(j)) + (spectral ? " spectral stable" : " spectral unknown") +
                       (lmi ? ", lmi stable" : ", lmi unknown"));
  }
  return r;
}

Result ranged_degeneracy(int systems, unsigned seed) {
  Result r{"ranged degeneracy", 0, 0, {}};
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> dwell(0.05, 1.5);
  AnalysisOptions o;
  for (int s = 0; s < systems; ++s) {
    const Mat a = random_mat(gen, 2, 2, 1.5), j = random_mat(gen, 2, 2, 1.2);
    const double T = dwell(gen);
    const ImpulsiveSystem sys = make_nominal(a, j);
    for (Method m : all_methods()) {
      ++r.cases;
      const bool periodic = analyze(sys, m, Periodic{T}, o).stable;
      const bool ranged = analyze(sys, m, Ranged{T, T}, o).stable;
      if (periodic != ranged) violation(r, std::string(to_string(m)) + " " + fmt("T", T));
    }
    // The ranged procedures against their periodic counterparts.
    ++r.cases;
    if (ranged_looped(a, j, T, T).stable != periodic_looped(a, j, T).stable) violation(r, "ranged vs looped " + fmt("T", T));
    ++r.cases;
    if (ranged_lemma_grid(a, j, T, T, 50).stable != periodic_lmi(a, j, T).stable)
      violation(r, "grid vs lmi " + fmt("T", T));
    ++r.cases;
    if (robust_ranged(sys, T, T).stable != robust_periodic(sys, T).stable) violation(r, "robust " + fmt("T", T));
  }
  return r;
}

Result search_consistency(int systems, unsigned seed) {
  Result r{"search consistency", 0, 0, {}};
  std::mt19937_64 gen(seed);

  auto log_consistent = [&](const BoundaryResult& b) {
    const bool max_dir = b.direction == Direction::MaxFeasible;
    for (const Probe& p : b.probes) {
      const bool feasible_side = max_dir ? p.T <= b.bound : p.T >= b.bound;
      const bool infeasible_side = max_dir ? p.T >= b.infeasible : p.T <= b.infeasible;
      if (p.feasible ? !feasible_side : !infeasible_side) return false;
    }
    return std::abs(b.bound - b.infeasible) <= b.tol;
  };

  struct Case {
    ImpulsiveSystem sys;
    Method looped, lemma;
  };
  std::vector<Case> cases{{examples::ex1(), Method::MaximalLooped, Method::MaximalLemma},
                          {examples::ex2(), Method::MinimalLooped, Method::MinimalLemma}};
  for (int s = 0; s < systems; ++s) {
    const bool max_case = s % 2 == 0;
    Mat a = sym_random(gen, 2, 1.0);
    Mat j = sym_random(gen, 2, 0.3);
    if (max_case) {
      a += (0.3 - min_real_part(a)) * Mat::Identity(2, 2);
      j += 0.5 * Mat::Identity(2, 2);
    } else {
      a -= (0.3 + max_real_part(a)) * Mat::Identity(2, 2);
      j += 1.5 * Mat::Identity(2, 2);
    }
    cases.push_back({make_nominal(a, j), max_case ? Method::MaximalLooped : Method::MinimalLooped,
                     max_case ? Method::MaximalLemma : Method::MinimalLemma});
  }

  for (const Case& c : cases) {
    const auto [lo, hi] = default_bracket(c.sys);
    try {
      SearchOptions coarse, fine;
      coarse.tol = 1e-3;
      fine.tol = 1e-4;
      const BoundaryResult looped = bisect_boundary(method_predicate(c.sys, c.looped), lo, hi, fine);
      const BoundaryResult looped_coarse = bisect_boundary(method_predicate(c.sys, c.looped), lo, hi, coarse);
      const BoundaryResult lemma = bisect_boundary(method_predicate(c.sys, c.lemma), lo, hi, fine);
      const BoundaryResult spectral = bisect_boundary(method_predicate(c.sys, Method::Spectral), lo, hi, fine);
      ++r.cases;
      for (const BoundaryResult* b : {&looped, &looped_coarse, &lemma, &spectral})
        if (!log_consistent(*b)) violation(r, c.sys.label + " probe log");
      if (std::abs(looped.bound - looped_coarse.bound) > coarse.tol + 1e-12)
        violation(r, c.sys.label + " refinement " + fmt("coarse", looped_coarse.bound) + " " + fmt("fine", looped.bound));
      const double slack = fine.tol;
      const bool max_dir = looped.direction == Direction::MaxFeasible;
      const bool ordered = max_dir ? looped.bound <= lemma.bound + slack && lemma.bound <= spectral.bound + slack
                                   : looped.bound >= lemma.bound - slack && lemma.bound >= spectral.bound - slack;
      if (!ordered)
        violation(r, c.sys.label + " ordering " + fmt("looped", looped.bound) + " " + fmt("lemma", lemma.bound) + " " +
                         fmt("spectral", spectral.bound));
    } catch (const BracketError&) {
      // No switch inside the default bracket: nothing to compare.
    } catch (const IntervalError&) {
    }
  }
  return r;
}

}  // namespace dwellcert::properties
