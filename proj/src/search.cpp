#include "dwellcert/search.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <sstream>
#include <thread>

namespace dwellcert {

const char* to_string(Direction d) { return d == Direction::MaxFeasible ? "max-feasible-T" : "min-feasible-T"; }

namespace {

std::string bracket_message(double lo, bool lf, double hi, bool hf) {
  std::ostringstream os;
  os << "bracket [" << lo << ", " << hi << "] does not straddle a boundary: test(lo) is "
     << (lf ? "feasible" : "infeasible") << ", test(hi) is " << (hf ? "feasible" : "infeasible");
  return os.str();
}

std::vector<Probe> scan(const Predicate& test, const std::vector<double>& ts, int threads) {
  std::vector<Probe> out(ts.size());
  unsigned workers = threads > 0 ? static_cast<unsigned>(threads) : std::thread::hardware_concurrency();
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(ts.size())));
  if (workers == 1) {
    for (std::size_t i = 0; i < ts.size(); ++i) out[i] = {ts[i], test(ts[i])};
    return out;
  }
  std::vector<std::future<void>> jobs;
  for (unsigned w = 0; w < workers; ++w) {
    jobs.push_back(std::async(std::launch::async, [&, w] {
      for (std::size_t i = w; i < ts.size(); i += workers) out[i] = {ts[i], test(ts[i])};
    }));
  }
  for (auto& j : jobs) j.get();
  return out;
}

}  // namespace

BracketError::BracketError(double lo, bool lf, double hi, bool hf)
    : std::runtime_error(bracket_message(lo, lf, hi, hf)), lo_feasible(lf), hi_feasible(hf) {}

BoundaryResult bisect_boundary(const Predicate& test, double lo, double hi, const SearchOptions& o) {
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi))
    throw std::invalid_argument("bisect_boundary: need finite lo < hi");
  if (!(o.tol > 0.0)) throw std::invalid_argument("bisect_boundary: tol must be positive");

  BoundaryResult r;
  r.lo = lo;
  r.hi = hi;
  r.tol = o.tol;

  double a = lo, b = hi;  // a feasible, b infeasible once oriented
  if (o.prescan >= 2) {
    std::vector<double> ts(static_cast<std::size_t>(o.prescan));
    for (int i = 0; i < o.prescan; ++i) ts[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (o.prescan - 1);
    std::vector<Probe> s = scan(test, ts, o.threads);
    r.probes = s;
    const bool lf = s.front().feasible, hf = s.back().feasible;
    if (lf == hf) throw BracketError(lo, lf, hi, hf);
    int switches = 0;
    for (std::size_t i = 1; i < s.size(); ++i) switches += s[i].feasible != s[i - 1].feasible;
    if (switches != 1) {
      throw IntervalError("bisect_boundary: feasible set is not an interval on the pre-scan (" +
                              std::to_string(switches) + " switches)",
                          s);
    }
    for (std::size_t i = 1; i < s.size(); ++i) {
      if (s[i].feasible != s[i - 1].feasible) {
        a = lf ? s[i - 1].T : s[i].T;
        b = lf ? s[i].T : s[i - 1].T;
        break;
      }
    }
    r.direction = lf ? Direction::MaxFeasible : Direction::MinFeasible;
  } else {
    const bool lf = test(lo), hf = test(hi);
    r.probes.push_back({lo, lf});
    r.probes.push_back({hi, hf});
    if (lf == hf) throw BracketError(lo, lf, hi, hf);
    r.direction = lf ? Direction::MaxFeasible : Direction::MinFeasible;
    if (!lf) std::swap(a, b);
  }

  while (std::abs(b - a) > o.tol) {
    const double mid = 0.5 * (a + b);
    const bool f = test(mid);
    r.probes.push_back({mid, f});
    (f ? a : b) = mid;
  }
  r.bound = a;
  r.infeasible = b;
  return r;
}

IntervalResult find_ranged_interval(const std::function<bool(double, double)>& test, double seed, double lo,
                                    double hi, bool joint, const SearchOptions& o) {
  if (!(lo < seed && seed < hi)) throw std::invalid_argument("find_ranged_interval: need lo < seed < hi");
  if (!test(seed, seed)) throw std::invalid_argument("find_ranged_interval: seed is not feasible");
  IntervalResult r;
  if (!joint) {
    r.lower = bisect_boundary([&](double t) { return test(t, t); }, lo, seed, o);
    r.upper = bisect_boundary([&](double t) { return test(t, t); }, seed, hi, o);
  } else {
    r.lower = bisect_boundary([&](double t) { return test(t, seed); }, lo, seed, o);
    const double bottom = r.lower.bound;
    r.upper = bisect_boundary([&](double t) { return test(bottom, t); }, seed, hi, o);
  }
  r.tmin = r.lower.bound;
  r.tmax = r.upper.bound;
  return r;
}

Predicate method_predicate(const ImpulsiveSystem& sys, Method m, const AnalysisOptions& ao) {
  return [sys, m, ao](double T) { return analyze(sys, m, Periodic{T}, ao).stable; };
}

IntervalResult find_ranged_interval(const ImpulsiveSystem& sys, Method m, double seed, const SearchOptions& o,
                                    const AnalysisOptions& ao, double lo, double hi) {
  if (lo <= 0.0) lo = seed / 100.0;
  if (hi <= 0.0) hi = 10.0 * seed;
  const bool joint = m == Method::RangedLooped || m == Method::RangedGrid || m == Method::RobustRanged;
  auto test = [&](double a, double b) {
    if (a == b) return analyze(sys, m, Periodic{a}, ao).stable;
    return analyze(sys, m, Ranged{a, b}, ao).stable;
  };
  return find_ranged_interval(test, seed, lo, hi, joint, o);
}

std::pair<double, double> default_bracket(const ImpulsiveSystem& sys) {
  double norm = 0.0;
  for (const Mat& a : sys.a_vertices) norm = std::max(norm, a.operatorNorm());
  if (norm <= 0.0) norm = 1.0;
  const Applicability app = classify(sys);
  if (app.minimal && !app.maximal) return {1e-3, 50.0 / norm};
  return {1e-3, 10.0 / norm};
}

OracleResult eig_oracle_grid(const ImpulsiveSystem& sys, double T, int points_per_edge) {
  sys.validate();
  if (points_per_edge < 2) throw std::invalid_argument("eig_oracle_grid: need at least 2 points per edge");
  if (!(T > 0.0)) throw std::invalid_argument("eig_oracle_grid: T must be positive");
  OracleResult r;
  r.worst_radius = -1.0;
  const auto ga = simplex_grid(sys.a_vertices.size(), points_per_edge);
  const auto gj = simplex_grid(sys.j_vertices.size(), points_per_edge);
  for (const auto& ka : ga) {
    const Mat e = expm(instantiate(sys, ConvexCombination{ka, gj.front()}).first, T);
    for (const auto& kj : gj) {
      const ConvexCombination c{ka, kj};
      const double rho = spectral_radius(e * instantiate(sys, c).second);
      ++r.samples;
      if (rho > r.worst_radius) {
        r.worst_radius = rho;
        r.worst = c;
      }
    }
  }
  return r;
}

}  // namespace dwellcert
