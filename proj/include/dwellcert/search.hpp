#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dwellcert/analysis.hpp"

namespace dwellcert {

enum class Direction { MaxFeasible, MinFeasible };
const char* to_string(Direction d);

struct Probe {
  double T = 0.0;
  bool feasible = false;
};

struct BoundaryResult {
  double bound = 0.0;  // the feasible end of the final bracket
  double infeasible = 0.0;  // the infeasible end, |bound - infeasible| <= tol
  Direction direction = Direction::MaxFeasible;
  double lo = 0.0;
  double hi = 0.0;
  double tol = 0.0;
  std::vector<Probe> probes;  // pre-scan first, then bisection, in evaluation order
};

/// Both bracket ends gave the same verdict.
class BracketError : public std::runtime_error {
 public:
  BracketError(double lo, bool lo_feasible, double hi, bool hi_feasible);
  bool lo_feasible;
  bool hi_feasible;
};

/// The pre-scan saw more than one feasibility switch inside the bracket.
class IntervalError : public std::runtime_error {
 public:
  IntervalError(const std::string& what, std::vector<Probe> scan)
      : std::runtime_error(what), scan(std::move(scan)) {}
  std::vector<Probe> scan;
};

using Predicate = std::function<bool(double)>;

struct SearchOptions {
  double tol = 1e-4;
  int prescan = 20;  // 0 disables the interval check
  int threads = 0;   // pre-scan workers; 0 picks hardware concurrency
};

/// Locates the switch of `test` inside [lo, hi]. Direction follows from which end is
/// feasible. The pre-scan evaluates evenly spaced points and refuses brackets whose
/// feasible set is not an interval ending at one of the bracket ends.
BoundaryResult bisect_boundary(const Predicate& test, double lo, double hi, const SearchOptions& o = {});

struct IntervalResult {
  double tmin = 0.0;
  double tmax = 0.0;
  BoundaryResult lower;
  BoundaryResult upper;
};

/// Grows an interval from a feasible seed. `test(tmin, tmax)` decides an interval.
/// Independent mode bisects each end with a point test (tmin = tmax); joint mode first
/// pulls tmin down with tmax = seed, then pushes tmax up with tmin fixed at the result.
IntervalResult find_ranged_interval(const std::function<bool(double, double)>& test, double seed,
                                    double lo, double hi, bool joint, const SearchOptions& o = {});

/// Method-level wrapper: periodic-style methods search independently, ranged methods
/// jointly. The bracket defaults to [seed / 100, 10 * seed].
IntervalResult find_ranged_interval(const ImpulsiveSystem& sys, Method m, double seed,
                                    const SearchOptions& o = {}, const AnalysisOptions& ao = {},
                                    double lo = 0.0, double hi = 0.0);

/// A stable-verdict predicate for `m` at a single T.
Predicate method_predicate(const ImpulsiveSystem& sys, Method m, const AnalysisOptions& ao = {});

/// Bracket suggested by the applicability class: maximal searches use [1e-3, 10 / ||A||],
/// minimal searches [1e-3 , 50 / ||A||].
std::pair<double, double> default_bracket(const ImpulsiveSystem& sys);

struct OracleResult {
  double worst_radius = 0.0;
  ConvexCombination worst;
  int samples = 0;
};

/// Largest spectral radius of expm(A T) J over a (kappa_a, kappa_j) simplex grid.
OracleResult eig_oracle_grid(const ImpulsiveSystem& sys, double T, int points_per_edge);

}  // namespace dwellcert
