#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dwellcert/sdp.hpp"
#include "dwellcert/system.hpp"

namespace dwellcert {

enum class Method {
  Spectral,
  PeriodicLmi,
  PeriodicLooped,
  MinimalLemma,
  MinimalLooped,
  Arbitrary,
  MaximalLemma,
  MaximalLooped,
  MaximalAlt,
  RangedGrid,
  RangedLooped,
  RobustPeriodic,
  RobustMinimal,
  RobustMaximal,
  RobustRanged,
};

/// CLI spelling, e.g. "periodic-looped".
const char* to_string(Method m);
std::optional<Method> parse_method(const std::string& s);
std::vector<Method> all_methods();

/// How a stable verdict was reached.
enum class Evidence { None, Spectral, Certified, GridEvidence };
const char* to_string(Evidence e);

/// One post-solve check on the extracted certificate. `value` is the quantity that
/// must be negative, e.g. the largest eigenvalue of I(P,A,J,theta) over a grid.
struct Check {
  std::string name;
  double value = 0.0;
  int points = 1;
  bool passed = false;
};

struct Verdict {
  bool stable = false;  // false means unknown, never unstable
  Method method = Method::Spectral;
  Evidence evidence = Evidence::None;
  std::optional<Certificate> certificate;
  std::optional<SolveReport> report;
  std::vector<Check> checks;
  double radius = -1.0;  // spectral methods only
  std::string note;
};

struct AnalysisOptions {
  NumericConfig cfg = default_config();
  SolverOptions solver;
  int verify_grid = default_config().interval_grid;  // theta points per interval
  int simplex_grid = default_config().simplex_grid;  // points per simplex edge
};

// Nominal procedures.
Verdict periodic_spectral(const Mat& a, const Mat& j, double T, const AnalysisOptions& o = {});
Verdict periodic_lmi(const Mat& a, const Mat& j, double T, const AnalysisOptions& o = {});
Verdict periodic_looped(const Mat& a, const Mat& j, double T, const AnalysisOptions& o = {});
Verdict minimal_dwell_lemma(const Mat& a, const Mat& j, double T, const AnalysisOptions& o = {});
Verdict minimal_dwell_looped(const Mat& a, const Mat& j, double T, const AnalysisOptions& o = {});
Verdict arbitrary_impulses(const Mat& a, const Mat& j, const AnalysisOptions& o = {});
Verdict maximal_dwell_lemma(const Mat& a, const Mat& j, double T, const AnalysisOptions& o = {});
Verdict maximal_dwell_looped(const Mat& a, const Mat& j, double T, const AnalysisOptions& o = {});
Verdict maximal_dwell_alt(const Mat& a, const Mat& j, double T, const AnalysisOptions& o = {});
/// Shared P with I(P,A,J,theta) < 0 on `grid` evenly spaced thetas. Grid evidence only.
Verdict ranged_lemma_grid(const Mat& a, const Mat& j, double tmin, double tmax, int grid,
                          const AnalysisOptions& o = {});
Verdict ranged_looped(const Mat& a, const Mat& j, double tmin, double tmax,
                      const AnalysisOptions& o = {});

// Polytopic procedures: shared P, per-J-vertex looped variables.
Verdict robust_periodic(const ImpulsiveSystem& sys, double T, const AnalysisOptions& o = {});
Verdict robust_minimal(const ImpulsiveSystem& sys, double T, const AnalysisOptions& o = {});
Verdict robust_maximal(const ImpulsiveSystem& sys, double T, const AnalysisOptions& o = {});
Verdict robust_ranged(const ImpulsiveSystem& sys, double tmin, double tmax,
                      const AnalysisOptions& o = {});

/// Dispatches on the method. Periodic/minimal/maximal methods read T from the spec,
/// ranged methods read [Tmin, Tmax] (a scalar spec means Tmin = Tmax = T), arbitrary
/// ignores it. Nominal methods reject polytopic systems.
Verdict analyze(const ImpulsiveSystem& sys, Method m, const DwellTimeSpec& spec,
                const AnalysisOptions& o = {});

struct AlphaConstants {
  double c = 0.0;  // C(P,A) <= -c P
  double d = 0.0;  // D(P,J) <= (e^{-d} - 1) P
};

/// Tightest constants for a fixed P > 0, via a Cholesky factor of P.
AlphaConstants alpha_stability_constants(const Mat& a, const Mat& j, const Mat& p);

/// Largest eigenvalue of J^T e^{A^T theta} P e^{A theta} J - P.
double impulsive_residual(const Mat& a, const Mat& j, const Mat& p, double theta);

/// Points of the unit simplex in `dim` coordinates with `points` samples per edge.
std::vector<std::vector<double>> simplex_grid(std::size_t dim, int points);

}  // namespace dwellcert
