#pragma once

#include <map>
#include <string>
#include <vector>

#include "dwellcert/lmi.hpp"

namespace dwellcert {

struct SolverOptions {
  double tol = default_config().solve_tol;
  double strict_margin = default_config().strict_margin;
  double var_cap = default_config().var_cap;
  int max_scalars = default_config().max_scalars;
  int max_iterations = 100;
};

enum class SolveStatus { StrictlyFeasible, Infeasible, MarginalOrNumerical };

const char* to_string(SolveStatus s);

struct BlockResidual {
  std::string label;
  double max_eig = 0.0;  // lambda_max of the block at y_star
  double min_eig = 0.0;
};

struct SolveReport {
  SolveStatus status = SolveStatus::MarginalOrNumerical;
  double t_star = 0.0;       // max over blocks of lambda_max(F_b(y_star))
  double dual_bound = 0.0;   // lower bound on the optimal t from the dual iterate
  double margin = 0.0;       // t_star divided by the problem scale (see docs)
  double scale = 1.0;
  Vec y_star;
  std::vector<BlockResidual> residuals;
  int iterations = 0;
  double wall_seconds = 0.0;
  bool converged = false;
  std::string message;
  SolverOptions options;
};

/// Minimizes t subject to F_b(y) <= t*I for every block and |y|_inf <= var_cap,
/// by a primal-dual interior-point method (HKM direction, Mehrotra
/// predictor-corrector). Deterministic for fixed inputs.
SolveReport solve(const FeasibilityProblem& prob, const SolverOptions& opts = {});

struct Certificate {
  std::map<std::string, Mat> vars;
  double t_star = 0.0;

  const Mat& at(const std::string& name) const;
  const Mat& P() const { return at("P"); }
  bool has(const std::string& name) const { return vars.count(name) > 0; }
};

/// Reassembles every registry variable from y_star. Throws unless the report is
/// StrictlyFeasible.
Certificate extract(const SolveReport& report, const VarRegistry& reg);

/// Registry-only unpacking, without status checks.
Certificate unpack_all(const Vec& y, const VarRegistry& reg);

}  // namespace dwellcert
