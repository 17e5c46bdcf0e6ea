#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace dwellcert {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

/// Raised when operands have incompatible or non-square shapes.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when an iterative kernel fails to converge or produces non-finite output.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, int iterations = 0)
      : std::runtime_error(what), iterations_(iterations) {}
  int iterations() const { return iterations_; }

 private:
  int iterations_;
};

/// Every numerical tolerance used by the library. Defaults are normative.
struct NumericConfig {
  double eig_margin = 1e-9;       // strictness margin for Hurwitz/Schur predicates
  double dwell_epsilon = 1e-8;    // smallest admissible dwell time
  double strict_margin = 1e-6;    // F(y) <= -eps*I realizes F(y) < 0
  double pd_margin = 1e-6;        // X >= eps*I realizes X > 0
  double solve_tol = 1e-8;        // interior-point gap/infeasibility tolerance
  double var_cap = 1e6;           // |y|_inf bound used inside the solver
  int max_scalars = 5000;         // decision-variable cap
  int interval_grid = 100;        // verification points per interval dimension
  int simplex_grid = 11;          // verification points per simplex dimension
};

const NumericConfig& default_config();

/// Symmetric matrix. Only the upper triangle of the source is read, so
/// entry(i,j) == entry(j,i) holds exactly.
class SymMat {
 public:
  SymMat() = default;
  explicit SymMat(Eigen::Index dim) : m_(Mat::Zero(dim, dim)) {}

  /// Builds from the upper triangle of `m`.
  static SymMat from_upper(const Mat& m);
  /// Builds from (m + m^T) / 2.
  static SymMat symmetrize(const Mat& m);
  static SymMat identity(Eigen::Index dim) { return from_upper(Mat::Identity(dim, dim)); }

  Eigen::Index dim() const { return m_.rows(); }
  double operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }
  const Mat& mat() const { return m_; }

  SymMat operator+(const SymMat& o) const;
  SymMat operator-(const SymMat& o) const;
  SymMat operator*(double s) const;

 private:
  Mat m_;
};

void require_square(const Mat& m, const char* what);

/// e^{M t} by scaling and squaring with a diagonal Pade approximant of
/// degree 3, 5, 7, 9 or 13 (Higham's theta thresholds for double precision).
Mat expm(const Mat& m, double t = 1.0);

/// All eigenvalues of a general real square matrix (real Schur/QR iteration).
std::vector<std::complex<double>> eigenvalues(const Mat& m);

double spectral_radius(const Mat& m);
double max_real_part(const Mat& m);
double min_real_part(const Mat& m);

bool is_hurwitz(const Mat& m, double margin = default_config().eig_margin);
bool is_anti_hurwitz(const Mat& m, double margin = default_config().eig_margin);
bool is_schur(const Mat& m, double margin = default_config().eig_margin);
bool is_anti_schur(const Mat& m, double margin = default_config().eig_margin);

struct SymEig {
  Vec values;   // ascending
  Mat vectors;  // columns, orthonormal
};

SymEig sym_eig(const SymMat& s, bool with_vectors = false);
double min_eig(const SymMat& s);
double max_eig(const SymMat& s);

/// He[M] = M + M^T.
SymMat he(const Mat& m);

}  // namespace dwellcert
