#include "dwellcert/linalg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace dwellcert {

const NumericConfig& default_config() {
  static const NumericConfig config{};
  return config;
}

SymMat SymMat::from_upper(const Mat& m) {
  require_square(m, "SymMat");
  SymMat s;
  s.m_ = m.triangularView<Eigen::Upper>();
  s.m_.triangularView<Eigen::StrictlyLower>() = m.transpose().triangularView<Eigen::StrictlyLower>();
  return s;
}

SymMat SymMat::symmetrize(const Mat& m) {
  require_square(m, "SymMat");
  return from_upper(0.5 * (m + m.transpose()));
}

SymMat SymMat::operator+(const SymMat& o) const { return from_upper(m_ + o.m_); }
SymMat SymMat::operator-(const SymMat& o) const { return from_upper(m_ - o.m_); }
SymMat SymMat::operator*(double s) const { return from_upper(m_ * s); }

void require_square(const Mat& m, const char* what) {
  if (m.rows() != m.cols()) {
    throw DimensionError(std::string(what) + ": expected a square matrix, got " +
                         std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

namespace {

// Pade numerator/denominator pieces: e^A ~ (V - U)^{-1} (V + U).
void pade_low(const Mat& a, const double* b, int degree, Mat& u, Mat& v) {
  const Eigen::Index n = a.rows();
  const Mat ident = Mat::Identity(n, n);
  const Mat a2 = a * a;
  Mat odd = b[1] * ident;
  Mat even = b[0] * ident;
  Mat power = ident;
  for (int k = 2; k <= degree; k += 2) {
    power = power * a2;
    odd += b[k + 1] * power;
    even += b[k] * power;
  }
  u = a * odd;
  v = even;
}

void pade13(const Mat& a, Mat& u, Mat& v) {
  static constexpr std::array<double, 14> b = {
      64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
      1187353796428800.0,  129060195264000.0,   10559470521600.0,
      670442572800.0,      33522128640.0,       1323241920.0,
      40840800.0,          960960.0,            16380.0,
      182.0,               1.0};
  const Eigen::Index n = a.rows();
  const Mat ident = Mat::Identity(n, n);
  const Mat a2 = a * a;
  const Mat a4 = a2 * a2;
  const Mat a6 = a4 * a2;
  const Mat inner_u = b[13] * a6 + b[11] * a4 + b[9] * a2;
  u = a * (a6 * inner_u + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * ident);
  const Mat inner_v = b[12] * a6 + b[10] * a4 + b[8] * a2;
  v = a6 * inner_v + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * ident;
}

}  // namespace

Mat expm(const Mat& m, double t) {
  require_square(m, "expm");
  if (!std::isfinite(t)) throw DimensionError("expm: non-finite time argument");
  const Eigen::Index n = m.rows();
  if (n == 0) return Mat(0, 0);
  const Mat a = m * t;
  if (!a.allFinite()) throw NumericalError("expm: non-finite input");

  static constexpr double b3[] = {120.0, 60.0, 12.0, 1.0};
  static constexpr double b5[] = {30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0};
  static constexpr double b7[] = {17297280.0, 8648640.0, 1995840.0, 277200.0,
                                  25200.0,    1512.0,    56.0,      1.0};
  static constexpr double b9[] = {17643225600.0, 8821612800.0, 2075673600.0, 302702400.0,
                                  30270240.0,    2162160.0,    110880.0,     3960.0,
                                  90.0,          1.0};
  static constexpr std::array<double, 4> theta = {1.495585217958292e-2, 2.539398330063230e-1,
                                                  9.504178996162932e-1, 2.097847961257068e0};
  static constexpr double theta13 = 5.371920351148152e0;

  const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
  Mat u, v;
  int squarings = 0;
  if (norm1 <= theta[0]) {
    pade_low(a, b3, 3, u, v);
  } else if (norm1 <= theta[1]) {
    pade_low(a, b5, 5, u, v);
  } else if (norm1 <= theta[2]) {
    pade_low(a, b7, 7, u, v);
  } else if (norm1 <= theta[3]) {
    pade_low(a, b9, 9, u, v);
  } else {
    squarings = std::max(0, static_cast<int>(std::ceil(std::log2(norm1 / theta13))));
    pade13(a / std::ldexp(1.0, squarings), u, v);
  }
  Mat result = (v - u).partialPivLu().solve(v + u);
  for (int k = 0; k < squarings; ++k) result = result * result;
  if (!result.allFinite()) throw NumericalError("expm: overflow", squarings);
  return result;
}

std::vector<std::complex<double>> eigenvalues(const Mat& m) {
  require_square(m, "eigenvalues");
  if (m.rows() == 0) return {};
  Eigen::EigenSolver<Mat> solver(m, false);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("eigenvalues: real Schur iteration did not converge",
                         static_cast<int>(solver.getMaxIterations() * m.rows()));
  }
  const auto& ev = solver.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

double spectral_radius(const Mat& m) {
  double r = 0.0;
  for (const auto& l : eigenvalues(m)) r = std::max(r, std::abs(l));
  return r;
}

double max_real_part(const Mat& m) {
  double r = -std::numeric_limits<double>::infinity();
  for (const auto& l : eigenvalues(m)) r = std::max(r, l.real());
  return r;
}

double min_real_part(const Mat& m) {
  double r = std::numeric_limits<double>::infinity();
  for (const auto& l : eigenvalues(m)) r = std::min(r, l.real());
  return r;
}

bool is_hurwitz(const Mat& m, double margin) { return max_real_part(m) < -margin; }
bool is_anti_hurwitz(const Mat& m, double margin) { return min_real_part(m) > margin; }
bool is_schur(const Mat& m, double margin) { return spectral_radius(m) < 1.0 - margin; }

bool is_anti_schur(const Mat& m, double margin) {
  double smallest = std::numeric_limits<double>::infinity();
  for (const auto& l : eigenvalues(m)) smallest = std::min(smallest, std::abs(l));
  return smallest > 1.0 + margin;
}

SymEig sym_eig(const SymMat& s, bool with_vectors) {
  if (s.dim() == 0) return {};
  Eigen::SelfAdjointEigenSolver<Mat> solver(
      s.mat(), with_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("sym_eig: tridiagonal QR iteration did not converge");
  }
  SymEig out;
  out.values = solver.eigenvalues();
  if (with_vectors) out.vectors = solver.eigenvectors();
  return out;
}

double min_eig(const SymMat& s) { return sym_eig(s).values(0); }

double max_eig(const SymMat& s) {
  const Vec v = sym_eig(s).values;
  return v(v.size() - 1);
}

SymMat he(const Mat& m) {
  require_square(m, "he");
  return SymMat::from_upper(m + m.transpose());
}

}  // namespace dwellcert
