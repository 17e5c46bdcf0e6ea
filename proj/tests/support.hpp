#pragma once

#include <random>

#include "dwellcert/linalg.hpp"

namespace dwellcert::testing {

inline Mat mat2(double a, double b, double c, double d) {
  Mat m(2, 2);
  m << a, b, c, d;
  return m;
}

inline Mat random_mat(std::mt19937_64& gen, Eigen::Index rows, Eigen::Index cols, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Mat m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = u(gen);
  return m;
}

/// Random matrix rescaled to the given spectral radius.
inline Mat with_radius(const Mat& m, double r) { return m * (r / spectral_radius(m)); }

inline double max_abs_diff(const Mat& a, const Mat& b) { return (a - b).cwiseAbs().maxCoeff(); }

/// Truncated power series, independent of the Pade path.
inline Mat taylor_expm(const Mat& m, double t, int terms = 60) {
  const Mat a = m * t;
  Mat term = Mat::Identity(m.rows(), m.cols());
  Mat sum = term;
  for (int k = 1; k < terms; ++k) {
    term = term * a / static_cast<double>(k);
    sum += term;
  }
  return sum;
}

}  // namespace dwellcert::testing
