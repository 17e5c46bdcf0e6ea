#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dwellcert/sdp.hpp"

namespace dwellcert {

/// Impulse instants t_0 < t_1 < ... < t_horizon. Segment k spans [t_k, t_{k+1}].
class ImpulseSequence {
 public:
  enum class Kind { Periodic, Random, Explicit, Log };

  static ImpulseSequence periodic(double T, int horizon);
  /// Dwell times uniform in [tmin, tmax] from a 64-bit Mersenne Twister seeded with `seed`.
  static ImpulseSequence random(double tmin, double tmax, std::uint64_t seed, int horizon);
  static ImpulseSequence explicit_times(std::vector<double> times);
  /// t_k = log(k + 1): dwell times shrink towards zero without accumulating.
  static ImpulseSequence log_spaced(int horizon);

  Kind kind() const { return kind_; }
  const std::vector<double>& times() const { return times_; }
  std::vector<double> dwell_times() const;
  int horizon() const { return static_cast<int>(times_.size()) - 1; }
  std::uint64_t seed() const { return seed_; }
  /// "periodic:T", "random:tmin,tmax,seed", "log", "explicit".
  std::string describe() const;

 private:
  ImpulseSequence(Kind kind, std::vector<double> times, std::string desc, std::uint64_t seed = 0);
  Kind kind_;
  std::vector<double> times_;
  std::string desc_;
  std::uint64_t seed_;
};

/// One arc chi_k on [0, T_k].
struct TrajectorySegment {
  int k = 0;
  double t0 = 0.0;  // absolute time of tau = 0
  double T = 0.0;
  std::vector<double> tau;
  std::vector<Vec> states;
  Vec start;  // chi_k(0)
  Vec pre;    // chi_k(T_k)
  Vec post;   // chi_{k+1}(0) = J chi_k(T_k)
};

std::vector<TrajectorySegment> simulate(const Mat& a, const Mat& j, const Vec& x0, const ImpulseSequence& seq,
                                        int samples_per_segment);

struct LyapunovTrace {
  std::vector<std::vector<double>> v;  // per segment, per sample
  std::vector<double> lower;  // V(chi_k(T_k))
  std::vector<double> upper;  // V(chi_k(0))
};

LyapunovTrace lyapunov_trace(const std::vector<TrajectorySegment>& segments, const Mat& p);

/// Names of the looped-functional variables inside a certificate.
struct FunctionalVars {
  Mat P, Q, R, Z, U;
  static FunctionalVars from(const Certificate& c, const std::string& suffix = "");
};

/// V(tau, chi_k, T_k) of the looped functional. The Z-integral uses adaptive
/// Gauss-Kronrod quadrature on the closed-form integrand.
double eval_looped_functional(const Mat& a, const TrajectorySegment& seg, double tau, const FunctionalVars& vars);

/// Closed-form d/dtau of W_k = (tau/T_k) Lambda_k + V(chi_k(tau)) + V(tau, chi_k, T_k), where
/// Lambda_k = V(chi_k(0)) - V(prev_pre).
double w_derivative(const Mat& a, const TrajectorySegment& seg, const Vec& prev_pre, double tau,
                    const FunctionalVars& vars);

/// Integral of w_derivative over [0, T_k] by adaptive quadrature.
double integrate_w_derivative(const Mat& a, const TrajectorySegment& seg, const Vec& prev_pre,
                              const FunctionalVars& vars);

struct EmpiricalReport {
  double max_norm_growth = 0.0;  // max_t |x(t)| / |x(0)|
  double terminal_norm = 0.0;
  double mean_log_rate = 0.0;    // mean of log(|chi_k(T_k)| / |chi_{k-1}(T_{k-1})|)
  bool decreasing_envelope = false;  // strictly decreasing pre-impulse envelope
};

/// Finite-horizon summary. Needs at least 10 segments; with P the envelope is
/// V(chi_k(T_k)), otherwise the Euclidean norm.
EmpiricalReport empirical_stability(const std::vector<TrajectorySegment>& segments,
                                    const std::optional<Mat>& p = std::nullopt);

/// Columns t, tau, k, x1..xn, V, event. Impulse instants appear twice: the
/// pre-impulse row is flagged "pre", the next segment's first row "post".
void write_csv(std::ostream& out, const std::vector<TrajectorySegment>& segments, const Mat& p);

}  // namespace dwellcert
