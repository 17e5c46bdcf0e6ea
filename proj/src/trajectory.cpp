#include "dwellcert/trajectory.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <charconv>
#include <cmath>
#include <functional>
#include <limits>
#include <ostream>
#include <random>

namespace dwellcert {

namespace {

constexpr double kQuadTol = 1e-10;

void check_times(const std::vector<double>& t) {
  if (t.size() < 2) throw std::invalid_argument("impulse sequence needs at least two instants");
  const double eps = default_config().dwell_epsilon;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!std::isfinite(t[i])) throw std::invalid_argument("impulse sequence: non-finite instant");
    if (i > 0 && !(t[i] - t[i - 1] > eps))
      throw std::invalid_argument("impulse sequence: dwell time " + std::to_string(t[i] - t[i - 1]) +
                                  " at k=" + std::to_string(i - 1) + " is not above epsilon");
  }
}

// Shortest text that parses back to the same double.
std::string shortest(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

void check_horizon(int horizon) {
  if (horizon < 1) throw std::invalid_argument("impulse sequence: horizon must be at least 1");
}

double quad(const std::function<double(double)>& f, double a, double b) {
  if (a == b) return 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 15, kQuadTol);
}

double quad_form(const Vec& x, const Mat& m, const Vec& y) { return x.dot(m * y); }

// Z-weighted energy of the derivative, int_0^tau (A chi(s))' Z (A chi(s)) ds.
double z_integral(const Mat& a, const Vec& x0, const Mat& z, double tau) {
  const Mat az = a.transpose() * z * a;
  return quad([&](double s) {
    const Vec x = expm(a, s) * x0;
    return quad_form(x, az, x);
  }, 0.0, tau);
}

}  // namespace

ImpulseSequence::ImpulseSequence(Kind kind, std::vector<double> times, std::string desc, std::uint64_t seed)
    : kind_(kind), times_(std::move(times)), desc_(std::move(desc)), seed_(seed) {
  check_times(times_);
}

ImpulseSequence ImpulseSequence::periodic(double T, int horizon) {
  check_horizon(horizon);
  std::vector<double> t(static_cast<std::size_t>(horizon) + 1);
  for (int k = 0; k <= horizon; ++k) t[static_cast<std::size_t>(k)] = k * T;
  return ImpulseSequence(Kind::Periodic, std::move(t), "periodic:" + shortest(T));
}

ImpulseSequence ImpulseSequence::random(double tmin, double tmax, std::uint64_t seed, int horizon) {
  check_horizon(horizon);
  if (!(tmin <= tmax)) throw std::invalid_argument("random impulse sequence: need tmin <= tmax");
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> dist(tmin, tmax);
  std::vector<double> t{0.0};
  for (int k = 0; k < horizon; ++k) t.push_back(t.back() + (tmin == tmax ? tmin : dist(gen)));
  return ImpulseSequence(Kind::Random, std::move(t),
                         "random:" + shortest(tmin) + "," + shortest(tmax) + "," + std::to_string(seed), seed);
}

ImpulseSequence ImpulseSequence::explicit_times(std::vector<double> times) {
  return ImpulseSequence(Kind::Explicit, std::move(times), "explicit");
}

ImpulseSequence ImpulseSequence::log_spaced(int horizon) {
  check_horizon(horizon);
  std::vector<double> t(static_cast<std::size_t>(horizon) + 1);
  for (int k = 0; k <= horizon; ++k) t[static_cast<std::size_t>(k)] = std::log(k + 1.0);
  return ImpulseSequence(Kind::Log, std::move(t), "log");
}

std::vector<double> ImpulseSequence::dwell_times() const {
  std::vector<double> d;
  for (std::size_t i = 1; i < times_.size(); ++i) d.push_back(times_[i] - times_[i - 1]);
  return d;
}

std::string ImpulseSequence::describe() const { return desc_; }

std::vector<TrajectorySegment> simulate(const Mat& a, const Mat& j, const Vec& x0, const ImpulseSequence& seq,
                                        int samples_per_segment) {
  require_square(a, "simulate A");
  require_square(j, "simulate J");
  if (a.rows() != j.rows() || x0.size() != a.rows())
    throw DimensionError("simulate: A, J and x0 must share the state dimension");
  if (samples_per_segment < 2) throw std::invalid_argument("simulate: need at least 2 samples per segment");

  std::vector<TrajectorySegment> out;
  const std::vector<double>& t = seq.times();
  Vec x = x0;
  for (std::size_t k = 0; k + 1 < t.size(); ++k) {
    TrajectorySegment s;
    s.k = static_cast<int>(k);
    s.t0 = t[k];
    s.T = t[k + 1] - t[k];
    s.start = x;
    for (int i = 0; i < samples_per_segment; ++i) {
      const double tau = i + 1 == samples_per_segment ? s.T : s.T * i / (samples_per_segment - 1);
      s.tau.push_back(tau);
      s.states.push_back(i == 0 ? x : Vec(expm(a, tau) * x));
    }
    s.pre = s.states.back();
    s.post = j * s.pre;
    x = s.post;
    out.push_back(std::move(s));
  }
  return out;
}

LyapunovTrace lyapunov_trace(const std::vector<TrajectorySegment>& segments, const Mat& p) {
  if (p.rows() != p.cols()) throw DimensionError("lyapunov_trace: P must be square");
  if (min_eig(SymMat::symmetrize(p)) <= 0.0) throw std::invalid_argument("lyapunov_trace: P is not positive definite");
  LyapunovTrace tr;
  for (const auto& s : segments) {
    if (s.start.size() != p.rows()) throw DimensionError("lyapunov_trace: P does not match the state dimension");
    std::vector<double> v;
    for (const Vec& x : s.states) v.push_back(quad_form(x, p, x));
    tr.v.push_back(std::move(v));
    tr.lower.push_back(quad_form(s.pre, p, s.pre));
    tr.upper.push_back(quad_form(s.start, p, s.start));
  }
  return tr;
}

FunctionalVars FunctionalVars::from(const Certificate& c, const std::string& suffix) {
  return {c.P(), c.at("Q" + suffix), c.at("R" + suffix), c.at("Z" + suffix), c.at("U" + suffix)};
}

double eval_looped_functional(const Mat& a, const TrajectorySegment& seg, double tau, const FunctionalVars& v) {
  if (!(tau >= 0.0 && tau <= seg.T)) throw std::out_of_range("eval_looped_functional: tau outside [0, T_k]");
  const double T = seg.T;
  const Vec& x0 = seg.start;
  const Vec x = expm(a, tau) * x0;
  const Vec zeta = x - x0;
  const double w = (T - tau) / T;
  return w * (quad_form(zeta, v.Q, zeta) + 2.0 * quad_form(zeta, v.R, x)) + w * z_integral(a, x0, v.Z, tau) +
         tau * w * quad_form(x0, v.U, x0);
}

double w_derivative(const Mat& a, const TrajectorySegment& seg, const Vec& prev_pre, double tau,
                    const FunctionalVars& v) {
  if (!(tau >= 0.0 && tau <= seg.T)) throw std::out_of_range("w_derivative: tau outside [0, T_k]");
  const double T = seg.T;
  const Vec& x0 = seg.start;
  const Vec x = expm(a, tau) * x0;
  const Vec dx = a * x;
  const Vec zeta = x - x0;
  const double lambda = quad_form(x0, v.P, x0) - quad_form(prev_pre, v.P, prev_pre);
  const double w = (T - tau) / T;
  const double bracket = quad_form(zeta, v.Q, zeta) + 2.0 * quad_form(zeta, v.R, x);
  const double d_bracket = 2.0 * quad_form(dx, v.Q, zeta) + 2.0 * quad_form(dx, v.R, x) + 2.0 * quad_form(zeta, v.R, dx);
  const double d_functional = -bracket / T + w * d_bracket - z_integral(a, x0, v.Z, tau) / T +
                              w * quad_form(dx, v.Z, dx) + (T - 2.0 * tau) / T * quad_form(x0, v.U, x0);
  return lambda / T + 2.0 * quad_form(x, v.P, dx) + d_functional;
}

double integrate_w_derivative(const Mat& a, const TrajectorySegment& seg, const Vec& prev_pre,
                              const FunctionalVars& v) {
  return quad([&](double tau) { return w_derivative(a, seg, prev_pre, tau, v); }, 0.0, seg.T);
}

EmpiricalReport empirical_stability(const std::vector<TrajectorySegment>& segments, const std::optional<Mat>& p) {
  if (segments.size() < 10) throw std::invalid_argument("empirical_stability: need at least 10 segments");
  EmpiricalReport r;
  const double n0 = segments.front().start.norm();
  const double base = n0 > 0.0 ? n0 : 1.0;
  for (const auto& s : segments)
    for (const Vec& x : s.states) r.max_norm_growth = std::max(r.max_norm_growth, x.norm() / base);
  r.terminal_norm = segments.back().post.norm();

  auto level = [&](const Vec& x) { return p ? quad_form(x, *p, x) : x.norm(); };
  r.decreasing_envelope = true;
  double log_sum = 0.0;
  int counted = 0;
  for (std::size_t k = 1; k < segments.size(); ++k) {
    const double prev = level(segments[k - 1].pre), cur = level(segments[k].pre);
    if (!(cur < prev)) r.decreasing_envelope = false;
    const double a = segments[k - 1].pre.norm(), b = segments[k].pre.norm();
    if (a > 0.0 && b > 0.0) {
      log_sum += std::log(b / a);
      ++counted;
    }
  }
  r.mean_log_rate = counted > 0 ? log_sum / counted : -std::numeric_limits<double>::infinity();
  return r;
}

void write_csv(std::ostream& out, const std::vector<TrajectorySegment>& segments, const Mat& p) {
  if (segments.empty()) return;
  const Eigen::Index n = segments.front().start.size();
  if (p.rows() != n || p.cols() != n) throw DimensionError("write_csv: P does not match the state dimension");
  out << "t,tau,k";
  for (Eigen::Index i = 0; i < n; ++i) out << ",x" << (i + 1);
  out << ",V,event\n";
  out.precision(17);
  for (std::size_t si = 0; si < segments.size(); ++si) {
    const auto& s = segments[si];
    for (std::size_t i = 0; i < s.states.size(); ++i) {
      const Vec& x = s.states[i];
      out << s.t0 + s.tau[i] << ',' << s.tau[i] << ',' << s.k;
      for (Eigen::Index c = 0; c < n; ++c) out << ',' << x(c);
      out << ',' << quad_form(x, p, x) << ',';
      if (i == 0) out << (si == 0 ? "start" : "post");
      else if (i + 1 == s.states.size()) out << "pre";
      out << '\n';
    }
  }
  // The state right after the last impulse closes the trace.
  const auto& last = segments.back();
  out << last.t0 + last.T << ',' << 0.0 << ',' << last.k + 1;
  for (Eigen::Index c = 0; c < n; ++c) out << ',' << last.post(c);
  out << ',' << quad_form(last.post, p, last.post) << ",post\n";
}

}  // namespace dwellcert
