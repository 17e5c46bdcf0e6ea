#include "dwellcert/sdp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dwellcert {

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::StrictlyFeasible:
      return "StrictlyFeasible";
    case SolveStatus::Infeasible:
      return "Infeasible";
    case SolveStatus::MarginalOrNumerical:
      return "MarginalOrNumerical";
  }
  return "?";
}

const Mat& Certificate::at(const std::string& name) const {
  auto it = vars.find(name);
  if (it == vars.end()) throw std::invalid_argument("Certificate: no variable " + name);
  return it->second;
}

namespace {

// One semidefinite block of the dual-form problem  S = C - sum_i z_i A_i >= 0.
struct DualBlock {
  Eigen::Index dim = 0;
  Mat c;
  std::vector<int> idx;  // variable indices with nonzero coefficient
  std::vector<Mat> a;
};

// Standard-form data: max b'z  s.t.  C_b - sum z_i A_bi >= 0  and the box rows
// 1 - z_k >= 0, 1 + z_k >= 0 for every scaled decision scalar k < m.
struct DualProblem {
  int m = 0;       // scaled decision scalars; z has m + 1 entries, the last is t
  std::vector<DualBlock> blocks;
  Vec b;
};

double max_step(const Mat& x, const Mat& dx) {
  Eigen::LLT<Mat> llt(x);
  if (llt.info() != Eigen::Success) return 0.0;
  const Mat l_inv = llt.matrixL().solve(Mat::Identity(x.rows(), x.rows()));
  const Mat g = l_inv * dx * l_inv.transpose();
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (g + g.transpose()), Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues()(0);
  if (lmin >= 0.0) return std::numeric_limits<double>::infinity();
  return -1.0 / lmin;
}

double max_step_lp(const Vec& x, const Vec& dx) {
  double a = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (dx(i) < 0.0) a = std::min(a, -x(i) / dx(i));
  return a;
}

Mat sym(const Mat& m) { return 0.5 * (m + m.transpose()); }

struct Iterate {
  std::vector<Mat> x, s;
  Vec xl, sl;  // box rows: [upper(0..m), lower(0..m)]
  Vec z;
};

struct Direction {
  std::vector<Mat> dx, ds;
  Vec dxl, dsl;
  Vec dz;
};

class InteriorPoint {
 public:
  InteriorPoint(const DualProblem& p, const SolverOptions& o) : p_(p), opts_(o) {}

  bool run(Iterate& it, int& iterations, std::string& message) {
    const int m = p_.m;
    const int nz = m + 1;
    Eigen::Index n_total = 2 * m;
    for (const auto& blk : p_.blocks) n_total += blk.dim;
    const double init = std::max(10.0, std::sqrt(static_cast<double>(n_total)));

    it.x.clear();
    it.s.clear();
    for (const auto& blk : p_.blocks) {
      it.x.push_back(init * Mat::Identity(blk.dim, blk.dim));
      it.s.push_back(init * Mat::Identity(blk.dim, blk.dim));
    }
    it.xl = Vec::Constant(2 * m, init);
    it.sl = Vec::Constant(2 * m, init);
    it.z = Vec::Zero(nz);

    const double b_norm = p_.b.norm();
    double c_norm2 = 2.0 * m;
    for (const auto& blk : p_.blocks) c_norm2 += blk.c.squaredNorm();
    const double c_norm = std::sqrt(c_norm2);

    int stalled = 0;
    for (iterations = 0; iterations < opts_.max_iterations; ++iterations) {
      // Residuals.
      Vec rp = p_.b - apply_a(it.x, it.xl);
      std::vector<Mat> rd(p_.blocks.size());
      double rd_norm2 = 0.0;
      for (std::size_t bi = 0; bi < p_.blocks.size(); ++bi) {
        rd[bi] = p_.blocks[bi].c - it.s[bi] - apply_at_block(bi, it.z);
        rd_norm2 += rd[bi].squaredNorm();
      }
      Vec rdl(2 * m);
      for (int k = 0; k < m; ++k) {
        rdl(k) = 1.0 - it.sl(k) - it.z(k);
        rdl(m + k) = 1.0 - it.sl(m + k) + it.z(k);
      }
      rd_norm2 += rdl.squaredNorm();

      double gap = it.xl.dot(it.sl);
      double pobj = it.xl.sum();
      for (std::size_t bi = 0; bi < p_.blocks.size(); ++bi) {
        gap += (it.x[bi].cwiseProduct(it.s[bi])).sum();
        pobj += (p_.blocks[bi].c.cwiseProduct(it.x[bi])).sum();
      }
      const double dobj = p_.b.dot(it.z);
      const double mu = gap / static_cast<double>(n_total);
      const double rel_gap = std::abs(gap) / (1.0 + std::abs(pobj) + std::abs(dobj));
      const double pinf = rp.norm() / (1.0 + b_norm);
      const double dinf = std::sqrt(rd_norm2) / (1.0 + c_norm);
      if (rel_gap <= opts_.tol && pinf <= opts_.tol && dinf <= opts_.tol) {
        message = "converged";
        return true;
      }
      if (!std::isfinite(mu)) {
        message = "non-finite iterate";
        return false;
      }

      // Schur complement and inverse slacks.
      std::vector<Mat> s_inv(p_.blocks.size());
      for (std::size_t bi = 0; bi < p_.blocks.size(); ++bi) {
        Eigen::LLT<Mat> llt(it.s[bi]);
        if (llt.info() != Eigen::Success) {
          message = "slack lost definiteness";
          return false;
        }
        s_inv[bi] = llt.solve(Mat::Identity(it.s[bi].rows(), it.s[bi].cols()));
      }
      Mat schur = Mat::Zero(nz, nz);
      for (std::size_t bi = 0; bi < p_.blocks.size(); ++bi) {
        const DualBlock& blk = p_.blocks[bi];
        std::vector<Mat> w(blk.idx.size());
        for (std::size_t a = 0; a < blk.idx.size(); ++a) w[a] = it.x[bi] * blk.a[a] * s_inv[bi];
        for (std::size_t a = 0; a < blk.idx.size(); ++a) {
          for (std::size_t c = a; c < blk.idx.size(); ++c) {
            const double v = blk.a[c].cwiseProduct(w[a]).sum();
            schur(blk.idx[a], blk.idx[c]) += v;
            if (c != a) schur(blk.idx[c], blk.idx[a]) += v;
          }
        }
      }
      for (int k = 0; k < m; ++k) schur(k, k) += it.xl(k) / it.sl(k) + it.xl(m + k) / it.sl(m + k);

      Eigen::LLT<Mat> schur_llt(schur);
      Eigen::LDLT<Mat> schur_ldlt;
      bool use_llt = schur_llt.info() == Eigen::Success;
      if (!use_llt) {
        const double reg = 1e-14 * std::max(1.0, schur.diagonal().cwiseAbs().maxCoeff());
        schur.diagonal().array() += reg;
        schur_ldlt.compute(schur);
        if (schur_ldlt.info() != Eigen::Success) {
          message = "Schur complement factorization failed";
          return false;
        }
      }
      auto schur_solve = [&](const Vec& h) -> Vec {
        return use_llt ? Vec(schur_llt.solve(h)) : Vec(schur_ldlt.solve(h));
      };

      // Predictor.
      Direction pred = direction(it, rp, rd, rdl, s_inv, 0.0, nullptr, schur_solve);
      const double ap = std::min(1.0, primal_step(it, pred));
      const double ad = std::min(1.0, dual_step(it, pred));
      double gap_aff = 0.0;
      for (std::size_t bi = 0; bi < p_.blocks.size(); ++bi)
        gap_aff += ((it.x[bi] + ap * pred.dx[bi]).cwiseProduct(it.s[bi] + ad * pred.ds[bi])).sum();
      gap_aff += (it.xl + ap * pred.dxl).dot(it.sl + ad * pred.dsl);
      const double ratio = std::clamp(gap_aff / gap, 0.0, 1.0);
      const double expo = std::max(1.0, 3.0 * std::min(ap, ad) * std::min(ap, ad));
      const double sigma = std::min(1.0, std::pow(ratio, expo));

      // Corrector.
      Direction corr = direction(it, rp, rd, rdl, s_inv, sigma * mu, &pred, schur_solve);
      const double gamma = 0.9 + 0.09 * std::min(ap, ad);
      const double alpha_p = std::min(1.0, gamma * primal_step(it, corr));
      const double alpha_d = std::min(1.0, gamma * dual_step(it, corr));
      if (!(alpha_p > 0.0) || !(alpha_d > 0.0)) {
        message = "zero step length";
        return false;
      }
      stalled = (alpha_p < 1e-8 && alpha_d < 1e-8) ? stalled + 1 : 0;
      if (stalled >= 3) {
        message = "step lengths stalled";
        return false;
      }
      for (std::size_t bi = 0; bi < p_.blocks.size(); ++bi) {
        it.x[bi] = sym(it.x[bi] + alpha_p * corr.dx[bi]);
        it.s[bi] = sym(it.s[bi] + alpha_d * corr.ds[bi]);
      }
      it.xl += alpha_p * corr.dxl;
      it.sl += alpha_d * corr.dsl;
      it.z += alpha_d * corr.dz;
    }
    message = "iteration limit reached";
    return false;
  }

 private:
  Vec apply_a(const std::vector<Mat>& x, const Vec& xl) const {
    const int m = p_.m;
    Vec out = Vec::Zero(m + 1);
    for (std::size_t bi = 0; bi < p_.blocks.size(); ++bi) {
      const DualBlock& blk = p_.blocks[bi];
      for (std::size_t a = 0; a < blk.idx.size(); ++a)
        out(blk.idx[a]) += blk.a[a].cwiseProduct(x[bi]).sum();
    }
    for (int k = 0; k < m; ++k) out(k) += xl(k) - xl(m + k);
    return out;
  }

  Mat apply_at_block(std::size_t bi, const Vec& z) const {
    const DualBlock& blk = p_.blocks[bi];
    Mat out = Mat::Zero(blk.dim, blk.dim);
    for (std::size_t a = 0; a < blk.idx.size(); ++a) out += z(blk.idx[a]) * blk.a[a];
    return out;
  }

  template <typename Solve>
  Direction direction(const Iterate& it, const Vec& rp, const std::vector<Mat>& rd, const Vec& rdl,
                      const std::vector<Mat>& s_inv, double target, const Direction* second,
                      Solve&& schur_solve) const {
    const int m = p_.m;
    const std::size_t nb = p_.blocks.size();
    // G = target*S^{-1} - X - (X Rd + K) S^{-1};  rhs = rp - A(G).
    std::vector<Mat> g(nb);
    for (std::size_t bi = 0; bi < nb; ++bi) {
      Mat inner = it.x[bi] * rd[bi];
      if (second) inner += second->dx[bi] * second->ds[bi];
      g[bi] = target * s_inv[bi] - it.x[bi] - inner * s_inv[bi];
    }
    Vec gl(2 * m);
    for (Eigen::Index l = 0; l < 2 * m; ++l) {
      double inner = it.xl(l) * rdl(l);
      if (second) inner += second->dxl(l) * second->dsl(l);
      gl(l) = target / it.sl(l) - it.xl(l) - inner / it.sl(l);
    }
    Direction d;
    const Vec rhs = rp - apply_a(g, gl);
    d.dz = schur_solve(rhs);
    d.ds.resize(nb);
    d.dx.resize(nb);
    for (std::size_t bi = 0; bi < nb; ++bi) {
      const Mat at_dz = apply_at_block(bi, d.dz);
      d.ds[bi] = rd[bi] - at_dz;
      d.dx[bi] = sym(g[bi] + it.x[bi] * at_dz * s_inv[bi]);
    }
    d.dsl.resize(2 * m);
    d.dxl.resize(2 * m);
    for (int k = 0; k < m; ++k) {
      d.dsl(k) = rdl(k) - d.dz(k);
      d.dsl(m + k) = rdl(m + k) + d.dz(k);
    }
    for (Eigen::Index l = 0; l < 2 * m; ++l) {
      const double a_dz = l < m ? d.dz(l) : -d.dz(l - m);
      d.dxl(l) = gl(l) + it.xl(l) * a_dz / it.sl(l);
    }
    return d;
  }

  double primal_step(const Iterate& it, const Direction& d) const {
    double a = max_step_lp(it.xl, d.dxl);
    for (std::size_t bi = 0; bi < p_.blocks.size(); ++bi) a = std::min(a, max_step(it.x[bi], d.dx[bi]));
    return a;
  }

  double dual_step(const Iterate& it, const Direction& d) const {
    double a = max_step_lp(it.sl, d.dsl);
    for (std::size_t bi = 0; bi < p_.blocks.size(); ++bi) a = std::min(a, max_step(it.s[bi], d.ds[bi]));
    return a;
  }

  const DualProblem& p_;
  const SolverOptions& opts_;
};

}  // namespace

SolveReport solve(const FeasibilityProblem& prob, const SolverOptions& opts) {
  const auto start = std::chrono::steady_clock::now();
  SolveReport report;
  report.options = opts;
  const int m = prob.registry.size();
  if (m > opts.max_scalars) {
    throw std::invalid_argument("solve: " + std::to_string(m) + " decision scalars exceed the cap of " +
                                std::to_string(opts.max_scalars));
  }
  if (prob.blocks.empty()) throw std::invalid_argument("solve: problem has no blocks");
  for (const auto& b : prob.blocks) {
    if (b.map.registry_id() != prob.registry.id())
      throw std::invalid_argument("solve: block '" + b.label + "' uses a foreign registry");
  }
  if (!(opts.var_cap > 0.0)) throw std::invalid_argument("solve: var_cap must be positive");

  // Equilibration. Decision scalars are rescaled as y_k = cap * d_k * z_k so that every
  // column has unit largest coefficient; each block is then weighted by w_b, which
  // leaves the constraint t*I - F_b(y) >= 0 unchanged. sigma maps t to scaled units.
  std::vector<double> col(m, 0.0);
  double const_max = 0.0;
  for (const auto& b : prob.blocks) {
    const_max = std::max(const_max, b.map.constant().mat().cwiseAbs().maxCoeff());
    for (const auto& [k, c] : b.map.coefficients()) col[k] = std::max(col[k], c.mat().cwiseAbs().maxCoeff());
  }
  Vec d = Vec::Ones(m);
  for (int k = 0; k < m; ++k)
    if (col[k] > 0.0) d(k) = 1.0 / col[k];
  const double sigma = 1.0 / std::max(const_max, opts.var_cap);
  std::vector<double> weight(prob.blocks.size(), 1.0);
  for (int round = 0; round < 2; ++round) {
    for (std::size_t bi = 0; bi < prob.blocks.size(); ++bi) {
      const auto& b = prob.blocks[bi];
      double row = sigma * b.map.constant().mat().cwiseAbs().maxCoeff();
      for (const auto& [k, c] : b.map.coefficients())
        row = std::max(row, sigma * opts.var_cap * d(k) * c.mat().cwiseAbs().maxCoeff());
      weight[bi] = row > 0.0 ? 1.0 / row : 1.0;
    }
    std::fill(col.begin(), col.end(), 0.0);
    for (std::size_t bi = 0; bi < prob.blocks.size(); ++bi)
      for (const auto& [k, c] : prob.blocks[bi].map.coefficients())
        col[k] = std::max(col[k], weight[bi] * sigma * opts.var_cap * d(k) * c.mat().cwiseAbs().maxCoeff());
    for (int k = 0; k < m; ++k)
      if (col[k] > 0.0) d(k) /= col[k];
    // keep the unit box meaningful: no variable may exceed the cap
    const double dmax = d.maxCoeff();
    if (dmax > 1.0) d /= dmax;
  }

  DualProblem dp;
  dp.m = m;
  dp.b = Vec::Zero(m + 1);
  dp.b(m) = -1.0;
  for (std::size_t bi = 0; bi < prob.blocks.size(); ++bi) {
    const auto& b = prob.blocks[bi];
    const double w = weight[bi] * sigma;
    DualBlock blk;
    blk.dim = b.map.dim();
    blk.c = -w * b.map.constant().mat();
    for (const auto& [k, c] : b.map.coefficients()) {
      blk.idx.push_back(k);
      blk.a.push_back(w * opts.var_cap * d(k) * c.mat());
    }
    blk.idx.push_back(m);
    blk.a.push_back(-weight[bi] * Mat::Identity(blk.dim, blk.dim));
    dp.blocks.push_back(std::move(blk));
  }

  Iterate it;
  InteriorPoint ipm(dp, opts);
  report.converged = ipm.run(it, report.iterations, report.message);
  report.y_star = opts.var_cap * d.cwiseProduct(it.z.head(m));
  report.dual_bound = it.z(m) / sigma;

  double t_star = -std::numeric_limits<double>::infinity();
  for (const auto& b : prob.blocks) {
    const Vec ev = sym_eig(b.map.evaluate(report.y_star)).values;
    report.residuals.push_back({b.label, ev(ev.size() - 1), ev(0)});
    t_star = std::max(t_star, ev(ev.size() - 1));
  }
  report.t_star = t_star;
  // Strictness is measured in the problem's own units: epsilon times the largest
  // constant-term norm, floored at 1 so homogeneous problems keep epsilon itself.
  report.scale = std::max(1.0, const_max);
  report.margin = t_star / report.scale;

  // t_star is re-evaluated at y_star, so a negative value is a checked certificate
  // even if the iteration stopped early. Infeasibility needs a converged solve.
  const double eps = opts.strict_margin;
  if (report.y_star.allFinite() && report.margin < -2.0 * eps) {
    report.status = SolveStatus::StrictlyFeasible;
  } else if (report.converged && report.margin > 2.0 * eps) {
    report.status = SolveStatus::Infeasible;
  } else {
    report.status = SolveStatus::MarginalOrNumerical;
  }
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

Certificate unpack_all(const Vec& y, const VarRegistry& reg) {
  Certificate cert;
  for (const VarBlock& b : reg.blocks()) cert.vars.emplace(b.name, reg.unpack(y, b.name));
  return cert;
}

Certificate extract(const SolveReport& report, const VarRegistry& reg) {
  if (report.status != SolveStatus::StrictlyFeasible)
    throw std::logic_error(std::string("extract: report status is ") + to_string(report.status));
  Certificate cert = unpack_all(report.y_star, reg);
  cert.t_star = report.t_star;
  return cert;
}

}  // namespace dwellcert
