#include "dwellcert/lmi.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>

namespace dwellcert {

namespace {

std::uint64_t next_registry_id() {
  static std::atomic<std::uint64_t> counter{1};
  return counter++;
}

constexpr double kSymmetryTol = 1e-12;

}  // namespace

// ---------------------------------------------------------------------------
// VarRegistry

VarRegistry::VarRegistry() : id_(next_registry_id()) {}

const VarBlock& VarRegistry::add(VarBlock b) {
  if (index_.count(b.name)) throw std::invalid_argument("VarRegistry: duplicate variable " + b.name);
  b.offset = size_;
  size_ += b.size;
  index_[b.name] = blocks_.size();
  blocks_.push_back(std::move(b));
  return blocks_.back();
}

const VarBlock& VarRegistry::add_symmetric(const std::string& name, Eigen::Index n, bool positive) {
  VarBlock b;
  b.name = name;
  b.kind = VarKind::Symmetric;
  b.rows = b.cols = n;
  b.positive = positive;
  b.size = static_cast<int>(n * (n + 1) / 2);
  return add(std::move(b));
}

const VarBlock& VarRegistry::add_general(const std::string& name, Eigen::Index rows,
                                         Eigen::Index cols) {
  VarBlock b;
  b.name = name;
  b.kind = VarKind::General;
  b.rows = rows;
  b.cols = cols;
  b.size = static_cast<int>(rows * cols);
  return add(std::move(b));
}

bool VarRegistry::contains(const std::string& name) const { return index_.count(name) > 0; }

const VarBlock& VarRegistry::block(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw std::invalid_argument("VarRegistry: unregistered variable " + name);
  return blocks_[it->second];
}

LinExpr VarRegistry::expr(const std::string& name) const {
  const VarBlock& b = block(name);
  LinExpr e(b.rows, b.cols);
  int k = b.offset;
  if (b.kind == VarKind::Symmetric) {
    for (Eigen::Index i = 0; i < b.rows; ++i) {
      for (Eigen::Index j = i; j < b.cols; ++j) {
        Mat basis = Mat::Zero(b.rows, b.cols);
        basis(i, j) = 1.0;
        basis(j, i) = 1.0;
        e.add_term(k++, basis);
      }
    }
  } else {
    for (Eigen::Index i = 0; i < b.rows; ++i) {
      for (Eigen::Index j = 0; j < b.cols; ++j) {
        Mat basis = Mat::Zero(b.rows, b.cols);
        basis(i, j) = 1.0;
        e.add_term(k++, basis);
      }
    }
  }
  return e;
}

Mat VarRegistry::unpack(const Vec& y, const std::string& name) const {
  const VarBlock& b = block(name);
  if (y.size() != size_) throw DimensionError("VarRegistry::unpack: vector size mismatch");
  Mat m(b.rows, b.cols);
  int k = b.offset;
  if (b.kind == VarKind::Symmetric) {
    for (Eigen::Index i = 0; i < b.rows; ++i) {
      for (Eigen::Index j = i; j < b.cols; ++j) {
        m(i, j) = y(k);
        m(j, i) = y(k);
        ++k;
      }
    }
  } else {
    for (Eigen::Index i = 0; i < b.rows; ++i)
      for (Eigen::Index j = 0; j < b.cols; ++j) m(i, j) = y(k++);
  }
  return m;
}

void VarRegistry::pack(const std::string& name, const Mat& value, Vec& y) const {
  const VarBlock& b = block(name);
  if (value.rows() != b.rows || value.cols() != b.cols)
    throw DimensionError("VarRegistry::pack: shape mismatch for " + name);
  if (y.size() != size_) y = Vec::Zero(size_);
  int k = b.offset;
  if (b.kind == VarKind::Symmetric) {
    for (Eigen::Index i = 0; i < b.rows; ++i)
      for (Eigen::Index j = i; j < b.cols; ++j) y(k++) = value(i, j);
  } else {
    for (Eigen::Index i = 0; i < b.rows; ++i)
      for (Eigen::Index j = 0; j < b.cols; ++j) y(k++) = value(i, j);
  }
}

// ---------------------------------------------------------------------------
// LinExpr

void LinExpr::add_term(int index, const Mat& coeff) {
  if (coeff.rows() != rows() || coeff.cols() != cols())
    throw DimensionError("LinExpr::add_term: coefficient shape mismatch");
  auto it = terms_.find(index);
  if (it == terms_.end()) {
    terms_.emplace(index, coeff);
  } else {
    it->second += coeff;
  }
}

LinExpr LinExpr::transpose() const {
  LinExpr out(constant_.transpose());
  for (const auto& [k, c] : terms_) out.terms_.emplace(k, c.transpose());
  return out;
}

Mat LinExpr::evaluate(const Vec& y) const {
  Mat out = constant_;
  for (const auto& [k, c] : terms_) {
    if (k >= y.size()) throw DimensionError("LinExpr::evaluate: vector too short");
    out += y(k) * c;
  }
  return out;
}

LinExpr& LinExpr::operator+=(const LinExpr& o) {
  if (o.rows() != rows() || o.cols() != cols())
    throw DimensionError("LinExpr: sum of " + std::to_string(rows()) + "x" +
                         std::to_string(cols()) + " and " + std::to_string(o.rows()) + "x" +
                         std::to_string(o.cols()));
  constant_ += o.constant_;
  for (const auto& [k, c] : o.terms_) add_term(k, c);
  return *this;
}

LinExpr& LinExpr::operator-=(const LinExpr& o) {
  LinExpr neg = o;
  neg *= -1.0;
  return *this += neg;
}

LinExpr& LinExpr::operator*=(double s) {
  constant_ *= s;
  for (auto& [k, c] : terms_) c *= s;
  return *this;
}

LinExpr operator*(const Mat& m, const LinExpr& e) {
  if (m.cols() != e.rows()) throw DimensionError("LinExpr: left product shape mismatch");
  LinExpr out(m * e.constant_);
  for (const auto& [k, c] : e.terms_) out.terms_.emplace(k, m * c);
  return out;
}

LinExpr operator*(const LinExpr& e, const Mat& m) {
  if (e.cols() != m.rows()) throw DimensionError("LinExpr: right product shape mismatch");
  LinExpr out(e.constant_ * m);
  for (const auto& [k, c] : e.terms_) out.terms_.emplace(k, c * m);
  return out;
}

LinExpr he(const LinExpr& e) { return e + e.transpose(); }

LinExpr block_matrix(const std::vector<std::vector<LinExpr>>& grid) {
  if (grid.empty() || grid.front().empty()) throw DimensionError("block_matrix: empty grid");
  const std::size_t nr = grid.size();
  const std::size_t nc = grid.front().size();
  std::vector<Eigen::Index> heights(nr), widths(nc);
  for (std::size_t i = 0; i < nr; ++i) {
    if (grid[i].size() != nc) throw DimensionError("block_matrix: ragged grid");
    heights[i] = grid[i][0].rows();
  }
  for (std::size_t j = 0; j < nc; ++j) widths[j] = grid[0][j].cols();
  Eigen::Index total_r = 0, total_c = 0;
  for (auto h : heights) total_r += h;
  for (auto w : widths) total_c += w;

  LinExpr out(total_r, total_c);
  Mat constant = Mat::Zero(total_r, total_c);
  std::map<int, Mat> terms;
  Eigen::Index r0 = 0;
  for (std::size_t i = 0; i < nr; ++i) {
    Eigen::Index c0 = 0;
    for (std::size_t j = 0; j < nc; ++j) {
      const LinExpr& e = grid[i][j];
      if (e.rows() != heights[i] || e.cols() != widths[j])
        throw DimensionError("block_matrix: inconsistent block shape");
      constant.block(r0, c0, e.rows(), e.cols()) = e.constant();
      for (const auto& [k, c] : e.terms()) {
        auto it = terms.find(k);
        if (it == terms.end()) it = terms.emplace(k, Mat::Zero(total_r, total_c)).first;
        it->second.block(r0, c0, e.rows(), e.cols()) = c;
      }
      c0 += widths[j];
    }
    r0 += heights[i];
  }
  LinExpr result(constant);
  for (const auto& [k, c] : terms) result.add_term(k, c);
  return result;
}

// ---------------------------------------------------------------------------
// AffineMatrixMap

AffineMatrixMap::AffineMatrixMap(const LinExpr& e, const VarRegistry& reg)
    : reg_size_(reg.size()), reg_id_(reg.id()) {
  if (e.rows() != e.cols()) throw DimensionError("AffineMatrixMap: expression is not square");
  auto check = [](const Mat& m) {
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol * scale)
      throw std::logic_error("AffineMatrixMap: non-symmetric coefficient");
  };
  check(e.constant());
  constant_ = SymMat::symmetrize(e.constant());
  for (const auto& [k, c] : e.terms()) {
    if (k < 0 || k >= reg_size_) throw std::invalid_argument("AffineMatrixMap: index outside registry");
    check(c);
    if (c.cwiseAbs().maxCoeff() == 0.0) continue;
    coeffs_.emplace_back(k, SymMat::symmetrize(c));
  }
}

SymMat AffineMatrixMap::evaluate(const Vec& y) const {
  if (y.size() != reg_size_) throw DimensionError("AffineMatrixMap::evaluate: vector size mismatch");
  Mat out = constant_.mat();
  for (const auto& [k, c] : coeffs_) out += y(k) * c.mat();
  return SymMat::from_upper(out);
}

AffineMatrixMap AffineMatrixMap::scaled(double s) const {
  AffineMatrixMap out = *this;
  out.constant_ = constant_ * s;
  for (auto& [k, c] : out.coeffs_) c = c * s;
  return out;
}

double AffineMatrixMap::data_norm() const {
  auto spectral = [](const SymMat& m) {
    if (m.dim() == 0) return 0.0;
    const Vec v = sym_eig(m).values;
    return std::max(std::abs(v(0)), std::abs(v(v.size() - 1)));
  };
  double out = spectral(constant_);
  for (const auto& [k, c] : coeffs_) out = std::max(out, spectral(c));
  return out;
}

// ---------------------------------------------------------------------------
// Lyapunov operators

namespace {

void require_var(const VarRegistry& reg, const std::string& p, Eigen::Index n) {
  const VarBlock& b = reg.block(p);
  if (b.kind != VarKind::Symmetric || b.rows != n)
    throw DimensionError("operator: variable " + p + " must be symmetric " + std::to_string(n) +
                         "x" + std::to_string(n));
}

}  // namespace

AffineMatrixMap op_C(const Mat& a, const VarRegistry& reg, const std::string& p) {
  require_square(a, "op_C");
  require_var(reg, p, a.rows());
  const LinExpr P = reg.expr(p);
  return AffineMatrixMap(he(P * a), reg);
}

AffineMatrixMap op_D(const Mat& j, const VarRegistry& reg, const std::string& p) {
  require_square(j, "op_D");
  require_var(reg, p, j.rows());
  const LinExpr P = reg.expr(p);
  return AffineMatrixMap(j.transpose() * P * j - P, reg);
}

AffineMatrixMap op_I(const Mat& a, const Mat& j, double T, const VarRegistry& reg,
                     const std::string& p) {
  require_square(a, "op_I");
  require_square(j, "op_I");
  if (a.rows() != j.rows()) throw DimensionError("op_I: A and J dimensions differ");
  if (!(T > 0.0)) throw std::invalid_argument("op_I: T must be positive");
  require_var(reg, p, a.rows());
  const Mat ej = expm(a, T) * j;
  const LinExpr P = reg.expr(p);
  return AffineMatrixMap(ej.transpose() * P * ej - P, reg);
}

AffineMatrixMap op_I_schur(const Mat& a, const Mat& j, double T, const VarRegistry& reg,
                           const std::string& p) {
  require_square(a, "op_I_schur");
  require_square(j, "op_I_schur");
  if (a.rows() != j.rows()) throw DimensionError("op_I_schur: A and J dimensions differ");
  if (!(T > 0.0)) throw std::invalid_argument("op_I_schur: T must be positive");
  require_var(reg, p, a.rows());
  const Mat ej = expm(a, T) * j;
  const LinExpr P = reg.expr(p);
  const LinExpr off = ej.transpose() * P;
  return AffineMatrixMap(block_matrix({{-P, off}, {off.transpose(), -P}}), reg);
}

// ---------------------------------------------------------------------------
// Looped-functional blocks

LoopedVars LoopedVars::vertex(int j) {
  const std::string s = "_" + std::to_string(j);
  return {"Z" + s, "Q" + s, "U" + s, "R" + s, "N" + s};
}

void register_looped_vars(VarRegistry& reg, Eigen::Index n, const LoopedVars& names) {
  if (!reg.contains("P")) reg.add_symmetric("P", n, true);
  reg.add_symmetric(names.z, n, true);
  reg.add_symmetric(names.q, n);
  reg.add_symmetric(names.u, n);
  reg.add_general(names.r, n, n);
  reg.add_general(names.n, n, 2 * n);
}

Selectors Selectors::make(const Mat& j) {
  const Eigen::Index n = j.rows();
  Selectors s;
  s.x = Mat::Zero(n, 2 * n);
  s.x.leftCols(n) = Mat::Identity(n, n);
  s.zeta = Mat::Zero(n, 2 * n);
  s.zeta.leftCols(n) = Mat::Identity(n, n);
  s.zeta.rightCols(n) = -j;
  s.minus = Mat::Zero(n, 2 * n);
  s.minus.rightCols(n) = Mat::Identity(n, n);
  return s;
}

namespace {

struct LoopedTerms {
  LinExpr g0;      // F0 without the Z term (identical in both forms)
  LinExpr g1;      // He[Mx'A'Q Mz + Mx'A'R Mx + Mz'R A Mx]
  LinExpr g2;      // M-' J'U J M-
  LinExpr z_row;   // Z A Mx, n x 2n
  LinExpr N;
  LinExpr Z;
};

LoopedTerms looped_terms(const Mat& a, const Mat& j, double T, const VarRegistry& reg,
                         const LoopedVars& names) {
  require_square(a, "looped blocks");
  require_square(j, "looped blocks");
  if (a.rows() != j.rows()) throw DimensionError("looped blocks: A and J dimensions differ");
  if (!(T > 0.0)) throw std::invalid_argument("looped blocks: T must be positive");
  const Eigen::Index n = a.rows();
  require_var(reg, "P", n);
  require_var(reg, names.z, n);
  require_var(reg, names.q, n);
  require_var(reg, names.u, n);
  const VarBlock& rb = reg.block(names.r);
  const VarBlock& nb = reg.block(names.n);
  if (rb.rows != n || rb.cols != n || nb.rows != n || nb.cols != 2 * n)
    throw DimensionError("looped blocks: R must be n x n and N must be n x 2n");

  const Selectors m = Selectors::make(j);
  const Mat at = a.transpose();
  const LinExpr P = reg.expr("P");
  const LinExpr Q = reg.expr(names.q);
  const LinExpr U = reg.expr(names.u);
  const LinExpr R = reg.expr(names.r);
  LoopedTerms t;
  t.N = reg.expr(names.n);
  t.Z = reg.expr(names.z);

  t.g0 = T * (m.x.transpose() * he(P * a) * m.x) - m.zeta.transpose() * Q * m.zeta +
         m.minus.transpose() * (j.transpose() * P * j - P) * m.minus +
         he(t.N.transpose() * m.zeta - m.zeta.transpose() * R * m.x);
  t.g1 = he(m.x.transpose() * at * Q * m.zeta + m.x.transpose() * at * R * m.x +
            m.zeta.transpose() * R * a * m.x);
  t.g2 = m.minus.transpose() * j.transpose() * U * j * m.minus;
  t.z_row = t.Z * a * m.x;
  return t;
}

}  // namespace

LoopedBlocks build_nominal_blocks(const Mat& a, const Mat& j, double T, const VarRegistry& reg,
                                  const LoopedVars& names) {
  const LoopedTerms t = looped_terms(a, j, T, reg, names);
  const Selectors m = Selectors::make(j);
  const LinExpr f2 = t.g1 + m.x.transpose() * a.transpose() * t.Z * a * m.x;
  const LinExpr psi = t.g0 + T * (f2 + t.g2);
  const LinExpr phi = block_matrix({{t.g0 - T * t.g2, t.N.transpose()}, {t.N, -(1.0 / T) * t.Z}});
  return {AffineMatrixMap(psi, reg), AffineMatrixMap(phi, reg)};
}

LoopedBlocks build_robust_blocks(const Mat& a_i, const Mat& j_j, double T, const VarRegistry& reg,
                                 int j) {
  if (j < 0) throw std::invalid_argument("build_robust_blocks: negative vertex index");
  const LoopedVars names = LoopedVars::vertex(j);
  if (!reg.contains(names.z))
    throw std::invalid_argument("build_robust_blocks: no variables registered for J-vertex " +
                                std::to_string(j));
  const LoopedTerms t = looped_terms(a_i, j_j, T, reg, names);
  const LinExpr psi = block_matrix(
      {{t.g0 + T * (t.g1 + t.g2), t.z_row.transpose()}, {t.z_row, -(1.0 / T) * t.Z}});
  const LinExpr phi = block_matrix({{t.g0 - T * t.g2, t.N.transpose()}, {t.N, -(1.0 / T) * t.Z}});
  return {AffineMatrixMap(psi, reg), AffineMatrixMap(phi, reg)};
}

// ---------------------------------------------------------------------------

FeasibilityProblem assemble_problem(std::vector<LabeledMap> constraints, const VarRegistry& reg,
                                    const NumericConfig& cfg) {
  if (constraints.empty()) throw std::invalid_argument("assemble_problem: empty constraint list");
  for (const auto& c : constraints) {
    if (c.map.registry_id() != reg.id() || c.map.registry_size() != reg.size())
      throw std::invalid_argument("assemble_problem: constraint '" + c.label +
                                  "' was built over a different registry");
  }
  FeasibilityProblem prob;
  prob.registry = reg;
  prob.constraint_count = static_cast<int>(constraints.size());
  prob.blocks = std::move(constraints);
  prob.strict_margin = cfg.strict_margin;
  prob.pd_margin = cfg.pd_margin;
  for (const VarBlock& b : reg.blocks()) {
    if (!b.positive) continue;
    LinExpr e = -reg.expr(b.name);
    e += LinExpr(cfg.pd_margin * Mat::Identity(b.rows, b.rows));
    prob.blocks.push_back({b.name + " > 0", AffineMatrixMap(e, reg)});
  }
  return prob;
}

}  // namespace dwellcert
