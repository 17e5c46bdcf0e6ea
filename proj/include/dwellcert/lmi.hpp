#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dwellcert/linalg.hpp"

namespace dwellcert {

enum class VarKind { Symmetric, General };

struct VarBlock {
  std::string name;
  VarKind kind = VarKind::Symmetric;
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  bool positive = false;  // block must satisfy X >= pd_margin * I
  int offset = 0;         // first scalar in the flat vector y
  int size = 0;           // n(n+1)/2 for symmetric, rows*cols for general
};

class LinExpr;

/// Ordered set of matrix decision variables flattened into one scalar vector.
/// Symmetric blocks are parameterized by their upper triangle (row-major), general
/// blocks by all entries (row-major).
class VarRegistry {
 public:
  VarRegistry();

  const VarBlock& add_symmetric(const std::string& name, Eigen::Index n, bool positive = false);
  const VarBlock& add_general(const std::string& name, Eigen::Index rows, Eigen::Index cols);

  bool contains(const std::string& name) const;
  const VarBlock& block(const std::string& name) const;
  const std::vector<VarBlock>& blocks() const { return blocks_; }
  int size() const { return size_; }
  std::uint64_t id() const { return id_; }

  /// The variable as a linear expression in y.
  LinExpr expr(const std::string& name) const;

  Mat unpack(const Vec& y, const std::string& name) const;
  void pack(const std::string& name, const Mat& value, Vec& y) const;

 private:
  const VarBlock& add(VarBlock b);

  std::vector<VarBlock> blocks_;
  std::map<std::string, std::size_t> index_;
  int size_ = 0;
  std::uint64_t id_;
};

/// Rectangular matrix-valued affine function of y: constant + sum_k y_k * coeff_k.
/// Only nonzero coefficients are stored.
class LinExpr {
 public:
  LinExpr() = default;
  LinExpr(Eigen::Index rows, Eigen::Index cols) : constant_(Mat::Zero(rows, cols)) {}
  explicit LinExpr(Mat constant) : constant_(std::move(constant)) {}

  static LinExpr zero(Eigen::Index rows, Eigen::Index cols) { return LinExpr(rows, cols); }

  Eigen::Index rows() const { return constant_.rows(); }
  Eigen::Index cols() const { return constant_.cols(); }
  const Mat& constant() const { return constant_; }
  const std::map<int, Mat>& terms() const { return terms_; }

  void add_term(int index, const Mat& coeff);

  LinExpr transpose() const;
  Mat evaluate(const Vec& y) const;

  LinExpr& operator+=(const LinExpr& o);
  LinExpr& operator-=(const LinExpr& o);
  LinExpr& operator*=(double s);

  friend LinExpr operator+(LinExpr a, const LinExpr& b) { return a += b; }
  friend LinExpr operator-(LinExpr a, const LinExpr& b) { return a -= b; }
  friend LinExpr operator-(LinExpr a) { return a *= -1.0; }
  friend LinExpr operator*(double s, LinExpr a) { return a *= s; }
  friend LinExpr operator*(LinExpr a, double s) { return a *= s; }
  friend LinExpr operator*(const Mat& m, const LinExpr& e);
  friend LinExpr operator*(const LinExpr& e, const Mat& m);

 private:
  Mat constant_;
  std::map<int, Mat> terms_;
};

/// e + e^T.
LinExpr he(const LinExpr& e);

/// Assembles a block matrix from a grid of expressions; every row of blocks must
/// have consistent heights and every column consistent widths.
LinExpr block_matrix(const std::vector<std::vector<LinExpr>>& grid);

/// Symmetric-matrix-valued affine map over a registry.
class AffineMatrixMap {
 public:
  AffineMatrixMap() = default;
  /// Converts a square expression; throws if any coefficient is not symmetric.
  AffineMatrixMap(const LinExpr& e, const VarRegistry& reg);

  Eigen::Index dim() const { return constant_.dim(); }
  const SymMat& constant() const { return constant_; }
  const std::vector<std::pair<int, SymMat>>& coefficients() const { return coeffs_; }
  int registry_size() const { return reg_size_; }
  std::uint64_t registry_id() const { return reg_id_; }

  SymMat evaluate(const Vec& y) const;
  AffineMatrixMap scaled(double s) const;
  AffineMatrixMap negated() const { return scaled(-1.0); }
  /// Largest spectral norm over the constant and coefficient matrices.
  double data_norm() const;

 private:
  SymMat constant_;
  std::vector<std::pair<int, SymMat>> coeffs_;
  int reg_size_ = 0;
  std::uint64_t reg_id_ = 0;
};

/// A^T P + P A.
AffineMatrixMap op_C(const Mat& a, const VarRegistry& reg, const std::string& p = "P");
/// J^T P J - P.
AffineMatrixMap op_D(const Mat& j, const VarRegistry& reg, const std::string& p = "P");
/// J^T e^{A^T T} P e^{A T} J - P, the n x n form.
AffineMatrixMap op_I(const Mat& a, const Mat& j, double T, const VarRegistry& reg,
                     const std::string& p = "P");
/// [[-P, J^T e^{A^T T} P], [*, -P]], negative definite iff op_I is (for P > 0).
AffineMatrixMap op_I_schur(const Mat& a, const Mat& j, double T, const VarRegistry& reg,
                           const std::string& p = "P");

/// Names of the looped-functional variables for one J-vertex.
struct LoopedVars {
  std::string z, q, u, r, n;
  static LoopedVars nominal() { return {"Z", "Q", "U", "R", "N"}; }
  static LoopedVars vertex(int j);
};

/// Registers P (shared, positive) if absent, then Z, Q, U, R, N with the given names.
void register_looped_vars(VarRegistry& reg, Eigen::Index n, const LoopedVars& names);

/// Selector matrices of the lifted state xi = col(chi_k(tau), chi_{k-1}(T)).
struct Selectors {
  Mat x;     // [I 0]
  Mat zeta;  // [I -J]
  Mat minus; // [0 I]
  static Selectors make(const Mat& j);
};

struct LoopedBlocks {
  AffineMatrixMap psi;
  AffineMatrixMap phi;
};

/// Psi(T) = F0 + T (F2 + F3) (2n x 2n) and Phi(T) = [[F0 - T F3, N^T], [*, -Z/T]] (3n x 3n).
LoopedBlocks build_nominal_blocks(const Mat& a, const Mat& j, double T, const VarRegistry& reg,
                                  const LoopedVars& names = LoopedVars::nominal());

/// Vertex blocks Psi_ij and Phi_ij (both 3n x 3n). The A^T Z A term sits in the Schur
/// row of Psi_ij so that both blocks are affine in A_i.
LoopedBlocks build_robust_blocks(const Mat& a_i, const Mat& j_j, double T, const VarRegistry& reg,
                                 int j);

struct LabeledMap {
  std::string label;
  AffineMatrixMap map;
};

struct FeasibilityProblem {
  VarRegistry registry;
  std::vector<LabeledMap> blocks;  // each must satisfy map(y) < 0
  int constraint_count = 0;        // blocks[0..constraint_count) come from the caller
  double strict_margin = 1e-6;
  double pd_margin = 1e-6;
};

/// Collects constraint maps (each required negative definite) and appends one
/// positivity block -X + pd_margin*I per positive registry variable.
FeasibilityProblem assemble_problem(std::vector<LabeledMap> constraints, const VarRegistry& reg,
                                    const NumericConfig& cfg = default_config());

}  // namespace dwellcert
