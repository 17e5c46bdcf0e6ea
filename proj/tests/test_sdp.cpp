#include <gtest/gtest.h>

#include "dwellcert/lmi.hpp"
#include "dwellcert/sdp.hpp"
#include "dwellcert/system.hpp"
#include "support.hpp"

using namespace dwellcert;
using namespace dwellcert::testing;

namespace {

FeasibilityProblem looped_problem(const Mat& a, const Mat& j, double T) {
  VarRegistry reg;
  register_looped_vars(reg, a.rows(), LoopedVars::nominal());
  const LoopedBlocks b = build_nominal_blocks(a, j, T, reg);
  return assemble_problem({{"Psi", b.psi}, {"Phi", b.phi}}, reg);
}

// Every block re-evaluated from y_star alone.
double worst_block(const FeasibilityProblem& prob, const Vec& y) {
  double worst = -1e300;
  for (const auto& b : prob.blocks) worst = std::max(worst, max_eig(b.map.evaluate(y)));
  return worst;
}

}  // namespace

TEST(Solve, TrivialPositivity) {
  VarRegistry reg;
  reg.add_symmetric("P", 2, true);
  LinExpr e = -reg.expr("P");
  const auto prob = assemble_problem({{"-P", AffineMatrixMap(e, reg)}}, reg);
  const SolveReport r = solve(prob);
  EXPECT_EQ(r.status, SolveStatus::StrictlyFeasible);
  EXPECT_LT(r.t_star, 0.0);
  const Certificate c = extract(r, prob.registry);
  EXPECT_GT(min_eig(SymMat::from_upper(c.P())), 0.0);
}

TEST(Solve, Contradiction) {
  VarRegistry reg;
  reg.add_symmetric("P", 2);
  LinExpr upper = reg.expr("P") + LinExpr(Mat::Identity(2, 2));   // P <= -I
  LinExpr lower = -reg.expr("P") + LinExpr(Mat::Identity(2, 2));  // P >= I
  const auto prob = assemble_problem({{"P+I", AffineMatrixMap(upper, reg)}, {"I-P", AffineMatrixMap(lower, reg)}}, reg);
  const SolveReport r = solve(prob);
  EXPECT_EQ(r.status, SolveStatus::Infeasible);
  EXPECT_GT(r.t_star, 0.0);
  EXPECT_THROW(extract(r, prob.registry), std::logic_error);
}

TEST(Solve, ExampleTwoLoopedBoundary) {
  const auto s = examples::ex2();
  EXPECT_EQ(solve(looped_problem(s.A(), s.J(), 1.24)).status, SolveStatus::StrictlyFeasible);
  EXPECT_EQ(solve(looped_problem(s.A(), s.J(), 1.22)).status, SolveStatus::Infeasible);
}

TEST(Solve, CertificateVerifiesIndependently) {
  const auto s = examples::ex1();
  for (double T : {0.1, 0.25, 0.4, 0.44}) {
    const auto prob = looped_problem(s.A(), s.J(), T);
    const SolveReport r = solve(prob);
    ASSERT_EQ(r.status, SolveStatus::StrictlyFeasible) << T;
    const double worst = worst_block(prob, r.y_star);
    EXPECT_LE(worst, -prob.strict_margin + r.options.tol);
    EXPECT_NEAR(worst, r.t_star, 1e-9 * std::max(1.0, std::abs(r.t_star)));
    const Certificate c = extract(r, prob.registry);
    EXPECT_GE(min_eig(SymMat::from_upper(c.at("Z"))), prob.pd_margin * 0.999);
  }
}

TEST(Solve, Deterministic) {
  const auto s = examples::ex3();
  const auto prob = looped_problem(s.A(), s.J(), 0.3);
  const SolveReport a = solve(prob), b = solve(prob);
  EXPECT_EQ(a.t_star, b.t_star);
  EXPECT_EQ(a.y_star, b.y_star);
  EXPECT_EQ(a.iterations, b.iterations);
}

TEST(Solve, ScaleCovariance) {
  const auto s = examples::ex1();
  for (double T : {0.3, 0.47}) {
    const auto base = looped_problem(s.A(), s.J(), T);
    const SolveReport r0 = solve(base);
    for (double scale : {1e-2, 1e-1, 10.0, 1e2}) {
      FeasibilityProblem scaled = base;
      for (int b = 0; b < scaled.constraint_count; ++b) scaled.blocks[b].map = scaled.blocks[b].map.scaled(scale);
      const SolveReport r = solve(scaled);
      EXPECT_EQ(r.status, r0.status) << "T=" << T << " s=" << scale;
    }
  }
}

TEST(Solve, ScalarCap) {
  const auto s = examples::ex1();
  SolverOptions o;
  o.max_scalars = 3;
  EXPECT_THROW(solve(looped_problem(s.A(), s.J(), 0.3), o), std::invalid_argument);
}

TEST(Solve, DiagonalRestrictionKeepsStructure) {
  // P restricted to a diagonal pair of scalars stays diagonal after extraction.
  const auto s = examples::ex3();
  VarRegistry reg;
  reg.add_symmetric("p1", 1, true);
  reg.add_symmetric("p2", 1, true);
  Mat e1 = Mat::Zero(2, 1), e2 = Mat::Zero(2, 1);
  e1(0, 0) = 1;
  e2(1, 0) = 1;
  LinExpr pd = e1 * reg.expr("p1") * e1.transpose();
  pd += e2 * reg.expr("p2") * e2.transpose();
  // V must decrease across one period of the jump-flow map at T = 0.3.
  const Mat m = expm(s.A(), 0.3) * s.J();
  const LinExpr lyap = m.transpose() * pd * m - pd;
  const auto prob = assemble_problem({{"I", AffineMatrixMap(lyap, reg)}}, reg);
  const SolveReport r = solve(prob);
  const Certificate c = unpack_all(r.y_star, prob.registry);
  EXPECT_TRUE(c.has("p1"));
  EXPECT_TRUE(c.has("p2"));
  const Mat full = pd.evaluate(r.y_star);
  EXPECT_EQ(full(0, 1), 0.0);
  EXPECT_EQ(full(1, 0), 0.0);
}

TEST(Solve, FeasibleSetIsAnIntervalOnGrid) {
  const auto s = examples::ex3();
  std::vector<bool> feas;
  for (int g = 0; g < 100; ++g) {
    const double T = 0.05 + 0.7 * g / 99.0;
    feas.push_back(solve(looped_problem(s.A(), s.J(), T)).status == SolveStatus::StrictlyFeasible);
  }
  int switches = 0;
  for (std::size_t g = 1; g < feas.size(); ++g) switches += feas[g] != feas[g - 1];
  EXPECT_LE(switches, 2);
}
