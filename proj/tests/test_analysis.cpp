#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "dwellcert/analysis.hpp"
#include "support.hpp"

using namespace dwellcert;
using namespace dwellcert::testing;

namespace {

const Mat kI2 = Mat::Identity(2, 2);

bool all_checks_pass(const Verdict& v) {
  for (const auto& c : v.checks)
    if (!c.passed) return false;
  return !v.checks.empty();
}

}  // namespace

TEST(PeriodicSpectral, ExampleOne) {
  const auto s = examples::ex1();
  const Verdict v = periodic_spectral(s.A(), s.J(), 0.46);
  EXPECT_TRUE(v.stable);
  EXPECT_NEAR(v.radius, 0.5 * std::exp(1.5 * 0.46), 1e-12);
  const Verdict u = periodic_spectral(s.A(), s.J(), 0.463);
  EXPECT_FALSE(u.stable);
  EXPECT_EQ(u.evidence, Evidence::None);
}

TEST(PeriodicSpectral, ExampleTwo) {
  const auto s = examples::ex2();
  EXPECT_TRUE(periodic_spectral(s.A(), s.J(), 1.141).stable);
  EXPECT_FALSE(periodic_spectral(s.A(), s.J(), 1.140).stable);
}

TEST(PeriodicSpectral, ZeroFlow) {
  const Verdict v = periodic_spectral(Mat::Zero(2, 2), 0.5 * kI2, 3.7);
  EXPECT_TRUE(v.stable);
  EXPECT_NEAR(v.radius, 0.5, 1e-15);
}

TEST(PeriodicSpectral, RejectsUncertainSystem) {
  EXPECT_THROW(analyze(examples::robust1(), Method::Spectral, Periodic{0.1}), std::invalid_argument);
}

TEST(PeriodicLmi, ExampleOne) {
  const auto s = examples::ex1();
  const Verdict v = periodic_lmi(s.A(), s.J(), 0.40);
  ASSERT_TRUE(v.stable);
  ASSERT_TRUE(v.certificate);
  const Mat p = v.certificate->P();
  const Mat e = expm(s.A(), 0.40) * s.J();
  EXPECT_LT(max_eig(SymMat::symmetrize(e.transpose() * p * e - p)), 0.0);
  EXPECT_GT(min_eig(SymMat::symmetrize(p)), 0.0);
}

TEST(PeriodicLmi, MarginalCase) { EXPECT_FALSE(periodic_lmi(Mat::Zero(2, 2), kI2, 1.0).stable); }

TEST(PeriodicLooped, ExampleOne) {
  const auto s = examples::ex1();
  const Verdict v = periodic_looped(s.A(), s.J(), 0.44);
  EXPECT_TRUE(v.stable);
  EXPECT_EQ(v.evidence, Evidence::Certified);
  EXPECT_TRUE(all_checks_pass(v));
  EXPECT_TRUE(v.certificate->has("N"));
  EXPECT_FALSE(periodic_looped(s.A(), s.J(), 0.45).stable);
}

TEST(PeriodicLooped, ExampleThreeAndFour) {
  const auto s3 = examples::ex3();
  EXPECT_TRUE(periodic_looped(s3.A(), s3.J(), 0.30).stable);
  const auto s4 = examples::ex4();
  EXPECT_TRUE(periodic_looped(s4.A(), s4.J(), 1.72).stable);
}

TEST(MinimalDwell, LemmaForm) {
  const auto s = examples::ex2();
  EXPECT_TRUE(minimal_dwell_lemma(s.A(), s.J(), 1.141).stable);
  EXPECT_FALSE(minimal_dwell_lemma(s.A(), s.J(), 1.0).stable);
  EXPECT_TRUE(minimal_dwell_lemma(-kI2, 0.5 * kI2, 0.01).stable);
}

TEST(MinimalDwell, LoopedForm) {
  const auto s = examples::ex2();
  const Verdict v = minimal_dwell_looped(s.A(), s.J(), 1.233);
  EXPECT_TRUE(v.stable);
  EXPECT_TRUE(all_checks_pass(v));
  EXPECT_FALSE(minimal_dwell_looped(s.A(), s.J(), 1.22).stable);
  for (double T : {0.01, 0.5, 3.0}) EXPECT_TRUE(minimal_dwell_looped(-kI2, 0.5 * kI2, T).stable) << T;
}

TEST(ArbitraryImpulses, Cases) {
  EXPECT_TRUE(arbitrary_impulses(-kI2, 0.5 * kI2).stable);
  const auto s1 = examples::ex1(), s2 = examples::ex2();
  EXPECT_FALSE(arbitrary_impulses(s1.A(), s1.J()).stable);
  EXPECT_FALSE(arbitrary_impulses(s2.A(), s2.J()).stable);
}

TEST(MaximalDwell, ExampleOne) {
  const auto s = examples::ex1();
  EXPECT_TRUE(maximal_dwell_lemma(s.A(), s.J(), 0.462).stable);
  EXPECT_TRUE(maximal_dwell_looped(s.A(), s.J(), 0.447).stable);
  EXPECT_FALSE(maximal_dwell_looped(s.A(), s.J(), 0.45).stable);
  EXPECT_TRUE(maximal_dwell_lemma(kI2, 0.1 * kI2, 0.1).stable);
  EXPECT_TRUE(maximal_dwell_looped(kI2, 0.1 * kI2, 0.1).stable);
}

TEST(MaximalDwell, Alternative) {
  const auto s1 = examples::ex1(), s2 = examples::ex2(), s3 = examples::ex3();
  EXPECT_TRUE(maximal_dwell_alt(s1.A(), s1.J(), 0.44).stable);
  EXPECT_FALSE(maximal_dwell_alt(s2.A(), s2.J(), 1.3).stable);
  EXPECT_FALSE(maximal_dwell_alt(s3.A(), s3.J(), 0.3).stable);
}

TEST(Ranged, LemmaGrid) {
  const auto s = examples::ex3();
  const Verdict v = ranged_lemma_grid(s.A(), s.J(), 0.19, 0.50, 50);
  EXPECT_TRUE(v.stable);
  EXPECT_EQ(v.evidence, Evidence::GridEvidence);
  EXPECT_FALSE(ranged_lemma_grid(s.A(), s.J(), 0.1, 0.6, 50).stable);
  EXPECT_EQ(ranged_lemma_grid(s.A(), s.J(), 0.3, 0.3, 50).stable, periodic_lmi(s.A(), s.J(), 0.3).stable);
  EXPECT_EQ(ranged_lemma_grid(s.A(), s.J(), 0.3, 0.3, 50).evidence, Evidence::Certified);
}

TEST(Ranged, LoopedExampleThree) {
  const auto s = examples::ex3();
  const Verdict v = ranged_looped(s.A(), s.J(), 0.1907, 0.5063);
  EXPECT_TRUE(v.stable);
  EXPECT_TRUE(all_checks_pass(v));
  EXPECT_EQ(v.checks.front().points, 100);
  EXPECT_FALSE(ranged_looped(s.A(), s.J(), 0.1, 0.6).stable);
}

TEST(Ranged, LoopedExampleFourShortRange) {
  // The certified upper end with Tmin = 1e-5 stays below the periodic bound; see the acceptance report.
  const auto s = examples::ex4();
  EXPECT_TRUE(ranged_looped(s.A(), s.J(), 1e-5, 0.6).stable);
  EXPECT_TRUE(ranged_looped(s.A(), s.J(), 0.1, 1.5).stable);
}

TEST(Ranged, DegeneratesToPeriodic) {
  const auto s = examples::ex1();
  for (double T : {0.3, 0.44, 0.46})
    EXPECT_EQ(ranged_looped(s.A(), s.J(), T, T).stable, periodic_looped(s.A(), s.J(), T).stable) << T;
}

TEST(Robust, MaximalExample) {
  const auto s = examples::robust1();
  const Verdict v = robust_periodic(s, 0.1148);
  EXPECT_TRUE(v.stable);
  EXPECT_TRUE(all_checks_pass(v));
  EXPECT_TRUE(v.certificate->has("Z_1"));
  EXPECT_TRUE(robust_maximal(s, 0.114).stable);
  EXPECT_FALSE(robust_periodic(s, 0.120).stable);
}

TEST(Robust, RangedExample) {
  const auto s = examples::robust2();
  const Verdict v = robust_ranged(s, 0.2626, 0.574);
  EXPECT_TRUE(v.stable);
  EXPECT_TRUE(v.certificate->has("Z_2"));
  EXPECT_FALSE(robust_ranged(s, 0.2, 0.574).stable);
}

TEST(Robust, SingletonMatchesNominal) {
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> dwell(0.1, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const Mat a = random_mat(gen, 2, 2, 1.5), j = random_mat(gen, 2, 2, 1.2);
    const double T = dwell(gen);
    const auto sys = make_nominal(a, j);
    EXPECT_EQ(robust_periodic(sys, T).stable, periodic_looped(a, j, T).stable) << trial;
  }
  const auto s2 = examples::ex2();
  EXPECT_EQ(robust_minimal(s2, 1.233).stable, minimal_dwell_looped(s2.A(), s2.J(), 1.233).stable);
  const auto s1 = examples::ex1();
  EXPECT_EQ(robust_maximal(s1, 0.447).stable, maximal_dwell_looped(s1.A(), s1.J(), 0.447).stable);
}

TEST(Alpha, ExampleThree) {
  const auto s = examples::ex3();
  const AlphaConstants c = alpha_stability_constants(s.A(), s.J(), mat2(2.3622, 0, 0, 1.4752));
  EXPECT_NEAR(c.c, -2.4036, 1e-3);
  EXPECT_NEAR(c.d, -0.3646, 1e-3);
}

TEST(Alpha, TrivialCases) {
  EXPECT_NEAR(alpha_stability_constants(-kI2, 0.5 * kI2, kI2).c, 2.0, 1e-14);
  EXPECT_NEAR(alpha_stability_constants(-kI2, kI2, kI2).d, 0.0, 1e-14);
  EXPECT_THROW(alpha_stability_constants(-kI2, kI2, mat2(1, 0, 0, -1)), std::invalid_argument);
  // J = 0 drives 1 + lambda_max to zero.
  EXPECT_THROW(alpha_stability_constants(-kI2, Mat::Zero(2, 2), kI2), std::domain_error);
}

TEST(Alpha, ExampleThreeAlwaysInconclusive) {
  const auto s = examples::ex3();
  int checked = 0;
  for (int i = 1; i <= 20; ++i)
    for (int k = 1; k <= 20; ++k) {
      const Mat p = mat2(std::pow(10.0, -2 + 4.0 * i / 20), 0, 0, std::pow(10.0, -2 + 4.0 * k / 20));
      const AlphaConstants c = alpha_stability_constants(s.A(), s.J(), p);
      EXPECT_LE(c.c, 0.0);
      EXPECT_LE(c.d, 0.0);
      ++checked;
    }
  std::mt19937_64 gen(23);
  for (int i = 0; i < 100; ++i) {
    const Mat l = random_mat(gen, 2, 2);
    const AlphaConstants c = alpha_stability_constants(s.A(), s.J(), l * l.transpose() + 1e-3 * kI2);
    EXPECT_LE(c.c, 0.0);
    EXPECT_LE(c.d, 0.0);
    ++checked;
  }
  EXPECT_EQ(checked, 500);
}

TEST(Analyze, Dispatch) {
  const auto s = examples::ex1();
  EXPECT_TRUE(analyze(s, Method::PeriodicLooped, Periodic{0.44}).stable);
  EXPECT_THROW(analyze(s, Method::PeriodicLooped, Arbitrary{}), std::invalid_argument);
  EXPECT_THROW(analyze(s, Method::PeriodicLooped, Ranged{0.2, 0.3}), std::invalid_argument);
  EXPECT_THROW(analyze(s, Method::PeriodicLooped, Periodic{-1.0}), std::invalid_argument);
  for (Method m : all_methods()) EXPECT_EQ(parse_method(to_string(m)), m);
  EXPECT_FALSE(parse_method("nonsense"));
}

TEST(Analyze, StableRequiresPassingChecks) {
  const auto s = examples::ex3();
  for (Method m : all_methods()) {
    const Verdict v = analyze(make_nominal(s.A(), s.J()), m, m == Method::Arbitrary ? DwellTimeSpec{Arbitrary{}}
                                                                                     : DwellTimeSpec{Periodic{0.3}});
    if (v.stable && v.evidence != Evidence::Spectral) {
      EXPECT_TRUE(all_checks_pass(v)) << to_string(m);
      EXPECT_TRUE(v.certificate.has_value());
    }
  }
}
