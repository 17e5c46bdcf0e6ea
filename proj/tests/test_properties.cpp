#include <gtest/gtest.h>

#include "properties.hpp"

using namespace dwellcert::properties;

namespace {

void expect_clean(const Result& r) {
  EXPECT_GT(r.cases, 0) << r.name;
  EXPECT_EQ(r.violations, 0) << r.name << ": " << r.first_violation;
}

}  // namespace

TEST(Property, SpectralAgreesWithLmi) { expect_clean(spectral_vs_lmi()); }
TEST(Property, CertificateImplication) { expect_clean(certificate_implication()); }
TEST(Property, LoopCondition) { expect_clean(loop_condition()); }
TEST(Property, IntegralIdentity) { expect_clean(integral_identity()); }
TEST(Property, SmallTSchurDichotomy) { expect_clean(small_t_dichotomy()); }
TEST(Property, RangedDegeneracy) { expect_clean(ranged_degeneracy()); }
TEST(Property, SearchConsistency) { expect_clean(search_consistency()); }
