#include <gtest/gtest.h>

#include "spaceform/cohomology.hpp"
#include "spaceform/spec_parse.hpp"

using namespace spaceform;

TEST(Cohomology, TableExamples) {
  EXPECT_EQ(cohomology_table(GroupSpec::q8()).at(2).factors(), (std::vector<u64>{2, 2}));
  EXPECT_EQ(cohomology_table(GroupSpec::tstar(2)).at(4).factors(), (std::vector<u64>{72}));
  for (u64 n = 1; n <= 3; ++n) EXPECT_TRUE(cohomology_table(GroupSpec::ostar(n)).at(3).is_trivial());
  EXPECT_EQ(cohomology_table(GroupSpec::cyclic(5)).at(0), AbelianInvariants::integers());
}

TEST(Cohomology, H2OracleMatchesTable) {
  std::vector<GroupSpec> specs{GroupSpec::q8()};
  for (u64 n = 1; n <= 3; ++n) {
    specs.push_back(GroupSpec::tstar(n));
    specs.push_back(GroupSpec::ostar(n));
  }
  for (u64 m = 1; m <= 50; ++m) specs.push_back(GroupSpec::cyclic(m));
  for (const auto& s : specs) EXPECT_EQ(h2_oracle(build(s)), cohomology_table(s).at(2)) << s.to_string();
  EXPECT_EQ(h2_oracle(build(GroupSpec::tstar(3))).factors(), (std::vector<u64>{27}));
  EXPECT_EQ(h2_oracle(build(GroupSpec::ostar(2))).factors(), (std::vector<u64>{2}));
}

TEST(Cohomology, Q16DiscrepancyRecorded) {
  const auto d = table_discrepancies();
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d[0].printed, "Z+Z/2");
  EXPECT_EQ(d[0].encoded, "Z/2+Z/2");
  EXPECT_EQ(d[0].oracle, "Z/2+Z/2");
}

TEST(Cohomology, PeriodicityAndOddVanishing) {
  for (const auto& s : {GroupSpec::q8(), GroupSpec::q16(), GroupSpec::tstar(1), GroupSpec::tstar(3), GroupSpec::ostar(2), GroupSpec::cyclic(9)}) {
    const auto t = cohomology_table(s);
    for (u64 k = 1; k <= 12; ++k) {
      EXPECT_EQ(t.at(k), t.at(k + 4)) << s.to_string() << " k=" << k;
      if (k % 2 == 1) {
        EXPECT_TRUE(t.at(k).is_trivial());
      }
    }
  }
}

TEST(Cohomology, EllAndPeriods) {
  EXPECT_EQ(least_period(GroupSpec::tstar(2)), 4u);
  EXPECT_EQ(least_period(GroupSpec::ostar(3)), 4u);
  EXPECT_EQ(least_period(GroupSpec::cyclic(2)), 2u);
  EXPECT_EQ(ell(Action{11, 1, 1, 1}), 1u);
  EXPECT_EQ(ell(Action{11, 3, 1, 1}), 5u);
  EXPECT_EQ(ell(Action{7, 1, 2, 1}), 3u);
  const auto spec = parse_group_spec("C(11)x(C(5)xT*(1))[u=3,v=1]");
  EXPECT_EQ(ell(spec), 5u);
  EXPECT_EQ(least_period(spec), 20u);
}

TEST(Cohomology, FamilyTopDegree) {
  for (Family f : {Family::T, Family::O}) {
    FamilyParams p;
    p.family = f;
    p.a = 7;
    p.b = 5;
    p.n = 2;
    if (f == Family::T)
      p.v = 2;
    else
      p.w = 6;
    p.validate();
    const auto t = cohomology_table(p.spec());
    EXPECT_EQ(t.period(), 2 * p.K() / p.k);
    EXPECT_EQ(t.at(2 * p.K()).order(), p.N());
    EXPECT_THROW(t.at(2), DomainError);
  }
}
