#include <gtest/gtest.h>

#include <random>
#include <set>

#include "oracles.hpp"
#include "spaceform/autos.hpp"
#include "spaceform/derivations.hpp"
#include "spaceform/spec_parse.hpp"

using namespace spaceform;

namespace {

Group make(const std::string& text) { return build(parse_group_spec(text)); }

}  // namespace

TEST(Autos, Counts) {
  EXPECT_EQ(enumerate_automorphisms(make("Q8")).size(), 24u);
  EXPECT_EQ(enumerate_automorphisms(make("C(9)")).size(), 6u);
  EXPECT_EQ(enumerate_automorphisms(make("C(1)")).size(), 1u);
  EXPECT_EQ(enumerate_automorphisms(make("T*(1)")).size(), 24u);
  EXPECT_EQ(enumerate_automorphisms(make("O*(1)")).size(), 48u);
  EXPECT_EQ(enumerate_automorphisms(make("O*(2)")).size(), 432u);
}

TEST(Autos, InnerCounts) {
  EXPECT_EQ(inner_automorphisms(make("O*(1)")).size(), 24u);
  EXPECT_EQ(inner_automorphisms(make("Q8")).size(), 4u);
  EXPECT_EQ(inner_automorphisms(make("C(12)")).size(), 1u);
  for (const char* text : {"T*(2)", "O*(2)", "Q16"}) {
    const Group g = make(text);
    EXPECT_EQ(inner_automorphisms(g).size(), g.order() / center(g).elements.size()) << text;
  }
}

TEST(Autos, PrunedSearchMatchesRawSearch) {
  for (const char* text : {"Q8", "C(12)", "C(5)xC(4)[u=2]", "C(7)xC(3)[u=2]", "Q16", "C(3)xQ8"}) {
    const Group g = make(text);
    std::set<std::vector<Index>> pruned, raw;
    for (const auto& a : enumerate_automorphisms(g)) pruned.insert(a.images);
    for (const auto& imgs : oracle::raw_isomorphisms(g, g)) raw.insert(imgs);
    EXPECT_EQ(pruned, raw) << text;
  }
}

TEST(Autos, AutQ8IsSymmetricGroup) {
  const Group q8 = make("Q8");
  const Group aut = automorphism_group(q8, enumerate_automorphisms(q8));
  const Group s4 = oracle::symmetric_group(4);
  EXPECT_FALSE(search_homomorphisms(aut, s4, true).empty());
}

TEST(Autos, ClosedUnderCompositionAndInverse) {
  for (const char* text : {"Q8", "T*(1)", "O*(1)", "C(5)xC(4)[u=2]"}) {
    const Group g = make(text);
    const auto auts = enumerate_automorphisms(g);
    std::set<std::vector<Index>> all;
    for (const auto& a : auts) all.insert(a.images);
    EXPECT_TRUE(all.count(g.generator_elements())) << text;
    for (const auto& x : auts) {
      EXPECT_TRUE(all.count(inverse(x, g).images));
      for (const auto& y : auts) ASSERT_TRUE(all.count(compose(x, y).images)) << text;
    }
  }
}

TEST(Autos, TooLargeIsExplicit) {
  AutOptions options;
  options.max_order = 100;
  try {
    enumerate_automorphisms(make("O*(2)"), options);
    FAIL() << "expected TooLarge";
  } catch (const TooLarge& e) {
    EXPECT_NE(std::string(e.what()).find("too large, supply closed form"), std::string::npos);
  }
}

TEST(Autos, FixingAction) {
  const Group c9 = make("C(9)");
  const auto fixing = aut_fixing_action(c9, Character::from_generator_images(c9, 7, {2}));
  std::vector<Index> ws;
  for (const auto& a : fixing) ws.push_back(a.images[0]);
  EXPECT_EQ(ws, (std::vector<Index>{1, 4, 7}));
  EXPECT_EQ(cyclic_fixing_units(7, 2, 7), (std::vector<u64>{1, 4}));
  const Group t1 = make("T*(1)");
  EXPECT_EQ(aut_fixing_action(t1, Character::from_generator_images(t1, 7, {2, 1, 1})).size(), 12u);
  EXPECT_EQ(aut_fixing_action(t1, Character::trivial(t1, 7)).size(), 24u);
}

TEST(Autos, CyclicClosedFormCrossCheck) {
  for (u64 b : {1, 3, 5, 9, 15, 21}) {
    const Group cb = build(GroupSpec::cyclic(b));
    for (u64 a : {7, 13, 19, 31, 37}) {
      for (u64 u : modular::unit_group(a).elements()) {
        if (modular::powmod(u, b, a) != 1) continue;
        EXPECT_NO_THROW(aut_fixing_action(cb, Character::from_generator_images(cb, a, {u})));
      }
    }
  }
}

TEST(Autos, DirectFactorsAreInvariant) {
  const Group g = make("C(5)xQ8");
  for (const auto& phi : enumerate_automorphisms(g)) {
    for (Index x = 0; x < 5; ++x) ASSERT_LT(phi(x), 5u);
  }
}

TEST(Autos, InducedUnitExamples) {
  const Group c5 = make("C(5)");
  const auto phi = *complete_automorphism(c5, {2});
  EXPECT_EQ(induced_unit_action(c5, phi, 4).components[0].unit, 4u);
  for (u64 n = 1; n <= 2; ++n) {
    const Group o = build(GroupSpec::ostar(n));
    std::vector<Index> images = o.generator_elements();
    const std::size_t r = *o.generator_position("R");
    images[r] = o.pow(images[r], 3);  // phi(R) = -R
    const auto psi = complete_automorphism(o, images);
    ASSERT_TRUE(psi.has_value());
    const auto act = induced_unit_action(o, *psi, 4);
    EXPECT_EQ(act.components[0].modulus, 16u);
    EXPECT_EQ(act.components[0].unit, 9u);
    EXPECT_EQ(q16_exponent(o, *psi) * q16_exponent(o, *psi) % 16, 9u);
  }
  const Group t2 = make("T*(2)");
  for (const auto& a : enumerate_automorphisms(t2)) EXPECT_EQ(induced_unit_action(t2, a, 4).components[0].unit, 1u);
  EXPECT_THROW(induced_unit_action(t2, identity_automorphism(t2), 2), DomainError);
  EXPECT_THROW(induced_unit_action(c5, phi, 3), DomainError);
}

TEST(Autos, InducedActionIsMultiplicativeAndInnerTrivial) {
  for (const char* text : {"O*(1)", "T*(2)", "C(5)x(C(7)xT*(1))[u=1,v=1]"}) {
    const Group g = make(text);
    if (g.order() > 2000) continue;
    const auto auts = enumerate_automorphisms(g);
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 40; ++trial) {
      const auto& x = auts[rng() % auts.size()];
      const auto& y = auts[rng() % auts.size()];
      for (u64 degree : {4, 8, 12}) {
        const auto ix = induced_unit_action(g, x, degree), iy = induced_unit_action(g, y, degree);
        const auto ixy = induced_unit_action(g, compose(x, y), degree);
        for (std::size_t c = 0; c < ix.components.size(); ++c)
          ASSERT_EQ(ixy.components[c].unit, ix.components[c].unit * iy.components[c].unit % ix.components[c].modulus) << text;
      }
    }
    for (const auto& inner : inner_automorphisms(g))
      for (const auto& c : induced_unit_action(g, inner, 4).components) ASSERT_EQ(c.unit, 1 % c.modulus) << text;
  }
}

TEST(Autos, OStarTwoPartInPlusMinusNine) {
  for (u64 n = 1; n <= 3; ++n) {
    const Group o = build(GroupSpec::ostar(n));
    for (const auto& a : enumerate_automorphisms(o)) {
      const u64 unit = induced_unit_action(o, a, 4).components[0].unit;
      ASSERT_TRUE(unit == 1 || unit == 9 || unit == 15 || unit == 7) << unit;
    }
  }
}

TEST(Autos, ThreePartImageIsAllUnits) {
  for (u64 n = 1; n <= 3; ++n) {
    const Group t = build(GroupSpec::tstar(n));
    std::set<u64> image;
    for (const auto& a : enumerate_automorphisms(t)) image.insert(three_part_unit(t, a));
    const auto units = modular::unit_group(modular::ipow(3, n)).elements();
    EXPECT_EQ(std::vector<u64>(image.begin(), image.end()), units) << n;
  }
}

TEST(Autos, SplittingSequence) {
  for (const char* text : {"C(5)xC(4)[u=2]", "C(7)xC(3)[u=2]", "C(7)xT*(1)[v=2]", "C(5)xC(3)[u=1]"}) {
    const Group g = make(text);
    const auto& spec = *g.spec();
    const u64 a = spec.param;
    const Group h = build(spec.children[0]);
    const Character chi = Character::from_action(h, spec.action);
    const auto auts = enumerate_automorphisms(g);
    const auto der = enumerate_derivations(h, chi, false);
    const auto fixing = aut_fixing_action(h, chi);
    EXPECT_EQ(auts.size(), der.size() * modular::euler_phi(a) * fixing.size()) << text;
    std::set<SplitAutomorphism> image, expected;
    for (const auto& phi : auts) image.insert(split_semidirect_automorphism(g, phi));
    for (u64 l : modular::unit_group(a).elements())
      for (const auto& f : fixing) expected.insert({l, f.images});
    EXPECT_EQ(image, expected) << text;
  }
}

TEST(Autos, OStarTStarRestriction) {
  for (u64 n = 1; n <= 2; ++n) {
    const Group o = build(GroupSpec::ostar(n));
    const auto t = o.generated_subgroup({o.generator("X"), o.generator("P"), o.generator("Q")});
    std::set<Index> tset(t.begin(), t.end());
    for (const auto& a : enumerate_automorphisms(o))
      for (Index x : t) ASSERT_TRUE(tset.count(a(x)));
  }
}
