#include <gtest/gtest.h>

#include <numeric>
#include <random>
#include <set>

#include "spaceform/abelian.hpp"
#include "spaceform/modular.hpp"

using namespace spaceform;
using namespace spaceform::modular;

namespace {

// Closure by repeated pairwise products until nothing new appears.
std::set<u64> naive_closure(u64 m, const std::vector<u64>& gens) {
  std::set<u64> s{1 % m};
  for (u64 g : gens) s.insert(g % m);
  bool grew = true;
  while (grew) {
    grew = false;
    std::vector<u64> current(s.begin(), s.end());
    for (u64 x : current)
      for (u64 y : current) grew |= s.insert(x * y % m).second;
  }
  return s;
}

u64 naive_phi(u64 m) {
  u64 c = 0;
  for (u64 x = 0; x < m; ++x) c += std::gcd(x, m) == 1;
  return c;
}

}  // namespace

TEST(Modular, UnitGroupExamples) {
  EXPECT_EQ(unit_group(8).elements(), (std::vector<u64>{1, 3, 5, 7}));
  EXPECT_EQ(unit_group(1).elements(), (std::vector<u64>{0}));
  EXPECT_THROW(unit_group(0), DomainError);
}

TEST(Modular, ClosureExamples) {
  EXPECT_EQ(subgroup_closure(24, {23}).elements(), (std::vector<u64>{1, 23}));
  EXPECT_EQ(subgroup_closure(5, {2}).elements(), (std::vector<u64>{1, 2, 3, 4}));
  EXPECT_THROW(subgroup_closure(10, {4}), DomainError);
}

TEST(Modular, BigOExamples) {
  for (u64 k = 1; k <= 6; ++k) EXPECT_EQ(big_O(8, k), k % 2 == 0 ? 2u : 1u) << k;
  EXPECT_EQ(big_O(9, 3), 3u);
  EXPECT_EQ(big_O(5, 1), 1u);
  EXPECT_EQ(big_O(5, 2), 2u);
  EXPECT_EQ(big_O(27, 2), 1u);
  EXPECT_EQ(relative_O(16, {1, 9}), 2u);
  EXPECT_EQ(relative_O(7, {1}), 3u);
  EXPECT_THROW(big_O(0, 1), DomainError);
}

TEST(Modular, CrtExamples) {
  EXPECT_EQ(crt_split(45), (std::vector<u64>{9, 5}));
  EXPECT_EQ(crt_split(49), (std::vector<u64>{49}));
  const Residue r = crt_combine(std::vector<Residue>{Residue(9, 16), Residue(1, 3)});
  EXPECT_EQ(r.value(), 25u);
  EXPECT_EQ(r.modulus(), 48u);
  EXPECT_THROW(crt_combine(std::vector<Residue>{Residue(1, 6), Residue(1, 4)}), DomainError);
}

TEST(Modular, OrderAndPhiAgainstNaive) {
  for (u64 m = 1; m <= 200; ++m) {
    EXPECT_EQ(euler_phi(m), naive_phi(m));
    for (u64 u : unit_group(m).elements()) {
      u64 t = 1, p = u % m;
      while (p != 1 % m) {
        p = p * u % m;
        ++t;
      }
      ASSERT_EQ(multiplicative_order(u, m), t) << u << " mod " << m;
    }
  }
}

TEST(Modular, ClosureMatchesNaiveOnRandomGenerators) {
  std::mt19937_64 rng(20240917);
  for (int trial = 0; trial < 300; ++trial) {
    const u64 m = 1 + rng() % 120;
    const auto units = unit_group(m).elements();
    std::vector<u64> gens;
    for (int i = 0, n = static_cast<int>(rng() % 4); i < n; ++i) gens.push_back(units[rng() % units.size()]);
    const auto fast = subgroup_closure(m, gens).elements();
    const auto slow = naive_closure(m, gens);
    ASSERT_EQ(std::set<u64>(fast.begin(), fast.end()), slow) << "m=" << m;
    // Lagrange
    ASSERT_EQ(euler_phi(m) % fast.size(), 0u);
  }
}

TEST(Modular, CrtRoundTripProperty) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 500; ++trial) {
    const u64 m = 1 + rng() % 5000;
    const u64 x = rng() % m;
    std::vector<Residue> parts;
    for (u64 q : crt_split(m)) parts.emplace_back(x % q, q);
    ASSERT_EQ(crt_combine(parts).value(), x);
    u64 product = 1;
    for (u64 q : crt_split(m)) product *= q;
    ASSERT_EQ(product, m);
  }
}

TEST(Modular, ResidueArithmetic) {
  Residue a(7, 12), b(10, 12);
  EXPECT_EQ((a + b).value(), 5u);
  EXPECT_EQ((a * b).value(), 10u);
  EXPECT_EQ((-a).value(), 5u);
  EXPECT_EQ(a.inverse().value(), 7u);
  EXPECT_THROW(b.inverse(), DomainError);
  EXPECT_THROW(a + Residue(1, 5), DomainError);
  EXPECT_THROW(Residue(1, 0), DomainError);
}

TEST(Abelian, InvariantFactors) {
  EXPECT_EQ(AbelianInvariants::from_cyclic_orders({2, 3}).factors(), (std::vector<u64>{6}));
  EXPECT_EQ(AbelianInvariants::from_cyclic_orders({2, 2}).factors(), (std::vector<u64>{2, 2}));
  EXPECT_EQ(AbelianInvariants::from_cyclic_orders({4, 6, 1}).factors(), (std::vector<u64>{2, 12}));
  EXPECT_EQ(AbelianInvariants::from_cyclic_orders({0, 2}).factors(), (std::vector<u64>{0, 2}));
  EXPECT_TRUE(AbelianInvariants::from_cyclic_orders({1}).is_trivial());
  EXPECT_EQ(AbelianInvariants::from_cyclic_orders({2, 2}).to_string(), "Z/2+Z/2");
  EXPECT_EQ(AbelianInvariants().to_string(), "0");
}

TEST(Abelian, DivisibilityChainProperty) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<u64> orders;
    u64 product = 1;
    for (int i = 0, n = 1 + static_cast<int>(rng() % 4); i < n; ++i) {
      orders.push_back(1 + rng() % 40);
      product *= orders.back();
    }
    const auto inv = AbelianInvariants::from_cyclic_orders(orders);
    ASSERT_EQ(inv.order(), product);
    for (std::size_t i = 1; i < inv.factors().size(); ++i) ASSERT_EQ(inv.factors()[i] % inv.factors()[i - 1], 0u);
  }
}
