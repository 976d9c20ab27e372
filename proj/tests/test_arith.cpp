#include "hnp/arith.hpp"
#include "hnp/errors.hpp"
#include "nt_oracles.hpp"

#include <gtest/gtest.h>

using namespace hnp;

TEST(Arith, PrimesAndFactors) {
  EXPECT_EQ(primes_up_to(30),
            (std::vector<Int>{2, 3, 5, 7, 11, 13, 17, 19, 23, 29}));
  EXPECT_TRUE(is_prime(1'000'000'007));
  EXPECT_FALSE(is_prime(1));
  EXPECT_FALSE(is_prime(561));
  EXPECT_EQ(factorize(360), (std::vector<std::pair<Int, int>>{{2, 3}, {3, 2}, {5, 1}}));
  EXPECT_EQ(valuation(48, 2), 4);
}

TEST(Arith, PrimitiveRootsMatchBruteForce) {
  for (Int p : primes_up_to(400))
    if (p > 2)
      EXPECT_EQ(primitive_root(p), oracle::least_primitive_root(p)) << p;
  // the least primitive root 5 of 40487 is not primitive mod 40487^2
  EXPECT_NE(primitive_root(40487), 5);
  EXPECT_EQ(primitive_root(40487), oracle::least_primitive_root(40487));
}

TEST(DiscreteLog, Examples) {
  EXPECT_EQ(discrete_log(13, 1, 17).tame % 2, 0);
  const auto one = discrete_log(7, 1, 1);
  EXPECT_EQ(one.tame, 0);
  EXPECT_EQ(one.wild_modulus, 1);
  const auto seven = discrete_log(2, 3, 7);
  EXPECT_EQ(seven.tame, 1);
  EXPECT_EQ(seven.wild, 0);
  EXPECT_EQ(seven.generator, -1);
}

TEST(DiscreteLog, MatchesExhaustiveTables) {
  const std::vector<std::pair<Int, int>> cases{{3, 1}, {3, 4}, {5, 3}, {7, 3},
                                               {11, 2}, {13, 2}, {2, 3}, {2, 6},
                                               {2, 9}, {3, 7}};
  for (auto [p, k] : cases) {
    const auto table = oracle::log_table(p, k);
    for (Int x = 1; x < static_cast<Int>(table.size()); ++x) {
      if (x % p == 0)
        continue;
      const auto d = discrete_log(p, k, x);
      ASSERT_EQ(d.tame, table[static_cast<std::size_t>(x)].first) << p << "^" << k << " " << x;
      ASSERT_EQ(d.wild, table[static_cast<std::size_t>(x)].second) << p << "^" << k << " " << x;
    }
  }
}

TEST(DiscreteLog, TameModulusReduction) {
  for (Int p : {7, 13, 31, 61})
    for (Int m = 1; m < p; ++m)
      if ((p - 1) % m == 0)
        for (Int x = 1; x < p; ++x)
          ASSERT_EQ(tame_log_mod(p, x, m), discrete_log(p, 1, x).tame % m);
  EXPECT_THROW(tame_log_mod(13, 2, 5), InvalidInput);
}

TEST(LogInCyclic, LargePrimeOrder) {
  const Int p = 1'000'003; // p - 1 = 2 * 3 * 166667
  const Int g = primitive_root(p);
  for (Int k : {0LL, 1LL, 12345LL, 999'999LL, 1'000'001LL}) {
    const Int h = pow_mod(g, k, p);
    EXPECT_EQ(log_in_cyclic(h, g, p - 1, p), k % (p - 1));
  }
}
