#include "hnp/abgroup.hpp"
#include "hnp/errors.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace hnp;

namespace {

FinAbGroup G(std::vector<Int> f) { return canonicalize(f); }
Element E(std::vector<Int> c) { return Element(std::move(c)); }

} // namespace

// ---------------------------------------------------------- canonicalize

TEST(Canonicalize, AlreadyCanonical) {
  EXPECT_EQ(G({2, 2}).factors(), (std::vector<Int>{2, 2}));
}

TEST(Canonicalize, SixFour) {
  const auto g = G({6, 4});
  EXPECT_EQ(g.factors(), (std::vector<Int>{2, 12}));
  // oracle: same order/exponent and the same element-order histogram
  EXPECT_EQ(oracle::order_histogram({6, 4}), oracle::order_histogram({2, 12}));
  EXPECT_EQ(g.order(), 24);
  EXPECT_EQ(g.exponent(), 12);
}

TEST(Canonicalize, EmptyIsTrivial) {
  const auto g = G({});
  EXPECT_TRUE(g.is_trivial());
  EXPECT_EQ(g.order(), 1);
}

TEST(Canonicalize, RejectsSmallEntries) {
  EXPECT_THROW(G({1, 4}), InvalidInput);
  EXPECT_THROW(G({0}), InvalidInput);
}

TEST(CanonicalizeProperty, IdempotentAndIsomorphic) {
  std::mt19937 rng(7);
  std::uniform_int_distribution<Int> d(2, 100);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<Int> f;
    const int k = 1 + trial % 3;
    for (int i = 0; i < k; ++i)
      f.push_back(d(rng));
    const auto g = G(f);
    EXPECT_EQ(G(g.factors()), g);
    for (std::size_t i = 0; i + 1 < g.rank(); ++i)
      EXPECT_EQ(g.factor(i + 1) % g.factor(i), 0);
    Int prod = 1;
    for (Int x : f)
      prod *= x;
    EXPECT_EQ(g.order(), prod);
    if (prod <= 5000)
      EXPECT_EQ(oracle::order_histogram(f), oracle::order_histogram(g.factors()));
  }
}

// ------------------------------------------------------------- elements

TEST(Element, OrderFormula) {
  const auto g = G({2, 12});
  EXPECT_EQ(element_order(g, E({1, 0})), 2);
  EXPECT_EQ(element_order(g, E({1, 3})), 4);
  EXPECT_EQ(element_order(g, E({0, 8})), 3);
  EXPECT_EQ(element_order(g, E({0, 0})), 1);
}

TEST(Element, ArithmeticReduces) {
  const auto g = G({4, 4});
  EXPECT_EQ(add(g, E({3, 1}), E({2, 3})), E({1, 0}));
  EXPECT_EQ(negate(g, E({1, 0})), E({3, 0}));
  EXPECT_EQ(scale(g, -3, E({1, 1})), E({1, 1}));
  EXPECT_EQ(make_element(g, {-1, 9}), E({3, 1}));
  EXPECT_THROW(make_element(g, {1}), InvalidInput);
}

// ------------------------------------------------------------ subgroups

TEST(Subgroup, FromGenerators) {
  const auto a = G({2, 2});
  EXPECT_EQ(subgroup_from_generators(a, {E({1, 0})}).order(), 2);
  EXPECT_EQ(subgroup_from_generators(a, {E({1, 0}), E({0, 1})}).order(), 4);

  const auto b = G({4, 4});
  const auto h = subgroup_from_generators(b, {E({2, 0}), E({0, 2})});
  // brute-force closure
  EXPECT_EQ(oracle::closure({4, 4}, {{2, 0}, {0, 2}}).size(), 4u);
  EXPECT_EQ(h.order(), 4);
  EXPECT_TRUE(h.contains(E({2, 2})));
  EXPECT_FALSE(h.contains(E({1, 0})));
  EXPECT_THROW(subgroup_from_generators(b, {E({1})}), InvalidInput);
}

TEST(Subgroup, CanonicalEquality) {
  const auto a = G({4, 4});
  const auto h1 = subgroup_from_generators(a, {E({1, 2}), E({0, 2})});
  const auto h2 = subgroup_from_generators(a, {E({1, 0}), E({2, 2}), E({0, 2})});
  EXPECT_EQ(h1, h2);
  EXPECT_EQ(h1.hash(), h2.hash());
  EXPECT_NE(h1, trivial_subgroup(a));
}

TEST(SubgroupProperty, OrderAndMembershipMatchClosure) {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 400; ++trial) {
    const auto a = oracle::random_group(rng, 256);
    std::vector<Element> gens;
    std::vector<oracle::Tuple> raw;
    const int k = trial % 4;
    for (int i = 0; i < k; ++i) {
      gens.push_back(oracle::random_element(rng, a));
      raw.push_back(gens.back().coords);
    }
    const auto h = subgroup_from_generators(a, gens);
    const auto cl = oracle::closure(a.factors(), raw);
    ASSERT_EQ(h.order(), static_cast<Int>(cl.size())) << a;
    for (const auto &x : all_elements(a))
      ASSERT_EQ(h.contains(x), cl.count(x.coords) == 1);
    // generators() generates the same subgroup
    std::vector<oracle::Tuple> hg;
    for (const auto &g : h.generators())
      hg.push_back(g.coords);
    EXPECT_EQ(oracle::closure(a.factors(), hg), cl);
  }
}

TEST(Torsion, Examples) {
  const auto a = G({4, 4});
  const auto t = torsion(a, 2);
  EXPECT_EQ(t.order(), 4);
  EXPECT_EQ(t, subgroup_from_generators(a, {E({2, 0}), E({0, 2})}));
  // brute force: count x with 2x = 0
  int n2 = 0;
  for (const auto &x : all_elements(a))
    n2 += scale(a, 2, x).is_zero();
  EXPECT_EQ(n2, 4);

  const auto b = G({2, 12});
  int n3 = 0;
  for (const auto &x : all_elements(b))
    n3 += scale(b, 3, x).is_zero();
  EXPECT_EQ(n3, 3);
  EXPECT_EQ(torsion(b, 3).order(), 3);

  EXPECT_TRUE(torsion(G({5}), 2).is_trivial());
  EXPECT_THROW(torsion(a, 4), InvalidInput);
}

TEST(Quotient, Examples) {
  const auto a = G({4, 4});
  const auto q = quotient_map(a, torsion(a, 2));
  EXPECT_EQ(q.group, G({2, 2}));

  const auto c8 = G({8});
  EXPECT_EQ(quotient_map(c8, torsion(c8, 2)).group, G({4}));

  const auto b = G({3, 6});
  const auto qt = quotient_map(b, trivial_subgroup(b));
  EXPECT_EQ(qt.group, b);
  EXPECT_EQ(qt.projection, identity_map(b));

  EXPECT_THROW(quotient_map(b, trivial_subgroup(a)), InvalidInput);
}

TEST(QuotientProperty, SurjectiveWithKernelH) {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const auto a = oracle::random_group(rng, 128);
    std::vector<Element> gens;
    for (int i = 0; i < trial % 3; ++i)
      gens.push_back(oracle::random_element(rng, a));
    const auto h = subgroup_from_generators(a, gens);
    const auto q = quotient_map(a, h);
    EXPECT_EQ(q.group.order() * h.order(), a.order());
    std::set<std::vector<Int>> imgs;
    for (const auto &x : all_elements(a)) {
      const auto y = apply(q.projection, x);
      imgs.insert(y.coords);
      ASSERT_EQ(y.is_zero(), h.contains(x));
    }
    EXPECT_EQ(static_cast<Int>(imgs.size()), q.group.order());
  }
}

TEST(Cyclic, Examples) {
  EXPECT_TRUE(is_cyclic(G({12})));
  EXPECT_FALSE(is_cyclic(G({2, 2})));
  EXPECT_TRUE(is_cyclic(G({})));
  EXPECT_TRUE(is_cyclic(G({4, 3})));
}

// -------------------------------------------------------- exterior square

TEST(Wedge, SquareExamples) {
  const auto w22 = wedge_square(G({2, 2}));
  EXPECT_EQ(w22.structure, G({2}));
  EXPECT_EQ(oracle::count_alternating_pairings({2, 2}), 2);
  EXPECT_TRUE(wedge_square(G({6})).structure.is_trivial());
  EXPECT_EQ(wedge_square(G({2, 4, 4})).structure.factors(),
            (std::vector<Int>{2, 2, 4}));
}

TEST(Wedge, PairExamples) {
  EXPECT_EQ(wedge_pair(G({2, 2}), E({1, 0}), E({0, 1})), E({1}));
  EXPECT_EQ(wedge_pair(G({4, 4}), E({1, 0}), E({0, 2})), E({2}));
  EXPECT_EQ(wedge_pair(G({4, 4}), E({3, 1}), E({3, 1})), E({0}));
  EXPECT_THROW(wedge_pair(G({4, 4}), E({1}), E({0, 2})), InvalidInput);
}

TEST(Wedge, ImageJoinExamples) {
  const auto a = G({2, 2});
  EXPECT_TRUE(wedge_image_join(a, {full_subgroup(a)}).is_full());
  const std::vector<Subgroup> lines{
      subgroup_from_generators(a, {E({1, 0})}),
      subgroup_from_generators(a, {E({0, 1})}),
      subgroup_from_generators(a, {E({1, 1})})};
  EXPECT_TRUE(wedge_image_join(a, lines).is_trivial());

  const auto b = G({4, 4});
  const auto j = wedge_image_join(
      b, {subgroup_from_generators(b, {E({1, 0}), E({0, 2})}),
          subgroup_from_generators(b, {E({0, 1}), E({2, 0})})});
  const auto w = wedge_square(b);
  EXPECT_EQ(j, subgroup_from_generators(w.structure, {E({2})}));
}

TEST(WedgeProperty, OrderMatchesPairingCount) {
  for (Int n = 2; n <= 64; ++n) {
    for (const auto &f : std::vector<std::vector<Int>>{{n}, {2, n}, {n, n}}) {
      Int ord = 1;
      for (Int x : f)
        ord *= x;
      if (ord > 64)
        continue;
      const auto g = G(f);
      Int expect = 1;
      for (std::size_t i = 0; i < g.rank(); ++i)
        for (std::size_t j = i + 1; j < g.rank(); ++j)
          expect *= g.factor(i);
      EXPECT_EQ(wedge_square(g).structure.order(), expect);
      const Int bf = oracle::count_alternating_pairings(g.factors());
      if (bf >= 0)
        EXPECT_EQ(bf, expect) << g;
    }
  }
  // a few higher-rank groups
  for (const auto &f : std::vector<std::vector<Int>>{
           {2, 2, 2}, {2, 2, 4}, {2, 4, 4}, {2, 2, 2, 2}, {3, 3, 3}, {2, 2, 2, 4}}) {
    const auto g = G(f);
    const Int bf = oracle::count_alternating_pairings(g.factors());
    if (bf >= 0)
      EXPECT_EQ(bf, wedge_square(g).structure.order()) << g;
  }
}

TEST(WedgeProperty, BilinearAndAlternating) {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 2000; ++trial) {
    const auto a = oracle::random_group(rng, 256);
    const auto w = wedge_square(a);
    const auto x = oracle::random_element(rng, a);
    const auto x2 = oracle::random_element(rng, a);
    const auto y = oracle::random_element(rng, a);
    EXPECT_EQ(wedge_pair(w, add(a, x, x2), y),
              add(w.structure, wedge_pair(w, x, y), wedge_pair(w, x2, y)));
    EXPECT_TRUE(wedge_pair(w, x, x).is_zero());
    EXPECT_EQ(wedge_pair(w, y, x), negate(w.structure, wedge_pair(w, x, y)));
  }
}

TEST(WedgeProperty, Functoriality) {
  std::mt19937 rng(13);
  for (int trial = 0; trial < 300; ++trial) {
    const auto a = oracle::random_group(rng, 64);
    const auto b = oracle::random_group(rng, 64);
    const auto c = oracle::random_group(rng, 64);
    const auto f = oracle::random_hom(rng, a, b);
    const auto g = oracle::random_hom(rng, b, c);
    EXPECT_EQ(wedge_map(compose(g, f)), compose(wedge_map(g), wedge_map(f)));
  }
}

// ------------------------------------------------------ pairings, Q/Z

TEST(QZ, Arithmetic) {
  EXPECT_EQ(QZ::make(3, 6), (QZ{1, 2}));
  EXPECT_EQ(QZ::make(-1, 4), (QZ{3, 4}));
  EXPECT_EQ(QZ::make(1, 2) + QZ::make(1, 2), QZ{});
  EXPECT_EQ(QZ::make(1, 3) + QZ::make(1, 6), (QZ{1, 2}));
  EXPECT_EQ(4 * QZ::make(1, 4), QZ{});
}

TEST(AltPairing, RejectsValuesNotKilledByFactor) {
  EXPECT_THROW(AltPairing(G({2, 4}), {QZ::make(1, 4)}), InvalidInput);
  EXPECT_NO_THROW(AltPairing(G({2, 4}), {QZ::make(1, 2)}));
}

TEST(Pullback, Examples) {
  const auto a = G({4, 4});
  const auto b = G({2, 2});
  IntMatrix m = IntMatrix::Identity(2, 2);
  const auto pi = make_homomorphism(a, b, m);

  EXPECT_TRUE(pullback_pairing(AltPairing(b), pi).is_zero());

  const AltPairing f(b, {QZ::make(1, 2)});
  const auto ft = pullback_pairing(f, pi);
  EXPECT_EQ(ft.evaluate(E({1, 0}), E({0, 1})), QZ::make(1, 2));
  EXPECT_FALSE(ft.is_zero());

  EXPECT_TRUE(pullback_pairing(f, zero_map(a, b)).is_zero());
  EXPECT_THROW(pullback_pairing(f, identity_map(a)), InvalidInput);
}

TEST(PairingProperty, AlternatingAndBilinear) {
  std::mt19937 rng(17);
  for (int trial = 0; trial < 500; ++trial) {
    const auto a = oracle::random_group(rng, 256);
    const auto w = wedge_square(a);
    std::vector<Int> c;
    for (Int d : w.structure.factors())
      c.push_back(std::uniform_int_distribution<Int>(0, d - 1)(rng));
    const auto f = AltPairing::from_coefficients(a, c);
    const auto x = oracle::random_element(rng, a);
    const auto x2 = oracle::random_element(rng, a);
    const auto y = oracle::random_element(rng, a);
    EXPECT_TRUE(f.evaluate(x, x).is_zero());
    EXPECT_EQ(f.evaluate(x, y), -f.evaluate(y, x));
    EXPECT_EQ(f.evaluate(add(a, x, x2), y), f.evaluate(x, y) + f.evaluate(x2, y));
  }
}
