#include "hnp/arith.hpp"
#include "hnp/criterion.hpp"
#include "hnp/errors.hpp"
#include "hnp/qfields.hpp"
#include "hnp/search.hpp"
#include "nt_oracles.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace hnp;

namespace {

FinAbGroup G(std::vector<Int> f) { return canonicalize(f); }
Element E(std::vector<Int> c) { return Element(std::move(c)); }

SearchOptions disc_opts(UInt128 bound, int jobs = 1) {
  SearchOptions o;
  o.bound = bound;
  o.jobs = jobs;
  return o;
}

GlobalChar biquadratic_13_17() {
  const auto a = G({2, 2});
  return make_global_char(a, {LocalChar{13, E({1, 0}), E({0, 0})},
                              LocalChar{17, E({0, 1}), E({0, 0})}});
}

Int signed_disc(const FieldRecord &r) {
  const Int d = static_cast<Int>(r.discriminant);
  return r.infinite_place.is_zero() ? d : -d;
}

// Character values by exhaustive log tables: the conductor exponent is the
// least f such that chi o psi kills every unit = 1 mod p^f.
Int conductor_exponent_bruteforce(const FinAbGroup &a, const Character &chi,
                                  const LocalChar &psi) {
  const Int p = psi.p;
  const int k = p == 2 ? 8 : 5;
  const auto table = oracle::log_table(p, k);
  const Int mod = static_cast<Int>(table.size());
  for (int f = 0; f <= k; ++f) {
    const Int pf = ipow(p, static_cast<unsigned>(f));
    bool trivial = true;
    for (Int x = 1; x < mod && trivial; x += pf) {
      if (x % p == 0)
        continue;
      const auto [s, b] = table[static_cast<std::size_t>(x)];
      const Element v = add(a, scale(a, s, psi.tame), scale(a, b, psi.wild));
      trivial = chi(v).is_zero();
    }
    if (trivial)
      return f;
  }
  return -1;
}

} // namespace

// ------------------------------------------------------------ local data

TEST(LocalCharSpace, Examples) {
  const auto s3 = local_char_space(3, G({2}));
  ASSERT_EQ(s3.size(), 2u);
  EXPECT_FALSE(s3[0].is_ramified());
  EXPECT_TRUE(s3[1].is_ramified());
  EXPECT_EQ(local_char_space(2, G({2})).size(), 4u);
  const auto s5 = local_char_space(5, G({3}));
  ASSERT_EQ(s5.size(), 1u);
  EXPECT_FALSE(s5[0].is_ramified());
  EXPECT_THROW(local_char_space(9, G({3})), InvalidInput);
}

TEST(LocalCharSpace, SizesByBruteForce) {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 60; ++trial) {
    const auto a = oracle::random_group(rng, 64);
    for (Int p : {2, 3, 5, 7, 13}) {
      const auto hist = oracle::order_histogram(a.factors());
      Int tame = 0, wild = 0;
      const Int tm = p == 2 ? 2 : p - 1;
      for (auto [ord, cnt] : hist) {
        if (tm % ord == 0)
          tame += cnt;
        Int q = ord;
        while (q % p == 0)
          q /= p;
        if (q == 1)
          wild += cnt;
      }
      EXPECT_EQ(static_cast<Int>(local_char_space(p, a).size()), tame * wild);
    }
  }
}

TEST(Conductor, Examples) {
  const auto a = G({2});
  const Character triv{a, {0}}, chi{a, {1}};
  const LocalChar qi{2, E({1}), E({0})}, q2{2, E({0}), E({1})};
  EXPECT_EQ(conductor_exponent(triv, qi), 0);
  EXPECT_EQ(conductor_exponent(chi, qi), 2);
  EXPECT_EQ(conductor_exponent(chi, q2), 3);
  EXPECT_EQ(conductor(make_global_char(a, {qi})), 4);
  EXPECT_EQ(conductor(make_global_char(a, {q2})), 8);
}

TEST(Conductor, MatchesUnitFiltrationBruteForce) {
  for (const auto &f : std::vector<std::vector<Int>>{{2, 4}, {3, 9}, {4, 8}, {6}, {2, 2, 2}, {27}})
    for (Int p : {2, 3, 5, 7}) {
      const auto a = G(f);
      for (const auto &psi : local_char_space(p, a))
        for (const auto &chi : all_characters(a))
          ASSERT_EQ(conductor_exponent(chi, psi),
                    conductor_exponent_bruteforce(a, chi, psi))
              << a << " p=" << p;
    }
}

TEST(Discriminant, ClosedFormMatchesCharacterSum) {
  for (const auto &f : std::vector<std::vector<Int>>{{2, 4}, {3, 9}, {4, 8}, {2, 2, 2}, {16}, {3, 3}, {5}})
    for (Int p : {2, 3, 5, 7, 11, 13}) {
      const auto a = G(f);
      const auto chars = all_characters(a);
      for (const auto &psi : local_char_space(p, a)) {
        Int sum = 0;
        for (const auto &chi : chars)
          sum += conductor_exponent(chi, psi);
        ASSERT_EQ(local_disc_exponent(a, psi), sum);
      }
    }
}

TEST(Discriminant, Examples) {
  EXPECT_EQ(discriminant(biquadratic_13_17()), 48841);
  EXPECT_EQ(conductor(biquadratic_13_17()), 221);
  for (auto [ell, p] : std::vector<std::pair<Int, Int>>{{2, 3}, {3, 7}, {5, 11}, {7, 29}}) {
    const auto a = G({ell});
    const auto phi = make_global_char(a, {LocalChar{p, E({1}), E({0})}});
    EXPECT_EQ(discriminant(phi), checked_pow(static_cast<UInt128>(p), ell - 1));
    EXPECT_EQ(local_disc_exponent(a, phi.locals.at(p)), a.order() * (ell - 1) / ell);
  }
  const auto trivial = make_global_char(G({2, 2}), {});
  EXPECT_EQ(discriminant(trivial), 1);
  EXPECT_FALSE(is_surjective(trivial));
}

TEST(Frobenius, Examples) {
  const auto a = G({2});
  const auto phi = make_global_char(a, {LocalChar{13, E({1}), E({0})}});
  EXPECT_EQ(frobenius(phi, 2), E({1}));
  EXPECT_EQ(frobenius(phi, 17), E({0}));
  EXPECT_EQ(frobenius(phi, 13), E({0}));
}

TEST(Frobenius, QuadraticSplittingLaw) {
  // p splits in Q(sqrt D) iff (D/p) = 1
  const auto ds = oracle::fundamental_discriminants(200);
  SearchOptions o = disc_opts(200);
  o.include_etale = false;
  const auto recs = enumerate_extensions(G({2}), o);
  ASSERT_EQ(recs.size(), ds.size());
  for (const auto &r : recs) {
    const Int d = signed_disc(r);
    for (Int p : primes_up_to(100)) {
      if (d % p == 0)
        continue;
      const Element f = frobenius(r.global, p);
      EXPECT_EQ(f.is_zero(), oracle::kronecker(d, p) == 1) << d << " " << p;
    }
  }
}

TEST(Decomposition, Examples) {
  const auto a = G({2, 2});
  const auto phi = biquadratic_13_17();
  EXPECT_EQ(decomposition_group(phi, 13).order(), 2);
  EXPECT_EQ(decomposition_group(phi, 13), inertia_group(phi, 13));
  for (Int p : {3, 5, 7, 19, 23}) {
    const Subgroup d = decomposition_group(phi, p);
    EXPECT_EQ(d, subgroup_from_generators(a, {frobenius(phi, p)}));
    EXPECT_LE(d.generators().size(), 1u);
  }
  const Subgroup j = join(subgroup_from_generators(a, {E({1, 0})}), E({0, 1}));
  EXPECT_TRUE(j.is_full());
}

TEST(Record, BiquadraticFailure) {
  const auto rec = make_record(biquadratic_13_17());
  EXPECT_EQ(rec.discriminant, 48841);
  EXPECT_FALSE(rec.hnp);
  EXPECT_FALSE(hnp_verdict(rec));
  EXPECT_TRUE(rec.infinite_place.is_zero());
  ASSERT_EQ(rec.ramified.size(), 2u);
  EXPECT_EQ(rec.ramified[0].disc_exponent, 2);
  EXPECT_EQ(rec.ramified[0].frobenius, E({0, 0}));
}

TEST(Record, CyclicAlwaysHolds) {
  const auto recs = enumerate_extensions(G({4}), disc_opts(100000));
  ASSERT_FALSE(recs.empty());
  for (const auto &r : recs)
    EXPECT_TRUE(r.hnp && hnp_verdict(r));
}

TEST(Record, FullDecompositionGroupHolds) {
  const auto recs = enumerate_extensions(G({2, 2}), disc_opts(200000));
  int full = 0;
  for (const auto &r : recs)
    for (const auto &p : r.ramified)
      if (p.decomposition.is_full()) {
        ++full;
        EXPECT_TRUE(r.hnp);
      }
  EXPECT_GT(full, 0);
}

// ----------------------------------------------------------- enumeration

TEST(Enumerate, QuadraticUpToTen) {
  const auto recs = enumerate_extensions(G({2}), disc_opts(10));
  std::vector<Int> got;
  for (const auto &r : recs)
    got.push_back(signed_disc(r));
  std::sort(got.begin(), got.end());
  EXPECT_EQ(got, (std::vector<Int>{-8, -7, -4, -3, 5, 8}));
}

TEST(Enumerate, CyclicCubic) {
  // the smallest cyclic cubic field has conductor 7 and discriminant 49
  EXPECT_TRUE(enumerate_extensions(G({3}), disc_opts(48)).empty());
  const auto r80 = enumerate_extensions(G({3}), disc_opts(80));
  ASSERT_EQ(r80.size(), 2u);
  EXPECT_EQ(r80[0].discriminant, 49);
  EXPECT_EQ(r80[0].conductor, 7);
  const auto r81 = enumerate_extensions(G({3}), disc_opts(81));
  ASSERT_EQ(r81.size(), 4u);
  EXPECT_EQ(r81[2].discriminant, 81);
  EXPECT_EQ(r81[2].conductor, 9);
}

TEST(Enumerate, CyclicCubicConductorOracle) {
  // conductors 9^a * p_1 ... p_k with p_i = 1 mod 3, each carrying 2^(k+a)
  // surjections onto Z/3, discriminant f^2
  const Int fmax = 10000;
  std::multiset<Int> expect;
  for (Int f = 2; f <= fmax; ++f) {
    Int m = f, w = 0;
    if (m % 9 == 0) {
      m /= 9;
      ++w;
    }
    bool ok = m % 3 != 0;
    for (Int p : oracle::prime_divisors(m)) {
      ok = ok && p % 3 == 1 && (m / p) % p != 0;
      ++w;
    }
    if (ok)
      for (Int k = 0; k < (Int{1} << w); ++k)
        expect.insert(f * f);
  }
  std::multiset<Int> got;
  for (const auto &r : enumerate_extensions(G({3}), disc_opts(fmax * fmax)))
    got.insert(static_cast<Int>(r.discriminant));
  EXPECT_EQ(got, expect);
}

TEST(Enumerate, BiquadraticContainsClassicalExample) {
  const auto recs = enumerate_extensions(G({2, 2}), disc_opts(48841));
  bool found = false;
  for (const auto &r : recs)
    if (r.discriminant == 48841 && r.global.locals.count(13) &&
        r.global.locals.count(17) && r.global.locals.size() == 2) {
      found = true;
      EXPECT_FALSE(r.hnp);
    }
  EXPECT_TRUE(found);
}

TEST(Enumerate, KummerOracleUpTo1e5) {
  const Int x = 100000;
  auto expect = oracle::fundamental_discriminants(x);
  std::sort(expect.begin(), expect.end());
  const auto recs = enumerate_extensions(G({2}), disc_opts(x, 3));
  std::vector<Int> got;
  for (const auto &r : recs)
    got.push_back(signed_disc(r));
  std::sort(got.begin(), got.end());
  EXPECT_EQ(got, expect);
}

TEST(Enumerate, BiquadraticOracle) {
  const Int x = 300000;
  std::multiset<std::pair<Int, bool>> expect, got;
  for (const auto &b : oracle::biquadratic_oracle(x))
    expect.insert({b.disc, b.hnp});
  for (const auto &r : enumerate_extensions(G({2, 2}), disc_opts(x)))
    got.insert({static_cast<Int>(r.discriminant), r.hnp});
  EXPECT_EQ(got, expect);
}

TEST(Enumerate, SortedAndUnique) {
  const auto recs = enumerate_extensions(G({2, 4}), disc_opts(UInt128{10'000'000}));
  ASSERT_GT(recs.size(), 10u);
  for (std::size_t i = 1; i < recs.size(); ++i)
    EXPECT_TRUE(record_less(recs[i - 1], recs[i]));
}

TEST(Enumerate, EtaleIncludesSubextensions) {
  SearchOptions o = disc_opts(2000);
  o.include_etale = true;
  const auto all = enumerate_extensions(G({2, 2}), o);
  const auto surj = enumerate_extensions(G({2, 2}), disc_opts(2000));
  EXPECT_GT(all.size(), surj.size());
  EXPECT_EQ(all.front().discriminant, 1);
  for (const auto &r : all)
    EXPECT_EQ(r.surjective, is_surjective(r.global));
}

TEST(Enumerate, PartialResultCarriesPrefix) {
  const auto full = enumerate_extensions(G({2}), disc_opts(1000));
  try {
    enumerate_extensions(G({2}), disc_opts(1000, 2), 50);
    FAIL() << "expected PartialResult";
  } catch (const PartialResult &e) {
    ASSERT_LE(e.prefix.size(), 50u);
    ASSERT_GT(e.prefix.size(), 40u);
    for (std::size_t i = 0; i < e.prefix.size(); ++i) {
      EXPECT_EQ(e.prefix[i].global.locals, full[i].global.locals);
      EXPECT_LT(e.prefix[i].discriminant, e.complete_below);
    }
    EXPECT_EQ(full[e.prefix.size()].discriminant, e.complete_below);
  }
}

TEST(Enumerate, ResourceCap) {
  EXPECT_THROW(enumerate_extensions(G({2}), disc_opts(UInt128{1} << 40)), ResourceError);
}

TEST(Counts, MatchEnumeration) {
  const std::vector<UInt128> grid{100, 1000, 10000, 100000};
  const auto counts = count_extensions(G({2, 2}), grid, disc_opts(1, 2));
  for (std::size_t i = 0; i < grid.size(); ++i)
    EXPECT_EQ(counts[i], static_cast<Int>(enumerate_extensions(G({2, 2}), disc_opts(grid[i])).size()));
  EXPECT_THROW(count_extensions(G({2}), {10, 5}, disc_opts(1)), InvalidInput);
}

// ------------------------------------------------------------ properties

namespace {

const std::vector<std::vector<Int>> kGroups{{2}, {3}, {4}, {2, 2}, {2, 4}, {3, 3}, {2, 2, 2}, {6}, {5}};

UInt128 bound_for(const FinAbGroup &a) {
  switch (a.order()) {
  case 2: return 20000;
  case 3: return 1'000'000;
  case 4: return 2'000'000;
  case 5: return UInt128{10'000'000'000};
  case 6: return UInt128{100'000'000};
  case 8: return UInt128{10'000'000'000};
  default: return UInt128{1'000'000'000'000};
  }
}

} // namespace

TEST(QfieldsProperty, FastRecordsMatchGeneralPath) {
  for (const auto &f : kGroups) {
    const auto a = G(f);
    SearchOptions o = disc_opts(bound_for(a));
    o.include_etale = true;
    const auto recs = enumerate_extensions(a, o);
    ASSERT_FALSE(recs.empty()) << a;
    for (const auto &r : recs) {
      const auto slow = make_record(r.global);
      ASSERT_EQ(slow.discriminant, r.discriminant) << a;
      ASSERT_EQ(slow.conductor, r.conductor);
      ASSERT_EQ(slow.hnp, r.hnp);
      ASSERT_EQ(slow.infinite_place, r.infinite_place);
      ASSERT_EQ(slow.surjective, r.surjective);
      ASSERT_EQ(slow.ramified.size(), r.ramified.size());
      for (std::size_t i = 0; i < r.ramified.size(); ++i) {
        ASSERT_EQ(slow.ramified[i].frobenius, r.ramified[i].frobenius);
        ASSERT_EQ(slow.ramified[i].decomposition, r.ramified[i].decomposition);
        ASSERT_EQ(slow.ramified[i].disc_exponent, r.ramified[i].disc_exponent);
      }
    }
  }
}

TEST(QfieldsProperty, SurjectivityMatchesBruteForceImage) {
  for (const auto &f : kGroups) {
    const auto a = G(f);
    SearchOptions o = disc_opts(bound_for(a));
    o.include_etale = true;
    for (const auto &r : enumerate_extensions(a, o)) {
      std::vector<oracle::Tuple> gens;
      for (const auto &[p, psi] : r.global.locals) {
        gens.push_back(psi.tame.coords);
        gens.push_back(psi.wild.coords);
      }
      const bool full = static_cast<Int>(oracle::closure(a.factors(), gens).size()) == a.order();
      ASSERT_EQ(full, r.surjective) << a;
    }
  }
}

TEST(QfieldsProperty, MinimalTameExponent) {
  for (const auto &f : kGroups) {
    const auto a = G(f);
    const Int ell = smallest_prime_divisor(a);
    const Int floor = a.order() * (ell - 1) / ell;
    for (const auto &r : enumerate_extensions(a, disc_opts(bound_for(a))))
      for (const auto &pl : r.ramified) {
        if (pl.local.p == 2 || a.order() % pl.local.p == 0)
          continue;
        EXPECT_GE(pl.disc_exponent, floor);
        EXPECT_EQ(pl.disc_exponent == floor, pl.inertia.order() == ell);
      }
  }
}

TEST(QfieldsProperty, TameDecompositionGroupsLieInFamilyC) {
  const std::vector<std::pair<std::vector<Int>, const char *>> cases{
      {{2, 4}, "1e12"}, {{4, 4}, "1e28"}, {{2, 2}, "1e6"}, {{2, 8}, "1e24"}, {{3, 3}, "1e14"}};
  for (const auto &[f, x] : cases) {
    const auto a = G(f);
    const Int ell = smallest_prime_divisor(a);
    const auto c = enumerate_family_C(a, ell);
    const Quotient q = quotient_map(a, torsion(a, ell));
    const UInt128 bound = parse_u128(x);
    int checked = 0;
    SearchOptions o = disc_opts(bound, 4);
    for (const auto &r : enumerate_extensions(a, o)) {
      const UInt128 base_cond = conductor(push_forward(r.global, q.projection));
      for (const auto &pl : r.ramified) {
        const Int p = pl.local.p;
        if ((2 * a.order()) % p == 0 || base_cond % static_cast<UInt128>(p) == 0)
          continue;
        ++checked;
        EXPECT_TRUE(std::binary_search(c.members.begin(), c.members.end(), pl.decomposition))
            << a << " p=" << p;
      }
    }
    EXPECT_GT(checked, 0) << a;
  }
}

TEST(QfieldsProperty, Multiplicativity) {
  for (const auto &f : kGroups) {
    const auto a = G(f);
    for (const auto &r : enumerate_extensions(a, disc_opts(bound_for(a)))) {
      UInt128 d = 1;
      for (const auto &pl : r.ramified)
        d *= checked_pow(static_cast<UInt128>(pl.local.p), pl.disc_exponent);
      ASSERT_EQ(d, r.discriminant);
      ASSERT_EQ(r.discriminant % r.conductor, 0u);
    }
  }
}

TEST(QfieldsProperty, DeterministicAcrossJobs) {
  for (const auto &f : std::vector<std::vector<Int>>{{2, 2}, {2, 4}, {3}}) {
    const auto a = G(f);
    const auto one = enumerate_extensions(a, disc_opts(bound_for(a), 1));
    const auto again = enumerate_extensions(a, disc_opts(bound_for(a), 1));
    const auto many = enumerate_extensions(a, disc_opts(bound_for(a), 6));
    ASSERT_EQ(one.size(), many.size());
    for (std::size_t i = 0; i < one.size(); ++i) {
      EXPECT_EQ(one[i].global.locals, again[i].global.locals);
      EXPECT_EQ(one[i].global.locals, many[i].global.locals);
    }
  }
}

TEST(QfieldsProperty, HnpVerdictIgnoresCyclicPlaces) {
  // adding unramified and archimedean decomposition groups leaves the verdict alone
  const auto a = G({2, 2});
  for (const auto &r : enumerate_extensions(a, disc_opts(100000))) {
    std::vector<Subgroup> decomp;
    for (const auto &pl : r.ramified)
      decomp.push_back(pl.decomposition);
    for (Int p : {3, 5, 7, 11})
      if (!r.global.locals.count(p))
        decomp.push_back(decomposition_group(r.global, p));
    decomp.push_back(subgroup_from_generators(a, {r.infinite_place}));
    EXPECT_EQ(hnp_holds(a, make_family(a, decomp)), r.hnp);
  }
}

// ------------------------------------------------------------- Wright

TEST(Wright, Exponents) {
  const auto w2 = wright_exponents(G({2}));
  EXPECT_EQ(w2.power, boost::rational<Int>(1));
  EXPECT_EQ(w2.logpower, boost::rational<Int>(0));
  const auto w22 = wright_exponents(G({2, 2}));
  EXPECT_EQ(w22.power, boost::rational<Int>(1, 2));
  EXPECT_EQ(w22.logpower, boost::rational<Int>(2));
  const auto w3 = wright_exponents(G({3}));
  EXPECT_EQ(w3.power, boost::rational<Int>(1, 2));
  EXPECT_EQ(w3.logpower, boost::rational<Int>(0));
}

TEST(Wright, FitRecoversSyntheticCurve) {
  std::vector<std::pair<double, double>> pts;
  for (double x : {1e4, 1e5, 1e6, 1e7})
    pts.push_back({x, 0.3 * std::sqrt(x) * std::pow(std::log(x), 2)});
  const auto fit = wright_fit(G({2, 2}), pts);
  EXPECT_NEAR(fit.power, 0.5, 1e-9);
  EXPECT_NEAR(fit.constant, 0.3, 1e-6);
}

TEST(Wright, Errors) {
  EXPECT_THROW(wright_fit(G({2}), {{10, 1}, {100, 5}}), InvalidInput);
  EXPECT_THROW(wright_fit(G({2}), {{10, 1}, {100, 5}, {50, 9}}), InvalidInput);
  EXPECT_THROW(wright_fit(G({2}), {{10, 0}, {100, 5}, {500, 9}}), InvalidInput);
}

TEST(Wright, QuadraticCountsNearPowerOne) {
  const std::vector<UInt128> grid{10000, 100000, 1000000};
  const auto n = count_extensions(G({2}), grid, disc_opts(1, 4));
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < grid.size(); ++i)
    pts.push_back({static_cast<double>(grid[i]), static_cast<double>(n[i])});
  EXPECT_NEAR(wright_fit(G({2}), pts).power, 1.0, 0.05);
}

// ------------------------------------------------------------- parsing

TEST(U128, ParseAndPrint) {
  EXPECT_EQ(parse_u128("48841"), 48841);
  EXPECT_EQ(u128_to_string(parse_u128("1e30")), "1000000000000000000000000000000");
  EXPECT_EQ(u128_to_string(parse_u128("25e2")), "2500");
  EXPECT_THROW(parse_u128("-3"), InvalidInput);
  EXPECT_THROW(parse_u128("1e50"), InvalidInput);
  EXPECT_THROW(parse_u128(""), InvalidInput);
}
