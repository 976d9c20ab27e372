#include "hnp/criterion.hpp"

#include "hnp/arith.hpp"
#include "hnp/errors.hpp"
#include "hnp/group_tables.hpp"

#include <algorithm>
#include <set>
#include <unordered_set>

namespace hnp {

DecompFamily make_family(const FinAbGroup &ambient,
                         std::vector<Subgroup> groups) {
  for (const auto &h : groups)
    if (h.ambient() != ambient)
      throw InvalidInput("decomposition group is not a subgroup of " +
                         ambient.to_string());
  return DecompFamily{ambient, std::move(groups)};
}

bool hnp_holds(const FinAbGroup &a, const DecompFamily &d) {
  if (is_cyclic(a))
    return true;
  return wedge_image_join(a, d.groups).is_full();
}

// ------------------------------------------------------- pairing oracle

namespace {

// Closure of a generating set by repeated addition.
std::vector<Element> closure(const FinAbGroup &a,
                             const std::vector<Element> &gens) {
  std::set<Element> seen{zero_element(a)};
  std::vector<Element> frontier{zero_element(a)};
  while (!frontier.empty()) {
    std::vector<Element> next;
    for (const auto &x : frontier)
      for (const auto &g : gens) {
        Element y = add(a, x, g);
        if (seen.insert(y).second)
          next.push_back(std::move(y));
      }
    frontier = std::move(next);
  }
  return {seen.begin(), seen.end()};
}

std::vector<Element> greedy_generators(const FinAbGroup &a,
                                       const std::vector<Element> &elems) {
  std::vector<Element> gens;
  std::set<Element> span{zero_element(a)};
  for (const auto &x : elems) {
    if (span.count(x))
      continue;
    gens.push_back(x);
    const auto c = closure(a, gens);
    span = std::set<Element>(c.begin(), c.end());
  }
  return gens;
}

} // namespace

bool hnp_oracle_bruteforce(const FinAbGroup &a, const DecompFamily &d,
                           Int max_order) {
  if (a.order() > max_order)
    throw ResourceError("oracle bound exceeded: |A| = " +
                        std::to_string(a.order()));
  const WedgeSquare w = wedge_square(a);
  const Int pairings = w.structure.order();
  if (pairings > (Int{1} << 24))
    throw ResourceError("oracle bound exceeded: too many pairings");
  if (pairings == 1)
    return true;

  std::vector<std::vector<Element>> gens;
  for (const auto &h : d.groups) {
    auto g = greedy_generators(a, closure(a, h.generators()));
    if (g.size() >= 2)
      gens.push_back(std::move(g));
  }

  const std::size_t n = a.rank();
  const Int e = a.exponent();
  std::vector<Int> coeffs(w.pairs.size(), 0);
  std::vector<Int> table(n * n);
  for (Int count = 1; count < pairings; ++count) {
    // next coefficient vector in mixed radix
    for (std::size_t k = coeffs.size(); k-- > 0;) {
      if (++coeffs[k] < w.structure.factor(k))
        break;
      coeffs[k] = 0;
    }
    // b(e_i, e_j) in units of 1/e, full antisymmetric table
    std::fill(table.begin(), table.end(), 0);
    for (std::size_t k = 0; k < w.pairs.size(); ++k) {
      const auto [i, j] = w.pairs[k];
      const Int v = coeffs[k] * (e / a.factor(i)) % e;
      table[i * n + j] = v;
      table[j * n + i] = (e - v) % e;
    }
    bool vanishes = true;
    for (const auto &g : gens) {
      for (std::size_t s = 0; s < g.size() && vanishes; ++s)
        for (std::size_t t = s + 1; t < g.size() && vanishes; ++t) {
          Int acc = 0;
          for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
              acc = (acc + mul_mod(mul_mod(g[s][i], g[t][j], e),
                                   table[i * n + j], e)) %
                    e;
          vanishes = acc == 0;
        }
      if (!vanishes)
        break;
    }
    if (vanishes)
      return false; // a non-zero pairing in the kernel
  }
  return true;
}

// ------------------------------------------------------------ family C

FamilyC enumerate_family_C(const FinAbGroup &a, Int ell, SmallGenerator rule) {
  if (a.is_trivial() || a.order() % ell != 0)
    throw InvalidInput("family C: " + std::to_string(ell) +
                       " does not divide |A|");
  if (smallest_prime_divisor(a) != ell)
    throw InvalidInput("family C: " + std::to_string(ell) +
                       " is not the smallest prime divisor of |A|");
  const auto elems = all_elements(a);
  const Subgroup tors = torsion(a, ell);
  std::vector<Element> small;
  for (const auto &b : elems)
    if (tors.contains(b) &&
        (rule == SmallGenerator::OrderDividesEll || !b.is_zero()))
      small.push_back(b);

  std::unordered_set<Subgroup> seen;
  const Subgroup zero = trivial_subgroup(a);
  for (const auto &x : elems) {
    const Subgroup cx = join(zero, x);
    for (const auto &b : small)
      seen.insert(join(cx, b));
  }
  FamilyC c{a, ell, {seen.begin(), seen.end()}};
  std::sort(c.members.begin(), c.members.end());
  return c;
}

bool local_map_injective(const FinAbGroup &a, const DecompFamily &fixed,
                         Int ell) {
  if (is_cyclic(a))
    return true;
  const FamilyC c = enumerate_family_C(a, ell);
  std::vector<Subgroup> all = fixed.groups;
  all.insert(all.end(), c.members.begin(), c.members.end());
  return wedge_image_join(a, all).is_full();
}

int zero_one_verdict(const FinAbGroup &a, Int ell, const DecompFamily &fixed) {
  return local_map_injective(a, fixed, ell) ? 1 : 0;
}

// --------------------------------------------------------- classifier

const char *to_string(LimitTag tag) {
  return tag == LimitTag::One ? "One" : "OpenInterval";
}

LimitVerdict classify_limit(const FinAbGroup &a) {
  if (a.is_trivial())
    throw InvalidInput("classify_limit: A must be non-trivial");
  const Int ell = smallest_prime_divisor(a);
  const Quotient q = quotient_map(a, torsion(a, ell));
  return LimitVerdict{is_cyclic(q.group) ? LimitTag::One
                                         : LimitTag::OpenInterval,
                      ell, q.group};
}

bool verify_claim_twogen(const FinAbGroup &a) {
  const LimitVerdict v = classify_limit(a);
  if (v.tag != LimitTag::One)
    throw PreconditionError("verify_claim_twogen: A/A[ell] is not cyclic");
  const FamilyC c = enumerate_family_C(a, v.ell);
  const GroupTables t(a);
  std::vector<char> in_c(static_cast<std::size_t>(t.subgroup_count()), 0);
  for (const auto &h : c.members)
    in_c[static_cast<std::size_t>(t.subgroup_id(h))] = 1;
  for (int x = 0; x < t.size(); ++x) {
    const int cx = t.join_element(t.trivial_id(), x);
    for (int y = x; y < t.size(); ++y)
      if (!in_c[static_cast<std::size_t>(t.join_element(cx, y))])
        return false;
  }
  return true;
}

AltPairing construct_killing_pairing(const FinAbGroup &a) {
  const LimitVerdict v = classify_limit(a);
  if (v.tag != LimitTag::OpenInterval)
    throw PreconditionError(
        "construct_killing_pairing: A/A[ell] is cyclic, no such pairing");
  const Quotient q = quotient_map(a, torsion(a, v.ell));
  std::vector<QZ> values(wedge_square(q.group).pairs.size());
  values[0] = QZ::make(1, q.group.factor(0)); // f(e_1, e_2) = 1/e_1
  return pullback_pairing(AltPairing(q.group, values), q.projection);
}

// ------------------------------------------------ groups and subgroups

namespace {

void partitions(int n, int max_part, std::vector<int> &cur,
                std::vector<std::vector<int>> &out) {
  if (n == 0) {
    out.push_back(cur);
    return;
  }
  for (int k = std::min(n, max_part); k >= 1; --k) {
    cur.push_back(k);
    partitions(n - k, k, cur, out);
    cur.pop_back();
  }
}

} // namespace

std::vector<FinAbGroup> abelian_groups_of_order(Int n) {
  if (n < 1)
    throw InvalidInput("group order must be positive");
  std::vector<std::vector<Int>> lists{{}};
  for (auto [p, e] : factorize(n)) {
    std::vector<std::vector<int>> parts;
    std::vector<int> cur;
    partitions(e, e, cur, parts);
    std::vector<std::vector<Int>> next;
    for (const auto &l : lists)
      for (const auto &part : parts) {
        auto m = l;
        for (int k : part)
          m.push_back(ipow(p, static_cast<unsigned>(k)));
        next.push_back(std::move(m));
      }
    lists = std::move(next);
  }
  std::vector<FinAbGroup> out;
  for (const auto &l : lists)
    out.push_back(canonicalize(l));
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Subgroup> all_subgroups(const FinAbGroup &a) {
  const GroupTables t(a);
  std::vector<Subgroup> out;
  for (int i = 0; i < t.subgroup_count(); ++i)
    out.push_back(t.subgroup(i));
  std::sort(out.begin(), out.end());
  return out;
}

// ----------------------------------------------------- structural report

bool GroupCheck::passed() const {
  return consistency && twogen_claim.value_or(true) &&
         killing_pairing.value_or(true);
}

bool StructureReport::all_passed() const {
  return !truncated && std::all_of(groups.begin(), groups.end(),
                                   [](const auto &g) { return g.passed(); });
}

StructureReport verify_structure(Int bound, Int max_bound) {
  StructureReport report;
  report.bound = bound;
  report.checked_up_to = std::min(bound, max_bound);
  report.truncated = bound > max_bound;
  for (Int n = 2; n <= report.checked_up_to; ++n)
    for (const auto &a : abelian_groups_of_order(n)) {
      GroupCheck check;
      check.group = a;
      const LimitVerdict v = classify_limit(a);
      check.ell = v.ell;
      check.quotient = v.quotient;
      check.tag = v.tag;
      if (v.tag == LimitTag::One) {
        check.twogen_claim = verify_claim_twogen(a);
      } else {
        const AltPairing f = construct_killing_pairing(a);
        bool ok = !f.is_zero();
        for (const auto &h : enumerate_family_C(a, v.ell).members) {
          const auto gens = h.generators();
          for (std::size_t s = 0; s < gens.size() && ok; ++s)
            for (std::size_t t = s + 1; t < gens.size() && ok; ++t)
              ok = f.evaluate(gens[s], gens[t]).is_zero();
        }
        check.killing_pairing = ok;
      }
      const bool injective = local_map_injective(a, DecompFamily{a, {}}, v.ell);
      check.consistency = injective == (v.tag == LimitTag::One);
      report.groups.push_back(std::move(check));
    }
  return report;
}

} // namespace hnp
