#include "hnp/qfields.hpp"

#include "hnp/arith.hpp"
#include "hnp/criterion.hpp"
#include "hnp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

namespace hnp {

// ------------------------------------------------------------ 128-bit ints

std::string u128_to_string(UInt128 x) {
  if (x == 0)
    return "0";
  std::string s;
  while (x > 0) {
    s.push_back(static_cast<char>('0' + static_cast<int>(x % 10)));
    x /= 10;
  }
  std::reverse(s.begin(), s.end());
  return s;
}

UInt128 checked_mul(UInt128 a, UInt128 b) {
  if (a != 0 && b > std::numeric_limits<UInt128>::max() / a)
    throw ResourceError("integer overflow beyond 128 bits");
  return a * b;
}

UInt128 checked_pow(UInt128 base, Int exp) {
  UInt128 r = 1;
  for (Int i = 0; i < exp; ++i)
    r = checked_mul(r, base);
  return r;
}

UInt128 parse_u128(const std::string &s) {
  const auto bad = [&] { return InvalidInput("not a positive integer: '" + s + "'"); };
  if (s.empty())
    throw bad();
  const auto e = s.find_first_of("eE");
  const std::string mant = e == std::string::npos ? s : s.substr(0, e);
  if (mant.empty() || !std::all_of(mant.begin(), mant.end(),
                                   [](char c) { return c >= '0' && c <= '9'; }))
    throw bad();
  UInt128 v = 0;
  try {
    for (char c : mant)
      v = checked_mul(v, 10) + static_cast<unsigned>(c - '0');
    if (e != std::string::npos) {
      const std::string ex = s.substr(e + 1);
      if (ex.empty() || ex.size() > 2 ||
          !std::all_of(ex.begin(), ex.end(),
                       [](char c) { return c >= '0' && c <= '9'; }))
        throw bad();
      v = checked_mul(v, checked_pow(10, std::stoi(ex)));
    }
  } catch (const ResourceError &) {
    throw bad();
  }
  return v;
}

// --------------------------------------------------------- local chars

namespace {

std::vector<Element> killed_by(const FinAbGroup &a, Int m) {
  std::vector<Element> out;
  for (auto &x : all_elements(a))
    if (scale(a, m, x).is_zero())
      out.push_back(std::move(x));
  return out;
}

Int tame_modulus(Int p, const FinAbGroup &a) {
  return p == 2 ? 2 : std::gcd(p - 1, a.exponent());
}

Int p_part(Int n, Int p) {
  Int r = 1;
  while (n % p == 0) {
    n /= p;
    r *= p;
  }
  return r;
}

} // namespace

std::vector<LocalChar> local_char_space(Int p, const FinAbGroup &a) {
  if (!is_prime(p))
    throw InvalidInput("local_char_space: " + std::to_string(p) +
                       " is not prime");
  const auto tames = killed_by(a, tame_modulus(p, a));
  const auto wilds = killed_by(a, p_part(a.exponent(), p));
  std::vector<LocalChar> out;
  out.reserve(tames.size() * wilds.size());
  for (const auto &t : tames)
    for (const auto &w : wilds)
      out.push_back(LocalChar{p, t, w});
  return out;
}

void validate_local_char(const FinAbGroup &a, const LocalChar &psi) {
  if (!is_prime(psi.p))
    throw InvalidInput("local character at non-prime " + std::to_string(psi.p));
  const auto check = [&](const Element &x, const char *what) {
    if (x.size() != a.rank())
      throw InvalidInput(std::string(what) + " image has the wrong length");
    for (std::size_t i = 0; i < x.size(); ++i)
      if (x[i] < 0 || x[i] >= a.factor(i))
        throw InvalidInput(std::string(what) + " image is not reduced");
  };
  check(psi.tame, "tame");
  check(psi.wild, "wild");
  if (!scale(a, tame_modulus(psi.p, a), psi.tame).is_zero())
    throw InvalidInput("tame image at " + std::to_string(psi.p) +
                       " is not killed by " +
                       std::to_string(tame_modulus(psi.p, a)));
  if (!scale(a, p_part(a.exponent(), psi.p), psi.wild).is_zero())
    throw InvalidInput("wild image at " + std::to_string(psi.p) +
                       " is not in the p-primary part");
}

Element evaluate_local(const FinAbGroup &a, const LocalChar &psi, Int x) {
  const Int p = psi.p;
  if (mod_floor<Int>(x, p) == 0)
    throw InvalidInput("evaluate_local: argument not prime to p");
  Element out = zero_element(a);
  if (!psi.tame.is_zero()) {
    const Int n = element_order(a, psi.tame);
    out = scale(a, tame_log_mod(p, mod_floor<Int>(x, p == 2 ? 4 : p), n),
                psi.tame);
  }
  if (!psi.wild.is_zero()) {
    const int m = valuation(element_order(a, psi.wild), p);
    const int e = p == 2 ? m + 2 : m + 1;
    const Int b = wild_log(p, e, mod_floor<Int>(x, ipow(p, static_cast<unsigned>(e))));
    out = add(a, out, scale(a, b, psi.wild));
  }
  return out;
}

// -------------------------------------------------------- global chars

GlobalChar make_global_char(const FinAbGroup &a,
                            const std::vector<LocalChar> &locals) {
  GlobalChar phi{a, {}};
  std::set<Int> seen;
  for (const auto &psi : locals) {
    validate_local_char(a, psi);
    if (!seen.insert(psi.p).second)
      throw InvalidInput("duplicate local character at " +
                         std::to_string(psi.p));
    if (psi.is_ramified())
      phi.locals.emplace(psi.p, psi);
  }
  return phi;
}

QZ Character::operator()(const Element &x) const {
  const Int e = group.exponent();
  Int num = 0;
  for (std::size_t i = 0; i < coeffs.size(); ++i)
    num = (num + mul_mod(coeffs[i] * (e / group.factor(i)) % e, x[i], e)) % e;
  return QZ::make(num, e);
}

std::vector<Character> all_characters(const FinAbGroup &a) {
  std::vector<Character> out;
  for (auto &c : all_elements(a))
    out.push_back(Character{a, std::move(c.coords)});
  return out;
}

Int conductor_exponent(const Character &chi, const LocalChar &psi) {
  const QZ w = chi(psi.wild);
  const Int base = psi.p == 2 ? 2 : 1;
  if (!w.is_zero())
    return valuation(w.order(), psi.p) + base;
  return chi(psi.tame).is_zero() ? 0 : base;
}

Int local_conductor_exponent(const FinAbGroup &a, const LocalChar &psi) {
  const Int base = psi.p == 2 ? 2 : 1;
  if (!psi.wild.is_zero())
    return valuation(element_order(a, psi.wild), psi.p) + base;
  return psi.tame.is_zero() ? 0 : base;
}

Int local_disc_exponent(const FinAbGroup &a, const LocalChar &psi) {
  if (!psi.is_ramified())
    return 0;
  const Int n = a.order();
  const Subgroup inertia =
      subgroup_from_generators(a, {psi.tame, psi.wild});
  Int e = (psi.p == 2 ? 2 : 1) * (n - n / inertia.order());
  for (Element y = psi.wild; !y.is_zero(); y = scale(a, psi.p, y))
    e += n - n / element_order(a, y);
  return e;
}

UInt128 discriminant(const GlobalChar &phi) {
  const auto chars = all_characters(phi.group);
  UInt128 d = 1;
  for (const auto &[p, psi] : phi.locals) {
    Int e = 0;
    for (const auto &chi : chars)
      e += conductor_exponent(chi, psi);
    d = checked_mul(d, checked_pow(static_cast<UInt128>(p), e));
  }
  return d;
}

UInt128 conductor(const GlobalChar &phi) {
  UInt128 f = 1;
  for (const auto &[p, psi] : phi.locals)
    f = checked_mul(f, checked_pow(static_cast<UInt128>(p),
                                   local_conductor_exponent(phi.group, psi)));
  return f;
}

Element frobenius(const GlobalChar &phi, Int p) {
  Element out = zero_element(phi.group);
  for (const auto &[q, psi] : phi.locals)
    if (q != p)
      out = add(phi.group, out, evaluate_local(phi.group, psi, p));
  return out;
}

Element complex_conjugation(const GlobalChar &phi) {
  Element out = zero_element(phi.group);
  for (const auto &[q, psi] : phi.locals)
    out = add(phi.group, out, evaluate_local(phi.group, psi, -1));
  return out;
}

Subgroup inertia_group(const GlobalChar &phi, Int p) {
  const auto it = phi.locals.find(p);
  if (it == phi.locals.end())
    return trivial_subgroup(phi.group);
  return subgroup_from_generators(phi.group, {it->second.tame, it->second.wild});
}

Subgroup decomposition_group(const GlobalChar &phi, Int p) {
  return join(inertia_group(phi, p), frobenius(phi, p));
}

Subgroup global_image(const GlobalChar &phi) {
  std::vector<Element> gens;
  for (const auto &[p, psi] : phi.locals) {
    gens.push_back(psi.tame);
    gens.push_back(psi.wild);
  }
  return subgroup_from_generators(phi.group, gens);
}

bool is_surjective(const GlobalChar &phi) { return global_image(phi).is_full(); }

GlobalChar push_forward(const GlobalChar &phi, const Homomorphism &f) {
  if (f.source != phi.group)
    throw InvalidInput("push_forward: source does not match the character");
  std::vector<LocalChar> locals;
  for (const auto &[p, psi] : phi.locals)
    locals.push_back(LocalChar{p, apply(f, psi.tame), apply(f, psi.wild)});
  return make_global_char(f.target, locals);
}

// ------------------------------------------------------------ records

FieldRecord make_record(const GlobalChar &phi) {
  FieldRecord rec;
  rec.global = phi;
  rec.discriminant = discriminant(phi);
  rec.conductor = conductor(phi);
  std::vector<Subgroup> decomp;
  for (const auto &[p, psi] : phi.locals) {
    RamifiedPlace place;
    place.local = psi;
    place.inertia = inertia_group(phi, p);
    place.frobenius = frobenius(phi, p);
    place.decomposition = join(place.inertia, place.frobenius);
    place.disc_exponent = local_disc_exponent(phi.group, psi);
    place.conductor_exponent = local_conductor_exponent(phi.group, psi);
    decomp.push_back(place.decomposition);
    rec.ramified.push_back(std::move(place));
  }
  rec.hnp = hnp_holds(phi.group, make_family(phi.group, std::move(decomp)));
  rec.infinite_place = complex_conjugation(phi);
  rec.surjective = is_surjective(phi);
  return rec;
}

bool hnp_verdict(const FieldRecord &rec) {
  std::vector<Subgroup> decomp;
  for (const auto &r : rec.ramified)
    decomp.push_back(r.decomposition);
  return hnp_holds(rec.global.group,
                   make_family(rec.global.group, std::move(decomp)));
}

bool record_less(const FieldRecord &a, const FieldRecord &b) {
  if (a.discriminant != b.discriminant)
    return a.discriminant < b.discriminant;
  if (a.conductor != b.conductor)
    return a.conductor < b.conductor;
  return std::lexicographical_compare(
      a.global.locals.begin(), a.global.locals.end(), b.global.locals.begin(),
      b.global.locals.end(),
      [](const auto &x, const auto &y) { return x.second < y.second; });
}

// -------------------------------------------------------------- Wright

WrightExponents wright_exponents(const FinAbGroup &a) {
  const Int ell = smallest_prime_divisor(a);
  const Int tors = torsion(a, ell).order();
  return WrightExponents{
      boost::rational<Int>(ell, a.order() * (ell - 1)),
      boost::rational<Int>(-1) + boost::rational<Int>(tors - 1, ell - 1)};
}

WrightFit wright_fit(const FinAbGroup &a,
                     const std::vector<std::pair<double, double>> &counts) {
  if (counts.size() < 3)
    throw InvalidInput("wright_fit needs at least 3 points");
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i].first <= 1 || counts[i].second < 1)
      throw InvalidInput("wright_fit needs X > 1 and N(X) >= 1");
    if (i > 0 && counts[i].first <= counts[i - 1].first)
      throw InvalidInput("wright_fit needs increasing X");
  }
  const double lp = boost::rational_cast<double>(wright_exponents(a).logpower);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(counts.size());
  for (const auto &[x, y] : counts) {
    const double u = std::log(x);
    const double v = std::log(y) - lp * std::log(u);
    sx += u;
    sy += v;
    sxx += u * u;
    sxy += u * v;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / n;
  return WrightFit{slope, std::exp(intercept)};
}

} // namespace hnp
