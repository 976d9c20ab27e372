#include "hnp/density.hpp"

#include "hnp/arith.hpp"
#include "hnp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <set>
#include <sstream>

namespace hnp {

namespace {

void check_place(Int place) {
  if (place != kInfinity && !is_prime(place))
    throw InvalidInput("place must be a prime or the real place");
}

void check_element(const FinAbGroup &a, const Element &x) {
  if (x.size() != a.rank())
    throw InvalidInput("element does not belong to the group");
  for (std::size_t i = 0; i < a.rank(); ++i)
    if (x[i] < 0 || x[i] >= a.factor(i))
      throw InvalidInput("element coordinates must be reduced");
}

void validate_spec(const FinAbGroup &a, const LocalSpec &s) {
  check_place(s.place);
  if (s.place == kInfinity) {
    check_element(a, s.conjugation);
    if (!scale(a, 2, s.conjugation).is_zero())
      throw InvalidInput("complex conjugation must map into A[2]");
    return;
  }
  if (s.character.p != s.place)
    throw InvalidInput("local character keyed by the wrong prime");
  validate_local_char(a, s.character);
  if (s.frobenius)
    check_element(a, *s.frobenius);
}

bool strictly_increasing(const std::vector<UInt128> &grid) {
  return std::adjacent_find(grid.begin(), grid.end(),
                            [](UInt128 x, UInt128 y) { return x >= y; }) == grid.end();
}

Subgroup decomposition_of(const FinAbGroup &a, const LocalChar &psi,
                          const Element &frob) {
  return subgroup_from_generators(a, {psi.tame, psi.wild, frob});
}

bool cyclic_subgroup(const FinAbGroup &a, const Subgroup &h) {
  for (const auto &x : subgroup_elements(h))
    if (element_order(a, x) == h.order())
      return true;
  return false;
}

LocalChar local_of(const GlobalChar &phi, Int p) {
  const auto it = phi.locals.find(p);
  if (it != phi.locals.end())
    return it->second;
  const Element zero = zero_element(phi.group);
  return LocalChar{p, zero, zero};
}

LocalChar project(const Homomorphism &f, const LocalChar &psi) {
  return LocalChar{psi.p, apply(f, psi.tame), apply(f, psi.wild)};
}

} // namespace

// ------------------------------------------------------------ local specs

LocalSpec finite_spec(LocalChar psi, std::optional<Element> frob) {
  LocalSpec s;
  s.place = psi.p;
  s.character = std::move(psi);
  s.frobenius = std::move(frob);
  return s;
}

LocalSpec unramified_spec(const FinAbGroup &a, Int p, std::optional<Element> frob) {
  const Element zero = zero_element(a);
  return finite_spec(LocalChar{p, zero, zero}, std::move(frob));
}

LocalSpec archimedean_spec(Element conj) {
  LocalSpec s;
  s.conjugation = std::move(conj);
  return s;
}

std::vector<LocalHom> local_homs(const FinAbGroup &a, Int place) {
  check_place(place);
  const auto elements = all_elements(a);
  std::vector<LocalHom> out;
  if (place == kInfinity) {
    for (const auto &x : elements)
      if (scale(a, 2, x).is_zero())
        out.push_back(LocalHom{kInfinity, {}, x});
    return out;
  }
  for (const auto &psi : local_char_space(place, a))
    for (const auto &x : elements)
      out.push_back(LocalHom{place, psi, x});
  return out;
}

bool matches(const LocalSpec &spec, const LocalHom &h) {
  if (spec.place != h.place)
    return false;
  if (spec.place == kInfinity)
    return spec.conjugation == h.value;
  return spec.character == h.character && (!spec.frobenius || *spec.frobenius == h.value);
}

Rational local_weight(const LocalHom &h) {
  return h.is_ramified() ? Rational(1, h.place) : Rational(1);
}

namespace {

struct Tally {
  Int box_unramified = 0, box_ramified = 0;
  Int total_unramified = 0, total_ramified = 0;
};

// Counts of local homomorphisms at one place, inside the box and overall.
Tally tally(const BoxMeasure &m, Int place, const std::vector<const LocalSpec *> &here) {
  Tally t;
  const auto add = [&](bool ramified, Int in_box, Int total) {
    (ramified ? t.box_ramified : t.box_unramified) += in_box;
    (ramified ? t.total_ramified : t.total_unramified) += total;
  };
  const bool conditioned = m.gw_classes && place == 2;
  if (place == kInfinity || conditioned) {
    for (const auto &h : local_homs(m.group, place)) {
      if (conditioned && std::none_of(m.gw_classes->begin(), m.gw_classes->end(),
                                      [&](const LocalSpec &s) { return matches(s, h); }))
        continue;
      const bool in = std::all_of(here.begin(), here.end(),
                                  [&](const LocalSpec *s) { return matches(*s, h); });
      add(h.is_ramified(), in ? 1 : 0, 1);
    }
    return t;
  }
  const Int n = m.group.order();
  for (const auto &psi : local_char_space(place, m.group)) {
    Int in = n;
    const Element *frob = nullptr;
    for (const LocalSpec *s : here) {
      if (s->character != psi) {
        in = 0;
        break;
      }
      if (s->frobenius) {
        if (frob && *frob != *s->frobenius) {
          in = 0;
          break;
        }
        frob = &*s->frobenius;
        in = 1;
      }
    }
    add(psi.is_ramified(), in, n);
  }
  return t;
}

} // namespace

Rational box_probability(const BoxMeasure &m, const std::vector<LocalSpec> &specs) {
  std::map<Int, std::vector<const LocalSpec *>> by_place;
  for (const auto &s : specs) {
    validate_spec(m.group, s);
    if (std::find(m.places.begin(), m.places.end(), s.place) == m.places.end())
      throw InvalidInput("spec at a place outside the measure");
    by_place[s.place].push_back(&s);
  }
  if (m.gw_classes) {
    if (std::find(m.places.begin(), m.places.end(), Int{2}) == m.places.end())
      throw InvalidInput("conditioning at 2 needs 2 among the places");
    for (const auto &s : *m.gw_classes) {
      validate_spec(m.group, s);
      if (s.place != 2)
        throw InvalidInput("admissible classes live at 2");
    }
  }
  Rational out = 1;
  for (const auto &[place, here] : by_place) {
    const Tally t = tally(m, place, here);
    if (t.total_unramified == 0 && t.total_ramified == 0)
      throw InvalidInput("no admissible local homomorphism at 2");
    // unramified homs weigh 1, ramified ones 1/p
    const Int norm = place == kInfinity ? 1 : place;
    out *= Rational(norm * t.box_unramified + t.box_ramified,
                    norm * t.total_unramified + t.total_ramified);
  }
  return out;
}

// ------------------------------------------------------------ empirical side

SpecMatcher::SpecMatcher(const SearchContext &ctx, const std::vector<LocalSpec> &specs) {
  const auto &t = ctx.tables();
  for (const auto &s : specs) {
    validate_spec(ctx.group(), s);
    Entry e{s.place, 0, 0, false, -1, 0};
    if (s.place == kInfinity) {
      e.conj = t.index_of(s.conjugation);
    } else {
      e.tame = t.index_of(s.character.tame);
      e.wild = t.index_of(s.character.wild);
      e.ramified = s.character.is_ramified();
      if (s.frobenius)
        e.frob = t.index_of(*s.frobenius);
    }
    entries_.push_back(e);
  }
}

bool SpecMatcher::operator()(const Leaf &leaf) const {
  for (const auto &e : entries_) {
    if (e.place == kInfinity) {
      if (leaf.conjugation() != e.conj)
        return false;
      continue;
    }
    const Ramification *r = leaf.at(e.place);
    if (e.ramified) {
      if (r == nullptr || r->option->tame != e.tame || r->option->wild != e.wild)
        return false;
    } else if (r != nullptr) {
      return false;
    }
    if (e.frob >= 0 && leaf.frobenius(e.place) != e.frob)
      return false;
  }
  return true;
}

boost::rational<Int> Frequency::ratio() const {
  if (total == 0)
    throw UndefinedRatio("no records counted");
  return boost::rational<Int>(hits, total);
}

double Frequency::estimate() const {
  if (total == 0)
    throw UndefinedRatio("no records counted");
  return static_cast<double>(hits) / static_cast<double>(total);
}

Frequency empirical_pr(const FinAbGroup &a, const std::vector<LocalSpec> &specs,
                       UInt128 x, Ordering ordering, int jobs) {
  SearchOptions opts;
  opts.bound = x;
  opts.ordering = ordering;
  opts.jobs = jobs;
  SearchContext ctx(a, opts);
  const SpecMatcher match(ctx, specs);
  std::vector<Frequency> per(static_cast<std::size_t>(ctx.workers()));
  ctx.run([&](int worker, const Leaf &leaf) {
    auto &f = per[static_cast<std::size_t>(worker)];
    ++f.total;
    if (match(leaf))
      ++f.hits;
  });
  Frequency out;
  for (const auto &f : per) {
    out.hits += f.hits;
    out.total += f.total;
  }
  if (out.total == 0)
    throw UndefinedRatio("no records up to the bound");
  return out;
}

std::vector<Frequency> local_frequencies(const FinAbGroup &a, Int place, UInt128 x,
                                         Ordering ordering, int jobs) {
  const auto homs = local_homs(a, place);
  SearchOptions opts;
  opts.bound = x;
  opts.ordering = ordering;
  opts.jobs = jobs;
  SearchContext ctx(a, opts);
  const auto &t = ctx.tables();
  const int n = t.size();
  // hom index by (tame, wild, value) table indices
  std::vector<int> slot(static_cast<std::size_t>(n) * n * n, -1);
  const auto key = [n](int tame, int wild, int value) {
    return (static_cast<std::size_t>(tame) * n + wild) * n + value;
  };
  for (std::size_t i = 0; i < homs.size(); ++i) {
    const auto &h = homs[i];
    const int tame = place == kInfinity ? 0 : t.index_of(h.character.tame);
    const int wild = place == kInfinity ? 0 : t.index_of(h.character.wild);
    slot[key(tame, wild, t.index_of(h.value))] = static_cast<int>(i);
  }
  std::vector<std::vector<Int>> hits(static_cast<std::size_t>(ctx.workers()),
                                     std::vector<Int>(homs.size(), 0));
  std::vector<Int> totals(static_cast<std::size_t>(ctx.workers()), 0);
  ctx.run([&](int worker, const Leaf &leaf) {
    const auto w = static_cast<std::size_t>(worker);
    ++totals[w];
    int tame = 0, wild = 0, value = 0;
    if (place == kInfinity) {
      value = leaf.conjugation();
    } else {
      if (const Ramification *r = leaf.at(place)) {
        tame = r->option->tame;
        wild = r->option->wild;
      }
      value = leaf.frobenius(place);
    }
    ++hits[w][static_cast<std::size_t>(slot[key(tame, wild, value)])];
  });
  std::vector<Frequency> out(homs.size());
  Int total = 0;
  for (Int c : totals)
    total += c;
  if (total == 0)
    throw UndefinedRatio("no records up to the bound");
  for (std::size_t i = 0; i < homs.size(); ++i) {
    out[i].total = total;
    for (const auto &h : hits)
      out[i].hits += h[i];
  }
  return out;
}

double wood_tolerance(double p_hat, Int n) {
  const double dn = static_cast<double>(n);
  return 5.0 * std::max(std::sqrt(p_hat * (1.0 - p_hat) / dn), 10.0 / std::sqrt(dn));
}

// ------------------------------------------------------------ curves

const char *to_string(CurvePredicate p) {
  switch (p) {
  case CurvePredicate::Hnp:
    return "hnp";
  case CurvePredicate::HnpFail:
    return "hnp-fail";
  case CurvePredicate::Local:
    return "local";
  }
  return "?";
}

double DensityCurve::ratio(std::size_t i) const {
  if (totals.at(i) == 0)
    throw UndefinedRatio("no records below " + u128_to_string(thresholds[i]));
  return static_cast<double>(hits[i]) / static_cast<double>(totals[i]);
}

DensityCurve DensityCurve::trimmed(Int min_total) const {
  DensityCurve out{group, ordering, {}, {}, {}};
  for (std::size_t i = 0; i < thresholds.size(); ++i)
    if (totals[i] >= min_total && totals[i] > 0) {
      out.thresholds.push_back(thresholds[i]);
      out.totals.push_back(totals[i]);
      out.hits.push_back(hits[i]);
    }
  return out;
}

std::string DensityCurve::csv() const {
  std::ostringstream os;
  os << "X,total,hits,ratio\n";
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    os << u128_to_string(thresholds[i]) << ',' << totals[i] << ',' << hits[i] << ',';
    if (totals[i] > 0)
      os << std::fixed << std::setprecision(6) << ratio(i);
    os << '\n';
  }
  return os.str();
}

DensityCurve density_curve(const FinAbGroup &a, const std::vector<UInt128> &grid,
                           CurvePredicate predicate,
                           const std::vector<LocalSpec> &specs, SearchOptions opts) {
  if (grid.empty())
    throw InvalidInput("empty grid");
  if (!strictly_increasing(grid))
    throw InvalidInput("grid must be strictly increasing");
  opts.bound = grid.back();
  SearchContext ctx(a, opts);
  const SpecMatcher match(ctx, specs);
  const std::size_t n = grid.size();
  std::vector<std::vector<Int>> totals(static_cast<std::size_t>(ctx.workers()),
                                       std::vector<Int>(n, 0));
  auto hits = totals;
  ctx.run([&](int worker, const Leaf &leaf) {
    const auto k = static_cast<std::size_t>(
        std::lower_bound(grid.begin(), grid.end(), leaf.value()) - grid.begin());
    const auto w = static_cast<std::size_t>(worker);
    ++totals[w][k];
    bool hit = false;
    switch (predicate) {
    case CurvePredicate::Hnp:
      hit = leaf.hnp();
      break;
    case CurvePredicate::HnpFail:
      hit = !leaf.hnp();
      break;
    case CurvePredicate::Local:
      hit = match(leaf);
      break;
    }
    if (hit)
      ++hits[w][k];
  });
  DensityCurve out{a, opts.ordering, grid, std::vector<Int>(n, 0), std::vector<Int>(n, 0)};
  for (std::size_t w = 0; w < totals.size(); ++w)
    for (std::size_t i = 0; i < n; ++i) {
      out.totals[i] += totals[w][i];
      out.hits[i] += hits[w][i];
    }
  std::partial_sum(out.totals.begin(), out.totals.end(), out.totals.begin());
  std::partial_sum(out.hits.begin(), out.hits.end(), out.hits.begin());
  return out;
}

std::vector<UInt128> geometric_grid(UInt128 x0, UInt128 x, UInt128 r) {
  if (r < 2 || x0 < 1)
    throw InvalidInput("geometric grid needs x0 >= 1 and ratio >= 2");
  std::vector<UInt128> out;
  for (UInt128 v = x0; v <= x; v *= r) {
    out.push_back(v);
    if (v > x / r)
      break;
  }
  return out;
}

// ------------------------------------------------------------ dichotomy

FixedBaseContext make_fixed_base_context(const FinAbGroup &a, const GlobalChar &base_char) {
  FixedBaseContext ctx;
  ctx.group = a;
  ctx.ell = smallest_prime_divisor(a);
  ctx.base = quotient_map(a, torsion(a, ctx.ell));
  if (base_char.group != ctx.base.group)
    throw PreconditionError("base character must take values in A/A[ell]");
  if (!is_surjective(base_char))
    throw PreconditionError("base character must be onto A/A[ell]");
  ctx.base_char = base_char;
  std::vector<LocalChar> lifts;
  std::set<Int> primes{2};
  for (const auto &[p, psi] : base_char.locals) {
    const auto space = local_char_space(p, a);
    const auto it = std::find_if(space.begin(), space.end(), [&](const LocalChar &x) {
      return project(ctx.base.projection, x) == psi;
    });
    if (it == space.end())
      throw PreconditionError("local character at " + std::to_string(p) + " has no lift");
    lifts.push_back(*it);
    primes.insert(p);
  }
  for (const auto &[p, e] : factorize(a.order()))
    primes.insert(p);
  ctx.lift = make_global_char(a, lifts);
  ctx.primes.assign(primes.begin(), primes.end());
  return ctx;
}

const char *to_string(Trend t) {
  switch (t) {
  case Trend::AtTarget:
    return "at-target";
  case Trend::Toward:
    return "toward";
  case Trend::Away:
    return "away";
  case Trend::Flat:
    return "flat";
  case Trend::Mixed:
    return "mixed";
  }
  return "?";
}

Trend trend_toward(const std::vector<double> &ratios, double target) {
  if (std::all_of(ratios.begin(), ratios.end(), [&](double r) { return r == target; }))
    return Trend::AtTarget;
  bool closer = false, farther = false;
  for (std::size_t i = 1; i < ratios.size(); ++i) {
    const double before = std::abs(ratios[i - 1] - target);
    const double after = std::abs(ratios[i] - target);
    closer = closer || after < before;
    farther = farther || after > before;
  }
  if (closer && farther)
    return Trend::Mixed;
  return closer ? Trend::Toward : (farther ? Trend::Away : Trend::Flat);
}

namespace {

// Images of p lifting the base Frobenius, ordered by the size of the
// decomposition group they give, then canonically.
std::vector<std::pair<Subgroup, Element>> frobenius_choices(const FixedBaseContext &ctx,
                                                            const LocalChar &psi) {
  const Element target = frobenius(ctx.base_char, psi.p);
  std::vector<std::pair<Subgroup, Element>> out;
  for (const auto &f : all_elements(ctx.group))
    if (apply(ctx.base.projection, f) == target)
      out.emplace_back(decomposition_of(ctx.group, psi, f), f);
  std::stable_sort(out.begin(), out.end(), [](const auto &x, const auto &y) {
    return x.first.order() < y.first.order();
  });
  return out;
}

} // namespace

std::vector<LocalSpec> split_specs(const FixedBaseContext &ctx) {
  std::vector<LocalSpec> out;
  for (Int p : ctx.primes) {
    const LocalChar psi = local_of(ctx.lift, p);
    const auto choices = frobenius_choices(ctx, psi);
    if (!cyclic_subgroup(ctx.group, choices.front().first))
      throw PreconditionError("no cyclic decomposition group at " + std::to_string(p));
    out.push_back(finite_spec(psi, choices.front().second));
  }
  return out;
}

std::vector<LocalSpec> forced_full_specs(const FixedBaseContext &ctx) {
  std::vector<LocalSpec> out;
  bool forced = false;
  for (Int p : ctx.primes) {
    const LocalChar psi = local_of(ctx.lift, p);
    const auto choices = frobenius_choices(ctx, psi);
    const auto full = std::find_if(choices.begin(), choices.end(),
                                   [](const auto &c) { return c.first.is_full(); });
    if (!forced && full != choices.end()) {
      out.push_back(finite_spec(psi, full->second));
      forced = true;
    } else {
      out.push_back(finite_spec(psi, choices.front().second));
    }
  }
  if (!forced)
    throw PreconditionError("no fixed prime admits a full decomposition group");
  return out;
}

DichotomyReport dichotomy_check(const FixedBaseContext &ctx,
                                const std::vector<LocalSpec> &specs,
                                const std::vector<UInt128> &grid, int jobs) {
  const FinAbGroup &a = ctx.group;
  std::map<Int, const LocalSpec *> at;
  for (const auto &s : specs) {
    validate_spec(a, s);
    if (s.place == kInfinity ||
        std::find(ctx.primes.begin(), ctx.primes.end(), s.place) == ctx.primes.end())
      throw PreconditionError("specs must sit on the fixed primes");
    if (!s.frobenius)
      throw PreconditionError("specs must fix the image of p");
    if (!at.emplace(s.place, &s).second)
      throw PreconditionError("one spec per fixed prime");
  }
  SearchOptions opts;
  opts.jobs = jobs;
  opts.restrict_to = torsion(a, ctx.ell);
  opts.bound_excludes_fixed = true;
  DichotomyReport report;
  std::vector<Subgroup> fixed;
  for (Int p : ctx.primes) {
    const auto it = at.find(p);
    if (it == at.end())
      throw PreconditionError("missing spec at fixed prime " + std::to_string(p));
    const LocalSpec &s = *it->second;
    if (project(ctx.base.projection, s.character) != local_of(ctx.base_char, p) ||
        apply(ctx.base.projection, *s.frobenius) != frobenius(ctx.base_char, p))
      throw PreconditionError("spec at " + std::to_string(p) +
                              " does not lie over the base character");
    opts.fixed.emplace(p, s.character);
    fixed.push_back(decomposition_of(a, s.character, *s.frobenius));
  }
  report.predicted = zero_one_verdict(a, ctx.ell, make_family(a, fixed));
  report.fixed_decomposition = std::move(fixed);

  if (grid.empty() || !strictly_increasing(grid))
    throw InvalidInput("grid must be non-empty and strictly increasing");
  opts.bound = grid.back();
  SearchContext search(a, opts);
  const SpecMatcher match(search, specs);
  const std::size_t n = grid.size();
  std::vector<std::vector<Int>> totals(static_cast<std::size_t>(search.workers()),
                                       std::vector<Int>(n, 0));
  auto hits = totals;
  search.run([&](int worker, const Leaf &leaf) {
    if (!match(leaf))
      return;
    const auto k = static_cast<std::size_t>(
        std::lower_bound(grid.begin(), grid.end(), leaf.value()) - grid.begin());
    const auto w = static_cast<std::size_t>(worker);
    ++totals[w][k];
    if (leaf.hnp())
      ++hits[w][k];
  });
  DensityCurve &c = report.curve;
  c = DensityCurve{a, Ordering::Discriminant, grid, std::vector<Int>(n, 0),
                   std::vector<Int>(n, 0)};
  for (std::size_t w = 0; w < totals.size(); ++w)
    for (std::size_t i = 0; i < n; ++i) {
      c.totals[i] += totals[w][i];
      c.hits[i] += hits[w][i];
    }
  std::partial_sum(c.totals.begin(), c.totals.end(), c.totals.begin());
  std::partial_sum(c.hits.begin(), c.hits.end(), c.hits.begin());
  if (c.totals.back() == 0)
    throw UndefinedRatio("no twist matches the specs up to the last threshold");
  std::vector<double> ratios;
  for (std::size_t i = 0; i < n; ++i)
    if (c.totals[i] > 0)
      ratios.push_back(c.ratio(i));
  report.trend = trend_toward(ratios, report.predicted);
  return report;
}

// ------------------------------------------------------------ trichotomy

const char *to_string(Consistency c) {
  switch (c) {
  case Consistency::Consistent:
    return "consistent";
  case Consistency::Inconsistent:
    return "inconsistent-at-this-range";
  case Consistency::Insufficient:
    return "insufficient-data";
  }
  return "?";
}

TrichotomyReport trichotomy_report(const FinAbGroup &a, UInt128 x, Int min_total,
                                   int jobs) {
  TrichotomyReport r{classify_limit(a), {}, {}, Consistency::Insufficient};
  SearchOptions opts;
  opts.jobs = jobs;
  r.curve = density_curve(a, geometric_grid(10, x, 10), CurvePredicate::Hnp, {}, opts);
  r.sample = r.curve.trimmed(min_total);
  const std::size_t n = r.sample.thresholds.size();
  if (n == 0)
    return r;
  bool ok = true;
  for (std::size_t i = 0; i < n; ++i) {
    const double q = r.sample.ratio(i);
    if (r.verdict.tag == LimitTag::One)
      ok = ok && (i == 0 || q >= r.sample.ratio(i - 1));
    else
      ok = ok && q >= kInteriorLow && q <= kInteriorHigh;
  }
  r.consistency = ok ? Consistency::Consistent : Consistency::Inconsistent;
  return r;
}

} // namespace hnp
