#pragma once

// Wood's measure on local specifications and its empirical counterpart:
// box probabilities, frequencies of local behaviour among enumerated
// characters, HNP density curves and the fixed-base dichotomy.

#include "hnp/criterion.hpp"
#include "hnp/search.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace hnp {

using Rational = boost::multiprecision::cpp_rational;

/// Place key of the real place.
inline constexpr Int kInfinity = 0;

/// A set of local homomorphisms at one place. At a prime p a local
/// homomorphism is a pair (restriction to the units, image of p); the image
/// of p follows the convention of `frobenius`. Leaving `frobenius` unset
/// takes the union over all images. At the real place the homomorphism is
/// the image of complex conjugation, an element of A[2].
struct LocalSpec {
  Int place = kInfinity;
  LocalChar character;
  std::optional<Element> frobenius;
  Element conjugation;
};

LocalSpec finite_spec(LocalChar psi, std::optional<Element> frob = std::nullopt);
LocalSpec unramified_spec(const FinAbGroup &a, Int p,
                          std::optional<Element> frob = std::nullopt);
LocalSpec archimedean_spec(Element conj);

/// One local homomorphism.
struct LocalHom {
  Int place = kInfinity;
  LocalChar character;
  Element value; // image of p, or of complex conjugation

  bool is_ramified() const { return place != kInfinity && character.is_ramified(); }
};

/// All local homomorphisms at a place, in canonical order.
std::vector<LocalHom> local_homs(const FinAbGroup &a, Int place);

bool matches(const LocalSpec &spec, const LocalHom &h);

/// 1/p for a ramified homomorphism at p, otherwise 1.
Rational local_weight(const LocalHom &h);

struct BoxMeasure {
  FinAbGroup group;
  std::vector<Int> places;
  /// Admissible local homomorphisms at 2; the measure is conditioned on
  /// them when set.
  std::optional<std::vector<LocalSpec>> gw_classes;
};

/// Product over places of the weight of the box over the total weight.
/// Several specs at one place intersect. Throws InvalidInput for a place
/// missing from the measure or a spec that does not fit the group.
Rational box_probability(const BoxMeasure &m, const std::vector<LocalSpec> &specs);

/// Matches leaves of a search against local specs.
class SpecMatcher {
public:
  SpecMatcher(const SearchContext &ctx, const std::vector<LocalSpec> &specs);
  bool operator()(const Leaf &leaf) const;

private:
  struct Entry {
    Int place;
    int tame;
    int wild;
    bool ramified;
    int frob; // -1 for any
    int conj;
  };
  std::vector<Entry> entries_;
};

struct Frequency {
  Int hits = 0;
  Int total = 0;

  boost::rational<Int> ratio() const;
  double estimate() const;
};

/// Share of surjective characters with counting value <= x whose local
/// behaviour lies in every spec. Throws UndefinedRatio when none are counted.
Frequency empirical_pr(const FinAbGroup &a, const std::vector<LocalSpec> &specs,
                       UInt128 x, Ordering ordering, int jobs = 1);

/// Frequencies of every local homomorphism at one place, aligned with
/// local_homs(a, place), from a single enumeration.
std::vector<Frequency> local_frequencies(const FinAbGroup &a, Int place, UInt128 x,
                                         Ordering ordering, int jobs = 1);

/// 5 max(sqrt(p(1-p)/n), 10/sqrt(n)).
double wood_tolerance(double p_hat, Int n);

enum class CurvePredicate { Hnp, HnpFail, Local };

const char *to_string(CurvePredicate p);

struct DensityCurve {
  FinAbGroup group;
  Ordering ordering = Ordering::Discriminant;
  std::vector<UInt128> thresholds;
  std::vector<Int> totals;
  std::vector<Int> hits;

  /// Throws UndefinedRatio when the total at i is zero.
  double ratio(std::size_t i) const;
  /// The points with at least min_total records.
  DensityCurve trimmed(Int min_total) const;
  std::string csv() const;
};

/// Cumulative totals and hits at each threshold of an increasing grid.
/// `opts.bound` is replaced by the last threshold.
DensityCurve density_curve(const FinAbGroup &a, const std::vector<UInt128> &grid,
                           CurvePredicate predicate,
                           const std::vector<LocalSpec> &specs = {},
                           SearchOptions opts = {});

/// x0, x0 r, x0 r^2, ... up to x. Throws InvalidInput unless r > 1.
std::vector<UInt128> geometric_grid(UInt128 x0, UInt128 x, UInt128 r);

struct FixedBaseContext {
  FinAbGroup group;
  Int ell = 0;
  Quotient base;       // A -> A / A[ell]
  GlobalChar base_char; // onto the quotient
  GlobalChar lift;      // pushes forward to base_char
  std::vector<Int> primes; // primes dividing 2 |A| conductor(base_char)
};

/// Lifts each local character of `base_char` to the least local character
/// of A mapping to it. Throws PreconditionError when base_char is not onto
/// A/A[ell] or some local character has no lift.
FixedBaseContext make_fixed_base_context(const FinAbGroup &a,
                                         const GlobalChar &base_char);

enum class Trend { AtTarget, Toward, Away, Flat, Mixed };

const char *to_string(Trend t);

struct DichotomyReport {
  int predicted = 0;
  std::vector<Subgroup> fixed_decomposition;
  DensityCurve curve; // thresholds bound the non-fixed part of the discriminant
  Trend trend = Trend::Flat;
};

/// Restricted HNP ratio among the twists lift + psi with psi valued in
/// A[ell], unramified on the fixed primes, whose local homomorphisms at the
/// fixed primes are those of `specs`. `specs` must give the character and
/// the image of p at every prime of ctx.primes. Throws PreconditionError for
/// specs incompatible with the base character and UndefinedRatio when no
/// twist is found up to the last threshold.
DichotomyReport dichotomy_check(const FixedBaseContext &ctx,
                                const std::vector<LocalSpec> &specs,
                                const std::vector<UInt128> &grid, int jobs = 1);

/// Direction of a ratio sequence relative to a target endpoint: AtTarget
/// when every ratio equals it, Toward when the distance never grows and
/// shrinks at least once.
Trend trend_toward(const std::vector<double> &ratios, double target);

/// Local homomorphisms on ctx.primes with the lift's characters and the
/// image of p chosen to make each decomposition group as small as possible
/// (first in canonical order among the smallest). Throws PreconditionError
/// when some smallest choice is not cyclic.
std::vector<LocalSpec> split_specs(const FixedBaseContext &ctx);

/// As split_specs, except that at the first prime where it is possible the
/// image of p makes the decomposition group all of A. Throws
/// PreconditionError when no prime allows it.
std::vector<LocalSpec> forced_full_specs(const FixedBaseContext &ctx);

enum class Consistency { Consistent, Inconsistent, Insufficient };

const char *to_string(Consistency c);

struct TrichotomyReport {
  LimitVerdict verdict;
  DensityCurve curve; // full decade grid
  DensityCurve sample; // points with at least min_total records
  Consistency consistency = Consistency::Insufficient;
};

inline constexpr Int kMinCurveSample = 10'000;
inline constexpr double kInteriorLow = 0.05;
inline constexpr double kInteriorHigh = 0.95;

/// Decade grid up to x. For limit one the sampled HNP ratios must be
/// non-decreasing; for an open-interval limit they must stay in
/// [kInteriorLow, kInteriorHigh].
TrichotomyReport trichotomy_report(const FinAbGroup &a, UInt128 x,
                                   Int min_total = kMinCurveSample, int jobs = 1);

} // namespace hnp
