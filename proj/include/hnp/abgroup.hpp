#pragma once

// Finite abelian groups in invariant-factor form, their subgroups, quotients,
// homomorphisms and exterior squares. Everything here is exact integer
// arithmetic; Q/Z values are reduced fractions.

#include "hnp/normal_form.hpp"

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace hnp {

using Int = std::int64_t;
using IntMatrix = MatrixX<Int>;
using IntVector = VectorX<Int>;

/// A finite abelian group Z/d_1 x ... x Z/d_n with d_1 | d_2 | ... | d_n and
/// every d_i >= 2. The empty chain is the trivial group.
class FinAbGroup {
public:
  FinAbGroup() = default;

  /// Canonicalizes an arbitrary list of cyclic orders (each >= 2).
  static FinAbGroup from_cyclic_factors(const std::vector<Int> &factors);

  const std::vector<Int> &factors() const { return factors_; }
  std::size_t rank() const { return factors_.size(); }
  Int factor(std::size_t i) const { return factors_[i]; }
  Int order() const;
  Int exponent() const { return factors_.empty() ? 1 : factors_.back(); }
  bool is_trivial() const { return factors_.empty(); }
  std::span<const Int> moduli() const { return factors_; }

  std::string to_string() const; // "2,12"; "1" for the trivial group

  auto operator<=>(const FinAbGroup &) const = default;

private:
  std::vector<Int> factors_;
};

std::ostream &operator<<(std::ostream &os, const FinAbGroup &g);

/// canonicalize([6,4]) == [2,12]. Throws InvalidInput on entries < 2.
FinAbGroup canonicalize(const std::vector<Int> &factors);

/// An element of a FinAbGroup, coordinates reduced into [0, d_i).
struct Element {
  std::vector<Int> coords;

  Element() = default;
  explicit Element(std::vector<Int> c) : coords(std::move(c)) {}

  std::size_t size() const { return coords.size(); }
  Int operator[](std::size_t i) const { return coords[i]; }
  bool is_zero() const;
  IntVector as_vector() const;

  auto operator<=>(const Element &) const = default;
};

std::ostream &operator<<(std::ostream &os, const Element &x);

Element make_element(const FinAbGroup &g, std::vector<Int> coords);
Element zero_element(const FinAbGroup &g);
Element basis_element(const FinAbGroup &g, std::size_t i);
Element add(const FinAbGroup &g, const Element &x, const Element &y);
Element negate(const FinAbGroup &g, const Element &x);
Element scale(const FinAbGroup &g, Int k, const Element &x);
Element subtract(const FinAbGroup &g, const Element &x, const Element &y);
Int element_order(const FinAbGroup &g, const Element &x);

/// Every element of g in mixed-radix order (last coordinate fastest).
std::vector<Element> all_elements(const FinAbGroup &g);

/// A subgroup stored as the canonical Hermite basis of its preimage lattice
/// in Z^n. Two subgroups are equal exactly when their bases agree.
class Subgroup {
public:
  Subgroup() = default;

  const FinAbGroup &ambient() const { return ambient_; }
  const IntMatrix &hermite_basis() const { return basis_; }

  Int order() const;
  /// Index [A : H] = product of the pivots.
  Int index() const;
  bool contains(const Element &x) const;
  bool is_trivial() const { return order() == 1; }
  bool is_full() const { return index() == 1; }
  bool is_subgroup_of(const Subgroup &other) const;

  /// Non-zero basis columns reduced into the ambient group; they generate H.
  std::vector<Element> generators() const;

  bool operator==(const Subgroup &other) const;
  std::strong_ordering operator<=>(const Subgroup &other) const;

  std::size_t hash() const;

private:
  friend Subgroup subgroup_from_generators(const FinAbGroup &,
                                           const std::vector<Element> &);
  friend Subgroup join(const Subgroup &, const Subgroup &);
  friend Subgroup join(const Subgroup &, const Element &);

  FinAbGroup ambient_;
  IntMatrix basis_;
};

Subgroup subgroup_from_generators(const FinAbGroup &g,
                                  const std::vector<Element> &gens);
Subgroup trivial_subgroup(const FinAbGroup &g);
Subgroup full_subgroup(const FinAbGroup &g);
Subgroup join(const Subgroup &h, const Subgroup &k);
Subgroup join(const Subgroup &h, const Element &x);

/// A[p] = { a : p a = 0 }. Throws InvalidInput when p is not prime.
Subgroup torsion(const FinAbGroup &g, Int p);

/// The p-primary part of g.
Subgroup primary_part(const FinAbGroup &g, Int p);

/// Elements of a subgroup, by filtering all_elements of the ambient group.
std::vector<Element> subgroup_elements(const Subgroup &h);

bool is_cyclic(const FinAbGroup &g);

/// Smallest prime divisor of |g|; throws InvalidInput for the trivial group.
Int smallest_prime_divisor(const FinAbGroup &g);

/// A homomorphism given by the images of the standard generators (columns).
struct Homomorphism {
  FinAbGroup source;
  FinAbGroup target;
  IntMatrix matrix; // target.rank() x source.rank()
};

/// Reduces the matrix and checks well-definedness; throws InvalidInput.
Homomorphism make_homomorphism(const FinAbGroup &source,
                               const FinAbGroup &target, IntMatrix matrix);
Homomorphism identity_map(const FinAbGroup &g);
Homomorphism zero_map(const FinAbGroup &source, const FinAbGroup &target);
Element apply(const Homomorphism &f, const Element &x);
/// g o f
Homomorphism compose(const Homomorphism &g, const Homomorphism &f);
Subgroup image(const Homomorphism &f);
Subgroup image(const Homomorphism &f, const Subgroup &h);
bool operator==(const Homomorphism &f, const Homomorphism &g);

struct Quotient {
  FinAbGroup group;
  Homomorphism projection;
};

/// A / H in invariant-factor form together with the projection A -> A/H.
Quotient quotient_map(const FinAbGroup &g, const Subgroup &h);

/// Exterior square of g. Its basis is indexed by pairs (i, j), i < j, in
/// lexicographic order, and the (i, j) coordinate lives in Z/d_i. Listed in
/// that order the orders already form the invariant-factor chain.
struct WedgeSquare {
  FinAbGroup base;
  FinAbGroup structure;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;

  std::size_t pair_index(std::size_t i, std::size_t j) const;
};

WedgeSquare wedge_square(const FinAbGroup &g);

/// a ^ b in the coordinates of wedge_square(g).structure.
Element wedge_pair(const FinAbGroup &g, const Element &a, const Element &b);
Element wedge_pair(const WedgeSquare &w, const Element &a, const Element &b);

/// The induced map on exterior squares (2x2 minors of the matrix).
Homomorphism wedge_map(const Homomorphism &f);

/// Subgroup of the exterior square generated by the images of the exterior
/// squares of the given subgroups.
Subgroup wedge_image_join(const FinAbGroup &g,
                          const std::vector<Subgroup> &families);
Subgroup wedge_image(const WedgeSquare &w, const Subgroup &h);

/// A value of Q/Z as num/den with 0 <= num < den, gcd(num, den) = 1.
struct QZ {
  Int num = 0;
  Int den = 1;

  static QZ make(Int num, Int den);
  bool is_zero() const { return num == 0; }
  Int order() const { return den; }
  std::string to_string() const;

  auto operator<=>(const QZ &) const = default;
};

QZ operator+(const QZ &a, const QZ &b);
QZ operator-(const QZ &a);
QZ operator*(Int k, const QZ &a);

/// Alternating bilinear pairing A x A -> Q/Z, stored by its values on basis
/// pairs: b(e_i, e_j) = coefficient(i,j) / d_i for i < j.
class AltPairing {
public:
  AltPairing() = default;
  /// Zero pairing.
  explicit AltPairing(FinAbGroup base);
  /// `values` are indexed like wedge_square(base).pairs and must be killed
  /// by d_i; throws InvalidInput otherwise.
  AltPairing(FinAbGroup base, const std::vector<QZ> &values);

  static AltPairing from_coefficients(FinAbGroup base,
                                      std::vector<Int> coefficients);

  const FinAbGroup &base() const { return base_; }
  const std::vector<Int> &coefficients() const { return coeffs_; }
  QZ value(std::size_t i, std::size_t j) const;
  QZ evaluate(const Element &x, const Element &y) const;
  bool is_zero() const;

  bool operator==(const AltPairing &) const = default;

private:
  FinAbGroup base_;
  std::vector<Int> coeffs_; // coefficient of pair (i,j) lies in [0, d_i)
};

/// f~(a, a') = f(pi a, pi a').
AltPairing pullback_pairing(const AltPairing &f, const Homomorphism &pi);

} // namespace hnp

template <> struct std::hash<hnp::Subgroup> {
  std::size_t operator()(const hnp::Subgroup &h) const noexcept {
    return h.hash();
  }
};

template <> struct std::hash<hnp::Element> {
  std::size_t operator()(const hnp::Element &x) const noexcept {
    std::size_t seed = x.coords.size();
    for (auto c : x.coords)
      seed ^= std::hash<hnp::Int>{}(c) + 0x9e3779b97f4a7c15ULL + (seed << 6) +
              (seed >> 2);
    return seed;
  }
};
