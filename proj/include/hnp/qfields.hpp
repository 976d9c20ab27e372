#pragma once

// Abelian extensions of Q through local class field theory. A character of
// G_Q with values in A is a finite family of local characters psi_p on the
// unit groups Z_p^x; each psi_p is recorded by the images of the fixed
// generators (Teichmueller lift of the least primitive root and 1+p for odd
// p, -1 and 5 for p = 2).

#include "hnp/abgroup.hpp"

#include <boost/rational.hpp>

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace hnp {

using UInt128 = unsigned __int128;

std::string u128_to_string(UInt128 x);
/// Decimal digits or a power of ten written "1e30". Throws InvalidInput.
UInt128 parse_u128(const std::string &s);
/// Product, throwing ResourceError on overflow.
UInt128 checked_mul(UInt128 a, UInt128 b);
UInt128 checked_pow(UInt128 base, Int exp);

struct LocalChar {
  Int p = 0;
  Element tame; // image of the tame generator (of -1 when p = 2)
  Element wild; // image of 1+p (of 5 when p = 2)

  bool is_ramified() const { return !tame.is_zero() || !wild.is_zero(); }
  auto operator<=>(const LocalChar &) const = default;
};

/// Every local character at p, the unramified one first. Throws InvalidInput
/// when p is not prime.
std::vector<LocalChar> local_char_space(Int p, const FinAbGroup &a);

/// Checks the images against the local constraints; throws InvalidInput.
void validate_local_char(const FinAbGroup &a, const LocalChar &psi);

/// psi(x) for an integer x prime to p.
Element evaluate_local(const FinAbGroup &a, const LocalChar &psi, Int x);

struct GlobalChar {
  FinAbGroup group;
  std::map<Int, LocalChar> locals; // ramified primes only
};

/// Validates, drops unramified entries; duplicate primes are an error.
GlobalChar make_global_char(const FinAbGroup &a,
                            const std::vector<LocalChar> &locals);

/// chi(x) = sum_i c_i x_i / d_i.
struct Character {
  FinAbGroup group;
  std::vector<Int> coeffs;

  QZ operator()(const Element &x) const;
};

std::vector<Character> all_characters(const FinAbGroup &a);

Int conductor_exponent(const Character &chi, const LocalChar &psi);
/// Largest conductor exponent over all characters.
Int local_conductor_exponent(const FinAbGroup &a, const LocalChar &psi);
/// Sum of conductor exponents over all characters, in closed form.
Int local_disc_exponent(const FinAbGroup &a, const LocalChar &psi);

/// Conductor-discriminant formula summed character by character.
UInt128 discriminant(const GlobalChar &phi);
UInt128 conductor(const GlobalChar &phi);

/// Sum over ramified q != p of psi_q(p).
Element frobenius(const GlobalChar &phi, Int p);
/// Sum over ramified q of psi_q(-1).
Element complex_conjugation(const GlobalChar &phi);
Subgroup inertia_group(const GlobalChar &phi, Int p);
Subgroup decomposition_group(const GlobalChar &phi, Int p);
Subgroup global_image(const GlobalChar &phi);
bool is_surjective(const GlobalChar &phi);

/// The character f o phi.
GlobalChar push_forward(const GlobalChar &phi, const Homomorphism &f);

struct RamifiedPlace {
  LocalChar local;
  Subgroup inertia;
  Element frobenius;
  Subgroup decomposition;
  Int disc_exponent = 0;
  Int conductor_exponent = 0;
};

struct FieldRecord {
  GlobalChar global;
  UInt128 discriminant = 1;
  UInt128 conductor = 1;
  std::vector<RamifiedPlace> ramified;
  bool hnp = true;
  Element infinite_place;
  bool surjective = true;
};

FieldRecord make_record(const GlobalChar &phi);
bool hnp_verdict(const FieldRecord &rec);

/// Order by (discriminant, conductor, ramified local data).
bool record_less(const FieldRecord &a, const FieldRecord &b);

struct WrightExponents {
  boost::rational<Int> power;
  boost::rational<Int> logpower;
};

WrightExponents wright_exponents(const FinAbGroup &a);

struct WrightFit {
  double power = 0;
  double constant = 0;
};

/// Least squares of log N - logpower * log log X against log X. Needs at
/// least 3 points with increasing X > 1 and N >= 1.
WrightFit wright_fit(const FinAbGroup &a,
                     const std::vector<std::pair<double, double>> &counts);

} // namespace hnp
