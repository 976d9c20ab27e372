#pragma once

// Elementary multiplicative number theory used by the local class field
// theory of Q: primality, factoring, primitive roots and discrete logarithms
// in (Z/p^e)^x along the fixed generators.

#include "hnp/abgroup.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace hnp {

Int mul_mod(Int a, Int b, Int m);
Int pow_mod(Int base, Int exp, Int m);
Int inverse_mod(Int a, Int m);
Int ipow(Int base, unsigned exp);

bool is_prime(Int n);
/// Prime factorization by trial division, primes ascending.
std::vector<std::pair<Int, int>> factorize(Int n);
std::vector<Int> primes_up_to(Int n);
/// p-adic valuation of n != 0.
int valuation(Int n, Int p);

/// Least g that is a primitive root mod p and stays primitive mod p^2.
Int primitive_root(Int p);

/// Discrete log of h to base zeta in the cyclic group of order `order`
/// generated by zeta mod m (Pohlig-Hellman with baby-step giant-step on each
/// prime factor). Returns a value in [0, order); throws InvalidInput if h is
/// not a power of zeta.
Int log_in_cyclic(Int h, Int zeta, Int order, Int m);

/// Decomposition of x in (Z/p^e)^x along the fixed generators.
///
/// Odd p: x = omega(g)^tame * (1+p)^wild with g = primitive_root(p) and
/// omega the Teichmueller lift; tame is taken mod p-1, wild mod p^(e-1).
/// p = 2: x = (-1)^tame * 5^wild; tame mod 2 (mod 1 when e = 1) and wild mod
/// 2^(e-2) (mod 1 when e <= 2).
struct DiscreteLog {
  Int tame = 0;
  Int tame_modulus = 1;
  Int wild = 0;
  Int wild_modulus = 1;
  Int generator = 0; // primitive root used for the tame part (-1 for p = 2)
};

DiscreteLog discrete_log(Int p, int e, Int x);

/// Tame coordinate of x modulo a divisor m of p-1 (odd p), or modulo 2 for
/// p = 2. Cheaper than discrete_log when m is small.
Int tame_log_mod(Int p, Int x, Int m);

/// Wild coordinate of x modulo p^(e-1) (odd p) or 2^(e-2) (p = 2).
Int wild_log(Int p, int e, Int x);

} // namespace hnp
