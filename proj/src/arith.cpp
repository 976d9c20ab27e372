#include "hnp/arith.hpp"

#include "hnp/errors.hpp"

#include <cmath>
#include <mutex>
#include <numeric>
#include <unordered_map>

namespace hnp {

Int mul_mod(Int a, Int b, Int m) {
  return static_cast<Int>(static_cast<__int128>(a) * b % m);
}

Int pow_mod(Int base, Int exp, Int m) {
  if (m == 1)
    return 0;
  Int result = 1;
  base = mod_floor(base, m);
  while (exp > 0) {
    if (exp & 1)
      result = mul_mod(result, base, m);
    base = mul_mod(base, base, m);
    exp >>= 1;
  }
  return result;
}

Int inverse_mod(Int a, Int m) {
  auto [g, x, y] = ext_gcd(mod_floor(a, m), m);
  (void)y;
  if (g != 1)
    throw InvalidInput("inverse_mod: not invertible");
  return mod_floor(x, m);
}

Int ipow(Int base, unsigned exp) {
  Int r = 1;
  while (exp-- > 0)
    r *= base;
  return r;
}

bool is_prime(Int n) {
  if (n < 2)
    return false;
  for (Int p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    if (n % p == 0)
      return n == p;
  }
  Int d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  // deterministic for n < 3.3e24
  for (Int a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    Int x = pow_mod(a, d, n);
    if (x == 1 || x == n - 1)
      continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = mul_mod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite)
      return false;
  }
  return true;
}

std::vector<std::pair<Int, int>> factorize(Int n) {
  std::vector<std::pair<Int, int>> out;
  for (Int p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
    if (n % p != 0)
      continue;
    int e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    out.emplace_back(p, e);
  }
  if (n > 1)
    out.emplace_back(n, 1);
  return out;
}

std::vector<Int> primes_up_to(Int n) {
  std::vector<Int> primes;
  if (n < 2)
    return primes;
  std::vector<bool> composite(static_cast<std::size_t>(n) + 1, false);
  for (Int i = 2; i <= n; ++i) {
    if (composite[i])
      continue;
    primes.push_back(i);
    for (Int j = i * i; j <= n; j += i)
      composite[j] = true;
  }
  return primes;
}

int valuation(Int n, Int p) {
  int v = 0;
  while (n % p == 0) {
    n /= p;
    ++v;
  }
  return v;
}

namespace {

Int compute_primitive_root(Int p) {
  if (p == 2)
    return 1;
  const auto fac = factorize(p - 1);
  const Int p2 = p * p;
  for (Int g = 2;; ++g) {
    bool primitive = true;
    for (auto [q, e] : fac) {
      (void)e;
      if (pow_mod(g, (p - 1) / q, p) == 1) {
        primitive = false;
        break;
      }
    }
    // primitive mod p^2 iff g^(p-1) != 1 mod p^2
    if (primitive && pow_mod(g, p - 1, p2) != 1)
      return g;
  }
}

} // namespace

Int primitive_root(Int p) {
  static std::mutex mutex;
  static std::unordered_map<Int, Int> cache;
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(p); it != cache.end())
      return it->second;
  }
  const Int g = compute_primitive_root(p);
  std::lock_guard lock(mutex);
  cache.emplace(p, g);
  return g;
}

namespace {

// log of h to base zeta where zeta has prime order q (mod m)
Int log_prime_order(Int h, Int zeta, Int q, Int m) {
  if (q <= 64) {
    Int acc = 1;
    for (Int j = 0; j < q; ++j) {
      if (acc == h)
        return j;
      acc = mul_mod(acc, zeta, m);
    }
    throw InvalidInput("log_in_cyclic: element not in subgroup");
  }
  const Int step = static_cast<Int>(std::ceil(std::sqrt(static_cast<double>(q))));
  std::unordered_map<Int, Int> baby;
  baby.reserve(static_cast<std::size_t>(step) * 2);
  Int acc = 1;
  for (Int j = 0; j < step; ++j) {
    baby.emplace(acc, j);
    acc = mul_mod(acc, zeta, m);
  }
  const Int giant = inverse_mod(pow_mod(zeta, step, m), m);
  Int cur = h;
  for (Int i = 0; i <= step; ++i) {
    if (auto it = baby.find(cur); it != baby.end())
      return mod_floor(i * step + it->second, q);
    cur = mul_mod(cur, giant, m);
  }
  throw InvalidInput("log_in_cyclic: element not in subgroup");
}

} // namespace

Int log_in_cyclic(Int h, Int zeta, Int order, Int m) {
  h = mod_floor(h, m);
  if (order == 1)
    return 0;
  Int result = 0, modulus = 1;
  for (auto [q, e] : factorize(order)) {
    const Int qe = ipow(q, static_cast<unsigned>(e));
    const Int cofactor = order / qe;
    const Int zq = pow_mod(zeta, cofactor, m);   // order q^e
    const Int hq = pow_mod(h, cofactor, m);
    const Int gamma = pow_mod(zq, qe / q, m);    // order q
    Int x = 0, qk = 1;
    for (int k = 0; k < e; ++k) {
      // (zq^-x * hq)^(q^(e-1-k)) = gamma^digit
      const Int shifted = mul_mod(hq, inverse_mod(pow_mod(zq, x, m), m), m);
      const Int probe = pow_mod(shifted, qe / (qk * q), m);
      x += log_prime_order(probe, gamma, q, m) * qk;
      qk *= q;
    }
    // combine x mod qe with result mod modulus
    const Int t = mul_mod(mod_floor(x - result, qe), inverse_mod(modulus % qe, qe), qe);
    result += modulus * t;
    modulus *= qe;
  }
  if (pow_mod(zeta, result, m) != h)
    throw InvalidInput("log_in_cyclic: element not in subgroup");
  return result;
}

Int tame_log_mod(Int p, Int x, Int m) {
  if (p == 2) {
    if (m == 1)
      return 0;
    return mod_floor<Int>(x, 4) == 1 ? 0 : 1;
  }
  if ((p - 1) % m != 0)
    throw InvalidInput("tame_log_mod: modulus must divide p-1");
  if (m == 1)
    return 0;
  const Int g = primitive_root(p);
  const Int zeta = pow_mod(g, (p - 1) / m, p);
  const Int h = pow_mod(x, (p - 1) / m, p);
  return log_in_cyclic(h, zeta, m, p);
}

Int wild_log(Int p, int e, Int x) {
  if (p == 2) {
    if (e <= 2)
      return 0;
    const Int mod = Int{1} << e;
    Int y = mod_floor(x, mod);
    if (y % 4 == 3)
      y = mod - y; // multiply by -1
    // 5^(2^k) = 1 + 2^(k+2) mod 2^(k+3)
    Int w = 0;
    for (int k = 0; k + 2 < e; ++k) {
      const Int cur = mul_mod(y, inverse_mod(pow_mod(5, w, mod), mod), mod);
      const Int bit = (cur >> (k + 2)) & 1;
      if (bit)
        w += Int{1} << k;
    }
    return w;
  }
  if (e <= 1)
    return 0;
  const Int mod = ipow(p, static_cast<unsigned>(e));
  // x^(p-1) removes the Teichmueller part; (1+p)^((p-1) w) = x^(p-1)
  const Int y = pow_mod(x, p - 1, mod);
  Int w = 0, pk = 1;
  for (int k = 1; k < e; ++k) {
    // (1+p)^(p^(k-1)) = 1 + p^k mod p^(k+1)
    const Int cur = mul_mod(y, inverse_mod(pow_mod(1 + p, w, mod), mod), mod);
    const Int digit = (cur / (pk * p)) % p;
    w += digit * pk;
    pk *= p;
  }
  const Int wild_mod = mod / p;
  return mul_mod(w, inverse_mod(mod_floor(p - 1, wild_mod), wild_mod), wild_mod);
}

DiscreteLog discrete_log(Int p, int e, Int x) {
  if (!is_prime(p) || e < 1)
    throw InvalidInput("discrete_log: need prime p and e >= 1");
  if (x % p == 0)
    throw InvalidInput("discrete_log: x must be coprime to p");
  DiscreteLog out;
  if (p == 2) {
    out.generator = -1;
    out.tame_modulus = e >= 2 ? 2 : 1;
    out.tame = e >= 2 ? tame_log_mod(2, x, 2) : 0;
    out.wild_modulus = e >= 3 ? (Int{1} << (e - 2)) : 1;
    out.wild = wild_log(2, e, x);
    return out;
  }
  out.generator = primitive_root(p);
  out.tame_modulus = p - 1;
  out.tame = tame_log_mod(p, x, p - 1);
  out.wild_modulus = ipow(p, static_cast<unsigned>(e - 1));
  out.wild = wild_log(p, e, x);
  return out;
}

} // namespace hnp
