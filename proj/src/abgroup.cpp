#include "hnp/abgroup.hpp"

#include "hnp/arith.hpp"
#include "hnp/errors.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace hnp {

// ---------------------------------------------------------------- groups

FinAbGroup FinAbGroup::from_cyclic_factors(const std::vector<Int> &factors) {
  for (Int d : factors)
    if (d < 2)
      throw InvalidInput("cyclic factor must be >= 2, got " +
                         std::to_string(d));
  FinAbGroup g;
  if (factors.empty())
    return g;
  IntMatrix diag = IntMatrix::Zero(static_cast<Eigen::Index>(factors.size()),
                                   static_cast<Eigen::Index>(factors.size()));
  for (std::size_t i = 0; i < factors.size(); ++i)
    diag(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) =
        factors[i];
  const auto snf = smith_form<Int>(diag);
  for (Eigen::Index i = 0; i < snf.diagonal.size(); ++i)
    if (snf.diagonal(i) > 1)
      g.factors_.push_back(snf.diagonal(i));
  return g;
}

FinAbGroup canonicalize(const std::vector<Int> &factors) {
  return FinAbGroup::from_cyclic_factors(factors);
}

Int FinAbGroup::order() const {
  Int n = 1;
  for (Int d : factors_)
    n *= d;
  return n;
}

std::string FinAbGroup::to_string() const {
  if (factors_.empty())
    return "1";
  std::string s;
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    if (i)
      s += ',';
    s += std::to_string(factors_[i]);
  }
  return s;
}

std::ostream &operator<<(std::ostream &os, const FinAbGroup &g) {
  if (g.is_trivial())
    return os << "0";
  for (std::size_t i = 0; i < g.rank(); ++i)
    os << (i ? " + " : "") << "Z/" << g.factor(i);
  return os;
}

// -------------------------------------------------------------- elements

bool Element::is_zero() const {
  return std::all_of(coords.begin(), coords.end(),
                     [](Int c) { return c == 0; });
}

IntVector Element::as_vector() const {
  IntVector v(static_cast<Eigen::Index>(coords.size()));
  for (std::size_t i = 0; i < coords.size(); ++i)
    v(static_cast<Eigen::Index>(i)) = coords[i];
  return v;
}

std::ostream &operator<<(std::ostream &os, const Element &x) {
  os << '(';
  for (std::size_t i = 0; i < x.size(); ++i)
    os << (i ? "," : "") << x[i];
  return os << ')';
}

namespace {

void check_dim(const FinAbGroup &g, const Element &x) {
  if (x.size() != g.rank())
    throw InvalidInput("element has " + std::to_string(x.size()) +
                       " coordinates, group has rank " +
                       std::to_string(g.rank()));
}

} // namespace

Element make_element(const FinAbGroup &g, std::vector<Int> coords) {
  if (coords.size() != g.rank())
    throw InvalidInput("element dimension mismatch");
  for (std::size_t i = 0; i < coords.size(); ++i)
    coords[i] = mod_floor(coords[i], g.factor(i));
  return Element(std::move(coords));
}

Element zero_element(const FinAbGroup &g) {
  return Element(std::vector<Int>(g.rank(), 0));
}

Element basis_element(const FinAbGroup &g, std::size_t i) {
  Element e = zero_element(g);
  e.coords.at(i) = 1;
  return e;
}

Element add(const FinAbGroup &g, const Element &x, const Element &y) {
  check_dim(g, x);
  check_dim(g, y);
  Element r = x;
  for (std::size_t i = 0; i < r.size(); ++i) {
    r.coords[i] += y[i];
    if (r.coords[i] >= g.factor(i))
      r.coords[i] -= g.factor(i);
  }
  return r;
}

Element negate(const FinAbGroup &g, const Element &x) {
  check_dim(g, x);
  Element r = x;
  for (std::size_t i = 0; i < r.size(); ++i)
    r.coords[i] = r.coords[i] == 0 ? 0 : g.factor(i) - r.coords[i];
  return r;
}

Element scale(const FinAbGroup &g, Int k, const Element &x) {
  check_dim(g, x);
  Element r = x;
  for (std::size_t i = 0; i < r.size(); ++i)
    r.coords[i] = mod_floor(mul_mod(mod_floor(k, g.factor(i)), x[i],
                                    g.factor(i)),
                            g.factor(i));
  return r;
}

Element subtract(const FinAbGroup &g, const Element &x, const Element &y) {
  return add(g, x, negate(g, y));
}

Int element_order(const FinAbGroup &g, const Element &x) {
  check_dim(g, x);
  Int ord = 1;
  for (std::size_t i = 0; i < x.size(); ++i)
    ord = std::lcm(ord, g.factor(i) / std::gcd(g.factor(i), x[i]));
  return ord;
}

std::vector<Element> all_elements(const FinAbGroup &g) {
  std::vector<Element> out;
  out.reserve(static_cast<std::size_t>(g.order()));
  Element cur = zero_element(g);
  while (true) {
    out.push_back(cur);
    std::size_t i = g.rank();
    while (i > 0) {
      --i;
      if (++cur.coords[i] < g.factor(i))
        break;
      cur.coords[i] = 0;
      if (i == 0)
        return out;
    }
    if (g.rank() == 0)
      return out;
  }
}

// ------------------------------------------------------------- subgroups

Int Subgroup::index() const {
  Int idx = 1;
  for (Eigen::Index i = 0; i < basis_.rows(); ++i)
    idx *= basis_(i, i);
  return idx;
}

Int Subgroup::order() const { return ambient_.order() / index(); }

bool Subgroup::contains(const Element &x) const {
  check_dim(ambient_, x);
  return hermite_contains<Int>(basis_, x.as_vector());
}

bool Subgroup::is_subgroup_of(const Subgroup &other) const {
  if (ambient_ != other.ambient_)
    return false;
  for (const auto &g : generators())
    if (!other.contains(g))
      return false;
  return true;
}

std::vector<Element> Subgroup::generators() const {
  std::vector<Element> gens;
  for (Eigen::Index j = 0; j < basis_.cols(); ++j) {
    std::vector<Int> c(static_cast<std::size_t>(basis_.rows()));
    for (Eigen::Index i = 0; i < basis_.rows(); ++i)
      c[static_cast<std::size_t>(i)] =
          mod_floor(basis_(i, j), ambient_.factor(static_cast<std::size_t>(i)));
    Element e(std::move(c));
    if (!e.is_zero())
      gens.push_back(std::move(e));
  }
  return gens;
}

bool Subgroup::operator==(const Subgroup &other) const {
  return ambient_ == other.ambient_ && basis_ == other.basis_;
}

std::strong_ordering Subgroup::operator<=>(const Subgroup &other) const {
  if (auto c = ambient_ <=> other.ambient_; c != 0)
    return c;
  // column-major lexicographic order on the canonical matrix
  for (Eigen::Index k = 0; k < basis_.size(); ++k)
    if (auto c = basis_.data()[k] <=> other.basis_.data()[k]; c != 0)
      return c;
  return std::strong_ordering::equal;
}

std::size_t Subgroup::hash() const {
  std::size_t seed = static_cast<std::size_t>(basis_.size());
  for (Eigen::Index k = 0; k < basis_.size(); ++k)
    seed ^= std::hash<Int>{}(basis_.data()[k]) + 0x9e3779b97f4a7c15ULL +
            (seed << 6) + (seed >> 2);
  return seed;
}

Subgroup subgroup_from_generators(const FinAbGroup &g,
                                  const std::vector<Element> &gens) {
  IntMatrix cols(static_cast<Eigen::Index>(g.rank()),
                 static_cast<Eigen::Index>(gens.size()));
  for (std::size_t j = 0; j < gens.size(); ++j) {
    check_dim(g, gens[j]);
    cols.col(static_cast<Eigen::Index>(j)) = gens[j].as_vector();
  }
  Subgroup h;
  h.ambient_ = g;
  h.basis_ = hermite_lattice<Int>(cols, g.moduli());
  return h;
}

Subgroup trivial_subgroup(const FinAbGroup &g) {
  return subgroup_from_generators(g, {});
}

Subgroup full_subgroup(const FinAbGroup &g) {
  std::vector<Element> gens;
  for (std::size_t i = 0; i < g.rank(); ++i)
    gens.push_back(basis_element(g, i));
  return subgroup_from_generators(g, gens);
}

Subgroup join(const Subgroup &h, const Subgroup &k) {
  if (h.ambient_ != k.ambient_)
    throw InvalidInput("join: subgroups of different groups");
  Subgroup r = h;
  for (Eigen::Index j = 0; j < k.basis_.cols(); ++j)
    hermite_insert<Int>(r.basis_, k.basis_.col(j), r.ambient_.moduli());
  hermite_reduce(r.basis_);
  return r;
}

Subgroup join(const Subgroup &h, const Element &x) {
  check_dim(h.ambient_, x);
  Subgroup r = h;
  hermite_insert<Int>(r.basis_, x.as_vector(), r.ambient_.moduli());
  hermite_reduce(r.basis_);
  return r;
}

Subgroup torsion(const FinAbGroup &g, Int p) {
  if (!is_prime(p))
    throw InvalidInput("torsion: " + std::to_string(p) + " is not prime");
  std::vector<Element> gens;
  for (std::size_t i = 0; i < g.rank(); ++i)
    gens.push_back(scale(g, g.factor(i) / std::gcd(g.factor(i), p),
                         basis_element(g, i)));
  return subgroup_from_generators(g, gens);
}

Subgroup primary_part(const FinAbGroup &g, Int p) {
  std::vector<Element> gens;
  for (std::size_t i = 0; i < g.rank(); ++i) {
    Int d = g.factor(i), pe = 1;
    while (d % p == 0) {
      d /= p;
      pe *= p;
    }
    gens.push_back(scale(g, g.factor(i) / pe, basis_element(g, i)));
  }
  return subgroup_from_generators(g, gens);
}

std::vector<Element> subgroup_elements(const Subgroup &h) {
  std::vector<Element> out;
  for (auto &x : all_elements(h.ambient()))
    if (h.contains(x))
      out.push_back(std::move(x));
  return out;
}

bool is_cyclic(const FinAbGroup &g) { return g.rank() <= 1; }

Int smallest_prime_divisor(const FinAbGroup &g) {
  if (g.is_trivial())
    throw InvalidInput("trivial group has no prime divisor");
  return factorize(g.exponent()).front().first;
}

// -------------------------------------------------------- homomorphisms

Homomorphism make_homomorphism(const FinAbGroup &source,
                               const FinAbGroup &target, IntMatrix matrix) {
  if (matrix.rows() != static_cast<Eigen::Index>(target.rank()) ||
      matrix.cols() != static_cast<Eigen::Index>(source.rank()))
    throw InvalidInput("homomorphism matrix has the wrong shape");
  for (Eigen::Index i = 0; i < matrix.rows(); ++i)
    for (Eigen::Index j = 0; j < matrix.cols(); ++j)
      matrix(i, j) = mod_floor(matrix(i, j),
                               target.factor(static_cast<std::size_t>(i)));
  for (Eigen::Index j = 0; j < matrix.cols(); ++j) {
    const Int dj = source.factor(static_cast<std::size_t>(j));
    for (Eigen::Index i = 0; i < matrix.rows(); ++i)
      if (mul_mod(dj, matrix(i, j),
                  target.factor(static_cast<std::size_t>(i))) != 0)
        throw InvalidInput("homomorphism is not well defined on generator " +
                           std::to_string(j));
  }
  return Homomorphism{source, target, std::move(matrix)};
}

Homomorphism identity_map(const FinAbGroup &g) {
  const auto n = static_cast<Eigen::Index>(g.rank());
  return Homomorphism{g, g, IntMatrix::Identity(n, n)};
}

Homomorphism zero_map(const FinAbGroup &source, const FinAbGroup &target) {
  return Homomorphism{source, target,
                      IntMatrix::Zero(static_cast<Eigen::Index>(target.rank()),
                                      static_cast<Eigen::Index>(source.rank()))};
}

Element apply(const Homomorphism &f, const Element &x) {
  check_dim(f.source, x);
  std::vector<Int> c(f.target.rank(), 0);
  for (std::size_t i = 0; i < c.size(); ++i) {
    const Int m = f.target.factor(i);
    Int acc = 0;
    for (std::size_t j = 0; j < x.size(); ++j)
      acc = (acc + mul_mod(f.matrix(static_cast<Eigen::Index>(i),
                                    static_cast<Eigen::Index>(j)),
                           x[j], m)) %
            m;
    c[i] = acc;
  }
  return Element(std::move(c));
}

Homomorphism compose(const Homomorphism &g, const Homomorphism &f) {
  if (f.target != g.source)
    throw InvalidInput("compose: target/source mismatch");
  IntMatrix m(static_cast<Eigen::Index>(g.target.rank()),
              static_cast<Eigen::Index>(f.source.rank()));
  for (std::size_t j = 0; j < f.source.rank(); ++j) {
    const Element img = apply(g, apply(f, basis_element(f.source, j)));
    for (std::size_t i = 0; i < img.size(); ++i)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = img[i];
  }
  return Homomorphism{f.source, g.target, std::move(m)};
}

Subgroup image(const Homomorphism &f) {
  std::vector<Element> gens;
  for (std::size_t j = 0; j < f.source.rank(); ++j)
    gens.push_back(apply(f, basis_element(f.source, j)));
  return subgroup_from_generators(f.target, gens);
}

Subgroup image(const Homomorphism &f, const Subgroup &h) {
  if (h.ambient() != f.source)
    throw InvalidInput("image: subgroup is not in the source");
  std::vector<Element> gens;
  for (const auto &x : h.generators())
    gens.push_back(apply(f, x));
  return subgroup_from_generators(f.target, gens);
}

bool operator==(const Homomorphism &f, const Homomorphism &g) {
  return f.source == g.source && f.target == g.target && f.matrix == g.matrix;
}

Quotient quotient_map(const FinAbGroup &g, const Subgroup &h) {
  if (h.ambient() != g)
    throw InvalidInput("quotient_map: subgroup lives in a different group");
  const auto snf = smith_form<Int>(h.hermite_basis());
  std::vector<Int> factors;
  std::vector<Eigen::Index> rows;
  for (Eigen::Index i = 0; i < snf.diagonal.size(); ++i)
    if (snf.diagonal(i) > 1) {
      factors.push_back(snf.diagonal(i));
      rows.push_back(i);
    }
  // the Smith diagonal is already a divisibility chain
  FinAbGroup b = FinAbGroup::from_cyclic_factors(factors);
  IntMatrix m(static_cast<Eigen::Index>(rows.size()),
              static_cast<Eigen::Index>(g.rank()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      m(static_cast<Eigen::Index>(r), j) =
          mod_floor(snf.left(rows[r], j), factors[r]);
  return Quotient{b, make_homomorphism(g, b, std::move(m))};
}

// ------------------------------------------------------- exterior square

std::size_t WedgeSquare::pair_index(std::size_t i, std::size_t j) const {
  const std::size_t n = base.rank();
  // pairs (0,1..n-1), (1,2..n-1), ...
  return i * n - i * (i + 1) / 2 + (j - i - 1);
}

WedgeSquare wedge_square(const FinAbGroup &g) {
  WedgeSquare w;
  w.base = g;
  std::vector<Int> factors;
  for (std::size_t i = 0; i < g.rank(); ++i)
    for (std::size_t j = i + 1; j < g.rank(); ++j) {
      w.pairs.emplace_back(i, j);
      factors.push_back(std::gcd(g.factor(i), g.factor(j)));
    }
  w.structure = FinAbGroup::from_cyclic_factors(factors);
  return w;
}

Element wedge_pair(const WedgeSquare &w, const Element &a, const Element &b) {
  check_dim(w.base, a);
  check_dim(w.base, b);
  std::vector<Int> c(w.pairs.size());
  for (std::size_t k = 0; k < w.pairs.size(); ++k) {
    const auto [i, j] = w.pairs[k];
    const Int m = w.structure.factor(k);
    c[k] = mod_floor(mul_mod(a[i], b[j], m) - mul_mod(a[j], b[i], m), m);
  }
  return Element(std::move(c));
}

Element wedge_pair(const FinAbGroup &g, const Element &a, const Element &b) {
  return wedge_pair(wedge_square(g), a, b);
}

Homomorphism wedge_map(const Homomorphism &f) {
  const WedgeSquare ws = wedge_square(f.source);
  const WedgeSquare wt = wedge_square(f.target);
  IntMatrix m(static_cast<Eigen::Index>(wt.pairs.size()),
              static_cast<Eigen::Index>(ws.pairs.size()));
  for (std::size_t k = 0; k < ws.pairs.size(); ++k) {
    const auto [i, j] = ws.pairs[k];
    const Element img = wedge_pair(wt, apply(f, basis_element(f.source, i)),
                                   apply(f, basis_element(f.source, j)));
    for (std::size_t r = 0; r < img.size(); ++r)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) = img[r];
  }
  return make_homomorphism(ws.structure, wt.structure, std::move(m));
}

Subgroup wedge_image(const WedgeSquare &w, const Subgroup &h) {
  if (h.ambient() != w.base)
    throw InvalidInput("wedge_image: subgroup lives in a different group");
  const auto gens = h.generators();
  std::vector<Element> images;
  for (std::size_t a = 0; a < gens.size(); ++a)
    for (std::size_t b = a + 1; b < gens.size(); ++b)
      images.push_back(wedge_pair(w, gens[a], gens[b]));
  return subgroup_from_generators(w.structure, images);
}

Subgroup wedge_image_join(const FinAbGroup &g,
                          const std::vector<Subgroup> &families) {
  const WedgeSquare w = wedge_square(g);
  Subgroup acc = trivial_subgroup(w.structure);
  for (const auto &h : families)
    acc = join(acc, wedge_image(w, h));
  return acc;
}

// ------------------------------------------------------------------ Q/Z

QZ QZ::make(Int num, Int den) {
  if (den <= 0)
    throw InvalidInput("QZ denominator must be positive");
  num = mod_floor(num, den);
  const Int g = std::gcd(num, den);
  if (num == 0)
    return QZ{0, 1};
  return QZ{num / g, den / g};
}

std::string QZ::to_string() const {
  if (num == 0)
    return "0";
  return std::to_string(num) + "/" + std::to_string(den);
}

QZ operator+(const QZ &a, const QZ &b) {
  const Int l = std::lcm(a.den, b.den);
  return QZ::make(a.num * (l / a.den) + b.num * (l / b.den), l);
}

QZ operator-(const QZ &a) { return QZ::make(-a.num, a.den); }

QZ operator*(Int k, const QZ &a) {
  return QZ::make(mul_mod(mod_floor(k, a.den), a.num, a.den), a.den);
}

// ------------------------------------------------------ alternating pairs

AltPairing::AltPairing(FinAbGroup base)
    : base_(std::move(base)),
      coeffs_(wedge_square(base_).pairs.size(), 0) {}

AltPairing::AltPairing(FinAbGroup base, const std::vector<QZ> &values)
    : AltPairing(std::move(base)) {
  const WedgeSquare w = wedge_square(base_);
  if (values.size() != w.pairs.size())
    throw InvalidInput("AltPairing: expected one value per basis pair");
  for (std::size_t k = 0; k < values.size(); ++k) {
    const Int d = w.structure.factor(k);
    if (d % values[k].den != 0)
      throw InvalidInput("AltPairing: value " + values[k].to_string() +
                         " is not killed by " + std::to_string(d));
    coeffs_[k] = values[k].num * (d / values[k].den);
  }
}

AltPairing AltPairing::from_coefficients(FinAbGroup base,
                                         std::vector<Int> coefficients) {
  AltPairing f(std::move(base));
  const WedgeSquare w = wedge_square(f.base_);
  if (coefficients.size() != w.pairs.size())
    throw InvalidInput("AltPairing: coefficient count mismatch");
  for (std::size_t k = 0; k < coefficients.size(); ++k)
    coefficients[k] = mod_floor(coefficients[k], w.structure.factor(k));
  f.coeffs_ = std::move(coefficients);
  return f;
}

QZ AltPairing::value(std::size_t i, std::size_t j) const {
  if (i == j)
    return QZ{};
  if (i > j)
    return -value(j, i);
  const WedgeSquare w = wedge_square(base_);
  const std::size_t k = w.pair_index(i, j);
  return QZ::make(coeffs_[k], w.structure.factor(k));
}

QZ AltPairing::evaluate(const Element &x, const Element &y) const {
  check_dim(base_, x);
  check_dim(base_, y);
  const Int e = base_.exponent();
  Int acc = 0;
  std::size_t k = 0;
  for (std::size_t i = 0; i < base_.rank(); ++i)
    for (std::size_t j = i + 1; j < base_.rank(); ++j, ++k) {
      if (coeffs_[k] == 0)
        continue;
      const Int di = base_.factor(i);
      // b(e_i, e_j) = c / d_i = c * (e / d_i) / e
      const Int minor =
          mod_floor(mul_mod(x[i], y[j], di) - mul_mod(x[j], y[i], di), di);
      acc = (acc + mul_mod(mul_mod(coeffs_[k], minor, di), e / di, e)) % e;
    }
  return QZ::make(acc, e);
}

bool AltPairing::is_zero() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(),
                     [](Int c) { return c == 0; });
}

AltPairing pullback_pairing(const AltPairing &f, const Homomorphism &pi) {
  if (pi.target != f.base())
    throw InvalidInput("pullback_pairing: map target is not the pairing base");
  const FinAbGroup &a = pi.source;
  const WedgeSquare w = wedge_square(a);
  std::vector<QZ> values;
  values.reserve(w.pairs.size());
  for (const auto &[i, j] : w.pairs)
    values.push_back(f.evaluate(apply(pi, basis_element(a, i)),
                                apply(pi, basis_element(a, j))));
  return AltPairing(a, values);
}

} // namespace hnp
