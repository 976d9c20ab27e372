#pragma once

// Integer normal forms on Eigen matrices. The kernels are templated on the
// scalar so that callers can trade range for speed; every entry stays exact.

#include <Eigen/Core>

#include <algorithm>
#include <cstdlib>
#include <span>
#include <tuple>
#include <utility>

namespace hnp {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Floor division and the matching non-negative remainder.
template <typename Scalar> constexpr Scalar floor_div(Scalar a, Scalar b) {
  Scalar q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0)))
    --q;
  return q;
}

template <typename Scalar> constexpr Scalar mod_floor(Scalar a, Scalar m) {
  Scalar r = a % m;
  return r < 0 ? r + m : r;
}

/// Extended gcd: returns (g, x, y) with x*a + y*b = g >= 0.
template <typename Scalar>
constexpr std::tuple<Scalar, Scalar, Scalar> ext_gcd(Scalar a, Scalar b) {
  Scalar x0 = 1, y0 = 0, x1 = 0, y1 = 1;
  while (b != 0) {
    Scalar q = a / b;
    std::tie(a, b) = std::make_pair(b, a - q * b);
    std::tie(x0, x1) = std::make_pair(x1, x0 - q * x1);
    std::tie(y0, y1) = std::make_pair(y1, y0 - q * y1);
  }
  if (a < 0)
    return {-a, -x0, -y0};
  return {a, x0, y0};
}

/// Upper-triangular column Hermite form of a full-rank lattice L in Z^n
/// containing every moduli[i] * e_i. Columns of `basis` span L, the diagonal
/// is positive and each entry above a pivot is reduced into [0, pivot).
///
/// hermite_insert adds one vector to the lattice; the result is left
/// unreduced above the diagonal until hermite_reduce is called.
template <typename Scalar>
void hermite_insert(MatrixX<Scalar> &basis, VectorX<Scalar> v,
                    std::span<const Scalar> moduli) {
  const Eigen::Index n = basis.rows();
  for (Eigen::Index i = n - 1; i >= 0; --i) {
    for (Eigen::Index k = 0; k <= i; ++k)
      v(k) = mod_floor(v(k), moduli[k]);
    if (v(i) == 0)
      continue;
    const Scalar a = basis(i, i);
    const Scalar b = v(i);
    auto [g, x, y] = ext_gcd(a, b);
    VectorX<Scalar> pivot = x * basis.col(i) + y * v;
    v = (a / g) * v - (b / g) * basis.col(i);
    for (Eigen::Index k = 0; k < i; ++k)
      pivot(k) = mod_floor(pivot(k), moduli[k]);
    basis.col(i) = pivot;
  }
}

template <typename Scalar> void hermite_reduce(MatrixX<Scalar> &basis) {
  const Eigen::Index n = basis.rows();
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = j - 1; i >= 0; --i) {
      const Scalar q = floor_div(basis(i, j), basis(i, i));
      if (q != 0)
        basis.col(j) -= q * basis.col(i);
    }
  }
}

/// Hermite basis of the lattice spanned by the columns of `gens` together
/// with moduli[i] * e_i.
template <typename Scalar>
MatrixX<Scalar> hermite_lattice(const MatrixX<Scalar> &gens,
                                std::span<const Scalar> moduli) {
  const auto n = static_cast<Eigen::Index>(moduli.size());
  MatrixX<Scalar> basis = MatrixX<Scalar>::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    basis(i, i) = moduli[i];
  for (Eigen::Index j = 0; j < gens.cols(); ++j)
    hermite_insert<Scalar>(basis, gens.col(j), moduli);
  hermite_reduce(basis);
  return basis;
}

/// Reduce v against an upper-triangular Hermite basis by back-substitution.
/// Returns true when v lies in the lattice.
template <typename Scalar>
bool hermite_contains(const MatrixX<Scalar> &basis, VectorX<Scalar> v) {
  for (Eigen::Index i = basis.rows() - 1; i >= 0; --i) {
    if (v(i) % basis(i, i) != 0)
      return false;
    const Scalar q = v(i) / basis(i, i);
    if (q != 0)
      v -= q * basis.col(i);
  }
  return true;
}

template <typename Scalar> struct SmithForm {
  VectorX<Scalar> diagonal; // d_1 | d_2 | ... , length min(rows, cols)
  MatrixX<Scalar> left;     // unimodular U
  MatrixX<Scalar> right;    // unimodular V, with U * M * V = diag
};

/// Smith normal form with transforms.
template <typename Scalar> SmithForm<Scalar> smith_form(MatrixX<Scalar> m) {
  const Eigen::Index rows = m.rows(), cols = m.cols();
  MatrixX<Scalar> u = MatrixX<Scalar>::Identity(rows, rows);
  MatrixX<Scalar> v = MatrixX<Scalar>::Identity(cols, cols);
  const Eigen::Index steps = std::min(rows, cols);

  for (Eigen::Index t = 0; t < steps; ++t) {
    while (true) {
      // smallest non-zero entry of the trailing block becomes the pivot
      Eigen::Index pr = -1, pc = -1;
      Scalar best = 0;
      for (Eigen::Index j = t; j < cols; ++j)
        for (Eigen::Index i = t; i < rows; ++i) {
          const Scalar a = m(i, j) < 0 ? -m(i, j) : m(i, j);
          if (a != 0 && (best == 0 || a < best)) {
            best = a;
            pr = i;
            pc = j;
          }
        }
      if (pr < 0)
        break;
      if (pr != t) {
        m.row(pr).swap(m.row(t));
        u.row(pr).swap(u.row(t));
      }
      if (pc != t) {
        m.col(pc).swap(m.col(t));
        v.col(pc).swap(v.col(t));
      }

      bool clean = true;
      for (Eigen::Index i = t + 1; i < rows; ++i) {
        const Scalar q = m(i, t) / m(t, t);
        if (q != 0) {
          m.row(i) -= q * m.row(t);
          u.row(i) -= q * u.row(t);
        }
        clean = clean && m(i, t) == 0;
      }
      for (Eigen::Index j = t + 1; j < cols; ++j) {
        const Scalar q = m(t, j) / m(t, t);
        if (q != 0) {
          m.col(j) -= q * m.col(t);
          v.col(j) -= q * v.col(t);
        }
        clean = clean && m(t, j) == 0;
      }
      if (!clean)
        continue;

      // divisibility: fold an offending row into the pivot row and retry
      Eigen::Index bad = -1;
      for (Eigen::Index i = t + 1; i < rows && bad < 0; ++i)
        for (Eigen::Index j = t + 1; j < cols; ++j)
          if (m(i, j) % m(t, t) != 0) {
            bad = i;
            break;
          }
      if (bad < 0)
        break;
      m.row(t) += m.row(bad);
      u.row(t) += u.row(bad);
    }
    if (m(t, t) < 0) {
      m.row(t) = -m.row(t);
      u.row(t) = -u.row(t);
    }
  }

  SmithForm<Scalar> out;
  out.diagonal = m.diagonal().head(steps);
  out.left = std::move(u);
  out.right = std::move(v);
  return out;
}

} // namespace hnp
