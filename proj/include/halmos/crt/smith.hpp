#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <cstdlib>
#include <string>
#include <utility>

#include "halmos/errors.hpp"

namespace halmos::crt {

using Int = std::int64_t;
using IMat = Eigen::Matrix<Int, Eigen::Dynamic, Eigen::Dynamic>;
using IVec = Eigen::Matrix<Int, Eigen::Dynamic, 1>;

namespace detail {

inline Int checked_mul(Int a, Int b) {
  Int r;
  if (__builtin_mul_overflow(a, b, &r)) throw PresentationError("integer overflow in exact arithmetic");
  return r;
}

inline Int checked_add(Int a, Int b) {
  Int r;
  if (__builtin_add_overflow(a, b, &r)) throw PresentationError("integer overflow in exact arithmetic");
  return r;
}

inline void row_axpy(IMat& M, Eigen::Index dst, Eigen::Index src, Int q) {
  for (Eigen::Index j = 0; j < M.cols(); ++j) M(dst, j) = checked_add(M(dst, j), checked_mul(q, M(src, j)));
}

inline void col_axpy(IMat& M, Eigen::Index dst, Eigen::Index src, Int q) {
  for (Eigen::Index i = 0; i < M.rows(); ++i) M(i, dst) = checked_add(M(i, dst), checked_mul(q, M(i, src)));
}

}  // namespace detail

inline IMat mul(const IMat& A, const IMat& B) {
  if (A.cols() != B.rows()) throw PresentationError("integer matrix product: shape mismatch");
  IMat C = IMat::Zero(A.rows(), B.cols());
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index k = 0; k < A.cols(); ++k) {
      if (A(i, k) == 0) continue;
      for (Eigen::Index j = 0; j < B.cols(); ++j)
        C(i, j) = detail::checked_add(C(i, j), detail::checked_mul(A(i, k), B(k, j)));
    }
  return C;
}

struct SmithForm {
  IMat U, D, V;  // U * A * V = D
  Eigen::Index rank = 0;
};

inline SmithForm smith_normal_form(const IMat& A) {
  using detail::col_axpy;
  using detail::row_axpy;
  const Eigen::Index m = A.rows(), n = A.cols();
  SmithForm sf;
  sf.D = A;
  sf.U = IMat::Identity(m, m);
  sf.V = IMat::Identity(n, n);
  IMat& D = sf.D;
  Eigen::Index t = 0;
  for (; t < std::min(m, n); ++t) {
    for (;;) {
      // Pivot: smallest nonzero magnitude in the trailing block.
      Eigen::Index pi = -1, pj = -1;
      Int best = 0;
      for (Eigen::Index i = t; i < m; ++i)
        for (Eigen::Index j = t; j < n; ++j)
          if (D(i, j) != 0 && (pi < 0 || std::llabs(D(i, j)) < best)) {
            best = std::llabs(D(i, j));
            pi = i;
            pj = j;
          }
      if (pi < 0) {
        sf.rank = t;
        return sf;
      }
      D.row(t).swap(D.row(pi));
      sf.U.row(t).swap(sf.U.row(pi));
      D.col(t).swap(D.col(pj));
      sf.V.col(t).swap(sf.V.col(pj));
      bool clean = true;
      for (Eigen::Index i = t + 1; i < m; ++i) {
        Int q = D(i, t) / D(t, t);
        if (q != 0) {
          row_axpy(D, i, t, -q);
          row_axpy(sf.U, i, t, -q);
        }
        if (D(i, t) != 0) clean = false;
      }
      for (Eigen::Index j = t + 1; j < n; ++j) {
        Int q = D(t, j) / D(t, t);
        if (q != 0) {
          col_axpy(D, j, t, -q);
          col_axpy(sf.V, j, t, -q);
        }
        if (D(t, j) != 0) clean = false;
      }
      if (!clean) continue;
      // Divisibility: fold any offending row into row t and start over.
      Eigen::Index bad = -1;
      for (Eigen::Index i = t + 1; i < m && bad < 0; ++i)
        for (Eigen::Index j = t + 1; j < n; ++j)
          if (D(i, j) % D(t, t) != 0) {
            bad = i;
            break;
          }
      if (bad < 0) break;
      row_axpy(D, t, bad, 1);
      row_axpy(sf.U, t, bad, 1);
    }
    if (D(t, t) < 0) {
      D.row(t) *= -1;
      sf.U.row(t) *= -1;
    }
  }
  sf.rank = t;
  for (Eigen::Index k = 0; k < std::min(m, n); ++k)
    if (D(k, k) == 0) {
      sf.rank = k;
      break;
    }
  return sf;
}

// Exact determinant by fraction-free (Bareiss) elimination.
inline Int determinant(IMat A) {
  const Eigen::Index n = A.rows();
  if (A.cols() != n) throw PresentationError("determinant: square matrix expected");
  if (n == 0) return 1;
  Int sign = 1, prev = 1;
  for (Eigen::Index k = 0; k < n - 1; ++k) {
    if (A(k, k) == 0) {
      Eigen::Index p = k + 1;
      while (p < n && A(p, k) == 0) ++p;
      if (p == n) return 0;
      A.row(k).swap(A.row(p));
      sign = -sign;
    }
    for (Eigen::Index i = k + 1; i < n; ++i)
      for (Eigen::Index j = k + 1; j < n; ++j) {
        Int v = detail::checked_add(detail::checked_mul(A(i, j), A(k, k)), -detail::checked_mul(A(i, k), A(k, j)));
        A(i, j) = v / prev;
      }
    prev = A(k, k);
  }
  return sign * A(n - 1, n - 1);
}

// Inverse of a unimodular matrix, exact.
inline IMat unimodular_inverse(const IMat& A) {
  if (A.rows() != A.cols()) throw PresentationError("unimodular_inverse: square matrix expected");
  SmithForm sf = smith_normal_form(A);
  for (Eigen::Index k = 0; k < A.rows(); ++k)
    if (sf.D(k, k) != 1) throw PresentationError("unimodular_inverse: matrix is not invertible over the integers");
  // U A V = I, so A^{-1} = V U.
  return mul(sf.V, sf.U);
}

}  // namespace halmos::crt
