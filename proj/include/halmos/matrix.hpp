#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "halmos/errors.hpp"
#include "halmos/rng.hpp"

namespace halmos {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using RMat = Eigen::MatrixXd;
using Vec = Eigen::VectorXcd;
using Index = Eigen::Index;

inline constexpr cplx I_unit{0.0, 1.0};

enum class SymmetryClass { RealSymmetric, ComplexHermitian, QuaternionSelfDual };

inline std::string to_string(SymmetryClass c) {
  switch (c) {
    case SymmetryClass::RealSymmetric: return "RealSymmetric";
    case SymmetryClass::ComplexHermitian: return "ComplexHermitian";
    case SymmetryClass::QuaternionSelfDual: return "QuaternionSelfDual";
  }
  return "?";
}

inline std::string short_name(SymmetryClass c) {
  switch (c) {
    case SymmetryClass::RealSymmetric: return "R";
    case SymmetryClass::ComplexHermitian: return "C";
    case SymmetryClass::QuaternionSelfDual: return "H";
  }
  return "?";
}

// Accepts both the long labels and the one-letter field names R, C, H.
inline SymmetryClass parse_class(const std::string& s) {
  if (s == "R" || s == "RealSymmetric") return SymmetryClass::RealSymmetric;
  if (s == "C" || s == "ComplexHermitian") return SymmetryClass::ComplexHermitian;
  if (s == "H" || s == "QuaternionSelfDual") return SymmetryClass::QuaternionSelfDual;
  throw DomainError("unknown symmetry class '" + s + "'");
}

// Singular values go through Hermitian eigensolvers: BDCSVD in Eigen 3.4.0 can index out of
// range during deflation on structured inputs.
inline double op_norm(const Mat& X) {
  if (X.size() == 0) return 0.0;
  double scale = X.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  if (X.rows() == X.cols()) {
    double herm = (X - X.adjoint()).cwiseAbs().maxCoeff();
    double anti = (X + X.adjoint()).cwiseAbs().maxCoeff();
    if (herm <= 1e-15 * scale || anti <= 1e-15 * scale) {
      Mat Y = herm <= anti ? Mat(0.5 * (X + X.adjoint())) : Mat((0.5 * I_unit) * (X - X.adjoint()));
      Eigen::SelfAdjointEigenSolver<Mat> es(Y, Eigen::EigenvaluesOnly);
      return std::max(std::abs(es.eigenvalues()(0)), std::abs(es.eigenvalues()(Y.rows() - 1)));
    }
  }
  Mat G = X.rows() <= X.cols() ? Mat(X * X.adjoint()) : Mat(X.adjoint() * X);
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (G + G.adjoint()), Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues()(G.rows() - 1)));
}

// Smallest singular value of a square matrix from the Hermitian dilation [[0, X], [X*, 0]],
// which resolves it to absolute accuracy of order machine epsilon times ||X||.
inline double smallest_singular_value(const Mat& X) {
  if (X.size() == 0) return 0.0;
  if (X.rows() != X.cols()) throw DimensionError("smallest_singular_value: square matrix expected");
  Index n = X.rows();
  Mat D = Mat::Zero(2 * n, 2 * n);
  D.block(0, n, n, n) = X;
  D.block(n, 0, n, n) = X.adjoint();
  Eigen::SelfAdjointEigenSolver<Mat> es(D, Eigen::EigenvaluesOnly);
  double best = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < 2 * n; ++i) best = std::min(best, std::abs(es.eigenvalues()(i)));
  return best;
}

inline Mat kron(const Mat& A, const Mat& B) {
  Mat K(A.rows() * B.rows(), A.cols() * B.cols());
  for (Index i = 0; i < A.rows(); ++i)
    for (Index j = 0; j < A.cols(); ++j) K.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
  return K;
}

inline void require_square(const Mat& X, const char* op) {
  if (X.rows() != X.cols())
    throw DimensionError(std::string(op) + ": expected a square matrix, got " + std::to_string(X.rows()) + "x" +
                         std::to_string(X.cols()));
}

inline void require_even_square(const Mat& X, const char* op) {
  require_square(X, op);
  if (X.rows() % 2 != 0) throw DimensionError(std::string(op) + ": odd dimension " + std::to_string(X.rows()));
}

// J = [[0, -I], [I, 0]] of size 2N.
inline Mat j_matrix(Index n2) {
  if (n2 % 2 != 0) throw DimensionError("j_matrix: odd dimension");
  Index n = n2 / 2;
  Mat J = Mat::Zero(n2, n2);
  J.block(0, n, n, n) = -Mat::Identity(n, n);
  J.block(n, 0, n, n) = Mat::Identity(n, n);
  return J;
}

// [[A,B],[C,D]]^# = [[D^T, -B^T], [-C^T, A^T]].
inline Mat sharp_dual(const Mat& X) {
  require_even_square(X, "sharp_dual");
  Index n = X.rows() / 2;
  Mat Y(X.rows(), X.cols());
  Y.block(0, 0, n, n) = X.block(n, n, n, n).transpose();
  Y.block(0, n, n, n) = -X.block(0, n, n, n).transpose();
  Y.block(n, 0, n, n) = -X.block(n, 0, n, n).transpose();
  Y.block(n, n, n, n) = X.block(0, 0, n, n).transpose();
  return Y;
}

inline Mat quaternion_embed(const Mat& A, const Mat& B) {
  require_square(A, "quaternion_embed");
  if (B.rows() != A.rows() || B.cols() != A.cols())
    throw DimensionError("quaternion_embed: A and B must have the same shape");
  Index n = A.rows();
  Mat Y(2 * n, 2 * n);
  Y.block(0, 0, n, n) = A;
  Y.block(0, n, n, n) = -B.conjugate();
  Y.block(n, 0, n, n) = B;
  Y.block(n, n, n, n) = A.conjugate();
  return Y;
}

// J conj(X) J^{-1}, written out blockwise: [[conj D, -conj C], [-conj B, conj A]].
inline Mat quaternion_conjugate(const Mat& X) {
  require_even_square(X, "quaternion_conjugate");
  Index n = X.rows() / 2;
  Mat Y(X.rows(), X.cols());
  Y.block(0, 0, n, n) = X.block(n, n, n, n).conjugate();
  Y.block(0, n, n, n) = -X.block(n, 0, n, n).conjugate();
  Y.block(n, 0, n, n) = -X.block(0, n, n, n).conjugate();
  Y.block(n, n, n, n) = X.block(0, 0, n, n).conjugate();
  return Y;
}

inline double quaternion_residual(const Mat& X) { return op_norm(X - quaternion_conjugate(X)); }

inline bool is_quaternionic(const Mat& X, double rel_tol = 1e-10) {
  require_even_square(X, "is_quaternionic");
  return quaternion_residual(X) <= rel_tol * op_norm(X);
}

// Exact-form variant: the block pattern [[A, -conj B], [B, conj A]] holds entrywise.
inline bool is_quaternionic_exact(const Mat& X) {
  require_even_square(X, "is_quaternionic_exact");
  return (X - quaternion_conjugate(X)).cwiseAbs().maxCoeff() == 0.0;
}

inline Mat quaternion_project(const Mat& X) { return 0.5 * (X + quaternion_conjugate(X)); }

inline bool is_real(const Mat& X) { return X.size() == 0 || X.imag().cwiseAbs().maxCoeff() == 0.0; }

inline Mat hermitize(const Mat& X) {
  require_square(X, "hermitize");
  return 0.5 * (X + X.adjoint());
}

inline double self_adjoint_residual(const Mat& X) {
  double n = X.norm();
  return n == 0.0 ? 0.0 : (X - X.adjoint()).norm() / n;
}

// f(X) for self-adjoint X through a full eigendecomposition; real input stays exactly real.
inline Mat spectral_apply(const Mat& X, const std::function<double(double)>& f) {
  require_square(X, "spectral_apply");
  if (X.size() == 0) return X;
  if (is_real(X)) {
    RMat Xr = X.real();
    Xr = 0.5 * (Xr + Xr.transpose());
    Eigen::SelfAdjointEigenSolver<RMat> es(Xr);
    Eigen::VectorXd w = es.eigenvalues().unaryExpr(f);
    RMat Y = es.eigenvectors() * w.asDiagonal() * es.eigenvectors().transpose();
    Y = 0.5 * (Y + Y.transpose());
    return Y.cast<cplx>();
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitize(X));
  Eigen::VectorXd w = es.eigenvalues().unaryExpr(f);
  return hermitize(es.eigenvectors() * w.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint());
}

inline Mat clamp_spectrum(const Mat& X) {
  require_square(X, "clamp_spectrum");
  if (self_adjoint_residual(X) > 1e-12)
    throw StructureError("clamp_spectrum: input is not self-adjoint (relative residual " +
                         std::to_string(self_adjoint_residual(X)) + ")");
  bool quaternionic = X.rows() % 2 == 0 && X.rows() > 0 && !is_real(X) && is_quaternionic(X);
  Mat Y = spectral_apply(X, [](double x) { return std::clamp(x, -1.0, 1.0); });
  return quaternionic ? hermitize(quaternion_project(Y)) : Y;
}

// Nearest matrix of the class in Frobenius norm, made self-adjoint.
inline Mat class_project(const Mat& X, SymmetryClass cls) {
  Mat Y = hermitize(X);
  switch (cls) {
    case SymmetryClass::RealSymmetric: return Y.real().cast<cplx>();
    case SymmetryClass::ComplexHermitian: return Y;
    case SymmetryClass::QuaternionSelfDual: return hermitize(quaternion_project(Y));
  }
  return Y;
}

inline bool in_class(const Mat& X, SymmetryClass cls, double rel_tol = 1e-10) {
  if (X.rows() != X.cols()) return false;
  if (self_adjoint_residual(X) > rel_tol) return false;
  switch (cls) {
    case SymmetryClass::RealSymmetric: return is_real(X);
    case SymmetryClass::ComplexHermitian: return true;
    case SymmetryClass::QuaternionSelfDual: return X.rows() % 2 == 0 && is_quaternionic(X, rel_tol);
  }
  return false;
}

struct MatrixTuple {
  SymmetryClass cls = SymmetryClass::ComplexHermitian;
  Index n = 0;
  std::vector<Mat> mats;

  int d() const { return static_cast<int>(mats.size()); }
  const Mat& operator[](std::size_t r) const { return mats[r]; }
};

inline void validate(const MatrixTuple& T) {
  for (std::size_t r = 0; r < T.mats.size(); ++r) {
    const Mat& H = T.mats[r];
    if (H.rows() != T.n || H.cols() != T.n)
      throw DimensionError("tuple matrix " + std::to_string(r) + " has shape " + std::to_string(H.rows()) + "x" +
                           std::to_string(H.cols()) + ", expected " + std::to_string(T.n));
    if (!H.allFinite()) throw StructureError("tuple matrix " + std::to_string(r) + " has non-finite entries");
    if (self_adjoint_residual(H) > 1e-12)
      throw StructureError("tuple matrix " + std::to_string(r) + " is not self-adjoint");
  }
  if (T.cls == SymmetryClass::QuaternionSelfDual && T.n % 2 != 0)
    throw DimensionError("quaternionic tuple needs even complex dimension");
  for (std::size_t r = 0; r < T.mats.size(); ++r)
    if (!in_class(T.mats[r], T.cls, 1e-10))
      throw StructureError("tuple matrix " + std::to_string(r) + " violates the " + to_string(T.cls) + " invariant");
}

inline MatrixTuple make_tuple(SymmetryClass cls, std::vector<Mat> mats) {
  MatrixTuple T;
  T.cls = cls;
  T.n = mats.empty() ? 0 : mats.front().rows();
  T.mats = std::move(mats);
  validate(T);
  return T;
}

// Builds a tuple from matrices that are in the class up to rounding, projecting them exactly.
inline MatrixTuple make_tuple_projected(SymmetryClass cls, const std::vector<Mat>& mats) {
  std::vector<Mat> out;
  out.reserve(mats.size());
  for (const Mat& H : mats) out.push_back(class_project(H, cls));
  return make_tuple(cls, std::move(out));
}

inline MatrixTuple direct_sum(const MatrixTuple& A, const MatrixTuple& B) {
  if (A.cls != B.cls) throw StructureError("direct_sum: class mismatch");
  if (A.d() != B.d()) throw DimensionError("direct_sum: tuple lengths differ");
  MatrixTuple T;
  T.cls = A.cls;
  T.n = A.n + B.n;
  for (int r = 0; r < A.d(); ++r) {
    Mat S = Mat::Zero(T.n, T.n);
    if (A.cls == SymmetryClass::QuaternionSelfDual) {
      // Keep the [[A, -conj B], [B, conj A]] layout: interleave the two halves.
      Index a = A.n / 2, b = B.n / 2, h = a + b;
      const Mat &X = A.mats[r], &Y = B.mats[r];
      for (int bi = 0; bi < 2; ++bi)
        for (int bj = 0; bj < 2; ++bj) {
          S.block(bi * h, bj * h, a, a) = X.block(bi * a, bj * a, a, a);
          S.block(bi * h + a, bj * h + a, b, b) = Y.block(bi * b, bj * b, b, b);
        }
    } else {
      S.topLeftCorner(A.n, A.n) = A.mats[r];
      S.bottomRightCorner(B.n, B.n) = B.mats[r];
    }
    T.mats.push_back(S);
  }
  return T;
}

inline Mat random_gaussian(Index n, Rng& rng) {
  Mat X(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) X(i, j) = cplx(rng.normal(), rng.normal());
  return X;
}

// Random self-adjoint matrix of the class, scaled to operator norm exactly `norm`.
inline Mat random_class_hermitian(Index n, SymmetryClass cls, Rng& rng, double norm = 1.0) {
  Mat X = class_project(random_gaussian(n, rng), cls);
  double s = op_norm(X);
  if (s == 0.0) return X;
  X *= norm / s;
  return class_project(X, cls);
}

// Basis of C^n adapted to an antiunitary Theta = U K with Theta^2 = +1: each column is
// Theta-fixed, so operators commuting with Theta become real in this basis.
inline Mat real_frame(const Mat& U) {
  Index n = U.rows();
  if ((U * U.conjugate() - Mat::Identity(n, n)).norm() > 1e-10)
    throw StructureError("real_frame: antiunitary does not square to +1");
  std::vector<Vec> cols;
  auto try_add = [&](Vec v) {
    for (const Vec& w : cols) v -= w.dot(v) * w;
    for (const Vec& w : cols) v -= w.dot(v) * w;
    double nv = v.norm();
    if (nv < 1e-8) return;
    v /= nv;
    v = 0.5 * (v + U * v.conjugate());
    v /= v.norm();
    cols.push_back(v);
  };
  for (Index k = 0; k < n && static_cast<Index>(cols.size()) < n; ++k) {
    Vec e = Vec::Zero(n);
    e(k) = 1.0;
    Vec te = U * e.conjugate();
    try_add(e + te);
    if (static_cast<Index>(cols.size()) < n) try_add(I_unit * (e - te));
  }
  if (static_cast<Index>(cols.size()) != n) throw StructureError("real_frame: failed to span");
  Mat W(n, n);
  for (Index k = 0; k < n; ++k) W.col(k) = cols[k];
  return W;
}

// Basis (v_1..v_m, Theta v_1..Theta v_m) for Theta = U K with Theta^2 = -1. Operators commuting
// with Theta take the [[A, -conj B], [B, conj A]] form in this basis.
inline Mat symplectic_frame(const Mat& U, const std::vector<Vec>* candidates = nullptr) {
  Index n = U.rows();
  if (n % 2 != 0) throw DimensionError("symplectic_frame: odd dimension");
  if ((U * U.conjugate() + Mat::Identity(n, n)).norm() > 1e-10)
    throw StructureError("symplectic_frame: antiunitary does not square to -1");
  Index m = n / 2;
  std::vector<Vec> vs, tvs;
  auto try_add = [&](Vec v) {
    for (int pass = 0; pass < 2; ++pass) {
      for (const Vec& w : vs) v -= w.dot(v) * w;
      for (const Vec& w : tvs) v -= w.dot(v) * w;
    }
    double nv = v.norm();
    if (nv < 1e-8) return;
    v /= nv;
    vs.push_back(v);
    tvs.push_back(U * v.conjugate());
  };
  if (candidates) {
    for (const Vec& c : *candidates) {
      if (static_cast<Index>(vs.size()) == m) break;
      try_add(c);
    }
  }
  for (Index k = 0; k < n && static_cast<Index>(vs.size()) < m; ++k) {
    Vec e = Vec::Zero(n);
    e(k) = 1.0;
    try_add(e);
  }
  if (static_cast<Index>(vs.size()) != m) throw StructureError("symplectic_frame: failed to span");
  Mat W(n, n);
  for (Index k = 0; k < m; ++k) {
    W.col(k) = vs[k];
    W.col(m + k) = tvs[k];
  }
  return W;
}

// Haar-type random element of the structure group of the class.
inline Mat random_structure_unitary(Index n, SymmetryClass cls, Rng& rng) {
  if (cls == SymmetryClass::QuaternionSelfDual) {
    if (n % 2 != 0) throw DimensionError("random_structure_unitary: odd dimension for quaternionic class");
    std::vector<Vec> cand;
    for (Index k = 0; k < n / 2; ++k) {
      Vec v(n);
      for (Index i = 0; i < n; ++i) v(i) = cplx(rng.normal(), rng.normal());
      cand.push_back(v);
    }
    return symplectic_frame(j_matrix(n), &cand);
  }
  Mat G = random_gaussian(n, rng);
  if (cls == SymmetryClass::RealSymmetric) {
    RMat Gr = G.real();
    Eigen::HouseholderQR<RMat> qr(Gr);
    RMat Q = qr.householderQ();
    return Q.cast<cplx>();
  }
  Eigen::HouseholderQR<Mat> qr(G);
  return qr.householderQ();
}

// Structure-group frame diagonalizing a self-adjoint matrix of the class, eigenvalues ascending.
inline Mat class_eigenframe(const Mat& X, SymmetryClass cls) {
  Index n = X.rows();
  if (cls == SymmetryClass::RealSymmetric) {
    RMat Xr = X.real();
    Eigen::SelfAdjointEigenSolver<RMat> es(0.5 * (Xr + Xr.transpose()));
    return es.eigenvectors().cast<cplx>();
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitize(X));
  if (cls == SymmetryClass::ComplexHermitian) return es.eigenvectors();
  // Kramers partners span the same eigenspace, so the frame keeps one vector per pair.
  std::vector<Vec> cand;
  for (Index k = 0; k < n; ++k) cand.push_back(es.eigenvectors().col(k));
  return symplectic_frame(j_matrix(n), &cand);
}

inline MatrixTuple conjugate(const MatrixTuple& T, const Mat& Q) {
  std::vector<Mat> out;
  out.reserve(T.mats.size());
  for (const Mat& H : T.mats) out.push_back(class_project(Q.adjoint() * H * Q, T.cls));
  MatrixTuple R;
  R.cls = T.cls;
  R.n = T.n;
  R.mats = std::move(out);
  return R;
}

}  // namespace halmos
