#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <thread>
#include <vector>

#include "halmos/diagnostics.hpp"
#include "halmos/index.hpp"
#include "halmos/matrix.hpp"

namespace halmos {

struct ApproxOptions {
  int max_sweeps = 60;
  int restarts = 1;
  // Stop once the off-diagonal part is this small relative to the tuple, in Frobenius norm.
  double tol_offdiag = 1e-12;
  std::uint64_t seed = 0;
  int threads = 1;
};

struct ApproxResult {
  MatrixTuple K;
  double distance = 0.0;
  double distance_frobenius = 0.0;
  Mat frame;
  int sweeps_used = 0;
  bool converged = false;
  int restart = 0;
  // Joint off-diagonal energy after each sweep, starting with the initial frame.
  std::vector<double> energy_trace;
  bool monotone = true;
};

namespace detail {

class JacobiState {
 public:
  JacobiState(const MatrixTuple& T, const Mat& Q0) : cls_(T.cls), n_(T.n), Q_(Q0) {
    for (const Mat& H : T.mats) A_.push_back(Q0.adjoint() * H * Q0);
  }

  double off_energy() const {
    double e = 0.0;
    for (const Mat& A : A_)
      for (Index j = 0; j < A.cols(); ++j)
        for (Index i = 0; i < A.rows(); ++i)
          if (i != j) e += std::norm(A(i, j));
    return e;
  }

  double total_energy() const {
    double e = 0.0;
    for (const Mat& A : A_) e += A.squaredNorm();
    return e;
  }

  // Returns the number of index sets that were rotated.
  int sweep() {
    int applied = 0;
    if (cls_ == SymmetryClass::QuaternionSelfDual) {
      Index m = n_ / 2;
      for (Index p = 0; p < m; ++p)
        for (Index q = p + 1; q < m; ++q) applied += optimize<4>({p, q, p + m, q + m}, 4);
    } else {
      int kinds = cls_ == SymmetryClass::RealSymmetric ? 1 : 2;
      for (Index p = 0; p < n_; ++p)
        for (Index q = p + 1; q < n_; ++q) applied += optimize<2>({p, q}, kinds);
    }
    return applied;
  }

  const Mat& frame() const { return Q_; }
  const std::vector<Mat>& rotated() const { return A_; }

 private:
  template <int K>
  using Small = Eigen::Matrix<cplx, K, K>;

  // Kinds 0 and 1 rotate by the unit quaternions 1 and i, kinds 2 and 3 by j and k; on C^2
  // only kinds 0 and 1 occur.
  template <int K>
  static Small<K> rotation(int kind, double theta) {
    return rotation_cs<K>(kind, std::cos(theta), std::sin(theta));
  }

  // rotation(kind, theta) = c I + s X with X^2 = -I, so X generates the family.
  template <int K>
  static Small<K> rotation_cs(int kind, double c, double s) {
    Eigen::Matrix2cd A, B = Eigen::Matrix2cd::Zero();
    switch (kind) {
      case 0: A << c, -s, s, c; break;
      case 1: A << c, I_unit * s, I_unit * s, c; break;
      case 2:
        A << c, 0, 0, c;
        B << 0, s, s, 0;
        break;
      default:
        A << c, 0, 0, c;
        B << 0, I_unit * s, I_unit * s, 0;
        break;
    }
    if constexpr (K == 2) {
      return A;
    } else {
      Small<4> G;
      G.template block<2, 2>(0, 0) = A;
      G.template block<2, 2>(0, 2) = -B.conjugate();
      G.template block<2, 2>(2, 0) = B;
      G.template block<2, 2>(2, 2) = A.conjugate();
      return G;
    }
  }

  // Negated off-diagonal energy of the rotated submatrices. Working with the off-diagonal part
  // directly keeps the comparison accurate when it is tiny next to the diagonal.
  template <int K>
  static double neg_off(const std::vector<Small<K>>& subs, const Small<K>& G) {
    double g = 0.0;
    for (const Small<K>& S : subs) {
      Small<K> R = G.adjoint() * S * G;
      for (int i = 0; i < K; ++i)
        for (int j = 0; j < K; ++j)
          if (i != j) g -= std::norm(R(i, j));
    }
    return g;
  }

  // Best angle for one rotation family on the current submatrices, or 0 when nothing is gained.
  template <int K>
  static double best_angle(const std::vector<Small<K>>& subs, int kind) {
    // The gain is a trigonometric polynomial in theta with frequencies 0, 2, 4 and period pi,
    // so five equispaced samples determine it.
    std::array<double, 5> f;
    for (int t = 0; t < 5; ++t) f[t] = neg_off<K>(subs, rotation<K>(kind, t * std::numbers::pi / 5.0));
    double a0 = 0, a1 = 0, b1 = 0, a2 = 0, b2 = 0;
    for (int t = 0; t < 5; ++t) {
      double th = t * std::numbers::pi / 5.0;
      a0 += f[t] / 5.0;
      a1 += 0.4 * f[t] * std::cos(2 * th);
      b1 += 0.4 * f[t] * std::sin(2 * th);
      a2 += 0.4 * f[t] * std::cos(4 * th);
      b2 += 0.4 * f[t] * std::sin(4 * th);
    }
    double scale = std::max(1e-300, std::abs(f[0]));
    if (std::abs(a1) + std::abs(b1) + std::abs(a2) + std::abs(b2) <= 1e-15 * scale) return 0.0;
    auto model = [&](double th) {
      return a0 + a1 * std::cos(2 * th) + b1 * std::sin(2 * th) + a2 * std::cos(4 * th) + b2 * std::sin(4 * th);
    };
    double best_th = 0.0, best = model(0.0);
    const int grid = 24;
    for (int t = 1; t < grid; ++t) {
      double th = -0.5 * std::numbers::pi + t * std::numbers::pi / grid;
      double v = model(th);
      if (v > best) {
        best = v;
        best_th = th;
      }
    }
    for (int it = 0; it < 5; ++it) {
      double th = best_th;
      double d1 = -2 * a1 * std::sin(2 * th) + 2 * b1 * std::cos(2 * th) - 4 * a2 * std::sin(4 * th) +
                  4 * b2 * std::cos(4 * th);
      double d2 = -4 * a1 * std::cos(2 * th) - 4 * b1 * std::sin(2 * th) - 16 * a2 * std::cos(4 * th) -
                  16 * b2 * std::sin(4 * th);
      if (d2 >= 0) break;
      double nt = th - d1 / d2;
      if (model(nt) >= model(th)) best_th = nt;
      else break;
    }
    // Polish with Newton steps on exact derivatives; the trigonometric fit loses the last digits
    // once the off-diagonal part is far below the diagonal.
    const Small<K> X = rotation_cs<K>(kind, 0.0, 1.0);
    for (int it = 0; it < 4; ++it) {
      Small<K> G = rotation<K>(kind, best_th);
      double d1 = 0.0, d2 = 0.0;
      for (const Small<K>& S : subs) {
        Small<K> R = G.adjoint() * S * G;
        Small<K> C1 = R * X - X * R;
        Small<K> C2 = C1 * X - X * C1;
        for (int i = 0; i < K; ++i)
          for (int j = 0; j < K; ++j)
            if (i != j) {
              d1 += 2.0 * std::real(std::conj(R(i, j)) * C1(i, j));
              d2 += 2.0 * (std::norm(C1(i, j)) + std::real(std::conj(R(i, j)) * C2(i, j)));
            }
      }
      if (!(d2 > 0.0)) break;
      double nt = best_th - d1 / d2;
      if (nt == best_th || !(neg_off<K>(subs, rotation<K>(kind, nt)) >= neg_off<K>(subs, G))) break;
      best_th = nt;
    }
    if (best_th == 0.0) return 0.0;
    if (!(neg_off<K>(subs, rotation<K>(kind, best_th)) > f[0] + 1e-15 * scale)) return 0.0;
    return best_th;
  }

  // Coordinate ascent over the rotation families on one index set; the accepted rotations are
  // composed locally and applied to the full matrices once.
  template <int K>
  bool optimize(const std::array<Index, K>& idx, int kinds) {
    std::vector<Small<K>>& subs = scratch<K>();
    subs.resize(A_.size());
    for (std::size_t r = 0; r < A_.size(); ++r)
      for (int i = 0; i < K; ++i)
        for (int j = 0; j < K; ++j) subs[r](i, j) = A_[r](idx[i], idx[j]);
    Small<K> total = Small<K>::Identity();
    bool moved = false;
    for (int kind = 0; kind < kinds; ++kind) {
      double th = best_angle<K>(subs, kind);
      if (th == 0.0) continue;
      Small<K> G = rotation<K>(kind, th);
      for (Small<K>& S : subs) S = (G.adjoint() * S * G).eval();
      total = (total * G).eval();
      moved = true;
    }
    if (moved) apply<K>(idx, total);
    return moved;
  }

  template <int K>
  void apply(const std::array<Index, K>& idx, const Small<K>& G) {
    Small<K> Gh = G.adjoint();
    Eigen::Matrix<cplx, K, 1> v;
    for (Mat& A : A_) {
      for (Index i = 0; i < n_; ++i) {
        for (int j = 0; j < K; ++j) v(j) = A(i, idx[j]);
        Eigen::Matrix<cplx, 1, K> w = v.transpose() * G;
        for (int j = 0; j < K; ++j) A(i, idx[j]) = w(j);
      }
      for (Index j = 0; j < n_; ++j) {
        for (int i = 0; i < K; ++i) v(i) = A(idx[i], j);
        Eigen::Matrix<cplx, K, 1> w = Gh * v;
        for (int i = 0; i < K; ++i) A(idx[i], j) = w(i);
      }
    }
    for (Index i = 0; i < n_; ++i) {
      for (int j = 0; j < K; ++j) v(j) = Q_(i, idx[j]);
      Eigen::Matrix<cplx, 1, K> w = v.transpose() * G;
      for (int j = 0; j < K; ++j) Q_(i, idx[j]) = w(j);
    }
  }

  template <int K>
  std::vector<Small<K>>& scratch() {
    if constexpr (K == 2) return scratch2_;
    else return scratch4_;
  }

  SymmetryClass cls_;
  Index n_;
  Mat Q_;
  std::vector<Mat> A_;
  std::vector<Small<2>> scratch2_;
  std::vector<Small<4>> scratch4_;
};

inline ApproxResult run_restart(const MatrixTuple& T, const ApproxOptions& opts, int restart) {
  Mat Q0 = Mat::Identity(T.n, T.n);
  if (restart > 0) {
    // Later restarts start from the eigenframe of a random combination of the tuple.
    Rng rng = Rng(opts.seed, 0x6a61636fULL).split(static_cast<std::uint64_t>(restart));
    Mat X = Mat::Zero(T.n, T.n);
    for (const Mat& H : T.mats) X += rng.normal() * H;
    Q0 = class_eigenframe(class_project(X, T.cls), T.cls);
  }
  JacobiState st(T, Q0);
  ApproxResult res;
  res.restart = restart;
  double total = std::max(st.total_energy(), 1e-300);
  double e = st.off_energy();
  res.energy_trace.push_back(e);
  for (int s = 0; s < opts.max_sweeps; ++s) {
    int applied = st.sweep();
    double ne = st.off_energy();
    res.energy_trace.push_back(ne);
    res.sweeps_used = s + 1;
    if (ne > e + 1e-12 * total) res.monotone = false;
    const double tol2 = opts.tol_offdiag * opts.tol_offdiag;
    bool done = applied == 0 || ne <= tol2 * total || (e - ne) <= opts.tol_offdiag * e;
    e = ne;
    if (done) {
      res.converged = true;
      break;
    }
  }
  const Mat& Q = st.frame();
  std::vector<Mat> K;
  Index half = T.n / 2;
  for (const Mat& A : st.rotated()) {
    Eigen::VectorXcd dg = A.diagonal().real().cast<cplx>();
    if (T.cls == SymmetryClass::QuaternionSelfDual)
      for (Index i = 0; i < half; ++i) {
        cplx avg = 0.5 * (dg(i) + dg(i + half));
        dg(i) = avg;
        dg(i + half) = avg;
      }
    K.push_back(class_project(Q * dg.asDiagonal() * Q.adjoint(), T.cls));
  }
  res.K.cls = T.cls;
  res.K.n = T.n;
  res.K.mats = std::move(K);
  res.frame = Q;
  for (int r = 0; r < T.d(); ++r) {
    Mat D = T.mats[r] - res.K.mats[r];
    res.distance = std::max(res.distance, op_norm(D));
    res.distance_frobenius = std::max(res.distance_frobenius, D.norm());
  }
  return res;
}

}  // namespace detail

// Joint approximate diagonalization by structure-group Jacobi rotations. The returned distance
// is an upper bound on the distance to commuting tuples of the class, not a certified optimum.
inline ApproxResult nearest_commuting(const MatrixTuple& T, const ApproxOptions& opts = {}) {
  int restarts = std::max(1, opts.restarts);
  std::vector<ApproxResult> results(restarts);
  if (T.d() == 0 || T.n == 0) {
    ApproxResult r;
    r.K = T;
    r.frame = Mat::Identity(T.n, T.n);
    r.converged = true;
    return r;
  }
  int threads = std::max(1, std::min(opts.threads, restarts));
  if (threads == 1) {
    for (int k = 0; k < restarts; ++k) results[k] = detail::run_restart(T, opts, k);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w)
      pool.emplace_back([&, w] {
        for (int k = w; k < restarts; k += threads) results[k] = detail::run_restart(T, opts, k);
      });
    for (auto& th : pool) th.join();
  }
  std::size_t best = 0;
  for (std::size_t k = 1; k < results.size(); ++k)
    if (results[k].distance < results[best].distance) best = k;
  return results[best];
}

inline bool commuting_certificate(const MatrixTuple& K) {
  if (K.d() == 0) return true;
  for (const Mat& H : K.mats)
    if (!in_class(H, K.cls, 1e-10)) return false;
  return commutator_defect(K) <= 1e-12;
}

// A valid nonzero index cannot coexist with a commuting tuple closer than gap / (3d): moving to it
// would keep the index operator invertible and force the index to vanish.
inline bool obstruction_contradiction(const IndexResult& idx, double distance, double slack, int d) {
  if (!idx.valid || idx.value == 0 || d <= 0) return false;
  return distance + slack < idx.gap / (3.0 * d);
}

}  // namespace halmos
