#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>

#include "halmos/clifford.hpp"
#include "halmos/matrix.hpp"
#include "halmos/perturb.hpp"

namespace halmos {

enum class IndexGroup { Integer, ZTwo, Trivial };

inline std::string to_string(IndexGroup g) {
  switch (g) {
    case IndexGroup::Integer: return "Integer";
    case IndexGroup::ZTwo: return "ZTwo";
    case IndexGroup::Trivial: return "Trivial";
  }
  return "?";
}

struct IndexResult {
  IndexGroup group = IndexGroup::Trivial;
  long value = 0;
  double gap = 0.0;
  bool valid = false;
  std::string detail;
};

struct IndexOptions {
  double gap_threshold = 1e-6;
  // When false a small gap yields valid = false instead of GapTooSmall.
  bool throw_on_small_gap = true;
};

enum class IndexMethod { Det, Bott, Auto };

inline IndexMethod parse_method(const std::string& s) {
  if (s == "det") return IndexMethod::Det;
  if (s == "bott") return IndexMethod::Bott;
  if (s == "auto") return IndexMethod::Auto;
  throw DomainError("unknown index method '" + s + "'");
}

inline Mat generator_function(const std::array<double, 4>& x) {
  double n2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + x[3] * x[3];
  if (std::abs(std::sqrt(n2) - 1.0) > 1e-10) throw DomainError("generator_function: point is not on the unit 3-sphere");
  Mat G(2, 2);
  G << cplx(x[0], x[1]), cplx(-x[2], x[3]), cplx(x[2], x[3]), cplx(x[0], -x[1]);
  return G;
}

struct LogDet {
  double log_abs = 0.0;
  double phase = 0.0;  // in (-pi, pi]
  bool singular = false;
};

inline LogDet log_determinant(const Mat& M) {
  require_square(M, "log_determinant");
  LogDet out;
  if (M.rows() == 0) return out;
  Eigen::PartialPivLU<Mat> lu(M);
  const Mat& LU = lu.matrixLU();
  double phase = lu.permutationP().determinant() < 0 ? std::numbers::pi : 0.0;
  for (Index i = 0; i < LU.rows(); ++i) {
    double a = std::abs(LU(i, i));
    if (a == 0.0) {
      out.singular = true;
      out.log_abs = -std::numeric_limits<double>::infinity();
      return out;
    }
    out.log_abs += std::log(a);
    phase += std::arg(LU(i, i));
  }
  out.phase = std::remainder(phase, 2.0 * std::numbers::pi);
  return out;
}

// M = [[H1 + i H2, -H3 + i H4], [H3 + i H4, H1 - i H2]].
inline Mat symplectic_block_matrix(const MatrixTuple& T) {
  if (T.d() != 4) throw DimensionError("symplectic_block_matrix: needs exactly four matrices");
  const Mat &H1 = T.mats[0], &H2 = T.mats[1], &H3 = T.mats[2], &H4 = T.mats[3];
  Index n = T.n;
  Mat M(2 * n, 2 * n);
  M.block(0, 0, n, n) = H1 + I_unit * H2;
  M.block(0, n, n, n) = -H3 + I_unit * H4;
  M.block(n, 0, n, n) = H3 + I_unit * H4;
  M.block(n, n, n, n) = H1 - I_unit * H2;
  return M;
}

namespace detail {

inline void finish_gap(IndexResult& res, const IndexOptions& opts, const char* op) {
  res.valid = res.gap > opts.gap_threshold;
  if (!res.valid && opts.throw_on_small_gap) {
    std::ostringstream os;
    os << op << ": spectral gap " << res.gap << " is below threshold " << opts.gap_threshold;
    throw GapTooSmall(os.str());
  }
}

}  // namespace detail

inline IndexResult symplectic_determinant_index(const MatrixTuple& T, const IndexOptions& opts = {}) {
  if (T.cls != SymmetryClass::QuaternionSelfDual)
    throw StructureError("symplectic_determinant_index: tuple class must be QuaternionSelfDual");
  if (T.d() != 4) throw DimensionError("symplectic_determinant_index: needs d = 4");
  validate(T);
  Mat M = symplectic_block_matrix(T);
  IndexResult res;
  res.group = IndexGroup::ZTwo;
  res.gap = smallest_singular_value(M);
  LogDet ld = log_determinant(M);
  double im = std::sin(ld.phase);
  std::ostringstream os;
  os.precision(17);
  os << "log|det|=" << ld.log_abs << " phase=" << ld.phase;
  res.detail = os.str();
  if (!ld.singular && std::abs(im) > 1e-8)
    throw StructureError("symplectic_determinant_index: determinant is not real (|sin phase| = " + std::to_string(im) +
                         ")");
  res.value = (!ld.singular && std::cos(ld.phase) < 0.0) ? 1 : 0;
  detail::finish_gap(res, opts, "symplectic_determinant_index");
  return res;
}

inline Mat bott_operator(const MatrixTuple& T, const CliffordRep& rep) {
  if (rep.d != T.d())
    throw DimensionError("bott_operator: Clifford rep has " + std::to_string(rep.d) + " generators, tuple has " +
                         std::to_string(T.d()));
  Mat B = Mat::Zero(T.n * rep.dim, T.n * rep.dim);
  for (int r = 0; r < T.d(); ++r) B += kron(T.mats[r], rep.gammas[r]);
  return B;
}

// Half-signature of the Bott operator.
inline IndexResult bott_index(const MatrixTuple& T, const CliffordRep& rep, const IndexOptions& opts = {}) {
  Mat B = hermitize(bott_operator(T, rep));
  IndexResult res;
  res.group = IndexGroup::Integer;
  if (B.rows() == 0) {
    detail::finish_gap(res, opts, "bott_index");
    return res;
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(B, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd& w = es.eigenvalues();
  long pos = 0, neg = 0;
  double gap = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < w.size(); ++i) {
    gap = std::min(gap, std::abs(w(i)));
    if (w(i) > 0) ++pos;
    else if (w(i) < 0) ++neg;
  }
  res.gap = gap;
  res.value = (pos - neg) / 2;
  std::ostringstream os;
  os << "n_plus=" << pos << " n_minus=" << neg;
  if ((pos - neg) % 2 != 0) os << " odd signature";
  res.detail = os.str();
  detail::finish_gap(res, opts, "bott_index");
  return res;
}

inline IndexMethod resolve_method(const MatrixTuple& T, IndexMethod m) {
  if (m != IndexMethod::Auto) return m;
  return (T.cls == SymmetryClass::QuaternionSelfDual && T.d() == 4) ? IndexMethod::Det : IndexMethod::Bott;
}

inline IndexResult compute_index(const MatrixTuple& T, IndexMethod method, const IndexOptions& opts = {}) {
  if (resolve_method(T, method) == IndexMethod::Det) return symplectic_determinant_index(T, opts);
  return bott_index(T, clifford_generators(T.d(), T.cls), opts);
}

// True iff the index keeps its value and validity under `trials` random class-preserving
// perturbations of each matrix with norm drawn uniformly from [0, radius].
inline bool index_stability(const MatrixTuple& T, IndexMethod method, int trials, double radius, std::uint64_t seed,
                            const IndexOptions& opts = {}) {
  if (radius < 0.0) throw DomainError("index_stability: radius must be nonnegative");
  IndexOptions soft = opts;
  soft.throw_on_small_gap = false;
  IndexResult base = compute_index(T, method, soft);
  if (!base.valid) return false;
  if (radius == 0.0) return true;
  Rng rng(seed, 0x73746162ULL);
  for (int t = 0; t < trials; ++t) {
    double eps = radius * rng.uniform();
    IndexResult r = compute_index(perturb(T, eps, rng.next_u64()), method, soft);
    if (!r.valid || r.value != base.value) return false;
  }
  return true;
}

}  // namespace halmos
