#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "halmos/clifford.hpp"
#include "halmos/diagnostics.hpp"
#include "halmos/matrix.hpp"
#include "halmos/perturb.hpp"

namespace halmos {

struct SpherePointSet {
  int d = 0;
  std::vector<std::vector<double>> points;
  std::vector<int> multiplicities;

  int total_multiplicity() const {
    int s = 0;
    for (int m : multiplicities) s += m;
    return s;
  }
};

inline void validate(const SpherePointSet& P) {
  if (P.points.size() != P.multiplicities.size())
    throw DimensionError("SpherePointSet: points and multiplicities differ in length");
  for (std::size_t k = 0; k < P.points.size(); ++k) {
    const auto& x = P.points[k];
    if (static_cast<int>(x.size()) != P.d) throw DimensionError("SpherePointSet: point has wrong coordinate count");
    double s = 0.0;
    for (double v : x) s += v * v;
    if (std::abs(s - 1.0) > 1e-12) throw DomainError("SpherePointSet: point " + std::to_string(k) + " is off the sphere");
    if (P.multiplicities[k] < 1) throw DomainError("SpherePointSet: multiplicities must be positive");
  }
}

inline SpherePointSet random_point_set(int d, int count, int max_mult, Rng& rng) {
  SpherePointSet P;
  P.d = d;
  for (int k = 0; k < count; ++k) {
    std::vector<double> x(d);
    double s = 0.0;
    while (s < 1e-6) {
      s = 0.0;
      for (double& v : x) {
        v = rng.normal();
        s += v * v;
      }
    }
    s = std::sqrt(s);
    for (double& v : x) v /= s;
    P.points.push_back(x);
    P.multiplicities.push_back(1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(std::max(1, max_mult)))));
  }
  return P;
}

// H_j = diag of the j-th coordinates; quaternionic class uses x_j I_2 blocks in embedded form.
inline MatrixTuple point_evaluation_family(const SpherePointSet& P, SymmetryClass cls) {
  validate(P);
  Index m = P.total_multiplicity();
  std::vector<Mat> mats;
  for (int j = 0; j < P.d; ++j) {
    Eigen::VectorXd diag(m);
    Index pos = 0;
    for (std::size_t k = 0; k < P.points.size(); ++k)
      for (int t = 0; t < P.multiplicities[k]; ++t) diag(pos++) = P.points[k][j];
    Mat D = diag.cast<cplx>().asDiagonal();
    if (cls == SymmetryClass::QuaternionSelfDual) D = quaternion_embed(D, Mat::Zero(m, m));
    mats.push_back(D);
  }
  return make_tuple(cls, std::move(mats));
}

// H'_i = H_i (sum H^2)^{-1/2} for an exactly commuting tuple.
inline MatrixTuple sphere_normalize(const MatrixTuple& T) {
  if (commutator_defect(T) > 1e-10) throw DomainError("sphere_normalize: tuple is not commuting");
  Mat S = Mat::Zero(T.n, T.n);
  for (const Mat& H : T.mats) S += H * H;
  S = class_project(S, T.cls);
  Eigen::SelfAdjointEigenSolver<Mat> es(S, Eigen::EigenvaluesOnly);
  if (T.n == 0 || es.eigenvalues()(0) <= 1e-12)
    throw DomainError("sphere_normalize: sum of squares is singular (common zero of the tuple)");
  Mat R = spectral_apply(S, [](double x) { return 1.0 / std::sqrt(x); });
  std::vector<Mat> out;
  for (const Mat& H : T.mats) out.push_back(class_project(H * R, T.cls));
  return make_tuple(T.cls, std::move(out));
}

namespace detail {

// Spin-j angular momentum matrices in the |j, m> basis, m = j, j-1, ..., -j.
inline std::array<Mat, 3> spin_matrices(int two_j) {
  double j = 0.5 * two_j;
  Index n = two_j + 1;
  Mat Sp = Mat::Zero(n, n), Sz = Mat::Zero(n, n);
  for (Index k = 0; k < n; ++k) {
    double m = j - static_cast<double>(k);
    Sz(k, k) = m;
    if (k > 0) Sp(k - 1, k) = std::sqrt(j * (j + 1) - m * (m + 1));
  }
  Mat Sm = Sp.adjoint();
  return {0.5 * (Sp + Sm), (-0.5 * I_unit) * (Sp - Sm), Sz};
}

inline std::vector<std::vector<int>> fock_basis(int modes, int n) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(modes, 0);
  std::function<void(int, int)> rec = [&](int mode, int left) {
    if (mode == modes - 1) {
      cur[mode] = left;
      out.push_back(cur);
      return;
    }
    for (int k = left; k >= 0; --k) {
      cur[mode] = k;
      rec(mode + 1, left - k);
    }
  };
  rec(0, n);
  return out;
}

// Image of a one-particle operator A on the n-boson space: sum_{q,p} A_qp a_q^dag a_p.
inline Mat second_quantize(const Mat& A, const std::vector<std::vector<int>>& basis,
                           const std::map<std::vector<int>, Index>& idx) {
  Index dim = static_cast<Index>(basis.size());
  Index modes = A.rows();
  Mat M = Mat::Zero(dim, dim);
  for (Index col = 0; col < dim; ++col) {
    const auto& b = basis[col];
    for (Index p = 0; p < modes; ++p) {
      if (b[p] == 0) continue;
      for (Index q = 0; q < modes; ++q) {
        if (A(q, p) == cplx(0.0)) continue;
        std::vector<int> c = b;
        double amp = std::sqrt(static_cast<double>(c[p]));
        c[p] -= 1;
        amp *= std::sqrt(static_cast<double>(c[q] + 1));
        c[q] += 1;
        M(idx.at(c), col) += A(q, p) * amp;
      }
    }
  }
  return M;
}

// Second quantization of a signed permutation U: |alpha> -> prod_a s_a^alpha_a |pi(alpha)>.
inline Mat second_quantize_signed_permutation(const Mat& U, const std::vector<std::vector<int>>& basis,
                                              const std::map<std::vector<int>, Index>& idx) {
  Index modes = U.rows();
  std::vector<Index> target(modes);
  std::vector<double> sign(modes);
  for (Index a = 0; a < modes; ++a) {
    Index found = -1;
    for (Index r = 0; r < modes; ++r)
      if (U(r, a) != cplx(0.0)) {
        if (found >= 0 || std::abs(std::abs(U(r, a).real()) - 1.0) > 0 || U(r, a).imag() != 0.0)
          throw StructureError("second_quantize_signed_permutation: not a signed permutation");
        found = r;
      }
    target[a] = found;
    sign[a] = U(found, a).real();
  }
  Index dim = static_cast<Index>(basis.size());
  Mat G = Mat::Zero(dim, dim);
  for (Index col = 0; col < dim; ++col) {
    const auto& b = basis[col];
    std::vector<int> c(modes, 0);
    double s = 1.0;
    for (Index a = 0; a < modes; ++a) {
      c[target[a]] = b[a];
      if (sign[a] < 0 && b[a] % 2 == 1) s = -s;
    }
    G(idx.at(c), col) = s;
  }
  return G;
}

inline std::vector<Mat> in_frame(const std::vector<Mat>& mats, const Mat& W) {
  std::vector<Mat> out;
  for (const Mat& H : mats) out.push_back(W.adjoint() * H * W);
  return out;
}

}  // namespace detail

// Spin-j fuzzy two-sphere, j = L/2: H_i = S_i / sqrt(j(j+1)).
inline MatrixTuple fuzzy_sphere2(int L) {
  if (L < 1) throw DomainError("fuzzy_sphere2: L must be >= 1");
  auto S = detail::spin_matrices(L);
  double j = 0.5 * L;
  double c = 1.0 / std::sqrt(j * (j + 1.0));
  return make_tuple_projected(SymmetryClass::ComplexHermitian, {c * S[0], c * S[1], c * S[2]});
}

// Fuzzy four-sphere: the five 4x4 generators second-quantized on the n-boson space Sym^n(C^4),
// normalized by the Casimir n(n+4). The antiunitary intertwiner of Cl_5 lifts to an antiunitary
// squaring to (-1)^n, so even n is realizable over R and odd n over H.
inline MatrixTuple fuzzy_sphere4(int n, SymmetryClass cls) {
  if (n < 1) throw DomainError("fuzzy_sphere4: n must be >= 1");
  int theta_sq = n % 2 == 0 ? 1 : -1;
  if (cls == SymmetryClass::RealSymmetric && theta_sq != 1)
    throw DomainError("fuzzy_sphere4: odd boson number carries a quaternionic, not real, structure");
  if (cls == SymmetryClass::QuaternionSelfDual && theta_sq != -1)
    throw DomainError("fuzzy_sphere4: even boson number carries a real, not quaternionic, structure");
  CliffordRep rep = clifford_generators(5, SymmetryClass::ComplexHermitian);
  Mat U;
  if (!find_intertwiner(rep.gammas, -1, U)) throw StructureError("fuzzy_sphere4: no quaternionic intertwiner for Cl_5");
  auto basis = detail::fock_basis(4, n);
  std::map<std::vector<int>, Index> idx;
  for (std::size_t k = 0; k < basis.size(); ++k) idx[basis[k]] = static_cast<Index>(k);
  double c = 1.0 / std::sqrt(static_cast<double>(n) * (n + 4));
  std::vector<Mat> mats;
  for (const Mat& g : rep.gammas) mats.push_back(c * detail::second_quantize(g, basis, idx));
  if (cls != SymmetryClass::ComplexHermitian) {
    Mat G = detail::second_quantize_signed_permutation(U, basis, idx);
    Mat W = cls == SymmetryClass::RealSymmetric ? real_frame(G) : symplectic_frame(G);
    mats = detail::in_frame(mats, W);
  }
  return make_tuple_projected(cls, mats);
}

struct LocalizerParams {
  double mass = -1.0;
  double kappa = 0.2;
};

// Spectral-localizer quadruple (H/||H||, kappa X, kappa Y, kappa Z) of the Wilson-Dirac model of a
// three-dimensional time-reversal invariant insulator on an open cube of the given side. Onsite
// (m+3) G0, hopping -G0/2 + i Ga/2 with G0 = sz x 1, Ga = sx x s_a, time reversal 1 x i s_y K.
inline MatrixTuple ti_localizer(int side, SymmetryClass cls, const LocalizerParams& prm = {}) {
  if (side < 2) throw DomainError("ti_localizer: side must be >= 2");
  if (cls == SymmetryClass::RealSymmetric) throw DomainError("ti_localizer: model has no real structure");
  using detail::pauli;
  Mat G0 = kron(pauli('Z'), pauli('I'));
  std::array<Mat, 3> Ga = {kron(pauli('X'), pauli('X')), kron(pauli('X'), pauli('Y')), kron(pauli('X'), pauli('Z'))};
  Index sites = static_cast<Index>(side) * side * side;
  Index n = 4 * sites;
  auto site = [side](int x, int y, int z) { return static_cast<Index>((x * side + y) * side + z); };
  Mat H = Mat::Zero(n, n);
  std::array<Mat, 3> X;
  for (auto& m : X) m = Mat::Zero(n, n);
  double c = 0.5 * (side - 1);
  for (int x = 0; x < side; ++x)
    for (int y = 0; y < side; ++y)
      for (int z = 0; z < side; ++z) {
        int r[3] = {x, y, z};
        Index i = site(x, y, z);
        H.block(4 * i, 4 * i, 4, 4) += (prm.mass + 3.0) * G0;
        for (int a = 0; a < 3; ++a) {
          X[a].block(4 * i, 4 * i, 4, 4) = (r[a] - c) * Mat::Identity(4, 4);
          int t[3] = {x, y, z};
          t[a] += 1;
          if (t[a] >= side) continue;
          Index j = site(t[0], t[1], t[2]);
          Mat hop = -0.5 * G0 + (0.5 * I_unit) * Ga[a];
          H.block(4 * i, 4 * j, 4, 4) += hop;
          H.block(4 * j, 4 * i, 4, 4) += hop.adjoint();
        }
      }
  H = hermitize(H);
  std::vector<Mat> mats = {H / op_norm(H), prm.kappa * X[0], prm.kappa * X[1], prm.kappa * X[2]};
  if (cls == SymmetryClass::QuaternionSelfDual) {
    Mat U = kron(Mat::Identity(2 * sites, 2 * sites), pauli('E'));
    mats = detail::in_frame(mats, symplectic_frame(U));
  }
  return make_tuple_projected(cls, mats);
}

// The nontrivial-index families. Supported (d, class) pairs:
//   d = 3, C: fuzzy two-sphere of spin L/2;
//   d = 4, H or C: localizer quadruple on a cube of side L + 1;
//   d = 5, R: fuzzy four-sphere with 2L bosons; C: L bosons; H: 2L - 1 bosons.
inline MatrixTuple dirac_compression_family(int d, int L, SymmetryClass cls) {
  if (L < 1) throw DomainError("dirac_compression_family: L must be >= 1");
  if (d == 3 && cls == SymmetryClass::ComplexHermitian) return fuzzy_sphere2(L);
  if (d == 4 && cls != SymmetryClass::RealSymmetric) return ti_localizer(L + 1, cls);
  if (d == 5) {
    int n = cls == SymmetryClass::RealSymmetric ? 2 * L : cls == SymmetryClass::ComplexHermitian ? L : 2 * L - 1;
    return fuzzy_sphere4(n, cls);
  }
  throw DomainError("dirac_compression_family: no family for d = " + std::to_string(d) + ", class " + to_string(cls) +
                    " (supported: (3,C), (4,C), (4,H), (5,R), (5,C), (5,H))");
}

enum class GeneratorKind { PointEval, DiracCompression, Perturbed };

inline std::string to_string(GeneratorKind k) {
  switch (k) {
    case GeneratorKind::PointEval: return "point";
    case GeneratorKind::DiracCompression: return "dirac";
    case GeneratorKind::Perturbed: return "perturbed";
  }
  return "?";
}

inline GeneratorKind parse_kind(const std::string& s) {
  if (s == "point" || s == "PointEval") return GeneratorKind::PointEval;
  if (s == "dirac" || s == "DiracCompression") return GeneratorKind::DiracCompression;
  if (s == "perturbed" || s == "Perturbed") return GeneratorKind::Perturbed;
  throw DomainError("unknown generator kind '" + s + "'");
}

struct GeneratorSpec {
  GeneratorKind kind = GeneratorKind::PointEval;
  // Family that a Perturbed spec starts from.
  GeneratorKind base_kind = GeneratorKind::PointEval;
  SymmetryClass cls = SymmetryClass::ComplexHermitian;
  int d = 1;
  int L = 1;
  int points = 4;
  int max_multiplicity = 2;
  // Conjugate point families by a random structure-group element.
  bool rotate = false;
  double eps = 0.0;
  std::uint64_t seed = 0;
};

inline MatrixTuple generate(const GeneratorSpec& spec) {
  GeneratorKind kind = spec.kind == GeneratorKind::Perturbed ? spec.base_kind : spec.kind;
  if (kind == GeneratorKind::Perturbed) throw DomainError("generate: base_kind cannot itself be perturbed");
  MatrixTuple T;
  if (kind == GeneratorKind::PointEval) {
    Rng rng(spec.seed, 0x706f696eULL);
    T = point_evaluation_family(random_point_set(spec.d, spec.points, spec.max_multiplicity, rng), spec.cls);
    if (spec.rotate) T = make_tuple(spec.cls, conjugate(T, random_structure_unitary(T.n, spec.cls, rng)).mats);
  } else {
    T = dirac_compression_family(spec.d, spec.L, spec.cls);
  }
  if (spec.kind == GeneratorKind::Perturbed) T = perturb(T, spec.eps, spec.seed);
  return T;
}

}  // namespace halmos
