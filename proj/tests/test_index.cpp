#include <gtest/gtest.h>

#include <Eigen/LU>

#include "halmos/diagnostics.hpp"
#include "halmos/generate.hpp"
#include "halmos/index.hpp"
#include "halmos/perturb.hpp"

using namespace halmos;

namespace {

constexpr SymmetryClass kR = SymmetryClass::RealSymmetric;
constexpr SymmetryClass kC = SymmetryClass::ComplexHermitian;
constexpr SymmetryClass kH = SymmetryClass::QuaternionSelfDual;

MatrixTuple random_self_dual_quadruple(Index half, Rng& rng) {
  std::vector<Mat> mats;
  for (int r = 0; r < 4; ++r) mats.push_back(random_class_hermitian(2 * half, kH, rng));
  return make_tuple(kH, mats);
}

// Eigenvalue count of sum H_r (x) sigma_r with explicit Pauli matrices.
long pauli_half_signature(const MatrixTuple& T) {
  Mat s[3] = {Mat(2, 2), Mat(2, 2), Mat(2, 2)};
  s[0] << 0, 1, 1, 0;
  s[1] << 0, cplx(0, -1), cplx(0, 1), 0;
  s[2] << 1, 0, 0, -1;
  Mat B = Mat::Zero(2 * T.n, 2 * T.n);
  for (int r = 0; r < 3; ++r)
    for (Index i = 0; i < T.n; ++i)
      for (Index j = 0; j < T.n; ++j) B.block(2 * i, 2 * j, 2, 2) += T.mats[r](i, j) * s[r];
  Eigen::SelfAdjointEigenSolver<Mat> es(B);
  long pos = (es.eigenvalues().array() > 0).count(), neg = (es.eigenvalues().array() < 0).count();
  return (pos - neg) / 2;
}

}  // namespace

TEST(GeneratorFunction, Examples) {
  EXPECT_EQ(generator_function({1, 0, 0, 0}), Mat::Identity(2, 2));
  Mat D = Mat::Zero(2, 2);
  D(0, 0) = I_unit;
  D(1, 1) = -I_unit;
  EXPECT_EQ(generator_function({0, 1, 0, 0}), D);
  EXPECT_THROW(generator_function({1, 1, 0, 0}), DomainError);
}

TEST(GeneratorFunction, UnitaryWithUnitDeterminant) {
  Rng rng(21);
  for (int t = 0; t < 100; ++t) {
    std::array<double, 4> x;
    double s = 0;
    for (double& v : x) {
      v = rng.normal();
      s += v * v;
    }
    for (double& v : x) v /= std::sqrt(s);
    Mat G = generator_function(x);
    EXPECT_LE((G.adjoint() * G - Mat::Identity(2, 2)).norm(), 1e-12);
    EXPECT_LE(std::abs(G.determinant() - 1.0), 1e-12);
  }
}

TEST(SymplecticIndex, ScalarTupleIsTrivial) {
  const double x[4] = {0.5, -0.5, 0.5, 0.5};
  std::vector<Mat> mats;
  for (double v : x) mats.push_back(v * Mat::Identity(4, 4));
  IndexResult r = symplectic_determinant_index(make_tuple(kH, mats));
  EXPECT_EQ(r.value, 0);
  EXPECT_TRUE(r.valid);
  EXPECT_EQ(r.group, IndexGroup::ZTwo);
}

TEST(SymplecticIndex, PointFamiliesAgreeWithDirectDeterminant) {
  Rng rng(22);
  for (int t = 0; t < 30; ++t) {
    SpherePointSet P = random_point_set(4, 1 + static_cast<int>(rng.below(2)), 2, rng);
    MatrixTuple T = point_evaluation_family(P, kH);
    ASSERT_LE(T.n, 8);
    cplx det = symplectic_block_matrix(T).determinant();
    EXPECT_GT(det.real(), 0.0);
    EXPECT_LE(std::abs(det.imag()), 1e-10 * std::abs(det));
    EXPECT_EQ(symplectic_determinant_index(T).value, 0);
  }
}

TEST(SymplecticIndex, DeterminantIsRealForSelfDualQuadruples) {
  Rng rng(23);
  for (int t = 0; t < 100; ++t) {
    MatrixTuple T = random_self_dual_quadruple(1 + static_cast<Index>(rng.below(4)), rng);
    LogDet ld = log_determinant(symplectic_block_matrix(T));
    EXPECT_LE(std::abs(std::sin(ld.phase)), 1e-8);
  }
}

TEST(SymplecticIndex, CompressionFixtureIsNontrivial) {
  MatrixTuple T = dirac_compression_family(4, 2, kH);
  IndexResult r = symplectic_determinant_index(T);
  EXPECT_EQ(r.value, 1);
  EXPECT_GE(r.gap, 1e-3);
}

TEST(SymplecticIndex, Errors) {
  Rng rng(24);
  std::vector<Mat> mats;
  for (int r = 0; r < 4; ++r) mats.push_back(random_class_hermitian(4, kC, rng));
  EXPECT_THROW(symplectic_determinant_index(make_tuple(kC, mats)), StructureError);
  MatrixTuple Z = make_tuple(kH, std::vector<Mat>(4, Mat::Zero(4, 4)));
  EXPECT_THROW(symplectic_determinant_index(Z), GapTooSmall);
  IndexOptions soft;
  soft.throw_on_small_gap = false;
  EXPECT_FALSE(symplectic_determinant_index(Z, soft).valid);
}

TEST(SymplecticIndex, XorUnderDirectSum) {
  MatrixTuple T = dirac_compression_family(4, 2, kH);
  EXPECT_EQ(symplectic_determinant_index(direct_sum(T, T)).value, 0);
  Rng rng(25);
  MatrixTuple P = point_evaluation_family(random_point_set(4, 3, 2, rng), kH);
  EXPECT_EQ(symplectic_determinant_index(direct_sum(T, P)).value, 1);
}

TEST(CliffordGenerators, SmallCases) {
  CliffordRep one = clifford_generators(1, kC);
  Mat Z(2, 2);
  Z << 1, 0, 0, -1;
  ASSERT_EQ(one.gammas.size(), 1u);
  EXPECT_EQ(one.gammas[0], Z);
  CliffordRep three = clifford_generators(3, kC);
  EXPECT_EQ(three.dim, 2);
  EXPECT_EQ(anticommutator_residual(three.gammas), 0.0);
  EXPECT_THROW(clifford_generators(0, kC), DomainError);
  EXPECT_THROW(clifford_generators(9, kC), DomainError);
}

TEST(CliffordGenerators, FiveGeneratorsAnticommute) {
  CliffordRep rep = clifford_generators(5, kC);
  EXPECT_EQ(rep.dim, 4);
  int pairs = 0;
  for (int i = 0; i < 5; ++i)
    for (int j = i + 1; j < 5; ++j, ++pairs)
      EXPECT_EQ((rep.gammas[i] * rep.gammas[j] + rep.gammas[j] * rep.gammas[i]).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(pairs, 10);
  for (const Mat& g : rep.gammas) {
    EXPECT_EQ(g, g.adjoint());
    EXPECT_EQ(g * g, Mat::Identity(4, 4));
  }
}

TEST(CliffordGenerators, IntertwinersCommuteWithGammas) {
  for (int d = 1; d <= 8; ++d)
    for (SymmetryClass c : {kR, kH}) {
      CliffordRep rep = clifford_generators(d, c);
      if (rep.theta_square == 0) continue;
      const Mat& U = rep.intertwiner;
      EXPECT_LE((U * U.conjugate() - rep.theta_square * Mat::Identity(rep.dim, rep.dim)).norm(), 1e-12);
      for (const Mat& g : rep.gammas) EXPECT_LE((U * g.conjugate() - g * U).norm(), 1e-12);
    }
}

TEST(BottOperator, Examples) {
  CliffordRep rep = clifford_generators(3, kC);
  const double x[3] = {0.6, 0.0, 0.8};
  std::vector<Mat> mats, zeros;
  for (double v : x) {
    mats.push_back(v * Mat::Identity(3, 3));
    zeros.push_back(Mat::Zero(3, 3));
  }
  Mat B = bott_operator(make_tuple(kC, mats), rep);
  EXPECT_LE((B * B - Mat::Identity(6, 6)).norm(), 1e-12);
  EXPECT_EQ(bott_operator(make_tuple(kC, zeros), rep).norm(), 0.0);
  EXPECT_THROW(bott_operator(make_tuple(kC, {mats[0]}), rep), DimensionError);
}

TEST(BottOperator, NormAndSquareBounds) {
  Rng rng(26);
  for (int t = 0; t < 20; ++t) {
    int d = 2 + static_cast<int>(rng.below(4));
    std::vector<Mat> mats;
    for (int r = 0; r < d; ++r) mats.push_back(random_class_hermitian(4, kC, rng, 0.3 + rng.uniform()));
    MatrixTuple T = make_tuple(kC, mats);
    CliffordRep rep = clifford_generators(d, kC);
    Mat B = bott_operator(T, rep);
    double s = 0;
    for (const Mat& H : mats) s += op_norm(H);
    EXPECT_LE(op_norm(B), s * (1 + 1e-12));
    Mat I = Mat::Identity(B.rows(), B.cols());
    EXPECT_LE(op_norm(B * B - I), sphere_defect(T) + d * (d - 1) * commutator_defect(T) + 1e-10);
  }
}

TEST(BottIndex, PointFamiliesAreTrivial) {
  Rng rng(27);
  for (int d = 1; d <= 6; ++d)
    for (SymmetryClass c : {kR, kC, kH}) {
      MatrixTuple T = point_evaluation_family(random_point_set(d, 4, 3, rng), c);
      IndexResult r = bott_index(T, clifford_generators(d, c));
      EXPECT_EQ(r.value, 0);
      EXPECT_TRUE(r.valid);
    }
}

TEST(BottIndex, FuzzySphereMatchesPauliCount) {
  for (int L = 1; L <= 4; ++L) {
    MatrixTuple T = dirac_compression_family(3, L, kC);
    IndexResult r = bott_index(T, clifford_generators(3, kC));
    EXPECT_EQ(std::abs(r.value), 1);
    EXPECT_EQ(std::abs(r.value), std::abs(pauli_half_signature(T)));
    EXPECT_TRUE(r.valid);
  }
}

TEST(BottIndex, DoublesUnderDirectSum) {
  MatrixTuple T = dirac_compression_family(3, 2, kC);
  CliffordRep rep = clifford_generators(3, kC);
  EXPECT_EQ(bott_index(direct_sum(T, T), rep).value, 2 * bott_index(T, rep).value);
  MatrixTuple F = dirac_compression_family(5, 1, kR);
  CliffordRep rep5 = clifford_generators(5, kR);
  EXPECT_EQ(bott_index(direct_sum(F, F), rep5).value, 2 * bott_index(F, rep5).value);
}

TEST(BottIndex, FiveSphereFixtures) {
  // Regression values for the five-matrix families, recorded with this gamma ordering.
  EXPECT_EQ(compute_index(dirac_compression_family(5, 2, kR), IndexMethod::Bott).value, 6);
  EXPECT_EQ(compute_index(dirac_compression_family(5, 2, kC), IndexMethod::Bott).value, 4);
  EXPECT_EQ(compute_index(dirac_compression_family(5, 2, kH), IndexMethod::Bott).value, 5);
}

TEST(Index, ConjugationInvariance) {
  Rng rng(28);
  MatrixTuple S3 = dirac_compression_family(4, 1, kH);
  MatrixTuple S2 = dirac_compression_family(3, 3, kC);
  long v3 = compute_index(S3, IndexMethod::Det).value, v2 = compute_index(S2, IndexMethod::Bott).value;
  for (int t = 0; t < 20; ++t) {
    MatrixTuple A = make_tuple(kH, conjugate(S3, random_structure_unitary(S3.n, kH, rng)).mats);
    MatrixTuple B = make_tuple(kC, conjugate(S2, random_structure_unitary(S2.n, kC, rng)).mats);
    EXPECT_EQ(compute_index(A, IndexMethod::Det).value, v3);
    EXPECT_EQ(compute_index(B, IndexMethod::Bott).value, v2);
  }
}

TEST(IndexStability, RadiusZeroAndCommutingFamilies) {
  Rng rng(29);
  MatrixTuple T = point_evaluation_family(random_point_set(4, 3, 2, rng), kH);
  EXPECT_TRUE(index_stability(T, IndexMethod::Det, 10, 0.0, 1));
  IndexResult base = compute_index(T, IndexMethod::Det);
  EXPECT_TRUE(index_stability(T, IndexMethod::Det, 30, base.gap / 15.0, 2));
  MatrixTuple R = point_evaluation_family(random_point_set(5, 4, 1, rng), kR);
  IndexResult rb = compute_index(R, IndexMethod::Bott);
  EXPECT_TRUE(index_stability(R, IndexMethod::Bott, 30, rb.gap / 16.0, 3));
}

TEST(ParseMethod, Names) {
  EXPECT_EQ(parse_method("det"), IndexMethod::Det);
  EXPECT_EQ(parse_method("bott"), IndexMethod::Bott);
  EXPECT_EQ(parse_method("auto"), IndexMethod::Auto);
  EXPECT_THROW(parse_method("pfaffian"), DomainError);
}
