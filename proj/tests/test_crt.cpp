#include <gtest/gtest.h>

#include <set>

#include "halmos/crt/base.hpp"
#include "halmos/crt/checks.hpp"
#include "halmos/crt/module.hpp"
#include "halmos/rng.hpp"

using namespace halmos;
using namespace halmos::crt;

namespace {

IMat imat2(Int a, Int b, Int c, Int d) {
  IMat A(2, 2);
  A << a, b, c, d;
  return A;
}

bool is_diagonal_chain(const IMat& D, Eigen::Index rank) {
  for (Eigen::Index i = 0; i < D.rows(); ++i)
    for (Eigen::Index j = 0; j < D.cols(); ++j)
      if (i != j && D(i, j) != 0) return false;
  for (Eigen::Index i = 0; i < rank; ++i) {
    if (D(i, i) <= 0) return false;
    if (i + 1 < rank && D(i + 1, i + 1) % D(i, i) != 0) return false;
  }
  for (Eigen::Index i = rank; i < std::min(D.rows(), D.cols()); ++i)
    if (D(i, i) != 0) return false;
  return true;
}

// Known coefficient groups as invariant-factor lists, degrees 0..7.
const std::array<Factors, 8> kKO = {Factors{0}, {2}, {2}, {}, {0}, {}, {}, {}};

std::set<int> congruence_set(Algebra a) {
  if (a == Algebra::R) return {0, 4, 6, 7};
  if (a == Algebra::H) return {0, 2, 3, 4};
  if (a == Algebra::C) return {0, 2, 4, 6};
  return {};
}

}  // namespace

TEST(Smith, DiagonalExample) {
  SmithForm s = smith_normal_form(imat2(2, 0, 0, 3));
  EXPECT_EQ(s.D, imat2(1, 0, 0, 6));
  EXPECT_EQ(s.rank, 2);
}

TEST(Smith, RankDeficient) {
  SmithForm s = smith_normal_form(imat2(2, 4, 1, 2));
  EXPECT_EQ(s.rank, 1);
  EXPECT_EQ(s.D(0, 0), 1);
  EXPECT_EQ(s.D(1, 1), 0);
}

TEST(Smith, RandomMatricesFactorUnimodularly) {
  Rng rng(51);
  for (int t = 0; t < 200; ++t) {
    Eigen::Index r = 1 + static_cast<Eigen::Index>(rng.below(4)), c = 1 + static_cast<Eigen::Index>(rng.below(4));
    if (t < 50) r = c = 4;
    IMat A(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
      for (Eigen::Index j = 0; j < c; ++j) A(i, j) = static_cast<Int>(rng.below(13)) - 6;
    SmithForm s = smith_normal_form(A);
    EXPECT_EQ(mul(mul(s.U, A), s.V), s.D);
    EXPECT_EQ(std::abs(determinant(s.U)), 1);
    EXPECT_EQ(std::abs(determinant(s.V)), 1);
    EXPECT_TRUE(is_diagonal_chain(s.D, s.rank));
    EXPECT_EQ(mul(s.U, unimodular_inverse(s.U)), IMat::Identity(r, r));
  }
}

TEST(Smith, DeterminantExamples) {
  EXPECT_EQ(determinant(imat2(1, 2, 3, 4)), -2);
  EXPECT_EQ(determinant(IMat::Identity(5, 5)), 1);
  EXPECT_THROW(unimodular_inverse(imat2(2, 0, 0, 1)), PresentationError);
}

TEST(BaseModules, CoefficientGroups) {
  CrtModule R = base_real();
  for (int n = 0; n < 8; ++n) EXPECT_EQ(R.group(Part::O, n), kKO[n]) << n;
  EXPECT_EQ(R.group(Part::U, 0), Factors{0});
  EXPECT_EQ(R.group(Part::U, 1), Factors{});
  std::array<Factors, 4> kt = {Factors{0}, {2}, {}, {0}};
  for (int n = 0; n < 8; ++n) EXPECT_EQ(R.group(Part::T, n), kt[n % 4]) << n;
  CrtModule H = base_quaternion();
  for (int n = 0; n < 8; ++n) EXPECT_EQ(H.group(Part::O, n), kKO[mod8(n + 4)]) << n;
  CrtModule C = base_complex();
  for (int n = 0; n < 8; ++n) EXPECT_EQ(C.group(Part::O, n).empty(), n % 2 == 1) << n;
}

TEST(BaseModules, AllRelationsHold) {
  for (Algebra a : {Algebra::R, Algebra::C, Algebra::T, Algebra::H}) {
    RelationReport rep = check_relations(base_module(a));
    EXPECT_TRUE(rep.all_pass()) << to_string(a) << ": "
                                << (rep.failures().empty() ? "" : rep.failures().front().relation);
    EXPECT_EQ(rep.checks.size(), standard_relations().size() * 8);
  }
  EXPECT_EQ(standard_relations().size(), 27u);
}

TEST(BaseModules, AllSequencesExact) {
  for (Algebra a : {Algebra::R, Algebra::C, Algebra::T, Algebra::H}) {
    ExactnessReport rep = check_acyclicity(base_module(a));
    EXPECT_TRUE(rep.all_pass()) << to_string(a) << ": "
                                << (rep.failures().empty() ? "" : rep.failures().front().detail);
  }
}

TEST(FreeModules, RelationsAndExactnessInEveryDegree) {
  for (int d = 0; d < 8; ++d) {
    CrtModule F = free_module(d);
    EXPECT_TRUE(check_relations(F).all_pass()) << d;
    EXPECT_TRUE(check_acyclicity(F).all_pass()) << d;
  }
}

TEST(FreeModules, PeriodicityAndShift) {
  EXPECT_TRUE(free_module(0) == base_real());
  EXPECT_TRUE(free_module(8) == free_module(0));
  EXPECT_TRUE(free_module(-3) == free_module(5));
  std::set<int> nonzero;
  for (int n = 0; n < 8; ++n)
    if (!free_module(4).group(Part::O, n).empty()) nonzero.insert(n);
  EXPECT_EQ(nonzero, (std::set<int>{4, 5, 6, 0}));
  EXPECT_TRUE(shift(base_complex(), 2) == base_complex());
  EXPECT_TRUE(shift(shift(base_real(), 3), 5) == base_real());
  EXPECT_FALSE(shift(base_real(), 1) == base_real());
}

TEST(ZeroModule, PassesEverything) {
  CrtModule Z = zero_module();
  EXPECT_NO_THROW(validate(Z));
  EXPECT_TRUE(check_relations(Z).all_pass());
  EXPECT_TRUE(check_acyclicity(Z).all_pass());
  for (int d = 0; d < 8; ++d) EXPECT_FALSE(hom_exists(d, Z));
}

TEST(Mutations, BrokenRealificationFailsRelation) {
  CrtModule M = base_real();
  M.ops.at("r").mats[0] = IMat::Constant(1, 1, 1);
  RelationReport rep = check_relations(M);
  bool hit = false;
  for (const auto& f : rep.failures()) hit = hit || (f.relation == "rc = 2" && f.degree == 0);
  EXPECT_TRUE(hit);
}

TEST(Mutations, ZeroComplexificationBreaksFirstSequence) {
  CrtModule M = base_real();
  M.ops.at("c").mats[0] = IMat::Zero(1, 1);
  ExactnessReport rep = check_acyclicity(M);
  bool hit = false;
  for (const auto& f : rep.failures()) hit = hit || f.sequence == 1;
  EXPECT_TRUE(hit);
}

TEST(Validation, RejectsMalformedPresentations) {
  CrtModule M = base_real();
  M.part(Part::O).groups[3] = Factors{1};
  EXPECT_THROW(validate(M), PresentationError);
  CrtModule N = base_real();
  N.ops.at("c").mats[0] = IMat::Zero(2, 1);
  EXPECT_THROW(validate(N), PresentationError);
  CrtModule P = base_real();
  P.part(Part::U).groups[3] = Factors{0, 0};
  EXPECT_THROW(validate(P), PresentationError);
  CrtModule Q = base_real();
  Q.ops.erase("tau");
  EXPECT_THROW(validate(Q), PresentationError);
}

TEST(HomExists, Examples) {
  EXPECT_FALSE(hom_exists(5, base_real()));
  EXPECT_TRUE(hom_exists(0, base_real()));
  EXPECT_FALSE(hom_exists(5, base_quaternion()));
  EXPECT_TRUE(hom_exists(3, base_quaternion()));
  EXPECT_TRUE(hom_exists(2, base_complex()));
  EXPECT_FALSE(hom_exists(3, base_complex()));
}

TEST(DegreeTable, MatchesCongruencesUpTo64) {
  for (Algebra a : {Algebra::R, Algebra::H, Algebra::C}) {
    std::vector<bool> t = degree_table(a, 64);
    ASSERT_EQ(t.size(), 64u);
    std::set<int> s = congruence_set(a);
    for (int d = 1; d <= 64; ++d) EXPECT_EQ(t[d - 1], s.count(d % 8) == 1) << to_string(a) << " d=" << d;
  }
}

TEST(DegreeTable, PeriodEight) {
  for (Algebra a : {Algebra::R, Algebra::C, Algebra::T, Algebra::H}) {
    std::vector<bool> t = degree_table(a, 40);
    for (int d = 1; d + 8 <= 40; ++d) EXPECT_EQ(t[d - 1], t[d + 7]);
  }
}

TEST(FreeHom, GeneratorImagesExtendToHomomorphisms) {
  for (Algebra a : {Algebra::R, Algebra::C, Algebra::T, Algebra::H}) {
    CrtModule M = base_module(a);
    for (int d = 0; d < 8; ++d) {
      const Factors& g = M.group(Part::O, -d);
      for (std::size_t k = 0; k < g.size(); ++k) {
        IVec x = IVec::Zero(static_cast<Eigen::Index>(g.size()));
        x(static_cast<Eigen::Index>(k)) = 1;
        HomCheck h = check_hom(free_module(d), M, free_hom(d, M, x));
        EXPECT_TRUE(h.pass) << to_string(a) << " d=" << d << (h.failures.empty() ? "" : ": " + h.failures.front());
      }
    }
  }
}

TEST(FreeHom, WrongLengthThrows) {
  EXPECT_THROW(free_hom(5, base_real(), IVec::Ones(1)), PresentationError);
}

TEST(Derivation, SelfConjugateGroupsFollowFromThirdSequence) {
  for (Algebra a : {Algebra::R, Algebra::T}) {
    auto rows = derive_mt_from_sequence3(base_module(a));
    ASSERT_EQ(rows.size(), 8u);
    for (const auto& r : rows) EXPECT_TRUE(r.consistent) << to_string(a) << " n=" << r.degree;
  }
  auto rows = derive_mt_from_sequence3(base_real());
  EXPECT_EQ(rows[3].actual.to_string(), "Z");
  EXPECT_EQ(rows[1].actual.to_string(), "Z/2");
}

TEST(GroupSummary, Formatting) {
  EXPECT_EQ(summarize(Factors{2, 0, 0}).to_string(), "Z^2 + Z/2");
  EXPECT_EQ(summarize(Factors{}).to_string(), "0");
  EXPECT_EQ(cokernel(IMat::Constant(1, 1, 2), Factors{0}).to_string(), "Z/2");
}
