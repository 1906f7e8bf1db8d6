#pragma once

#include <initializer_list>
#include <string>

#include "halmos/crt/module.hpp"

namespace halmos::crt {

enum class Algebra { R, C, T, H };

inline std::string to_string(Algebra a) {
  switch (a) {
    case Algebra::R: return "R";
    case Algebra::C: return "C";
    case Algebra::T: return "T";
    case Algebra::H: return "H";
  }
  return "?";
}

inline Algebra parse_algebra(const std::string& s) {
  if (s == "R") return Algebra::R;
  if (s == "C") return Algebra::C;
  if (s == "T") return Algebra::T;
  if (s == "H") return Algebra::H;
  throw PresentationError("unknown algebra '" + s + "' (expected R, C, T or H)");
}

namespace detail {

inline IMat imat(Eigen::Index rows, Eigen::Index cols, std::initializer_list<Int> entries) {
  IMat A(rows, cols);
  auto it = entries.begin();
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) A(i, j) = *it++;
  return A;
}

inline GradedGroup graded(int period, std::array<Factors, 8> g) {
  GradedGroup G;
  G.period = period;
  G.groups = std::move(g);
  return G;
}

inline void set(CrtModule& M, const std::string& op, int n, const IMat& A) { M.ops.at(op).mats[mod8(n)] = A; }

inline void set_all(CrtModule& M, const std::string& op, const IMat& A, std::initializer_list<int> degrees) {
  for (int n : degrees) set(M, op, n, A);
}

inline void set_identity(CrtModule& M, const std::string& op) {
  Operation& o = M.ops.at(op);
  for (int n = 0; n < 8; ++n) o.mats[n] = IMat::Identity(o.mats[n].rows(), o.mats[n].cols());
}

inline IMat one(Int v) { return IMat::Constant(1, 1, v); }

}  // namespace detail

inline CrtModule base_real() {
  using namespace detail;
  const Factors Z{0}, Z2{2}, zero{};
  CrtModule M = zero_operations({
      graded(8, {Z, Z2, Z2, zero, Z, zero, zero, zero}),
      graded(2, {Z, zero, Z, zero, Z, zero, Z, zero}),
      graded(4, {Z, Z2, zero, Z, Z, Z2, zero, Z}),
  });
  set(M, "c", 0, one(1));
  set(M, "c", 4, one(2));
  set(M, "r", 0, one(2));
  set(M, "r", 2, one(1));
  set(M, "r", 4, one(1));
  set(M, "eps", 0, one(1));
  set(M, "eps", 1, one(1));
  set(M, "eps", 4, one(2));
  set_all(M, "zeta", one(1), {0, 4});
  for (int n = 0; n < 8; n += 2) set(M, "psiU", n, one((n / 2) % 2 == 0 ? 1 : -1));
  set_all(M, "psiT", one(1), {0, 1, 4, 5});
  set_all(M, "psiT", one(-1), {3, 7});
  set_all(M, "gamma", one(1), {0, 2, 4, 6});
  set(M, "tau", 0, one(1));
  set(M, "tau", 1, one(1));
  set(M, "tau", 3, one(1));
  set(M, "tau", 7, one(2));
  set_all(M, "etaO", one(1), {0, 1});
  set_all(M, "etaT", one(1), {0, 4});
  set(M, "xi", 0, one(1));
  set(M, "xi", 4, one(4));
  set_all(M, "omega", one(1), {0, 4});
  set_identity(M, "betaU");
  set_identity(M, "betaT");
  set_identity(M, "betaO");
  return M;
}

inline CrtModule base_complex() {
  using namespace detail;
  const Factors Z{0}, Z2f{0, 0}, zero{};
  CrtModule M = zero_operations({
      graded(8, {Z, zero, Z, zero, Z, zero, Z, zero}),
      graded(2, {Z2f, zero, Z2f, zero, Z2f, zero, Z2f, zero}),
      graded(4, {Z, Z, Z, Z, Z, Z, Z, Z}),
  });
  const std::initializer_list<int> even = {0, 2, 4, 6}, odd = {1, 3, 5, 7};
  set_all(M, "c", imat(2, 1, {1, 1}), even);
  set_all(M, "r", imat(1, 2, {1, 1}), even);
  set_all(M, "psiU", imat(2, 2, {0, 1, 1, 0}), even);
  set_all(M, "betaU", imat(2, 2, {1, 0, 0, -1}), even);
  set_all(M, "zeta", imat(2, 1, {1, 1}), even);
  set_all(M, "gamma", imat(1, 2, {1, 1}), even);
  set_all(M, "eps", one(1), even);
  set_all(M, "xi", one(2), even);
  set_all(M, "tau", one(1), odd);
  set_all(M, "omega", one(2), even);
  set_all(M, "psiT", one(1), even);
  set_all(M, "psiT", one(-1), odd);
  set_identity(M, "betaT");
  set_identity(M, "betaO");
  return M;
}

// The circle algebra with its reflection involution: the O part is periodic of period 4 here.
inline CrtModule base_circle() {
  using namespace detail;
  const Factors Z{0}, Z2{2}, zero{}, ZZ2{0, 2}, ZZ{0, 0};
  CrtModule M = zero_operations({
      graded(8, {Z, Z2, zero, Z, Z, Z2, zero, Z}),
      graded(2, {Z, Z, Z, Z, Z, Z, Z, Z}),
      graded(4, {ZZ2, Z2, Z, ZZ, ZZ2, Z2, Z, ZZ}),
  });
  set_all(M, "c", one(1), {0, 4});
  set_all(M, "c", one(2), {3, 7});
  set_all(M, "r", one(2), {0, 4});
  set_all(M, "r", one(1), {1, 3, 5, 7});
  const int psiu[8] = {1, -1, -1, 1, 1, -1, -1, 1};
  for (int n = 0; n < 8; ++n) set(M, "psiU", n, one(psiu[n]));
  for (int m = 0; m < 8; ++m) {
    const Eigen::Index k = static_cast<Eigen::Index>(M.group(Part::T, m - 1).size());
    set(M, "gamma", m, k == 2 ? imat(2, 1, {0, 1}) : one(1));
  }
  set_all(M, "zeta", imat(1, 2, {1, 0}), {0, 3, 4, 7});
  set(M, "eps", 0, imat(2, 1, {1, 0}));
  set(M, "eps", 4, imat(2, 1, {1, 1}));
  set_all(M, "eps", one(1), {1, 5});
  set_all(M, "eps", imat(2, 1, {2, 1}), {3, 7});
  set(M, "tau", 0, imat(1, 2, {1, 1}));
  set(M, "tau", 4, imat(1, 2, {0, 1}));
  set_all(M, "tau", one(1), {2, 6});
  set_all(M, "tau", imat(1, 2, {-1, 2}), {3, 7});
  set_identity(M, "psiT");
  set_all(M, "psiT", one(-1), {2, 6});
  set_all(M, "psiT", imat(2, 2, {1, 0, 1, -1}), {3, 7});
  set_all(M, "etaO", one(1), {0, 4});
  set_all(M, "xi", one(2), {0, 3, 4, 7});
  set_all(M, "etaT", imat(1, 2, {1, 0}), {0, 4});
  set_all(M, "etaT", imat(2, 2, {0, 0, 1, 0}), {3, 7});
  set_all(M, "omega", imat(2, 2, {0, 0, 1, 0}), {0, 4});
  set_all(M, "omega", imat(1, 2, {1, 0}), {3, 7});
  set_identity(M, "betaU");
  set_identity(M, "betaT");
  set_identity(M, "betaO");
  return M;
}

inline CrtModule base_quaternion() { return shift(base_real(), 4); }

inline CrtModule base_module(Algebra a) {
  switch (a) {
    case Algebra::R: return base_real();
    case Algebra::C: return base_complex();
    case Algebra::T: return base_circle();
    case Algebra::H: return base_quaternion();
  }
  throw PresentationError("unknown algebra");
}

// The free module on one real generator, placed in MO(-d).
inline CrtModule free_module(int d) { return shift(base_real(), -d); }

}  // namespace halmos::crt
