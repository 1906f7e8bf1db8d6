#pragma once

#include <string>
#include <vector>

#include "halmos/matrix.hpp"

namespace halmos {

struct CliffordRep {
  int d = 0;
  Index dim = 0;
  std::vector<Mat> gammas;
  // Optional antiunitary U K commuting with every generator; theta_square is 0 when absent.
  Mat intertwiner;
  int theta_square = 0;
};

namespace detail {

inline Mat pauli(char p) {
  Mat M = Mat::Zero(2, 2);
  switch (p) {
    case 'I': M << 1, 0, 0, 1; break;
    case 'X': M << 0, 1, 1, 0; break;
    case 'Y': M << 0, -I_unit, I_unit, 0; break;
    case 'Z': M << 1, 0, 0, -1; break;
    case 'E': M << 0, 1, -1, 0; break;  // i * sigma_y, real
  }
  return M;
}

inline Mat pauli_string(const std::string& s) {
  Mat M = Mat::Identity(1, 1);
  for (char c : s) M = kron(M, pauli(c));
  return M;
}

}  // namespace detail

inline double anticommutator_residual(const std::vector<Mat>& gammas) {
  double worst = 0.0;
  for (std::size_t i = 0; i < gammas.size(); ++i)
    for (std::size_t j = i; j < gammas.size(); ++j) {
      Mat A = gammas[i] * gammas[j] + gammas[j] * gammas[i];
      if (i == j) A -= 2.0 * Mat::Identity(A.rows(), A.cols());
      worst = std::max(worst, A.cwiseAbs().maxCoeff());
    }
  return worst;
}

// Searches real Pauli strings for U with U conj(g) = g U for every generator and U conj(U) = sign.
inline bool find_intertwiner(const std::vector<Mat>& gammas, int sign, Mat& out) {
  if (gammas.empty()) return false;
  Index dim = gammas.front().rows();
  int qubits = 0;
  while ((Index(1) << qubits) < dim) ++qubits;
  const char letters[4] = {'I', 'X', 'Z', 'E'};
  long total = 1;
  for (int q = 0; q < qubits; ++q) total *= 4;
  for (long code = 0; code < total; ++code) {
    std::string s;
    long c = code;
    for (int q = 0; q < qubits; ++q) {
      s += letters[c % 4];
      c /= 4;
    }
    Mat U = detail::pauli_string(s);
    if ((U * U.conjugate() - double(sign) * Mat::Identity(dim, dim)).cwiseAbs().maxCoeff() != 0.0) continue;
    bool ok = true;
    for (const Mat& g : gammas)
      if ((U * g.conjugate() - g * U).cwiseAbs().maxCoeff() != 0.0) {
        ok = false;
        break;
      }
    if (ok) {
      out = U;
      return true;
    }
  }
  return false;
}

// Jordan-Wigner generators: Z..Z X I..I and Z..Z Y I..I per qubit, plus Z..Z for odd d.
// d = 1 uses sigma_z on C^2.
inline CliffordRep clifford_generators(int d, SymmetryClass cls) {
  if (d < 1 || d > 8) throw DomainError("clifford_generators: d must lie in 1..8, got " + std::to_string(d));
  CliffordRep rep;
  rep.d = d;
  if (d == 1) {
    rep.gammas.push_back(detail::pauli('Z'));
  } else {
    int m = d / 2;
    for (int k = 0; k < m; ++k) {
      std::string a(k, 'Z'), b(k, 'Z');
      a += 'X';
      b += 'Y';
      a += std::string(m - k - 1, 'I');
      b += std::string(m - k - 1, 'I');
      rep.gammas.push_back(detail::pauli_string(a));
      rep.gammas.push_back(detail::pauli_string(b));
    }
    if (d % 2 == 1) rep.gammas.push_back(detail::pauli_string(std::string(m, 'Z')));
  }
  rep.dim = rep.gammas.front().rows();
  int want = cls == SymmetryClass::RealSymmetric ? 1 : cls == SymmetryClass::QuaternionSelfDual ? -1 : 0;
  if (want != 0 && find_intertwiner(rep.gammas, want, rep.intertwiner)) rep.theta_square = want;
  return rep;
}

}  // namespace halmos
