#pragma once

#include <algorithm>

#include "halmos/matrix.hpp"

namespace halmos {

struct DiagnosticsReport {
  double commutator_defect = 0.0;
  double sphere_defect = 0.0;
  double contraction_defect = 0.0;
  RMat pair_table;
  // Frobenius counterparts, reported alongside the operator-norm fields.
  double commutator_defect_frobenius = 0.0;
  double sphere_defect_frobenius = 0.0;
};

inline RMat commutator_table(const MatrixTuple& T) {
  int d = T.d();
  RMat P = RMat::Zero(d, d);
  for (int r = 0; r < d; ++r)
    for (int s = r + 1; s < d; ++s) {
      double c = op_norm(T.mats[r] * T.mats[s] - T.mats[s] * T.mats[r]);
      P(r, s) = c;
      P(s, r) = c;
    }
  return P;
}

inline double commutator_defect(const MatrixTuple& T) {
  RMat P = commutator_table(T);
  return P.size() == 0 ? 0.0 : P.maxCoeff();
}

inline Mat sphere_residual(const MatrixTuple& T) {
  Mat S = -Mat::Identity(T.n, T.n);
  for (const Mat& H : T.mats) S += H * H;
  return S;
}

inline double sphere_defect(const MatrixTuple& T) { return op_norm(sphere_residual(T)); }

inline double contraction_defect(const MatrixTuple& T) {
  double worst = 0.0;
  for (const Mat& H : T.mats) worst = std::max(worst, op_norm(H) - 1.0);
  return std::max(0.0, worst);
}

inline DiagnosticsReport diagnose(const MatrixTuple& T) {
  DiagnosticsReport rep;
  rep.pair_table = commutator_table(T);
  rep.commutator_defect = rep.pair_table.size() == 0 ? 0.0 : rep.pair_table.maxCoeff();
  Mat S = sphere_residual(T);
  rep.sphere_defect = op_norm(S);
  rep.sphere_defect_frobenius = S.norm();
  rep.contraction_defect = contraction_defect(T);
  for (int r = 0; r < T.d(); ++r)
    for (int s = r + 1; s < T.d(); ++s)
      rep.commutator_defect_frobenius =
          std::max(rep.commutator_defect_frobenius, (T.mats[r] * T.mats[s] - T.mats[s] * T.mats[r]).norm());
  return rep;
}

}  // namespace halmos
