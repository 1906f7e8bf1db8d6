#pragma once

#include <cstdint>

#include "halmos/matrix.hpp"

namespace halmos {

// Adds to each matrix a random self-adjoint perturbation of the tuple's class with
// operator norm exactly eps.
inline MatrixTuple perturb(const MatrixTuple& T, double eps, std::uint64_t seed) {
  if (eps < 0.0) throw DomainError("perturb: eps must be nonnegative");
  if (eps == 0.0) return T;
  Rng root(seed, 0x70657274ULL);
  MatrixTuple R = T;
  for (int r = 0; r < T.d(); ++r) {
    Rng rng = root.split(static_cast<std::uint64_t>(r));
    R.mats[r] = class_project(T.mats[r] + random_class_hermitian(T.n, T.cls, rng, eps), T.cls);
  }
  return R;
}

}  // namespace halmos
