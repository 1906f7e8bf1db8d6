#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "halmos/crt/smith.hpp"
#include "halmos/errors.hpp"

namespace halmos::crt {

enum class Part { O = 0, U = 1, T = 2 };

inline constexpr std::array<Part, 3> all_parts = {Part::O, Part::U, Part::T};

inline int part_period(Part p) { return p == Part::O ? 8 : p == Part::U ? 2 : 4; }

inline std::string to_string(Part p) { return p == Part::O ? "O" : p == Part::U ? "U" : "T"; }

inline Part parse_part(const std::string& s) {
  if (s == "O") return Part::O;
  if (s == "U") return Part::U;
  if (s == "T") return Part::T;
  throw PresentationError("unknown module part '" + s + "'");
}

inline int mod8(int n) { return ((n % 8) + 8) % 8; }

// Invariant factors; 0 stands for a free summand Z. The empty list is the zero group.
using Factors = std::vector<Int>;

struct GradedGroup {
  int period = 8;
  // Stored over a full real period; entries repeat with `period`.
  std::array<Factors, 8> groups;

  const Factors& at(int n) const { return groups[mod8(n)]; }
  Eigen::Index rank_at(int n) const { return static_cast<Eigen::Index>(at(n).size()); }
};

struct Operation {
  std::string name;
  Part src = Part::O, dst = Part::O;
  int shift = 0;
  // mats[n] maps the source group in degree n to the target group in degree n + shift.
  std::array<IMat, 8> mats;
};

struct CrtModule {
  std::array<GradedGroup, 3> parts;
  std::map<std::string, Operation> ops;

  const GradedGroup& part(Part p) const { return parts[static_cast<int>(p)]; }
  GradedGroup& part(Part p) { return parts[static_cast<int>(p)]; }
  const Factors& group(Part p, int n) const { return part(p).at(n); }
  const Operation& op(const std::string& name) const {
    auto it = ops.find(name);
    if (it == ops.end()) throw PresentationError("module has no operation '" + name + "'");
    return it->second;
  }
};

struct OpSignature {
  const char* name;
  Part src, dst;
  int shift;
};

// The structure maps: c, r, eps, zeta, psiU, psiT, gamma, tau and the module multiplications.
inline const std::vector<OpSignature>& op_signatures() {
  static const std::vector<OpSignature> sigs = {
      {"c", Part::O, Part::U, 0},      {"r", Part::U, Part::O, 0},      {"eps", Part::O, Part::T, 0},
      {"zeta", Part::T, Part::U, 0},   {"psiU", Part::U, Part::U, 0},   {"psiT", Part::T, Part::T, 0},
      {"gamma", Part::U, Part::T, -1}, {"tau", Part::T, Part::O, 1},    {"etaO", Part::O, Part::O, 1},
      {"etaT", Part::T, Part::T, 1},   {"betaU", Part::U, Part::U, 2},  {"betaT", Part::T, Part::T, 4},
      {"betaO", Part::O, Part::O, 8},  {"xi", Part::O, Part::O, 4},     {"omega", Part::T, Part::T, 3},
  };
  return sigs;
}

// Module with the given groups and every operation set to zero.
inline CrtModule zero_operations(const std::array<GradedGroup, 3>& parts) {
  CrtModule M;
  M.parts = parts;
  for (const auto& s : op_signatures()) {
    Operation op;
    op.name = s.name;
    op.src = s.src;
    op.dst = s.dst;
    op.shift = s.shift;
    for (int n = 0; n < 8; ++n)
      op.mats[n] = IMat::Zero(M.group(s.dst, n + s.shift).size(), M.group(s.src, n).size());
    M.ops[s.name] = op;
  }
  return M;
}

inline CrtModule zero_module() {
  std::array<GradedGroup, 3> parts;
  for (Part p : all_parts) parts[static_cast<int>(p)].period = part_period(p);
  return zero_operations(parts);
}

// Reduces a vector into canonical representatives modulo the relations of the group.
inline bool is_zero_in(const IVec& v, const Factors& f) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (f[i] == 0 ? v(i) != 0 : v(i) % f[i] != 0) return false;
  }
  return true;
}

inline IMat reduce(const IMat& M, const Factors& f) {
  IMat R = M;
  for (Eigen::Index i = 0; i < R.rows(); ++i)
    if (f[i] != 0)
      for (Eigen::Index j = 0; j < R.cols(); ++j) R(i, j) = ((R(i, j) % f[i]) + f[i]) % f[i];
  return R;
}

inline bool is_zero_map(const IMat& M, const Factors& target) { return reduce(M, target).isZero(); }

inline IMat relation_matrix(const Factors& f) {
  IMat D = IMat::Zero(f.size(), f.size());
  for (std::size_t i = 0; i < f.size(); ++i) D(i, i) = f[i];
  return D;
}

inline void validate(const CrtModule& M) {
  for (Part p : all_parts) {
    const GradedGroup& g = M.part(p);
    if (g.period != part_period(p))
      throw PresentationError("part " + to_string(p) + " has period " + std::to_string(g.period) + ", expected " +
                              std::to_string(part_period(p)));
    for (int n = 0; n < 8; ++n) {
      const Factors& f = g.groups[n];
      if (f != g.at(n + g.period))
        throw PresentationError("part " + to_string(p) + " is not periodic at degree " + std::to_string(n));
      for (std::size_t i = 0; i < f.size(); ++i) {
        if (f[i] < 0 || f[i] == 1)
          throw PresentationError("part " + to_string(p) + " degree " + std::to_string(n) +
                                  ": invariant factors must be 0 or at least 2");
        if (f[i] != 0 && i + 1 < f.size() && f[i + 1] % f[i] != 0)
          throw PresentationError("part " + to_string(p) + " degree " + std::to_string(n) +
                                  ": invariant factors must divide their successors");
      }
    }
  }
  for (const auto& s : op_signatures()) {
    auto it = M.ops.find(s.name);
    if (it == M.ops.end()) throw PresentationError(std::string("missing operation ") + s.name);
    const Operation& op = it->second;
    if (op.src != s.src || op.dst != s.dst || op.shift != s.shift)
      throw PresentationError(std::string("operation ") + s.name + " has the wrong signature");
    for (int n = 0; n < 8; ++n) {
      const Factors& fs = M.group(op.src, n);
      const Factors& ft = M.group(op.dst, n + op.shift);
      const IMat& A = op.mats[n];
      if (A.rows() != static_cast<Eigen::Index>(ft.size()) || A.cols() != static_cast<Eigen::Index>(fs.size()))
        throw PresentationError(std::string("operation ") + s.name + " degree " + std::to_string(n) +
                                ": matrix shape does not match the groups");
      // Torsion generators must land on elements of compatible order.
      for (std::size_t j = 0; j < fs.size(); ++j)
        if (fs[j] != 0 && !is_zero_in(A.col(j) * fs[j], ft))
          throw PresentationError(std::string("operation ") + s.name + " degree " + std::to_string(n) +
                                  ": not well defined on the torsion of generator " + std::to_string(j));
    }
  }
}

// Reindexes every part and operation: new degree n holds old degree n - k.
inline CrtModule shift(const CrtModule& M, int k) {
  CrtModule R = M;
  for (Part p : all_parts)
    for (int n = 0; n < 8; ++n) R.part(p).groups[n] = M.part(p).at(n - k);
  for (auto& [name, op] : R.ops)
    for (int n = 0; n < 8; ++n) op.mats[n] = M.op(name).mats[mod8(n - k)];
  return R;
}

inline bool operator==(const CrtModule& a, const CrtModule& b) {
  for (Part p : all_parts)
    if (a.part(p).period != b.part(p).period || a.part(p).groups != b.part(p).groups) return false;
  if (a.ops.size() != b.ops.size()) return false;
  for (const auto& [name, op] : a.ops) {
    auto it = b.ops.find(name);
    if (it == b.ops.end()) return false;
    for (int n = 0; n < 8; ++n)
      if (op.mats[n].rows() != it->second.mats[n].rows() || op.mats[n].cols() != it->second.mats[n].cols() ||
          op.mats[n] != it->second.mats[n])
        return false;
  }
  return true;
}

}  // namespace halmos::crt
