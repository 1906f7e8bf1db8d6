#pragma once

#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "halmos/crt/base.hpp"
#include "halmos/crt/module.hpp"

namespace halmos::crt {

// A composite of operations, written in composition order: {"r", "c"} is r after c.
// A trailing "^-1" on a name denotes the inverse of an invertible operation.
using Word = std::vector<std::string>;

struct Term {
  Int coef = 1;
  Word word;  // empty word is the identity
};

using LinearMap = std::vector<Term>;

struct Evaluated {
  IMat mat;
  Part part;
  int degree;
};

inline Evaluated eval_word(const CrtModule& M, const Word& w, Part src, int n) {
  Evaluated e{IMat::Identity(M.group(src, n).size(), M.group(src, n).size()), src, n};
  for (auto it = w.rbegin(); it != w.rend(); ++it) {
    std::string name = *it;
    bool inverse = false;
    if (name.size() > 3 && name.compare(name.size() - 3, 3, "^-1") == 0) {
      inverse = true;
      name.resize(name.size() - 3);
    }
    const Operation& op = M.op(name);
    if (inverse) {
      if (op.dst != e.part || op.src != e.part)
        throw PresentationError("cannot apply " + *it + " in part " + to_string(e.part));
      IMat fwd = op.mats[mod8(e.degree - op.shift)];
      e.mat = mul(unimodular_inverse(fwd), e.mat);
      e.degree -= op.shift;
    } else {
      if (op.src != e.part) throw PresentationError("cannot apply " + name + " in part " + to_string(e.part));
      e.mat = mul(op.mats[mod8(e.degree)], e.mat);
      e.part = op.dst;
      e.degree += op.shift;
    }
  }
  return e;
}

inline Evaluated eval_map(const CrtModule& M, const LinearMap& f, Part src, int n) {
  if (f.empty()) throw PresentationError("empty linear map");
  Evaluated acc = eval_word(M, f.front().word, src, n);
  acc.mat *= f.front().coef;
  for (std::size_t i = 1; i < f.size(); ++i) {
    Evaluated e = eval_word(M, f[i].word, src, n);
    if (e.part != acc.part || mod8(e.degree - acc.degree) != 0)
      throw PresentationError("terms of a linear map land in different groups");
    acc.mat += f[i].coef * e.mat;
  }
  return acc;
}

struct Relation {
  std::string name;
  Part src;
  LinearMap lhs, rhs;
};

inline const std::vector<Relation>& standard_relations() {
  using W = Word;
  static const std::vector<Relation> rels = {
      {"rc = 2", Part::O, {{1, W{"r", "c"}}}, {{2, W{}}}},
      {"cr = 1 + ψU", Part::U, {{1, W{"c", "r"}}}, {{1, W{}}, {1, W{"psiU"}}}},
      {"r = τγ", Part::U, {{1, W{"r"}}}, {{1, W{"tau", "gamma"}}}},
      {"c = ζε", Part::O, {{1, W{"c"}}}, {{1, W{"zeta", "eps"}}}},
      {"ψU² = 1", Part::U, {{1, W{"psiU", "psiU"}}}, {{1, W{}}}},
      {"ψT² = 1", Part::T, {{1, W{"psiT", "psiT"}}}, {{1, W{}}}},
      {"ψT ε = ε", Part::O, {{1, W{"psiT", "eps"}}}, {{1, W{"eps"}}}},
      {"ζγ = 0", Part::U, {{1, W{"zeta", "gamma"}}}, {{0, W{"zeta", "gamma"}}}},
      {"ζ = ψU ζ", Part::T, {{1, W{"zeta"}}}, {{1, W{"psiU", "zeta"}}}},
      {"ψU βU = −βU ψU", Part::U, {{1, W{"psiU", "betaU"}}}, {{-1, W{"betaU", "psiU"}}}},
      {"ψT βT = βT ψT", Part::T, {{1, W{"psiT", "betaT"}}}, {{1, W{"betaT", "psiT"}}}},
      {"ε βO = βT² ε", Part::O, {{1, W{"eps", "betaO"}}}, {{1, W{"betaT", "betaT", "eps"}}}},
      {"ζ βT = βU² ζ", Part::T, {{1, W{"zeta", "betaT"}}}, {{1, W{"betaU", "betaU", "zeta"}}}},
      {"γ βU² = βT γ", Part::U, {{1, W{"gamma", "betaU", "betaU"}}}, {{1, W{"betaT", "gamma"}}}},
      {"τ βT² = βO τ", Part::T, {{1, W{"tau", "betaT", "betaT"}}}, {{1, W{"betaO", "tau"}}}},
      {"γ = γ ψU", Part::U, {{1, W{"gamma"}}}, {{1, W{"gamma", "psiU"}}}},
      {"ηO = τε", Part::O, {{1, W{"etaO"}}}, {{1, W{"tau", "eps"}}}},
      {"ηT = γ βU ζ", Part::T, {{1, W{"etaT"}}}, {{1, W{"gamma", "betaU", "zeta"}}}},
      {"ξ = r βU² c", Part::O, {{1, W{"xi"}}}, {{1, W{"r", "betaU", "betaU", "c"}}}},
      {"ω = βT γ ζ", Part::T, {{1, W{"omega"}}}, {{1, W{"betaT", "gamma", "zeta"}}}},
      {"βT ετ = ετ βT + ηT βT", Part::T, {{1, W{"betaT", "eps", "tau"}}},
       {{1, W{"eps", "tau", "betaT"}}, {1, W{"etaT", "betaT"}}}},
      {"ε r ζ = 1 + ψT", Part::T, {{1, W{"eps", "r", "zeta"}}}, {{1, W{}}, {1, W{"psiT"}}}},
      {"γ c τ = 1 − ψT", Part::T, {{1, W{"gamma", "c", "tau"}}}, {{1, W{}}, {-1, W{"psiT"}}}},
      {"τ = −τ ψT", Part::T, {{1, W{"tau"}}}, {{-1, W{"tau", "psiT"}}}},
      {"τ βT ε = 0", Part::O, {{1, W{"tau", "betaT", "eps"}}}, {{0, W{"tau", "betaT", "eps"}}}},
      {"ε ξ = 2 βT ε", Part::O, {{1, W{"eps", "xi"}}}, {{2, W{"betaT", "eps"}}}},
      {"ξ τ = 2 τ βT", Part::T, {{1, W{"xi", "tau"}}}, {{2, W{"tau", "betaT"}}}},
  };
  return rels;
}

struct RelationCheck {
  std::string relation;
  int degree = 0;
  bool pass = true;
  IMat residual;  // lhs - rhs, reduced in the target group
};

struct RelationReport {
  std::vector<RelationCheck> checks;
  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
  std::vector<RelationCheck> failures() const {
    std::vector<RelationCheck> f;
    for (const auto& c : checks)
      if (!c.pass) f.push_back(c);
    return f;
  }
};

inline RelationReport check_relations(const CrtModule& M) {
  validate(M);
  RelationReport rep;
  for (const Relation& rel : standard_relations()) {
    for (int n = 0; n < 8; ++n) {
      Evaluated l = eval_map(M, rel.lhs, rel.src, n);
      Evaluated r = eval_map(M, rel.rhs, rel.src, n);
      if (l.part != r.part || mod8(l.degree - r.degree) != 0)
        throw PresentationError("relation '" + rel.name + "' compares different groups");
      RelationCheck c;
      c.relation = rel.name;
      c.degree = n;
      c.residual = reduce(l.mat - r.mat, M.group(l.part, l.degree));
      c.pass = c.residual.isZero();
      rep.checks.push_back(std::move(c));
    }
  }
  return rep;
}

// ---- exactness ----

namespace detail {

// Integer kernel basis of A (columns).
inline IMat integer_kernel(const IMat& A) {
  SmithForm sf = smith_normal_form(A);
  return sf.V.rightCols(A.cols() - sf.rank);
}

// Whether every column of X lies in the column span of B over the integers.
inline bool in_lattice(const IMat& X, const IMat& B) {
  if (X.cols() == 0) return true;
  if (B.cols() == 0) return X.isZero();
  SmithForm sf = smith_normal_form(B);
  IMat Y = mul(sf.U, X);
  for (Eigen::Index j = 0; j < Y.cols(); ++j)
    for (Eigen::Index i = 0; i < Y.rows(); ++i) {
      if (i < sf.rank) {
        if (Y(i, j) % sf.D(i, i) != 0) return false;
      } else if (Y(i, j) != 0) {
        return false;
      }
    }
  return true;
}

inline IMat hcat(const IMat& A, const IMat& B) {
  IMat C(A.rows(), A.cols() + B.cols());
  C << A, B;
  return C;
}

}  // namespace detail

// Exactness of G1 -f-> G2 -g-> G3 at G2.
inline bool exact_at(const IMat& F, const IMat& G, const Factors& g1, const Factors& g2, const Factors& g3,
                     std::string* why = nullptr) {
  (void)g1;
  if (!is_zero_map(mul(G, F), g3)) {
    if (why) *why = "composite is nonzero";
    return false;
  }
  const Eigen::Index k2 = static_cast<Eigen::Index>(g2.size());
  // Kernel of g on the presented group: solutions of G x + D3 y = 0, projected to x.
  IMat K = detail::integer_kernel(detail::hcat(G, relation_matrix(g3))).topRows(k2);
  if (!detail::in_lattice(K, detail::hcat(F, relation_matrix(g2)))) {
    if (why) *why = "kernel is larger than the image";
    return false;
  }
  return true;
}

struct ExactnessCheck {
  int sequence = 0;  // 1, 2 or 3
  int degree = 0;
  std::string position;
  bool pass = true;
  std::string detail;
};

struct ExactnessReport {
  std::vector<ExactnessCheck> checks;
  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
  std::vector<ExactnessCheck> failures() const {
    std::vector<ExactnessCheck> out;
    for (const auto& c : checks)
      if (!c.pass) out.push_back(c);
    return out;
  }
};

struct GradedMap {
  LinearMap map;
  Part src;
  int src_offset;  // the source degree is n + src_offset
};

struct ExactSequence {
  int id;
  std::vector<GradedMap> maps;  // three maps; the fourth is the first one at degree n - 1
  std::vector<std::string> positions;
};

inline const std::vector<ExactSequence>& standard_sequences() {
  using W = Word;
  static const std::vector<ExactSequence> seqs = {
      {1,
       {{{{1, W{"etaO"}}}, Part::O, 0}, {{{1, W{"c"}}}, Part::O, 1}, {{{1, W{"r", "betaU^-1"}}}, Part::U, 1}},
       {"MO(n+1)", "MU(n+1)", "MO(n-1)"}},
      {2,
       {{{{1, W{"etaO", "etaO"}}}, Part::O, 0},
        {{{1, W{"eps"}}}, Part::O, 2},
        {{{1, W{"tau", "betaT^-1"}}}, Part::T, 2}},
       {"MO(n+2)", "MT(n+2)", "MO(n-1)"}},
      {3,
       {{{{1, W{"gamma"}}}, Part::U, 1}, {{{1, W{"zeta"}}}, Part::T, 0}, {{{1, W{}}, {-1, W{"psiU"}}}, Part::U, 0}},
       {"MT(n)", "MU(n)", "MU(n) after 1-ψU"}},
  };
  return seqs;
}

inline ExactnessReport check_acyclicity(const CrtModule& M) {
  validate(M);
  ExactnessReport rep;
  for (const ExactSequence& s : standard_sequences()) {
    for (int n = 0; n < 8; ++n) {
      std::vector<Evaluated> e;
      std::vector<Factors> src_groups;
      for (const GradedMap& gm : s.maps) {
        e.push_back(eval_map(M, gm.map, gm.src, n + gm.src_offset));
        src_groups.push_back(M.group(gm.src, n + gm.src_offset));
      }
      const GradedMap& wrap = s.maps[0];
      Evaluated next = eval_map(M, wrap.map, wrap.src, n - 1 + wrap.src_offset);
      e.push_back(next);
      src_groups.push_back(M.group(wrap.src, n - 1 + wrap.src_offset));
      std::vector<std::pair<Part, int>> sources;
      for (const GradedMap& gm : s.maps) sources.push_back({gm.src, n + gm.src_offset});
      sources.push_back({wrap.src, n - 1 + wrap.src_offset});
      for (int p = 0; p < 3; ++p) {
        if (e[p].part != sources[p + 1].first || mod8(e[p].degree - sources[p + 1].second) != 0)
          throw PresentationError("sequence " + std::to_string(s.id) + " does not compose");
        ExactnessCheck c;
        c.sequence = s.id;
        c.degree = n;
        c.position = s.positions[p];
        const Factors& g3 = M.group(e[p + 1].part, e[p + 1].degree);
        c.pass = exact_at(e[p].mat, e[p + 1].mat, src_groups[p], src_groups[p + 1], g3, &c.detail);
        rep.checks.push_back(std::move(c));
      }
    }
  }
  return rep;
}

// ---- group arithmetic used by the derivation helper ----

struct GroupSummary {
  int rank = 0;
  std::vector<Int> torsion;  // nontrivial torsion invariant factors
  std::string to_string() const {
    std::ostringstream os;
    bool first = true;
    auto emit = [&](const std::string& s) {
      os << (first ? "" : " + ") << s;
      first = false;
    };
    if (rank > 0) emit(rank == 1 ? "Z" : "Z^" + std::to_string(rank));
    for (Int t : torsion) emit("Z/" + std::to_string(t));
    if (first) os << "0";
    return os.str();
  }
};

// Cokernel of F : G1 -> G2 with G2 presented by its invariant factors.
inline GroupSummary cokernel(const IMat& F, const Factors& g2) {
  IMat B = detail::hcat(F, relation_matrix(g2));
  SmithForm sf = smith_normal_form(B);
  GroupSummary s;
  s.rank = static_cast<int>(g2.size() - sf.rank);
  for (Eigen::Index i = 0; i < sf.rank; ++i)
    if (sf.D(i, i) > 1) s.torsion.push_back(sf.D(i, i));
  return s;
}

// Kernel of an endomorphism of a free group (its rank; it is free).
inline GroupSummary free_kernel(const IMat& F) {
  GroupSummary s;
  s.rank = static_cast<int>(detail::integer_kernel(F).cols());
  return s;
}

inline GroupSummary summarize(const Factors& f) {
  GroupSummary s;
  for (Int x : f) {
    if (x == 0)
      ++s.rank;
    else
      s.torsion.push_back(x);
  }
  return s;
}

struct Sequence3Derivation {
  int degree = 0;
  GroupSummary quotient;  // coker(1 - ψU) on MU(n+1), the subgroup of MT(n)
  GroupSummary kernel;    // ker(1 - ψU) on MU(n), the image of MT(n)
  GroupSummary actual;    // MT(n) as presented
  bool consistent = false;
};

// MT(n) sits in 0 -> coker(1-ψU on MU(n+1)) -> MT(n) -> ker(1-ψU on MU(n)) -> 0.
inline std::vector<Sequence3Derivation> derive_mt_from_sequence3(const CrtModule& M) {
  std::vector<Sequence3Derivation> out;
  for (int n = 0; n < 8; ++n) {
    for (int k : {n, n + 1})
      for (Int f : M.group(Part::U, k))
        if (f != 0) throw PresentationError("derivation assumes free unitary groups");
    auto one_minus_psi = [&](int k) {
      const IMat& P = M.op("psiU").mats[mod8(k)];
      return IMat(IMat::Identity(P.rows(), P.cols()) - P);
    };
    Sequence3Derivation d;
    d.degree = n;
    d.quotient = cokernel(one_minus_psi(n + 1), M.group(Part::U, n + 1));
    d.kernel = free_kernel(one_minus_psi(n));
    d.actual = summarize(M.group(Part::T, n));
    Int tq = 1, ta = 1;
    for (Int t : d.quotient.torsion) tq *= t;
    for (Int t : d.actual.torsion) ta *= t;
    // The kernel is free, so the extension splits.
    d.consistent = d.actual.rank == d.quotient.rank + d.kernel.rank && ta == tq;
    out.push_back(d);
  }
  return out;
}

// ---- homomorphisms ----

struct CrtHom {
  // maps[part][n]: source group in degree n to target group in degree n.
  std::array<std::array<IMat, 8>, 3> maps;
  const IMat& at(Part p, int n) const { return maps[static_cast<int>(p)][mod8(n)]; }
  IMat& at(Part p, int n) { return maps[static_cast<int>(p)][mod8(n)]; }
};

struct HomCheck {
  bool pass = true;
  std::vector<std::string> failures;
};

inline HomCheck check_hom(const CrtModule& src, const CrtModule& dst, const CrtHom& h) {
  HomCheck out;
  for (Part p : all_parts)
    for (int n = 0; n < 8; ++n) {
      const IMat& A = h.at(p, n);
      const Factors& fs = src.group(p, n);
      const Factors& ft = dst.group(p, n);
      if (A.rows() != static_cast<Eigen::Index>(ft.size()) || A.cols() != static_cast<Eigen::Index>(fs.size()))
        throw PresentationError("homomorphism has the wrong shape in part " + to_string(p));
      for (std::size_t j = 0; j < fs.size(); ++j)
        if (fs[j] != 0 && !is_zero_in(A.col(j) * fs[j], ft)) {
          out.pass = false;
          out.failures.push_back("torsion not respected in part " + to_string(p) + " degree " + std::to_string(n));
        }
    }
  for (const auto& s : op_signatures())
    for (int n = 0; n < 8; ++n) {
      const IMat lhs = mul(dst.op(s.name).mats[n], h.at(s.src, n));
      const IMat rhs = mul(h.at(s.dst, n + s.shift), src.op(s.name).mats[n]);
      if (!is_zero_map(lhs - rhs, dst.group(s.dst, n + s.shift))) {
        out.pass = false;
        out.failures.push_back(std::string("does not commute with ") + s.name + " in degree " + std::to_string(n));
      }
    }
  return out;
}

// Words generating the free module on one generator from that generator, by old degree and part.
inline const std::array<std::array<Word, 8>, 3>& free_generator_words() {
  static const std::array<std::array<Word, 8>, 3> words = [] {
    std::array<std::array<Word, 8>, 3> w;
    auto& O = w[0];
    auto& U = w[1];
    auto& T = w[2];
    O[0] = {};
    O[1] = {"etaO"};
    O[2] = {"etaO", "etaO"};
    O[4] = {"xi"};
    U[0] = {"c"};
    U[2] = {"betaU", "c"};
    U[4] = {"betaU", "betaU", "c"};
    U[6] = {"betaU", "betaU", "betaU", "c"};
    T[0] = {"eps"};
    T[1] = {"eps", "etaO"};
    T[3] = {"omega", "eps"};
    T[4] = {"betaT", "eps"};
    T[5] = {"betaT", "eps", "etaO"};
    T[7] = {"betaT", "omega", "eps"};
    return w;
  }();
  return words;
}

// The homomorphism free_module(d) -> M sending the generator to x in MO(-d) of M.
inline CrtHom free_hom(int d, const CrtModule& M, const IVec& x) {
  const Factors& tgt = M.group(Part::O, -d);
  if (x.size() != static_cast<Eigen::Index>(tgt.size()))
    throw PresentationError("generator image has the wrong length");
  CrtModule F = free_module(d);
  CrtHom h;
  for (Part p : all_parts)
    for (int n = 0; n < 8; ++n) {
      const int old = mod8(n + d);
      const Factors& fs = F.group(p, n);
      IMat A = IMat::Zero(M.group(p, n).size(), fs.size());
      if (!fs.empty()) {
        const Word& w = free_generator_words()[static_cast<int>(p)][old];
        Evaluated e = eval_word(M, w, Part::O, -d);
        if (e.part != p || mod8(e.degree - n) != 0) throw PresentationError("free generator word mismatch");
        A = mul(e.mat, IMat(x));
      }
      h.at(p, n) = A;
    }
  return h;
}

// Whether free_module(d) admits a nonzero map to M.
inline bool hom_exists(int d, const CrtModule& M) { return !M.group(Part::O, -d).empty(); }

inline std::vector<bool> degree_table(Algebra a, int dmax) {
  CrtModule M = base_module(a);
  std::vector<bool> t;
  for (int d = 1; d <= dmax; ++d) t.push_back(hom_exists(d, M));
  return t;
}

}  // namespace halmos::crt
