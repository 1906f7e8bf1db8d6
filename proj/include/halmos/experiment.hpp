#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "halmos/approx.hpp"
#include "halmos/crt/checks.hpp"
#include "halmos/diagnostics.hpp"
#include "halmos/generate.hpp"
#include "halmos/index.hpp"
#include "halmos/io.hpp"
#include "halmos/perturb.hpp"

namespace halmos {

inline crt::Algebra class_algebra(SymmetryClass cls) {
  switch (cls) {
    case SymmetryClass::RealSymmetric: return crt::Algebra::R;
    case SymmetryClass::ComplexHermitian: return crt::Algebra::C;
    case SymmetryClass::QuaternionSelfDual: return crt::Algebra::H;
  }
  return crt::Algebra::C;
}

// A d-tuple near the sphere S^{d-1} can only carry a nonzero index when the
// free module on a generator in degree d-1 maps nontrivially to the class's module.
inline bool obstruction_possible(int d, SymmetryClass cls) {
  if (d < 1) return false;
  return crt::hom_exists(d - 1, crt::base_module(class_algebra(cls)));
}

struct FamilyGrid {
  std::string id;
  GeneratorSpec spec;
  std::vector<int> L;
  std::vector<double> eps;
  int replicates = 1;
};

struct ExperimentConfig {
  int version = 1;
  std::uint64_t seed = 0;
  IndexMethod method = IndexMethod::Auto;
  double gap_threshold = 1e-6;
  ApproxOptions optimizer;
  std::vector<FamilyGrid> families;
  std::string table_path;
  io::TableFormat format = io::TableFormat::Csv;
};

namespace detail {

inline void reject_unknown(const io::json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key())) throw ConfigError(where + ": unknown field '" + it.key() + "'");
}

template <class T>
T get_field(const io::json& obj, const char* key, const T& fallback, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  try {
    return it->get<T>();
  } catch (const io::json::exception&) {
    throw ConfigError(where + ": field '" + key + "' has the wrong type");
  }
}

template <class T>
std::vector<T> get_list(const io::json& obj, const char* key, const T& fallback, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) return {fallback};
  try {
    if (it->is_array()) {
      auto v = it->get<std::vector<T>>();
      if (v.empty()) throw ConfigError(where + ": field '" + key + "' must not be empty");
      return v;
    }
    return {it->get<T>()};
  } catch (const io::json::exception&) {
    throw ConfigError(where + ": field '" + key + "' has the wrong type");
  }
}

}  // namespace detail

inline ExperimentConfig parse_experiment_config(const io::json& j) {
  using detail::get_field;
  detail::reject_unknown(j, {"version", "seed", "index", "optimizer", "families", "output"}, "config");
  ExperimentConfig cfg;
  cfg.version = get_field<int>(j, "version", 1, "config");
  if (cfg.version != 1) throw ConfigError("config: unsupported version " + std::to_string(cfg.version));
  cfg.seed = get_field<std::uint64_t>(j, "seed", 0, "config");
  cfg.optimizer.seed = cfg.seed;
  if (j.contains("index")) {
    const auto& ij = j.at("index");
    detail::reject_unknown(ij, {"method", "gap_threshold"}, "config.index");
    try {
      cfg.method = parse_method(get_field<std::string>(ij, "method", "auto", "config.index"));
    } catch (const DomainError& e) {
      throw ConfigError(std::string("config.index: ") + e.what());
    }
    cfg.gap_threshold = get_field<double>(ij, "gap_threshold", cfg.gap_threshold, "config.index");
    if (!(cfg.gap_threshold >= 0.0)) throw ConfigError("config.index: gap_threshold must be nonnegative");
  }
  if (j.contains("optimizer")) {
    const auto& oj = j.at("optimizer");
    detail::reject_unknown(oj, {"restarts", "max_sweeps", "tol_offdiag"}, "config.optimizer");
    cfg.optimizer.restarts = get_field<int>(oj, "restarts", cfg.optimizer.restarts, "config.optimizer");
    cfg.optimizer.max_sweeps = get_field<int>(oj, "max_sweeps", cfg.optimizer.max_sweeps, "config.optimizer");
    cfg.optimizer.tol_offdiag = get_field<double>(oj, "tol_offdiag", cfg.optimizer.tol_offdiag, "config.optimizer");
    if (cfg.optimizer.restarts < 1 || cfg.optimizer.max_sweeps < 1 || !(cfg.optimizer.tol_offdiag > 0.0))
      throw ConfigError("config.optimizer: counts must be positive and tol_offdiag > 0");
  }
  if (!j.contains("families") || !j.at("families").is_array() || j.at("families").empty())
    throw ConfigError("config: 'families' must be a nonempty array");
  int k = 0;
  for (const auto& fj : j.at("families")) {
    const std::string where = "config.families[" + std::to_string(k++) + "]";
    detail::reject_unknown(fj,
                           {"id", "kind", "base_kind", "class", "d", "L", "points", "max_multiplicity", "rotate",
                            "eps", "replicates"},
                           where);
    FamilyGrid f;
    try {
      f.spec.kind = parse_kind(get_field<std::string>(fj, "kind", "point", where));
      f.spec.base_kind = parse_kind(get_field<std::string>(fj, "base_kind", "point", where));
      f.spec.cls = parse_class(get_field<std::string>(fj, "class", "C", where));
    } catch (const DomainError& e) {
      throw ConfigError(where + ": " + e.what());
    }
    f.spec.d = get_field<int>(fj, "d", 0, where);
    if (f.spec.d < 1) throw ConfigError(where + ": 'd' must be a positive integer");
    f.spec.points = get_field<int>(fj, "points", f.spec.points, where);
    f.spec.max_multiplicity = get_field<int>(fj, "max_multiplicity", f.spec.max_multiplicity, where);
    f.spec.rotate = get_field<bool>(fj, "rotate", false, where);
    f.L = detail::get_list<int>(fj, "L", 1, where);
    f.eps = detail::get_list<double>(fj, "eps", 0.0, where);
    f.replicates = get_field<int>(fj, "replicates", 1, where);
    if (f.spec.points < 1 || f.spec.max_multiplicity < 1 || f.replicates < 1)
      throw ConfigError(where + ": points, max_multiplicity and replicates must be positive");
    for (int L : f.L)
      if (L < 1) throw ConfigError(where + ": 'L' values must be positive");
    for (double e : f.eps)
      if (!(e >= 0.0)) throw ConfigError(where + ": 'eps' values must be nonnegative");
    if (f.spec.kind != GeneratorKind::Perturbed && (f.eps.size() != 1 || f.eps[0] != 0.0))
      throw ConfigError(where + ": 'eps' requires kind 'perturbed'");
    if (f.spec.base_kind == GeneratorKind::Perturbed) throw ConfigError(where + ": base_kind cannot be 'perturbed'");
    f.id = get_field<std::string>(fj, "id", to_string(f.spec.kind) + "-" + short_name(f.spec.cls) + "-d" +
                                                std::to_string(f.spec.d),
                                  where);
    cfg.families.push_back(std::move(f));
  }
  if (j.contains("output")) {
    const auto& oj = j.at("output");
    detail::reject_unknown(oj, {"table", "format"}, "config.output");
    cfg.table_path = get_field<std::string>(oj, "table", "", "config.output");
    try {
      cfg.format = io::parse_format(get_field<std::string>(oj, "format", "csv", "config.output"));
    } catch (const DomainError& e) {
      throw ConfigError(std::string("config.output: ") + e.what());
    }
  }
  return cfg;
}

inline const std::vector<std::string>& experiment_columns() {
  static const std::vector<std::string> cols = {
      "family",       "kind",          "class",          "d",           "L",           "eps",
      "replicate",    "seed",          "N",              "delta",       "sphere_defect", "contraction_defect",
      "index_method", "index_group",   "index_value",    "index_gap",   "index_valid", "best_distance",
      "distance_frobenius", "restarts", "sweeps_used",   "converged",   "hom_exists",  "contradiction",
      "gating_violation", "error"};
  return cols;
}

struct ExperimentRow {
  io::json fields;
  bool contradiction = false;
  bool gating_violation = false;
};

inline std::uint64_t row_seed(std::uint64_t global, std::size_t family, std::size_t cell) {
  Rng r = Rng(global, 0x65787074ULL).split(family).split(cell);
  return r.next_u64();
}

inline ExperimentRow run_cell(const FamilyGrid& f, int L, double eps, int replicate, std::uint64_t seed,
                              const ExperimentConfig& cfg) {
  ExperimentRow row;
  auto& r = row.fields;
  const bool dirac = f.spec.kind == GeneratorKind::DiracCompression ||
                     (f.spec.kind == GeneratorKind::Perturbed && f.spec.base_kind == GeneratorKind::DiracCompression);
  r["family"] = f.id;
  r["kind"] = to_string(f.spec.kind);
  r["class"] = short_name(f.spec.cls);
  r["d"] = f.spec.d;
  r["L"] = dirac ? io::json(L) : io::json();
  r["eps"] = eps;
  r["replicate"] = replicate;
  r["seed"] = seed;
  const bool possible = obstruction_possible(f.spec.d, f.spec.cls);
  r["hom_exists"] = possible;
  try {
    GeneratorSpec spec = f.spec;
    spec.L = L;
    spec.eps = eps;
    spec.seed = seed;
    MatrixTuple T = generate(spec);
    DiagnosticsReport diag = diagnose(T);
    r["N"] = T.n;
    r["delta"] = diag.commutator_defect;
    r["sphere_defect"] = diag.sphere_defect;
    r["contraction_defect"] = diag.contraction_defect;
    IndexOptions iopt;
    iopt.gap_threshold = cfg.gap_threshold;
    iopt.throw_on_small_gap = false;
    IndexMethod m = resolve_method(T, cfg.method);
    IndexResult idx = compute_index(T, m, iopt);
    r["index_method"] = m == IndexMethod::Det ? "det" : "bott";
    r["index_group"] = to_string(idx.group);
    r["index_value"] = idx.value;
    r["index_gap"] = idx.gap;
    r["index_valid"] = idx.valid;
    ApproxOptions ao = cfg.optimizer;
    ao.seed = seed;
    ApproxResult ar = nearest_commuting(T, ao);
    r["best_distance"] = ar.distance;
    r["distance_frobenius"] = ar.distance_frobenius;
    r["restarts"] = ao.restarts;
    r["sweeps_used"] = ar.sweeps_used;
    r["converged"] = ar.converged;
    row.contradiction = obstruction_contradiction(idx, ar.distance, eps, f.spec.d);
    row.gating_violation = idx.valid && idx.value != 0 && !possible;
  } catch (const Error& e) {
    r["error"] = e.what();
  }
  r["contradiction"] = row.contradiction;
  r["gating_violation"] = row.gating_violation;
  return row;
}

struct ExperimentOutcome {
  io::Table table;
  int contradictions = 0;
  int gating_violations = 0;
  int errors = 0;
};

// Sweeps every grid cell; per-row failures are recorded in the 'error' column.
inline ExperimentOutcome run_experiment(const ExperimentConfig& cfg, int threads = 1) {
  ExperimentOutcome out;
  out.table.columns = experiment_columns();
  ExperimentConfig c = cfg;
  c.optimizer.threads = std::max(1, threads);
  for (std::size_t fi = 0; fi < cfg.families.size(); ++fi) {
    const FamilyGrid& f = cfg.families[fi];
    std::size_t cell = 0;
    for (int L : f.L)
      for (double eps : f.eps)
        for (int rep = 0; rep < f.replicates; ++rep) {
          ExperimentRow row = run_cell(f, L, eps, rep, row_seed(cfg.seed, fi, cell++), c);
          out.contradictions += row.contradiction;
          out.gating_violations += row.gating_violation;
          out.errors += row.fields.contains("error");
          out.table.rows.push_back(std::move(row.fields));
        }
  }
  return out;
}

// Rotated point-evaluation family of size N, perturbed so that its commutator defect matches delta.
inline MatrixTuple matched_trivial_family(Index N, SymmetryClass cls, int d, double delta, std::uint64_t seed) {
  if (cls == SymmetryClass::QuaternionSelfDual && N % 2 != 0)
    throw DimensionError("matched_trivial_family: quaternionic size must be even");
  if (d < 2 || delta < 0.0) throw DomainError("matched_trivial_family: need d >= 2 and delta >= 0");
  GeneratorSpec g;
  g.kind = GeneratorKind::PointEval;
  g.cls = cls;
  g.d = d;
  g.points = static_cast<int>(cls == SymmetryClass::QuaternionSelfDual ? N / 2 : N);
  g.max_multiplicity = 1;
  g.rotate = true;
  g.seed = seed;
  MatrixTuple P = generate(g);
  const std::uint64_t pseed = Rng(seed, 0x6d617463ULL).next_u64();
  double lo = 0.0, hi = 1.0;
  while (commutator_defect(perturb(P, hi, pseed)) < delta) {
    hi *= 2.0;
    if (hi > 1e6) throw DomainError("matched_trivial_family: target defect is unreachable");
  }
  for (int it = 0; it < 48; ++it) {
    double mid = 0.5 * (lo + hi);
    (commutator_defect(perturb(P, mid, pseed)) < delta ? lo : hi) = mid;
  }
  return perturb(P, hi, pseed);
}

}  // namespace halmos
