#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "halmos/approx.hpp"
#include "halmos/crt/checks.hpp"
#include "halmos/diagnostics.hpp"
#include "halmos/experiment.hpp"
#include "halmos/generate.hpp"
#include "halmos/index.hpp"
#include "halmos/io.hpp"

using namespace halmos;
using io::json;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitDomain = 3;
constexpr int kExitIo = 4;

int resolve_threads(int flag) {
  if (flag > 0) return flag;
  if (const char* env = std::getenv("HALMOS_LAB_THREADS")) {
    try {
      int v = std::stoi(env);
      if (v > 0) return v;
    } catch (const std::exception&) {
    }
    throw ConfigError("HALMOS_LAB_THREADS must be a positive integer");
  }
  return 1;
}

void write_or_print(const std::optional<std::string>& out, const json& j) {
  const std::string text = io::canonical_dump(j);
  if (out)
    io::atomic_write(*out, text);
  else
    std::cout << text;
}

struct GenerateArgs {
  std::string kind = "point", base_kind = "point", cls = "C";
  int d = 0, L = 1, points = 4, max_mult = 2;
  bool rotate = false;
  double eps = 0.0;
  std::uint64_t seed = 0;
  std::optional<std::string> out;
};

int cmd_generate(const GenerateArgs& a) {
  GeneratorSpec s;
  s.kind = parse_kind(a.kind);
  s.base_kind = parse_kind(a.base_kind);
  s.cls = parse_class(a.cls);
  s.d = a.d;
  s.L = a.L;
  s.points = a.points;
  s.max_multiplicity = a.max_mult;
  s.rotate = a.rotate;
  s.eps = a.eps;
  s.seed = a.seed;
  if (s.kind != GeneratorKind::Perturbed && a.eps != 0.0) throw DomainError("generate: --eps requires --kind perturbed");
  MatrixTuple T = generate(s);
  write_or_print(a.out, io::to_json(T));
  if (a.out)
    std::cout << "generate: " << to_string(s.kind) << " family, class " << short_name(T.cls) << ", d = " << T.d()
              << ", n = " << T.n << " -> " << *a.out << "\n";
  return 0;
}

int cmd_diagnose(const std::string& in, const std::optional<std::string>& out) {
  MatrixTuple T = io::read_tuple(in);
  DiagnosticsReport r = diagnose(T);
  if (out) io::atomic_write(*out, io::canonical_dump(io::to_json(r)));
  std::cout << "commutator_defect " << io::format_double(r.commutator_defect) << "\nsphere_defect "
            << io::format_double(r.sphere_defect) << "\ncontraction_defect " << io::format_double(r.contraction_defect)
            << "\n";
  return 0;
}

int cmd_index(const std::string& in, const std::string& method, double gap, const std::optional<std::string>& out) {
  MatrixTuple T = io::read_tuple(in);
  IndexOptions opts;
  opts.gap_threshold = gap;
  IndexMethod m = resolve_method(T, parse_method(method));
  IndexResult r = compute_index(T, m, opts);
  json j = io::to_json(r);
  j["method"] = m == IndexMethod::Det ? "det" : "bott";
  if (out) io::atomic_write(*out, io::canonical_dump(j));
  std::cout << "index (" << j["method"].get<std::string>() << "): group " << to_string(r.group) << ", value "
            << r.value << ", gap " << io::format_double(r.gap) << (r.valid ? ", valid" : ", invalid") << "\n";
  return 0;
}

int cmd_approx(const std::string& in, int restarts, int sweeps, double tol, std::uint64_t seed, int threads,
               const std::optional<std::string>& out, const std::optional<std::string>& k_out) {
  MatrixTuple T = io::read_tuple(in);
  ApproxOptions o;
  o.restarts = restarts;
  o.max_sweeps = sweeps;
  o.tol_offdiag = tol;
  o.seed = seed;
  o.threads = threads;
  if (restarts < 1 || sweeps < 1 || !(tol > 0.0)) throw DomainError("approx: restarts, sweeps and tol must be positive");
  ApproxResult r = nearest_commuting(T, o);
  json j{{"distance", r.distance},
         {"distance_frobenius", r.distance_frobenius},
         {"sweeps_used", r.sweeps_used},
         {"converged", r.converged},
         {"restart", r.restart},
         {"restarts", restarts},
         {"monotone", r.monotone},
         {"commuting_certificate", commuting_certificate(r.K)},
         {"energy_trace", r.energy_trace}};
  if (out) io::atomic_write(*out, io::canonical_dump(j));
  if (k_out) io::atomic_write(*k_out, io::canonical_dump(io::to_json(r.K)));
  std::cout << "approx: best distance " << io::format_double(r.distance) << " (restart " << r.restart << " of "
            << restarts << ", " << r.sweeps_used << " sweeps, " << (r.converged ? "converged" : "not converged")
            << ")\n";
  return 0;
}

int cmd_experiment(const std::string& grid, const std::optional<std::string>& out,
                   const std::optional<std::string>& format, int threads) {
  ExperimentConfig cfg = parse_experiment_config(io::read_json(grid));
  if (out) cfg.table_path = *out;
  if (format) cfg.format = io::parse_format(*format);
  if (cfg.table_path.empty()) throw ConfigError("experiment: no output table (use --out or output.table)");
  ExperimentOutcome res = run_experiment(cfg, threads);
  io::emit_table(res.table, cfg.format, cfg.table_path);
  std::cout << "experiment: " << res.table.rows.size() << " rows -> " << cfg.table_path << "; contradictions "
            << res.contradictions << ", gating violations " << res.gating_violations << ", row errors " << res.errors
            << "\n";
  return res.contradictions + res.gating_violations > 0 ? kExitDomain : 0;
}

json relation_report_json(const crt::RelationReport& rel, const crt::ExactnessReport& ex) {
  json fails = json::array();
  for (const auto& f : rel.failures()) {
    json res = io::to_json(f.residual);
    fails.push_back(json{{"relation", f.relation}, {"degree", f.degree}, {"residual", res}});
  }
  json xf = json::array();
  for (const auto& f : ex.failures())
    xf.push_back(json{{"sequence", f.sequence}, {"degree", f.degree}, {"position", f.position}, {"detail", f.detail}});
  return json{{"relations_checked", rel.checks.size()},
              {"relations_pass", rel.all_pass()},
              {"relation_failures", fails},
              {"exactness_checked", ex.checks.size()},
              {"exactness_pass", ex.all_pass()},
              {"exactness_failures", xf}};
}

int check_module(const crt::CrtModule& M, const std::string& label, const std::optional<std::string>& out) {
  crt::RelationReport rel = crt::check_relations(M);
  crt::ExactnessReport ex = crt::check_acyclicity(M);
  if (rel.all_pass())
    std::cout << label << ": all relations pass (" << rel.checks.size() << " degreewise checks)\n";
  for (const auto& f : rel.failures())
    std::cout << label << ": relation \"" << f.relation << "\" fails in degree " << f.degree << "\n";
  if (ex.all_pass())
    std::cout << label << ": all three sequences exact (" << ex.checks.size() << " positions)\n";
  for (const auto& f : ex.failures())
    std::cout << label << ": sequence " << f.sequence << " not exact at " << f.position << ", n = " << f.degree << " ("
              << f.detail << ")\n";
  if (out) io::atomic_write(*out, io::canonical_dump(relation_report_json(rel, ex)));
  return rel.all_pass() && ex.all_pass() ? 0 : kExitDomain;
}

struct CrtArgs {
  std::optional<std::string> check, degree_table, dump, derive, in, out, format;
  int max = 64;
};

int cmd_crt(const CrtArgs& a) {
  int modes = !!a.check + !!a.degree_table + !!a.dump + !!a.derive + !!a.in;
  if (modes != 1) throw ConfigError("crt: give exactly one of --check, --degree-table, --dump, --derive, --in");
  if (a.check) {
    crt::Algebra alg = crt::parse_algebra(*a.check);
    return check_module(crt::base_module(alg), "base(" + crt::to_string(alg) + ")", a.out);
  }
  if (a.in) return check_module(io::module_from_json(io::read_json(*a.in)), *a.in, a.out);
  if (a.dump) {
    crt::CrtModule M = crt::base_module(crt::parse_algebra(*a.dump));
    write_or_print(a.out, io::to_json(M));
    return 0;
  }
  if (a.derive) {
    crt::CrtModule M = crt::base_module(crt::parse_algebra(*a.derive));
    bool ok = true;
    for (const auto& d : crt::derive_mt_from_sequence3(M)) {
      std::cout << "n = " << d.degree << ": coker(1-psiU on MU(n+1)) = " << d.quotient.to_string()
                << ", ker(1-psiU on MU(n)) = " << d.kernel.to_string() << ", MT(n) = " << d.actual.to_string()
                << (d.consistent ? "" : "  INCONSISTENT") << "\n";
      ok = ok && d.consistent;
    }
    return ok ? 0 : kExitDomain;
  }
  crt::Algebra alg = crt::parse_algebra(*a.degree_table);
  if (alg != crt::Algebra::R && alg != crt::Algebra::H) throw ConfigError("crt: --degree-table expects R or H");
  if (a.max < 1) throw ConfigError("crt: --max must be at least 1");
  std::vector<bool> t = crt::degree_table(alg, a.max);
  io::Table tab;
  tab.columns = {"d", "d_mod_8", "obstruction_possible"};
  std::string summary;
  for (int d = 1; d <= a.max; ++d) {
    tab.rows.push_back(json{{"d", d}, {"d_mod_8", d % 8}, {"obstruction_possible", static_cast<bool>(t[d - 1])}});
    if (t[d - 1] && d <= 8) summary += (summary.empty() ? "" : ", ") + std::to_string(d % 8);
  }
  if (a.out) io::emit_table(tab, a.format ? io::parse_format(*a.format) : io::TableFormat::Csv, *a.out);
  std::cout << "degree table for " << crt::to_string(alg) << ": nonzero for d = " << summary << " (mod 8)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"halmos-lab: almost-commuting structured matrices and CRT-module checks"};
  app.require_subcommand(1);
  int threads_flag = 0;
  app.add_option("--threads", threads_flag, "worker threads (default: HALMOS_LAB_THREADS or 1)")
      ->check(CLI::PositiveNumber);

  GenerateArgs g;
  auto* gen = app.add_subcommand("generate", "generate a matrix tuple");
  gen->add_option("--kind", g.kind, "point | dirac | perturbed")->check(CLI::IsMember({"point", "dirac", "perturbed"}));
  gen->add_option("--base-kind", g.base_kind, "family perturbed by --kind perturbed")
      ->check(CLI::IsMember({"point", "dirac"}));
  gen->add_option("--class", g.cls, "R | C | H")->required();
  gen->add_option("--d", g.d, "number of matrices")->required();
  gen->add_option("--L", g.L, "truncation parameter for dirac families");
  gen->add_option("--points", g.points, "number of sphere points");
  gen->add_option("--max-mult", g.max_mult, "largest point multiplicity");
  gen->add_flag("--rotate", g.rotate, "conjugate point families by a random structure-group element");
  gen->add_option("--eps", g.eps, "perturbation size");
  gen->add_option("--seed", g.seed, "seed");
  gen->add_option("--out", g.out, "output tuple JSON");

  std::string in, method = "auto";
  std::optional<std::string> out, k_out, format;
  double gap = 1e-6;
  auto* dia = app.add_subcommand("diagnose", "commutator, sphere and contraction defects");
  dia->add_option("--in", in, "tuple JSON")->required();
  dia->add_option("--out", out, "report JSON");

  auto* idx = app.add_subcommand("index", "Z/2 determinant or Bott index");
  idx->add_option("--in", in, "tuple JSON")->required();
  idx->add_option("--method", method, "det | bott | auto")->check(CLI::IsMember({"det", "bott", "auto"}));
  idx->add_option("--gap-threshold", gap, "minimum spectral gap for a valid index")->check(CLI::NonNegativeNumber);
  idx->add_option("--out", out, "result JSON");

  int restarts = 4, sweeps = 60;
  double tol = 1e-12;
  std::uint64_t seed = 0;
  auto* apx = app.add_subcommand("approx", "search for a nearby commuting tuple");
  apx->add_option("--in", in, "tuple JSON")->required();
  apx->add_option("--restarts", restarts, "number of restarts");
  apx->add_option("--sweeps", sweeps, "sweeps per restart");
  apx->add_option("--tol", tol, "relative off-diagonal tolerance");
  apx->add_option("--seed", seed, "seed");
  apx->add_option("--out", out, "result JSON");
  apx->add_option("--k-out", k_out, "write the commuting tuple here");

  std::string grid;
  auto* exp = app.add_subcommand("experiment", "run an experiment grid");
  exp->add_option("--grid", grid, "grid config JSON")->required();
  exp->add_option("--out", out, "output table (overrides the config)");
  exp->add_option("--format", format, "csv | json")->check(CLI::IsMember({"csv", "json"}));

  CrtArgs c;
  auto* crt_cmd = app.add_subcommand("crt", "CRT-module relation and degree checks");
  crt_cmd->add_option("--check", c.check, "check a base module: R | C | T | H")->check(CLI::IsMember({"R", "C", "T", "H"}));
  crt_cmd->add_option("--in", c.in, "check a module given as JSON");
  crt_cmd->add_option("--degree-table", c.degree_table, "degree table for R | H")->check(CLI::IsMember({"R", "H"}));
  crt_cmd->add_option("--max", c.max, "largest d in the degree table");
  crt_cmd->add_option("--dump", c.dump, "print a base module as JSON: R | C | T | H")->check(CLI::IsMember({"R", "C", "T", "H"}));
  crt_cmd->add_option("--derive", c.derive, "show the MT groups forced by the third sequence")->check(CLI::IsMember({"R", "C", "T", "H"}));
  crt_cmd->add_option("--out", c.out, "output file");
  crt_cmd->add_option("--format", c.format, "csv | json")->check(CLI::IsMember({"csv", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    const int threads = resolve_threads(threads_flag);
    if (*gen) return cmd_generate(g);
    if (*dia) return cmd_diagnose(in, out);
    if (*idx) return cmd_index(in, method, gap, out);
    if (*apx) return cmd_approx(in, restarts, sweeps, tol, seed, threads, out, k_out);
    if (*exp) return cmd_experiment(grid, out, format, threads);
    if (*crt_cmd) return cmd_crt(c);
  } catch (const ConfigError& e) {
    std::cerr << "halmos-lab " << name << ": " << e.what() << "\n";
    return kExitUsage;
  } catch (const IoError& e) {
    std::cerr << "halmos-lab " << name << ": " << e.what() << "\n";
    return kExitIo;
  } catch (const Error& e) {
    std::cerr << "halmos-lab " << name << ": " << e.what() << "\n";
    return kExitDomain;
  }
  return kExitUsage;
}
