// Standalone acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "halmos/approx.hpp"
#include "halmos/crt/base.hpp"
#include "halmos/crt/checks.hpp"
#include "halmos/experiment.hpp"
#include "halmos/generate.hpp"
#include "halmos/index.hpp"
#include "halmos/io.hpp"

#ifndef HALMOS_LAB_PATH
#error "HALMOS_LAB_PATH must point at the halmos-lab executable"
#endif
#ifndef HALMOS_ACCEPTANCE_GRID
#error "HALMOS_ACCEPTANCE_GRID must point at the acceptance experiment grid"
#endif

using namespace halmos;
namespace fs = std::filesystem;

namespace {

constexpr SymmetryClass kR = SymmetryClass::RealSymmetric;
constexpr SymmetryClass kC = SymmetryClass::ComplexHermitian;
constexpr SymmetryClass kH = SymmetryClass::QuaternionSelfDual;

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

Outcome relations() {
  Timer t;
  Outcome o;
  std::size_t checks = 0;
  for (crt::Algebra a : {crt::Algebra::R, crt::Algebra::C, crt::Algebra::T, crt::Algebra::H}) {
    crt::RelationReport rep = crt::check_relations(crt::base_module(a));
    checks += rep.checks.size();
    for (const auto& f : rep.failures()) {
      o.pass = false;
      o.detail += crt::to_string(a) + ": \"" + f.relation + "\" n=" + std::to_string(f.degree) + "; ";
    }
  }
  double s = t.seconds();
  if (s >= 5.0) o.pass = false;
  o.detail += std::to_string(checks) + " degreewise checks in " + fmt("%.3f", s) + " s";
  return o;
}

Outcome acyclicity() {
  Timer t;
  Outcome o;
  std::vector<std::pair<std::string, crt::CrtModule>> mods = {{"base(R)", crt::base_real()}};
  for (int d = 0; d < 8; ++d) mods.push_back({"free(" + std::to_string(d) + ")", crt::free_module(d)});
  std::size_t checks = 0;
  for (const auto& [name, M] : mods) {
    crt::ExactnessReport rep = crt::check_acyclicity(M);
    checks += rep.checks.size();
    for (const auto& f : rep.failures()) {
      o.pass = false;
      o.detail += name + " seq" + std::to_string(f.sequence) + " n=" + std::to_string(f.degree) + "; ";
    }
  }
  double s = t.seconds();
  if (s >= 5.0) o.pass = false;
  o.detail += std::to_string(checks) + " positions over " + std::to_string(mods.size()) + " modules in " +
              fmt("%.3f", s) + " s";
  return o;
}

Outcome degree_tables() {
  Outcome o;
  const std::set<int> want_r = {0, 4, 6, 7}, want_h = {0, 2, 3, 4};
  std::vector<bool> tr = crt::degree_table(crt::Algebra::R, 64), th = crt::degree_table(crt::Algebra::H, 64);
  int mismatches = 0;
  for (int d = 1; d <= 64; ++d) {
    mismatches += tr[d - 1] != (want_r.count(d % 8) == 1);
    mismatches += th[d - 1] != (want_h.count(d % 8) == 1);
  }
  o.pass = mismatches == 0 && tr.size() == 64 && th.size() == 64;
  o.detail = "R: d = 0,4,6,7 mod 8; H: d = 0,2,3,4 mod 8; mismatches " + std::to_string(mismatches);
  return o;
}

Outcome structure_identities() {
  Outcome o;
  Rng rng(1001);
  int sharp_fail = 0, embed_fail = 0, det_fail = 0;
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    Index n = 1 + static_cast<Index>(rng.below(6));
    Mat X = random_gaussian(2 * n, rng);
    sharp_fail += sharp_dual(sharp_dual(X)) != X;
    embed_fail += !is_quaternionic(quaternion_embed(random_gaussian(n, rng), random_gaussian(n, rng)));
    Index m = 2 * (1 + static_cast<Index>(rng.below(3)));
    std::vector<Mat> quad;
    for (int r = 0; r < 4; ++r) quad.push_back(random_class_hermitian(m, kH, rng));
    cplx det = symplectic_block_matrix(make_tuple(kH, quad)).determinant();
    double ratio = std::abs(det) == 0.0 ? 0.0 : std::abs(det.imag()) / std::abs(det);
    worst = std::max(worst, ratio);
    det_fail += ratio > 1e-8;
  }
  o.pass = sharp_fail == 0 && embed_fail == 0 && det_fail == 0;
  o.detail = "sharp " + std::to_string(sharp_fail) + ", embed " + std::to_string(embed_fail) + ", det " +
             std::to_string(det_fail) + " failures /1000; worst |Im det|/|det| " + fmt("%.2e", worst);
  return o;
}

Outcome commuting_trivial() {
  Outcome o;
  Rng rng(1002);
  int fails = 0;
  double min_gap = 1e9;
  for (int t = 0; t < 200; ++t) {
    bool quat = t % 2 == 0;
    int d = quat ? 4 : 5;
    SymmetryClass c = quat ? kH : kR;
    MatrixTuple T = point_evaluation_family(random_point_set(d, 2 + static_cast<int>(rng.below(5)), 3, rng), c);
    T = make_tuple(c, conjugate(T, random_structure_unitary(T.n, c, rng)).mats);
    IndexOptions opts;
    opts.throw_on_small_gap = false;
    IndexResult r = compute_index(T, quat ? IndexMethod::Det : IndexMethod::Bott, opts);
    fails += !(r.valid && r.value == 0);
    min_gap = std::min(min_gap, r.gap);
  }
  o.pass = fails == 0;
  o.detail = std::to_string(fails) + " failures over 200 families; smallest gap " + fmt("%.3f", min_gap);
  return o;
}

Outcome nontrivial_fixture() {
  Timer t;
  Outcome o;
  MatrixTuple T2 = dirac_compression_family(4, 2, kH);
  IndexResult r2 = symplectic_determinant_index(T2);
  double delta = commutator_defect(T2);
  MatrixTuple T3 = dirac_compression_family(4, 3, kH);
  IndexResult r3 = symplectic_determinant_index(T3);
  Rng rng(1003);
  int changed = 0;
  IndexOptions soft;
  soft.throw_on_small_gap = false;
  for (int k = 0; k < 100; ++k) {
    IndexResult p = symplectic_determinant_index(perturb(T2, r2.gap / 10.0, rng.next_u64()), soft);
    changed += !(p.valid && p.value == r2.value);
  }
  double s = t.seconds();
  o.pass = r2.value == 1 && r2.gap >= 1e-3 && delta <= 0.5 && r3.value == r2.value && changed == 0 && s < 120.0 &&
           T3.n <= 256;
  o.detail = "L=2: N=" + std::to_string(T2.n) + " value " + std::to_string(r2.value) + " gap " + fmt("%.4f", r2.gap) +
             " delta " + fmt("%.4f", delta) + "; L=3: N=" + std::to_string(T3.n) + " value " +
             std::to_string(r3.value) + "; " + std::to_string(changed) + "/100 perturbations changed; " +
             fmt("%.1f", s) + " s";
  return o;
}

Outcome stability_and_grid() {
  Outcome o;
  MatrixTuple S3 = dirac_compression_family(4, 2, kH);
  MatrixTuple S4 = dirac_compression_family(5, 2, kR);
  IndexResult a = compute_index(S3, IndexMethod::Det), b = compute_index(S4, IndexMethod::Bott);
  bool sa = index_stability(S3, IndexMethod::Det, 100, a.gap / 10.0, 1004);
  bool sb = index_stability(S4, IndexMethod::Bott, 100, b.gap / 10.0, 1005);
  ExperimentConfig cfg = parse_experiment_config(io::read_json(HALMOS_ACCEPTANCE_GRID));
  ExperimentOutcome g = run_experiment(cfg);
  o.pass = sa && sb && g.contradictions == 0 && g.gating_violations == 0 && g.errors == 0;
  o.detail = std::string("stability S3 ") + (sa ? "ok" : "FAILED") + ", S4 " + (sb ? "ok" : "FAILED") + "; grid " +
             std::to_string(g.table.rows.size()) + " rows, " + std::to_string(g.contradictions) + " contradictions, " +
             std::to_string(g.gating_violations) + " gating violations, " + std::to_string(g.errors) + " errors";
  return o;
}

Outcome planar_control() {
  Timer t;
  Outcome o;
  double worst_delta = 0.0, worst_dist = 0.0;
  for (int k = 0; k < 10; ++k) {
    GeneratorSpec s;
    s.kind = GeneratorKind::Perturbed;
    s.base_kind = GeneratorKind::PointEval;
    s.cls = kR;
    s.d = 2;
    s.points = 50;
    s.max_multiplicity = 1;
    s.rotate = true;
    s.eps = 2e-4;
    s.seed = 2000 + static_cast<std::uint64_t>(k);
    MatrixTuple T = generate(s);
    worst_delta = std::max(worst_delta, commutator_defect(T));
    ApproxOptions ao;
    ao.seed = s.seed;
    worst_dist = std::max(worst_dist, nearest_commuting(T, ao).distance);
  }
  double sec = t.seconds();
  o.pass = worst_delta <= 1e-3 && worst_dist <= 0.1 && sec < 60.0;
  o.detail = "N=50, max delta " + fmt("%.2e", worst_delta) + ", max distance " + fmt("%.2e", worst_dist) + ", " +
             fmt("%.1f", sec) + " s";
  return o;
}

struct Separation {
  std::string name;
  double nontrivial = 0, trivial = 0, delta = 0;
  Index n = 0;
};

Separation separate(const std::string& name, const MatrixTuple& T, int sweeps, std::uint64_t seed) {
  Separation s;
  s.name = name;
  s.n = T.n;
  s.delta = commutator_defect(T);
  MatrixTuple P = matched_trivial_family(T.n, T.cls, T.d(), s.delta, seed);
  ApproxOptions ao;
  ao.restarts = 20;
  ao.max_sweeps = sweeps;
  ao.seed = seed;
  s.nontrivial = nearest_commuting(T, ao).distance;
  s.trivial = nearest_commuting(P, ao).distance;
  return s;
}

Outcome obstruction_separation() {
  Timer t;
  Outcome o;
  std::vector<Separation> pairs = {separate("S3 (H, d=4, L=2)", dirac_compression_family(4, 2, kH), 15, 3),
                                   separate("S2 (C, d=3, L=16)", dirac_compression_family(3, 16, kC), 40, 3)};
  for (const auto& p : pairs) {
    double ratio = p.nontrivial / p.trivial;
    o.pass = o.pass && ratio >= 3.0;
    o.detail += p.name + ": N=" + std::to_string(p.n) + " delta " + fmt("%.4f", p.delta) + " distances " +
                fmt("%.4f", p.nontrivial) + " vs " + fmt("%.4f", p.trivial) + " ratio " + fmt("%.2f", ratio) + "; ";
  }
  o.detail += fmt("%.1f", t.seconds()) + " s";
  return o;
}

int run_cli(const fs::path& dir, const std::string& args) {
  std::string cmd = "cd '" + dir.string() + "' && HALMOS_LAB_THREADS=1 '" + HALMOS_LAB_PATH + "' " + args +
                    " > stdout.txt 2>&1";
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Outcome cli_determinism() {
  Outcome o;
  const std::vector<std::string> examples = {
      "generate --kind point --class H --d 4 --points 4 --rotate --seed 7 --out pts.json",
      "generate --kind dirac --class H --d 4 --L 2 --out ti.json",
      "generate --kind perturbed --base-kind dirac --class C --d 3 --L 4 --eps 0.01 --seed 3 --out s2.json",
      "diagnose --in ti.json --out diag.json",
      "index --in ti.json --method det --out idx.json",
      "index --in s2.json --method bott --out idx2.json",
      "approx --in s2.json --restarts 4 --sweeps 30 --seed 1 --out ap.json --k-out k.json",
      "crt --check T --out crt.json",
      "crt --degree-table H --max 64 --out table.csv",
      "crt --dump C --out c.json",
      "crt --derive T",
      "experiment --grid '" + std::string(HALMOS_ACCEPTANCE_GRID) + "' --out grid.csv",
  };
  std::vector<fs::path> runs;
  for (int k = 0; k < 2; ++k) {
    fs::path dir = fs::temp_directory_path() / ("halmos_acceptance_run" + std::to_string(k));
    fs::remove_all(dir);
    fs::create_directories(dir);
    runs.push_back(dir);
  }
  int mismatches = 0, failures = 0, files = 0;
  for (std::size_t e = 0; e < examples.size(); ++e) {
    for (int k = 0; k < 2; ++k) {
      failures += run_cli(runs[k], examples[e]) != 0;
      fs::rename(runs[k] / "stdout.txt", runs[k] / ("stdout" + std::to_string(e) + ".txt"));
    }
  }
  for (const auto& entry : fs::directory_iterator(runs[0])) {
    ++files;
    fs::path other = runs[1] / entry.path().filename();
    if (!fs::exists(other) || slurp(entry.path()) != slurp(other)) {
      ++mismatches;
      o.detail += entry.path().filename().string() + " differs; ";
    }
  }
  o.pass = mismatches == 0 && failures == 0 && files > 0;
  o.detail += std::to_string(examples.size()) + " examples, " + std::to_string(files) + " files compared, " +
              std::to_string(failures) + " nonzero exits";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"CRT relations", relations},
      {"acyclicity", acyclicity},
      {"degree tables", degree_tables},
      {"structure identities", structure_identities},
      {"commuting implies trivial index", commuting_trivial},
      {"nontrivial-index fixture", nontrivial_fixture},
      {"index stability and grid", stability_and_grid},
      {"d=2 positive control", planar_control},
      {"obstruction separation", obstruction_separation},
      {"CLI determinism", cli_determinism},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failed += !o.pass;
    std::printf("criterion %zu: %s  %s (%s)\n", k + 1, o.pass ? "PASS" : "FAIL", criteria[k].first.c_str(),
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
