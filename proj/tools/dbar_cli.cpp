#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <string>

#include "CLI11.hpp"

#include "dbar/acceptance.hpp"
#include "dbar/config.hpp"
#include "dbar/dsii.hpp"
#include "dbar/estimates.hpp"
#include "dbar/field_io.hpp"
#include "dbar/forward.hpp"
#include "dbar/inverse.hpp"
#include "dbar/parallel.hpp"
#include "dbar/potentials.hpp"

namespace fs = std::filesystem;
using namespace dbar;

namespace {

constexpr int kExitGateFailed = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNonConvergence = 3;
constexpr int kExitIo = 4;

struct Options {
  std::string config_path;
  std::string out_dir = "runs";
  int workers = 0;
  std::string s12, s21;
};

struct Run {
  Config config;
  fs::path dir;
};

Run prepare(const Options& o) {
  Run run{o.config_path.empty() ? Config{} : load_config(o.config_path), {}};
  if (!o.s12.empty()) run.config.s12_path = o.s12;
  if (!o.s21.empty()) run.config.s21_path = o.s21;
  run.dir = fs::path(o.out_dir) / run.config.hash();
  fs::create_directories(run.dir);
  std::ofstream os(run.dir / "config.json");
  os << run.config.to_json().dump(2) << "\n";
  if (!os) throw IoError("cannot write " + (run.dir / "config.json").string());
  return run;
}

void add_grids(Diagnostics& d, const Config& c) {
  const GridSpec z = c.z_grid();
  d.emplace_back("grid.L", format_double(c.grid.half_width()));
  d.emplace_back("grid.n", std::to_string(c.grid.n()));
  d.emplace_back("zgrid.L", format_double(z.half_width()));
  d.emplace_back("zgrid.n", std::to_string(z.n()));
  d.emplace_back("solver.tol", format_double(c.solver.tol));
  d.emplace_back("solver.max_iter", std::to_string(c.solver.max_iter));
}

void add_solves(Diagnostics& d, const TransformResult& r, const GridSpec& g,
                const char* var) {
  int max_it = 0;
  for (int it : r.iterations) max_it = std::max(max_it, it);
  d.emplace_back("failed", std::to_string(r.failed.size()));
  d.emplace_back("max_iterations", std::to_string(max_it));
  for (int j = 0; j < g.n(); ++j)
    for (int k = 0; k < g.n(); ++k) {
      const std::size_t i = g.index(j, k);
      const std::string key = std::string(var) + "[" + std::to_string(j) + "," +
                              std::to_string(k) + "]";
      d.emplace_back(key + ".iterations", std::to_string(r.iterations[i]));
      d.emplace_back(key + ".residual", format_double(r.residuals[i]));
    }
}

OffDiagPotential potential_of(const Config& c) {
  return make_potential(c.potential.kind, c.potential.amplitude,
                        c.potential.symmetry, c.potential.seed, c.grid);
}

void write_pair(const fs::path& dir, const char* stem, const OffDiagPotential& F) {
  write_field(dir / (std::string(stem) + "12.dbf"), F.q12());
  write_field(dir / (std::string(stem) + "21.dbf"), F.q21());
}

int cmd_forward(const Options& o) {
  const Run run = prepare(o);
  const Config& c = run.config;
  const OffDiagPotential Q = potential_of(c);
  const TransformResult r = scattering_data(Q, c.z_grid(), c.solver.tol, c.solver.max_iter);
  write_pair(run.dir, "Q", Q);
  write_pair(run.dir, "S", r.field);
  Diagnostics d;
  add_grids(d, c);
  const double nq = matrix_l2_norm(Q), ns = matrix_l2_norm(r.field);
  d.emplace_back("norm_Q", format_double(nq));
  d.emplace_back("norm_S", format_double(ns));
  d.emplace_back("plancherel_defect",
                 format_double(nq == 0.0 ? 0.0 : std::abs(ns * ns - nq * nq) / (nq * nq)));
  add_solves(d, r, c.z_grid(), "z");
  write_csv(run.dir / "forward.csv", d);
  std::cout << "forward: ||Q|| = " << nq << ", ||S|| = " << ns << ", "
            << r.failed.size() << " failed z; output in " << run.dir << "\n";
  r.checked();
  return 0;
}

int cmd_inverse(const Options& o) {
  const Run run = prepare(o);
  const Config& c = run.config;
  if (!c.s12_path || !c.s21_path)
    throw ConfigError("inverse: scattering data paths missing (--s12/--s21 or input.s12/s21)");
  const OffDiagPotential S(read_field(*c.s12_path), read_field(*c.s21_path));
  const TransformResult r =
      reconstruct_potential(S, c.grid, c.solver.tol, c.solver.max_iter);
  write_pair(run.dir, "Q", r.field);
  Diagnostics d;
  add_grids(d, c);
  d.emplace_back("zgrid_of_input.L", format_double(S.grid().half_width()));
  d.emplace_back("zgrid_of_input.n", std::to_string(S.grid().n()));
  d.emplace_back("norm_S", format_double(matrix_l2_norm(S)));
  d.emplace_back("norm_Q", format_double(matrix_l2_norm(r.field)));
  add_solves(d, r, c.grid, "x");
  write_csv(run.dir / "inverse.csv", d);
  std::cout << "inverse: ||Q|| = " << matrix_l2_norm(r.field) << ", "
            << r.failed.size() << " failed x; output in " << run.dir << "\n";
  r.checked();
  return 0;
}

int cmd_roundtrip(const Options& o) {
  const Run run = prepare(o);
  const Config& c = run.config;
  const OffDiagPotential Q = potential_of(c);
  const OffDiagPotential S =
      scattering_data(Q, c.z_grid(), c.solver.tol, c.solver.max_iter).checked();
  const OffDiagPotential back =
      reconstruct_potential(S, c.grid, c.solver.tol, c.solver.max_iter).checked();
  write_pair(run.dir, "Q", Q);
  write_pair(run.dir, "S", S);
  write_pair(run.dir, "Qrec", back);
  const double nq = matrix_l2_norm(Q);
  const double defect = nq == 0.0 ? matrix_l2_norm(back) : matrix_l2_norm(back - Q) / nq;
  Diagnostics d;
  add_grids(d, c);
  d.emplace_back("norm_Q", format_double(nq));
  d.emplace_back("norm_S", format_double(matrix_l2_norm(S)));
  d.emplace_back("roundtrip_defect", format_double(defect));
  write_csv(run.dir / "roundtrip.csv", d);
  std::cout << "roundtrip: relative defect " << defect << "; output in " << run.dir << "\n";
  return 0;
}

int cmd_evolve(const Options& o) {
  const Run run = prepare(o);
  const Config& c = run.config;
  const DsiiSetup su{c.grid, c.z_grid(), c.solver.tol, c.solver.max_iter};
  const ScalarField q0 = potential_of(c).q12();
  // Perturbed partner for the continuity ratio: 1% of ||q0|| in a seeded
  // random direction.
  const double nq0 = lp_norm(q0, 2.0);
  const ScalarField qb =
      q0 + random_smooth_field(c.grid, c.potential.seed, 7).scaled(nq0 == 0.0 ? 1e-3 : 1e-2 * nq0);
  const OffDiagPotential Sa = dsii_scattering(q0, su);
  const OffDiagPotential Sb = dsii_scattering(qb, su);
  const double d0 = lp_norm(q0 - qb, 2.0);
  Diagnostics d;
  add_grids(d, c);
  d.emplace_back("norm_q0", format_double(nq0));
  for (std::size_t i = 0; i < c.times.size(); ++i) {
    const double t = c.times[i];
    const ScalarField qa_t = dsii_from_scattering(Sa, t, su);
    const ScalarField qb_t = dsii_from_scattering(Sb, t, su);
    write_field(run.dir / ("q_t" + std::to_string(i) + ".dbf"), qa_t);
    const std::string key = "t[" + std::to_string(i) + "]";
    d.emplace_back(key, format_double(t));
    d.emplace_back(key + ".norm_q", format_double(lp_norm(qa_t, 2.0)));
    d.emplace_back(key + ".continuity_ratio",
                   format_double(lp_norm(qa_t - qb_t, 2.0) / d0));
  }
  write_csv(run.dir / "evolve.csv", d);
  std::cout << "evolve: " << c.times.size() << " snapshots; output in " << run.dir << "\n";
  return 0;
}

int cmd_estimates(const Options& o) {
  using std::numbers::pi;
  const Run run = prepare(o);
  const Config& c = run.config;
  Diagnostics d;
  auto verdict = [&](const std::string& key, bool ok) {
    d.emplace_back(key + ".pass", ok ? "true" : "false");
  };

  const ExponentSequence seq(c.estimates.jmax);
  const auto bad = seq.violated_identities();
  d.emplace_back("exponents.jmax", std::to_string(c.estimates.jmax));
  d.emplace_back("exponents.violations", std::to_string(bad.size()));
  verdict("exponents.identities", bad.empty());
  d.emplace_back("exponents.s1", seq.s(1).str());
  verdict("exponents.s1_is_12/7", seq.s(1) == Rational(12, 7));
  for (int j = 0; j <= c.estimates.jmax; ++j)
    d.emplace_back("exponents.s[" + std::to_string(j) + "]", format_double(to_double(seq.s(j))));

  const GridSpec g(6.0, 128);
  double worst = 0.0;
  for (int i = 0; i < c.estimates.ensemble_size; ++i) {
    const double r = hls_ratio(random_smooth_field(g, c.estimates.seed + i), 4.0 / 3.0);
    worst = std::max(worst, r);
  }
  d.emplace_back("hls.grid.L", "6");
  d.emplace_back("hls.grid.n", "128");
  d.emplace_back("hls.ensemble_max_ratio", format_double(worst));
  d.emplace_back("hls.sharp_constant", format_double(sharp_hls_constant()));
  verdict("hls.ensemble_below_1.02pi", worst <= 1.02 * pi);
  verdict("hls.ensemble_below_sharp", worst <= sharp_hls_constant());
  const GridSpec big(50.0, 256);
  const double lieb = hls_ratio(
      ScalarField::from_function(big, [](cplx x) { return std::pow(1.0 + std::norm(x), -1.5); }),
      4.0 / 3.0);
  d.emplace_back("hls.extremizer.grid.L", "50");
  d.emplace_back("hls.extremizer.grid.n", "256");
  d.emplace_back("hls.extremizer_ratio", format_double(lieb));
  verdict("hls.extremizer_above_0.95pi", lieb >= 0.95 * pi);

  const GridSpec small(1.5, 6);
  double chain = 0.0, kmax = 0.0;
  for (int i = 0; i < 20; ++i) {
    const std::uint64_t s = c.estimates.seed + static_cast<std::uint64_t>(i);
    const ScalarField t = random_nonnegative_field(small, s, 0);
    const ScalarField q0 = random_nonnegative_field(small, s, 1);
    const ScalarField q1 = random_nonnegative_field(small, s, 2);
    const ScalarField q2 = random_nonnegative_field(small, s, 3);
    const InductiveStep step = inductive_step(t, q0, q1, 0);
    chain = std::max(chain, brute_force_Ik(t, {q0, q1, q2}, 1) /
                                brute_force_Ik(step.t1, {q2 * step.q2_tilde}, 0));
    kmax = std::max(kmax, multilinear_constant(t, q0, q1, q2));
  }
  d.emplace_back("chain.grid.L", "1.5");
  d.emplace_back("chain.grid.n", "6");
  d.emplace_back("chain.max_I1_over_I0", format_double(chain));
  verdict("chain.I1_below_I0", chain <= 1.0 + 1e-9);
  d.emplace_back("multilinear.empirical_K", format_double(kmax));

  for (int j = 0; j < 3; ++j) {
    const ScalarField t = random_nonnegative_field(g, c.estimates.seed, 10 + j);
    const ScalarField q0 = random_nonnegative_field(g, c.estimates.seed, 20 + j);
    const ScalarField q1 = random_nonnegative_field(g, c.estimates.seed, 30 + j);
    for (auto [label, C] : {std::pair{"pi", pi}, {"sharp", sharp_hls_constant()}}) {
      const StepContracts sc = step_contracts(t, q0, q1, j, C);
      const std::string key = "contract[j=" + std::to_string(j) + "," + label + "]";
      d.emplace_back(key + ".t1_ratio", format_double(sc.t1_norm / sc.t1_bound));
      d.emplace_back(key + ".q2_ratio", format_double(sc.q2_norm / sc.q2_bound));
      verdict(key, sc.t1_norm <= 1.05 * sc.t1_bound && sc.q2_norm <= 1.05 * sc.q2_bound);
    }
  }
  write_csv(run.dir / "estimates.csv", d);
  std::cout << "estimates: " << d.size() << " rows; output in " << run.dir << "\n";
  return 0;
}

int cmd_verify(const Options& o) {
  const Run run = prepare(o);
  AcceptanceSettings s = acceptance_settings(run.config);
  s.dump_dir = run.dir / "verify";
  const auto results = run_acceptance(s, std::cout);
  Diagnostics d;
  add_grids(d, run.config);
  for (const CriterionResult& r : results) {
    const std::string key = "criterion[" + std::to_string(r.id) + "]";
    d.emplace_back(key + ".name", r.name);
    d.emplace_back(key + ".pass", r.pass ? "true" : "false");
    d.emplace_back(key + ".detail", "\"" + r.detail + "\"");
  }
  write_csv(run.dir / "verify.csv", d);
  std::size_t passed = 0;
  for (const auto& r : results) passed += r.pass;
  std::cout << passed << "/" << results.size() << " criteria passed; output in "
            << run.dir << "\n";
  return all_passed(results) ? 0 : kExitGateFailed;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"D-bar scattering transform: forward and inverse maps, estimates, "
               "Davey-Stewartson II evolution"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--config", o.config_path, "JSON configuration (defaults if omitted)");
  app.add_option("--out-dir", o.out_dir, "parent of the per-config run directory")
      ->capture_default_str();
  app.add_option("--workers", o.workers, "worker threads (default: DBAR_WORKERS or all cores)")
      ->check(CLI::PositiveNumber);

  int (*handler)(const Options&) = nullptr;
  auto add = [&](const char* name, const char* help, int (*fn)(const Options&)) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->fallthrough();
    sub->callback([&handler, fn] { handler = fn; });
    return sub;
  };
  add("forward", "scattering data S of the configured potential", cmd_forward);
  CLI::App* inv = add("inverse", "reconstruct Q from S dumps", cmd_inverse);
  inv->add_option("--s12", o.s12, "S12 field dump");
  inv->add_option("--s21", o.s21, "S21 field dump");
  add("roundtrip", "Q -> S -> Q and its defect", cmd_roundtrip);
  add("evolve", "DS-II evolution of the configured q0 = Q12", cmd_evolve);
  add("estimates", "exponent, HLS and multilinear estimate checks", cmd_estimates);
  add("verify", "run every acceptance criterion", cmd_verify);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }
  if (o.workers > 0) set_worker_count(o.workers);

  try {
    return handler(o);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NonConvergence& e) {
    std::cerr << "non-convergence: " << e.what() << "\n";
    return kExitNonConvergence;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitConfig;
  }
}
