#include "dbar/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iterator>
#include <numbers>
#include <ostream>
#include <sstream>

#include "dbar/dsii.hpp"
#include "dbar/estimates.hpp"
#include "dbar/field_io.hpp"
#include "dbar/forward.hpp"
#include "dbar/inverse.hpp"
#include "dbar/parallel.hpp"
#include "dbar/potentials.hpp"
#include "dbar/transforms.hpp"

namespace dbar {

namespace {

using std::numbers::pi;
namespace fs = std::filesystem;

std::string fmt(double v, int digits = 4) {
  std::ostringstream os;
  os.precision(digits);
  os << std::scientific << v;
  return os.str();
}

double relative_defect(const OffDiagPotential& S, const OffDiagPotential& Q) {
  const double s = matrix_l2_norm(S), q = matrix_l2_norm(Q);
  return std::abs(s * s - q * q) / (q * q);
}

// Field restricted to the centred n_window x n_window block of its grid,
// carried on `window`.
ScalarField centre_block(const ScalarField& f, const GridSpec& window,
                         bool mirror_first_axis) {
  const GridSpec& g = f.grid();
  const int off = (g.n() - window.n()) / 2;
  std::vector<cplx> v(window.size());
  for (int a = 0; a < window.n(); ++a)
    for (int b = 0; b < window.n(); ++b) {
      const int j = mirror_first_axis ? g.mirror(a + off) : a + off;
      v[window.index(a, b)] = f(j, b + off);
    }
  return ScalarField(window, std::move(v));
}

struct Context {
  const AcceptanceSettings& s;
  fs::path dumps;
};

CriterionResult plancherel(const Context& c) {
  const GridSpec& fine = c.s.grid;
  const GridSpec coarse(fine.half_width(), fine.n() / 2);
  const GridSpec zg = dual_window(fine, 2.0, c.s.dual_window);
  double defect[2];
  int i = 0;
  for (const GridSpec& g : {coarse, fine}) {
    const OffDiagPotential Q =
        make_potential(PotentialKind::gaussian, 1.0, Symmetry::hermitian, 0, g);
    const OffDiagPotential S =
        scattering_data(Q, zg, c.s.tol, c.s.max_iter).checked();
    defect[i++] = relative_defect(S, Q);
    if (g == fine) {
      write_field(c.dumps / "plancherel_S12.dbf", S.q12());
      write_field(c.dumps / "plancherel_S21.dbf", S.q21());
    }
  }
  const bool pass = defect[1] <= 0.05 && defect[1] < defect[0];
  return {1, "Plancherel", pass, false,
          "defect n=" + std::to_string(coarse.n()) + ": " + fmt(defect[0]) +
              ", n=" + std::to_string(fine.n()) + ": " + fmt(defect[1]) +
              " (gate <= 5e-2, strictly decreasing)"};
}

CriterionResult linearization(const Context& c) {
  const GridSpec& g = c.s.grid;
  const GridSpec zg = dual_window(g, 2.0, c.s.dual_window);
  const OffDiagPotential Q =
      make_potential(PotentialKind::gaussian, 1e-2, Symmetry::hermitian, 0, g);
  const OffDiagPotential S = scattering_data(Q, zg, c.s.tol, c.s.max_iter).checked();
  const cplx ipi(0.0, 1.0 / pi);
  // S12 ~ (i/pi) F2 q12 (z),  S21 ~ -(i/pi) F2 q21 (-conj z)
  const ScalarField L12 =
      centre_block(fourier_transform(Q.q12(), 2.0), zg, false).scaled(ipi);
  const ScalarField L21 =
      centre_block(fourier_transform(Q.q21(), 2.0), zg, true).scaled(-ipi);
  const double e12 = lp_norm(S.q12() - L12, 2.0);
  const double e21 = lp_norm(S.q21() - L21, 2.0);
  const double rel = std::hypot(e12, e21) / matrix_l2_norm(S);
  const double rel12 = e12 / lp_norm(S.q12(), 2.0);
  return {2, "Linearization", rel <= 0.02, false,
          "||S - lin(Q)|| / ||S|| = " + fmt(rel) + ", 12 entry alone " +
              fmt(rel12) + " (gate <= 2e-2)"};
}

CriterionResult roundtrip(const Context& c) {
  const GridSpec& g = c.s.grid;
  const GridSpec zg = dual_window(g, 2.0, c.s.dual_window);
  const OffDiagPotential Q =
      make_potential(PotentialKind::gaussian, 0.5, Symmetry::hermitian, 0, g);
  const OffDiagPotential S = scattering_data(Q, zg, c.s.tol, c.s.max_iter).checked();
  const OffDiagPotential back =
      reconstruct_potential(S, g, c.s.tol, c.s.max_iter).checked();
  write_field(c.dumps / "roundtrip_Q12.dbf", back.q12());
  write_field(c.dumps / "roundtrip_Q21.dbf", back.q21());
  const double rel = matrix_l2_norm(back - Q) / matrix_l2_norm(Q);
  return {3, "Roundtrip", rel <= 0.05, false,
          "||Q(S(Q)) - Q|| / ||Q|| = " + fmt(rel) + " (gate <= 5e-2)"};
}

CriterionResult neumann_decay(const Context& c) {
  const OffDiagPotential Q = make_potential(PotentialKind::gaussian, 1.0,
                                            Symmetry::hermitian, 0, c.s.grid);
  double worst = 0.0;
  for (cplx z : {cplx(0.0, 0.0), cplx(0.5, 0.3), cplx(1.5, -1.0), cplx(-2.0, 2.0)}) {
    const std::vector<double> t = neumann_term_norms(Q, z, 5);
    for (int k = 0; k + 1 < 5; ++k) worst = std::max(worst, t[k + 1] / t[k]);
  }
  return {4, "Neumann decay", worst <= 0.55, false,
          "max even-term ratio over k <= 4 and 4 z-values = " + fmt(worst) +
              " (gate <= 0.55)"};
}

CriterionResult exponents(const Context&) {
  const ExponentSequence seq(20);
  const std::vector<std::string> bad = seq.violated_identities();
  const bool s1 = seq.s(1) == Rational(12, 7);
  const bool p1 = seq.p(1) == 6;
  const Rational gap = seq.s(20) - Rational(4, 3);
  const bool limit = gap > 0 && gap < Rational(1, 1000);
  std::string detail = std::to_string(bad.size()) + " identity violations, s_1 = " +
                       seq.s(1).str() + ", p_1 = " + seq.p(1).str() +
                       ", s_20 - 4/3 = " + fmt(to_double(gap));
  if (!bad.empty()) detail += " (first: " + bad.front() + ")";
  return {5, "Exponents", bad.empty() && s1 && p1 && limit, false, detail};
}

CriterionResult hls(const Context& c) {
  const GridSpec g(6.0, 128);
  double worst = 0.0;
  for (int i = 0; i < c.s.ensemble_size; ++i)
    worst = std::max(worst, hls_ratio(random_smooth_field(g, c.s.seed + i), 4.0 / 3.0));
  const GridSpec big(50.0, 256);
  const ScalarField lieb = ScalarField::from_function(
      big, [](cplx x) { return std::pow(1.0 + std::norm(x), -1.5); });
  const double extremal = hls_ratio(lieb, 4.0 / 3.0);
  const bool ensemble_ok = worst <= pi * 1.02;
  const bool extremal_ok = extremal >= 0.95 * pi;
  return {6, "HLS constant", ensemble_ok && extremal_ok, !ensemble_ok && extremal_ok,
          "ensemble max / pi = " + fmt(worst / pi) + " (gate <= 1.02), extremizer / pi = " +
              fmt(extremal / pi) + " (gate >= 0.95); sharp constant / pi = " +
              fmt(sharp_hls_constant() / pi)};
}

CriterionResult reduction_chain(const Context& c) {
  const GridSpec g(1.5, 6);
  double worst = 0.0;
  bool ok = true;
  for (int i = 0; i < 20; ++i) {
    const std::uint64_t seed = c.s.seed + static_cast<std::uint64_t>(i);
    const ScalarField t = random_nonnegative_field(g, seed, 0);
    const ScalarField q0 = random_nonnegative_field(g, seed, 1);
    const ScalarField q1 = random_nonnegative_field(g, seed, 2);
    const ScalarField q2 = random_nonnegative_field(g, seed, 3);
    const double I1 = brute_force_Ik(t, {q0, q1, q2}, 1);
    const InductiveStep step = inductive_step(t, q0, q1, 0);
    const double I0 = brute_force_Ik(step.t1, {q2 * step.q2_tilde}, 0);
    ok = ok && I1 <= I0 * (1.0 + 1e-9);
    worst = std::max(worst, I1 / I0);
  }
  return {7, "Reduction chain", ok, false,
          "max I1 / I0(t1, q2 q2~) over 20 inputs = " + fmt(worst) +
              " (gate <= 1 + 1e-9)"};
}

CriterionResult evolution(const Context& c) {
  const GridSpec zg = dual_window(c.s.grid, 2.0, c.s.dual_window);
  const OffDiagPotential S =
      make_potential(PotentialKind::random_smooth, 1.0, Symmetry::none, c.s.seed, zg);
  const double n0 = matrix_l2_norm(S);
  double iso = 0.0, group = 0.0;
  for (double t : {0.1, 1.0, 10.0})
    iso = std::max(iso, std::abs(matrix_l2_norm(evolve_scattering(S, t)) - n0) / n0);
  for (auto [t1, t2] : {std::pair{0.3, 0.7}, {1.0, -0.25}, {2.5, 4.0}}) {
    const OffDiagPotential a = evolve_scattering(evolve_scattering(S, t1), t2);
    const OffDiagPotential b = evolve_scattering(S, t1 + t2);
    group = std::max(group, matrix_l2_norm(a - b) / n0);
  }
  return {8, "Evolution isometry", iso <= 1e-12 && group <= 1e-12, false,
          "norm drift " + fmt(iso) + ", group-law defect " + fmt(group) +
              " (gates <= 1e-12)"};
}

CriterionResult continuity(const Context& c) {
  const DsiiSetup su{c.s.dsii_grid, dual_window(c.s.dsii_grid, 2.0, c.s.dual_window),
                     c.s.tol, c.s.max_iter};
  const GridSpec& g = su.xgrid;
  double large_max = 0.0, small_dev = 0.0;
  for (int i = 0; i < 5; ++i) {
    const std::uint64_t seed = c.s.seed + static_cast<std::uint64_t>(i);
    const ScalarField f = random_smooth_field(g, seed, 0);
    const ScalarField d = random_smooth_field(g, seed, 1);
    for (double amp : {0.45, 4.5e-3}) {
      const ScalarField qa = f.scaled(amp);
      const ScalarField qb = qa + d.scaled(amp / 9.0);
      const OffDiagPotential Sa = dsii_scattering(qa, su);
      const OffDiagPotential Sb = dsii_scattering(qb, su);
      const double d0 = lp_norm(qa - qb, 2.0);
      for (double t : {0.1, 1.0}) {
        const double r = lp_norm(dsii_from_scattering(Sa, t, su) -
                                     dsii_from_scattering(Sb, t, su),
                                 2.0) /
                         d0;
        if (amp > 0.1)
          large_max = std::max(large_max, r);
        else
          small_dev = std::max(small_dev, std::abs(r - 1.0));
      }
    }
  }
  return {9, "DS-II continuity", large_max <= 2.0 && small_dev <= 0.1, false,
          "max ratio (||q|| <= 0.5) = " + fmt(large_max) +
              " (gate <= 2), max |ratio - 1| (||q|| <= 1e-2) = " + fmt(small_dev) +
              " (gate <= 0.1)"};
}

CriterionResult dsii_consistency(const Context& c) {
  const DsiiSetup su{c.s.dsii_grid, dual_window(c.s.dsii_grid, 2.0, c.s.dual_window),
                     c.s.tol, c.s.max_iter};
  const ScalarField gauss = ScalarField::from_function(
      su.xgrid, [](cplx x) { return std::exp(-std::norm(x)); });
  const ScalarField q0 = gauss.scaled(1e-3 / lp_norm(gauss, 2.0));
  const ScalarField q = dsii_solve(q0, 0.1, su);
  const ScalarField lin = linear_dsii(q0, 0.1);
  const double rel = lp_norm(q - lin, 2.0) / lp_norm(lin, 2.0);

  const ScalarField q1 = gauss.scaled(1e-2 / lp_norm(gauss, 2.0));
  const OffDiagPotential S = dsii_scattering(q1, su);
  const double t0 = 0.1;
  const ScalarField mid = dsii_from_scattering(S, t0, su);
  std::vector<ScalarField> res;
  double last = 0.0;
  for (double dt : {4e-3, 2e-3, 1e-3}) {
    const std::vector<ScalarField> snaps{dsii_from_scattering(S, t0 - dt, su), mid,
                                         dsii_from_scattering(S, t0 + dt, su)};
    res.push_back(dsii_residual_field(snaps, dt));
    last = dsii_residual(snaps, dt);
  }
  const double order = self_convergence_order(res[0], res[1], res[2]);
  return {10, "DS-II small amplitude", rel <= 0.05 && std::abs(order - 2.0) <= 0.2,
          false,
          "vs linear oracle at t=0.1: " + fmt(rel) + " (gate <= 5e-2); residual order " +
              fmt(order) + " (gate 2 +- 0.2); residual at dt=1e-3: " + fmt(last)};
}

bool same_bytes(const fs::path& a, const fs::path& b) {
  std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
  if (!fa || !fb) return false;
  return std::equal(std::istreambuf_iterator<char>(fa), std::istreambuf_iterator<char>(),
                    std::istreambuf_iterator<char>(fb), std::istreambuf_iterator<char>());
}

CriterionResult determinism(const Context& c) {
  const GridSpec g(6.0, 32);
  const GridSpec zg = dual_window(g, 2.0, 16);
  const OffDiagPotential Q =
      make_potential(PotentialKind::random_smooth, 0.5, Symmetry::hermitian, c.s.seed, g);
  const int saved = worker_count();
  const std::vector<std::pair<std::string, int>> runs = {
      {"workers1", 1}, {"workers3", 3}, {"workers1_again", 1}};
  std::vector<fs::path> dirs;
  try {
    for (const auto& [name, workers] : runs) {
      set_worker_count(workers);
      const fs::path dir = c.dumps / "determinism" / name;
      fs::create_directories(dir);
      const OffDiagPotential S = scattering_data(Q, zg, c.s.tol, c.s.max_iter).checked();
      const OffDiagPotential back =
          reconstruct_potential(S, g, c.s.tol, c.s.max_iter).checked();
      write_field(dir / "S12.dbf", S.q12());
      write_field(dir / "S21.dbf", S.q21());
      write_field(dir / "Q12.dbf", back.q12());
      write_field(dir / "Q21.dbf", back.q21());
      dirs.push_back(dir);
    }
  } catch (...) {
    set_worker_count(saved);
    throw;
  }
  set_worker_count(saved);
  bool same = true;
  for (const char* f : {"S12.dbf", "S21.dbf", "Q12.dbf", "Q21.dbf"})
    for (std::size_t i = 1; i < dirs.size(); ++i)
      same = same && same_bytes(dirs[0] / f, dirs[i] / f);
  return {11, "Determinism", same, false,
          same ? "forward + inverse dumps byte-identical across 1, 3, 1 workers"
               : "dumps differ between runs"};
}

} // namespace

AcceptanceSettings acceptance_settings(const Config& config) {
  AcceptanceSettings s;
  s.grid = config.grid;
  s.dsii_grid = GridSpec(config.grid.half_width(), std::max(2, config.grid.n() / 2));
  s.tol = config.solver.tol;
  s.max_iter = config.solver.max_iter;
  s.ensemble_size = config.estimates.ensemble_size;
  s.seed = config.estimates.seed;
  return s;
}

std::vector<CriterionResult> run_acceptance(const AcceptanceSettings& settings,
                                            std::ostream& out) {
  using Criterion = std::function<CriterionResult(const Context&)>;
  const std::vector<std::pair<int, Criterion>> all = {
      {1, plancherel},  {2, linearization}, {3, roundtrip},     {4, neumann_decay},
      {5, exponents},   {6, hls},           {7, reduction_chain},        {8, evolution},
      {9, continuity},  {10, dsii_consistency}, {11, determinism}};

  fs::path dumps;
  bool temporary = false;
  if (settings.dump_dir) {
    dumps = *settings.dump_dir;
  } else {
    dumps = fs::temp_directory_path() /
            ("dbar-acceptance-" +
             std::to_string(std::chrono::steady_clock::now().time_since_epoch().count()));
    temporary = true;
  }
  fs::create_directories(dumps);
  const Context ctx{settings, dumps};

  std::vector<CriterionResult> results;
  for (const auto& [id, run] : all) {
    if (!settings.only.empty() &&
        std::find(settings.only.begin(), settings.only.end(), id) == settings.only.end())
      continue;
    const auto t0 = std::chrono::steady_clock::now();
    CriterionResult r;
    try {
      r = run(ctx);
    } catch (const std::exception& e) {
      r = {id, "criterion " + std::to_string(id), false, false,
           std::string("error: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out << (r.pass ? "[PASS] " : "[FAIL] ") << r.id << ". " << r.name << ": "
        << r.detail << " [" << std::llround(secs) << " s]"
        << (r.known_unattainable ? " -- gate below the proven sharp bound" : "")
        << std::endl;
    results.push_back(std::move(r));
  }
  if (temporary) {
    std::error_code ec;
    fs::remove_all(dumps, ec);
  }
  return results;
}

bool all_passed(const std::vector<CriterionResult>& results) {
  return std::all_of(results.begin(), results.end(),
                     [](const CriterionResult& r) { return r.pass; });
}

bool no_unexpected_failures(const std::vector<CriterionResult>& results) {
  return std::all_of(results.begin(), results.end(), [](const CriterionResult& r) {
    return r.pass || r.known_unattainable;
  });
}

} // namespace dbar
