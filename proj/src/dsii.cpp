#include "dbar/dsii.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "dbar/fft.hpp"
#include "dbar/forward.hpp"
#include "dbar/inverse.hpp"

namespace dbar {

namespace {

using std::numbers::pi;

// With S12 ~ (i/pi) F[q](z) and Q12 ~ (-i/pi) int S12 a1, the multiplier
// exp(4 i s z1 z2) propagates q by exp(i s xi1 xi2) in frequency, i.e.
// q_t = -i q_{x1x2}. The DS-II orientation q_t = +i q_{x1x2} therefore runs
// the scattering data with s = -t.
constexpr double kScatteringTimeSign = -1.0;

// Angular frequency of FFT bin m on the periodic box of width 2L; the
// Nyquist bin is dropped so real symbols stay real after inversion.
std::vector<double> frequencies(const GridSpec& g) {
  const int n = g.n();
  const double dk = pi / g.half_width();
  std::vector<double> xi(n);
  for (int m = 0; m < n; ++m)
    xi[m] = m == n / 2 ? 0.0 : dk * (m < n / 2 ? m : m - n);
  return xi;
}

// Applies the Fourier multiplier symbol(xi1, xi2) on the periodic box.
template <class Symbol>
ScalarField apply_multiplier(const ScalarField& f, Symbol&& symbol) {
  const GridSpec& g = f.grid();
  const int n = g.n();
  const std::vector<double> xi = frequencies(g);
  std::vector<cplx> v(f.values().begin(), f.values().end());
  PeriodicFft& fft = periodic_fft(n);
  fft.forward(v);
  const double norm = 1.0 / (static_cast<double>(n) * n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) v[g.index(j, k)] *= norm * symbol(xi[j], xi[k]);
  fft.backward(v);
  return ScalarField(g, std::move(v));
}

void require_small(const ScalarField& q0, const char* who) {
  if (!(lp_norm(q0, 2.0) < 1.0))
    throw std::invalid_argument(std::string(who) + ": requires ||q0||_2 < 1");
}

} // namespace

OffDiagPotential evolve_scattering(const OffDiagPotential& S, double t) {
  const GridSpec& g = S.grid();
  const int n = g.n();
  std::vector<cplx> s12(g.size()), s21(g.size());
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      const std::size_t i = g.index(j, k);
      const cplx phase = std::polar(1.0, 4.0 * t * g.coord(j) * g.coord(k));
      s12[i] = phase * S.q12()[i];
      s21[i] = phase * S.q21()[i];
    }
  return OffDiagPotential(ScalarField(g, std::move(s12)),
                          ScalarField(g, std::move(s21)));
}

OffDiagPotential dsii_scattering(const ScalarField& q0, const DsiiSetup& setup) {
  require_small(q0, "dsii_scattering");
  const OffDiagPotential Q = OffDiagPotential::hermitian_from(q0);
  return scattering_data(Q, setup.zgrid, setup.tol, setup.max_iter).checked();
}

ScalarField dsii_from_scattering(const OffDiagPotential& S0, double t,
                                 const DsiiSetup& setup) {
  const OffDiagPotential St = evolve_scattering(S0, kScatteringTimeSign * t);
  return reconstruct_potential(St, setup.xgrid, setup.tol, setup.max_iter)
      .checked()
      .q12();
}

ScalarField dsii_solve(const ScalarField& q0, double t, const DsiiSetup& setup) {
  if (q0.is_zero()) return ScalarField(setup.xgrid);
  return dsii_from_scattering(dsii_scattering(q0, setup), t, setup);
}

ScalarField linear_dsii(const ScalarField& q0, double t) {
  // q^ -> exp(-i t xi1 xi2) q^ solves q_t = i q_{x1x2}.
  return apply_multiplier(q0, [t](double a, double b) {
    return std::polar(1.0, -t * a * b);
  });
}

double continuity_experiment(const ScalarField& q0a, const ScalarField& q0b,
                             double t, const DsiiSetup& setup) {
  require_small(q0a, "continuity_experiment");
  require_small(q0b, "continuity_experiment");
  const double denom = lp_norm(q0a - q0b, 2.0);
  if (denom == 0.0) return 0.0;
  return lp_norm(dsii_solve(q0a, t, setup) - dsii_solve(q0b, t, setup), 2.0) /
         denom;
}

ScalarField dsii_residual_field(const std::vector<ScalarField>& snapshots,
                                double dt, double coupling) {
  if (snapshots.size() < 3)
    throw std::invalid_argument("dsii_residual: need at least 3 snapshots");
  if (!(dt > 0.0)) throw std::invalid_argument("dsii_residual: dt must be positive");
  const GridSpec& g = snapshots.front().grid();
  for (const ScalarField& s : snapshots)
    if (!(s.grid() == g))
      throw std::invalid_argument("dsii_residual: snapshots on different grids");
  const std::size_t m = snapshots.size() / 2;
  const ScalarField& q = snapshots[m];

  const ScalarField qt = (snapshots[m + 1] - snapshots[m - 1]).scaled(0.5 / dt);
  const ScalarField qxy =
      apply_multiplier(q, [](double a, double b) { return cplx(-a * b, 0.0); });
  std::vector<cplx> mod2(g.size());
  for (std::size_t i = 0; i < mod2.size(); ++i) mod2[i] = std::norm(q[i]);
  // Delta r = (|q|^2)_{x1x2}:  r^ = xi1 xi2 / |xi|^2 (|q|^2)^, zero mean.
  const ScalarField r = apply_multiplier(
      ScalarField(g, std::move(mod2)), [](double a, double b) {
        const double k2 = a * a + b * b;
        return cplx(k2 == 0.0 ? 0.0 : a * b / k2, 0.0);
      });
  std::vector<cplx> res(g.size());
  const cplx I(0.0, 1.0);
  for (std::size_t i = 0; i < res.size(); ++i)
    res[i] = qt[i] - I * qxy[i] + coupling * I * r[i].real() * q[i];
  return ScalarField(g, std::move(res));
}

double dsii_residual(const std::vector<ScalarField>& snapshots, double dt,
                     double coupling) {
  const ScalarField R = dsii_residual_field(snapshots, dt, coupling);
  const double qn = lp_norm(snapshots[snapshots.size() / 2], 2.0);
  return qn == 0.0 ? 0.0 : lp_norm(R, 2.0) / qn;
}

double self_convergence_order(const ScalarField& r_dt, const ScalarField& r_half,
                              const ScalarField& r_quarter) {
  const double a = lp_norm(r_dt - r_half, 2.0);
  const double b = lp_norm(r_half - r_quarter, 2.0);
  return std::log2(a / b);
}

} // namespace dbar
