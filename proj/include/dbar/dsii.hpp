#pragma once

#include <vector>

#include "dbar/grid.hpp"

namespace dbar {

/// Pointwise S(z) -> exp(4 i t z1 z2) S(z) on both entries.
OffDiagPotential evolve_scattering(const OffDiagPotential& S, double t);

/// Grids and solver settings shared by the scattering-based DS-II paths.
struct DsiiSetup {
  GridSpec xgrid;
  GridSpec zgrid;
  double tol = 1e-8;
  int max_iter = 200;
};

/// Scattering data of the hermitian potential [[0, q0], [conj q0, 0]].
/// Requires ||q0||_2 < 1; throws NonConvergence if any z fails.
OffDiagPotential dsii_scattering(const ScalarField& q0, const DsiiSetup& setup);

/// q(., t) of q_t = i q_{x1 x2} - 4 i r q, r_{x1x1} + r_{x2x2} = (|q|^2)_{x1x2},
/// from precomputed initial scattering data: evolve, reconstruct, take the
/// 12 entry. Throws NonConvergence if any x fails.
ScalarField dsii_from_scattering(const OffDiagPotential& S0, double t,
                                 const DsiiSetup& setup);

/// dsii_from_scattering(dsii_scattering(q0), t).
ScalarField dsii_solve(const ScalarField& q0, double t, const DsiiSetup& setup);

/// Spectral solution of the linear part q_t = i q_{x1 x2} on the periodic
/// box of q0's grid.
ScalarField linear_dsii(const ScalarField& q0, double t);

/// ||q_a(t) - q_b(t)||_2 / ||q_a(0) - q_b(0)||_2; 0 when the initial data
/// coincide.
double continuity_experiment(const ScalarField& q0a, const ScalarField& q0b,
                             double t, const DsiiSetup& setup);

/// Pointwise DS-II residual q_t - i q_{x1x2} + coupling i r q at the middle
/// snapshot: central time difference, spectral space derivatives, and the
/// zero-mean spectral solution for r. Requires >= 3 snapshots on one grid.
/// The stated system has coupling 4; the scattering solution built here
/// satisfies it with coupling 8 (see the DS-II convention test).
ScalarField dsii_residual_field(const std::vector<ScalarField>& snapshots,
                                double dt, double coupling = 4.0);

/// ||dsii_residual_field||_2 / ||q||_2 at the middle snapshot (0 if q = 0).
double dsii_residual(const std::vector<ScalarField>& snapshots, double dt,
                     double coupling = 4.0);

/// log2(||R_dt - R_{dt/2}||_2 / ||R_{dt/2} - R_{dt/4}||_2) for residual
/// fields at step sizes dt, dt/2, dt/4.
double self_convergence_order(const ScalarField& r_dt, const ScalarField& r_half,
                              const ScalarField& r_quarter);

} // namespace dbar
