#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "dbar/grid.hpp"

namespace dbar {

/// Convergence record of a Neumann-series solve.
struct SolveReport {
  int iterations = 0;
  /// ||last increment||_4 / ||m - 1||_4, entrywise L4.
  double final_residual = 0.0;
  bool converged = false;
  /// Entrywise L4 norm of each successive increment.
  std::vector<double> term_norms;
};

/// Raised when a Neumann iteration hits max_iter (or overflows). Carries the
/// indices of the failed evaluation points when thrown for a whole grid.
class NonConvergence : public std::runtime_error {
public:
  NonConvergence(const std::string& what, std::vector<std::size_t> failed = {})
      : std::runtime_error(what), failed_(std::move(failed)) {}
  const std::vector<std::size_t>& failed() const { return failed_; }

private:
  std::vector<std::size_t> failed_;
};

struct JostSolution {
  MatrixField m;
  SolveReport report;
};

/// Solves m = 1 + G_z(Q m) by the Neumann iteration m^{k+1} = 1 + G_z(Q m^k),
/// accumulated increment by increment: the k-th increment is (G_z Q)^k (1),
/// diagonal for even k and off-diagonal for odd k. Stops once the relative
/// increment is <= tol. Non-convergence is reported, not thrown; see
/// require_converged.
JostSolution solve_m(const OffDiagPotential& Q, cplx z, double tol,
                     int max_iter);

void require_converged(const SolveReport& report);

/// ||(G_z Q)^{2k}(1)^{11}||_4 for k = 1..kmax.
std::vector<double> neumann_term_norms(const OffDiagPotential& Q, cplx z,
                                       int kmax);

/// Output of a whole-grid map (forward or inverse) with per-point records.
struct TransformResult {
  OffDiagPotential field;
  std::vector<int> iterations;
  std::vector<double> residuals;
  std::vector<std::size_t> failed;

  bool ok() const { return failed.empty(); }
  /// Throws NonConvergence listing the failed point indices, if any.
  const OffDiagPotential& checked() const;
};

/// S(z) = -(1/pi) J int E_z(Q(x) m(x, z)) dmu(x) for every z of `zgrid`,
/// i.e. S12 = (i/pi) int q12 m22 conj(a1) and S21 = -(i/pi) int q21 m11 conj(a2).
/// The per-z solves run as a parallel map.
TransformResult scattering_data(const OffDiagPotential& Q,
                                 const GridSpec& zgrid, double tol,
                                 int max_iter = 200);

/// ||S(Qa) - S(Qb)||_2 / ||Qa - Qb||_2, zero when Qa == Qb.
double lipschitz_probe(const OffDiagPotential& Qa, const OffDiagPotential& Qb,
                       const GridSpec& zgrid, double tol, int max_iter = 200);

} // namespace dbar
