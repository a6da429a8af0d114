#pragma once

#include "dbar/forward.hpp"
#include "dbar/grid.hpp"

namespace dbar {

/// Tm(x, z) = m(x, conj z) S(z) A(x, -conj z), evaluated pointwise on the
/// z-grid carrying `mz` and `S`, multiplied left to right.
MatrixField apply_T(const MatrixField& mz, const OffDiagPotential& S, cplx x);

/// Solves m(x, .) = 1 + C(T m) in the z-plane for fixed x by the Neumann
/// series sum_j (CT)^j(1), where C is the Cauchy transform in z applied to
/// every entry. Same residual contract as solve_m.
JostSolution solve_m_dbar(const OffDiagPotential& S, cplx x, double tol,
                          int max_iter);

/// Q(x) = (1/pi) J int T m(x, z) dmu(z) on `xgrid`, i.e.
/// Q12 = -(i/pi) int m11(x, conj z) S12(z) a1(x, z) and
/// Q21 =  (i/pi) int m22(x, conj z) S21(z) a2(x, z).
TransformResult reconstruct_potential(const OffDiagPotential& S,
                                      const GridSpec& xgrid, double tol,
                                      int max_iter = 200);

} // namespace dbar
