#pragma once

#include <memory>
#include <span>
#include <vector>

#include "dbar/grid.hpp"

namespace dbar {

enum class KernelKind {
  cauchy, ///< 1 / (pi x), self-cell weight 0
  riesz,  ///< 1 / |x|, self-cell weight = exact cell integral
};

/// Quadrature weights of a convolution kernel on the doubled lattice, with
/// the weight of the cell containing the singularity, and their spectrum.
/// Built once per (grid, kind) and shared read-only.
class KernelTable {
public:
  KernelTable(const GridSpec& grid, KernelKind kind);

  const GridSpec& grid() const { return grid_; }
  KernelKind kind() const { return kind_; }
  /// h^2 * kernel(h (a + i b)) for (a, b) != (0, 0).
  cplx weight(int a, int b) const;
  /// Integral of the kernel over the h x h cell centred at the origin.
  double self_weight() const { return self_weight_; }
  std::span<const cplx> spectrum() const { return spectrum_; }

  /// out = sum_y weight(x - y) in(y), for raw row-major buffers on grid().
  void convolve(std::span<const cplx> in, std::span<cplx> out) const;

private:
  GridSpec grid_;
  KernelKind kind_;
  double self_weight_;
  std::vector<cplx> spectrum_;
};

/// Cached table for (grid, kind); thread-safe.
std::shared_ptr<const KernelTable> kernel_table(const GridSpec& grid,
                                                KernelKind kind);

/// Integral of 1/|x| over the unit cell [-1/2, 1/2]^2 by adaptive
/// quadrature in the polar angle (the radial integral is exact).
double riesz_unit_cell_integral(double tol = 1e-13);

/// (1/pi) h^2 sum_{y != x} f(y) / (x - y).
ScalarField cauchy_transform(const ScalarField& f);
/// conj(cauchy_transform(conj(f))): kernel 1 / (pi conj(x - y)).
ScalarField anti_cauchy_transform(const ScalarField& f);
/// h^2 sum_y f(y) / |x - y| with the exact self-cell weight at y = x.
ScalarField riesz_potential(const ScalarField& f);

/// Phase matrix A(x, z) = diag(a1, a2) with
/// a1 = exp(i x conj(z) + i conj(x) z) = exp(2i (x1 z1 + x2 z2)),
/// a2 = exp(-i x z - i conj(x z))     = exp(-2i (x1 z1 - x2 z2)).
struct PhaseField {
  ScalarField a1;
  ScalarField a2;
  cplx z;
};

PhaseField phase_field(const GridSpec& grid, cplx z);

inline cplx phase_a1(cplx x, cplx z) {
  return std::polar(1.0, 2.0 * (x.real() * z.real() + x.imag() * z.imag()));
}
inline cplx phase_a2(cplx x, cplx z) {
  return std::polar(1.0, -2.0 * (x.real() * z.real() - x.imag() * z.imag()));
}

enum class Direction { forward, inverse };

/// E_z F = diag(F) + A_z^{-1} off(F) (forward); inverse multiplies the
/// off-diagonal by A_z instead.
MatrixField apply_Ez(const MatrixField& F, cplx z, Direction direction);

/// G F: Cauchy transform on the first row, anti-Cauchy on the second.
MatrixField apply_G(const MatrixField& F);

/// G_z = E_z^{-1} G E_z.
MatrixField apply_Gz(const MatrixField& F, cplx z);

/// F[f](z) = h^2 sum_x f(x) exp(-i scale (x1 z1 + x2 z2)) on the dual
/// lattice dual_grid(f.grid(), scale). Throws for scale <= 0.
ScalarField fourier_transform(const ScalarField& f, double scale);

/// Inverse of fourier_transform: maps a field on the dual lattice back to
/// the grid `target` whose dual it is.
ScalarField inverse_fourier_transform(const ScalarField& F, double scale,
                                      const GridSpec& target);

/// Periodic spectral d/d(conj x) = (d/dx1 + i d/dx2) / 2 on the grid box.
ScalarField spectral_dbar(const ScalarField& f);

} // namespace dbar
