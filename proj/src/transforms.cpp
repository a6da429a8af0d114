#include "dbar/transforms.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <tuple>

#include "dbar/fft.hpp"

namespace dbar {

namespace {

using std::numbers::pi;

// Adaptive Simpson for the angular integral of the distance to the unit
// cell boundary, 1 / (2 cos t) on [0, pi/4].
double simpson(double a, double b, double fa, double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive(const auto& f, double a, double b, double fa, double fm,
                double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = simpson(a, m, fa, flm, fm);
  const double right = simpson(m, b, fm, frm, fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

void conj_inplace(std::span<cplx> v) {
  for (cplx& a : v) a = std::conj(a);
}

// exp(2 pi i r / m) with r reduced mod m first.
cplx root_of_unity(long long r, long long m) {
  r %= m;
  if (r < 0) r += m;
  return std::polar(1.0, 2.0 * pi * static_cast<double>(r) / static_cast<double>(m));
}

} // namespace

double riesz_unit_cell_integral(double tol) {
  // The ray at angle t leaves the cell at radius 1 / (2 cos t); the radial
  // integral of (1/r) r dr is that radius. Eight congruent octants.
  auto f = [](double t) { return 0.5 / std::cos(t); };
  const double a = 0.0, b = pi / 4.0;
  const double fa = f(a), fm = f(0.5 * (a + b)), fb = f(b);
  return 8.0 * adaptive(f, a, b, fa, fm, fb, simpson(a, b, fa, fm, fb), tol, 50);
}

KernelTable::KernelTable(const GridSpec& grid, KernelKind kind)
    : grid_(grid), kind_(kind),
      self_weight_(kind == KernelKind::riesz
                       ? grid.spacing() * riesz_unit_cell_integral()
                       : 0.0) {
  spectrum_ = kernel_spectrum(grid.n(), [this](int a, int b) {
    return (a == 0 && b == 0) ? cplx{self_weight_, 0.0} : weight(a, b);
  });
}

cplx KernelTable::weight(int a, int b) const {
  const double h = grid_.spacing();
  if (kind_ == KernelKind::cauchy)
    return h / (pi * cplx(static_cast<double>(a), static_cast<double>(b)));
  return {h / std::hypot(static_cast<double>(a), static_cast<double>(b)), 0.0};
}

void KernelTable::convolve(std::span<const cplx> in, std::span<cplx> out) const {
  convolution_workspace(grid_.n()).apply(in, spectrum_, out);
}

std::shared_ptr<const KernelTable> kernel_table(const GridSpec& grid,
                                                KernelKind kind) {
  static std::mutex mutex;
  static std::map<std::tuple<double, int, int>, std::shared_ptr<const KernelTable>>
      cache;
  std::lock_guard lock(mutex);
  auto key = std::make_tuple(grid.half_width(), grid.n(), static_cast<int>(kind));
  auto& slot = cache[key];
  if (!slot) slot = std::make_shared<const KernelTable>(grid, kind);
  return slot;
}

ScalarField cauchy_transform(const ScalarField& f) {
  std::vector<cplx> out(f.size());
  kernel_table(f.grid(), KernelKind::cauchy)->convolve(f.values(), out);
  return ScalarField(f.grid(), std::move(out));
}

ScalarField anti_cauchy_transform(const ScalarField& f) {
  std::vector<cplx> v(f.values().begin(), f.values().end());
  conj_inplace(v);
  kernel_table(f.grid(), KernelKind::cauchy)->convolve(v, v);
  conj_inplace(v);
  return ScalarField(f.grid(), std::move(v));
}

ScalarField riesz_potential(const ScalarField& f) {
  std::vector<cplx> out(f.size());
  kernel_table(f.grid(), KernelKind::riesz)->convolve(f.values(), out);
  return ScalarField(f.grid(), std::move(out));
}

PhaseField phase_field(const GridSpec& grid, cplx z) {
  return {ScalarField::from_function(grid, [z](cplx x) { return phase_a1(x, z); }),
          ScalarField::from_function(grid, [z](cplx x) { return phase_a2(x, z); }),
          z};
}

MatrixField apply_Ez(const MatrixField& F, cplx z, Direction direction) {
  const PhaseField A = phase_field(F.grid(), z);
  if (direction == Direction::forward)
    return {F.m11, F.m12 * A.a1.conj(), F.m21 * A.a2.conj(), F.m22};
  return {F.m11, F.m12 * A.a1, F.m21 * A.a2, F.m22};
}

MatrixField apply_G(const MatrixField& F) {
  return {cauchy_transform(F.m11), cauchy_transform(F.m12),
          anti_cauchy_transform(F.m21), anti_cauchy_transform(F.m22)};
}

MatrixField apply_Gz(const MatrixField& F, cplx z) {
  return apply_Ez(apply_G(apply_Ez(F, z, Direction::forward)), z,
                  Direction::inverse);
}

ScalarField fourier_transform(const ScalarField& f, double scale) {
  if (!(scale > 0.0))
    throw std::invalid_argument("fourier_transform: scale must be positive");
  const GridSpec& g = f.grid();
  const int n = g.n();
  const long long nn = n;
  // With x_j = h (j - c), z_k = dz (k - c), c = (n-1)/2 and scale h dz =
  // 2 pi / n, the kernel factors as
  //   exp(-2 pi i jk / n) exp(i pi (n-1) j / n) exp(i pi (n-1) k / n)
  //   exp(-i pi (n-1)^2 / (2n)).
  std::vector<cplx> twiddle(n);
  for (int j = 0; j < n; ++j) twiddle[j] = root_of_unity((nn - 1) * j, 2 * nn);
  const cplx global = root_of_unity(-((nn - 1) * (nn - 1)), 4 * nn);
  const cplx prefactor = g.cell_area() * global * global;

  std::vector<cplx> v(f.values().begin(), f.values().end());
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) v[g.index(j, k)] *= twiddle[j] * twiddle[k];
  periodic_fft(n).forward(v);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      v[g.index(j, k)] *= prefactor * twiddle[j] * twiddle[k];
  return ScalarField(dual_grid(g, scale), std::move(v));
}

ScalarField inverse_fourier_transform(const ScalarField& F, double scale,
                                      const GridSpec& target) {
  const GridSpec expected = dual_grid(target, scale);
  if (F.grid().n() != target.n() ||
      std::abs(F.grid().half_width() - expected.half_width()) >
          1e-12 * expected.half_width())
    throw std::invalid_argument(
        "inverse_fourier_transform: field is not on the dual lattice of target");
  const ScalarField back = fourier_transform(F.conj(), scale);
  const double c = std::pow(scale / (2.0 * pi), 2);
  std::vector<cplx> v(back.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = c * std::conj(back[i]);
  return ScalarField(target, std::move(v));
}

ScalarField spectral_dbar(const ScalarField& f) {
  const GridSpec& g = f.grid();
  const int n = g.n();
  const double dk = pi / g.half_width();
  auto freq = [n, dk](int m) {
    if (m == n / 2) return 0.0;
    return dk * (m < n / 2 ? m : m - n);
  };
  std::vector<cplx> v(f.values().begin(), f.values().end());
  PeriodicFft& fft = periodic_fft(n);
  fft.forward(v);
  const double norm = 1.0 / (static_cast<double>(n) * n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      v[g.index(j, k)] *= 0.5 * cplx(-freq(k), freq(j)) * norm;
  fft.backward(v);
  return ScalarField(g, std::move(v));
}

} // namespace dbar
