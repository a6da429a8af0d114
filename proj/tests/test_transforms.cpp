#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "dbar/grid.hpp"
#include "dbar/potentials.hpp"
#include "dbar/transforms.hpp"

using namespace dbar;
using std::numbers::pi;

namespace {

ScalarField direct_sum(const ScalarField& f, cplx (*kernel)(cplx)) {
  const GridSpec& g = f.grid();
  std::vector<cplx> out(g.size());
  for (int j = 0; j < g.n(); ++j)
    for (int k = 0; k < g.n(); ++k) {
      cplx acc = 0.0;
      for (int a = 0; a < g.n(); ++a)
        for (int b = 0; b < g.n(); ++b)
          if (a != j || b != k) acc += f(a, b) * kernel(g.point(j, k) - g.point(a, b));
      out[g.index(j, k)] = g.cell_area() * acc;
    }
  return ScalarField(g, std::move(out));
}

cplx cauchy_kernel(cplx d) { return 1.0 / (pi * d); }
cplx anti_cauchy_kernel(cplx d) { return 1.0 / (pi * std::conj(d)); }
cplx riesz_kernel(cplx d) { return 1.0 / std::abs(d); }

double max_diff(const ScalarField& a, const ScalarField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

ScalarField gaussian(const GridSpec& g) {
  return ScalarField::from_function(g, [](cplx x) { return std::exp(-std::norm(x)); });
}

} // namespace

TEST(Cauchy, MatchesDirectSum) {
  const GridSpec g(3.0, 32);
  const ScalarField f = random_smooth_field(g, 4);
  EXPECT_LT(max_diff(cauchy_transform(f), direct_sum(f, cauchy_kernel)), 1e-12);
  EXPECT_LT(max_diff(anti_cauchy_transform(f), direct_sum(f, anti_cauchy_kernel)), 1e-12);
}

TEST(Cauchy, IsLinear) {
  const GridSpec g(3.0, 32);
  const ScalarField a = random_smooth_field(g, 1), b = random_smooth_field(g, 2);
  const cplx c(0.3, -1.2);
  EXPECT_LT(max_diff(cauchy_transform(a + b.scaled(c)),
                     cauchy_transform(a) + cauchy_transform(b).scaled(c)),
            1e-13);
}

TEST(Cauchy, DiskIndicator) {
  // C[1_{|y|<1}](x) = conj(x) inside and 1/x outside.
  const GridSpec g(2.0, 256);
  const ScalarField disk =
      ScalarField::from_function(g, [](cplx x) { return std::abs(x) < 1.0 ? 1.0 : 0.0; });
  const ScalarField c = cauchy_transform(disk);
  double worst = 0.0;
  for (int j = 0; j < g.n(); ++j)
    for (int k = 0; k < g.n(); ++k) {
      const cplx x = g.point(j, k);
      const double r = std::abs(x);
      if (r < 0.7) worst = std::max(worst, std::abs(c(j, k) - std::conj(x)));
      if (r > 1.3) worst = std::max(worst, std::abs(c(j, k) - 1.0 / x));
    }
  EXPECT_LT(worst, 2e-2);
}

TEST(Cauchy, InvertsDbar) {
  // dbar exp(-|x|^2) = -x exp(-|x|^2).
  const GridSpec g(6.0, 128);
  const ScalarField u = gaussian(g);
  const ScalarField f =
      ScalarField::from_function(g, [](cplx x) { return -x * std::exp(-std::norm(x)); });
  EXPECT_LT(max_diff(spectral_dbar(u), f), 1e-10);
  EXPECT_LT(max_diff(cauchy_transform(f), u), 1e-2);
  EXPECT_LT(max_diff(spectral_dbar(cauchy_transform(f)), f), 1e-2);
}

TEST(Riesz, KernelTables) {
  const GridSpec g(2.0, 16);
  const double h = g.spacing();
  EXPECT_NEAR(riesz_unit_cell_integral(), 4.0 * std::log(1.0 + std::sqrt(2.0)), 1e-12);
  EXPECT_NEAR(kernel_table(g, KernelKind::riesz)->self_weight(),
              h * 4.0 * std::log(1.0 + std::sqrt(2.0)), 1e-12);
  EXPECT_EQ(kernel_table(g, KernelKind::cauchy)->self_weight(), 0.0);
  EXPECT_NEAR(std::abs(kernel_table(g, KernelKind::cauchy)->weight(1, 2) -
                       h * h / (pi * h * cplx(1.0, 2.0))),
              0.0, 1e-15);
  EXPECT_NEAR(kernel_table(g, KernelKind::riesz)->weight(-3, 4).real(), h * h / (5.0 * h), 1e-15);
}

TEST(Riesz, MatchesDirectSumPlusSelfCell) {
  const GridSpec g(3.0, 32);
  const ScalarField f = random_smooth_field(g, 6);
  const ScalarField off = direct_sum(f, riesz_kernel);
  const double self = kernel_table(g, KernelKind::riesz)->self_weight();
  EXPECT_LT(max_diff(riesz_potential(f), off + f.scaled(self)), 1e-12);
}

TEST(Riesz, DiskPotentialAtOrigin) {
  // int_{|y|<1} dy / |y| = 2 pi.
  const GridSpec g(4.0, 128);
  const ScalarField disk =
      ScalarField::from_function(g, [](cplx x) { return std::abs(x) < 1.0 ? 1.0 : 0.0; });
  const ScalarField r = riesz_potential(disk);
  const int c = g.n() / 2;
  EXPECT_NEAR(r(c, c).real(), 2.0 * pi, 0.02 * 2.0 * pi);
}

TEST(Riesz, PositivityPreserving) {
  const GridSpec g(2.0, 32);
  const ScalarField f = random_nonnegative_field(g, 2);
  const ScalarField r = riesz_potential(f);
  for (cplx v : r.values()) {
    EXPECT_GT(v.real(), 0.0);
    EXPECT_NEAR(v.imag(), 0.0, 1e-12);
  }
}

TEST(Phases, ValuesAndUnitModulus) {
  EXPECT_NEAR(std::abs(phase_a1(1.0, pi / 2) - cplx(-1.0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(phase_a2(cplx(0.0, 1.0), cplx(0.0, pi / 2)) - cplx(-1.0)), 0.0, 1e-15);
  const cplx x(0.4, -1.3), z(2.1, 0.7);
  EXPECT_NEAR(std::abs(phase_a1(x, z)), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(phase_a1(x, z) -
                       std::exp(cplx(0.0, 1.0) * (x * std::conj(z) + std::conj(x) * z))),
              0.0, 1e-14);
  EXPECT_NEAR(std::abs(phase_a2(x, z) -
                       std::exp(-cplx(0.0, 1.0) * (x * z + std::conj(x * z)))),
              0.0, 1e-14);
}

TEST(Operators, EzRoundTripAndDiagonalGz) {
  const GridSpec g(3.0, 32);
  const MatrixField F(random_smooth_field(g, 1), random_smooth_field(g, 2),
                      random_smooth_field(g, 3), random_smooth_field(g, 4));
  const cplx z(0.8, -0.3);
  const MatrixField back =
      apply_Ez(apply_Ez(F, z, Direction::forward), z, Direction::inverse);
  EXPECT_LT(matrix_l2_norm(back - F), 1e-14);

  const MatrixField D(F.m11, ScalarField(g), ScalarField(g), F.m22);
  EXPECT_LT(matrix_l2_norm(apply_Gz(D, z) - apply_G(D)), 1e-14);
}

TEST(Operators, GRoutingMatchesDirectSums) {
  const GridSpec g(2.0, 16);
  const MatrixField F(random_smooth_field(g, 1), random_smooth_field(g, 2),
                      random_smooth_field(g, 3), random_smooth_field(g, 4));
  const MatrixField G = apply_G(F);
  EXPECT_LT(max_diff(G.m11, direct_sum(F.m11, cauchy_kernel)), 1e-13);
  EXPECT_LT(max_diff(G.m12, direct_sum(F.m12, cauchy_kernel)), 1e-13);
  EXPECT_LT(max_diff(G.m21, direct_sum(F.m21, anti_cauchy_kernel)), 1e-13);
  EXPECT_LT(max_diff(G.m22, direct_sum(F.m22, anti_cauchy_kernel)), 1e-13);

  // G_z on off-diagonal entries conjugates by the phases.
  const cplx z(0.5, 1.1);
  const MatrixField Gz = apply_Gz(F, z);
  const PhaseField A = phase_field(g, z);
  EXPECT_LT(max_diff(Gz.m12, A.a1 * direct_sum(F.m12 * A.a1.conj(), cauchy_kernel)), 1e-13);
  EXPECT_LT(max_diff(Gz.m21, A.a2 * direct_sum(F.m21 * A.a2.conj(), anti_cauchy_kernel)),
            1e-13);
}

TEST(Fourier, GaussianTransform) {
  // int exp(-|x|^2) exp(-2i x.z) dx = pi exp(-|z|^2).
  const GridSpec g(6.0, 64);
  const ScalarField F = fourier_transform(gaussian(g), 2.0);
  EXPECT_EQ(F.grid(), dual_grid(g, 2.0));
  const GridSpec& d = F.grid();
  double worst = 0.0;
  for (int j = 0; j < d.n(); ++j)
    for (int k = 0; k < d.n(); ++k)
      worst = std::max(worst, std::abs(F(j, k) - pi * std::exp(-std::norm(d.point(j, k)))));
  EXPECT_LT(worst, 1e-6);
}

TEST(Fourier, MatchesDirectSumAndPlancherel) {
  const GridSpec g(3.0, 16);
  const ScalarField f = random_smooth_field(g, 8);
  const double scale = 2.0;
  const ScalarField F = fourier_transform(f, scale);
  const GridSpec& d = F.grid();
  double worst = 0.0;
  for (int j = 0; j < d.n(); ++j)
    for (int k = 0; k < d.n(); ++k) {
      cplx acc = 0.0;
      for (int a = 0; a < g.n(); ++a)
        for (int b = 0; b < g.n(); ++b)
          acc += f(a, b) * std::polar(1.0, -scale * (g.coord(a) * d.coord(j) +
                                                     g.coord(b) * d.coord(k)));
      worst = std::max(worst, std::abs(F(j, k) - g.cell_area() * acc));
    }
  EXPECT_LT(worst, 1e-12);
  EXPECT_NEAR(lp_norm(F, 2.0), 2.0 * pi / scale * lp_norm(f, 2.0), 1e-12);
  EXPECT_LT(max_diff(inverse_fourier_transform(F, scale, g), f), 1e-13);
}

TEST(Fourier, RejectsNonPositiveScale) {
  const ScalarField f(GridSpec(1.0, 4));
  EXPECT_THROW(fourier_transform(f, 0.0), std::invalid_argument);
  EXPECT_THROW(fourier_transform(f, -1.0), std::invalid_argument);
  EXPECT_THROW(inverse_fourier_transform(f, 2.0, GridSpec(2.0, 4)), std::invalid_argument);
}
