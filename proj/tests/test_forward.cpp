#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <numbers>

#include "dbar/forward.hpp"
#include "dbar/grid.hpp"
#include "dbar/potentials.hpp"
#include "dbar/transforms.hpp"

using namespace dbar;
using std::numbers::pi;

namespace {

const cplx I(0.0, 1.0);

double max_diff(const ScalarField& a, const ScalarField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// Dense solve of m = 1 + E_z^{-1} G E_z (Q m), assembled from the kernels
// 1 / (pi x) and 1 / (pi conj x). Returns (m11, m21, m12, m22).
std::array<ScalarField, 4> dense_jost(const OffDiagPotential& Q, cplx z) {
  const GridSpec& g = Q.grid();
  const int N = static_cast<int>(g.size());
  const double area = g.cell_area();
  auto w = [&](int i, int l) -> cplx {
    if (i == l) return 0.0;
    const cplx d = g.point(i / g.n(), i % g.n()) - g.point(l / g.n(), l % g.n());
    return area / (pi * d);
  };
  auto pt = [&](int i) { return g.point(i / g.n(), i % g.n()); };
  using Mat = Eigen::MatrixXcd;
  using Vec = Eigen::VectorXcd;

  // Column 1: m11 = 1 + C[q12 m21], m21 = a2 Cbar[conj(a2) q21 m11].
  // Column 2: m12 = a1 C[conj(a1) q12 m22], m22 = 1 + Cbar[q21 m12].
  Mat A1 = Mat::Identity(2 * N, 2 * N), A2 = Mat::Identity(2 * N, 2 * N);
  for (int i = 0; i < N; ++i)
    for (int l = 0; l < N; ++l) {
      const cplx c = w(i, l), cb = std::conj(c);
      A1(i, N + l) -= c * Q.q12()[l];
      A1(N + i, l) -= phase_a2(pt(i), z) * cb * std::conj(phase_a2(pt(l), z)) * Q.q21()[l];
      A2(i, N + l) -= phase_a1(pt(i), z) * c * std::conj(phase_a1(pt(l), z)) * Q.q12()[l];
      A2(N + i, l) -= cb * Q.q21()[l];
    }
  Vec b1 = Vec::Zero(2 * N), b2 = Vec::Zero(2 * N);
  b1.head(N).setOnes();
  b2.tail(N).setOnes();
  const Vec x1 = A1.partialPivLu().solve(b1), x2 = A2.partialPivLu().solve(b2);
  auto field = [&](const Vec& v, int off) {
    return ScalarField(g, std::vector<cplx>(v.data() + off, v.data() + off + N));
  };
  return {field(x1, 0), field(x1, N), field(x2, 0), field(x2, N)};
}

} // namespace

TEST(Jost, ZeroPotential) {
  const GridSpec g(3.0, 16);
  const JostSolution s = solve_m(OffDiagPotential::zero(g), cplx(1.0, 2.0), 1e-10, 50);
  EXPECT_TRUE(s.report.converged);
  EXPECT_LT(matrix_l2_norm(s.m - MatrixField::identity(g)), 1e-300);
}

TEST(Jost, MatchesDenseSolve) {
  const GridSpec g(3.0, 16);
  const OffDiagPotential Q =
      make_potential(PotentialKind::random_smooth, 0.8, Symmetry::none, 5, g);
  for (cplx z : {cplx(0.0, 0.0), cplx(0.7, -1.1), cplx(-2.0, 0.4)}) {
    const JostSolution s = solve_m(Q, z, 1e-14, 400);
    ASSERT_TRUE(s.report.converged);
    const auto d = dense_jost(Q, z);
    EXPECT_LT(max_diff(s.m.m11, d[0]), 1e-11);
    EXPECT_LT(max_diff(s.m.m21, d[1]), 1e-11);
    EXPECT_LT(max_diff(s.m.m12, d[2]), 1e-11);
    EXPECT_LT(max_diff(s.m.m22, d[3]), 1e-11);
  }
}

TEST(Jost, ResidualContract) {
  const GridSpec g(4.0, 32);
  const OffDiagPotential Q =
      make_potential(PotentialKind::gaussian, 0.5, Symmetry::hermitian, 0, g);
  const JostSolution s = solve_m(Q, cplx(0.3, 0.2), 1e-9, 200);
  EXPECT_TRUE(s.report.converged);
  EXPECT_LE(s.report.final_residual, 1e-9);
  EXPECT_EQ(static_cast<int>(s.report.term_norms.size()), s.report.iterations);
  const JostSolution capped = solve_m(Q, cplx(0.3, 0.2), 1e-30, 3);
  EXPECT_FALSE(capped.report.converged);
  EXPECT_EQ(capped.report.iterations, 3);
  EXPECT_THROW(require_converged(capped.report), NonConvergence);
}

TEST(Jost, ParityOfIncrements) {
  const GridSpec g(4.0, 32);
  const OffDiagPotential Q =
      make_potential(PotentialKind::random_smooth, 0.6, Symmetry::none, 2, g);
  const cplx z(0.4, -0.9);
  const MatrixField m = solve_m(Q, z, 1e-13, 300).m;
  const MatrixField n = solve_m(Q.scaled(-1.0), z, 1e-13, 300).m;
  EXPECT_LT(max_diff(m.m11, n.m11), 1e-13);
  EXPECT_LT(max_diff(m.m22, n.m22), 1e-13);
  EXPECT_LT(max_diff(m.m12, n.m12.scaled(-1.0)), 1e-13);
  EXPECT_LT(max_diff(m.m21, n.m21.scaled(-1.0)), 1e-13);
}

TEST(Jost, TwoTermRemainderIsQuadratic) {
  const GridSpec g(4.0, 32);
  const OffDiagPotential Q =
      make_potential(PotentialKind::gaussian, 1.0, Symmetry::hermitian, 0, g);
  const cplx z(0.5, 0.5);
  auto remainder = [&](double eps) {
    const OffDiagPotential Qe = Q.scaled(eps);
    const MatrixField one = MatrixField::identity(g);
    const MatrixField Q1(ScalarField(g), Qe.q12(), Qe.q21(), ScalarField(g));
    const MatrixField m = solve_m(Qe, z, 1e-14, 100).m;
    return matrix_l2_norm(m - one - apply_Gz(Q1, z));
  };
  const double r1 = remainder(1e-2), r2 = remainder(5e-3);
  EXPECT_NEAR(r1 / r2, 4.0, 0.05);
}

TEST(Neumann, TermNormsScaleAndDecay) {
  const GridSpec g(4.0, 32);
  const OffDiagPotential Q =
      make_potential(PotentialKind::gaussian, 0.5, Symmetry::hermitian, 0, g);
  const cplx z(0.2, -0.3);
  const std::vector<double> a = neumann_term_norms(Q, z, 4);
  const std::vector<double> b = neumann_term_norms(Q.scaled(2.0), z, 4);
  ASSERT_EQ(a.size(), 4u);
  for (int k = 1; k <= 4; ++k) {
    EXPECT_NEAR(b[k - 1] / a[k - 1], std::pow(4.0, k), 1e-9 * std::pow(4.0, k));
    if (k > 1) {
      EXPECT_LE(a[k - 1] / a[k - 2], 0.55);
    }
  }
}

TEST(Scattering, ZeroPotentialAndOddness) {
  const GridSpec g(4.0, 32);
  const GridSpec zg = dual_window(g, 2.0, 8);
  const TransformResult zero = scattering_data(OffDiagPotential::zero(g), zg, 1e-10);
  EXPECT_TRUE(zero.ok());
  EXPECT_TRUE(zero.field.q12().is_zero() && zero.field.q21().is_zero());

  const OffDiagPotential Q =
      make_potential(PotentialKind::random_smooth, 0.5, Symmetry::none, 3, g);
  const OffDiagPotential S = scattering_data(Q, zg, 1e-13).checked();
  const OffDiagPotential Sm = scattering_data(Q.scaled(-1.0), zg, 1e-13).checked();
  EXPECT_LT(max_diff(S.q12(), Sm.q12().scaled(-1.0)), 1e-13);
  EXPECT_LT(max_diff(S.q21(), Sm.q21().scaled(-1.0)), 1e-13);
}

TEST(Scattering, MatchesDenseSolve) {
  const GridSpec g(3.0, 16);
  const OffDiagPotential Q =
      make_potential(PotentialKind::random_smooth, 0.8, Symmetry::none, 5, g);
  const GridSpec zg = dual_window(g, 2.0, 4);
  const OffDiagPotential S = scattering_data(Q, zg, 1e-14, 400).checked();
  for (int j = 0; j < zg.n(); ++j)
    for (int k = 0; k < zg.n(); ++k) {
      const cplx z = zg.point(j, k);
      const auto d = dense_jost(Q, z);
      cplx s12 = 0.0, s21 = 0.0;
      for (int a = 0; a < g.n(); ++a)
        for (int b = 0; b < g.n(); ++b) {
          const std::size_t i = g.index(a, b);
          s12 += Q.q12()[i] * d[3][i] * std::conj(phase_a1(g.point(a, b), z));
          s21 += Q.q21()[i] * d[0][i] * std::conj(phase_a2(g.point(a, b), z));
        }
      s12 *= I / pi * g.cell_area();
      s21 *= -I / pi * g.cell_area();
      EXPECT_NEAR(std::abs(S.q12()(j, k) - s12), 0.0, 1e-12);
      EXPECT_NEAR(std::abs(S.q21()(j, k) - s21), 0.0, 1e-12);
    }
}

TEST(Scattering, HermitianReflection) {
  // For Q hermitian, S21(z) = conj(S12(conj z)).
  const GridSpec g(4.0, 32);
  const GridSpec zg = dual_window(g, 2.0, 16);
  const OffDiagPotential Q =
      make_potential(PotentialKind::random_smooth, 0.6, Symmetry::hermitian, 4, g);
  const OffDiagPotential S = scattering_data(Q, zg, 1e-13).checked();
  double worst = 0.0;
  for (int j = 0; j < zg.n(); ++j)
    for (int k = 0; k < zg.n(); ++k)
      worst = std::max(worst, std::abs(S.q21()(j, k) - std::conj(S.q12()(j, zg.mirror(k)))));
  EXPECT_LT(worst, 1e-12);
}

TEST(Scattering, Linearization) {
  // S12(eps Q) / eps -> (i/pi) h^2 sum q12 conj(a1), error O(eps^2).
  const GridSpec g(4.0, 32);
  const GridSpec zg = dual_window(g, 2.0, 8);
  const OffDiagPotential Q =
      make_potential(PotentialKind::random_smooth, 1.0, Symmetry::none, 7, g);
  auto lin_error = [&](double eps) {
    const OffDiagPotential S = scattering_data(Q.scaled(eps), zg, 1e-14).checked();
    double err = 0.0, ref = 0.0;
    for (int j = 0; j < zg.n(); ++j)
      for (int k = 0; k < zg.n(); ++k) {
        const PhaseField A = phase_field(g, zg.point(j, k));
        cplx l12 = 0.0, l21 = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
          l12 += Q.q12()[i] * std::conj(A.a1[i]);
          l21 += Q.q21()[i] * std::conj(A.a2[i]);
        }
        l12 *= I / pi * g.cell_area();
        l21 *= -I / pi * g.cell_area();
        err += std::norm(S.q12()(j, k) / eps - l12) + std::norm(S.q21()(j, k) / eps - l21);
        ref += std::norm(l12) + std::norm(l21);
      }
    return std::sqrt(err / ref);
  };
  const double e1 = lin_error(1e-2), e2 = lin_error(5e-3);
  EXPECT_LT(e1, 1e-3);
  EXPECT_NEAR(e1 / e2, 4.0, 0.1);
}

TEST(Scattering, LipschitzProbe) {
  const GridSpec g(4.0, 32);
  const GridSpec zg = dual_grid(g, 2.0);
  const OffDiagPotential Qa =
      make_potential(PotentialKind::random_smooth, 1e-3, Symmetry::hermitian, 1, g);
  EXPECT_EQ(lipschitz_probe(Qa, Qa, zg, 1e-12), 0.0);
  // Near zero the map is the Fourier transform up to a unit factor.
  const OffDiagPotential Qb =
      Qa - make_potential(PotentialKind::random_smooth, 1e-4, Symmetry::hermitian, 2, g);
  EXPECT_NEAR(lipschitz_probe(Qa, Qb, zg, 1e-12), 1.0, 0.05);
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const OffDiagPotential A =
        make_potential(PotentialKind::random_smooth, 0.5, Symmetry::hermitian, seed, g);
    const OffDiagPotential B =
        A - make_potential(PotentialKind::random_smooth, 0.05, Symmetry::hermitian, seed + 100, g);
    EXPECT_LE(lipschitz_probe(A, B, zg, 1e-10), 2.0);
  }
}

TEST(Scattering, ReportsNonConvergence) {
  const GridSpec g(4.0, 16);
  const OffDiagPotential Q =
      make_potential(PotentialKind::gaussian, 3.0, Symmetry::hermitian, 0, g);
  const TransformResult r = scattering_data(Q, dual_window(g, 2.0, 4), 1e-12, 5);
  EXPECT_FALSE(r.ok());
  EXPECT_EQ(r.failed.size(), 16u);
  EXPECT_THROW(r.checked(), NonConvergence);
}
