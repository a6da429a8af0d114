#include "dbar/inverse.hpp"

#include <cmath>
#include <numbers>

#include "dbar/parallel.hpp"
#include "dbar/transforms.hpp"

namespace dbar {

namespace {

using std::numbers::pi;
using Buffer = std::vector<cplx>;

double l4_pow4(std::span<const cplx> v, cplx shift = 0.0) {
  double s = 0.0;
  for (const cplx& a : v) {
    const double n = std::norm(a - shift);
    s += n * n;
  }
  return s;
}

struct DbarBuffers {
  Buffer m11, m12, m21, m22;
  Buffer a1, a2; // a1(x, z), a2(x, z) over the z-grid
  SolveReport report;
};

// Rows of m decouple under right multiplication by S A:
//   m12 = C[m11(conj z) S12 a1],  m11 = 1 + C[m12(conj z) S21 a2]
//   m21 = C[m22(conj z) S21 a2],  m22 = 1 + C[m21(conj z) S12 a1]
DbarBuffers run_dbar(const GridSpec& zg, std::span<const cplx> s12,
                     std::span<const cplx> s21, cplx x, double tol,
                     int max_iter) {
  const std::size_t size = zg.size();
  const int n = zg.n();
  const double area = zg.cell_area();
  const KernelTable& cauchy = *kernel_table(zg, KernelKind::cauchy);

  DbarBuffers b;
  b.m11.assign(size, 1.0);
  b.m22.assign(size, 1.0);
  b.m12.assign(size, 0.0);
  b.m21.assign(size, 0.0);
  b.a1.resize(size);
  b.a2.resize(size);
  {
    Buffer u(n), v(n);
    for (int j = 0; j < n; ++j) {
      u[j] = std::polar(1.0, 2.0 * x.real() * zg.coord(j));
      v[j] = std::polar(1.0, 2.0 * x.imag() * zg.coord(j));
    }
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        b.a1[zg.index(j, k)] = u[j] * v[k];
        b.a2[zg.index(j, k)] = std::conj(u[j]) * v[k];
      }
  }
  // value at conj(z) for index (j, k) lives at (j, n - 1 - k)
  auto reflected = [&](const Buffer& f, int j, int k) {
    return f[zg.index(j, zg.mirror(k))];
  };

  Buffer d11(size, 1.0), d22(size, 1.0), o12(size), o21(size);
  SolveReport& rep = b.report;
  for (int it = 1; it <= max_iter; ++it) {
    double inc4 = 0.0;
    Buffer& out1 = it % 2 == 1 ? o12 : d11;
    Buffer& out2 = it % 2 == 1 ? o21 : d22;
    const Buffer& in1 = it % 2 == 1 ? d11 : o12;
    const Buffer& in2 = it % 2 == 1 ? d22 : o21;
    // odd: (row 1, row 2) = (m11 -> m12, m22 -> m21); even: (m12 -> m11, m21 -> m22)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const std::size_t i = zg.index(j, k);
        if (it % 2 == 1) {
          out1[i] = reflected(in1, j, k) * s12[i] * b.a1[i];
          out2[i] = reflected(in2, j, k) * s21[i] * b.a2[i];
        } else {
          out1[i] = reflected(in1, j, k) * s21[i] * b.a2[i];
          out2[i] = reflected(in2, j, k) * s12[i] * b.a1[i];
        }
      }
    cauchy.convolve(out1, out1);
    cauchy.convolve(out2, out2);
    inc4 = l4_pow4(out1) + l4_pow4(out2);
    if (!std::isfinite(inc4)) break;
    if (it % 2 == 1) {
      for (std::size_t i = 0; i < size; ++i) {
        b.m12[i] += o12[i];
        b.m21[i] += o21[i];
      }
    } else {
      for (std::size_t i = 0; i < size; ++i) {
        b.m11[i] += d11[i];
        b.m22[i] += d22[i];
      }
    }
    const double inc = std::pow(area * inc4, 0.25);
    const double total =
        std::pow(area * (l4_pow4(b.m11, 1.0) + l4_pow4(b.m12) +
                         l4_pow4(b.m21) + l4_pow4(b.m22, 1.0)),
                 0.25);
    rep.iterations = it;
    rep.term_norms.push_back(inc);
    rep.final_residual = inc == 0.0 ? 0.0 : inc / total;
    if (!std::isfinite(rep.final_residual)) break;
    if (rep.final_residual <= tol) {
      rep.converged = true;
      break;
    }
  }
  return b;
}

} // namespace

MatrixField apply_T(const MatrixField& mz, const OffDiagPotential& S, cplx x) {
  const GridSpec& zg = S.grid();
  if (!(mz.grid() == zg))
    throw std::invalid_argument("apply_T: m and S live on different z-grids");
  const int n = zg.n();
  std::vector<cplx> t11(zg.size()), t12(zg.size()), t21(zg.size()), t22(zg.size());
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      const std::size_t i = zg.index(j, k);
      const int kr = zg.mirror(k);
      const cplx z = zg.point(j, k);
      const cplx col1 = phase_a2(x, z); // a1(x, -conj z)
      const cplx col2 = phase_a1(x, z); // a2(x, -conj z)
      const cplx s12 = S.q12()[i], s21 = S.q21()[i];
      // m(conj z) S: [[m12 s21, m11 s12], [m22 s21, m21 s12]]
      t11[i] = mz.m12(j, kr) * s21 * col1;
      t12[i] = mz.m11(j, kr) * s12 * col2;
      t21[i] = mz.m22(j, kr) * s21 * col1;
      t22[i] = mz.m21(j, kr) * s12 * col2;
    }
  return {ScalarField(zg, std::move(t11)), ScalarField(zg, std::move(t12)),
          ScalarField(zg, std::move(t21)), ScalarField(zg, std::move(t22))};
}

JostSolution solve_m_dbar(const OffDiagPotential& S, cplx x, double tol,
                          int max_iter) {
  const GridSpec& zg = S.grid();
  DbarBuffers b =
      run_dbar(zg, S.q12().values(), S.q21().values(), x, tol, max_iter);
  return {MatrixField(ScalarField(zg, std::move(b.m11)),
                      ScalarField(zg, std::move(b.m12)),
                      ScalarField(zg, std::move(b.m21)),
                      ScalarField(zg, std::move(b.m22))),
          std::move(b.report)};
}

TransformResult reconstruct_potential(const OffDiagPotential& S,
                                      const GridSpec& xgrid, double tol,
                                      int max_iter) {
  const GridSpec& zg = S.grid();
  const std::size_t nx = xgrid.size();
  const double area = zg.cell_area();
  const int nz = zg.n();
  std::vector<cplx> q12(nx), q21(nx);
  std::vector<int> iterations(nx);
  std::vector<double> residuals(nx);
  std::vector<char> converged(nx);
  const auto s12 = S.q12().values();
  const auto s21 = S.q21().values();

  parallel_for(nx, [&](std::size_t idx) {
    const int j = static_cast<int>(idx) / xgrid.n();
    const int k = static_cast<int>(idx) % xgrid.n();
    const cplx x = xgrid.point(j, k);
    DbarBuffers b = run_dbar(zg, s12, s21, x, tol, max_iter);
    cplx i12{}, i21{};
    for (int a = 0; a < nz; ++a)
      for (int c = 0; c < nz; ++c) {
        const std::size_t i = zg.index(a, c);
        const std::size_t r = zg.index(a, zg.mirror(c));
        i12 += b.m11[r] * s12[i] * b.a1[i];
        i21 += b.m22[r] * s21[i] * b.a2[i];
      }
    q12[idx] = cplx(0.0, -area / pi) * i12;
    q21[idx] = cplx(0.0, area / pi) * i21;
    iterations[idx] = b.report.iterations;
    residuals[idx] = b.report.final_residual;
    converged[idx] = b.report.converged;
  });

  std::vector<std::size_t> failed;
  for (std::size_t i = 0; i < nx; ++i) {
    if (!converged[i]) failed.push_back(i);
    if (!std::isfinite(q12[i].real()) || !std::isfinite(q12[i].imag())) q12[i] = 0.0;
    if (!std::isfinite(q21[i].real()) || !std::isfinite(q21[i].imag())) q21[i] = 0.0;
  }
  return {OffDiagPotential(ScalarField(xgrid, std::move(q12)),
                           ScalarField(xgrid, std::move(q21))),
          std::move(iterations), std::move(residuals), std::move(failed)};
}

} // namespace dbar
