#include "dbar/forward.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <string>

#include "dbar/parallel.hpp"
#include "dbar/transforms.hpp"

namespace dbar {

namespace {

using std::numbers::pi;
using Buffer = std::vector<cplx>;

double l4_pow4(std::span<const cplx> v) {
  double s = 0.0;
  for (const cplx& a : v) {
    const double n = std::norm(a);
    s += n * n;
  }
  return s;
}

double l4_pow4_shifted(std::span<const cplx> v) {
  double s = 0.0;
  for (const cplx& a : v) {
    const double n = std::norm(a - 1.0);
    s += n * n;
  }
  return s;
}

struct JostBuffers {
  Buffer m11, m12, m21, m22;
  Buffer a1c, a2c; // conj(a1), conj(a2) at this z
  SolveReport report;
};

// Per-increment hook: (iteration, first nonzero entry, second nonzero entry).
// Odd iterations pass (m12, m21) increments, even ones (m11, m22).
using IncrementHook =
    std::function<void(int, std::span<const cplx>, std::span<const cplx>)>;

// Neumann series for m = 1 + G_z(Q m). Columns decouple:
//   m12 = a1 C[conj(a1) q12 m22],  m22 = 1 + Cbar[q21 m12]
//   m21 = a2 Cbar[conj(a2) q21 m11], m11 = 1 + C[q12 m21]
JostBuffers run_jost(const GridSpec& grid, std::span<const cplx> q12,
                     std::span<const cplx> q21, cplx z, double tol,
                     int max_iter, bool stop_on_tol,
                     const IncrementHook& hook = {}) {
  const std::size_t size = grid.size();
  const int n = grid.n();
  const double area = grid.cell_area();
  const KernelTable& cauchy = *kernel_table(grid, KernelKind::cauchy);

  JostBuffers b;
  b.m11.assign(size, 1.0);
  b.m22.assign(size, 1.0);
  b.m12.assign(size, 0.0);
  b.m21.assign(size, 0.0);
  b.a1c.resize(size);
  b.a2c.resize(size);
  {
    Buffer u(n), v(n);
    for (int j = 0; j < n; ++j) {
      u[j] = std::polar(1.0, -2.0 * grid.coord(j) * z.real());
      v[j] = std::polar(1.0, -2.0 * grid.coord(j) * z.imag());
    }
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        b.a1c[grid.index(j, k)] = u[j] * v[k];
        b.a2c[grid.index(j, k)] = std::conj(u[j]) * v[k];
      }
  }

  Buffer d11(size, 1.0), d22(size, 1.0), o12(size), o21(size), tmp(size);
  auto anti_cauchy = [&](Buffer& in_out) {
    for (cplx& a : in_out) a = std::conj(a);
    cauchy.convolve(in_out, in_out);
    for (cplx& a : in_out) a = std::conj(a);
  };

  SolveReport& rep = b.report;
  for (int it = 1; it <= max_iter; ++it) {
    double inc4 = 0.0;
    if (it % 2 == 1) {
      for (std::size_t i = 0; i < size; ++i) tmp[i] = b.a1c[i] * q12[i] * d22[i];
      cauchy.convolve(tmp, tmp);
      for (std::size_t i = 0; i < size; ++i) o12[i] = std::conj(b.a1c[i]) * tmp[i];
      for (std::size_t i = 0; i < size; ++i) tmp[i] = b.a2c[i] * q21[i] * d11[i];
      anti_cauchy(tmp);
      for (std::size_t i = 0; i < size; ++i) o21[i] = std::conj(b.a2c[i]) * tmp[i];
      inc4 = l4_pow4(o12) + l4_pow4(o21);
      if (!std::isfinite(inc4)) break;
      for (std::size_t i = 0; i < size; ++i) {
        b.m12[i] += o12[i];
        b.m21[i] += o21[i];
      }
      if (hook) hook(it, o12, o21);
    } else {
      for (std::size_t i = 0; i < size; ++i) d11[i] = q12[i] * o21[i];
      cauchy.convolve(d11, d11);
      for (std::size_t i = 0; i < size; ++i) d22[i] = q21[i] * o12[i];
      anti_cauchy(d22);
      inc4 = l4_pow4(d11) + l4_pow4(d22);
      if (!std::isfinite(inc4)) break;
      for (std::size_t i = 0; i < size; ++i) {
        b.m11[i] += d11[i];
        b.m22[i] += d22[i];
      }
      if (hook) hook(it, d11, d22);
    }
    const double inc = std::pow(area * inc4, 0.25);
    const double total =
        std::pow(area * (l4_pow4_shifted(b.m11) + l4_pow4(b.m12) +
                         l4_pow4(b.m21) + l4_pow4_shifted(b.m22)),
                 0.25);
    rep.iterations = it;
    rep.term_norms.push_back(inc);
    rep.final_residual = inc == 0.0 ? 0.0 : inc / total;
    if (!std::isfinite(rep.final_residual)) break;
    if (stop_on_tol && rep.final_residual <= tol) {
      rep.converged = true;
      break;
    }
  }
  return b;
}

} // namespace

JostSolution solve_m(const OffDiagPotential& Q, cplx z, double tol,
                     int max_iter) {
  const GridSpec& g = Q.grid();
  JostBuffers b =
      run_jost(g, Q.q12().values(), Q.q21().values(), z, tol, max_iter, true);
  return {MatrixField(ScalarField(g, std::move(b.m11)),
                      ScalarField(g, std::move(b.m12)),
                      ScalarField(g, std::move(b.m21)),
                      ScalarField(g, std::move(b.m22))),
          std::move(b.report)};
}

void require_converged(const SolveReport& report) {
  if (!report.converged)
    throw NonConvergence("Neumann iteration did not converge after " +
                         std::to_string(report.iterations) +
                         " iterations (residual " +
                         std::to_string(report.final_residual) + ")");
}

std::vector<double> neumann_term_norms(const OffDiagPotential& Q, cplx z,
                                       int kmax) {
  if (kmax < 1)
    throw std::invalid_argument("neumann_term_norms: kmax must be >= 1");
  std::vector<double> norms;
  const double area = Q.grid().cell_area();
  run_jost(Q.grid(), Q.q12().values(), Q.q21().values(), z, 0.0, 2 * kmax,
           false, [&](int it, std::span<const cplx> e11, std::span<const cplx>) {
             if (it % 2 == 0) norms.push_back(lp_norm(e11, area, 4.0));
           });
  return norms;
}

const OffDiagPotential& TransformResult::checked() const {
  if (!ok())
    throw NonConvergence("transform: " + std::to_string(failed.size()) +
                             " points did not converge",
                         failed);
  return field;
}

TransformResult scattering_data(const OffDiagPotential& Q,
                                 const GridSpec& zgrid, double tol,
                                 int max_iter) {
  const GridSpec& xg = Q.grid();
  const std::size_t nz = zgrid.size();
  const double area = xg.cell_area();
  std::vector<cplx> s12(nz), s21(nz);
  std::vector<int> iterations(nz);
  std::vector<double> residuals(nz);
  std::vector<char> converged(nz);
  const auto q12 = Q.q12().values();
  const auto q21 = Q.q21().values();

  parallel_for(nz, [&](std::size_t idx) {
    const int j = static_cast<int>(idx) / zgrid.n();
    const int k = static_cast<int>(idx) % zgrid.n();
    const cplx z = zgrid.point(j, k);
    JostBuffers b = run_jost(xg, q12, q21, z, tol, max_iter, true);
    cplx i12{}, i21{};
    for (std::size_t i = 0; i < xg.size(); ++i) {
      i12 += q12[i] * b.m22[i] * b.a1c[i];
      i21 += q21[i] * b.m11[i] * b.a2c[i];
    }
    s12[idx] = cplx(0.0, area / pi) * i12;
    s21[idx] = cplx(0.0, -area / pi) * i21;
    iterations[idx] = b.report.iterations;
    residuals[idx] = b.report.final_residual;
    converged[idx] = b.report.converged;
  });

  std::vector<std::size_t> failed;
  for (std::size_t i = 0; i < nz; ++i) {
    if (!converged[i]) failed.push_back(i);
    if (!std::isfinite(s12[i].real()) || !std::isfinite(s12[i].imag())) s12[i] = 0.0;
    if (!std::isfinite(s21[i].real()) || !std::isfinite(s21[i].imag())) s21[i] = 0.0;
  }
  return {OffDiagPotential(ScalarField(zgrid, std::move(s12)),
                           ScalarField(zgrid, std::move(s21))),
          std::move(iterations), std::move(residuals), std::move(failed)};
}

double lipschitz_probe(const OffDiagPotential& Qa, const OffDiagPotential& Qb,
                       const GridSpec& zgrid, double tol, int max_iter) {
  const double denom = matrix_l2_norm(Qa - Qb);
  if (denom == 0.0) return 0.0;
  const OffDiagPotential Sa = scattering_data(Qa, zgrid, tol, max_iter).checked();
  const OffDiagPotential Sb = scattering_data(Qb, zgrid, tol, max_iter).checked();
  return matrix_l2_norm(Sa - Sb) / denom;
}

} // namespace dbar
