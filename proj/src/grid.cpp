#include "dbar/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace dbar {

GridSpec::GridSpec(double half_width, int n) : L_(half_width), n_(n) {
  if (!(half_width > 0.0) || !std::isfinite(half_width))
    throw std::invalid_argument("GridSpec: half width must be positive");
  if (n <= 0 || n % 2 != 0)
    throw std::invalid_argument("GridSpec: n must be a positive even integer");
}

GridSpec dual_grid(const GridSpec& grid, double scale) {
  return dual_window(grid, scale, grid.n());
}

GridSpec dual_window(const GridSpec& grid, double scale, int n_window) {
  if (!(scale > 0.0))
    throw std::invalid_argument("dual_window: scale must be positive");
  if (n_window > grid.n() || (grid.n() - n_window) % 2 != 0)
    throw std::invalid_argument("dual_window: window must be a centred subset");
  const double dz = std::numbers::pi / (scale * grid.half_width());
  return GridSpec(0.5 * n_window * dz, n_window);
}

ScalarField::ScalarField(const GridSpec& grid)
    : grid_(grid), values_(grid.size(), cplx{}) {}

ScalarField::ScalarField(const GridSpec& grid, std::vector<cplx> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size())
    throw std::invalid_argument("ScalarField: value count does not match grid");
  for (const cplx& v : values_)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw std::invalid_argument("ScalarField: non-finite value");
}

ScalarField ScalarField::from_function(const GridSpec& grid,
                                       const std::function<cplx(cplx)>& f) {
  std::vector<cplx> v(grid.size());
  for (int j = 0; j < grid.n(); ++j)
    for (int k = 0; k < grid.n(); ++k)
      v[grid.index(j, k)] = f(grid.point(j, k));
  return ScalarField(grid, std::move(v));
}

ScalarField ScalarField::conj() const {
  std::vector<cplx> v(values_.size());
  std::transform(values_.begin(), values_.end(), v.begin(),
                 [](cplx a) { return std::conj(a); });
  return ScalarField(grid_, std::move(v));
}

ScalarField ScalarField::scaled(cplx c) const {
  std::vector<cplx> v(values_.size());
  std::transform(values_.begin(), values_.end(), v.begin(),
                 [c](cplx a) { return c * a; });
  return ScalarField(grid_, std::move(v));
}

bool ScalarField::is_zero() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](cplx a) { return a == cplx{}; });
}

namespace {

template <class Op>
ScalarField combine(const ScalarField& a, const ScalarField& b, Op op) {
  if (!(a.grid() == b.grid()))
    throw std::invalid_argument("ScalarField: grid mismatch");
  std::vector<cplx> v(a.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = op(a[i], b[i]);
  return ScalarField(a.grid(), std::move(v));
}

bool matches(const ScalarField& q12, const ScalarField& q21, double sign) {
  for (std::size_t i = 0; i < q12.size(); ++i)
    if (q21[i] != sign * std::conj(q12[i])) return false;
  return true;
}

} // namespace

ScalarField operator+(const ScalarField& a, const ScalarField& b) {
  return combine(a, b, std::plus<cplx>{});
}
ScalarField operator-(const ScalarField& a, const ScalarField& b) {
  return combine(a, b, std::minus<cplx>{});
}
ScalarField operator*(const ScalarField& a, const ScalarField& b) {
  return combine(a, b, std::multiplies<cplx>{});
}

std::string_view to_string(Symmetry s) {
  switch (s) {
  case Symmetry::hermitian: return "hermitian";
  case Symmetry::skew: return "skew";
  default: return "none";
  }
}

Symmetry symmetry_from_string(std::string_view s) {
  if (s == "none") return Symmetry::none;
  if (s == "hermitian") return Symmetry::hermitian;
  if (s == "skew") return Symmetry::skew;
  throw std::invalid_argument("unknown symmetry tag: " + std::string(s));
}

OffDiagPotential::OffDiagPotential(ScalarField q12, ScalarField q21,
                                   Symmetry symmetry)
    : q12_(std::move(q12)), q21_(std::move(q21)), symmetry_(symmetry) {
  if (!(q12_.grid() == q21_.grid()))
    throw std::invalid_argument("OffDiagPotential: entries on different grids");
  if (symmetry_ == Symmetry::hermitian && !matches(q12_, q21_, 1.0))
    throw std::invalid_argument("OffDiagPotential: q21 != conj(q12)");
  if (symmetry_ == Symmetry::skew && !matches(q12_, q21_, -1.0))
    throw std::invalid_argument("OffDiagPotential: q21 != -conj(q12)");
}

OffDiagPotential OffDiagPotential::zero(const GridSpec& grid,
                                        Symmetry symmetry) {
  return {ScalarField(grid), ScalarField(grid), symmetry};
}

OffDiagPotential OffDiagPotential::hermitian_from(const ScalarField& q) {
  return {q, q.conj(), Symmetry::hermitian};
}

OffDiagPotential OffDiagPotential::scaled(double c) const {
  return {q12_.scaled(c), q21_.scaled(c), symmetry_};
}

OffDiagPotential operator-(const OffDiagPotential& a,
                           const OffDiagPotential& b) {
  const Symmetry s =
      a.symmetry() == b.symmetry() ? a.symmetry() : Symmetry::none;
  return {a.q12() - b.q12(), a.q21() - b.q21(), s};
}

MatrixField::MatrixField(ScalarField a11, ScalarField a12, ScalarField a21,
                         ScalarField a22)
    : m11(std::move(a11)), m12(std::move(a12)), m21(std::move(a21)),
      m22(std::move(a22)) {
  const GridSpec& g = m11.grid();
  if (!(m12.grid() == g) || !(m21.grid() == g) || !(m22.grid() == g))
    throw std::invalid_argument("MatrixField: entries on different grids");
}

MatrixField MatrixField::zero(const GridSpec& grid) {
  return {ScalarField(grid), ScalarField(grid), ScalarField(grid),
          ScalarField(grid)};
}

MatrixField MatrixField::identity(const GridSpec& grid) {
  ScalarField one(grid, std::vector<cplx>(grid.size(), cplx{1.0, 0.0}));
  return {one, ScalarField(grid), ScalarField(grid), one};
}

MatrixField operator+(const MatrixField& a, const MatrixField& b) {
  return {a.m11 + b.m11, a.m12 + b.m12, a.m21 + b.m21, a.m22 + b.m22};
}

MatrixField operator-(const MatrixField& a, const MatrixField& b) {
  return {a.m11 - b.m11, a.m12 - b.m12, a.m21 - b.m21, a.m22 - b.m22};
}

double lp_norm(std::span<const cplx> values, double cell_area, double p) {
  if (!(p >= 1.0) || !std::isfinite(p))
    throw std::invalid_argument("lp_norm: p must be finite and >= 1");
  double sum = 0.0;
  if (p == 2.0) {
    for (const cplx& v : values) sum += std::norm(v);
    return std::sqrt(cell_area * sum);
  }
  for (const cplx& v : values) sum += std::pow(std::abs(v), p);
  return std::pow(cell_area * sum, 1.0 / p);
}

double lp_norm(const ScalarField& f, double p) {
  return lp_norm(f.values(), f.grid().cell_area(), p);
}

double sup_norm(const ScalarField& f) {
  double m = 0.0;
  for (const cplx& v : f.values()) m = std::max(m, std::abs(v));
  return m;
}

double matrix_l2_norm(const OffDiagPotential& F) {
  return std::hypot(lp_norm(F.q12(), 2.0), lp_norm(F.q21(), 2.0));
}

double matrix_l2_norm(const MatrixField& F) { return matrix_lp_norm(F, 2.0); }

double matrix_lp_norm(const MatrixField& F, double p) {
  double sum = 0.0;
  for (const ScalarField* e : {&F.m11, &F.m12, &F.m21, &F.m22})
    sum += std::pow(lp_norm(*e, p), p);
  return std::pow(sum, 1.0 / p);
}

} // namespace dbar
