#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

namespace dbar {

using cplx = std::complex<double>;

/// Square, cell-centred lattice on [-L, L]^2 with n samples per axis.
///
/// The point with index (j, k) is x = (-L + (j + 1/2) h) + i (-L + (k + 1/2) h)
/// with h = 2L / n, so j runs along the real axis and k along the imaginary
/// axis. Storage is row-major in j. The lattice contains no sample at the
/// origin and is closed under x -> -x and x -> conj(x).
class GridSpec {
public:
  GridSpec(double half_width, int n);

  double half_width() const { return L_; }
  int n() const { return n_; }
  double spacing() const { return 2.0 * L_ / n_; }
  double cell_area() const { return spacing() * spacing(); }
  std::size_t size() const { return static_cast<std::size_t>(n_) * n_; }

  double coord(int j) const { return -L_ + (j + 0.5) * spacing(); }
  cplx point(int j, int k) const { return {coord(j), coord(k)}; }
  std::size_t index(int j, int k) const {
    return static_cast<std::size_t>(j) * n_ + k;
  }
  /// Index of the mirrored coordinate: coord(mirror(j)) == -coord(j).
  int mirror(int j) const { return n_ - 1 - j; }

  bool operator==(const GridSpec&) const = default;

private:
  double L_;
  int n_;
};

/// Lattice dual to `grid` under exp(-i scale x.z): spacing pi / (scale L).
GridSpec dual_grid(const GridSpec& grid, double scale);

/// Centred window of `n_window` points per axis of the dual lattice.
GridSpec dual_window(const GridSpec& grid, double scale, int n_window);

/// Complex samples on a GridSpec. Values are always finite.
class ScalarField {
public:
  explicit ScalarField(const GridSpec& grid);
  ScalarField(const GridSpec& grid, std::vector<cplx> values);

  static ScalarField from_function(const GridSpec& grid,
                                   const std::function<cplx(cplx)>& f);

  const GridSpec& grid() const { return grid_; }
  std::span<const cplx> values() const { return values_; }
  cplx operator()(int j, int k) const { return values_[grid_.index(j, k)]; }
  cplx operator[](std::size_t i) const { return values_[i]; }
  std::size_t size() const { return values_.size(); }

  ScalarField conj() const;
  ScalarField scaled(cplx c) const;
  bool is_zero() const;

private:
  GridSpec grid_;
  std::vector<cplx> values_;
};

ScalarField operator+(const ScalarField& a, const ScalarField& b);
ScalarField operator-(const ScalarField& a, const ScalarField& b);
ScalarField operator*(const ScalarField& a, const ScalarField& b);

enum class Symmetry { none, hermitian, skew };

std::string_view to_string(Symmetry s);
Symmetry symmetry_from_string(std::string_view s);

/// 2x2 field with identically zero diagonal. Houses both potentials Q and
/// scattering data S. Hermitian means q21 = conj(q12), skew means
/// q21 = -conj(q12); the tag is checked pointwise on construction.
class OffDiagPotential {
public:
  OffDiagPotential(ScalarField q12, ScalarField q21,
                   Symmetry symmetry = Symmetry::none);

  static OffDiagPotential zero(const GridSpec& grid,
                               Symmetry symmetry = Symmetry::none);
  /// Q = [[0, q], [conj(q), 0]].
  static OffDiagPotential hermitian_from(const ScalarField& q);

  const GridSpec& grid() const { return q12_.grid(); }
  const ScalarField& q12() const { return q12_; }
  const ScalarField& q21() const { return q21_; }
  Symmetry symmetry() const { return symmetry_; }

  OffDiagPotential scaled(double c) const;

private:
  ScalarField q12_;
  ScalarField q21_;
  Symmetry symmetry_;
};

OffDiagPotential operator-(const OffDiagPotential& a,
                           const OffDiagPotential& b);

/// Full 2x2 matrix field on a shared grid.
struct MatrixField {
  ScalarField m11, m12, m21, m22;

  MatrixField(ScalarField a11, ScalarField a12, ScalarField a21,
              ScalarField a22);

  static MatrixField zero(const GridSpec& grid);
  static MatrixField identity(const GridSpec& grid);

  const GridSpec& grid() const { return m11.grid(); }
  bool diagonal_is_zero() const { return m11.is_zero() && m22.is_zero(); }
  bool off_diagonal_is_zero() const { return m12.is_zero() && m21.is_zero(); }
};

MatrixField operator+(const MatrixField& a, const MatrixField& b);
MatrixField operator-(const MatrixField& a, const MatrixField& b);

/// (h^2 sum |f|^p)^(1/p). Throws std::invalid_argument for p < 1.
double lp_norm(const ScalarField& f, double p);
double lp_norm(std::span<const cplx> values, double cell_area, double p);
double sup_norm(const ScalarField& f);

double matrix_l2_norm(const OffDiagPotential& F);
double matrix_l2_norm(const MatrixField& F);
/// (sum over entries of ||F^{jk}||_p^p)^(1/p).
double matrix_lp_norm(const MatrixField& F, double p);

} // namespace dbar
