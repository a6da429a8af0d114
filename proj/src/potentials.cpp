#include "dbar/potentials.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace dbar {

namespace {

std::uint64_t mix(std::uint64_t z) {
  // splitmix64 finaliser
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr double kBumpRadius = 2.0;
constexpr double kModeSpacing = 0.5;
constexpr double kModeCutoff = 1.5;

ScalarField gaussian_shape(const GridSpec& grid, cplx c) {
  return ScalarField::from_function(
      grid, [c](cplx x) { return c * std::exp(-std::norm(x)); });
}

ScalarField bump_shape(const GridSpec& grid, bool twisted) {
  return ScalarField::from_function(grid, [twisted](cplx x) {
    const double r2 = std::norm(x) / (kBumpRadius * kBumpRadius);
    if (r2 >= 1.0) return cplx{};
    const double b = std::exp(1.0 - 1.0 / (1.0 - r2));
    return twisted ? b * std::polar(1.0, x.real()) : cplx{b, 0.0};
  });
}

ScalarField random_shape(const GridSpec& grid, std::uint64_t seed,
                         std::uint64_t stream) {
  const CounterRng rng(seed, stream);
  struct Mode {
    double kx, ky;
    cplx c;
  };
  std::vector<Mode> modes;
  std::uint64_t counter = 0;
  const int span = static_cast<int>(kModeCutoff / kModeSpacing);
  for (int a = -span; a <= span; ++a) {
    for (int b = -span; b <= span; ++b) {
      const double kx = a * kModeSpacing, ky = b * kModeSpacing;
      if (std::hypot(kx, ky) > kModeCutoff + 1e-12) continue;
      const double re = rng.normal(counter++);
      const double im = rng.normal(counter++);
      modes.push_back({kx, ky, cplx{re, im} / std::numbers::sqrt2});
    }
  }
  return ScalarField::from_function(grid, [&modes](cplx x) {
    cplx s{};
    for (const Mode& m : modes)
      s += m.c * std::polar(1.0, m.kx * x.real() + m.ky * x.imag());
    return s * std::exp(-0.25 * std::norm(x));
  });
}

} // namespace

std::uint64_t CounterRng::bits(std::uint64_t counter) const {
  return mix(mix(seed_ ^ mix(stream_ + 0x632be59bd9b4e019ULL)) + counter);
}

double CounterRng::uniform(std::uint64_t counter) const {
  // 53 random bits, shifted off zero
  return (static_cast<double>(bits(counter) >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::normal(std::uint64_t counter) const {
  const double u1 = uniform(2 * counter);
  const double u2 = uniform(2 * counter + 1);
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

PotentialKind potential_kind_from_string(std::string_view s) {
  if (s == "gaussian") return PotentialKind::gaussian;
  if (s == "bump") return PotentialKind::bump;
  if (s == "random-smooth" || s == "random_smooth")
    return PotentialKind::random_smooth;
  throw std::invalid_argument("unknown potential kind: " + std::string(s));
}

std::string_view to_string(PotentialKind k) {
  switch (k) {
  case PotentialKind::bump: return "bump";
  case PotentialKind::random_smooth: return "random-smooth";
  default: return "gaussian";
  }
}

ScalarField random_smooth_field(const GridSpec& grid, std::uint64_t seed,
                                std::uint64_t stream) {
  ScalarField f = random_shape(grid, seed, stream);
  return f.scaled(1.0 / lp_norm(f, 2.0));
}

ScalarField random_nonnegative_field(const GridSpec& grid, std::uint64_t seed,
                                     std::uint64_t stream) {
  const CounterRng rng(seed, stream);
  std::vector<cplx> v(grid.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = rng.uniform(i);
  return ScalarField(grid, std::move(v));
}

OffDiagPotential make_potential(PotentialKind kind, double amplitude,
                                Symmetry symmetry, std::uint64_t seed,
                                const GridSpec& grid) {
  if (!(amplitude >= 0.0))
    throw std::invalid_argument("make_potential: amplitude must be >= 0");

  ScalarField s12(grid), s21(grid);
  switch (kind) {
  case PotentialKind::gaussian:
    s12 = gaussian_shape(grid, 1.0);
    s21 = gaussian_shape(grid, cplx{0.0, 1.0});
    break;
  case PotentialKind::bump:
    s12 = bump_shape(grid, false);
    s21 = bump_shape(grid, true);
    break;
  case PotentialKind::random_smooth:
    s12 = random_shape(grid, seed, 0);
    s21 = random_shape(grid, seed, 1);
    break;
  }
  switch (symmetry) {
  case Symmetry::hermitian: s21 = s12.conj(); break;
  case Symmetry::skew: s21 = s12.conj().scaled(-1.0); break;
  case Symmetry::none: break;
  }
  const double norm = std::hypot(lp_norm(s12, 2.0), lp_norm(s21, 2.0));
  const double c = amplitude / norm;
  ScalarField q12 = s12.scaled(c);
  ScalarField q21 = q12.conj();
  if (symmetry == Symmetry::skew) q21 = q12.conj().scaled(-1.0);
  if (symmetry == Symmetry::none) q21 = s21.scaled(c);
  return {std::move(q12), std::move(q21), symmetry};
}

} // namespace dbar
