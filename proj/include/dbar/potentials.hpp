#pragma once

#include <cstdint>
#include <string_view>

#include "dbar/grid.hpp"

namespace dbar {

/// Counter-based generator: every draw is a pure function of
/// (seed, stream, counter), so parallel consumers stay deterministic.
class CounterRng {
public:
  CounterRng(std::uint64_t seed, std::uint64_t stream)
      : seed_(seed), stream_(stream) {}

  std::uint64_t bits(std::uint64_t counter) const;
  /// Uniform on (0, 1).
  double uniform(std::uint64_t counter) const;
  /// Standard normal (Box-Muller on counters 2c, 2c+1).
  double normal(std::uint64_t counter) const;

private:
  std::uint64_t seed_;
  std::uint64_t stream_;
};

enum class PotentialKind { gaussian, bump, random_smooth };

PotentialKind potential_kind_from_string(std::string_view s);
std::string_view to_string(PotentialKind k);

/// Smooth decaying off-diagonal potential normalised so that
/// matrix_l2_norm(result) == amplitude (up to rounding).
///
///  gaussian       q12 ~ exp(-|x|^2)
///  bump           q12 ~ exp(1 - 1/(1 - |x|^2/4)) on |x| < 2
///  random_smooth  Gaussian envelope exp(-|x|^2/4) times a seeded sum of
///                 plane waves with |k| <= 1.5
///
/// q21 is conj(q12), -conj(q12), or an independent shape for Symmetry::none.
OffDiagPotential make_potential(PotentialKind kind, double amplitude,
                                Symmetry symmetry, std::uint64_t seed,
                                const GridSpec& grid);

/// Scalar random smooth field with unit L2 norm (the q12 shape above).
ScalarField random_smooth_field(const GridSpec& grid, std::uint64_t seed,
                                std::uint64_t stream = 0);

/// Independent uniform (0, 1) samples per cell.
ScalarField random_nonnegative_field(const GridSpec& grid, std::uint64_t seed,
                                     std::uint64_t stream = 0);

} // namespace dbar
