#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "dbar/grid.hpp"
#include "dbar/potentials.hpp"

namespace dbar {

/// Malformed or invalid configuration document.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct PotentialSettings {
  PotentialKind kind = PotentialKind::gaussian;
  double amplitude = 0.5;
  Symmetry symmetry = Symmetry::hermitian;
  std::uint64_t seed = 0;
};

struct SolverSettings {
  double tol = 1e-8;
  int max_iter = 200;
};

struct EstimatesSettings {
  int jmax = 20;
  int ensemble_size = 50;
  std::uint64_t seed = 1;
};

/// Number of dual-lattice points per axis used when no zgrid is given.
inline constexpr int kDefaultDualWindow = 32;

/// One experiment configuration. Every section and key is optional; missing
/// values take the defaults above and L = 6, n = 128 for the x-grid.
struct Config {
  GridSpec grid{6.0, 128};
  /// Explicit z-grid; when absent the centred kDefaultDualWindow-point window
  /// of the scale-2 dual lattice of `grid` is used.
  std::optional<GridSpec> zgrid;
  PotentialSettings potential;
  SolverSettings solver;
  std::vector<double> times{0.0, 0.1, 0.5, 1.0};
  EstimatesSettings estimates;
  /// Scattering-data dumps consumed by `inverse`.
  std::optional<std::filesystem::path> s12_path, s21_path;

  GridSpec z_grid() const;
  /// Fully expanded document, defaults included; keys are sorted.
  nlohmann::json to_json() const;
  /// 16 hex digits of FNV-1a 64 over to_json().dump().
  std::string hash() const;
};

/// Throws ConfigError on unknown keys, wrong types or invalid values.
Config parse_config(const nlohmann::json& doc);
/// Reads and parses a JSON file; throws IoError if the file cannot be read
/// and ConfigError if its content is invalid.
Config load_config(const std::filesystem::path& path);

std::uint64_t fnv1a64(std::string_view bytes);

} // namespace dbar
