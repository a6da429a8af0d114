#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dbar/config.hpp"
#include "dbar/grid.hpp"

namespace dbar {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  /// Failed only on a sub-check whose threshold is below a proven bound
  /// (documented in the README); every other sub-check passed.
  bool known_unattainable = false;
  std::string detail;
};

struct AcceptanceSettings {
  /// x-grid for the scattering criteria; the Plancherel refinement check
  /// also runs at n / 2.
  GridSpec grid{6.0, 128};
  /// x-grid for the DS-II criteria.
  GridSpec dsii_grid{6.0, 64};
  /// Points per axis of the scale-2 dual-lattice window used as z-grid.
  int dual_window = 32;
  double tol = 1e-8;
  int max_iter = 200;
  int ensemble_size = 50;
  std::uint64_t seed = 1;
  /// Where S / Q dumps and the determinism runs are written; a temporary
  /// directory is used (and removed) when empty.
  std::optional<std::filesystem::path> dump_dir;
  /// Criteria to run (1..11); empty runs all.
  std::vector<int> only;
};

AcceptanceSettings acceptance_settings(const Config& config);

/// Runs the criteria in order, printing one `[PASS]` / `[FAIL]` line per
/// criterion to `out` as each completes.
std::vector<CriterionResult> run_acceptance(const AcceptanceSettings& settings,
                                            std::ostream& out);

bool all_passed(const std::vector<CriterionResult>& results);
/// True when every failure is marked known_unattainable.
bool no_unexpected_failures(const std::vector<CriterionResult>& results);

} // namespace dbar
