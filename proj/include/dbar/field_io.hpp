#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dbar/grid.hpp"

namespace dbar {

/// File open, read, write or format failure.
class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Writes `DBARFIELD v1 n=<n> L=<L>\n` followed by n*n little-endian float64
/// (re, im) pairs in row-major order.
void write_field(const std::filesystem::path& path, const ScalarField& f);
ScalarField read_field(const std::filesystem::path& path);

using Diagnostics = std::vector<std::pair<std::string, std::string>>;

/// `key,value` rows.
void write_csv(const std::filesystem::path& path, const Diagnostics& rows);

std::string format_double(double v);

} // namespace dbar
