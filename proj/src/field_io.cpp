#include "dbar/field_io.hpp"

#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace dbar {

namespace {

void put_le(std::ostream& os, double v) {
  auto bits = std::bit_cast<std::uint64_t>(v);
  char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
  os.write(bytes, 8);
}

double get_le(std::istream& is) {
  unsigned char bytes[8];
  if (!is.read(reinterpret_cast<char*>(bytes), 8))
    throw IoError("read_field: truncated payload");
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= std::uint64_t{bytes[i]} << (8 * i);
  return std::bit_cast<double>(bits);
}

} // namespace

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_field(const std::filesystem::path& path, const ScalarField& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open for writing: " + path.string());
  const GridSpec& g = f.grid();
  os << "DBARFIELD v1 n=" << g.n() << " L=" << format_double(g.half_width())
     << '\n';
  for (const cplx& v : f.values()) {
    put_le(os, v.real());
    put_le(os, v.imag());
  }
  if (!os) throw IoError("write failed: " + path.string());
}

ScalarField read_field(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open for reading: " + path.string());
  std::string header;
  std::getline(is, header);
  std::istringstream hs(header);
  std::string magic, version, nfield, lfield;
  hs >> magic >> version >> nfield >> lfield;
  if (magic != "DBARFIELD" || version != "v1" || nfield.rfind("n=", 0) != 0 ||
      lfield.rfind("L=", 0) != 0)
    throw IoError("read_field: bad header in " + path.string());
  const int n = std::stoi(nfield.substr(2));
  double L = 0.0;
  const std::string ls = lfield.substr(2);
  auto res = std::from_chars(ls.data(), ls.data() + ls.size(), L);
  if (res.ec != std::errc{})
    throw IoError("read_field: bad half width in " + path.string());
  GridSpec grid(L, n);
  std::vector<cplx> values(grid.size());
  for (auto& v : values) {
    const double re = get_le(is);
    const double im = get_le(is);
    v = {re, im};
  }
  return ScalarField(grid, std::move(values));
}

void write_csv(const std::filesystem::path& path, const Diagnostics& rows) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open for writing: " + path.string());
  os << "key,value\n";
  for (const auto& [k, v] : rows) os << k << ',' << v << '\n';
  if (!os) throw IoError("write failed: " + path.string());
}

} // namespace dbar
