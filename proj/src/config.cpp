#include "dbar/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "dbar/field_io.hpp"

namespace dbar {

namespace {

using nlohmann::json;

const json& section(const json& doc, const char* name,
                    std::initializer_list<const char*> keys) {
  static const json empty = json::object();
  if (!doc.contains(name)) return empty;
  const json& s = doc.at(name);
  if (!s.is_object()) throw ConfigError(std::string(name) + ": expected an object");
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [key, value] : s.items())
    if (!allowed.contains(key))
      throw ConfigError(std::string(name) + ": unknown key '" + key + "'");
  return s;
}

double number(const json& s, const char* section_name, const char* key,
              double fallback) {
  if (!s.contains(key)) return fallback;
  const json& v = s.at(key);
  if (!v.is_number())
    throw ConfigError(std::string(section_name) + "." + key + ": expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d))
    throw ConfigError(std::string(section_name) + "." + key + ": must be finite");
  return d;
}

long long integer(const json& s, const char* section_name, const char* key,
                  long long fallback) {
  if (!s.contains(key)) return fallback;
  const json& v = s.at(key);
  if (!v.is_number_integer())
    throw ConfigError(std::string(section_name) + "." + key + ": expected an integer");
  return v.get<long long>();
}

std::uint64_t seed(const json& s, const char* section_name, std::uint64_t fallback) {
  if (!s.contains("seed")) return fallback;
  const json& v = s.at("seed");
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
    throw ConfigError(std::string(section_name) + ".seed: expected a nonnegative integer");
  return v.get<std::uint64_t>();
}

std::string text(const json& s, const char* section_name, const char* key,
                 const std::string& fallback) {
  if (!s.contains(key)) return fallback;
  const json& v = s.at(key);
  if (!v.is_string())
    throw ConfigError(std::string(section_name) + "." + key + ": expected a string");
  return v.get<std::string>();
}

GridSpec grid_from(const json& s, const char* name, const GridSpec& fallback) {
  const double L = number(s, name, "L", fallback.half_width());
  const long long n = integer(s, name, "n", fallback.n());
  if (n <= 0 || n % 2 != 0 || n > 1 << 14)
    throw ConfigError(std::string(name) + ".n: must be a positive even integer");
  if (!(L > 0.0)) throw ConfigError(std::string(name) + ".L: must be positive");
  return GridSpec(L, static_cast<int>(n));
}

json grid_json(const GridSpec& g) { return {{"L", g.half_width()}, {"n", g.n()}}; }

} // namespace

GridSpec Config::z_grid() const {
  if (zgrid) return *zgrid;
  return dual_window(grid, 2.0, std::min(kDefaultDualWindow, grid.n()));
}

json Config::to_json() const {
  json doc = {
      {"grid", grid_json(grid)},
      {"zgrid", grid_json(z_grid())},
      {"potential",
       {{"kind", std::string(to_string(potential.kind))},
        {"amplitude", potential.amplitude},
        {"symmetry", std::string(to_string(potential.symmetry))},
        {"seed", potential.seed}}},
      {"solver", {{"tol", solver.tol}, {"max_iter", solver.max_iter}}},
      {"evolve", {{"times", times}}},
      {"estimates",
       {{"jmax", estimates.jmax},
        {"ensemble_size", estimates.ensemble_size},
        {"seed", estimates.seed}}},
  };
  if (s12_path || s21_path) {
    json input = json::object();
    if (s12_path) input["s12"] = s12_path->string();
    if (s21_path) input["s21"] = s21_path->string();
    doc["input"] = input;
  }
  return doc;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string Config::hash() const {
  static const char* digits = "0123456789abcdef";
  std::uint64_t h = fnv1a64(to_json().dump());
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) out[i] = digits[h & 0xf];
  return out;
}

Config parse_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config: expected a JSON object");
  static const std::set<std::string> sections = {
      "grid", "zgrid", "potential", "solver", "evolve", "estimates", "input"};
  for (const auto& [key, value] : doc.items())
    if (!sections.contains(key)) throw ConfigError("config: unknown section '" + key + "'");

  Config c;
  try {
    c.grid = grid_from(section(doc, "grid", {"L", "n"}), "grid", c.grid);
    if (doc.contains("zgrid"))
      c.zgrid = grid_from(section(doc, "zgrid", {"L", "n"}), "zgrid", c.z_grid());

    const json& p =
        section(doc, "potential", {"kind", "amplitude", "symmetry", "seed"});
    c.potential.kind = potential_kind_from_string(
        text(p, "potential", "kind", std::string(to_string(c.potential.kind))));
    c.potential.amplitude = number(p, "potential", "amplitude", c.potential.amplitude);
    if (!(c.potential.amplitude >= 0.0))
      throw ConfigError("potential.amplitude: must be >= 0");
    c.potential.symmetry = symmetry_from_string(
        text(p, "potential", "symmetry", std::string(to_string(c.potential.symmetry))));
    c.potential.seed = seed(p, "potential", c.potential.seed);

    const json& s = section(doc, "solver", {"tol", "max_iter"});
    c.solver.tol = number(s, "solver", "tol", c.solver.tol);
    const long long max_iter = integer(s, "solver", "max_iter", c.solver.max_iter);
    if (!(c.solver.tol > 0.0)) throw ConfigError("solver.tol: must be positive");
    if (max_iter < 1 || max_iter > 1000000)
      throw ConfigError("solver.max_iter: must be in [1, 1e6]");
    c.solver.max_iter = static_cast<int>(max_iter);

    const json& e = section(doc, "evolve", {"times"});
    if (e.contains("times")) {
      const json& t = e.at("times");
      if (!t.is_array()) throw ConfigError("evolve.times: expected an array");
      c.times.clear();
      for (const json& v : t) {
        if (!v.is_number() || !std::isfinite(v.get<double>()))
          throw ConfigError("evolve.times: expected finite numbers");
        c.times.push_back(v.get<double>());
      }
    }

    const json& est = section(doc, "estimates", {"jmax", "ensemble_size", "seed"});
    const long long jmax = integer(est, "estimates", "jmax", c.estimates.jmax);
    const long long ens =
        integer(est, "estimates", "ensemble_size", c.estimates.ensemble_size);
    if (jmax < 1 || jmax > 200) throw ConfigError("estimates.jmax: must be in [1, 200]");
    if (ens < 1 || ens > 100000)
      throw ConfigError("estimates.ensemble_size: must be in [1, 1e5]");
    c.estimates.jmax = static_cast<int>(jmax);
    c.estimates.ensemble_size = static_cast<int>(ens);
    c.estimates.seed = seed(est, "estimates", c.estimates.seed);

    const json& in = section(doc, "input", {"s12", "s21"});
    if (in.contains("s12")) c.s12_path = text(in, "input", "s12", "");
    if (in.contains("s21")) c.s21_path = text(in, "input", "s21", "");
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return c;
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open config: " + path.string());
  json doc;
  try {
    doc = json::parse(is);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return parse_config(doc);
}

} // namespace dbar
