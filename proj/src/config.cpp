#include "mdpf/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include "mdpf/errors.hpp"

namespace mdpf {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

enum class Range { Any, Positive, NonNegative };

double to_double(const std::string& key, const std::string& v, Range range) {
  double out = 0.0;
  const char* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || p != end || !std::isfinite(out)) {
    throw ConfigError(key + " expects a number, got '" + v + "'");
  }
  if (range == Range::Positive && !(out > 0.0)) throw ConfigError(key + " must be positive, got " + v);
  if (range == Range::NonNegative && !(out >= 0.0)) throw ConfigError(key + " must not be negative, got " + v);
  return out;
}

std::uint64_t to_uint(const std::string& key, const std::string& v, bool positive) {
  std::uint64_t out = 0;
  const char* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || p != end) throw ConfigError(key + " expects a non-negative integer, got '" + v + "'");
  if (positive && out == 0) throw ConfigError(key + " must be positive");
  return out;
}

struct KeySpec {
  std::string name;
  std::function<void(RunConfig&, const std::string& key, const std::string& value)> set;
  std::function<std::string(const RunConfig&)> get;
};

struct SectionSpec {
  std::string name;
  std::vector<KeySpec> keys;
};

using Access = std::function<double&(RunConfig&)>;

KeySpec real(std::string name, Access f, Range range) {
  return {name, [f, range](RunConfig& c, const std::string& k, const std::string& v) { f(c) = to_double(k, v, range); },
          [f](const RunConfig& c) { return fmt_double(f(const_cast<RunConfig&>(c))); }};
}

KeySpec count(std::string name, std::function<std::uint64_t&(RunConfig&)> f, bool positive) {
  return {name, [f, positive](RunConfig& c, const std::string& k, const std::string& v) { f(c) = to_uint(k, v, positive); },
          [f](const RunConfig& c) { return std::to_string(f(const_cast<RunConfig&>(c))); }};
}

KeySpec choice(std::string name, std::function<std::string&(RunConfig&)> f, std::vector<std::string> allowed) {
  return {name,
          [f, allowed](RunConfig& c, const std::string& k, const std::string& v) {
            if (allowed.empty()) {
              if (v.empty()) throw ConfigError(k + " must not be empty");
              f(c) = v;
              return;
            }
            for (const auto& a : allowed)
              if (a == v) {
                f(c) = v;
                return;
              }
            std::string list;
            for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
            throw ConfigError(k + " must be one of " + list + ", got '" + v + "'");
          },
          [f](const RunConfig& c) { return f(const_cast<RunConfig&>(c)); }};
}

KeySpec box_key() {
  return {"box",
          [](RunConfig& c, const std::string& k, const std::string& v) {
            std::istringstream in(v);
            std::string a, b, d, extra;
            if (!(in >> a >> b >> d) || (in >> extra)) throw ConfigError(k + " expects three lengths");
            c.system.box = {to_double(k, a, Range::Positive), to_double(k, b, Range::Positive),
                            to_double(k, d, Range::Positive)};
          },
          [](const RunConfig& c) {
            return fmt_double(c.system.box.x) + " " + fmt_double(c.system.box.y) + " " + fmt_double(c.system.box.z);
          }};
}

const std::vector<SectionSpec>& spec_table() {
  static const std::vector<SectionSpec> t = {
      {"system",
       {box_key(), real("density", [](RunConfig& c) -> double& { return c.system.density; }, Range::Positive),
        count("n_particles", [](RunConfig& c) -> std::uint64_t& { return c.system.n_particles; }, false),
        real("temperature", [](RunConfig& c) -> double& { return c.system.temperature; }, Range::NonNegative),
        real("melting_temperature", [](RunConfig& c) -> double& { return c.system.melting_temperature; },
             Range::Positive)}},
      {"potential",
       {real("A", [](RunConfig& c) -> double& { return c.potential.params.A; }, Range::Positive),
        real("B", [](RunConfig& c) -> double& { return c.potential.params.B; }, Range::Positive),
        real("C", [](RunConfig& c) -> double& { return c.potential.params.C; }, Range::NonNegative),
        real("r_cut", [](RunConfig& c) -> double& { return c.potential.params.r_cut; }, Range::Positive),
        real("r_min", [](RunConfig& c) -> double& { return c.potential.r_min; }, Range::Positive),
        count("table_nodes", [](RunConfig& c) -> std::uint64_t& { return c.potential.table_nodes; }, true),
        choice("kind", [](RunConfig& c) -> std::string& { return c.potential.kind; }, {"table", "analytic"})}},
      {"integration",
       {real("dt", [](RunConfig& c) -> double& { return c.integration.dt; }, Range::Positive),
        count("n_steps", [](RunConfig& c) -> std::uint64_t& { return c.integration.n_steps; }, false),
        count("sample_every", [](RunConfig& c) -> std::uint64_t& { return c.integration.sample_every; }, true),
        count("checkpoint_every", [](RunConfig& c) -> std::uint64_t& { return c.integration.checkpoint_every; },
              false),
        count("seed", [](RunConfig& c) -> std::uint64_t& { return c.integration.seed; }, false),
        real("k_B", [](RunConfig& c) -> double& { return c.integration.k_B; }, Range::Positive),
        real("T_high", [](RunConfig& c) -> double& { return c.integration.t_high; }, Range::NonNegative),
        count("melt_steps", [](RunConfig& c) -> std::uint64_t& { return c.integration.melt_steps; }, true),
        count("quench_steps", [](RunConfig& c) -> std::uint64_t& { return c.integration.quench_steps; }, false),
        count("check_every", [](RunConfig& c) -> std::uint64_t& { return c.integration.check_every; }, true)}},
      {"mollifier",
       {real("epsilon", [](RunConfig& c) -> double& { return c.mollifier.epsilon; }, Range::Positive),
        real("rc_factor", [](RunConfig& c) -> double& { return c.mollifier.rc_factor; }, Range::Positive),
        choice("normalization", [](RunConfig& c) -> std::string& { return c.mollifier.normalization; },
               {"density", "unit", "override"}),
        real("c_override", [](RunConfig& c) -> double& { return c.mollifier.c_override; }, Range::NonNegative)}},
      {"grid",
       {real("dx", [](RunConfig& c) -> double& { return c.grid.dx; }, Range::NonNegative),
        count("K", [](RunConfig& c) -> std::uint64_t& { return c.grid.K; }, false),
        real("origin", [](RunConfig& c) -> double& { return c.grid.origin; }, Range::Any)}},
      {"two_phase",
       {choice("orientation", [](RunConfig& c) -> std::string& { return c.two_phase.orientation; }, {"O1", "O2"}),
        real("void_width", [](RunConfig& c) -> double& { return c.two_phase.void_width; }, Range::NonNegative),
        real("solid_density", [](RunConfig& c) -> double& { return c.two_phase.solid_density; }, Range::Positive),
        real("liquid_density", [](RunConfig& c) -> double& { return c.two_phase.liquid_density; }, Range::Positive),
        real("min_distance", [](RunConfig& c) -> double& { return c.two_phase.min_distance; }, Range::Positive),
        real("liquid_min_ratio", [](RunConfig& c) -> double& { return c.two_phase.liquid_min_ratio; },
             Range::Positive)}},
      {"outputs",
       {choice("directory", [](RunConfig& c) -> std::string& { return c.outputs.directory; }, {}),
        choice("formats", [](RunConfig& c) -> std::string& { return c.outputs.formats; }, {"csv"})}},
  };
  return t;
}

}  // namespace

void ParsedConfig::require(const std::string& key) const {
  if (!has(key)) {
    const auto dot = key.find('.');
    throw ConfigError("missing required key [" + key.substr(0, dot) + "] " + key.substr(dot + 1));
  }
}

ParsedConfig parse_config(const std::string& text) {
  ParsedConfig out;
  RunConfig& c = out.config;
  const auto& tab = spec_table();
  const SectionSpec* section = nullptr;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string where = "line " + std::to_string(line_no) + ": ";
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + "malformed section header '" + line + "'");
      const std::string name = trim(line.substr(1, line.size() - 2));
      section = nullptr;
      for (const auto& s : tab)
        if (s.name == name) section = &s;
      if (!section) throw ConfigError(where + "unknown section [" + name + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected 'key = value', got '" + line + "'");
    if (!section) throw ConfigError(where + "key outside of any section");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const KeySpec* spec = nullptr;
    for (const auto& k : section->keys)
      if (k.name == key) spec = &k;
    if (!spec) throw ConfigError(where + "unknown key '" + key + "' in [" + section->name + "]");
    const std::string full = section->name + "." + key;
    if (!out.given.insert(full).second) throw ConfigError(where + "duplicate key '" + key + "' in [" + section->name + "]");
    try {
      spec->set(c, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }

  // derived defaults
  if (c.integration.t_high == 0.0) c.integration.t_high = 2.0 * c.system.melting_temperature;
  if (c.grid.K == 0 && c.grid.dx == 0.0) c.grid.dx = c.mollifier.epsilon / 4.0;
  if (c.two_phase.void_width == 0.0 && !out.has("two_phase.void_width")) {
    c.two_phase.void_width = std::cbrt(4.0 / c.two_phase.solid_density) / std::sqrt(2.0);
  }

  try {
    c.potential.params.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("[potential] ") + e.what());
  }
  if (!(c.potential.r_min < c.potential.params.r_cut)) throw ConfigError("[potential] r_min must be below r_cut");
  if (c.mollifier.normalization == "override" && !(c.mollifier.c_override > 0.0)) {
    throw ConfigError("[mollifier] normalization = override needs a positive c_override");
  }
  if (c.grid.K == 1) throw ConfigError("[grid] K must be at least 2");

  for (const auto& s : tab)
    for (const auto& k : s.keys) {
      const std::string full = s.name + "." + k.name;
      if (!out.has(full)) out.defaults.push_back(full + " = " + k.get(c));
    }
  return out;
}

ParsedConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const RunConfig& config) {
  std::string out;
  for (const auto& s : spec_table()) {
    out += "[" + s.name + "]\n";
    for (const auto& k : s.keys) out += k.name + " = " + k.get(config) + "\n";
    out += "\n";
  }
  return out;
}

}  // namespace mdpf
