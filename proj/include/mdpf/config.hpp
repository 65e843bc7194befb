#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "mdpf/potential.hpp"
#include "mdpf/vec3.hpp"

namespace mdpf {

struct SystemSection {
  Vec3 box{10.0, 10.0, 10.0};
  double density = 1.269;
  std::uint64_t n_particles = 0;  // 0: derived from box and density
  double temperature = 2.9;
  double melting_temperature = 2.9;
  friend bool operator==(const SystemSection&, const SystemSection&) = default;
};

struct PotentialSection {
  Exp6Params params;
  double r_min = 0.5;
  std::uint64_t table_nodes = 100000;
  std::string kind = "table";  // table | analytic
  friend bool operator==(const PotentialSection&, const PotentialSection&) = default;
};

struct IntegrationSection {
  double dt = 1e-4;
  std::uint64_t n_steps = 1000;
  std::uint64_t sample_every = 1000;
  std::uint64_t checkpoint_every = 0;
  std::uint64_t seed = 1;
  double k_B = 1.0;
  double t_high = 0.0;  // 0: twice the melting temperature
  std::uint64_t melt_steps = 200000;
  std::uint64_t quench_steps = 20000;
  std::uint64_t check_every = 1000;
  friend bool operator==(const IntegrationSection&, const IntegrationSection&) = default;
};

struct MollifierSection {
  double epsilon = 1.0;
  double rc_factor = 6.0;
  std::string normalization = "density";  // density | unit | override
  double c_override = 0.0;
  friend bool operator==(const MollifierSection&, const MollifierSection&) = default;
};

struct GridSection {
  double dx = 0.0;  // 0: epsilon / 4
  std::uint64_t K = 0;  // when set, wins over dx
  double origin = 0.0;
  friend bool operator==(const GridSection&, const GridSection&) = default;
};

struct TwoPhaseSection {
  std::string orientation = "O1";
  double void_width = 0.0;  // 0: nearest-neighbour distance at solid_density
  double solid_density = 1.296;
  double liquid_density = 1.241;
  double min_distance = 0.8;
  double liquid_min_ratio = 0.25;
  friend bool operator==(const TwoPhaseSection&, const TwoPhaseSection&) = default;
};

struct OutputsSection {
  std::string directory = "out";
  std::string formats = "csv";
  friend bool operator==(const OutputsSection&, const OutputsSection&) = default;
};

struct RunConfig {
  SystemSection system;
  PotentialSection potential;
  IntegrationSection integration;
  MollifierSection mollifier;
  GridSection grid;
  TwoPhaseSection two_phase;
  OutputsSection outputs;
  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

struct ParsedConfig {
  RunConfig config;
  std::set<std::string> given;          // "section.key" present in the text
  std::vector<std::string> defaults;    // "section.key = value" for every default applied

  bool has(const std::string& key) const { return given.count(key) != 0; }
  /// Throws ConfigError("missing required key ...") when absent.
  void require(const std::string& key) const;
};

/// `[section]` headers and `key = value` lines; `#` starts a comment.
/// Throws ConfigError naming the line for unknown sections or keys,
/// duplicates, malformed or out-of-range values. Derived defaults (T_high,
/// dx, void width) are resolved here.
ParsedConfig parse_config(const std::string& text);
ParsedConfig load_config(const std::string& path);

/// Every key written explicitly; parse_config(serialize_config(c)).config == c.
std::string serialize_config(const RunConfig& config);

}  // namespace mdpf
