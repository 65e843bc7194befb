#include "doctest.h"

#include <cmath>
#include <string>

#include "mdpf/config.hpp"
#include "mdpf/errors.hpp"

using namespace mdpf;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("empty text gives the reference setup") {
  const ParsedConfig p = parse_config("");
  const RunConfig& c = p.config;
  CHECK(c.potential.params.A == 3.84661e5);
  CHECK(c.potential.params.B == 11.4974);
  CHECK(c.potential.params.C == 3.9445);
  CHECK(c.potential.params.r_cut == 3.0);
  CHECK(c.system.melting_temperature == 2.9);
  CHECK(c.two_phase.solid_density == 1.296);
  CHECK(c.two_phase.liquid_density == 1.241);
  CHECK(c.integration.dt == 1e-4);
  CHECK(c.integration.t_high == 2 * 2.9);
  CHECK(c.mollifier.rc_factor == 6.0);
  CHECK(c.grid.dx == doctest::Approx(0.25));
  CHECK(c.two_phase.void_width == doctest::Approx(1.0295245).epsilon(1e-7));
  CHECK(p.given.empty());
  CHECK(!p.defaults.empty());
  bool listed = false;
  for (const auto& d : p.defaults) listed |= d.rfind("integration.dt = ", 0) == 0;
  CHECK(listed);
}

TEST_CASE("values and derived defaults") {
  const ParsedConfig p = parse_config(
      "# comment\n[mollifier]\nepsilon = 2   # wider\nnormalization = unit\n[system]\nbox = 20 7.5 7.5\n"
      "melting_temperature = 3.0\n[two_phase]\norientation = O2\nvoid_width = 0\n");
  CHECK(p.config.mollifier.epsilon == 2.0);
  CHECK(p.config.grid.dx == 0.5);
  CHECK(p.config.integration.t_high == 6.0);
  CHECK(p.config.system.box.y == 7.5);
  CHECK(p.config.two_phase.void_width == 0.0);  // given explicitly
  CHECK(p.has("mollifier.epsilon"));
  CHECK_FALSE(p.has("grid.dx"));
  CHECK_NOTHROW(p.require("system.box"));
  CHECK_THROWS_WITH_AS(p.require("grid.K"), "missing required key [grid] K", ConfigError);
  CHECK(parse_config("[grid]\nK = 64\n").config.grid.dx == 0.0);
}

TEST_CASE("errors name the key and line") {
  const std::string dt = error_of("[integration]\ndt = -1\n");
  CHECK(dt.find("line 2") != std::string::npos);
  CHECK(dt.find("dt") != std::string::npos);
  const std::string unk = error_of("[system]\ndensity = 1\n\nfoo = 3\n");
  CHECK(unk.find("line 4") != std::string::npos);
  CHECK(unk.find("foo") != std::string::npos);
  CHECK(error_of("[nope]\n").find("unknown section") != std::string::npos);
  CHECK(error_of("dt = 1\n").find("outside") != std::string::npos);
  CHECK(error_of("[system]\ndensity = 1\ndensity = 2\n").find("duplicate") != std::string::npos);
  CHECK(error_of("[system]\ndensity = abc\n") != "");
  CHECK(error_of("[system]\nbox = 1 2\n") != "");
  CHECK(error_of("[mollifier]\nnormalization = override\n").find("c_override") != std::string::npos);
  CHECK(error_of("[two_phase]\norientation = O7\n").find("O1") != std::string::npos);
  CHECK(error_of("[potential]\nr_min = 3.5\n") != "");
  CHECK(error_of("[potential]\nB = 0\n") != "");
  CHECK(error_of("[grid]\nK = 1\n") != "");
  CHECK(error_of("[integration]\nn_steps = -3\n") != "");
}

TEST_CASE("round trip") {
  RunConfig c = parse_config("[mollifier]\nepsilon = 0.45\n[integration]\nseed = 77\ndt = 3.3e-5\n").config;
  c.system.box = {1.0 / 3.0, 2.0, std::sqrt(2.0)};
  c.outputs.directory = "runs/a";
  const ParsedConfig back = parse_config(serialize_config(c));
  CHECK(back.config == c);
  CHECK(back.defaults.empty());
}

TEST_CASE("missing file") {
  CHECK_THROWS_AS(load_config("/nonexistent/cfg.ini"), ConfigError);
}
