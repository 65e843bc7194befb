#include "mdpf/dynamics.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "mdpf/errors.hpp"

namespace mdpf {

void IntegratorParams::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("dt must be positive");
  if (!(temperature >= 0.0)) throw ConfigError("temperature must be non-negative");
  if (!(k_B > 0.0)) throw ConfigError("k_B must be positive");
  if (sample_every < 1) throw ConfigError("sample_every must be at least 1");
}

NormalStream::NormalStream(std::uint64_t seed, std::uint64_t stream_index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream_index),
                    static_cast<std::uint32_t>(stream_index >> 32)};
  engine_.seed(seq);
}

void NormalStream::fill(std::span<double> out, double variance) {
  if (!(variance >= 0.0)) throw std::domain_error("normal increments: negative variance");
  const double sd = std::sqrt(variance);
  constexpr double kScale = 0x1.0p-53;
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  for (std::size_t k = 0; k < out.size(); k += 2) {
    const double u1 = 1.0 - static_cast<double>(engine_() >> 11) * kScale;  // (0, 1]
    const double u2 = static_cast<double>(engine_() >> 11) * kScale;        // [0, 1)
    const double radius = std::sqrt(-2.0 * std::log(u1));
    out[k] = sd * radius * std::cos(kTwoPi * u2);
    if (k + 1 < out.size()) out[k + 1] = sd * radius * std::sin(kTwoPi * u2);
  }
}

std::vector<double> normal_increments(NormalStream& stream, std::size_t n, double variance) {
  std::vector<double> out(n);
  stream.fill(out, variance);
  return out;
}

RngState RngState::create(std::uint64_t seed, std::size_t n_particles, std::size_t block_size) {
  if (block_size == 0) throw ConfigError("RNG block size must be positive");
  RngState s;
  s.seed = seed;
  s.block_size = block_size;
  const std::size_t n_blocks = (n_particles + block_size - 1) / block_size;
  s.streams.reserve(n_blocks);
  for (std::size_t b = 0; b < n_blocks; ++b) s.streams.emplace_back(seed, b);
  return s;
}

Configuration em_step(const Configuration& config, const ForceField& field,
                      const IntegratorParams& params, RngState& rng) {
  const std::size_t n = config.size();
  if (field.size() != n) throw std::invalid_argument("em_step: force field size mismatch");
  const std::size_t bs = rng.block_size;
  if (rng.streams.size() * bs < n) throw std::invalid_argument("em_step: RNG has too few streams");

  Configuration next;
  next.box = config.box;
  next.time = config.time + params.dt;
  next.positions.resize(n);
  const double amplitude = std::sqrt(2.0 * params.k_B * params.temperature);
  std::vector<double> dw(3 * bs);
  for (std::size_t b = 0; b * bs < n; ++b) {
    const std::size_t begin = b * bs;
    const std::size_t end = std::min(n, begin + bs);
    const std::span<double> noise(dw.data(), 3 * (end - begin));
    rng.streams[b].fill(noise, params.dt);
    for (std::size_t j = begin; j < end; ++j) {
      const double* w = &noise[3 * (j - begin)];
      const Vec3 step = field.forces[j] * params.dt + Vec3{w[0], w[1], w[2]} * amplitude;
      next.positions[j] = wrap(config.box, config.positions[j] + step);
    }
  }
  ++rng.counter;
  return next;
}

Checkpoint start_state(const Configuration& config, std::uint64_t seed) {
  Checkpoint cp;
  cp.config = config;
  cp.rng = RngState::create(seed, config.size());
  cp.step = 0;
  return cp;
}

namespace {

std::string engine_to_hex(const std::mt19937_64& engine) {
  std::ostringstream dec;
  dec << engine;
  std::istringstream words(dec.str());
  std::ostringstream hex;
  unsigned long long w = 0;
  bool first = true;
  while (words >> w) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx", w);
    if (!first) hex << ' ';
    hex << buf;
    first = false;
  }
  return hex.str();
}

// 312 state words plus the position index.
constexpr std::size_t kEngineWords = std::mt19937_64::state_size + 1;

std::mt19937_64 engine_from_hex(const std::string& line) {
  std::istringstream words(line);
  std::ostringstream dec;
  std::string tok;
  std::size_t count = 0;
  while (words >> tok) {
    if (tok.size() != 16 || tok.find_first_not_of("0123456789abcdef") != std::string::npos) {
      throw FormatError("checkpoint: malformed RNG state word '" + tok + "'");
    }
    dec << std::stoull(tok, nullptr, 16) << ' ';
    ++count;
  }
  if (count != kEngineWords) {
    throw FormatError("checkpoint: RNG state has " + std::to_string(count) + " words, expected " +
                      std::to_string(kEngineWords));
  }
  std::mt19937_64 engine;
  std::istringstream in(dec.str());
  in >> engine;
  if (!in) throw FormatError("checkpoint: RNG state rejected by engine");
  return engine;
}

std::string expect_line(std::istream& in, const char* what) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError(std::string("checkpoint: truncated before ") + what);
  return line;
}

}  // namespace

void write_checkpoint(std::ostream& out, const Checkpoint& cp) {
  write_snapshot(out, cp.config);
  char buf[64];
  out << "CHECKPOINT " << kCheckpointVersion << '\n';
  out << "step " << cp.step << '\n';
  std::snprintf(buf, sizeof buf, "%.17g", cp.config.time);
  out << "time " << buf << '\n';
  out << "RNG " << cp.rng.generator << ' ' << cp.rng.seed << ' ' << cp.rng.block_size << ' '
      << cp.rng.counter << ' ' << cp.rng.streams.size() << '\n';
  for (const auto& s : cp.rng.streams) out << engine_to_hex(s.engine()) << '\n';
  out << "END\n";
}

void write_checkpoint(const std::string& path, const Checkpoint& cp) {
  // Write-then-rename so an interrupted write never replaces a good checkpoint.
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw FormatError("cannot open " + tmp + " for writing");
    write_checkpoint(out, cp);
    if (!out) throw FormatError("write failed for " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) throw FormatError("cannot rename " + tmp);
}

Checkpoint read_checkpoint(std::istream& in) {
  Checkpoint cp;
  cp.config = read_snapshot(in);

  std::istringstream header(expect_line(in, "CHECKPOINT tag"));
  std::string tag;
  int version = 0;
  if (!(header >> tag >> version) || tag != "CHECKPOINT") {
    throw FormatError("checkpoint: missing CHECKPOINT tag");
  }
  if (version != kCheckpointVersion) {
    throw FormatError("checkpoint: unsupported version " + std::to_string(version));
  }

  std::string key;
  {
    std::istringstream ls(expect_line(in, "step"));
    if (!(ls >> key >> cp.step) || key != "step") throw FormatError("checkpoint: bad step line");
  }
  {
    std::istringstream ls(expect_line(in, "time"));
    if (!(ls >> key >> cp.config.time) || key != "time") throw FormatError("checkpoint: bad time line");
  }
  std::size_t n_streams = 0;
  {
    std::istringstream ls(expect_line(in, "RNG"));
    if (!(ls >> key >> cp.rng.generator >> cp.rng.seed >> cp.rng.block_size >> cp.rng.counter >>
          n_streams) ||
        key != "RNG") {
      throw FormatError("checkpoint: bad RNG header");
    }
  }
  if (cp.rng.generator != RngState::kGeneratorId) {
    throw FormatError("checkpoint: unsupported generator '" + cp.rng.generator + "'");
  }
  if (cp.rng.block_size == 0 || n_streams * cp.rng.block_size < cp.config.size() ||
      (n_streams > 0 && (n_streams - 1) * cp.rng.block_size >= cp.config.size())) {
    throw FormatError("checkpoint: RNG stream count inconsistent with particle count");
  }
  cp.rng.streams.resize(n_streams);
  for (std::size_t s = 0; s < n_streams; ++s) {
    cp.rng.streams[s].engine() = engine_from_hex(expect_line(in, "RNG state"));
  }
  if (expect_line(in, "END") != "END") throw FormatError("checkpoint: missing END marker");
  return cp;
}

Checkpoint read_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path);
  return read_checkpoint(in);
}

template <PairPotential P>
Checkpoint run_trajectory(Checkpoint state, const IntegratorParams& params, const P& potential,
                          const TrajectorySinks& sinks, int workers) {
  params.validate();
  // the state before the current one: the current configuration came out of
  // a step but its forces have not been evaluated yet
  Checkpoint previous = state;
  for (std::uint64_t k = 0; k < params.n_steps; ++k) {
    ForceField field;
    try {
      field = compute_forces(state.config, potential, workers);
    } catch (const ModelBreakdown&) {
      if (sinks.on_checkpoint) sinks.on_checkpoint(k == 0 ? state : previous);
      throw;
    }
    previous = state;
    state.config = em_step(state.config, field, params, state.rng);
    ++state.step;
    if (sinks.on_sample && state.step % params.sample_every == 0) {
      sinks.on_sample(state.step, state.config);
    }
    if (sinks.on_checkpoint && params.checkpoint_every > 0 &&
        state.step % params.checkpoint_every == 0) {
      sinks.on_checkpoint(state);
    }
  }
  return state;
}

template Checkpoint run_trajectory(Checkpoint, const IntegratorParams&, const PotentialTable&,
                                   const TrajectorySinks&, int);
template Checkpoint run_trajectory(Checkpoint, const IntegratorParams&, const ShiftedExp6&,
                                   const TrajectorySinks&, int);

}  // namespace mdpf
