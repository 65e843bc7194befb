#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "mdpf/potential.hpp"
#include "mdpf/system.hpp"

namespace mdpf {

struct IntegratorParams {
  double dt = 1e-4;
  double temperature = 2.9;
  double k_B = 1.0;
  std::uint64_t seed = 0;
  std::uint64_t n_steps = 0;
  std::uint64_t sample_every = 1000;
  std::uint64_t checkpoint_every = 0;  // 0 disables periodic checkpoints

  void validate() const;
};

/// One Gaussian stream: a 64-bit Mersenne twister feeding a Box-Muller
/// transform. Draws are produced in pairs, so no transform state is carried
/// between calls and the engine state alone determines the future.
class NormalStream {
 public:
  NormalStream() = default;
  explicit NormalStream(std::uint64_t seed, std::uint64_t stream_index);

  /// Fills `out` with independent Normal(0, variance) draws. Throws
  /// std::domain_error for a negative variance.
  void fill(std::span<double> out, double variance);

  std::mt19937_64& engine() { return engine_; }
  const std::mt19937_64& engine() const { return engine_; }

  friend bool operator==(const NormalStream& a, const NormalStream& b) {
    return a.engine_ == b.engine_;
  }

 private:
  std::mt19937_64 engine_;
};

/// Convenience wrapper returning n draws.
std::vector<double> normal_increments(NormalStream& stream, std::size_t n, double variance);

/// Noise source for the integrator: particles are split into fixed blocks of
/// `block_size`, and block b draws from its own stream seeded from
/// seed_seq{seed_lo, seed_hi, b_lo, b_hi}. The decomposition depends only on
/// N, so trajectories do not depend on the worker count.
struct RngState {
  static constexpr const char* kGeneratorId = "mt19937_64-boxmuller-blocked";
  static constexpr std::size_t kDefaultBlockSize = 256;

  std::string generator = kGeneratorId;
  std::uint64_t seed = 0;
  std::uint64_t block_size = kDefaultBlockSize;
  std::uint64_t counter = 0;  // number of steps drawn so far
  std::vector<NormalStream> streams;

  static RngState create(std::uint64_t seed, std::size_t n_particles,
                         std::size_t block_size = kDefaultBlockSize);

  friend bool operator==(const RngState&, const RngState&) = default;
};

/// One Euler-Maruyama step of dX = F dt + sqrt(2 k_B T) dW with forces
/// evaluated at the pre-step configuration. Positions are wrapped and the
/// time stamp advanced by dt.
Configuration em_step(const Configuration& config, const ForceField& field,
                      const IntegratorParams& params, RngState& rng);

/// Restart data persisted alongside a configuration.
struct Checkpoint {
  Configuration config;
  RngState rng;
  std::uint64_t step = 0;
};

/// Checkpoint file: the snapshot block, then a `CHECKPOINT 1` section with
/// step, time and the RNG block (generator id, seed, block size, counter and
/// one hex-encoded engine state per stream), terminated by `END`.
inline constexpr int kCheckpointVersion = 1;
void write_checkpoint(std::ostream& out, const Checkpoint& cp);
void write_checkpoint(const std::string& path, const Checkpoint& cp);
/// Throws FormatError on truncation, field-count mismatch or an unsupported
/// version tag. Nothing is returned on failure.
Checkpoint read_checkpoint(std::istream& in);
Checkpoint read_checkpoint(const std::string& path);

/// Receivers for trajectory output.
struct TrajectorySinks {
  std::function<void(std::uint64_t step, const Configuration&)> on_sample;
  std::function<void(const Checkpoint&)> on_checkpoint;
};

/// Runs params.n_steps steps starting from `start`. Steps are numbered from
/// start.step + 1; a sample is emitted whenever the step number is a multiple
/// of sample_every and a checkpoint whenever it is a multiple of
/// checkpoint_every. On ModelBreakdown the last valid state is checkpointed
/// before the exception propagates.
template <PairPotential P>
Checkpoint run_trajectory(Checkpoint start, const IntegratorParams& params, const P& potential,
                          const TrajectorySinks& sinks = {}, int workers = 1);

/// Fresh trajectory state for a configuration: step 0 and a new RNG.
Checkpoint start_state(const Configuration& config, std::uint64_t seed);

}  // namespace mdpf
