#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mdpf/stats.hpp"
#include "mdpf/system.hpp"

namespace mdpf {

struct MollifierValue {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

/// Truncated Gaussian eta(x1) = c exp(-x1^2 / (2 eps^2)) for |x1| < R_c,
/// R_c = rc_factor * eps, and zero outside.
struct Mollifier {
  enum class Normalization { Density, Unit, Override };

  double epsilon = 1.0;
  double rc_factor = 6.0;
  double c = 1.0;
  Normalization normalization = Normalization::Unit;

  /// c = 1 / (A eps sqrt(2 pi) erf(rc_factor / sqrt 2)): integrating eta over
  /// a slab of cross-section A gives one, so a mollified count is a number
  /// density.
  static Mollifier density(double epsilon, double rc_factor, double cross_section);
  static Mollifier with_constant(double epsilon, double rc_factor, double c);

  double cutoff() const { return rc_factor * epsilon; }
  void validate() const;
  std::string normalization_name() const;

  MollifierValue operator()(double x1) const;
};

/// eta and its first two derivatives; all three vanish for |x1| >= R_c.
MollifierValue mollifier_eval(const Mollifier& m, double x1);

/// K uniformly spaced points x_k = origin + k dx covering one period of
/// length K dx.
struct Grid {
  double origin = 0.0;
  double spacing = 1.0;
  std::size_t count = 0;

  static Grid periodic(double length, std::size_t count, double origin = 0.0);
  /// K = round(length / dx), then dx is adjusted so that K dx = length.
  static Grid with_spacing(double length, double dx, double origin = 0.0);

  double length() const { return spacing * static_cast<double>(count); }
  double x(std::size_t k) const { return origin + spacing * static_cast<double>(k); }
  std::vector<double> points() const;

  friend bool operator==(const Grid&, const Grid&) = default;
};

/// Linear interpolation of periodic grid values at an arbitrary x.
double interpolate_periodic(const Grid& grid, std::span<const double> values, double x);

/// Mean and pointwise sample variance of a field on the grid.
struct Profile {
  Grid grid;
  std::vector<double> mean;
  std::vector<double> variance;
  std::size_t n_samples = 0;
  double weight_sum = 0.0;

  static Profile single(const Grid& grid, std::vector<double> values);
  static Profile from_stats(const Grid& grid, const WeightedStats& stats);
};

class ProfileAccumulator {
 public:
  explicit ProfileAccumulator(const Grid& grid) : grid_(grid), stats_(grid.count) {}

  void add(std::span<const double> values, double weight = 1.0) { stats_.add(values, weight); }
  void merge(const ProfileAccumulator& other) { stats_.merge(other.stats_); }
  Profile profile() const { return Profile::from_stats(grid_, stats_); }
  const Grid& grid() const { return grid_; }

 private:
  Grid grid_;
  WeightedStats stats_;
};

/// m(x) = sum_j m_j eta(x - X_j), periodic images included.
Profile phase_field_profile(const Configuration& config, const ForceField& field, const Grid& grid,
                            const Mollifier& mollifier);

/// Same mollification with every weight m_j replaced by one.
Profile density_profile(const Configuration& config, const Grid& grid, const Mollifier& mollifier);

/// Per-configuration drift ingredients on the grid:
///   m, d2m = d^2 m / dx1^2,
///   a1 = sum_j (kT - m_j) [F_j]_1 eta(x - X_j) and its x1-derivative da1,
///   a0 = sum_j (kT G_j - |F_j|^2 / 2) eta(x - X_j)
///        - 1/2 sum_j sum_{i != j} (f_ij . F_j) eta(x - X_i),
///   alpha = kT d2m + da1 + a0.
struct DriftSample {
  std::vector<double> m;
  std::vector<double> d2m;
  std::vector<double> a1;
  std::vector<double> da1;
  std::vector<double> a0;
  std::vector<double> alpha;
};

DriftSample drift_sample(const Configuration& config, const ForceField& field,
                         const PairForces& pairs, const Grid& grid, const Mollifier& mollifier,
                         double kT);

/// Averaged drift terms. The composed total is always the pointwise sum of the
/// averaged parts; alpha_samples keeps the mean and variance of the
/// per-configuration totals.
struct DriftTerms {
  double kT = 0.0;
  Profile m;
  Profile d2m;
  Profile a1;
  Profile da1;
  Profile a0;
  Profile alpha_samples;

  const Grid& grid() const { return m.grid; }
  std::vector<double> diffusion_term() const;  // kT * mean d2m
  std::vector<double> alpha() const;           // diffusion + convection + reaction
};

class DriftAccumulator {
 public:
  DriftAccumulator(const Grid& grid, double kT);

  void add(const DriftSample& sample, double weight = 1.0);
  void merge(const DriftAccumulator& other);
  DriftTerms terms() const;
  std::size_t count() const { return m_.count(); }

 private:
  Grid grid_;
  double kT_;
  WeightedStats m_, d2m_, a1_, da1_, a0_, alpha_;
};

/// Convenience: drift terms of a single configuration.
DriftTerms drift_profiles(const Configuration& config, const ForceField& field,
                          const PairForces& pairs, const Grid& grid, const Mollifier& mollifier,
                          double kT);

/// Symmetric K x K matrix on a periodic grid stored by diagonals: row i holds
/// B(i, (i + d) mod K) for d = 0..bandwidth. Entries farther apart than the
/// bandwidth (in periodic index distance) are exactly zero. When
/// 2 * bandwidth + 1 > K the matrix is stored densely with bandwidth K - 1.
class BandMatrix {
 public:
  BandMatrix() = default;
  BandMatrix(std::size_t K, std::size_t bandwidth, double dx);

  std::size_t size() const { return K_; }
  std::size_t bandwidth() const { return w_; }
  double spacing() const { return dx_; }
  bool dense() const { return dense_; }

  double at(std::size_t i, std::size_t j) const;
  /// Adds v to B(i, j) and B(j, i) (once for i == j).
  void add_symmetric(std::size_t i, std::size_t j, double v);
  /// Raw storage: row i, diagonal offset d.
  double& diag(std::size_t i, std::size_t d) { return data_[i * (w_ + 1) + d]; }
  double diag(std::size_t i, std::size_t d) const { return data_[i * (w_ + 1) + d]; }
  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }

  /// Bandwidth covering grid points up to `reach` apart: ceil(reach / dx).
  static std::size_t required_bandwidth(double reach, double dx);

  /// Text format: header `K bandwidth dx`, then K rows of bandwidth + 1
  /// values B(i, (i + d) mod K) at %.17g.
  void write(std::ostream& out) const;
  static BandMatrix read(std::istream& in);

 private:
  std::size_t K_ = 0;
  std::size_t w_ = 0;
  double dx_ = 0.0;
  bool dense_ = false;
  std::vector<double> data_;
};

/// One configuration's diffusion kernel 2 kT sum_j (p_j + q_j) on the grid.
/// `r_cut` is the pair cutoff, which together with R_c bounds the band.
BandMatrix diffusion_kernel(const Configuration& config, const ForceField& field,
                            const PairForces& pairs, const Grid& grid, const Mollifier& mollifier,
                            double kT, double r_cut);

/// Weighted mean of per-configuration kernels with compensated summation.
class BandAccumulator {
 public:
  BandAccumulator(const Grid& grid, double r_cut, const Mollifier& mollifier);

  void add(const BandMatrix& sample, double weight = 1.0);
  BandMatrix mean() const;
  std::size_t count() const { return count_; }
  double weight_sum() const { return weight_; }
  const Grid& grid() const { return grid_; }
  double r_cut() const { return r_cut_; }
  std::size_t bandwidth() const { return bandwidth_; }

 private:
  Grid grid_;
  double r_cut_;
  std::size_t bandwidth_;
  CompensatedSum sum_;
  double weight_ = 0.0;
  std::size_t count_ = 0;
};

/// Adds one configuration's kernel to the accumulator.
void diffusion_kernel_accumulate(const Configuration& config, const ForceField& field,
                                 const PairForces& pairs, const Grid& grid,
                                 const Mollifier& mollifier, double kT, BandAccumulator& acc,
                                 double weight = 1.0);

struct RdfOptions {
  std::size_t bins = 100;
  double r_max = 3.0;
  /// Reference particles restricted to lo <= x1 < hi; partners unrestricted.
  std::optional<std::pair<double, double>> slab;
};

struct RdfResult {
  std::vector<double> r;  // bin centres
  std::vector<double> g;
  double bin_width = 0.0;
};

/// g(r_b) = <pairs in shell b> / (N_ref rho V_shell) over all configurations.
/// Throws ConfigError when r_max exceeds half the smallest box length.
RdfResult rdf(std::span<const Configuration> configs, const RdfOptions& options);

}  // namespace mdpf
