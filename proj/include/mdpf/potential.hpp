#pragma once

#include <cstddef>
#include <vector>

namespace mdpf {

/// Exp-6 pair potential Phi(r) = A exp(-B r) - C / r^6 in reduced LJ units.
/// Defaults are the high-pressure argon parameters.
struct Exp6Params {
  double A = 3.84661e5;
  double B = 11.4974;
  double C = 3.9445;
  double r_cut = 3.0;

  void validate() const;
  friend bool operator==(const Exp6Params&, const Exp6Params&) = default;
};

/// Value and first two radial derivatives of a pair potential at one distance.
struct PairTerms {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

/// Unshifted analytic Exp-6 and its exact derivatives. Throws
/// std::domain_error for r <= 0.
PairTerms exp6_eval(double r, const Exp6Params& params);

/// Exp-6 with the value-and-slope shift that makes it vanish together with its
/// first derivative at r_cut:
///   Phi_s(r) = Phi(r) - Phi(r_cut) - (r - r_cut) Phi'(r_cut).
/// The second derivative is the unshifted one. Evaluated analytically; used
/// where interpolation noise would swamp finite-difference checks.
class ShiftedExp6 {
 public:
  explicit ShiftedExp6(const Exp6Params& params, double r_min = 0.5);

  /// Zero for r >= r_cut. r_min is only reported; force loops enforce it.
  PairTerms operator()(double r) const;

  double r_cut() const { return params_.r_cut; }
  double r_min() const { return r_min_; }
  const Exp6Params& params() const { return params_; }
  double shift_value() const { return shift_value_; }
  double shift_slope() const { return shift_slope_; }

 private:
  Exp6Params params_;
  double r_min_;
  double shift_value_;
  double shift_slope_;
};

/// Shifted Exp-6 tabulated on a uniform grid over [r_min, r_cut] and
/// evaluated by linear interpolation. Immutable after construction.
class PotentialTable {
 public:
  /// Throws ConfigError unless n_nodes >= 2 and 0 < r_min < r_cut.
  static PotentialTable build(const Exp6Params& params, double r_min = 0.5,
                              std::size_t n_nodes = 100000);

  /// Interpolated (Phi_s, Phi_s', Phi''). Returns zeros for r >= r_cut.
  /// Throws std::out_of_range for r < r_min: the model is not defined there.
  PairTerms operator()(double r) const;

  double r_min() const { return r_min_; }
  double r_cut() const { return r_cut_; }
  double spacing() const { return spacing_; }
  std::size_t size() const { return value_.size(); }
  double node_position(std::size_t k) const { return r_min_ + static_cast<double>(k) * spacing_; }
  double node_value(std::size_t k) const { return value_[k]; }
  double node_d1(std::size_t k) const { return d1_[k]; }
  double node_d2(std::size_t k) const { return d2_[k]; }
  const Exp6Params& params() const { return params_; }

 private:
  PotentialTable() = default;

  Exp6Params params_;
  double r_min_ = 0.0;
  double r_cut_ = 0.0;
  double spacing_ = 0.0;
  double inv_spacing_ = 0.0;
  std::vector<double> value_;
  std::vector<double> d1_;
  std::vector<double> d2_;
};

}  // namespace mdpf
