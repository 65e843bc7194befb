#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mdpf/dynamics.hpp"
#include "mdpf/observables.hpp"
#include "mdpf/system.hpp"

namespace mdpf {

/// Crystal orientation relative to the box. O1 puts a {100} plane normal to
/// x1, O2 a {111} plane.
struct Orientation {
  enum class Tag { O1, O2 };

  Tag tag = Tag::O1;
  /// Rows are the box axes expressed in cubic-lattice coordinates.
  std::array<Vec3, 3> rotation{};
  /// Orthogonal repeat cell along the box axes, in units of the cubic
  /// lattice constant a.
  Vec3 repeat{};
  /// Atoms in one repeat cell.
  std::size_t atoms_per_repeat = 0;

  static Orientation make(Tag tag);
  static Orientation parse(const std::string& name);  // "O1" or "O2"
  std::string name() const;

  /// Distance between adjacent atom layers along x1, in units of the nearest
  /// neighbour distance r0: sqrt(1/2) for O1, sqrt(2/3) for O2.
  double layer_spacing_factor() const;
};

/// Cubic lattice constant a = (4 / rho)^(1/3) and nearest-neighbour distance
/// r0 = a / sqrt(2) of an FCC lattice at number density rho.
double fcc_lattice_constant(double density);
double fcc_nearest_neighbor(double density);

/// Perfect FCC lattice at `density`, rotated per `orientation`, in the
/// commensurate box nearest to `box_hint`. Throws ConfigError when some
/// dimension cannot be matched within 5%.
Configuration build_fcc(const Orientation& orientation, const SimBox& box_hint, double density);

/// Removes floor(N (1 - target/current)) particles chosen uniformly at random
/// with the given seed.
Configuration dilute_to_density(const Configuration& config, double target_density,
                                std::uint64_t seed);

/// Liquid signature of a g(r) curve.
struct LiquidCheck {
  double first_peak_r = 0.0;
  double first_peak_g = 0.0;
  double first_min_r = 0.0;
  double first_min_g = 0.0;
  int second_shell_peaks = 0;  // maxima between the first minimum and 2.25 peak radii
  bool liquid = false;
};

/// A curve counts as liquid when the first minimum reaches `min_ratio` of the
/// first peak height and the second shell shows a single peak.
LiquidCheck assess_liquid(const RdfResult& rdf, double min_ratio = 0.25);

struct MeltQuenchParams {
  IntegratorParams melt;    // temperature = T_high, n_steps = step budget
  IntegratorParams quench;  // temperature = T_target, n_steps = re-equilibration length
  std::uint64_t check_every = 1000;
  double min_ratio = 0.25;
  std::size_t rdf_bins = 120;
  double rdf_r_max = 3.0;
};

struct MeltQuenchResult {
  Configuration config;
  std::uint64_t melt_steps = 0;
  LiquidCheck melted;
};

/// Runs at the high temperature until assess_liquid accepts the current
/// configuration, then re-equilibrates at the target temperature. Throws
/// ConfigError unless T_high > T_target, and NumericalError carrying the last
/// g(r) summary when the step budget runs out.
template <PairPotential P>
MeltQuenchResult melt_quench(const Configuration& config, const P& potential,
                             const MeltQuenchParams& params, int workers = 1);

struct TwoPhaseResult {
  Configuration config;
  double solid_factor = 1.0;   // x1 compression applied to the solid slab
  double liquid_factor = 1.0;  // x1 compression applied to the liquid slab
  double min_distance = 0.0;   // smallest pair distance across the interfaces
  std::size_t solid_count = 0;
};

/// Compresses each slab along x1 by (L - void_width) / L and places them side
/// by side with half a void at both interfaces of the periodic sandwich:
/// solid in [w/2, L_s - w/2), liquid in [L_s + w/2, L_s + L_l - w/2). The
/// total box length is L_s + L_l. Throws ConfigError when the cross-sections
/// differ or when a cross-interface pair ends up closer than `min_allowed`.
TwoPhaseResult assemble_two_phase(const Configuration& solid, const Configuration& liquid,
                                  double void_width, double min_allowed = 0.8);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double at(double t) const { return intercept + slope * t; }
};

/// Ordinary least squares; throws NumericalError for fewer than two points or
/// identical abscissae.
LineFit least_squares_line(const std::vector<std::pair<double, double>>& points);

struct CoexistenceFit {
  LineFit solid;
  LineFit liquid;
  double temperature = 0.0;
  double solid_va = 0.0;
  double liquid_va = 0.0;
  double solid_density = 0.0;
  double liquid_density = 0.0;
  double combined_va = 0.0;  // 2 / (rho_s + rho_l)
  double combined_density = 0.0;
};

/// Extrapolates volume per atom of each phase to `temperature` along
/// least-squares lines through (T, Va) points.
CoexistenceFit meltpoint_fit(const std::vector<std::pair<double, double>>& solid,
                             const std::vector<std::pair<double, double>>& liquid,
                             double temperature);

}  // namespace mdpf
