#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mdpf/builder.hpp"
#include "mdpf/observables.hpp"

namespace mdpf {

/// Symmetrized dense copy 0.5 (B + B^T) of a band matrix.
Eigen::MatrixXd to_dense(const BandMatrix& band);

struct DropReport {
  std::size_t dropped = 0;         // eigenvalues < 0
  double most_negative = 0.0;      // 0 when nothing was dropped
  double dropped_mass = 0.0;       // sqrt of the sum of squared dropped eigenvalues
  std::size_t tiny_retained = 0;   // kept, but below 1e-12 * lambda_max
};

/// B = V+ Lambda+^(1/2) V+^T, the symmetric square root of the non-negative
/// part of the spectrum. Column j is the noise amplitude attached to grid
/// point j.
struct DiffusionFactor {
  Eigen::MatrixXd B;
  Eigen::VectorXd spectrum;   // all eigenvalues, ascending
  Eigen::VectorXd retained;   // Lambda+
  Eigen::MatrixXd vectors;    // V+
  DropReport report;
};

/// Throws NumericalError if the eigensolver does not converge.
DiffusionFactor factor_diffusion(const BandMatrix& band);
DiffusionFactor factor_diffusion(const Eigen::MatrixXd& matrix);

/// Strictly monotone stretch of a periodic profile. Positions are unwrapped
/// so that x increases along the run even if it crosses the periodic seam.
class MonotoneMap {
 public:
  MonotoneMap(Grid grid, std::size_t first_node, std::vector<double> x, std::vector<double> m,
              double lo, double hi);

  const Grid& grid() const { return grid_; }
  std::size_t first_node() const { return first_; }  // wrapped index of x().front()
  const std::vector<double>& x() const { return x_; }
  const std::vector<double>& m() const { return m_; }
  bool increasing() const { return m_.back() > m_.front(); }

  /// Usable range of the phase-field: [m_solid + delta, m_liquid - delta].
  double lo() const { return lo_; }
  double hi() const { return hi_; }

  /// Nodes strictly inside (lo, hi).
  std::size_t interior_nodes() const;

  /// Piecewise-linear interpolation of the stored table. x is taken on the
  /// unwrapped run; throws std::out_of_range outside it.
  double forward(double x) const;
  /// m_av^-1; throws std::out_of_range outside the tabulated values.
  double inverse(double m) const;

 private:
  Grid grid_;
  std::size_t first_;
  std::vector<double> x_;
  std::vector<double> m_;
  double lo_, hi_;
};

struct InterfaceOptions {
  /// Plateau levels; estimated from the profile when absent.
  std::optional<double> solid_level;
  std::optional<double> liquid_level;
  double delta_fraction = 0.05;  // margin as a fraction of the level gap
  double flat_fraction = 0.2;    // share of flattest points used for the levels
  std::size_t min_nodes = 3;
};

/// Plateau levels as medians of the flattest points below and above the
/// midpoint of the profile range. Returns (lower, upper).
std::pair<double, double> plateau_levels(std::span<const double> values, double flat_fraction = 0.2);

/// Every maximal strictly monotone run (periodic) whose values cover
/// [lower + delta, upper - delta]. Throws NumericalError("no interface ...")
/// when there is none.
std::vector<MonotoneMap> invert_profile(const Profile& m_av, const InterfaceOptions& options = {});

/// Uniform grid of n phase-field values over [map.lo(), map.hi()].
std::vector<double> field_grid(const MonotoneMap& map, std::size_t n);

/// Coefficients as functions of the phase-field: a(m) = abar(m_av^-1(m)),
/// b_j(m) = bbar_j(m_av^-1(m)).
struct FieldTables {
  std::vector<double> m;
  std::vector<double> x;           // m_av^-1(m), wrapped into the grid period
  std::vector<double> alpha;
  std::vector<double> diffusion;   // kT d2m
  std::vector<double> convection;  // da1
  std::vector<double> reaction;    // a0
  Eigen::MatrixXd b;               // rows follow m, columns are grid points j
  std::size_t clamped = 0;         // requested m values outside the map range
};

FieldTables map_to_field(const DriftTerms& drift, const DiffusionFactor* factor, const MonotoneMap& map,
                         std::span<const double> m_values);

/// Periodic linear interpolation of an x1-tabulated function.
std::vector<double> resample(const Grid& grid, std::span<const double> values, std::span<const double> x);

struct DoubleWell {
  std::vector<double> m;  // ascending
  std::vector<double> f_prime;
  std::vector<double> f;  // f(m.front()) = 0
  bool reaction_sign = false;
};

/// f'(m) = kT (d2m_av o m_av^-1)(m) so that the stationary profile is an
/// Allen-Cahn balance; with reaction_sign the opposite sign is used (f' equal to
/// the mean reaction term -kT d2m_av). f by the trapezoid rule from the
/// lower (solid) end.
DoubleWell extract_double_well(const Profile& m_av, const Profile& d2m_av, double kT, const MonotoneMap& map,
                               std::size_t n_points = 256, bool reaction_sign = false);

/// Two-level step at `center` smoothed by the truncated Gaussian, renormalized
/// for the truncation.
struct MollifiedStep {
  double m_lo = 0.0;
  double m_hi = 1.0;
  double epsilon = 1.0;
  double rc_factor = 6.0;
  double center = 0.0;
  bool rising = true;  // m_lo on the left

  double operator()(double x) const;
};

MollifiedStep mollified_step(std::pair<double, double> levels, const Mollifier& mollifier, double center = 0.0,
                             bool rising = true);

struct ScaleFitOptions {
  double m0 = 0.0;  // reference window m0 <= m <= m1
  double m1 = 0.0;
  /// Optional unwrapped x window; grid points outside it are ignored.
  std::optional<std::pair<double, double>> x_window;
};

struct ScaleFit {
  double c0 = 0.0;
  double c1 = 1.0;
  double residual = 0.0;  // rms
  std::size_t points = 0;
  bool converged = false;
};

/// Least squares for approx(c1 (x_k - c0) + c0) = reference(x_k) over the
/// window. Grid search over c1 in [0.2, 6] and c0 around the window centre,
/// then Levenberg-Marquardt.
ScaleFit affine_scale_fit(const Profile& reference, const Profile& approximant, const ScaleFitOptions& options);

/// Variance of a sequence about its mean.
double spatial_variance(std::span<const double> values);

/// Slope of log(variance) against log(T) by least squares. Needs three
/// windows or more and positive variances.
LineFit variance_decay_fit(const std::vector<std::pair<double, double>>& windows);

}  // namespace mdpf
