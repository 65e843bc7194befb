#pragma once

#include <array>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "mdpf/potential.hpp"
#include "mdpf/vec3.hpp"

namespace mdpf {

/// Rectangular cell, periodic in all three directions.
struct SimBox {
  Vec3 lengths{1.0, 1.0, 1.0};

  double volume() const { return lengths.x * lengths.y * lengths.z; }
  double cross_section() const { return lengths.y * lengths.z; }
  void validate() const;

  friend bool operator==(const SimBox&, const SimBox&) = default;
};

/// Maps each component of d into [-L/2, L/2). Differences of wrapped
/// coordinates take the branch; anything else goes through floor.
inline double min_image_1d(double d, double length) {
  const double h = 0.5 * length;
  if (d >= -3.0 * h && d < 3.0 * h) {
    if (d >= h) return d - length;
    if (d < -h) return d + length;
    return d;
  }
  return d - length * std::floor(d / length + 0.5);
}
inline Vec3 min_image(const SimBox& box, const Vec3& d) {
  return {min_image_1d(d.x, box.lengths.x), min_image_1d(d.y, box.lengths.y), min_image_1d(d.z, box.lengths.z)};
}

/// Maps a coordinate into [0, length).
double wrap_1d(double x, double length);
Vec3 wrap(const SimBox& box, const Vec3& p);

/// One snapshot of the particle positions.
struct Configuration {
  SimBox box;
  std::vector<Vec3> positions;
  double time = 0.0;

  std::size_t size() const { return positions.size(); }
  double density() const { return static_cast<double>(positions.size()) / box.volume(); }

  /// Wraps every coordinate into the box.
  void wrap_all();
  /// Throws ConfigError unless N >= 1, the box is valid and every coordinate
  /// lies in [0, L).
  void validate() const;
};

/// Snapshot text format: `N`, `L1 L2 L3`, then N lines `x y z` at %.17g.
void write_snapshot(std::ostream& out, const Configuration& config);
void write_snapshot(const std::string& path, const Configuration& config);
/// Reads exactly one snapshot block; throws FormatError on malformed input.
Configuration read_snapshot(std::istream& in);
Configuration read_snapshot(const std::string& path);

/// Uniform grid of sub-cells with edges >= r_interact. A dimension with fewer
/// than three cells still works: the neighbour scan deduplicates wrapped
/// cells, and a dimension with a single cell degenerates to an all-pairs scan
/// along it.
class CellList {
 public:
  static CellList build(const Configuration& config, double r_interact);

  const std::array<int, 3>& dims() const { return dims_; }
  std::size_t n_cells() const { return cell_start_.size() - 1; }
  std::size_t cell_of(std::size_t particle) const { return particle_cell_[particle]; }
  /// True when every dimension collapsed to one cell.
  bool all_pairs() const { return dims_[0] == 1 && dims_[1] == 1 && dims_[2] == 1; }

  /// Calls fn(i) for every particle i != j in the neighbourhood of j's cell,
  /// visiting neighbour cells in a fixed order and particles within a cell in
  /// ascending index order.
  template <class Fn>
  void for_each_candidate(std::size_t j, Fn&& fn) const {
    const std::size_t c = particle_cell_[j];
    for (std::size_t n = neighbor_start_[c]; n < neighbor_start_[c + 1]; ++n) {
      const std::size_t nc = neighbors_[n];
      for (std::size_t k = cell_start_[nc]; k < cell_start_[nc + 1]; ++k) {
        const std::size_t i = cell_particles_[k];
        if (i != j) fn(i);
      }
    }
  }

  /// Unique unordered candidate pairs (i < j).
  std::vector<std::pair<std::size_t, std::size_t>> candidate_pairs() const;

 private:
  std::array<int, 3> dims_{1, 1, 1};
  std::vector<std::size_t> particle_cell_;
  std::vector<std::size_t> cell_start_;
  std::vector<std::size_t> cell_particles_;
  std::vector<std::size_t> neighbor_start_;
  std::vector<std::size_t> neighbors_;
};

/// Per-particle results of one force evaluation.
struct ForceField {
  std::vector<Vec3> forces;        // F_j = -grad_j U
  std::vector<double> energy;      // m_j = 1/2 sum_i Phi(r_ij)
  std::vector<double> divergence;  // G_j = sum_i [Phi''(r_ij) + 2 Phi'(r_ij) / r_ij]

  std::size_t size() const { return forces.size(); }
  double total_energy() const;
};

/// Pair forces f_ij = Phi'(r_ij) (X_i - X_j) / r_ij in CSR layout: for
/// particle j, entries offsets[j] .. offsets[j+1] list neighbours i within the
/// cutoff in the same order used to accumulate F_j.
struct PairForces {
  std::vector<std::size_t> offsets;
  std::vector<std::size_t> neighbor;
  std::vector<Vec3> force;
};

template <class P>
concept PairPotential = requires(const P& p, double r) {
  { p(r) } -> std::convertible_to<PairTerms>;
  { p.r_cut() } -> std::convertible_to<double>;
  { p.r_min() } -> std::convertible_to<double>;
};

/// Cell-list force evaluation. Each particle's sums are accumulated in a fixed
/// order that does not depend on `workers`, so results are bitwise identical
/// for any worker count. Throws ModelBreakdown if a pair is closer than
/// r_min, and ConfigError if a box length is not larger than 2 r_cut.
template <PairPotential P>
ForceField compute_forces(const Configuration& config, const P& potential, int workers = 1,
                          PairForces* pairs = nullptr);

/// O(N^2) evaluation with the same contract; the test oracle for
/// compute_forces.
template <PairPotential P>
ForceField brute_force_reference(const Configuration& config, const P& potential,
                                 PairForces* pairs = nullptr);

/// Total potential energy by direct summation over unordered pairs.
template <PairPotential P>
double total_potential_energy(const Configuration& config, const P& potential);

}  // namespace mdpf
