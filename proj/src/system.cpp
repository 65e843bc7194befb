#include "mdpf/system.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "mdpf/errors.hpp"
#include "mdpf/parallel.hpp"

namespace mdpf {

void SimBox::validate() const {
  for (int d = 0; d < 3; ++d) {
    if (!(lengths[d] > 0.0) || !std::isfinite(lengths[d])) {
      throw ConfigError("box lengths must be positive and finite");
    }
  }
}

double wrap_1d(double x, double length) {
  double w = x - length * std::floor(x / length);
  // x slightly below zero can round up to exactly `length`.
  if (w >= length) w = 0.0;
  return w;
}

Vec3 wrap(const SimBox& box, const Vec3& p) {
  return {wrap_1d(p.x, box.lengths.x), wrap_1d(p.y, box.lengths.y), wrap_1d(p.z, box.lengths.z)};
}

void Configuration::wrap_all() {
  for (auto& p : positions) p = wrap(box, p);
}

void Configuration::validate() const {
  box.validate();
  if (positions.empty()) throw ConfigError("configuration has no particles");
  for (std::size_t j = 0; j < positions.size(); ++j) {
    for (int d = 0; d < 3; ++d) {
      const double x = positions[j][d];
      if (!(x >= 0.0 && x < box.lengths[d])) {
        throw ConfigError("particle " + std::to_string(j) + " lies outside the box");
      }
    }
  }
}

namespace {

void put_line(std::ostream& out, double a, double b, double c) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g\n", a, b, c);
  out << buf;
}

bool next_data_line(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
  }
  return false;
}

}  // namespace

void write_snapshot(std::ostream& out, const Configuration& config) {
  out << config.size() << '\n';
  put_line(out, config.box.lengths.x, config.box.lengths.y, config.box.lengths.z);
  for (const auto& p : config.positions) put_line(out, p.x, p.y, p.z);
}

void write_snapshot(const std::string& path, const Configuration& config) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot open " + path + " for writing");
  write_snapshot(out, config);
  if (!out) throw FormatError("write failed for " + path);
}

Configuration read_snapshot(std::istream& in) {
  std::string line;
  if (!next_data_line(in, line)) throw FormatError("snapshot: missing particle count");
  std::size_t n = 0;
  {
    std::istringstream ls(line);
    long long count = -1;
    std::string extra;
    if (!(ls >> count) || count < 1 || (ls >> extra)) {
      throw FormatError("snapshot: invalid particle count line '" + line + "'");
    }
    n = static_cast<std::size_t>(count);
  }
  Configuration config;
  auto read_triple = [&](const char* what) {
    if (!next_data_line(in, line)) throw FormatError(std::string("snapshot: truncated at ") + what);
    std::istringstream ls(line);
    Vec3 v;
    std::string extra;
    if (!(ls >> v.x >> v.y >> v.z) || (ls >> extra)) {
      throw FormatError(std::string("snapshot: expected three numbers for ") + what + ", got '" +
                        line + "'");
    }
    return v;
  };
  config.box.lengths = read_triple("box lengths");
  config.box.validate();
  config.positions.reserve(n);
  for (std::size_t j = 0; j < n; ++j) config.positions.push_back(read_triple("positions"));
  return config;
}

Configuration read_snapshot(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path);
  return read_snapshot(in);
}

CellList CellList::build(const Configuration& config, double r_interact) {
  if (!(r_interact > 0.0)) throw ConfigError("cell list interaction radius must be positive");
  CellList cl;
  Vec3 edge;
  for (int d = 0; d < 3; ++d) {
    const double L = config.box.lengths[d];
    cl.dims_[d] = std::max(1, static_cast<int>(std::floor(L / r_interact)));
    edge[d] = L / cl.dims_[d];
  }
  const std::size_t n_cells =
      static_cast<std::size_t>(cl.dims_[0]) * cl.dims_[1] * static_cast<std::size_t>(cl.dims_[2]);
  auto flat = [&](int a, int b, int c) {
    return (static_cast<std::size_t>(a) * cl.dims_[1] + b) * cl.dims_[2] + c;
  };

  const std::size_t n = config.size();
  cl.particle_cell_.resize(n);
  std::vector<std::size_t> counts(n_cells + 1, 0);
  for (std::size_t j = 0; j < n; ++j) {
    int idx[3];
    for (int d = 0; d < 3; ++d) {
      const double x = wrap_1d(config.positions[j][d], config.box.lengths[d]);
      idx[d] = std::clamp(static_cast<int>(x / edge[d]), 0, cl.dims_[d] - 1);
    }
    const std::size_t c = flat(idx[0], idx[1], idx[2]);
    cl.particle_cell_[j] = c;
    ++counts[c + 1];
  }
  cl.cell_start_.assign(n_cells + 1, 0);
  for (std::size_t c = 0; c < n_cells; ++c) cl.cell_start_[c + 1] = cl.cell_start_[c] + counts[c + 1];
  cl.cell_particles_.resize(n);
  std::vector<std::size_t> fill(cl.cell_start_.begin(), cl.cell_start_.end() - 1);
  for (std::size_t j = 0; j < n; ++j) cl.cell_particles_[fill[cl.particle_cell_[j]]++] = j;

  auto neighbor_indices = [](int c, int dim) {
    std::vector<int> out;
    for (int off : {-1, 0, 1}) {
      const int v = ((c + off) % dim + dim) % dim;
      if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
    }
    return out;
  };
  cl.neighbor_start_.assign(1, 0);
  for (int a = 0; a < cl.dims_[0]; ++a) {
    const auto na = neighbor_indices(a, cl.dims_[0]);
    for (int b = 0; b < cl.dims_[1]; ++b) {
      const auto nb = neighbor_indices(b, cl.dims_[1]);
      for (int c = 0; c < cl.dims_[2]; ++c) {
        const auto nc = neighbor_indices(c, cl.dims_[2]);
        for (int x : na)
          for (int y : nb)
            for (int z : nc) cl.neighbors_.push_back(flat(x, y, z));
        cl.neighbor_start_.push_back(cl.neighbors_.size());
      }
    }
  }
  return cl;
}

std::vector<std::pair<std::size_t, std::size_t>> CellList::candidate_pairs() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t j = 0; j < particle_cell_.size(); ++j) {
    for_each_candidate(j, [&](std::size_t i) {
      if (i < j) out.emplace_back(i, j);
    });
  }
  std::sort(out.begin(), out.end());
  return out;
}

double ForceField::total_energy() const {
  double s = 0.0;
  for (double e : energy) s += e;
  return s;
}

namespace {

void check_box(const SimBox& box, double r_cut) {
  box.validate();
  for (int d = 0; d < 3; ++d) {
    if (!(box.lengths[d] > 2.0 * r_cut)) {
      throw ConfigError("box length " + std::to_string(box.lengths[d]) +
                        " must exceed twice the cutoff " + std::to_string(r_cut));
    }
  }
}

struct LocalPairs {
  std::vector<std::size_t> counts;
  std::vector<std::size_t> neighbor;
  std::vector<Vec3> force;
};

// Accumulates the contribution of neighbour i to particle j.
template <PairPotential P>
inline void add_pair(const Configuration& config, const P& pot, double rc2, double rmin,
                     std::size_t j, std::size_t i, Vec3& F, double& m, double& G,
                     LocalPairs* local) {
  const Vec3 d = min_image(config.box, config.positions[i] - config.positions[j]);
  const double r2 = norm2(d);
  if (r2 >= rc2) return;
  const double r = std::sqrt(r2);
  if (r < rmin) throw ModelBreakdown(std::min(i, j), std::max(i, j), r);
  const PairTerms t = pot(r);
  const Vec3 f = d * (t.d1 / r);
  F += f;
  m += 0.5 * t.value;
  G += t.d2 + 2.0 * t.d1 / r;
  if (local) {
    local->neighbor.push_back(i);
    local->force.push_back(f);
    ++local->counts.back();
  }
}

ForceField allocate(std::size_t n) {
  ForceField ff;
  ff.forces.assign(n, Vec3{});
  ff.energy.assign(n, 0.0);
  ff.divergence.assign(n, 0.0);
  return ff;
}

void merge_pairs(std::vector<LocalPairs>& locals, std::size_t n, PairForces& pairs) {
  pairs.offsets.assign(1, 0);
  pairs.offsets.reserve(n + 1);
  pairs.neighbor.clear();
  pairs.force.clear();
  for (auto& lp : locals) {
    for (std::size_t c : lp.counts) pairs.offsets.push_back(pairs.offsets.back() + c);
    pairs.neighbor.insert(pairs.neighbor.end(), lp.neighbor.begin(), lp.neighbor.end());
    pairs.force.insert(pairs.force.end(), lp.force.begin(), lp.force.end());
  }
}

}  // namespace

template <PairPotential P>
ForceField compute_forces(const Configuration& config, const P& potential, int workers,
                          PairForces* pairs) {
  const double rc = potential.r_cut();
  check_box(config.box, rc);
  const std::size_t n = config.size();
  const CellList cells = CellList::build(config, rc);
  ForceField ff = allocate(n);
  const double rc2 = rc * rc;
  const double rmin = potential.r_min();
  const int w = std::max(1, workers);
  std::vector<LocalPairs> locals(static_cast<std::size_t>(w));

  parallel_chunks(n, w, [&](std::size_t begin, std::size_t end, std::size_t chunk) {
    LocalPairs* local = pairs ? &locals[chunk] : nullptr;
    for (std::size_t j = begin; j < end; ++j) {
      Vec3 F;
      double m = 0.0;
      double G = 0.0;
      if (local) local->counts.push_back(0);
      cells.for_each_candidate(
          j, [&](std::size_t i) { add_pair(config, potential, rc2, rmin, j, i, F, m, G, local); });
      ff.forces[j] = F;
      ff.energy[j] = m;
      ff.divergence[j] = G;
    }
  });
  if (pairs) merge_pairs(locals, n, *pairs);
  return ff;
}

template <PairPotential P>
ForceField brute_force_reference(const Configuration& config, const P& potential,
                                 PairForces* pairs) {
  const double rc = potential.r_cut();
  check_box(config.box, rc);
  const std::size_t n = config.size();
  ForceField ff = allocate(n);
  std::vector<LocalPairs> locals(1);
  LocalPairs* local = pairs ? &locals[0] : nullptr;
  for (std::size_t j = 0; j < n; ++j) {
    Vec3 F;
    double m = 0.0;
    double G = 0.0;
    if (local) local->counts.push_back(0);
    for (std::size_t i = 0; i < n; ++i) {
      if (i != j) add_pair(config, potential, rc * rc, potential.r_min(), j, i, F, m, G, local);
    }
    ff.forces[j] = F;
    ff.energy[j] = m;
    ff.divergence[j] = G;
  }
  if (pairs) merge_pairs(locals, n, *pairs);
  return ff;
}

template <PairPotential P>
double total_potential_energy(const Configuration& config, const P& potential) {
  const double rc = potential.r_cut();
  double u = 0.0;
  for (std::size_t i = 0; i < config.size(); ++i) {
    for (std::size_t k = i + 1; k < config.size(); ++k) {
      const double r = norm(min_image(config.box, config.positions[k] - config.positions[i]));
      if (r < rc) u += potential(r).value;
    }
  }
  return u;
}

template ForceField compute_forces(const Configuration&, const PotentialTable&, int, PairForces*);
template ForceField compute_forces(const Configuration&, const ShiftedExp6&, int, PairForces*);
template ForceField brute_force_reference(const Configuration&, const PotentialTable&, PairForces*);
template ForceField brute_force_reference(const Configuration&, const ShiftedExp6&, PairForces*);
template double total_potential_energy(const Configuration&, const PotentialTable&);
template double total_potential_energy(const Configuration&, const ShiftedExp6&);

}  // namespace mdpf
