#include "mdpf/builder.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <limits>
#include <sstream>
#include <tuple>

#include "mdpf/errors.hpp"
#include "mdpf/potential.hpp"

namespace mdpf {

Orientation Orientation::make(Tag tag) {
  Orientation o;
  o.tag = tag;
  if (tag == Tag::O1) {
    o.rotation = {Vec3{1, 0, 0}, Vec3{0, 1, 0}, Vec3{0, 0, 1}};
    o.repeat = {1.0, 1.0, 1.0};
    o.atoms_per_repeat = 4;
  } else {
    const double s3 = std::sqrt(3.0), s2 = std::sqrt(2.0), s6 = std::sqrt(6.0);
    o.rotation = {Vec3{1 / s3, 1 / s3, 1 / s3}, Vec3{1 / s2, -1 / s2, 0}, Vec3{1 / s6, 1 / s6, -2 / s6}};
    o.repeat = {s3, 1 / s2, s6 / 2};
    o.atoms_per_repeat = 6;
  }
  return o;
}

Orientation Orientation::parse(const std::string& name) {
  if (name == "O1" || name == "o1") return make(Tag::O1);
  if (name == "O2" || name == "o2") return make(Tag::O2);
  throw ConfigError("unknown orientation '" + name + "' (expected O1 or O2)");
}

std::string Orientation::name() const { return tag == Tag::O1 ? "O1" : "O2"; }

double Orientation::layer_spacing_factor() const {
  return tag == Tag::O1 ? std::sqrt(0.5) : std::sqrt(2.0 / 3.0);
}

double fcc_lattice_constant(double density) {
  if (!(density > 0.0)) throw ConfigError("density must be positive");
  return std::cbrt(4.0 / density);
}

double fcc_nearest_neighbor(double density) { return fcc_lattice_constant(density) / std::sqrt(2.0); }

Configuration build_fcc(const Orientation& orientation, const SimBox& box_hint, double density) {
  const double a = fcc_lattice_constant(density);
  box_hint.validate();

  std::array<long, 3> reps{};
  Vec3 cell, lengths;
  bool ok = true;
  for (int d = 0; d < 3; ++d) {
    cell[d] = orientation.repeat[d] * a;
    reps[d] = std::max(1L, std::lround(box_hint.lengths[d] / cell[d]));
    lengths[d] = static_cast<double>(reps[d]) * cell[d];
    if (std::abs(lengths[d] - box_hint.lengths[d]) > 0.05 * box_hint.lengths[d]) ok = false;
  }
  if (!ok) {
    std::ostringstream msg;
    msg << "no commensurate " << orientation.name() << " box within 5% of " << box_hint.lengths.x << " x "
        << box_hint.lengths.y << " x " << box_hint.lengths.z << "; nearest is " << lengths.x << " x "
        << lengths.y << " x " << lengths.z;
    throw ConfigError(msg.str());
  }

  // atoms of one orthogonal repeat cell, rotated into the box frame
  static constexpr std::array<Vec3, 4> basis{Vec3{0, 0, 0}, Vec3{0, 0.5, 0.5}, Vec3{0.5, 0, 0.5},
                                             Vec3{0.5, 0.5, 0}};
  std::vector<Vec3> motif;
  const int span = 4;
  for (int i = -span; i <= span; ++i)
    for (int j = -span; j <= span; ++j)
      for (int k = -span; k <= span; ++k)
        for (const Vec3& b : basis) {
          const Vec3 p{(i + b.x) * a, (j + b.y) * a, (k + b.z) * a};
          Vec3 q;
          bool inside = true;
          for (int d = 0; d < 3; ++d) {
            double f = dot(orientation.rotation[d], p) / cell[d];
            if (std::abs(f - std::round(f)) < 1e-9) f = std::round(f);
            if (f < 0.0 || f >= 1.0) {
              inside = false;
              break;
            }
            q[d] = f * cell[d];
          }
          if (inside) motif.push_back(q);
        }
  if (motif.size() != orientation.atoms_per_repeat) {
    throw NumericalError("FCC repeat cell construction found " + std::to_string(motif.size()) + " atoms");
  }
  std::sort(motif.begin(), motif.end(), [](const Vec3& l, const Vec3& r) {
    return std::tie(l.x, l.y, l.z) < std::tie(r.x, r.y, r.z);
  });

  // half a layer off the x1 boundary so no layer sits on the periodic seam
  const double shift = 0.5 * orientation.layer_spacing_factor() * fcc_nearest_neighbor(density);
  Configuration c;
  c.box.lengths = lengths;
  c.positions.reserve(static_cast<std::size_t>(reps[0] * reps[1] * reps[2]) * motif.size());
  for (long i = 0; i < reps[0]; ++i)
    for (long j = 0; j < reps[1]; ++j)
      for (long k = 0; k < reps[2]; ++k)
        for (const Vec3& m : motif) {
          c.positions.push_back(Vec3{m.x + static_cast<double>(i) * cell.x + shift,
                                     m.y + static_cast<double>(j) * cell.y,
                                     m.z + static_cast<double>(k) * cell.z});
        }
  c.wrap_all();
  return c;
}

Configuration dilute_to_density(const Configuration& config, double target_density, std::uint64_t seed) {
  const double current = config.density();
  if (!(target_density > 0.0) || target_density > current) {
    throw ConfigError("dilution target must lie in (0, current density]");
  }
  const std::size_t n = config.size();
  const auto remove = static_cast<std::size_t>(std::floor(static_cast<double>(n) * (1.0 - target_density / current)));
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  // partial Fisher-Yates: the first `remove` entries are the vacancies
  for (std::size_t k = 0; k < remove; ++k) {
    std::uniform_int_distribution<std::size_t> pick(k, n - 1);
    std::swap(idx[k], idx[pick(rng)]);
  }
  std::vector<char> drop(n, 0);
  for (std::size_t k = 0; k < remove; ++k) drop[idx[k]] = 1;
  Configuration out;
  out.box = config.box;
  out.time = config.time;
  out.positions.reserve(n - remove);
  for (std::size_t k = 0; k < n; ++k)
    if (!drop[k]) out.positions.push_back(config.positions[k]);
  return out;
}

LiquidCheck assess_liquid(const RdfResult& rdf, double min_ratio) {
  const auto& g = rdf.g;
  const std::size_t n = g.size();
  LiquidCheck out;
  if (n < 8) return out;
  // light smoothing against shot noise
  std::vector<double> s(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t lo = k >= 2 ? k - 2 : 0, hi = std::min(n - 1, k + 2);
    double acc = 0.0;
    for (std::size_t q = lo; q <= hi; ++q) acc += g[q];
    s[k] = acc / static_cast<double>(hi - lo + 1);
  }
  const auto peak = static_cast<std::size_t>(std::max_element(s.begin(), s.end()) - s.begin());
  out.first_peak_r = rdf.r[peak];
  out.first_peak_g = s[peak];
  std::size_t mn = peak;
  for (std::size_t k = peak + 1; k + 1 < n; ++k) {
    if (s[k] <= s[k - 1] && s[k] < s[k + 1]) {
      mn = k;
      break;
    }
  }
  if (mn == peak) return out;
  out.first_min_r = rdf.r[mn];
  out.first_min_g = s[mn];

  // maxima of the second shell; a liquid's second minimum sits near 2.3
  // first-peak radii
  const double r_end = 2.25 * out.first_peak_r;
  const double prominence = 0.03;
  double valley = s[mn];
  double candidate = -1.0;
  for (std::size_t k = mn + 1; k < n && rdf.r[k] <= r_end; ++k) {
    if (candidate < 0.0) {
      valley = std::min(valley, s[k]);
      if (s[k] > valley + prominence) candidate = s[k];
    } else if (s[k] > candidate) {
      candidate = s[k];
    } else if (s[k] < candidate - prominence) {
      ++out.second_shell_peaks;
      candidate = -1.0;
      valley = s[k];
    }
  }
  if (candidate >= 0.0) ++out.second_shell_peaks;
  out.liquid = out.first_peak_g > 0.0 && out.first_min_g >= min_ratio * out.first_peak_g &&
               out.second_shell_peaks <= 1;
  return out;
}

namespace {

std::string describe(const LiquidCheck& c) {
  std::ostringstream s;
  s << "g(r) peak " << c.first_peak_g << " at r=" << c.first_peak_r << ", first minimum " << c.first_min_g
    << " at r=" << c.first_min_r << ", second-shell peaks " << c.second_shell_peaks;
  return s.str();
}

}  // namespace

template <PairPotential P>
MeltQuenchResult melt_quench(const Configuration& config, const P& potential, const MeltQuenchParams& params,
                             int workers) {
  params.melt.validate();
  params.quench.validate();
  if (!(params.melt.temperature > params.quench.temperature)) {
    throw ConfigError("melt temperature must exceed the target temperature");
  }
  if (params.check_every == 0) throw ConfigError("check_every must be positive");

  RdfOptions ro;
  ro.bins = params.rdf_bins;
  ro.r_max = params.rdf_r_max;

  MeltQuenchResult res;
  Checkpoint state = start_state(config, params.melt.seed);
  IntegratorParams chunk = params.melt;
  chunk.sample_every = std::numeric_limits<std::uint64_t>::max();
  chunk.checkpoint_every = 0;
  while (res.melt_steps < params.melt.n_steps) {
    chunk.n_steps = std::min(params.check_every, params.melt.n_steps - res.melt_steps);
    state = run_trajectory(state, chunk, potential, {}, workers);
    res.melt_steps += chunk.n_steps;
    res.melted = assess_liquid(rdf(std::span(&state.config, 1), ro), params.min_ratio);
    if (res.melted.liquid) break;
  }
  if (!res.melted.liquid) {
    throw NumericalError("melt criterion not reached after " + std::to_string(res.melt_steps) +
                         " steps; " + describe(res.melted));
  }

  IntegratorParams q = params.quench;
  q.sample_every = std::numeric_limits<std::uint64_t>::max();
  q.checkpoint_every = 0;
  Checkpoint cooled = run_trajectory(start_state(state.config, params.quench.seed), q, potential, {}, workers);
  res.config = std::move(cooled.config);
  return res;
}

template MeltQuenchResult melt_quench<PotentialTable>(const Configuration&, const PotentialTable&,
                                                      const MeltQuenchParams&, int);
template MeltQuenchResult melt_quench<ShiftedExp6>(const Configuration&, const ShiftedExp6&,
                                                   const MeltQuenchParams&, int);

TwoPhaseResult assemble_two_phase(const Configuration& solid, const Configuration& liquid, double void_width,
                                  double min_allowed) {
  const Vec3& Ls = solid.box.lengths;
  const Vec3& Ll = liquid.box.lengths;
  auto close = [](double x, double y) { return std::abs(x - y) <= 1e-9 * std::max(x, y); };
  if (!close(Ls.y, Ll.y) || !close(Ls.z, Ll.z)) {
    std::ostringstream msg;
    msg << "cross-sections differ: " << Ls.y << " x " << Ls.z << " vs " << Ll.y << " x " << Ll.z;
    throw ConfigError(msg.str());
  }
  if (!(void_width >= 0.0) || void_width >= std::min(Ls.x, Ll.x)) {
    throw ConfigError("void width must be in [0, slab length)");
  }

  TwoPhaseResult out;
  out.solid_factor = (Ls.x - void_width) / Ls.x;
  out.liquid_factor = (Ll.x - void_width) / Ll.x;
  out.solid_count = solid.size();
  Configuration& c = out.config;
  c.box.lengths = {Ls.x + Ll.x, Ls.y, Ls.z};
  c.positions.reserve(solid.size() + liquid.size());
  const double h = 0.5 * void_width;
  for (const Vec3& p : solid.positions) {
    const double x = wrap_1d(p.x, Ls.x);
    c.positions.push_back({h + x * out.solid_factor, p.y, p.z});
  }
  for (const Vec3& p : liquid.positions) {
    const double x = wrap_1d(p.x, Ll.x);
    c.positions.push_back({Ls.x + h + x * out.liquid_factor, p.y, p.z});
  }
  c.wrap_all();

  // closest solid-liquid pair
  out.min_distance = std::numeric_limits<double>::infinity();
  std::size_t bi = 0, bj = 0;
  const double reach = std::max(min_allowed, 1.0) + void_width;
  std::vector<std::size_t> near_s, near_l;
  for (std::size_t k = 0; k < c.size(); ++k) {
    const double x = c.positions[k].x;
    const double to_seam = std::min({std::abs(x), std::abs(x - Ls.x), std::abs(c.box.lengths.x - x)});
    if (to_seam <= reach) (k < out.solid_count ? near_s : near_l).push_back(k);
  }
  for (std::size_t i : near_s)
    for (std::size_t j : near_l) {
      const double r = norm(min_image(c.box, c.positions[j] - c.positions[i]));
      if (r < out.min_distance) {
        out.min_distance = r;
        bi = i;
        bj = j;
      }
    }
  if (out.min_distance < min_allowed) {
    std::ostringstream msg;
    msg << "assembled pair (" << bi << ", " << bj << ") at distance " << out.min_distance << " < " << min_allowed;
    throw ConfigError(msg.str());
  }
  return out;
}

LineFit least_squares_line(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 2) throw NumericalError("line fit needs at least two points");
  double mx = 0.0, my = 0.0;
  for (const auto& [x, y] : points) {
    mx += x;
    my += y;
  }
  const auto n = static_cast<double>(points.size());
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [x, y] : points) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  if (!(sxx > 0.0)) throw NumericalError("line fit is rank deficient: all abscissae equal");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  return f;
}

CoexistenceFit meltpoint_fit(const std::vector<std::pair<double, double>>& solid,
                             const std::vector<std::pair<double, double>>& liquid, double temperature) {
  // sort so the result does not depend on input order
  auto sorted = [](std::vector<std::pair<double, double>> v) {
    std::sort(v.begin(), v.end());
    return v;
  };
  CoexistenceFit f;
  f.solid = least_squares_line(sorted(solid));
  f.liquid = least_squares_line(sorted(liquid));
  f.temperature = temperature;
  f.solid_va = f.solid.at(temperature);
  f.liquid_va = f.liquid.at(temperature);
  if (!(f.solid_va > 0.0) || !(f.liquid_va > 0.0)) throw NumericalError("extrapolated volume per atom is not positive");
  f.solid_density = 1.0 / f.solid_va;
  f.liquid_density = 1.0 / f.liquid_va;
  f.combined_va = 2.0 / (f.solid_density + f.liquid_density);
  f.combined_density = 1.0 / f.combined_va;
  return f;
}

}  // namespace mdpf
