#include "mdpf/observables.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "mdpf/errors.hpp"

namespace mdpf {

Mollifier Mollifier::density(double epsilon, double rc_factor, double cross_section) {
  if (!(cross_section > 0.0)) throw ConfigError("mollifier: cross-section must be positive");
  Mollifier m;
  m.epsilon = epsilon;
  m.rc_factor = rc_factor;
  m.normalization = Normalization::Density;
  m.validate();
  m.c = 1.0 / (cross_section * epsilon * std::sqrt(2.0 * std::numbers::pi) *
               std::erf(rc_factor / std::numbers::sqrt2));
  return m;
}

Mollifier Mollifier::with_constant(double epsilon, double rc_factor, double c) {
  Mollifier m;
  m.epsilon = epsilon;
  m.rc_factor = rc_factor;
  m.c = c;
  m.normalization = c == 1.0 ? Normalization::Unit : Normalization::Override;
  m.validate();
  return m;
}

void Mollifier::validate() const {
  if (!(epsilon > 0.0)) throw ConfigError("mollifier: epsilon must be positive");
  if (!(rc_factor > 0.0)) throw ConfigError("mollifier: rc_factor must be positive");
  if (!(c > 0.0)) throw ConfigError("mollifier: normalization constant must be positive");
}

std::string Mollifier::normalization_name() const {
  switch (normalization) {
    case Normalization::Density:
      return "density";
    case Normalization::Unit:
      return "unit";
    case Normalization::Override:
      return "override";
  }
  return "unknown";
}

MollifierValue Mollifier::operator()(double x1) const {
  if (!(std::abs(x1) < cutoff())) return {};
  const double inv_e2 = 1.0 / (epsilon * epsilon);
  const double v = c * std::exp(-0.5 * x1 * x1 * inv_e2);
  return {v, -x1 * inv_e2 * v, (x1 * x1 * inv_e2 - 1.0) * inv_e2 * v};
}

MollifierValue mollifier_eval(const Mollifier& m, double x1) { return m(x1); }

Grid Grid::periodic(double length, std::size_t count, double origin) {
  if (count < 2) throw ConfigError("grid needs at least two points");
  if (!(length > 0.0)) throw ConfigError("grid length must be positive");
  Grid g;
  g.origin = origin;
  g.count = count;
  g.spacing = length / static_cast<double>(count);
  return g;
}

Grid Grid::with_spacing(double length, double dx, double origin) {
  if (!(dx > 0.0)) throw ConfigError("grid spacing must be positive");
  const auto k = static_cast<std::size_t>(std::max(2.0, std::round(length / dx)));
  return periodic(length, k, origin);
}

std::vector<double> Grid::points() const {
  std::vector<double> p(count);
  for (std::size_t k = 0; k < count; ++k) p[k] = x(k);
  return p;
}

double interpolate_periodic(const Grid& grid, std::span<const double> values, double x) {
  if (values.size() != grid.count) throw std::invalid_argument("interpolate: size mismatch");
  const double s = (x - grid.origin) / grid.spacing;
  const double fl = std::floor(s);
  const double t = s - fl;
  const auto K = static_cast<long long>(grid.count);
  long long k = static_cast<long long>(fl) % K;
  if (k < 0) k += K;
  const long long k1 = (k + 1) % K;
  return (1.0 - t) * values[static_cast<std::size_t>(k)] + t * values[static_cast<std::size_t>(k1)];
}

Profile Profile::single(const Grid& grid, std::vector<double> values) {
  Profile p;
  p.grid = grid;
  p.variance.assign(values.size(), 0.0);
  p.mean = std::move(values);
  p.n_samples = 1;
  p.weight_sum = 1.0;
  return p;
}

Profile Profile::from_stats(const Grid& grid, const WeightedStats& stats) {
  Profile p;
  p.grid = grid;
  p.mean = stats.mean();
  p.variance = stats.variance();
  p.n_samples = stats.count();
  p.weight_sum = stats.weight_sum();
  return p;
}

namespace {

// Calls fn(k_unwrapped, k_wrapped, d) for every grid point whose periodic copy
// lies strictly within `reach` of `center`; d = x_k - center. A point is
// visited once per periodic image inside the window.
template <class Fn>
void for_each_in_window(const Grid& g, double center, double reach, Fn&& fn) {
  const auto kmin = static_cast<long long>(std::ceil((center - reach - g.origin) / g.spacing));
  const auto kmax = static_cast<long long>(std::floor((center + reach - g.origin) / g.spacing));
  const auto K = static_cast<long long>(g.count);
  for (long long k = kmin; k <= kmax; ++k) {
    const double d = g.origin + static_cast<double>(k) * g.spacing - center;
    if (!(std::abs(d) < reach)) continue;
    long long kk = k % K;
    if (kk < 0) kk += K;
    fn(k, static_cast<std::size_t>(kk), d);
  }
}

void check_inputs(const Configuration& config, const ForceField& field, const Grid& grid) {
  if (field.size() != config.size()) throw std::invalid_argument("force field does not match configuration");
  if (std::abs(grid.length() - config.box.lengths.x) > 1e-9 * config.box.lengths.x) {
    throw ConfigError("grid period does not match the box length along x1");
  }
}

}  // namespace

Profile phase_field_profile(const Configuration& config, const ForceField& field, const Grid& grid,
                            const Mollifier& mollifier) {
  check_inputs(config, field, grid);
  std::vector<double> m(grid.count, 0.0);
  const double rc = mollifier.cutoff();
  for (std::size_t j = 0; j < config.size(); ++j) {
    const double mj = field.energy[j];
    for_each_in_window(grid, config.positions[j].x, rc, [&](long long, std::size_t kk, double d) {
      m[kk] += mj * mollifier(d).value;
    });
  }
  return Profile::single(grid, std::move(m));
}

Profile density_profile(const Configuration& config, const Grid& grid, const Mollifier& mollifier) {
  if (std::abs(grid.length() - config.box.lengths.x) > 1e-9 * config.box.lengths.x) {
    throw ConfigError("grid period does not match the box length along x1");
  }
  std::vector<double> rho(grid.count, 0.0);
  const double rc = mollifier.cutoff();
  for (const auto& p : config.positions) {
    for_each_in_window(grid, p.x, rc, [&](long long, std::size_t kk, double d) {
      rho[kk] += mollifier(d).value;
    });
  }
  return Profile::single(grid, std::move(rho));
}

DriftSample drift_sample(const Configuration& config, const ForceField& field,
                         const PairForces& pairs, const Grid& grid, const Mollifier& mollifier,
                         double kT) {
  check_inputs(config, field, grid);
  const std::size_t n = config.size();
  if (pairs.offsets.size() != n + 1) throw std::invalid_argument("pair forces do not match configuration");

  // h_i = sum over j having i as neighbour of f_ij . F_j
  std::vector<double> h(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t e = pairs.offsets[j]; e < pairs.offsets[j + 1]; ++e) {
      h[pairs.neighbor[e]] += dot(pairs.force[e], field.forces[j]);
    }
  }

  DriftSample s;
  const std::size_t K = grid.count;
  s.m.assign(K, 0.0);
  s.d2m.assign(K, 0.0);
  s.a1.assign(K, 0.0);
  s.da1.assign(K, 0.0);
  s.a0.assign(K, 0.0);
  const double rc = mollifier.cutoff();
  for (std::size_t j = 0; j < n; ++j) {
    const double mj = field.energy[j];
    const Vec3& F = field.forces[j];
    const double conv = (kT - mj) * F.x;
    const double react = kT * field.divergence[j] - 0.5 * norm2(F) - 0.5 * h[j];
    for_each_in_window(grid, config.positions[j].x, rc, [&](long long, std::size_t kk, double d) {
      const MollifierValue eta = mollifier(d);
      s.m[kk] += mj * eta.value;
      s.d2m[kk] += mj * eta.d2;
      s.a1[kk] += conv * eta.value;
      s.da1[kk] += conv * eta.d1;
      s.a0[kk] += react * eta.value;
    });
  }
  s.alpha.resize(K);
  for (std::size_t k = 0; k < K; ++k) s.alpha[k] = kT * s.d2m[k] + s.da1[k] + s.a0[k];
  return s;
}

std::vector<double> DriftTerms::diffusion_term() const {
  std::vector<double> out(d2m.mean.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = kT * d2m.mean[k];
  return out;
}

std::vector<double> DriftTerms::alpha() const {
  std::vector<double> out = diffusion_term();
  for (std::size_t k = 0; k < out.size(); ++k) out[k] += da1.mean[k] + a0.mean[k];
  return out;
}

DriftAccumulator::DriftAccumulator(const Grid& grid, double kT)
    : grid_(grid),
      kT_(kT),
      m_(grid.count),
      d2m_(grid.count),
      a1_(grid.count),
      da1_(grid.count),
      a0_(grid.count),
      alpha_(grid.count) {}

void DriftAccumulator::add(const DriftSample& s, double weight) {
  m_.add(s.m, weight);
  d2m_.add(s.d2m, weight);
  a1_.add(s.a1, weight);
  da1_.add(s.da1, weight);
  a0_.add(s.a0, weight);
  alpha_.add(s.alpha, weight);
}

void DriftAccumulator::merge(const DriftAccumulator& o) {
  m_.merge(o.m_);
  d2m_.merge(o.d2m_);
  a1_.merge(o.a1_);
  da1_.merge(o.da1_);
  a0_.merge(o.a0_);
  alpha_.merge(o.alpha_);
}

DriftTerms DriftAccumulator::terms() const {
  DriftTerms t;
  t.kT = kT_;
  t.m = Profile::from_stats(grid_, m_);
  t.d2m = Profile::from_stats(grid_, d2m_);
  t.a1 = Profile::from_stats(grid_, a1_);
  t.da1 = Profile::from_stats(grid_, da1_);
  t.a0 = Profile::from_stats(grid_, a0_);
  t.alpha_samples = Profile::from_stats(grid_, alpha_);
  return t;
}

DriftTerms drift_profiles(const Configuration& config, const ForceField& field,
                          const PairForces& pairs, const Grid& grid, const Mollifier& mollifier,
                          double kT) {
  DriftAccumulator acc(grid, kT);
  acc.add(drift_sample(config, field, pairs, grid, mollifier, kT));
  return acc.terms();
}

BandMatrix::BandMatrix(std::size_t K, std::size_t bandwidth, double dx) : K_(K), dx_(dx) {
  if (K == 0) throw std::invalid_argument("BandMatrix: empty");
  if (2 * bandwidth + 1 > K) {
    dense_ = true;
    w_ = K - 1;
  } else {
    w_ = bandwidth;
  }
  data_.assign(K_ * (w_ + 1), 0.0);
}

std::size_t BandMatrix::required_bandwidth(double reach, double dx) {
  return static_cast<std::size_t>(std::ceil(reach / dx));
}

double BandMatrix::at(std::size_t i, std::size_t j) const {
  const std::size_t d = (j + K_ - i) % K_;
  if (d <= w_) return diag(i, d);
  if (K_ - d <= w_) return diag(j, K_ - d);
  return 0.0;
}

void BandMatrix::add_symmetric(std::size_t i, std::size_t j, double v) {
  const std::size_t d = (j + K_ - i) % K_;
  if (dense_) {
    diag(i, d) += v;
    if (d != 0) diag(j, K_ - d) += v;
    return;
  }
  if (d <= w_) {
    diag(i, d) += v;
  } else if (K_ - d <= w_) {
    diag(j, K_ - d) += v;
  } else {
    throw std::out_of_range("BandMatrix: entry outside the band");
  }
}

void BandMatrix::write(std::ostream& out) const {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", dx_);
  out << K_ << ' ' << w_ << ' ' << buf << '\n';
  for (std::size_t i = 0; i < K_; ++i) {
    for (std::size_t d = 0; d <= w_; ++d) {
      std::snprintf(buf, sizeof buf, "%.17g", diag(i, d));
      out << (d ? " " : "") << buf;
    }
    out << '\n';
  }
}

BandMatrix BandMatrix::read(std::istream& in) {
  std::size_t K = 0, w = 0;
  double dx = 0.0;
  if (!(in >> K >> w >> dx) || K == 0) throw FormatError("band matrix: bad header");
  if (w >= K) throw FormatError("band matrix: bandwidth must be smaller than K");
  BandMatrix b(K, w, dx);
  if (b.bandwidth() != w) {
    throw FormatError("band matrix: bandwidth " + std::to_string(w) +
                      " is inconsistent with K (use K - 1 for dense storage)");
  }
  for (double& v : b.data_) {
    if (!(in >> v)) throw FormatError("band matrix: truncated data");
  }
  return b;
}

namespace {

std::size_t kernel_bandwidth(const Grid& grid, double r_cut, const Mollifier& mollifier) {
  return BandMatrix::required_bandwidth(2.0 * (r_cut + mollifier.cutoff()), grid.spacing);
}

}  // namespace

BandMatrix diffusion_kernel(const Configuration& config, const ForceField& field,
                            const PairForces& pairs, const Grid& grid, const Mollifier& mollifier,
                            double kT, double r_cut) {
  check_inputs(config, field, grid);
  const std::size_t n = config.size();
  if (pairs.offsets.size() != n + 1) throw std::invalid_argument("pair forces do not match configuration");
  const std::size_t K = grid.count;
  BandMatrix B(K, kernel_bandwidth(grid, r_cut, mollifier), grid.spacing);
  const std::size_t w = B.bandwidth();
  const double rc = mollifier.cutoff();
  const double reach = r_cut + rc;
  const double inv_e2 = 1.0 / (mollifier.epsilon * mollifier.epsilon);
  const double two_kT = 2.0 * kT;

  std::vector<double> e;  // sum over images of (x - X_j)_1 eta(x - X_j)
  std::vector<Vec3> S;    // F_j eta(x - X_j) + sum_i f_ij eta(x - X_i)
  std::vector<double> e_fold(K);
  std::vector<Vec3> S_fold(K);
  std::vector<char> touched(K);

  for (std::size_t j = 0; j < n; ++j) {
    const double xj = config.positions[j].x;
    const auto kmin = static_cast<long long>(std::ceil((xj - reach - grid.origin) / grid.spacing));
    const auto kmax = static_cast<long long>(std::floor((xj + reach - grid.origin) / grid.spacing));
    const auto len = static_cast<std::size_t>(kmax - kmin + 1);
    e.assign(len, 0.0);
    S.assign(len, Vec3{});
    std::vector<std::size_t> wrapped(len);
    for (std::size_t u = 0; u < len; ++u) {
      long long kk = (kmin + static_cast<long long>(u)) % static_cast<long long>(K);
      if (kk < 0) kk += static_cast<long long>(K);
      wrapped[u] = static_cast<std::size_t>(kk);
    }

    const Vec3& F = field.forces[j];
    for_each_in_window(grid, xj, rc, [&](long long k, std::size_t, double d) {
      const double eta = mollifier(d).value;
      const auto u = static_cast<std::size_t>(k - kmin);
      e[u] += d * eta;
      S[u] += F * eta;
    });
    for (std::size_t p = pairs.offsets[j]; p < pairs.offsets[j + 1]; ++p) {
      const std::size_t i = pairs.neighbor[p];
      const double xi = xj + min_image_1d(config.positions[i].x - xj, config.box.lengths.x);
      const Vec3& f = pairs.force[p];
      for_each_in_window(grid, xi, rc, [&](long long k, std::size_t, double d) {
        S[static_cast<std::size_t>(k - kmin)] += f * mollifier(d).value;
      });
    }

    const double mj = field.energy[j];
    const double p_quad = (mj * inv_e2) * (mj * inv_e2);
    const double p_cross = mj * inv_e2 * 0.5;
    auto entry = [&](double ex, const Vec3& Sx, double ey, const Vec3& Sy) {
      const double p = p_quad * ex * ey - p_cross * (ex * Sy.x + ey * Sx.x);
      const double q = 0.25 * dot(Sx, Sy);
      return two_kT * (p + q);
    };

    if (!B.dense()) {
      for (std::size_t u = 0; u < len; ++u) {
        if (e[u] == 0.0 && S[u] == Vec3{}) continue;
        const std::size_t vmax = std::min(len - 1, u + w);
        for (std::size_t v = u; v <= vmax; ++v) {
          B.diag(wrapped[u], v - u) += entry(e[u], S[u], e[v], S[v]);
        }
      }
    } else {
      std::fill(e_fold.begin(), e_fold.end(), 0.0);
      std::fill(S_fold.begin(), S_fold.end(), Vec3{});
      std::fill(touched.begin(), touched.end(), 0);
      for (std::size_t u = 0; u < len; ++u) {
        e_fold[wrapped[u]] += e[u];
        S_fold[wrapped[u]] += S[u];
        touched[wrapped[u]] = 1;
      }
      for (std::size_t a = 0; a < K; ++a) {
        if (!touched[a]) continue;
        for (std::size_t b = 0; b < K; ++b) {
          if (!touched[b]) continue;
          B.diag(a, (b + K - a) % K) += entry(e_fold[a], S_fold[a], e_fold[b], S_fold[b]);
        }
      }
    }
  }
  return B;
}

BandAccumulator::BandAccumulator(const Grid& grid, double r_cut, const Mollifier& mollifier)
    : grid_(grid), r_cut_(r_cut), bandwidth_(kernel_bandwidth(grid, r_cut, mollifier)) {
  const BandMatrix shape(grid.count, bandwidth_, grid.spacing);
  bandwidth_ = shape.bandwidth();
  sum_ = CompensatedSum(shape.data().size());
}

void BandAccumulator::add(const BandMatrix& sample, double weight) {
  if (!(weight > 0.0)) throw std::invalid_argument("BandAccumulator: weight must be positive");
  if (sample.size() != grid_.count || sample.bandwidth() != bandwidth_) {
    throw std::invalid_argument("BandAccumulator: kernel shape mismatch");
  }
  sum_.add(sample.data(), weight);
  weight_ += weight;
  ++count_;
}

BandMatrix BandAccumulator::mean() const {
  BandMatrix out(grid_.count, bandwidth_, grid_.spacing);
  if (count_ == 0) return out;
  auto data = out.data();
  const auto& s = sum_.sum();
  for (std::size_t k = 0; k < data.size(); ++k) data[k] = s[k] / weight_;
  return out;
}

void diffusion_kernel_accumulate(const Configuration& config, const ForceField& field,
                                 const PairForces& pairs, const Grid& grid,
                                 const Mollifier& mollifier, double kT, BandAccumulator& acc,
                                 double weight) {
  if (!(grid == acc.grid())) throw std::invalid_argument("accumulator grid mismatch");
  acc.add(diffusion_kernel(config, field, pairs, grid, mollifier, kT, acc.r_cut()), weight);
}

RdfResult rdf(std::span<const Configuration> configs, const RdfOptions& options) {
  if (options.bins == 0) throw ConfigError("rdf: need at least one bin");
  if (!(options.r_max > 0.0)) throw ConfigError("rdf: r_max must be positive");
  RdfResult out;
  out.bin_width = options.r_max / static_cast<double>(options.bins);
  std::vector<double> counts(options.bins, 0.0);
  double denom = 0.0;  // sum over configurations of N_ref * rho
  for (const auto& config : configs) {
    const auto& L = config.box.lengths;
    if (options.r_max > 0.5 * std::min({L.x, L.y, L.z})) {
      throw ConfigError("rdf: r_max exceeds half the smallest box length");
    }
    const CellList cells = CellList::build(config, options.r_max);
    const double rho = config.density();
    std::size_t n_ref = 0;
    for (std::size_t j = 0; j < config.size(); ++j) {
      if (options.slab) {
        const double x1 = config.positions[j].x;
        if (!(x1 >= options.slab->first && x1 < options.slab->second)) continue;
      }
      ++n_ref;
      cells.for_each_candidate(j, [&](std::size_t i) {
        const double r = norm(min_image(config.box, config.positions[i] - config.positions[j]));
        if (r < options.r_max) {
          const auto b = std::min(options.bins - 1, static_cast<std::size_t>(r / out.bin_width));
          counts[b] += 1.0;
        }
      });
    }
    denom += static_cast<double>(n_ref) * rho;
  }
  out.r.resize(options.bins);
  out.g.resize(options.bins);
  for (std::size_t b = 0; b < options.bins; ++b) {
    const double lo = static_cast<double>(b) * out.bin_width;
    const double hi = lo + out.bin_width;
    const double shell = 4.0 / 3.0 * std::numbers::pi * (hi * hi * hi - lo * lo * lo);
    out.r[b] = 0.5 * (lo + hi);
    out.g[b] = denom > 0.0 ? counts[b] / (denom * shell) : 0.0;
  }
  return out;
}

}  // namespace mdpf
