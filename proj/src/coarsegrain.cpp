#include "mdpf/coarsegrain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "mdpf/errors.hpp"

namespace mdpf {

Eigen::MatrixXd to_dense(const BandMatrix& band) {
  const auto K = static_cast<Eigen::Index>(band.size());
  Eigen::MatrixXd a(K, K);
  for (Eigen::Index i = 0; i < K; ++i)
    for (Eigen::Index j = 0; j < K; ++j) a(i, j) = band.at(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  return 0.5 * (a + a.transpose());
}

DiffusionFactor factor_diffusion(const BandMatrix& band) { return factor_diffusion(to_dense(band)); }

DiffusionFactor factor_diffusion(const Eigen::MatrixXd& matrix) {
  if (matrix.rows() != matrix.cols() || matrix.rows() == 0) throw ConfigError("factorization needs a square matrix");
  const Eigen::MatrixXd sym = 0.5 * (matrix + matrix.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  if (es.info() != Eigen::Success) {
    throw NumericalError("symmetric eigensolver did not converge (K = " + std::to_string(sym.rows()) + ")");
  }
  DiffusionFactor out;
  out.spectrum = es.eigenvalues();
  const Eigen::Index K = sym.rows();
  Eigen::Index first = 0;
  while (first < K && out.spectrum(first) < 0.0) ++first;

  DropReport& rep = out.report;
  rep.dropped = static_cast<std::size_t>(first);
  double mass2 = 0.0;
  for (Eigen::Index k = 0; k < first; ++k) mass2 += out.spectrum(k) * out.spectrum(k);
  rep.dropped_mass = std::sqrt(mass2);
  rep.most_negative = first > 0 ? out.spectrum(0) : 0.0;
  const double lmax = out.spectrum(K - 1);
  for (Eigen::Index k = first; k < K; ++k)
    if (out.spectrum(k) < 1e-12 * lmax) ++rep.tiny_retained;

  out.retained = out.spectrum.tail(K - first);
  out.vectors = es.eigenvectors().rightCols(K - first);
  const Eigen::MatrixXd scaled = out.vectors * out.retained.cwiseSqrt().asDiagonal();
  out.B = scaled * out.vectors.transpose();
  return out;
}

MonotoneMap::MonotoneMap(Grid grid, std::size_t first_node, std::vector<double> x, std::vector<double> m,
                         double lo, double hi)
    : grid_(grid), first_(first_node), x_(std::move(x)), m_(std::move(m)), lo_(lo), hi_(hi) {
  if (x_.size() != m_.size() || x_.size() < 2) throw std::invalid_argument("MonotoneMap: need two nodes or more");
  const bool up = m_[1] > m_[0];
  for (std::size_t k = 1; k < m_.size(); ++k) {
    if (!(x_[k] > x_[k - 1]) || (up ? !(m_[k] > m_[k - 1]) : !(m_[k] < m_[k - 1]))) {
      throw std::invalid_argument("MonotoneMap: table is not strictly monotone");
    }
  }
}

std::size_t MonotoneMap::interior_nodes() const {
  return static_cast<std::size_t>(
      std::count_if(m_.begin(), m_.end(), [&](double v) { return v > lo_ && v < hi_; }));
}

double MonotoneMap::forward(double x) const {
  if (x < x_.front() || x > x_.back()) throw std::out_of_range("MonotoneMap::forward: x outside the run");
  auto it = std::upper_bound(x_.begin(), x_.end(), x);
  if (it == x_.end()) return m_.back();
  const std::size_t b = static_cast<std::size_t>(it - x_.begin()), a = b - 1;
  const double t = (x - x_[a]) / (x_[b] - x_[a]);
  return m_[a] + t * (m_[b] - m_[a]);
}

double MonotoneMap::inverse(double m) const {
  const bool up = increasing();
  const double mmin = up ? m_.front() : m_.back();
  const double mmax = up ? m_.back() : m_.front();
  if (m < mmin || m > mmax) throw std::out_of_range("MonotoneMap::inverse: value outside the table");
  std::size_t a, b;
  if (up) {
    auto it = std::lower_bound(m_.begin(), m_.end(), m);
    b = static_cast<std::size_t>(it - m_.begin());
  } else {
    auto it = std::lower_bound(m_.begin(), m_.end(), m, std::greater<>());
    b = static_cast<std::size_t>(it - m_.begin());
  }
  if (m_[b] == m) return x_[b];
  a = b - 1;
  const double t = (m - m_[a]) / (m_[b] - m_[a]);
  return x_[a] + t * (x_[b] - x_[a]);
}

namespace {

double median(std::vector<double> v) {
  const std::size_t h = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(h), v.end());
  const double upper = v[h];
  if (v.size() % 2) return upper;
  return 0.5 * (upper + *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(h)));
}

}  // namespace

std::pair<double, double> plateau_levels(std::span<const double> values, double flat_fraction) {
  const std::size_t K = values.size();
  if (K < 3) throw NumericalError("no interface: profile too short");
  const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  const double mid = 0.5 * (*mn + *mx);
  std::vector<std::pair<double, std::size_t>> slope(K);
  for (std::size_t k = 0; k < K; ++k) {
    slope[k] = {std::abs(values[(k + 1) % K] - values[(k + K - 1) % K]), k};
  }
  std::stable_sort(slope.begin(), slope.end(),
                   [](const auto& l, const auto& r) { return l.first < r.first; });
  const auto take = std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(flat_fraction * static_cast<double>(K))));
  std::vector<double> low, high;
  for (std::size_t q = 0; q < std::min(take, K); ++q) {
    const double v = values[slope[q].second];
    (v < mid ? low : high).push_back(v);
  }
  if (low.empty() || high.empty()) throw NumericalError("no interface: could not find two plateaus");
  return {median(low), median(high)};
}

std::vector<MonotoneMap> invert_profile(const Profile& m_av, const InterfaceOptions& opt) {
  const auto& v = m_av.mean;
  const std::size_t K = v.size();
  if (K != m_av.grid.count || K < 3) throw ConfigError("profile does not match its grid");
  if (!(opt.delta_fraction >= 0.0 && opt.delta_fraction < 0.5)) throw ConfigError("delta_fraction must be in [0, 0.5)");

  double lower, upper;
  if (opt.solid_level && opt.liquid_level) {
    lower = std::min(*opt.solid_level, *opt.liquid_level);
    upper = std::max(*opt.solid_level, *opt.liquid_level);
  } else {
    std::tie(lower, upper) = plateau_levels(v, opt.flat_fraction);
    if (opt.solid_level) lower = *opt.solid_level;
    if (opt.liquid_level) upper = *opt.liquid_level;
  }
  const double delta = opt.delta_fraction * (upper - lower);
  const double lo = lower + delta, hi = upper - delta;
  if (!(hi > lo)) throw NumericalError("no interface: plateau levels coincide");

  auto sign = [&](std::size_t k) {
    const double d = v[(k + 1) % K] - v[k];
    return d > 0.0 ? 1 : (d < 0.0 ? -1 : 0);
  };
  std::size_t start = K;
  for (std::size_t k = 0; k < K; ++k) {
    if (sign(k) != sign((k + K - 1) % K)) {
      start = k;
      break;
    }
  }
  if (start == K) throw NumericalError("no interface: profile has no monotone stretch");

  std::vector<MonotoneMap> out;
  std::size_t s = 0;
  while (s < K) {
    const std::size_t k0 = (start + s) % K;
    const int dir = sign(k0);
    std::size_t len = 1;
    while (s + len < K && sign((k0 + len) % K) == dir) ++len;
    if (dir != 0 && len + 1 >= opt.min_nodes) {
      std::vector<double> xs(len + 1), ms(len + 1);
      for (std::size_t u = 0; u <= len; ++u) {
        xs[u] = m_av.grid.x(k0) + static_cast<double>(u) * m_av.grid.spacing;
        ms[u] = v[(k0 + u) % K];
      }
      const auto [mn, mx] = std::minmax_element(ms.begin(), ms.end());
      if (*mn <= lo && *mx >= hi) out.emplace_back(m_av.grid, k0, std::move(xs), std::move(ms), lo, hi);
    }
    s += len;
  }
  if (out.empty()) throw NumericalError("no interface: no monotone run spans the plateau levels");
  std::sort(out.begin(), out.end(), [](const MonotoneMap& a, const MonotoneMap& b) { return a.first_node() < b.first_node(); });
  return out;
}

std::vector<double> field_grid(const MonotoneMap& map, std::size_t n) {
  if (n < 2) throw ConfigError("phase-field grid needs two points or more");
  std::vector<double> m(n);
  for (std::size_t k = 0; k < n; ++k) {
    m[k] = map.lo() + (map.hi() - map.lo()) * static_cast<double>(k) / static_cast<double>(n - 1);
  }
  m.back() = map.hi();
  return m;
}

std::vector<double> resample(const Grid& grid, std::span<const double> values, std::span<const double> x) {
  std::vector<double> out(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) out[k] = interpolate_periodic(grid, values, x[k]);
  return out;
}

FieldTables map_to_field(const DriftTerms& drift, const DiffusionFactor* factor, const MonotoneMap& map,
                         std::span<const double> m_values) {
  const Grid& g = drift.grid();
  if (!(g == map.grid())) throw ConfigError("map and drift profiles live on different grids");
  const auto K = static_cast<Eigen::Index>(g.count);
  if (factor && (factor->B.rows() != K || factor->B.cols() != K)) {
    throw ConfigError("diffusion factor does not match the grid");
  }
  FieldTables t;
  t.m.assign(m_values.begin(), m_values.end());
  t.x.resize(t.m.size());
  const double L = g.length();
  for (std::size_t k = 0; k < t.m.size(); ++k) {
    double m = t.m[k];
    if (m < map.lo() || m > map.hi()) {
      ++t.clamped;
      m = std::clamp(m, map.lo(), map.hi());
    }
    t.x[k] = g.origin + wrap_1d(map.inverse(m) - g.origin, L);
  }
  const auto diff = drift.diffusion_term();
  t.alpha = resample(g, drift.alpha(), t.x);
  t.diffusion = resample(g, diff, t.x);
  t.convection = resample(g, drift.da1.mean, t.x);
  t.reaction = resample(g, drift.a0.mean, t.x);
  if (factor) {
    t.b.resize(static_cast<Eigen::Index>(t.m.size()), K);
    std::vector<double> col(static_cast<std::size_t>(K));
    for (Eigen::Index j = 0; j < K; ++j) {
      for (Eigen::Index i = 0; i < K; ++i) col[static_cast<std::size_t>(i)] = factor->B(i, j);
      for (std::size_t r = 0; r < t.m.size(); ++r) {
        t.b(static_cast<Eigen::Index>(r), j) = interpolate_periodic(g, col, t.x[r]);
      }
    }
  }
  return t;
}

DoubleWell extract_double_well(const Profile& m_av, const Profile& d2m_av, double kT, const MonotoneMap& map,
                               std::size_t n_points, bool reaction_sign) {
  if (!(m_av.grid == d2m_av.grid) || !(m_av.grid == map.grid())) {
    throw ConfigError("double well: profiles and map must share the grid");
  }
  if (!(kT > 0.0)) throw ConfigError("double well: temperature must be positive");
  DoubleWell w;
  w.reaction_sign = reaction_sign;
  w.m = field_grid(map, n_points);
  w.f_prime.resize(w.m.size());
  const double s = reaction_sign ? -kT : kT;
  for (std::size_t k = 0; k < w.m.size(); ++k) {
    w.f_prime[k] = s * interpolate_periodic(d2m_av.grid, d2m_av.mean, map.inverse(w.m[k]));
  }
  w.f.assign(w.m.size(), 0.0);
  for (std::size_t k = 1; k < w.m.size(); ++k) {
    w.f[k] = w.f[k - 1] + 0.5 * (w.f_prime[k] + w.f_prime[k - 1]) * (w.m[k] - w.m[k - 1]);
  }
  return w;
}

double MollifiedStep::operator()(double x) const {
  const double rc = rc_factor;
  const double z = std::clamp((rising ? x - center : center - x) / epsilon, -rc, rc);
  const double e = std::erf(rc / std::numbers::sqrt2);
  return m_lo + (m_hi - m_lo) * (std::erf(z / std::numbers::sqrt2) + e) / (2.0 * e);
}

MollifiedStep mollified_step(std::pair<double, double> levels, const Mollifier& mollifier, double center,
                             bool rising) {
  if (!(levels.first < levels.second)) throw ConfigError("mollified step needs m_lo < m_hi");
  mollifier.validate();
  return {levels.first, levels.second, mollifier.epsilon, mollifier.rc_factor, center, rising};
}

namespace {

struct ScaleProblem {
  const Profile& approx;
  std::vector<double> x, ref;

  void residual(double c0, double c1, std::vector<double>& r) const {
    r.resize(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) {
      const double y = x[k] + (c1 - 1.0) * (x[k] - c0);
      r[k] = interpolate_periodic(approx.grid, approx.mean, y) - ref[k];
    }
  }
  double cost(double c0, double c1, std::vector<double>& r) const {
    residual(c0, c1, r);
    double s = 0.0;
    for (double v : r) s += v * v;
    return s;
  }
};

}  // namespace

ScaleFit affine_scale_fit(const Profile& reference, const Profile& approximant, const ScaleFitOptions& opt) {
  if (reference.mean.size() != reference.grid.count || approximant.mean.size() != approximant.grid.count) {
    throw ConfigError("scale fit: profile does not match its grid");
  }
  if (!(opt.m0 < opt.m1)) throw ConfigError("scale fit: need m0 < m1");
  ScaleProblem prob{approximant, {}, {}};
  for (std::size_t k = 0; k < reference.grid.count; ++k) {
    const double m = reference.mean[k], x = reference.grid.x(k);
    if (m < opt.m0 || m > opt.m1) continue;
    if (opt.x_window && (x < opt.x_window->first || x > opt.x_window->second)) continue;
    prob.x.push_back(x);
    prob.ref.push_back(m);
  }
  const std::size_t n = prob.x.size();
  if (n < 3) throw ConfigError("scale fit: fewer than three reference points in the window");

  const auto [xmin, xmax] = std::minmax_element(prob.x.begin(), prob.x.end());
  const double centre = 0.5 * (*xmin + *xmax);
  const double half = std::max(0.5 * (*xmax - *xmin), reference.grid.spacing);
  double scale = 0.0;
  for (double v : prob.ref) scale = std::max(scale, std::abs(v));
  const double exact = 1e-28 * static_cast<double>(n) * std::max(1.0, scale * scale);

  std::vector<double> r;
  double best = std::numeric_limits<double>::infinity(), b0 = centre, b1 = 1.0;
  for (int i = 4; i <= 120; ++i) {
    const double c1 = i / 20.0;
    for (int j = 0; j <= 40; ++j) {
      const double c0 = centre + (j / 20.0 - 1.0) * half;
      const double c = prob.cost(c0, c1, r);
      if (c < best) {
        best = c;
        b0 = c0;
        b1 = c1;
      }
    }
  }
  ScaleFit out;
  out.points = n;
  out.c0 = b0;
  out.c1 = b1;
  out.residual = std::sqrt(best / static_cast<double>(n));
  if (best <= exact) {
    out.converged = true;
    return out;
  }

  // Levenberg-Marquardt with a forward-difference Jacobian
  double p0 = b0, p1 = b1, cost = best, lambda = 1e-3;
  std::vector<double> r0, r1, r2;
  bool converged = false;
  for (int it = 0; it < 200; ++it) {
    prob.residual(p0, p1, r0);
    const double h0 = 1e-7 * std::max(1.0, std::abs(p0)), h1 = 1e-7 * std::max(1.0, std::abs(p1));
    prob.residual(p0 + h0, p1, r1);
    prob.residual(p0, p1 + h1, r2);
    double a00 = 0, a01 = 0, a11 = 0, g0 = 0, g1 = 0;
    for (std::size_t k = 0; k < n; ++k) {
      const double j0 = (r1[k] - r0[k]) / h0, j1 = (r2[k] - r0[k]) / h1;
      a00 += j0 * j0;
      a01 += j0 * j1;
      a11 += j1 * j1;
      g0 += j0 * r0[k];
      g1 += j1 * r0[k];
    }
    bool stepped = false;
    for (int tries = 0; tries < 20 && !stepped; ++tries) {
      const double m00 = a00 * (1.0 + lambda), m11 = a11 * (1.0 + lambda);
      const double det = m00 * m11 - a01 * a01;
      if (!(std::abs(det) > 0.0)) {
        lambda *= 10.0;
        continue;
      }
      const double d0 = -(m11 * g0 - a01 * g1) / det;
      const double d1 = -(m00 * g1 - a01 * g0) / det;
      const double c = prob.cost(p0 + d0, p1 + d1, r);
      if (c < cost) {
        const double rel = std::abs(d0) / std::max(1.0, std::abs(p0)) + std::abs(d1) / std::max(1.0, std::abs(p1));
        const double drop = cost - c;
        p0 += d0;
        p1 += d1;
        cost = c;
        lambda = std::max(lambda / 10.0, 1e-12);
        stepped = true;
        if (rel < 1e-12 || drop <= 1e-14 * cost || cost <= exact) converged = true;
      } else {
        lambda *= 10.0;
      }
    }
    if (!stepped) {
      // no descent direction left: a minimum up to the Jacobian accuracy
      converged = std::sqrt(g0 * g0 + g1 * g1) <= 1e-6 * std::max(1.0, std::sqrt(cost));
      break;
    }
    if (converged) break;
  }
  if (!converged || !(p1 > 0.0)) return out;  // best grid point, flagged
  out.c0 = p0;
  out.c1 = p1;
  out.residual = std::sqrt(cost / static_cast<double>(n));
  out.converged = true;
  return out;
}

double spatial_variance(std::span<const double> values) {
  if (values.empty()) return 0.0;
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double s = 0.0;
  for (double v : values) s += (v - mean) * (v - mean);
  return s / static_cast<double>(values.size());
}

LineFit variance_decay_fit(const std::vector<std::pair<double, double>>& windows) {
  if (windows.size() < 3) throw ConfigError("variance decay fit needs at least three windows");
  std::vector<std::pair<double, double>> pts;
  for (const auto& [T, var] : windows) {
    if (!(T > 0.0) || !(var > 0.0)) throw NumericalError("variance decay fit needs positive windows and variances");
    pts.emplace_back(std::log(T), std::log(var));
  }
  return least_squares_line(pts);
}

}  // namespace mdpf
