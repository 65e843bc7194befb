// Acceptance checks. One PASS/FAIL line per criterion; exit status 1 when any
// criterion fails. `--slow` runs the two-phase pipeline instead of the quick
// set, `--all` runs everything, `--only N` a single criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstring>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mdpf/builder.hpp"
#include "mdpf/coarsegrain.hpp"
#include "mdpf/dynamics.hpp"
#include "mdpf/errors.hpp"
#include "mdpf/observables.hpp"
#include "mdpf/potential.hpp"
#include "oracles.hpp"

using namespace mdpf;

namespace {

// Tolerances, fixed here.
constexpr double kPotentialTol = 1e-3;
constexpr double kForceTol = 1e-12;
constexpr double kForceSumTol = 1e-10;  // times N
constexpr double kDriftTol = 1e-4;
constexpr double kKernelTol = 1e-10;
constexpr double kVarianceTol = 0.03;
constexpr double kLatticeTol = 1e-9;
constexpr double kNominalR0Tol = 0.02;
constexpr double kMollRatioTol = 1e-12;
constexpr double kMollDerivTol = 1e-8;
constexpr double kMeltTol = 5e-4;
constexpr double kFactorTol = 1e-10;
constexpr double kExactTol = 1e-12;
constexpr double kWellTol = 1e-4;
constexpr double kSlopeLo = -1.4, kSlopeHi = -0.6;
constexpr double kIdealGasTol = 0.05;
// liquid g(r): hot crystal at T = 2.9 sits near 0.12, the quenched liquid
// near 0.21
constexpr double kLiquidRatio = 0.16;
// layer-frequency amplitude of m_av in the bulk solid, relative to the
// plateau gap
constexpr double kOscShown = 3e-4;
constexpr double kOscGone = 1e-4;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

using clk = std::chrono::steady_clock;

// ---------------------------------------------------------------- 1
Outcome potential_values() {
  const Exp6Params par;
  const oracle::Exp6 o;
  const double v1 = exp6_eval(1.0, par).value;
  const double v1_ref = (double)o.raw(1.0L);
  // minimum of the library potential by bisection on its derivative
  double lo = 1.0, hi = 1.3;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (exp6_eval(mid, par).d1 < 0 ? lo : hi) = mid;
  }
  const double rmin = 0.5 * (lo + hi), depth = exp6_eval(rmin, par).value;
  const oracle::ld rmin_ref = oracle::exp6_minimum(o);
  const double depth_ref = (double)o.raw(rmin_ref);
  const ShiftedExp6 s(par);
  const auto table = PotentialTable::build(par);
  const PairTerms at_cut = s(par.r_cut), tab_cut = table(par.r_cut);
  const PairTerms below = s(std::nextafter(par.r_cut, 0.0));
  const bool ok = std::abs(v1 - v1_ref) <= kPotentialTol && std::abs(rmin - (double)rmin_ref) <= kPotentialTol &&
                  std::abs(depth - depth_ref) <= kPotentialTol && std::abs(v1 - -0.0377) <= kPotentialTol &&
                  std::abs(rmin - 1.13) <= 5e-3 && at_cut.value == 0.0 && at_cut.d1 == 0.0 &&
                  tab_cut.value == 0.0 && tab_cut.d1 == 0.0 && std::abs(below.value) < 1e-15 &&
                  std::abs(below.d1) < 1e-12;
  return {ok, fmt("Phi(1)=%.7f (ref %.7f), min %.5f at r=%.5f (ref %.5f at %.5f), shifted at r_cut: %g %g, "
                  "just below: %.1e %.1e",
                  v1, v1_ref, depth, rmin, depth_ref, (double)rmin_ref, at_cut.value, at_cut.d1, below.value,
                  below.d1)};
}

// ---------------------------------------------------------------- 2
Outcome force_correctness() {
  const ShiftedExp6 pot(Exp6Params{});
  const oracle::Exp6 o;
  struct Setup {
    std::size_t n;
    Vec3 box;
  };
  const Setup setups[] = {{2, {6.5, 6.5, 6.5}}, {50, {7, 7, 7}}, {500, {8.5, 8.5, 8.5}}};
  double worst = 0, worst_sum = 0, worst_oracle = 0;
  int configs = 0;
  for (int k = 0; k < 20; ++k) {
    const Setup& s = setups[k % 3];
    const Configuration c = oracle::random_config(s.n, s.box, 0.8, 500 + k);
    const ForceField cell = compute_forces(c, pot);
    const ForceField brute = brute_force_reference(c, pot);
    const oracle::Brute ob = oracle::brute(c, o);
    Vec3 sum{};
    for (std::size_t j = 0; j < c.size(); ++j) {
      for (int d = 0; d < 3; ++d) {
        worst = std::max(worst, std::abs(cell.forces[j][d] - brute.forces[j][d]));
        worst_oracle = std::max(worst_oracle, std::abs(cell.forces[j][d] - ob.F[j][d]));
      }
      sum += cell.forces[j];
    }
    worst_sum = std::max(worst_sum, norm(sum) / (double)c.size());
    ++configs;
  }
  const bool ok = worst <= kForceTol && worst_sum <= kForceSumTol;
  return {ok, fmt("%d configurations, max |F_cell - F_brute| = %.2e, max |sum F|/N = %.2e, "
                  "long-double oracle max diff %.2e",
                  configs, worst, worst_sum, worst_oracle)};
}

// ---------------------------------------------------------------- 3
Outcome drift_and_kernel() {
  const ShiftedExp6 pot(Exp6Params{});
  const oracle::Exp6 o;
  const Mollifier m = Mollifier::with_constant(1.0, 6.0, 1.0);
  const oracle::Moll om{1, 6, 1};
  const double kT = 2.9;
  const Grid g = Grid::with_spacing(7.0, 0.25);
  const auto gx = oracle::grid_points(g);
  double worst_drift = 0, worst_kernel = 0;
  int done = 0, skipped = 0;
  for (std::uint64_t seed = 1; done < 10; ++seed) {
    const auto c = oracle::random_config(50, {7, 7, 7}, 0.85, 9000 + seed);
    if (!oracle::fd_safe(c, gx, 6.0L, 3.0L)) {
      ++skipped;
      continue;
    }
    ++done;
    PairForces pairs;
    const ForceField f = compute_forces(c, pot, 1, &pairs);
    const auto alpha = drift_profiles(c, f, pairs, g, m, kT).alpha();
    const auto want = oracle::ito_drift_fd(c, o, om, gx, (oracle::ld)kT);
    double scale = 0, err = 0;
    for (std::size_t k = 0; k < g.count; ++k) {
      scale = std::max(scale, (double)std::fabs(want[k]));
      err = std::max(err, (double)std::fabs(alpha[k] - want[k]));
    }
    worst_drift = std::max(worst_drift, err / scale);

    const BandMatrix b = diffusion_kernel(c, f, pairs, g, m, kT, 3.0);
    const auto gram = oracle::gram_kernel(c, o, om, gx, (oracle::ld)kT);
    double ks = 0, ke = 0;
    for (std::size_t i = 0; i < g.count; ++i)
      for (std::size_t j = 0; j < g.count; ++j) {
        ks = std::max(ks, (double)std::fabs(gram[i][j]));
        ke = std::max(ke, (double)std::fabs(b.at(i, j) - gram[i][j]));
      }
    worst_kernel = std::max(worst_kernel, ke / ks);
  }
  const bool ok = worst_drift <= kDriftTol && worst_kernel <= kKernelTol;
  return {ok, fmt("%d configurations (%d skipped near a cutoff), drift rel. max error %.2e, kernel rel. max "
                  "error %.2e",
                  done, skipped, worst_drift, worst_kernel)};
}

// ---------------------------------------------------------------- 4
Outcome euler_maruyama() {
  // F = 0: displacement statistics of the noise alone
  Configuration c;
  c.box.lengths = {50, 50, 50};
  const std::size_t n = 10;
  for (std::size_t j = 0; j < n; ++j) c.positions.push_back({5.0 * j, 25, 25});
  ForceField zero;
  zero.forces.assign(n, {});
  zero.energy.assign(n, 0);
  zero.divergence.assign(n, 0);
  IntegratorParams p;
  p.dt = 1e-4;
  p.temperature = 2.9;
  RngState rng = RngState::create(42, n);
  WeightedStats st(3);
  for (int step = 0; step < 100000; ++step) {
    const Configuration next = em_step(c, zero, p, rng);
    for (std::size_t j = 0; j < n; ++j) {
      const Vec3 d = min_image(c.box, next.positions[j] - c.positions[j]);
      const double v[3] = {d.x, d.y, d.z};
      st.add(v);
    }
    c = next;
  }
  const double want = 2 * p.k_B * p.temperature * p.dt;
  double worst = 0;
  for (double v : st.variance()) worst = std::max(worst, std::abs(v / want - 1));

  // T = 0: explicit gradient descent, step by step
  const ShiftedExp6 pot(Exp6Params{});
  const Configuration start = oracle::random_config(40, {7, 7, 7}, 0.9, 77);
  IntegratorParams q;
  q.dt = 1e-4;
  q.temperature = 0;
  q.n_steps = 200;
  q.sample_every = 1000000;
  const Checkpoint out = run_trajectory(start_state(start, 5), q, pot);
  Configuration manual = start;
  double e_prev = total_potential_energy(manual, pot);
  bool descending = true;
  for (int k = 0; k < 200; ++k) {
    const ForceField f = compute_forces(manual, pot);
    for (std::size_t j = 0; j < manual.size(); ++j)
      manual.positions[j] = wrap(manual.box, manual.positions[j] + f.forces[j] * q.dt);
    const double e = total_potential_energy(manual, pot);
    descending &= e <= e_prev;
    e_prev = e;
  }
  const bool same = manual.positions == out.config.positions;
  const bool ok = worst <= kVarianceTol && same && descending;
  return {ok, fmt("noise variance within %.2f%% of 2 kT dt over 1e5 steps; T=0 run %s manual descent, energy %s",
                  100 * worst, same ? "bitwise equal to" : "DIFFERS from",
                  descending ? "non-increasing" : "INCREASED")};
}

// ---------------------------------------------------------------- 5
Outcome fcc_geometry() {
  const double rho = 1.296;
  const double r0_formula = std::cbrt(4.0 / rho) / std::sqrt(2.0);
  bool ok = std::abs(fcc_nearest_neighbor(rho) - r0_formula) <= kLatticeTol;
  std::string detail;
  for (auto tag : {Orientation::Tag::O1, Orientation::Tag::O2}) {
    const Orientation orient = Orientation::make(tag);
    const SimBox hint = tag == Orientation::Tag::O1 ? SimBox{{8.7, 7.3, 7.3}} : SimBox{{10, 8.2, 7.2}};
    const Configuration c = build_fcc(orient, hint, rho);
    double closest = 1e300;
    std::vector<int> coord(c.size(), 0);
    for (std::size_t i = 0; i < c.size(); ++i)
      for (std::size_t j = i + 1; j < c.size(); ++j) {
        const double r = norm(min_image(c.box, c.positions[i] - c.positions[j]));
        closest = std::min(closest, r);
        if (r < 1.2 * r0_formula) {
          ++coord[i];
          ++coord[j];
        }
      }
    std::vector<double> xs;
    for (const auto& p : c.positions) xs.push_back(p.x);
    std::sort(xs.begin(), xs.end());
    std::vector<double> layers;
    for (double x : xs)
      if (layers.empty() || x - layers.back() > 1e-6) layers.push_back(x);
    const double want = (tag == Orientation::Tag::O1 ? std::sqrt(0.5) : std::sqrt(2.0 / 3.0)) * r0_formula;
    double spacing_err = 0;
    for (std::size_t k = 1; k < layers.size(); ++k)
      spacing_err = std::max(spacing_err, std::abs(layers[k] - layers[k - 1] - want));
    const bool all12 = std::all_of(coord.begin(), coord.end(), [](int v) { return v == 12; });
    ok &= std::abs(closest - r0_formula) <= kLatticeTol && all12 && spacing_err <= kLatticeTol &&
          std::abs(closest - 1.02) <= kNominalR0Tol;
    detail += fmt("%s: N=%zu r0=%.10f coord12=%s layer spacing %.6f (err %.1e); ", orient.name().c_str(), c.size(),
                  closest, all12 ? "yes" : "NO", want, spacing_err);
  }
  detail += fmt("formula r0=%.7f, nominal 1.0296 differs by %.1e", r0_formula, std::abs(r0_formula - 1.0296));
  return {ok, detail};
}

// ---------------------------------------------------------------- 6
Outcome mollifier_checks() {
  bool ok = true;
  double worst_ratio = 0, worst_d = 0;
  for (double eps : {0.45, 0.7, 1.0, 2.0}) {
    const Mollifier m = Mollifier::with_constant(eps, 6.0, 3.7);
    // eta at R_c from inside; at R_c itself the truncation gives zero
    const double inside = m(std::nextafter(m.cutoff(), 0.0)).value / m(0).value;
    worst_ratio = std::max(worst_ratio, std::abs(inside / std::exp(-18.0) - 1));
    ok &= m(m.cutoff()).value == 0.0;
    const double h = 1e-5 * eps;
    for (int k = 0; k <= 200; ++k) {
      const double x = (-5.9 + 11.8 * k / 200.0) * eps;
      const double fd1 = (m(x + h).value - m(x - h).value) / (2 * h);
      const double fd2 = (m(x + h).d1 - m(x - h).d1) / (2 * h);
      // compare at the scale of the derivative itself
      worst_d = std::max({worst_d, std::abs(m(x).d1 - fd1) * eps / m.c, std::abs(m(x).d2 - fd2) * eps * eps / m.c});
    }
  }
  ok &= worst_ratio <= kMollRatioTol && worst_d <= kMollDerivTol;
  return {ok, fmt("eta(R_c-)/eta(0) = exp(-18) = %.4e to %.1e relative, derivative vs finite differences %.1e",
                  std::exp(-18.0), worst_ratio, worst_d)};
}

// ---------------------------------------------------------------- 7
Outcome melt_fit() {
  const double Tm = 2.9;
  std::vector<std::pair<double, double>> solid, liquid;
  for (double T : {2.5, 2.7, 3.1, 3.3}) {
    solid.push_back({T, 0.7714 + 0.011 * (T - Tm)});
    liquid.push_back({T, 0.8060 + 0.014 * (T - Tm)});
  }
  const CoexistenceFit f = meltpoint_fit(solid, liquid, Tm);
  const bool ok = std::abs(f.liquid_density - 1.241) <= kMeltTol && std::abs(f.solid_density - 1.296) <= kMeltTol &&
                  std::abs(f.combined_va - 0.7883) <= kMeltTol && std::abs(f.combined_density - 1.269) <= kMeltTol;
  return {ok, fmt("rho_l=%.5f rho_s=%.5f combined Va=%.5f rho=%.5f", f.liquid_density, f.solid_density,
                  f.combined_va, f.combined_density)};
}

// ---------------------------------------------------------------- 8
Outcome factorization() {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1, 1);
  double worst = 0;
  int with_negative = 0;
  for (int t = 0; t < 20; ++t) {
    const std::size_t K = 20 + rng() % 181;
    const std::size_t w = 1 + rng() % 25;
    BandMatrix b(K, w, 0.1);
    for (std::size_t i = 0; i < K; ++i)
      for (std::size_t d = 0; d <= b.bandwidth(); ++d)
        if (!b.dense() || i + d < K) b.add_symmetric(i, (i + d) % K, u(rng));
    // shift the spectrum so that its bottom lands just below zero
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(to_dense(b));
    const double lmin = es.eigenvalues()(0);
    const double lmax = es.eigenvalues()(K - 1) - lmin;
    const double inject = 1e-10 * lmax * (0.2 + 0.8 * (u(rng) + 1) / 2);
    for (std::size_t i = 0; i < K; ++i) b.add_symmetric(i, i, -lmin - inject);
    const Eigen::MatrixXd A = to_dense(b);
    const DiffusionFactor f = factor_diffusion(b);
    if (f.report.dropped > 0) ++with_negative;
    const double resid = (f.B * f.B.transpose() - A).norm();
    worst = std::max(worst, std::abs(resid - f.report.dropped_mass) / A.norm());
  }
  const DiffusionFactor id = factor_diffusion(Eigen::MatrixXd::Identity(50, 50));
  const double id_err = (id.B * id.B.transpose() - Eigen::MatrixXd::Identity(50, 50)).norm();
  Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(60, -1, 2);
  const Eigen::MatrixXd r1 = v * v.transpose();
  const DiffusionFactor rf = factor_diffusion(r1);
  const double r1_err = (rf.B * rf.B.transpose() - r1).norm() / r1.norm();
  const bool ok = worst <= kFactorTol && id_err <= kExactTol && r1_err <= kExactTol && with_negative == 20;
  return {ok, fmt("20 band matrices (%d with dropped eigenvalues): | ||BB^T - A||_F - dropped mass | / ||A||_F "
                  "<= %.1e; identity %.1e, rank-1 %.1e",
                  with_negative, worst, id_err, r1_err)};
}

// ---------------------------------------------------------------- 9
Outcome double_well() {
  const double w = 1.5, kT = 2.9, a = std::numbers::sqrt2 * w;
  const Grid g = Grid::with_spacing(60, 0.005, -30);
  std::vector<double> m(g.count), d2(g.count);
  for (std::size_t k = 0; k < g.count; ++k) {
    const double x = g.x(k);
    m[k] = std::tanh(x / a) - std::tanh((x - 30) / a) - std::tanh((x + 30) / a);
    d2[k] = (m[k] * m[k] * m[k] - m[k]) / (w * w);
  }
  const Profile pm = Profile::single(g, m), pd = Profile::single(g, d2);
  InterfaceOptions opt;
  const auto [lower, upper] = plateau_levels(pm.mean);
  opt.solid_level = lower;
  opt.liquid_level = upper;
  opt.delta_fraction = 0.0;
  const auto maps = invert_profile(pm, opt);
  const MonotoneMap* up = nullptr;
  for (const auto& mp : maps)
    if (mp.increasing()) up = &mp;
  if (!up) return {false, "no rising interface found"};
  const DoubleWell dw = extract_double_well(pm, pd, kT, *up, 1001);
  const std::size_t n = dw.m.size();
  double scale = 0;
  for (double v : dw.f_prime) scale = std::max(scale, std::abs(v));
  const double margin = 0.02 * (dw.m.back() - dw.m.front());
  double err = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double v = dw.m[k];
    if (v < dw.m.front() + margin || v > dw.m.back() - margin) continue;
    err = std::max(err, std::abs(dw.f_prime[k] - kT * (v * v * v - v) / (w * w)) / scale);
  }
  // shape: minima at the two ends, one interior maximum
  int sign_changes = 0;
  for (std::size_t k = 1; k + 1 < n; ++k)
    if ((dw.f[k] - dw.f[k - 1]) * (dw.f[k + 1] - dw.f[k]) < 0) ++sign_changes;
  const auto top = std::max_element(dw.f.begin(), dw.f.end()) - dw.f.begin();
  const double fmin_inner = *std::min_element(dw.f.begin() + 1, dw.f.end() - 1);
  const bool ends_low = dw.f.front() < fmin_inner && dw.f.back() < fmin_inner;
  const bool ok = err <= kWellTol && sign_changes == 1 && ends_low && std::abs(dw.m[top]) < 0.01;
  return {ok, fmt("f' rel. error %.1e inside 2%% margins; %d interior extremum at m=%.4f; minima at m=%.6f and %.6f "
                  "(plateaus %.6f, %.6f)",
                  err, sign_changes, dw.m[top], dw.m.front(), dw.m.back(), lower, upper)};
}

// ---------------------------------------------------------------- 11
Outcome variance_decay() {
  const double kT = 2.9, L = 6.5, dt = 1e-5;
  const int replicas = 400, stride = 10;
  const ShiftedExp6 pot(Exp6Params{});
  const Grid g = Grid::with_spacing(L, 0.25);
  const Mollifier moll = Mollifier::with_constant(1.0, 6.0, 1.0);
  const std::vector<double> windows{0.01, 0.04, 0.16, 0.64};
  std::vector<double> var(windows.size(), 0.0);
  for (int rep = 0; rep < replicas; ++rep) {
    Configuration c;
    c.box.lengths = {L, L, L};
    c.positions = {{1, 1, 1}, {2.13, 1, 1}};
    IntegratorParams p;
    p.dt = dt;
    p.temperature = kT;
    p.seed = 1000 + rep;
    p.n_steps = 20000;  // burn-in
    p.sample_every = 1u << 30;
    Checkpoint s = run_trajectory(start_state(c, p.seed), p, pot);
    p.n_steps = stride;
    std::vector<double> sum(g.count, 0.0);
    long samples = 0;
    std::size_t w = 0;
    const long total = std::lround(windows.back() / dt);
    for (long step = 0; step < total; step += stride) {
      PairForces pairs;
      const ForceField f = compute_forces(s.config, pot, 1, &pairs);
      const DriftSample d = drift_sample(s.config, f, pairs, g, moll, kT);
      for (std::size_t k = 0; k < g.count; ++k) sum[k] += d.alpha[k];
      ++samples;
      s = run_trajectory(s, p, pot);
      if (w < windows.size() && step + stride >= std::lround(windows[w] / dt)) {
        std::vector<double> avg(sum);
        for (double& v : avg) v /= (double)samples;
        var[w] += spatial_variance(avg) / replicas;
        ++w;
      }
    }
  }
  std::vector<std::pair<double, double>> pts;
  std::string detail;
  for (std::size_t w = 0; w < windows.size(); ++w) {
    pts.push_back({windows[w], var[w]});
    detail += fmt("T=%.2f var=%.3g; ", windows[w], var[w]);
  }
  const double slope = variance_decay_fit(pts).slope;
  return {slope >= kSlopeLo && slope <= kSlopeHi, detail + fmt("log-log slope %.3f", slope)};
}

// ---------------------------------------------------------------- 12
Outcome rdf_checks() {
  // ideal gas
  const double L = std::cbrt(2000 / 1.269);
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0, L);
  std::vector<Configuration> gas(50);
  for (auto& c : gas) {
    c.box.lengths = {L, L, L};
    for (int j = 0; j < 2000; ++j) c.positions.push_back({u(rng), u(rng), u(rng)});
  }
  RdfOptions o;
  o.bins = 100;
  o.r_max = 5.0;
  const RdfResult ig = rdf(gas, o);
  double dev = 0;
  for (std::size_t b = 0; b < o.bins; ++b)
    if (ig.r[b] - 0.5 * ig.bin_width >= 0.5) dev = std::max(dev, std::abs(ig.g[b] - 1));

  // liquid: diluted lattice melted at twice the melting temperature, then
  // re-equilibrated at T = 2.9
  const auto table = PotentialTable::build(Exp6Params{});
  Configuration c = build_fcc(Orientation::make(Orientation::Tag::O1), SimBox{{7.3, 7.3, 7.3}}, 1.296);
  c = dilute_to_density(c, 1.241, 3);
  MeltQuenchParams mq;
  mq.melt.dt = mq.quench.dt = 1e-4;
  mq.melt.temperature = 5.8;
  mq.quench.temperature = 2.9;
  mq.melt.n_steps = 20000;
  mq.quench.n_steps = 3000;
  mq.melt.seed = 4;
  mq.quench.seed = 5;
  mq.check_every = 500;
  const MeltQuenchResult liq = melt_quench(c, table, mq);
  IntegratorParams p = mq.quench;
  p.n_steps = 20 * 100;
  p.sample_every = 100;
  std::vector<Configuration> samples;
  TrajectorySinks sinks;
  sinks.on_sample = [&](std::uint64_t, const Configuration& s) { samples.push_back(s); };
  run_trajectory(start_state(liq.config, 6), p, table, sinks);
  RdfOptions lo;
  lo.bins = 120;
  lo.r_max = 3.0;
  const LiquidCheck chk = assess_liquid(rdf(samples, lo), kLiquidRatio);
  const bool liquid_ok = chk.liquid && chk.first_peak_r > 0.9 && chk.first_peak_r < 1.15;
  const bool ok = dev <= kIdealGasTol && liquid_ok;
  return {ok, fmt("ideal gas max |g-1| beyond 0.5: %.3f; liquid N=%zu melted after %llu steps: first peak %.2f at "
                  "%.3f, first minimum %.2f at %.3f (ratio %.2f), %d second-shell peak(s)",
                  dev, liq.config.size(), (unsigned long long)liq.melt_steps, chk.first_peak_g, chk.first_peak_r,
                  chk.first_min_g, chk.first_min_r, chk.first_min_g / chk.first_peak_g, chk.second_shell_peaks)};
}

// ---------------------------------------------------------------- 10
// Amplitude of the Fourier component at wave number k of the values on grid
// points inside [a, b], after removing a linear trend. A Hann window keeps
// leakage from the slow variation of the averaged profile out of the result.
double fourier_amplitude(const Profile& p, double k, double a, double b) {
  std::vector<double> x, v;
  std::vector<std::pair<double, double>> pts;
  for (std::size_t q = 0; q < p.grid.count; ++q)
    if (p.grid.x(q) >= a && p.grid.x(q) <= b) {
      x.push_back(p.grid.x(q));
      v.push_back(p.mean[q]);
      pts.push_back({x.back(), v.back()});
    }
  const LineFit trend = least_squares_line(pts);
  const std::size_t n = x.size();
  std::complex<double> s = 0;
  double wsum = 0;
  for (std::size_t q = 0; q < n; ++q) {
    const double w = 0.5 - 0.5 * std::cos(2 * std::numbers::pi * q / (n - 1));
    s += w * (v[q] - trend.at(x[q])) * std::exp(std::complex<double>(0, -k * x[q]));
    wsum += w;
  }
  return 2.0 * std::abs(s) / wsum;
}

Outcome two_phase_pipeline() {
  const auto t0 = clk::now();
  const auto table = PotentialTable::build(Exp6Params{});
  const double T = 2.9, rho_s = 1.296, rho_l = 1.241;
  const Orientation o1 = Orientation::make(Orientation::Tag::O1);
  const double a = fcc_lattice_constant(rho_s);
  const SimBox slab{{12 * a, 5 * a, 5 * a}};

  // solid slab, thermalized
  Configuration solid = build_fcc(o1, slab, rho_s);
  IntegratorParams eq;
  eq.dt = 1e-4;
  eq.temperature = T;
  eq.n_steps = 1000;
  eq.sample_every = 1u << 30;
  solid = run_trajectory(start_state(solid, 21), eq, table).config;

  // liquid slab
  MeltQuenchParams mq;
  mq.melt = eq;
  mq.melt.temperature = 2 * T;
  mq.melt.n_steps = 20000;
  mq.melt.seed = 22;
  mq.quench = eq;
  mq.quench.n_steps = 2000;
  mq.quench.seed = 23;
  mq.check_every = 500;
  const MeltQuenchResult liq = melt_quench(dilute_to_density(build_fcc(o1, slab, rho_s), rho_l, 24), table, mq);

  const double r0 = fcc_nearest_neighbor(rho_s);
  const TwoPhaseResult two = assemble_two_phase(solid, liq.config, r0, 0.8);
  const double Ls = solid.box.lengths.x;
  const double Ltot = two.config.box.lengths.x;
  std::printf("  two-phase: N=%zu (solid %zu), box %.3f x %.3f x %.3f, density %.4f\n", two.config.size(),
              two.solid_count, Ltot, two.config.box.lengths.y, two.config.box.lengths.z, two.config.density());

  // close the voids, then production
  eq.n_steps = 2000;
  Checkpoint state = run_trajectory(start_state(two.config, 25), eq, table);
  IntegratorParams prod = eq;
  prod.dt = 1e-6;
  prod.sample_every = 100;
  prod.n_steps = 200 * prod.sample_every;

  const std::vector<double> eps{1.0, 0.45, 0.70};
  std::vector<Grid> grids;
  std::vector<Mollifier> molls;
  std::vector<ProfileAccumulator> accs;
  for (double e : eps) {
    grids.push_back(Grid::with_spacing(Ltot, e / 4));
    molls.push_back(Mollifier::density(e, 6.0, two.config.box.cross_section()));
    accs.emplace_back(grids.back());
  }
  // layer wave number of the solid, from particle positions in its bulk
  const double lo_bulk = 0.25 * Ls, hi_bulk = 0.75 * Ls;
  std::vector<double> kpower(401, 0.0);
  const double k0 = 2 * std::numbers::pi / (o1.layer_spacing_factor() * r0);
  std::size_t n_samples = 0;
  TrajectorySinks sinks;
  sinks.on_sample = [&](std::uint64_t, const Configuration& c) {
    const ForceField f = compute_forces(c, table);
    for (std::size_t q = 0; q < eps.size(); ++q) accs[q].add(phase_field_profile(c, f, grids[q], molls[q]).mean);
    for (std::size_t q = 0; q < kpower.size(); ++q) {
      const double k = k0 * (0.85 + 0.3 * q / 400.0);
      std::complex<double> s = 0;
      for (std::size_t j = 0; j < two.solid_count; ++j) {
        const double x = c.positions[j].x;
        if (x >= lo_bulk && x <= hi_bulk) s += std::exp(std::complex<double>(0, k * x));
      }
      kpower[q] += std::norm(s);
    }
    ++n_samples;
  };
  state = run_trajectory(state, prod, table, sinks);
  const double k_layer = k0 * (0.85 + 0.3 * (std::max_element(kpower.begin(), kpower.end()) - kpower.begin()) / 400.0);

  // plateaus and interfaces at eps = 1
  const Profile m1 = accs[0].profile();
  auto window_mean = [](const Profile& p, double a, double b) {
    double s = 0;
    int n = 0;
    for (std::size_t q = 0; q < p.grid.count; ++q)
      if (p.grid.x(q) >= a && p.grid.x(q) <= b) {
        s += p.mean[q];
        ++n;
      }
    return s / n;
  };
  const double solid_level = window_mean(m1, lo_bulk, hi_bulk);
  const double liquid_level = window_mean(m1, Ls + 0.25 * (Ltot - Ls), Ls + 0.75 * (Ltot - Ls));
  std::size_t interfaces = 0, min_nodes = 1u << 30;
  bool monotone_ok = false;
  try {
    const auto maps = invert_profile(m1);
    interfaces = maps.size();
    for (const auto& mp : maps) min_nodes = std::min(min_nodes, mp.interior_nodes());
    monotone_ok = interfaces == 2 && min_nodes >= 3;
  } catch (const NumericalError&) {
  }
  const double gap = liquid_level - solid_level;

  // layer oscillations in the bulk solid
  const double amp45 = fourier_amplitude(accs[1].profile(), k_layer, lo_bulk, hi_bulk) / gap;
  const double amp70 = fourier_amplitude(accs[2].profile(), k_layer, lo_bulk, hi_bulk) / gap;
  const bool ok = n_samples >= 200 && solid_level < liquid_level && monotone_ok && amp45 >= kOscShown &&
                  amp70 <= kOscGone;
  const double secs = std::chrono::duration<double>(clk::now() - t0).count();
  return {ok, fmt("N=%zu, %zu samples at dt=1e-6; eps=1: solid level %.4f, liquid level %.4f, %zu monotone "
                  "interface(s), fewest interior nodes %zu; layer wave number %.3f: oscillation/gap %.2e at "
                  "eps=0.45, %.2e at eps=0.70; %.0f s",
                  two.config.size(), n_samples, solid_level, liquid_level, interfaces,
                  min_nodes == (1u << 30) ? 0 : min_nodes, k_layer, amp45, amp70, secs)};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
  bool slow;
};

}  // namespace

int main(int argc, char** argv) {
  bool slow = false, all = false;
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (!std::strcmp(argv[i], "--slow")) slow = true;
    else if (!std::strcmp(argv[i], "--all")) all = true;
    else if (!std::strcmp(argv[i], "--only") && i + 1 < argc) only = std::atoi(argv[++i]);
    else {
      std::fprintf(stderr, "usage: acceptance [--slow | --all | --only N]\n");
      return 2;
    }
  }
  const std::vector<Criterion> criteria = {
      {1, "potential values", potential_values, false},
      {2, "force correctness", force_correctness, false},
      {3, "drift and diffusion kernel vs oracles", drift_and_kernel, false},
      {4, "Euler-Maruyama statistics", euler_maruyama, false},
      {5, "FCC geometry", fcc_geometry, false},
      {6, "mollifier", mollifier_checks, false},
      {7, "melting-point fit", melt_fit, false},
      {8, "factorization", factorization, false},
      {9, "double-well oracle", double_well, false},
      {10, "two-phase pipeline", two_phase_pipeline, true},
      {11, "variance decay", variance_decay, false},
      {12, "radial distribution", rdf_checks, false},
  };
  int failed = 0, ran = 0;
  for (const auto& c : criteria) {
    if (only ? c.id != only : !(all || c.slow == slow)) continue;
    ++ran;
    const auto t0 = clk::now();
    Outcome r;
    try {
      r = c.run();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(clk::now() - t0).count();
    std::printf("%s  %2d %-40s %s [%.1f s]\n", r.pass ? "PASS" : "FAIL", c.id, c.name, r.detail.c_str(), secs);
    std::fflush(stdout);
    if (!r.pass) ++failed;
  }
  std::printf("%d of %d criteria passed\n", ran - failed, ran);
  return failed ? 1 : 0;
}
