#include "mdpf/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <variant>

#include "CLI11.hpp"
#include "json.hpp"

#include "mdpf/builder.hpp"
#include "mdpf/coarsegrain.hpp"
#include "mdpf/config.hpp"
#include "mdpf/dynamics.hpp"
#include "mdpf/errors.hpp"
#include "mdpf/io.hpp"
#include "mdpf/observables.hpp"
#include "mdpf/potential.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace mdpf {

namespace {

struct Common {
  std::string config_path;
  int workers = 1;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
};

// Everything a subcommand needs once the config is loaded.
struct Context {
  ParsedConfig parsed;
  RunConfig& cfg() { return parsed.config; }
  int workers = 1;
  fs::path out;
  json manifest;
  std::ostream* log = nullptr;

  fs::path output(const std::string& name) {
    manifest["outputs"].push_back(name);
    return out / name;
  }
  void input(const std::string& path) { manifest["inputs"].push_back(path); }
};

using AnyPotential = std::variant<PotentialTable, ShiftedExp6>;

AnyPotential make_potential(const RunConfig& c) {
  if (c.potential.kind == "analytic") return ShiftedExp6(c.potential.params, c.potential.r_min);
  return PotentialTable::build(c.potential.params, c.potential.r_min, c.potential.table_nodes);
}

IntegratorParams integrator(const RunConfig& c, double temperature, std::uint64_t steps, std::uint64_t seed) {
  IntegratorParams p;
  p.dt = c.integration.dt;
  p.temperature = temperature;
  p.k_B = c.integration.k_B;
  p.seed = seed;
  p.n_steps = steps;
  p.sample_every = c.integration.sample_every;
  p.checkpoint_every = c.integration.checkpoint_every;
  p.validate();
  return p;
}

Mollifier make_mollifier(const RunConfig& c, const SimBox& box) {
  const auto& m = c.mollifier;
  if (m.normalization == "density") return Mollifier::density(m.epsilon, m.rc_factor, box.cross_section());
  if (m.normalization == "override") {
    Mollifier out = Mollifier::with_constant(m.epsilon, m.rc_factor, m.c_override);
    out.normalization = Mollifier::Normalization::Override;
    return out;
  }
  return Mollifier::with_constant(m.epsilon, m.rc_factor, 1.0);
}

Grid make_grid(const RunConfig& c, const SimBox& box) {
  if (c.grid.K > 0) return Grid::periodic(box.lengths.x, c.grid.K, c.grid.origin);
  return Grid::with_spacing(box.lengths.x, c.grid.dx, c.grid.origin);
}

json mollifier_json(const Mollifier& m) {
  return {{"epsilon", m.epsilon}, {"rc_factor", m.rc_factor}, {"normalization", m.normalization_name()}, {"c", m.c}};
}

json grid_json(const Grid& g) { return {{"origin", g.origin}, {"dx", g.spacing}, {"K", g.count}}; }

void write_snapshot_out(Context& ctx, const std::string& name, const Configuration& c) {
  write_snapshot(ctx.output(name).string(), c);
}

// --- subcommands ----------------------------------------------------------

void cmd_build_lattice(Context& ctx, std::optional<double> density) {
  auto& c = ctx.cfg();
  const Orientation o = Orientation::parse(c.two_phase.orientation);
  const double rho = density.value_or(c.two_phase.solid_density);
  SimBox hint{c.system.box};
  const Configuration lat = build_fcc(o, hint, rho);
  write_snapshot_out(ctx, "lattice.snap", lat);
  ctx.manifest["result"] = {{"orientation", o.name()},
                            {"density", rho},
                            {"n_particles", lat.size()},
                            {"box", {lat.box.lengths.x, lat.box.lengths.y, lat.box.lengths.z}},
                            {"nearest_neighbor", fcc_nearest_neighbor(rho)}};
}

void cmd_melt_quench(Context& ctx, const std::string& input) {
  auto& c = ctx.cfg();
  Configuration start;
  if (!input.empty()) {
    ctx.input(input);
    start = read_snapshot(input);
  } else {
    start = build_fcc(Orientation::parse(c.two_phase.orientation), SimBox{c.system.box}, c.two_phase.solid_density);
  }
  const std::uint64_t seed = c.integration.seed;
  const std::uint64_t dilute_seed = seed, melt_seed = seed + 1, quench_seed = seed + 2;
  ctx.manifest["derived_seeds"] = {{"dilution", dilute_seed}, {"melt", melt_seed}, {"quench", quench_seed}};
  const std::size_t n0 = start.size();
  if (c.two_phase.liquid_density < start.density()) {
    start = dilute_to_density(start, c.two_phase.liquid_density, dilute_seed);
  }

  MeltQuenchParams mp;
  mp.melt = integrator(c, c.integration.t_high, c.integration.melt_steps, melt_seed);
  mp.quench = integrator(c, c.system.temperature, c.integration.quench_steps, quench_seed);
  mp.check_every = c.integration.check_every;
  mp.min_ratio = c.two_phase.liquid_min_ratio;
  const AnyPotential pot = make_potential(c);
  const MeltQuenchResult res =
      std::visit([&](const auto& p) { return melt_quench(start, p, mp, ctx.workers); }, pot);
  write_snapshot_out(ctx, "liquid.snap", res.config);

  RdfOptions ro;
  ro.bins = mp.rdf_bins;
  ro.r_max = std::min(mp.rdf_r_max, 0.5 * std::min({res.config.box.lengths.x, res.config.box.lengths.y,
                                                   res.config.box.lengths.z}));
  write_csv(ctx.output("rdf_liquid.csv").string(), rdf_table(rdf(std::span(&res.config, 1), ro)));
  ctx.manifest["result"] = {{"particles_before_dilution", n0},
                            {"n_particles", res.config.size()},
                            {"density", res.config.density()},
                            {"melt_steps", res.melt_steps},
                            {"T_high", mp.melt.temperature},
                            {"T_target", mp.quench.temperature},
                            {"first_peak_g", res.melted.first_peak_g},
                            {"first_min_g", res.melted.first_min_g},
                            {"second_shell_peaks", res.melted.second_shell_peaks}};
}

void cmd_assemble(Context& ctx, const std::string& solid_path, const std::string& liquid_path) {
  auto& c = ctx.cfg();
  ctx.input(solid_path);
  ctx.input(liquid_path);
  const Configuration s = read_snapshot(solid_path), l = read_snapshot(liquid_path);
  const TwoPhaseResult r = assemble_two_phase(s, l, c.two_phase.void_width, c.two_phase.min_distance);
  write_snapshot_out(ctx, "two_phase.snap", r.config);
  ctx.manifest["result"] = {{"void_width", c.two_phase.void_width},
                            {"solid_compression", r.solid_factor},
                            {"liquid_compression", r.liquid_factor},
                            {"solid_count", r.solid_count},
                            {"n_particles", r.config.size()},
                            {"density", r.config.density()},
                            {"min_cross_distance", r.min_distance}};
}

void cmd_run(Context& ctx, const std::string& input, const std::string& resume) {
  auto& c = ctx.cfg();
  if (input.empty() == resume.empty()) throw ConfigError("run needs exactly one of --input or --resume");
  Checkpoint start;
  if (!resume.empty()) {
    ctx.input(resume);
    start = read_checkpoint(resume);
    if (start.rng.seed != c.integration.seed) {
      *ctx.log << "note: checkpoint seed " << start.rng.seed << " differs from configured seed; the checkpoint wins\n";
    }
  } else {
    ctx.input(input);
    start = start_state(read_snapshot(input), c.integration.seed);
  }
  if (start.step > c.integration.n_steps) {
    throw ConfigError("checkpoint step " + std::to_string(start.step) + " is past n_steps");
  }
  IntegratorParams p = integrator(c, c.system.temperature, c.integration.n_steps - start.step, start.rng.seed);
  fs::create_directories(ctx.out / "samples");
  std::size_t samples = 0;
  TrajectorySinks sinks;
  sinks.on_sample = [&](std::uint64_t step, const Configuration& conf) {
    char name[64];
    std::snprintf(name, sizeof name, "samples/sample_%012llu.snap", static_cast<unsigned long long>(step));
    write_snapshot((ctx.out / name).string(), conf);
    ++samples;
  };
  const fs::path ckpt = ctx.out / "checkpoint.ckpt";
  sinks.on_checkpoint = [&](const Checkpoint& k) { write_checkpoint(ckpt.string(), k); };
  ctx.manifest["derived_seeds"] = {{"trajectory", start.rng.seed}};
  const AnyPotential pot = make_potential(c);
  const Checkpoint end =
      std::visit([&](const auto& pp) { return run_trajectory(start, p, pp, sinks, ctx.workers); }, pot);
  write_snapshot_out(ctx, "final.snap", end.config);
  write_checkpoint(ctx.output("final.ckpt").string(), end);
  ctx.manifest["result"] = {{"first_step", start.step + 1}, {"last_step", end.step}, {"samples_written", samples},
                            {"time", end.config.time}};
}

void cmd_analyze(Context& ctx, const std::vector<std::string>& inputs, bool kernel) {
  auto& c = ctx.cfg();
  if (inputs.empty()) throw ConfigError("analyze needs at least one snapshot");
  const AnyPotential pot = make_potential(c);
  const double kT = c.integration.k_B * c.system.temperature;
  std::optional<Grid> grid;
  std::optional<Mollifier> moll;
  std::optional<DriftAccumulator> drift;
  std::optional<ProfileAccumulator> dens;
  std::optional<BandAccumulator> band;
  SimBox box0;
  for (const auto& path : inputs) {
    ctx.input(path);
    const Configuration conf = read_snapshot(path);
    if (!grid) {
      box0 = conf.box;
      grid = make_grid(c, conf.box);
      moll = make_mollifier(c, conf.box);
      drift.emplace(*grid, kT);
      dens.emplace(*grid);
      band.emplace(*grid, c.potential.params.r_cut, *moll);
    } else if (!(conf.box.lengths == box0.lengths)) {
      throw ConfigError("snapshot " + path + " has a different box");
    }
    PairForces pairs;
    const ForceField field =
        std::visit([&](const auto& p) { return compute_forces(conf, p, ctx.workers, &pairs); }, pot);
    drift->add(drift_sample(conf, field, pairs, *grid, *moll, kT));
    dens->add(density_profile(conf, *grid, *moll).mean);
    if (kernel) diffusion_kernel_accumulate(conf, field, pairs, *grid, *moll, kT, *band);
  }
  write_csv(ctx.output("drift.csv").string(), drift_table(drift->terms()));
  write_csv(ctx.output("density.csv").string(), profile_table(dens->profile()));
  if (kernel) write_band(ctx.output("kernel.band").string(), band->mean());
  ctx.manifest["n_samples"] = inputs.size();
  ctx.manifest["mollifier"] = mollifier_json(*moll);
  ctx.manifest["grid"] = grid_json(*grid);
  ctx.manifest["kT"] = kT;
}

void cmd_factor(Context& ctx, const std::string& input) {
  ctx.input(input);
  const BandMatrix b = read_band(input);
  const DiffusionFactor f = factor_diffusion(b);
  CsvTable spec{{"index", "eigenvalue", "retained"}, {}};
  for (Eigen::Index k = 0; k < f.spectrum.size(); ++k) {
    spec.rows.push_back({static_cast<double>(k), f.spectrum(k), f.spectrum(k) >= 0.0 ? 1.0 : 0.0});
  }
  write_csv(ctx.output("factor_spectrum.csv").string(), spec);
  write_band(ctx.output("factor_B.band").string(), dense_as_band(f.B, b.spacing()));
  const double err = (f.B * f.B.transpose() - to_dense(b)).norm();
  CsvTable rep{{"dropped", "most_negative", "dropped_mass", "tiny_retained", "frobenius_error"},
               {{static_cast<double>(f.report.dropped), f.report.most_negative, f.report.dropped_mass,
                 static_cast<double>(f.report.tiny_retained), err}}};
  write_csv(ctx.output("factor_report.csv").string(), rep);
  ctx.manifest["result"] = {{"K", b.size()}, {"dropped", f.report.dropped}, {"dropped_mass", f.report.dropped_mass}};
}

InterfaceOptions interface_options(std::optional<double> solid, std::optional<double> liquid) {
  InterfaceOptions o;
  o.solid_level = solid;
  o.liquid_level = liquid;
  return o;
}

void cmd_double_well(Context& ctx, const std::string& input, std::size_t points, bool reaction_sign,
                     std::optional<double> solid, std::optional<double> liquid) {
  auto& c = ctx.cfg();
  ctx.input(input);
  const CsvTable t = read_csv(input);
  const Profile m = profile_from_table(t, "m");
  const Profile d2m = profile_from_table(t, "d2m");
  const double kT = c.integration.k_B * c.system.temperature;
  const auto maps = invert_profile(m, interface_options(solid, liquid));
  json ifaces = json::array();
  for (std::size_t i = 0; i < maps.size(); ++i) {
    const DoubleWell w = extract_double_well(m, d2m, kT, maps[i], points, reaction_sign);
    write_csv(ctx.output("double_well_" + std::to_string(i) + ".csv").string(), double_well_table(w));
    ifaces.push_back({{"x_start", maps[i].x().front()},
                      {"x_end", maps[i].x().back()},
                      {"m_lo", maps[i].lo()},
                      {"m_hi", maps[i].hi()},
                      {"interior_nodes", maps[i].interior_nodes()}});
  }
  ctx.manifest["result"] = {{"interfaces", ifaces}, {"reaction_sign", reaction_sign}, {"kT", kT}};
}

Profile load_profile(const std::string& path, const std::string& column) {
  const CsvTable t = read_csv(path);
  std::string col = column;
  if (col.empty()) col = t.has("m") ? "m" : "mean";
  return profile_from_table(t, col);
}

void cmd_scale_fit(Context& ctx, const std::string& ref, const std::string& approx, const std::string& column,
                   double m0, double m1, std::optional<double> x_lo, std::optional<double> x_hi) {
  ctx.input(ref);
  ctx.input(approx);
  ScaleFitOptions o;
  o.m0 = m0;
  o.m1 = m1;
  if (x_lo || x_hi) {
    o.x_window = {x_lo.value_or(-std::numeric_limits<double>::infinity()),
                  x_hi.value_or(std::numeric_limits<double>::infinity())};
  }
  const ScaleFit f = affine_scale_fit(load_profile(ref, column), load_profile(approx, column), o);
  write_csv(ctx.output("scale_fit.csv").string(),
            CsvTable{{"c0", "c1", "residual", "points", "converged"},
                     {{f.c0, f.c1, f.residual, static_cast<double>(f.points), f.converged ? 1.0 : 0.0}}});
  if (!f.converged) *ctx.log << "warning: refinement did not converge; reporting the best grid point\n";
  ctx.manifest["result"] = {{"c0", f.c0}, {"c1", f.c1}, {"residual", f.residual}, {"converged", f.converged}};
}

void cmd_variance_fit(Context& ctx, const std::string& input) {
  ctx.input(input);
  const LineFit f = variance_decay_fit(pairs_from_table(read_csv(input)));
  write_csv(ctx.output("variance_fit.csv").string(), CsvTable{{"slope", "intercept"}, {{f.slope, f.intercept}}});
  ctx.manifest["result"] = {{"slope", f.slope}};
}

void cmd_meltpoint_fit(Context& ctx, const std::string& solid, const std::string& liquid,
                       std::optional<double> temperature) {
  ctx.input(solid);
  ctx.input(liquid);
  const double T = temperature.value_or(ctx.cfg().system.melting_temperature);
  const CoexistenceFit f = meltpoint_fit(pairs_from_table(read_csv(solid)), pairs_from_table(read_csv(liquid)), T);
  write_csv(ctx.output("coexistence.csv").string(),
            CsvTable{{"temperature", "solid_slope", "solid_intercept", "liquid_slope", "liquid_intercept", "solid_va",
                      "liquid_va", "solid_density", "liquid_density", "combined_va", "combined_density"},
                     {{f.temperature, f.solid.slope, f.solid.intercept, f.liquid.slope, f.liquid.intercept,
                       f.solid_va, f.liquid_va, f.solid_density, f.liquid_density, f.combined_va,
                       f.combined_density}}});
  ctx.manifest["result"] = {{"combined_density", f.combined_density}};
}

void cmd_rdf(Context& ctx, const std::vector<std::string>& inputs, std::size_t bins, double r_max,
             std::optional<double> slab_lo, std::optional<double> slab_hi) {
  if (inputs.empty()) throw ConfigError("rdf needs at least one snapshot");
  if (slab_lo.has_value() != slab_hi.has_value()) throw ConfigError("--slab-lo and --slab-hi go together");
  std::vector<Configuration> confs;
  for (const auto& p : inputs) {
    ctx.input(p);
    confs.push_back(read_snapshot(p));
  }
  RdfOptions o;
  o.bins = bins;
  o.r_max = r_max;
  if (slab_lo) o.slab = std::make_pair(*slab_lo, *slab_hi);
  write_csv(ctx.output("rdf.csv").string(), rdf_table(rdf(confs, o)));
  ctx.manifest["n_samples"] = inputs.size();
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"MD to phase-field coarse-graining toolkit", "mdpf"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", kVersion);
  Common common;
  app.add_option("--config", common.config_path, "Run configuration file");
  app.add_option("--workers", common.workers, "Worker threads (1 is bitwise reproducible)")->check(CLI::PositiveNumber);
  app.add_option("--out", common.out_dir, "Output directory (overrides [outputs] directory)");
  app.add_option("--seed", common.seed, "Seed (overrides [integration] seed)");

  std::optional<double> density, temperature, solid_level, liquid_level, x_lo, x_hi, slab_lo, slab_hi;
  std::string input, resume, solid, liquid, reference, approximant, column;
  std::vector<std::string> inputs;
  std::size_t points = 256, bins = 100;
  double m0 = 0.0, m1 = 0.0, r_max = 3.0;
  bool reaction_sign = false, no_kernel = false;

  auto* build = app.add_subcommand("build-lattice", "Perfect FCC lattice in orientation O1 or O2");
  build->add_option("--density", density, "Number density (default [two_phase] solid_density)");
  auto* mq = app.add_subcommand("melt-quench", "Dilute, melt and re-equilibrate a lattice into a liquid");
  mq->add_option("--input", input, "Starting snapshot (default: lattice from the config)");
  auto* asm_ = app.add_subcommand("assemble", "Join a solid and a liquid slab with voids");
  asm_->add_option("--solid", solid, "Solid slab snapshot")->required();
  asm_->add_option("--liquid", liquid, "Liquid slab snapshot")->required();
  auto* run = app.add_subcommand("run", "Smoluchowski dynamics with samples and checkpoints");
  run->add_option("--input", input, "Starting snapshot");
  run->add_option("--resume", resume, "Checkpoint to resume from");
  auto* an = app.add_subcommand("analyze", "Averaged drift profiles and diffusion kernel over snapshots");
  an->add_option("snapshots", inputs, "Snapshot files")->required();
  an->add_flag("--no-kernel", no_kernel, "Skip the diffusion kernel");
  auto* fac = app.add_subcommand("factor", "Square-root factorization of an averaged kernel");
  fac->add_option("--input", input, "Band matrix file")->required();
  auto* dw = app.add_subcommand("double-well", "Double-well potential from a drift CSV");
  dw->add_option("--input", input, "Drift CSV from analyze")->required();
  dw->add_option("--points", points, "Phase-field samples")->check(CLI::Range(2, 1000000));
  dw->add_flag("--reaction-sign", reaction_sign, "Use f' equal to the mean reaction term");
  dw->add_option("--solid-level", solid_level, "Solid plateau level (default: estimated)");
  dw->add_option("--liquid-level", liquid_level, "Liquid plateau level (default: estimated)");
  auto* sf = app.add_subcommand("scale-fit", "Affine interface scaling between two profiles");
  sf->add_option("--reference", reference, "Reference profile CSV")->required();
  sf->add_option("--approximant", approximant, "Approximant profile CSV")->required();
  sf->add_option("--column", column, "Value column (default m or mean)");
  sf->add_option("--m0", m0, "Lower window level")->required();
  sf->add_option("--m1", m1, "Upper window level")->required();
  sf->add_option("--x-lo", x_lo, "Lower x1 bound of the window");
  sf->add_option("--x-hi", x_hi, "Upper x1 bound of the window");
  auto* vf = app.add_subcommand("variance-fit", "Log-log slope of variance against window length");
  vf->add_option("--input", input, "CSV with columns T, variance")->required();
  auto* mf = app.add_subcommand("meltpoint-fit", "Coexistence densities from (T, Va) series");
  mf->add_option("--solid", solid, "Solid CSV T,Va")->required();
  mf->add_option("--liquid", liquid, "Liquid CSV T,Va")->required();
  mf->add_option("--temperature", temperature, "Target temperature (default [system] melting_temperature)");
  auto* rd = app.add_subcommand("rdf", "Radial distribution function");
  rd->add_option("snapshots", inputs, "Snapshot files")->required();
  rd->add_option("--bins", bins, "Number of bins")->check(CLI::PositiveNumber);
  rd->add_option("--r-max", r_max, "Largest distance")->check(CLI::PositiveNumber);
  rd->add_option("--slab-lo", slab_lo, "Reference slab lower x1");
  rd->add_option("--slab-hi", slab_hi, "Reference slab upper x1");

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what();
    const auto rest = app.remaining();
    if (!rest.empty()) err << " (unrecognized: " << CLI::detail::join(rest, " ") << ")";
    err << "\n\n" << app.help();
    return 1;
  }

  CLI::App* sub = app.get_subcommands().front();
  Context ctx;
  ctx.log = &err;
  try {
    if (!common.config_path.empty()) {
      ctx.parsed = load_config(common.config_path);
    } else {
      ctx.parsed = parse_config("");
    }
    if (common.seed) ctx.cfg().integration.seed = *common.seed;
    ctx.workers = common.workers;
    ctx.out = common.out_dir.empty() ? fs::path(ctx.cfg().outputs.directory) : fs::path(common.out_dir);
    fs::create_directories(ctx.out);
    for (const auto& d : ctx.parsed.defaults) err << "default: " << d << '\n';

    ctx.manifest["tool"] = "mdpf";
    ctx.manifest["version"] = kVersion;
    ctx.manifest["subcommand"] = sub->get_name();
    ctx.manifest["arguments"] = args;
    ctx.manifest["config_file"] = common.config_path;
    ctx.manifest["config"] = serialize_config(ctx.cfg());
    ctx.manifest["defaults_applied"] = ctx.parsed.defaults;
    ctx.manifest["seed"] = ctx.cfg().integration.seed;
    ctx.manifest["workers"] = ctx.workers;
    ctx.manifest["inputs"] = json::array();
    ctx.manifest["outputs"] = json::array();

    const std::string name = sub->get_name();
    if (name == "build-lattice") cmd_build_lattice(ctx, density);
    else if (name == "melt-quench") cmd_melt_quench(ctx, input);
    else if (name == "assemble") cmd_assemble(ctx, solid, liquid);
    else if (name == "run") cmd_run(ctx, input, resume);
    else if (name == "analyze") cmd_analyze(ctx, inputs, !no_kernel);
    else if (name == "factor") cmd_factor(ctx, input);
    else if (name == "double-well") cmd_double_well(ctx, input, points, reaction_sign, solid_level, liquid_level);
    else if (name == "scale-fit") cmd_scale_fit(ctx, reference, approximant, column, m0, m1, x_lo, x_hi);
    else if (name == "variance-fit") cmd_variance_fit(ctx, input);
    else if (name == "meltpoint-fit") cmd_meltpoint_fit(ctx, solid, liquid, temperature);
    else if (name == "rdf") cmd_rdf(ctx, inputs, bins, r_max, slab_lo, slab_hi);

    std::ofstream mf_out(ctx.out / "manifest.json");
    mf_out << ctx.manifest.dump(2) << '\n';
    if (!mf_out) throw std::runtime_error("cannot write manifest");
    out << "wrote " << ctx.manifest["outputs"].size() << " file(s) to " << ctx.out.string() << '\n';
    return 0;
  } catch (const ConfigError& e) {
    err << "validation error: " << e.what() << '\n';
    return 1;
  } catch (const FormatError& e) {
    err << "input error: " << e.what() << '\n';
    return 1;
  } catch (const ModelBreakdown& e) {
    err << "runtime error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "runtime error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace mdpf
