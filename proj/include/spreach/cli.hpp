#pragma once

#include <CLI11.hpp>
#include <json.hpp>

#include <unsupported/Eigen/KroneckerProduct>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "spreach/assumptions.hpp"
#include "spreach/config.hpp"
#include "spreach/contour.hpp"
#include "spreach/errors.hpp"
#include "spreach/feedback.hpp"
#include "spreach/field_io.hpp"
#include "spreach/hj_solver.hpp"
#include "spreach/io_util.hpp"
#include "spreach/reach.hpp"
#include "spreach/reports.hpp"
#include "spreach/svg.hpp"
#include "spreach/version.hpp"

namespace spreach {

namespace cli_detail {

namespace fs = std::filesystem;

/// Collects artifacts under the output directory and records content
/// fingerprints for the run manifest. Identical inputs produce identical
/// bytes, so reruns are manifest-equal; volatile data (wall time) goes to
/// the console, never into artifacts.
class ArtifactSink {
 public:
  explicit ArtifactSink(fs::path dir) : dir_(std::move(dir)) {}

  void add(const std::string& rel, const std::string& bytes) {
    write_file(dir_ / rel, bytes);
    entries_[rel] = fingerprint_hex(bytes);
  }

  void write_manifest(nlohmann::json meta) {
    nlohmann::json arts;
    for (const auto& [rel, fp] : entries_) arts[rel] = fp;
    meta["artifacts"] = arts;
    meta["version"] = kVersion;
    write_file(dir_ / "manifest.json", meta.dump(2) + "\n");
  }

  const fs::path& dir() const { return dir_; }

 private:
  fs::path dir_;
  std::map<std::string, std::string> entries_;
};

struct Overrides {
  std::optional<double> eps, eta, t;
  std::optional<int> grid;
  std::optional<long> seed;
  std::string out;

  nlohmann::json to_json() const {
    nlohmann::json j = nlohmann::json::object();
    if (eps) j["eps"] = *eps;
    if (eta) j["eta"] = *eta;
    if (t) j["t"] = *t;
    if (grid) j["grid"] = *grid;
    if (seed) j["seed"] = *seed;
    if (!out.empty()) j["out"] = out;
    return j;
  }
};

inline void apply_overrides(RunConfig& rc, const Overrides& ov) {
  if (ov.eps) {
    if (!(*ov.eps > 0.0)) throw Error::config("--eps must be > 0");
    rc.solve.eps = {*ov.eps};
  }
  if (ov.eta) {
    if (!(*ov.eta > 0.0)) throw Error::config("--eta must be > 0");
    rc.solve.eta = *ov.eta;
  }
  if (ov.t) {
    if (*ov.t > 0.0) throw Error::config("--t must be <= 0");
    rc.solve.t_final = *ov.t;
  }
  if (ov.grid) {
    if (*ov.grid < 3) throw Error::config("--grid must be >= 3");
    for (auto& n : rc.grid.z_nodes) n = *ov.grid;
    for (auto& n : rc.grid.y_nodes) n = *ov.grid;
  }
  if (ov.seed) {
    rc.experiment.seed = static_cast<std::uint64_t>(*ov.seed);
    rc.verify.seed = static_cast<std::uint64_t>(*ov.seed);
  }
  if (!ov.out.empty()) rc.output.directory = ov.out;
}

/// Output directory priority: --out flag, then the config's output block,
/// then the SPREACH_OUT environment variable, then "out".
inline RunConfig load_config(const std::string& path, const std::string& fallback_doc,
                             const Overrides& ov) {
  register_builtin_customs();
  std::string text;
  if (!path.empty())
    text = read_file(path);
  else if (!fallback_doc.empty())
    text = fallback_doc;
  else
    throw Error::config("--config is required for this subcommand");
  RunConfig rc = parse_config_text(text);
  if (!rc.output.directory_from_config) {
    if (const char* env = std::getenv("SPREACH_OUT"); env && *env)
      rc.output.directory = env;
  }
  apply_overrides(rc, ov);
  return rc;
}

inline Grid z_grid(const RunConfig& rc, int expect_dim) {
  if (rc.grid.z_nodes.empty()) throw Error::config("grid.z: required for this subcommand");
  if (static_cast<int>(rc.grid.z_nodes.size()) != expect_dim)
    throw Error::config("grid.z: dimension " + std::to_string(rc.grid.z_nodes.size()) +
                        " does not match the system's slow dimension " +
                        std::to_string(expect_dim));
  return Grid::uniform(rc.grid.z_min, rc.grid.z_max, rc.grid.z_nodes, "z");
}

inline Grid full_grid(const RunConfig& rc, int n_z, int n_y) {
  if (rc.grid.z_nodes.empty() || !rc.grid.has_y)
    throw Error::config("grid.z and grid.y: required for full solves");
  if (static_cast<int>(rc.grid.z_nodes.size()) != n_z)
    throw Error::config("grid.z: does not match the system's slow dimension");
  if (static_cast<int>(rc.grid.y_nodes.size()) != n_y)
    throw Error::config("grid.y: does not match the system's fast dimension");
  std::vector<GridAxis> axes;
  for (std::size_t d = 0; d < rc.grid.z_nodes.size(); ++d)
    axes.push_back({"z" + std::to_string(d), rc.grid.z_nodes[d], rc.grid.z_min[d],
                    rc.grid.z_max[d]});
  for (std::size_t d = 0; d < rc.grid.y_nodes.size(); ++d)
    axes.push_back({"y" + std::to_string(d), rc.grid.y_nodes[d], rc.grid.y_min[d],
                    rc.grid.y_max[d]});
  return Grid(axes);
}

inline PayoffFn payoff(const RunConfig& rc, int n_z) {
  if (!rc.has_payoff) throw Error::config("payoff: required for this subcommand");
  if (rc.payoff.lower.size() != n_z)
    throw Error::config("payoff: bounds must have the slow dimension " + std::to_string(n_z));
  return build_payoff_box(rc.payoff.lower, rc.payoff.upper, rc.payoff.slope, rc.payoff.cap,
                          rc.payoff.free_dims);
}

inline SolveOptions solve_options(const RunConfig& rc) {
  SolveOptions opts;
  opts.cfl = rc.solve.cfl;
  opts.scheme = rc.solve.scheme == "rk2" ? SolveOptions::Scheme::rk2
                                         : SolveOptions::Scheme::euler;
  opts.track_extremes = rc.solve.track_extremes;
  opts.snapshot_count = static_cast<int>(rc.solve.snapshot_count);
  opts.snapshot_times = rc.solve.snapshot_times;
  opts.snapshot_extremes = rc.solve.snapshot_extremes;
  opts.allow_high_dimension = rc.solve.allow_high_dimension;
  return opts;
}

inline void emit_field(ArtifactSink& sink, const RunConfig& rc, const std::string& stem,
                       const ValueField& field) {
  if (rc.output.formats.count("csv")) sink.add(stem + ".csv", field_to_csv(field));
  if (rc.output.formats.count("binary")) sink.add(stem + ".sprf", field_to_binary(field));
}

inline void emit_snapshots(ArtifactSink& sink, const RunConfig& rc, const std::string& stem,
                           const ValueField& field) {
  if (!rc.output.formats.count("csv")) return;
  for (std::size_t i = 0; i < field.snapshots.size(); ++i) {
    const auto& s = field.snapshots[i];
    ValueField slice;
    slice.grid = field.grid;
    slice.time = s.time;
    slice.values = s.values;
    slice.running_min = s.running_min;
    slice.running_max = s.running_max;
    slice.provenance = field.provenance + ":snapshot";
    sink.add(stem + "_snap" + std::to_string(i) + ".csv", field_to_csv(slice));
  }
}

inline nlohmann::json manifest_meta(const std::string& command, const RunConfig& rc,
                                    const Overrides& ov) {
  nlohmann::json j;
  j["command"] = command;
  j["config_fingerprint"] = fingerprint_hex(rc.raw.dump() + "|" + ov.to_json().dump());
  j["overrides"] = ov.to_json();
  j["seeds"] = {{"experiment", rc.experiment.seed},
                {"verify", rc.verify.seed},
                {"system", rc.system.seed}};
  return j;
}

inline BoxSet verify_region(const RunConfig& rc, int n_z) {
  std::vector<double> lo = rc.verify.region_lower, hi = rc.verify.region_upper;
  if (lo.empty()) lo.assign(n_z, 0.0);
  if (hi.empty()) hi.assign(n_z, 1.0);
  if (static_cast<int>(lo.size()) != n_z || static_cast<int>(hi.size()) != n_z)
    throw Error::config("verify.region: must match the slow dimension");
  return BoxSet(Eigen::Map<const Eigen::VectorXd>(lo.data(), lo.size()),
                Eigen::Map<const Eigen::VectorXd>(hi.data(), hi.size()), 2);
}

/// P choices: identity, an explicit matrix, or the solution of the nominal
/// Lyapunov equation A0'P + P A0 = -I at the centre of the probe region and
/// boxes. For fast matrices of the form A(z,u,d) = s(d) A0 with s > 0 (both
/// built-in models) the nominal certificate covers the whole box.
inline Eigen::MatrixXd choose_p(const RunConfig& rc, const SPSystem& sys,
                                const BoxSet& region) {
  if (rc.verify.p_mode == "identity")
    return Eigen::MatrixXd::Identity(sys.n_y, sys.n_y);
  if (rc.verify.p_mode == "explicit") {
    if (rc.verify.p_matrix.rows() != sys.n_y)
      throw Error::config("verify.p_matrix: size must match the fast dimension");
    return rc.verify.p_matrix;
  }
  const Eigen::VectorXd zc = 0.5 * (region.lower + region.upper);
  const Eigen::VectorXd uc = 0.5 * (sys.u_set.lower + sys.u_set.upper);
  const Eigen::VectorXd dc = 0.5 * (sys.d_set.lower + sys.d_set.upper);
  const Eigen::MatrixXd A0 = sys.A(zc, uc, dc);
  const int n = sys.n_y;
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd K =
      Eigen::kroneckerProduct(I, A0.transpose()) + Eigen::kroneckerProduct(A0.transpose(), I);
  const Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>((-I).eval().data(), n * n);
  const Eigen::VectorXd vec_p = K.fullPivLu().solve(rhs);
  Eigen::MatrixXd P = Eigen::Map<const Eigen::MatrixXd>(vec_p.data(), n, n);
  P = 0.5 * (P + P.transpose()).eval();
  return P;
}

inline int cmd_verify(RunConfig& rc, const Overrides& ov) {
  const BuiltSystem built = build_system(rc.system);
  const int n_z = built.reduced.n_z;
  const BoxSet region = verify_region(rc, n_z);
  ArtifactSink sink(rc.output.directory);

  nlohmann::json rep;
  rep["system"] = built.label;
  rep["tolerances"] = {{"stability", rc.verify.stability_tol},
                       {"isaacs", rc.verify.isaacs_tol},
                       {"decay", rc.verify.decay_tol}};
  rep["n_samples"] = rc.verify.n_samples;
  rep["seed"] = rc.verify.seed;

  const IsaacsResult isaacs =
      check_isaacs(built.reduced, region, rc.verify.n_samples, rc.verify.lambda_scale,
                   rc.verify.seed, rc.verify.isaacs_tol);
  rep["isaacs"] = report_json(isaacs);
  bool all_pass = isaacs.passed();

  if (built.sp) {
    const SPSystem& sys = *built.sp;
    const RegularityReport reg =
        estimate_regularity_bounds(sys, region, rc.verify.n_samples, rc.verify.seed);
    rep["regularity"] = report_json(reg);

    const Eigen::MatrixXd P = choose_p(rc, sys, region);
    const StabilityResult stab = check_stability(sys, P, region, rc.verify.n_samples,
                                                 rc.verify.seed, rc.verify.stability_tol);
    rep["stability"] = report_json(stab);
    rep["stability"]["p_mode"] = rc.verify.p_mode;
    all_pass = all_pass && stab.passed();

    if (stab.passed()) {
      Eigen::VectorXd zc = 0.5 * (region.lower + region.upper);
      if (!rc.verify.decay_z.empty()) {
        if (static_cast<int>(rc.verify.decay_z.size()) != n_z)
          throw Error::config("verify.decay_z: must match the slow dimension");
        zc = Eigen::Map<const Eigen::VectorXd>(rc.verify.decay_z.data(), n_z);
      }
      const DecayResult decay = check_boundary_layer_decay(
          sys, *stab.cert, zc, rc.verify.decay_horizon, rc.verify.decay_trials,
          rc.verify.seed, rc.verify.decay_tol);
      rep["decay"] = report_json(decay);
      all_pass = all_pass && decay.passed();
    }

    if (rc.system.kind == "mrn") {
      // the slow inflow coefficient carries a sign ambiguity between the
      // derivation F = f - M g and the closed-form reduced equations; both
      // readings are reported so downstream users can compare.
      Eigen::VectorXd u1 = Eigen::VectorXd::Zero(sys.u_set.dim());
      u1[0] = 1.0;
      const Eigen::VectorXd d1 = 0.5 * (sys.d_set.lower + sys.d_set.upper);
      const Eigen::VectorXd z0 = Eigen::VectorXd::Zero(n_z);
      const double f0 = built.reduced.F(z0, Eigen::VectorXd::Zero(sys.u_set.dim()), d1)[0];
      const double f1 = built.reduced.F(z0, u1, d1)[0];
      rep["mrn_inflow_coefficient"] = {{"f_minus_Mg", f1 - f0},
                                       {"sign_flipped", -(f1 - f0)}};
    }
  }
  rep["all_pass"] = all_pass;

  sink.add("verify_report.json", rep.dump(2) + "\n");
  sink.write_manifest(manifest_meta("verify", rc, ov));
  std::printf("verify: %s (report in %s)\n", all_pass ? "pass" : "FAIL",
              sink.dir().string().c_str());
  return 0;
}

inline int cmd_solve(RunConfig& rc, const Overrides& ov) {
  const BuiltSystem built = build_system(rc.system);
  const Grid grid = z_grid(rc, built.reduced.n_z);
  const PayoffFn ell = payoff(rc, built.reduced.n_z);
  ArtifactSink sink(rc.output.directory);

  const ValueField field =
      solve_reduced_value(built.reduced, ell, grid, rc.solve.t_final, solve_options(rc));
  emit_field(sink, rc, "vbar", field);
  emit_snapshots(sink, rc, "vbar", field);
  sink.write_manifest(manifest_meta("solve", rc, ov));
  std::printf("solve: t = %s, %d steps, dt = %s\n", fmt_double(field.time).c_str(),
              field.stats.steps, fmt_double(field.stats.dt).c_str());
  return 0;
}

inline int cmd_full_solve(RunConfig& rc, const Overrides& ov) {
  const BuiltSystem built = build_system(rc.system);
  if (!built.sp) throw Error::config("full-solve requires an SP system, not a reduced-only model");
  const SPSystem& sys = *built.sp;
  const Grid grid = full_grid(rc, sys.n_z, sys.n_y);
  const PayoffFn ell = payoff(rc, sys.n_z);
  if (rc.solve.eps.empty()) throw Error::config("solve.eps: at least one value required");
  ArtifactSink sink(rc.output.directory);

  for (const double eps : rc.solve.eps) {
    const ValueField field =
        solve_full_value(sys, eps, ell, grid, rc.solve.t_final, solve_options(rc));
    emit_field(sink, rc, "veps_" + fmt_double(eps), field);
    std::printf("full-solve: eps = %s, %d steps\n", fmt_double(eps).c_str(),
                field.stats.steps);
  }
  sink.write_manifest(manifest_meta("full-solve", rc, ov));
  return 0;
}

/// Vertical-line figure for 1-D slow state + 1-D fast state: reduced level
/// crossings as vertical lines, the full zero set as a contour.
inline std::string fig2_style_svg(const ValueField& vbar, const ValueField* veps,
                                  const PayoffFn& ell, double eta) {
  const auto& zax = vbar.grid.axis(0);
  double y0 = 0.0, y1 = 1.0;
  std::string ylabel = "y0";
  if (veps) {
    y0 = veps->grid.axis(1).min;
    y1 = veps->grid.axis(1).max;
    ylabel = veps->grid.axis(1).name;
  }
  SvgCanvas canvas(zax.min, zax.max, y0, y1, zax.name, ylabel);

  ValueField ell_field;
  ell_field.grid = vbar.grid;
  ell_field.values.resize(vbar.grid.size());
  for (long i = 0; i < vbar.grid.size(); ++i)
    ell_field.values[i] = ell(vbar.grid.point(i));
  for (double x : level_crossings_1d(ell_field, 0.0))
    canvas.add_vline(x, "grey", 1.5, "6,3");
  for (double x : level_crossings_1d(vbar, -eta)) canvas.add_vline(x, "gold", 2.0);
  for (double x : level_crossings_1d(vbar, eta)) canvas.add_vline(x, "magenta", 2.0);
  if (veps) canvas.add_contours(extract_contours(*veps, 0.0), "black", 2.0);
  canvas.add_label(zax.min + 0.02 * (zax.max - zax.min), y1 - 0.04 * (y1 - y0),
                   "target grey | inner gold | outer magenta | full zero set black",
                   "black");
  return canvas.render();
}

inline int cmd_bounds(RunConfig& rc, const Overrides& ov, bool expect_pass) {
  const BuiltSystem built = build_system(rc.system);
  const Grid grid = z_grid(rc, built.reduced.n_z);
  const PayoffFn ell = payoff(rc, built.reduced.n_z);
  SolveOptions opts = solve_options(rc);
  opts.track_extremes = true;
  ArtifactSink sink(rc.output.directory);

  const ValueField vbar =
      solve_reduced_value(built.reduced, ell, grid, rc.solve.t_final, opts);
  const double eta = rc.solve.eta;
  const ReachBounds brs = brs_bounds(vbar, eta);
  const auto [brt, bst] = tube_bounds(vbar, eta);
  if (rc.output.formats.count("csv")) {
    sink.add("brs_masks.csv", masks_to_csv(brs));
    sink.add("brt_masks.csv", masks_to_csv(brt));
    sink.add("bst_masks.csv", masks_to_csv(bst));
  }
  emit_field(sink, rc, "vbar", vbar);

  nlohmann::json rep;
  rep["eta"] = eta;
  rep["t"] = rc.solve.t_final;
  rep["brs_inner_nodes"] = brs.inner_count();
  rep["brs_outer_nodes"] = brs.outer_count();
  bool all_pass = true;

  nlohmann::json eps_results = nlohmann::json::array();
  if (built.sp && rc.grid.has_y && !rc.solve.eps.empty()) {
    const SPSystem& sys = *built.sp;
    const Grid fgrid = full_grid(rc, sys.n_z, sys.n_y);
    for (const double eps : rc.solve.eps) {
      const ValueField veps =
          solve_full_value(sys, eps, ell, fgrid, rc.solve.t_final, solve_options(rc));
      const ContainmentReport cr =
          check_containment(brs, veps, static_cast<int>(rc.solve.dilation_cells));
      nlohmann::json cj = report_json(cr);
      cj["eps"] = eps;
      cj["sup_gap"] = max_abs_gap_over_y(veps, vbar);
      eps_results.push_back(cj);
      all_pass = all_pass && cr.verdict;
      emit_field(sink, rc, "veps_" + fmt_double(eps), veps);
      if (rc.output.formats.count("svg") && sys.n_z == 1 && sys.n_y == 1)
        sink.add("bounds_eps_" + fmt_double(eps) + ".svg",
                 fig2_style_svg(vbar, &veps, ell, eta));
      std::printf("bounds: eps = %s -> %s (%zu violations)\n", fmt_double(eps).c_str(),
                  cr.verdict ? "pass" : "fail", cr.violations.size());
    }
  }
  rep["eps_results"] = eps_results;
  sink.add("bounds_report.json", rep.dump(2) + "\n");
  sink.write_manifest(manifest_meta("bounds", rc, ov));
  if (expect_pass && !all_pass) return 4;
  return 0;
}

inline int cmd_simulate(RunConfig& rc, const Overrides& ov) {
  const BuiltSystem built = build_system(rc.system);
  if (!built.sp) throw Error::config("simulate requires an SP system");
  const SPSystem& sys = *built.sp;
  const Grid grid = z_grid(rc, sys.n_z);
  const PayoffFn ell = payoff(rc, sys.n_z);
  if (rc.solve.eps.empty()) throw Error::config("solve.eps: one value required for simulate");
  if (rc.experiment.initial_states.empty())
    throw Error::config("experiment.initial_states: required for simulate");
  const double eps = rc.solve.eps.front();
  ArtifactSink sink(rc.output.directory);

  SolveOptions opts = solve_options(rc);
  if (opts.snapshot_count < 2 && opts.snapshot_times.empty())
    opts.snapshot_count = 41;  // feedback needs time slices
  const ValueField vbar =
      solve_reduced_value(built.reduced, ell, grid, rc.solve.t_final, opts);

  ReachExperimentOptions eopts;
  eopts.sample_period = rc.experiment.sample_period;
  eopts.integrate.fast_fraction = rc.experiment.fast_fraction;
  eopts.integrate.h_max = rc.experiment.h_max;
  const ReachExperimentReport rep = run_reach_experiment(
      sys, eps, vbar, ell, rc.experiment.initial_states, rc.experiment.n_disturbances,
      rc.experiment.seed, rc.solve.eta, eopts);

  sink.add("experiment_report.json", report_json(rep).dump(2) + "\n");
  if (rc.output.formats.count("csv")) {
    for (std::size_t si = 0; si < rep.states.size(); ++si) {
      const auto& st = rep.states[si];
      for (std::size_t run = 0; run < st.trajectories.size(); ++run)
        sink.add("trajectories/state" + std::to_string(si) + "_run" + std::to_string(run) +
                     ".csv",
                 trajectory_to_csv(st.trajectories[run]));
    }
  }
  sink.write_manifest(manifest_meta("simulate", rc, ov));
  for (const auto& st : rep.states)
    std::printf("simulate: V(t, z0) = %s label=%s reached %ld/%ld %s\n",
                fmt_double(st.v_bar).c_str(), to_string(st.label), st.n_reached, st.n_runs,
                st.consistent ? "consistent" : "INCONSISTENT");
  return 0;
}

inline const char* kFig2Defaults = R"json({
  "system": {"kind": "genetic_circuit", "alpha": 1.0},
  "grid": {
    "z": {"min": [0.0], "max": [1.0], "nodes": [101]},
    "y": {"min": [0.0], "max": [1.0], "nodes": [101]}
  },
  "payoff": {"lower": [0.25], "upper": [0.75], "slope": 10.0, "cap": 3.0},
  "solve": {"t_final": -0.5, "eta": 0.1, "eps": [1.0, 0.01], "track_extremes": true,
            "dilation_cells": 1},
  "output": {"directory": "out/fig2"}
})json";

inline int cmd_reproduce_fig2(RunConfig& rc, const Overrides& ov) {
  const BuiltSystem built = build_system(rc.system);
  if (!built.sp) throw Error::config("reproduce-fig2 requires an SP system");
  const SPSystem& sys = *built.sp;
  const Grid zgrid = z_grid(rc, sys.n_z);
  const Grid fgrid = full_grid(rc, sys.n_z, sys.n_y);
  const PayoffFn ell = payoff(rc, sys.n_z);
  const double eta = rc.solve.eta;
  ArtifactSink sink(rc.output.directory);

  SolveOptions opts = solve_options(rc);
  opts.track_extremes = true;
  const ValueField vbar =
      solve_reduced_value(built.reduced, ell, zgrid, rc.solve.t_final, opts);
  emit_field(sink, rc, "vbar", vbar);
  const ReachBounds brs = brs_bounds(vbar, eta);
  if (rc.output.formats.count("csv")) sink.add("brs_masks.csv", masks_to_csv(brs));

  nlohmann::json rep;
  rep["eta"] = eta;
  rep["t"] = rc.solve.t_final;
  nlohmann::json eps_results = nlohmann::json::array();
  for (const double eps : rc.solve.eps) {
    const ValueField veps =
        solve_full_value(sys, eps, ell, fgrid, rc.solve.t_final, solve_options(rc));
    const ContainmentReport cr =
        check_containment(brs, veps, static_cast<int>(rc.solve.dilation_cells));
    nlohmann::json cj = report_json(cr);
    cj["eps"] = eps;
    cj["sup_gap"] = max_abs_gap_over_y(veps, vbar);
    eps_results.push_back(cj);
    emit_field(sink, rc, "veps_" + fmt_double(eps), veps);
    if (rc.output.formats.count("svg"))
      sink.add("fig2_eps_" + fmt_double(eps) + ".svg", fig2_style_svg(vbar, &veps, ell, eta));
    std::printf("reproduce-fig2: eps = %s containment %s (%zu violations, sup gap %s)\n",
                fmt_double(eps).c_str(), cr.verdict ? "holds" : "violated",
                cr.violations.size(), fmt_double(cj["sup_gap"].get<double>()).c_str());
  }
  rep["eps_results"] = eps_results;
  sink.add("fig2_report.json", rep.dump(2) + "\n");
  sink.write_manifest(manifest_meta("reproduce-fig2", rc, ov));
  return 0;
}

inline const char* kFig3Defaults = R"json({
  "system": {"kind": "mrn", "n": 20, "seed": 1},
  "grid": {"z": {"min": [0.0, 0.0, 0.0], "max": [1.0, 1.0, 1.0], "nodes": [41, 41, 41]}},
  "payoff": {"lower": [null, 0.4, 0.4], "upper": [null, 0.6, 0.6], "slope": 10.0,
             "cap": 4.0, "free_dims": [0]},
  "solve": {"t_final": -3.0, "eta": 0.5, "eps": [0.01], "track_extremes": true,
            "snapshot_count": 61},
  "experiment": {
    "initial_states": [{"z": [0.0, 0.025, 0.1]}, {"z": [0.0, 0.15, 0.1]}],
    "n_disturbances": 20,
    "seed": 7
  },
  "output": {"directory": "out/fig3"}
})json";

inline std::string fig3_style_svg(const ValueField& vbar, const PayoffFn& ell, double eta,
                                  const ReachExperimentReport& rep) {
  const auto& ax1 = vbar.grid.axis(1);
  const auto& ax2 = vbar.grid.axis(2);
  SvgCanvas canvas(ax1.min, ax1.max, ax2.min, ax2.max, ax1.name, ax2.name);
  const std::map<int, double> slice = {{0, vbar.grid.axis(0).min}};

  // target outline on the slice: zero level of the payoff
  ValueField ell_slice;
  ell_slice.grid = Grid({{ax1.name, ax1.nodes, ax1.min, ax1.max},
                         {ax2.name, ax2.nodes, ax2.min, ax2.max}});
  ell_slice.values.resize(ell_slice.grid.size());
  for (long i = 0; i < ell_slice.grid.size(); ++i) {
    const Eigen::VectorXd p2 = ell_slice.grid.point(i);
    Eigen::VectorXd p3(3);
    p3 << vbar.grid.axis(0).min, p2[0], p2[1];
    ell_slice.values[i] = ell(p3);
  }
  canvas.add_contours(extract_contours(ell_slice, 0.0), "grey", 1.5, "6,3");
  canvas.add_contours(extract_contours(vbar, -eta, slice), "gold", 2.0, "2,3");
  canvas.add_contours(extract_contours(vbar, eta, slice), "magenta", 2.0, "8,4");

  for (const auto& st : rep.states) {
    if (st.trajectories.empty()) continue;
    const Trajectory& traj = st.trajectories.front();
    std::vector<std::array<double, 2>> pts;
    pts.reserve(traj.z.size());
    for (const auto& z : traj.z) pts.push_back({z[1], z[2]});
    canvas.add_polyline(pts, "steelblue", 1.5);
    canvas.add_circle_marker(pts.front()[0], pts.front()[1], "steelblue");
    canvas.add_cross_marker(pts.back()[0], pts.back()[1], "steelblue");
  }
  canvas.add_label(ax1.min + 0.02 * (ax1.max - ax1.min),
                   ax2.max - 0.04 * (ax2.max - ax2.min),
                   "target grey | -eta gold | +eta magenta | trajectories steelblue",
                   "black");
  return canvas.render();
}

inline int cmd_reproduce_fig3(RunConfig& rc, const Overrides& ov) {
  const BuiltSystem built = build_system(rc.system);
  if (!built.sp) throw Error::config("reproduce-fig3 requires an SP system");
  const SPSystem& sys = *built.sp;
  const Grid zgrid = z_grid(rc, sys.n_z);
  const PayoffFn ell = payoff(rc, sys.n_z);
  if (rc.solve.eps.empty()) throw Error::config("solve.eps: one value required");
  const double eps = rc.solve.eps.front();
  ArtifactSink sink(rc.output.directory);

  SolveOptions opts = solve_options(rc);
  if (opts.snapshot_count < 2 && opts.snapshot_times.empty()) opts.snapshot_count = 61;
  const ValueField vbar =
      solve_reduced_value(built.reduced, ell, zgrid, rc.solve.t_final, opts);
  emit_field(sink, rc, "vbar", vbar);
  std::printf("reproduce-fig3: reduced solve done (%d steps)\n", vbar.stats.steps);

  ReachExperimentOptions eopts;
  eopts.sample_period = rc.experiment.sample_period;
  eopts.integrate.fast_fraction = rc.experiment.fast_fraction;
  eopts.integrate.h_max = rc.experiment.h_max;
  const ReachExperimentReport rep = run_reach_experiment(
      sys, eps, vbar, ell, rc.experiment.initial_states, rc.experiment.n_disturbances,
      rc.experiment.seed, rc.solve.eta, eopts);
  sink.add("experiment_report.json", report_json(rep).dump(2) + "\n");

  if (rc.output.formats.count("csv")) {
    for (std::size_t si = 0; si < rep.states.size(); ++si) {
      const auto& st = rep.states[si];
      for (std::size_t run = 0; run < st.trajectories.size(); ++run)
        sink.add("trajectories/state" + std::to_string(si) + "_run" + std::to_string(run) +
                     ".csv",
                 trajectory_to_csv(st.trajectories[run]));
    }
  }
  if (rc.output.formats.count("svg"))
    sink.add("fig3.svg", fig3_style_svg(vbar, ell, rc.solve.eta, rep));
  sink.write_manifest(manifest_meta("reproduce-fig3", rc, ov));
  for (const auto& st : rep.states)
    std::printf("reproduce-fig3: z0=(%s,%s,%s) V=%s label=%s reached %ld/%ld\n",
                fmt_double(st.z0[0]).c_str(), fmt_double(st.z0[1]).c_str(),
                fmt_double(st.z0[2]).c_str(), fmt_double(st.v_bar).c_str(),
                to_string(st.label), st.n_reached, st.n_runs);
  return 0;
}

}  // namespace cli_detail

/// Entry point behind the spreach binary; args excludes the program name.
/// Exit codes: 0 success, 2 malformed config or arguments, 3 numerical
/// failure, 4 containment verdict failed under bounds --expect-pass.
inline int run_command(const std::vector<std::string>& args) {
  using namespace cli_detail;

  CLI::App app{"spreach: reachability analysis for two-timescale zero-sum games"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  double eps_val = 0.0, eta_val = 0.0, t_val = 0.0;
  int grid_val = 0;
  long seed_val = 0;
  bool expect_pass = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "configuration file (JSON)");
    sub->add_option("--out", out_dir, "output directory override");
    sub->add_option("--eps", eps_val, "timescale parameter override");
    sub->add_option("--eta", eta_val, "margin override");
    sub->add_option("--t", t_val, "horizon override (t <= 0)");
    sub->add_option("--grid", grid_val, "node count override for every axis");
    sub->add_option("--seed", seed_val, "seed override for sampling and experiments");
  };

  CLI::App* verify = app.add_subcommand("verify", "check model assumptions numerically");
  CLI::App* solve = app.add_subcommand("solve", "solve the reduced value function");
  CLI::App* full = app.add_subcommand("full-solve", "solve the full value function");
  CLI::App* bounds = app.add_subcommand("bounds", "reachable-set bounds and containment");
  CLI::App* simulate = app.add_subcommand("simulate", "closed-loop reach experiments");
  CLI::App* fig2 = app.add_subcommand("reproduce-fig2", "genetic-circuit study end to end");
  CLI::App* fig3 = app.add_subcommand("reproduce-fig3", "metabolic-network study end to end");
  for (CLI::App* sub : {verify, solve, full, bounds, simulate, fig2, fig3}) add_common(sub);
  bounds->add_flag("--expect-pass", expect_pass,
                   "exit 4 when a containment verdict fails");

  std::vector<const char*> argv;
  argv.push_back("spreach");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return 2;
  }

  Overrides ov;
  CLI::App* sub = app.get_subcommands().front();
  if (sub->count("--eps")) ov.eps = eps_val;
  if (sub->count("--eta")) ov.eta = eta_val;
  if (sub->count("--t")) ov.t = t_val;
  if (sub->count("--grid")) ov.grid = grid_val;
  if (sub->count("--seed")) ov.seed = seed_val;
  if (sub->count("--out")) ov.out = out_dir;

  const auto t0 = std::chrono::steady_clock::now();
  int code = 0;
  try {
    const std::string name = sub->get_name();
    std::string fallback;
    if (name == "reproduce-fig2") fallback = kFig2Defaults;
    if (name == "reproduce-fig3") fallback = kFig3Defaults;
    RunConfig rc = load_config(config_path, fallback, ov);

    if (name == "verify")
      code = cmd_verify(rc, ov);
    else if (name == "solve")
      code = cmd_solve(rc, ov);
    else if (name == "full-solve")
      code = cmd_full_solve(rc, ov);
    else if (name == "bounds")
      code = cmd_bounds(rc, ov, expect_pass);
    else if (name == "simulate")
      code = cmd_simulate(rc, ov);
    else if (name == "reproduce-fig2")
      code = cmd_reproduce_fig2(rc, ov);
    else if (name == "reproduce-fig3")
      code = cmd_reproduce_fig3(rc, ov);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    switch (e.code()) {
      case errc::config:
      case errc::domain:
      case errc::dimension: return 2;
      case errc::numeric: return 3;
      default: return 1;
    }
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::fprintf(stderr, "[%s] wall time %.2f s\n", sub->get_name().c_str(), secs);
  return code;
}

}  // namespace spreach
