#pragma once

#include <json.hpp>

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "spreach/box_set.hpp"
#include "spreach/errors.hpp"
#include "spreach/models.hpp"
#include "spreach/payoff.hpp"
#include "spreach/systems.hpp"

namespace spreach {

using json = nlohmann::json;

namespace cfg {

/// Strict parsing: any key outside the allowed set fails before any
/// computation starts.
inline void check_keys(const json& obj, const std::string& ctx,
                       const std::set<std::string>& allowed) {
  if (!obj.is_object()) throw Error::config(ctx + ": expected an object");
  for (const auto& [key, _] : obj.items())
    if (!allowed.count(key))
      throw Error::config(ctx + ": unknown key '" + key + "'");
}

inline double number(const json& obj, const std::string& ctx, const std::string& key,
                     double fallback, bool required = false) {
  if (!obj.contains(key)) {
    if (required) throw Error::config(ctx + ": missing required key '" + key + "'");
    return fallback;
  }
  if (!obj[key].is_number()) throw Error::config(ctx + "." + key + ": expected a number");
  return obj[key].get<double>();
}

inline long integer(const json& obj, const std::string& ctx, const std::string& key,
                    long fallback, bool required = false) {
  if (!obj.contains(key)) {
    if (required) throw Error::config(ctx + ": missing required key '" + key + "'");
    return fallback;
  }
  if (!obj[key].is_number_integer())
    throw Error::config(ctx + "." + key + ": expected an integer");
  return obj[key].get<long>();
}

inline std::string text(const json& obj, const std::string& ctx, const std::string& key,
                        const std::string& fallback, bool required = false) {
  if (!obj.contains(key)) {
    if (required) throw Error::config(ctx + ": missing required key '" + key + "'");
    return fallback;
  }
  if (!obj[key].is_string()) throw Error::config(ctx + "." + key + ": expected a string");
  return obj[key].get<std::string>();
}

inline bool boolean(const json& obj, const std::string& ctx, const std::string& key,
                    bool fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_boolean()) throw Error::config(ctx + "." + key + ": expected a boolean");
  return obj[key].get<bool>();
}

inline std::vector<double> number_list(const json& obj, const std::string& ctx,
                                       const std::string& key) {
  if (!obj.contains(key)) throw Error::config(ctx + ": missing required key '" + key + "'");
  if (!obj[key].is_array()) throw Error::config(ctx + "." + key + ": expected an array");
  std::vector<double> out;
  for (const auto& v : obj[key]) {
    if (!v.is_number()) throw Error::config(ctx + "." + key + ": expected numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

/// Numbers with null meaning unbounded (payoff targets).
inline Eigen::VectorXd bound_list(const json& obj, const std::string& ctx,
                                  const std::string& key, double inf_sign) {
  if (!obj.contains(key)) throw Error::config(ctx + ": missing required key '" + key + "'");
  if (!obj[key].is_array()) throw Error::config(ctx + "." + key + ": expected an array");
  Eigen::VectorXd out(obj[key].size());
  int i = 0;
  for (const auto& v : obj[key]) {
    if (v.is_null())
      out[i] = inf_sign * std::numeric_limits<double>::infinity();
    else if (v.is_number())
      out[i] = v.get<double>();
    else
      throw Error::config(ctx + "." + key + ": expected numbers or null");
    ++i;
  }
  return out;
}

inline BoxSet box_set(const json& obj, const std::string& ctx) {
  check_keys(obj, ctx, {"lower", "upper", "samples"});
  const auto lo = number_list(obj, ctx, "lower");
  const auto hi = number_list(obj, ctx, "upper");
  const long samples = integer(obj, ctx, "samples", 2);
  if (samples < 2) throw Error::config(ctx + ".samples: must be >= 2");
  Eigen::VectorXd l = Eigen::Map<const Eigen::VectorXd>(lo.data(), lo.size());
  Eigen::VectorXd h = Eigen::Map<const Eigen::VectorXd>(hi.data(), hi.size());
  try {
    return BoxSet(l, h, static_cast<int>(samples));
  } catch (const Error& e) {
    throw Error::config(ctx + ": " + e.what());
  }
}

}  // namespace cfg

struct SystemConfig {
  std::string kind = "genetic_circuit";  // genetic_circuit | mrn | custom
  double alpha = 1.0;                    // genetic circuit
  long n_metabolites = 20;               // mrn
  std::uint64_t seed = 1;                // mrn network weights
  std::vector<MrnEdge> edges;            // mrn explicit adjacency
  bool has_edges = false;
  std::string custom_name;               // custom registry key
  json custom_params;                    // forwarded to the registered builder
  std::optional<BoxSet> u_set, d_set;
};

struct GridConfig {
  std::vector<double> z_min, z_max;
  std::vector<int> z_nodes;
  std::vector<double> y_min, y_max;
  std::vector<int> y_nodes;
  bool has_y = false;
};

struct PayoffConfig {
  Eigen::VectorXd lower, upper;
  double slope = 10.0;
  double cap = 3.0;
  std::set<int> free_dims;
};

struct SolveConfig {
  double t_final = -0.5;
  double eta = 0.1;
  std::vector<double> eps;
  double cfl = 0.5;
  std::string scheme = "euler";
  bool track_extremes = true;
  long snapshot_count = 0;
  std::vector<double> snapshot_times;
  bool snapshot_extremes = false;
  long dilation_cells = 1;
  bool allow_high_dimension = false;
};

struct ExperimentConfig {
  std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>> initial_states;  // (z0, y0)
  long n_disturbances = 20;
  std::uint64_t seed = 0;
  double sample_period = 0.0;
  double fast_fraction = 0.1;
  double h_max = 0.0;
};

struct VerifyConfig {
  std::string p_mode = "identity";  // identity | nominal_lyapunov | explicit
  Eigen::MatrixXd p_matrix;
  std::vector<double> region_lower, region_upper;  // z probe region
  long n_samples = 1000;
  std::uint64_t seed = 0;
  double stability_tol = 1e-9;
  double isaacs_tol = 1e-9;
  double decay_tol = 1e-6;
  double lambda_scale = 2.0;
  double decay_horizon = 10.0;
  long decay_trials = 100;
  std::vector<double> decay_z;  // frozen slow state; defaults to region centre
};

struct OutputConfig {
  std::string directory = "out";
  bool directory_from_config = false;
  std::set<std::string> formats = {"csv", "json", "svg", "binary"};
};

struct RunConfig {
  SystemConfig system;
  GridConfig grid;
  PayoffConfig payoff;
  bool has_payoff = false;
  SolveConfig solve;
  ExperimentConfig experiment;
  VerifyConfig verify;
  OutputConfig output;
  json raw;  // canonical parsed document, for fingerprinting
};

inline RunConfig parse_config(const json& doc) {
  RunConfig rc;
  rc.raw = doc;
  cfg::check_keys(doc, "config",
                  {"system", "grid", "payoff", "solve", "experiment", "verify", "output"});

  if (doc.contains("system")) {
    const json& s = doc["system"];
    cfg::check_keys(s, "system",
                    {"kind", "alpha", "n", "seed", "edges", "name", "params", "u_set", "d_set"});
    rc.system.kind = cfg::text(s, "system", "kind", "", true);
    if (rc.system.kind != "genetic_circuit" && rc.system.kind != "mrn" &&
        rc.system.kind != "custom")
      throw Error::config("system.kind: must be one of genetic_circuit, mrn, custom");
    rc.system.alpha = cfg::number(s, "system", "alpha", 1.0);
    if (!(rc.system.alpha > 0.0)) throw Error::config("system.alpha: must be > 0");
    rc.system.n_metabolites = cfg::integer(s, "system", "n", 20);
    if (rc.system.n_metabolites < 1) throw Error::config("system.n: must be >= 1");
    rc.system.seed = static_cast<std::uint64_t>(cfg::integer(s, "system", "seed", 1));
    rc.system.custom_name = cfg::text(s, "system", "name", "");
    if (s.contains("params")) rc.system.custom_params = s["params"];
    if (s.contains("edges")) {
      if (!s["edges"].is_array()) throw Error::config("system.edges: expected an array");
      for (const auto& e : s["edges"]) {
        cfg::check_keys(e, "system.edges[]", {"from", "to", "weight"});
        MrnEdge edge;
        edge.from = static_cast<int>(cfg::integer(e, "system.edges[]", "from", 0, true));
        edge.to = static_cast<int>(cfg::integer(e, "system.edges[]", "to", 0, true));
        edge.weight = cfg::number(e, "system.edges[]", "weight", 0.0, true);
        rc.system.edges.push_back(edge);
      }
      rc.system.has_edges = true;
    }
    if (s.contains("u_set")) rc.system.u_set = cfg::box_set(s["u_set"], "system.u_set");
    if (s.contains("d_set")) rc.system.d_set = cfg::box_set(s["d_set"], "system.d_set");
  }

  if (doc.contains("grid")) {
    const json& g = doc["grid"];
    cfg::check_keys(g, "grid", {"z", "y"});
    auto parse_axis_block = [](const json& b, const std::string& ctx,
                               std::vector<double>& mn, std::vector<double>& mx,
                               std::vector<int>& nodes) {
      cfg::check_keys(b, ctx, {"min", "max", "nodes"});
      mn = cfg::number_list(b, ctx, "min");
      mx = cfg::number_list(b, ctx, "max");
      if (!b.contains("nodes")) throw Error::config(ctx + ": missing required key 'nodes'");
      for (const auto& v : b["nodes"]) {
        if (!v.is_number_integer()) throw Error::config(ctx + ".nodes: expected integers");
        const long n = v.get<long>();
        if (n < 3) throw Error::config(ctx + ".nodes: node counts must be >= 3");
        nodes.push_back(static_cast<int>(n));
      }
      if (mn.size() != mx.size() || mn.size() != nodes.size())
        throw Error::config(ctx + ": min/max/nodes must have equal length");
      for (std::size_t i = 0; i < mn.size(); ++i)
        if (!(mn[i] < mx[i])) throw Error::config(ctx + ": min must be < max");
    };
    if (g.contains("z"))
      parse_axis_block(g["z"], "grid.z", rc.grid.z_min, rc.grid.z_max, rc.grid.z_nodes);
    if (g.contains("y")) {
      parse_axis_block(g["y"], "grid.y", rc.grid.y_min, rc.grid.y_max, rc.grid.y_nodes);
      rc.grid.has_y = true;
    }
  }

  if (doc.contains("payoff")) {
    const json& p = doc["payoff"];
    cfg::check_keys(p, "payoff", {"lower", "upper", "slope", "cap", "free_dims"});
    rc.payoff.lower = cfg::bound_list(p, "payoff", "lower", -1.0);
    rc.payoff.upper = cfg::bound_list(p, "payoff", "upper", +1.0);
    rc.payoff.slope = cfg::number(p, "payoff", "slope", 10.0);
    rc.payoff.cap = cfg::number(p, "payoff", "cap", 3.0);
    if (!(rc.payoff.slope > 0.0)) throw Error::config("payoff.slope: must be > 0");
    if (!(rc.payoff.cap > 0.0)) throw Error::config("payoff.cap: must be > 0");
    if (p.contains("free_dims")) {
      for (const auto& v : p["free_dims"]) {
        if (!v.is_number_integer())
          throw Error::config("payoff.free_dims: expected integers");
        rc.payoff.free_dims.insert(v.get<int>());
      }
    }
    rc.has_payoff = true;
  }

  if (doc.contains("solve")) {
    const json& s = doc["solve"];
    cfg::check_keys(s, "solve",
                    {"t_final", "eta", "eps", "cfl", "scheme", "track_extremes",
                     "snapshot_count", "snapshot_times", "snapshot_extremes",
                     "dilation_cells", "allow_high_dimension"});
    rc.solve.t_final = cfg::number(s, "solve", "t_final", -0.5);
    if (rc.solve.t_final > 0.0) throw Error::config("solve.t_final: must be <= 0");
    rc.solve.eta = cfg::number(s, "solve", "eta", 0.1);
    if (!(rc.solve.eta > 0.0)) throw Error::config("solve.eta: must be > 0");
    if (s.contains("eps")) {
      if (!s["eps"].is_array()) throw Error::config("solve.eps: expected an array");
      for (const auto& v : s["eps"]) {
        if (!v.is_number()) throw Error::config("solve.eps: expected numbers");
        const double e = v.get<double>();
        if (!(e > 0.0)) throw Error::config("solve.eps: entries must be > 0");
        rc.solve.eps.push_back(e);
      }
    }
    rc.solve.cfl = cfg::number(s, "solve", "cfl", 0.5);
    if (!(rc.solve.cfl > 0.0 && rc.solve.cfl <= 1.0))
      throw Error::config("solve.cfl: must lie in (0, 1]");
    rc.solve.scheme = cfg::text(s, "solve", "scheme", "euler");
    if (rc.solve.scheme != "euler" && rc.solve.scheme != "rk2")
      throw Error::config("solve.scheme: must be 'euler' or 'rk2'");
    rc.solve.track_extremes = cfg::boolean(s, "solve", "track_extremes", true);
    rc.solve.snapshot_count = cfg::integer(s, "solve", "snapshot_count", 0);
    if (s.contains("snapshot_times")) {
      for (const auto& v : s["snapshot_times"]) {
        if (!v.is_number()) throw Error::config("solve.snapshot_times: expected numbers");
        rc.solve.snapshot_times.push_back(v.get<double>());
      }
    }
    rc.solve.snapshot_extremes = cfg::boolean(s, "solve", "snapshot_extremes", false);
    rc.solve.dilation_cells = cfg::integer(s, "solve", "dilation_cells", 1);
    if (rc.solve.dilation_cells < 0)
      throw Error::config("solve.dilation_cells: must be >= 0");
    rc.solve.allow_high_dimension = cfg::boolean(s, "solve", "allow_high_dimension", false);
  }

  if (doc.contains("experiment")) {
    const json& e = doc["experiment"];
    cfg::check_keys(e, "experiment",
                    {"initial_states", "n_disturbances", "seed", "sample_period",
                     "fast_fraction", "h_max"});
    if (e.contains("initial_states")) {
      if (!e["initial_states"].is_array())
        throw Error::config("experiment.initial_states: expected an array");
      for (const auto& st : e["initial_states"]) {
        cfg::check_keys(st, "experiment.initial_states[]", {"z", "y"});
        const auto zv = cfg::number_list(st, "experiment.initial_states[]", "z");
        Eigen::VectorXd z = Eigen::Map<const Eigen::VectorXd>(zv.data(), zv.size());
        Eigen::VectorXd y;
        if (st.contains("y")) {
          const auto yv = cfg::number_list(st, "experiment.initial_states[]", "y");
          y = Eigen::Map<const Eigen::VectorXd>(yv.data(), yv.size());
        }
        rc.experiment.initial_states.emplace_back(std::move(z), std::move(y));
      }
    }
    rc.experiment.n_disturbances = cfg::integer(e, "experiment", "n_disturbances", 20);
    if (rc.experiment.n_disturbances < 1)
      throw Error::config("experiment.n_disturbances: must be >= 1");
    rc.experiment.seed = static_cast<std::uint64_t>(cfg::integer(e, "experiment", "seed", 0));
    rc.experiment.sample_period = cfg::number(e, "experiment", "sample_period", 0.0);
    rc.experiment.fast_fraction = cfg::number(e, "experiment", "fast_fraction", 0.1);
    if (!(rc.experiment.fast_fraction > 0.0))
      throw Error::config("experiment.fast_fraction: must be > 0");
    rc.experiment.h_max = cfg::number(e, "experiment", "h_max", 0.0);
  }

  if (doc.contains("verify")) {
    const json& v = doc["verify"];
    cfg::check_keys(v, "verify",
                    {"p", "p_matrix", "region_lower", "region_upper", "n_samples", "seed",
                     "stability_tol", "isaacs_tol", "decay_tol", "lambda_scale",
                     "decay_horizon", "decay_trials", "decay_z"});
    rc.verify.p_mode = cfg::text(v, "verify", "p", "identity");
    if (rc.verify.p_mode != "identity" && rc.verify.p_mode != "nominal_lyapunov" &&
        rc.verify.p_mode != "explicit")
      throw Error::config("verify.p: must be identity, nominal_lyapunov or explicit");
    if (v.contains("p_matrix")) {
      if (rc.verify.p_mode != "explicit")
        throw Error::config("verify.p_matrix: requires p = \"explicit\"");
      const json& pm = v["p_matrix"];
      if (!pm.is_array() || pm.empty())
        throw Error::config("verify.p_matrix: expected a non-empty array of rows");
      const std::size_t n = pm.size();
      rc.verify.p_matrix.resize(n, n);
      for (std::size_t i = 0; i < n; ++i) {
        if (!pm[i].is_array() || pm[i].size() != n)
          throw Error::config("verify.p_matrix: must be square");
        for (std::size_t j = 0; j < n; ++j) {
          if (!pm[i][j].is_number())
            throw Error::config("verify.p_matrix: expected numbers");
          rc.verify.p_matrix(i, j) = pm[i][j].get<double>();
        }
      }
    } else if (rc.verify.p_mode == "explicit") {
      throw Error::config("verify.p = \"explicit\" requires p_matrix");
    }
    if (v.contains("region_lower"))
      rc.verify.region_lower = cfg::number_list(v, "verify", "region_lower");
    if (v.contains("region_upper"))
      rc.verify.region_upper = cfg::number_list(v, "verify", "region_upper");
    rc.verify.n_samples = cfg::integer(v, "verify", "n_samples", 1000);
    if (rc.verify.n_samples < 1) throw Error::config("verify.n_samples: must be >= 1");
    rc.verify.seed = static_cast<std::uint64_t>(cfg::integer(v, "verify", "seed", 0));
    rc.verify.stability_tol = cfg::number(v, "verify", "stability_tol", 1e-9);
    rc.verify.isaacs_tol = cfg::number(v, "verify", "isaacs_tol", 1e-9);
    rc.verify.decay_tol = cfg::number(v, "verify", "decay_tol", 1e-6);
    rc.verify.lambda_scale = cfg::number(v, "verify", "lambda_scale", 2.0);
    rc.verify.decay_horizon = cfg::number(v, "verify", "decay_horizon", 10.0);
    if (!(rc.verify.decay_horizon > 0.0))
      throw Error::config("verify.decay_horizon: must be > 0");
    rc.verify.decay_trials = cfg::integer(v, "verify", "decay_trials", 100);
    if (v.contains("decay_z")) rc.verify.decay_z = cfg::number_list(v, "verify", "decay_z");
  }

  if (doc.contains("output")) {
    const json& o = doc["output"];
    cfg::check_keys(o, "output", {"directory", "formats"});
    if (o.contains("directory")) {
      rc.output.directory = cfg::text(o, "output", "directory", "out");
      rc.output.directory_from_config = true;
    }
    if (o.contains("formats")) {
      rc.output.formats.clear();
      for (const auto& f : o["formats"]) {
        if (!f.is_string()) throw Error::config("output.formats: expected strings");
        const std::string s = f.get<std::string>();
        if (s != "csv" && s != "json" && s != "svg" && s != "binary")
          throw Error::config("output.formats: unknown format '" + s + "'");
        rc.output.formats.insert(s);
      }
    }
  }
  return rc;
}

inline RunConfig parse_config_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error::config(std::string("config parse error: ") + e.what());
  }
  return parse_config(doc);
}

/// Registry for programmatically defined dynamics ("custom" system kind).
struct CustomRegistry {
  std::map<std::string, std::function<SPSystem(const json&)>> sp;
  std::map<std::string, std::function<ReducedSystem(const json&)>> reduced;

  static CustomRegistry& instance() {
    static CustomRegistry reg;
    return reg;
  }
};

inline void register_custom_sp(const std::string& name,
                               std::function<SPSystem(const json&)> builder) {
  CustomRegistry::instance().sp[name] = std::move(builder);
}

inline void register_custom_reduced(const std::string& name,
                                    std::function<ReducedSystem(const json&)> builder) {
  CustomRegistry::instance().reduced[name] = std::move(builder);
}

/// A model built from configuration: the SP system when available, plus the
/// reduced model (derived, or registered directly for reduced-only customs).
struct BuiltSystem {
  std::optional<SPSystem> sp;
  ReducedSystem reduced;
  std::string label;
};

inline BuiltSystem build_system(const SystemConfig& sc) {
  BuiltSystem out;
  if (sc.kind == "genetic_circuit") {
    out.sp = make_genetic_circuit(sc.alpha, sc.u_set, sc.d_set);
    out.reduced = derive_reduced(*out.sp);
    out.label = "genetic_circuit";
  } else if (sc.kind == "mrn") {
    MrnNetwork net;
    if (sc.has_edges) {
      net.n_metabolites = static_cast<int>(sc.n_metabolites);
      net.edges = sc.edges;
    } else {
      net = make_random_mrn_network(static_cast<int>(sc.n_metabolites), sc.seed);
    }
    out.sp = make_mrn(net, sc.u_set, sc.d_set);
    out.reduced = derive_reduced(*out.sp);
    out.label = "mrn";
  } else {
    auto& reg = CustomRegistry::instance();
    if (auto it = reg.sp.find(sc.custom_name); it != reg.sp.end()) {
      out.sp = it->second(sc.custom_params);
      if (sc.u_set) out.sp->u_set = *sc.u_set;
      if (sc.d_set) out.sp->d_set = *sc.d_set;
      out.reduced = derive_reduced(*out.sp);
    } else if (auto jt = reg.reduced.find(sc.custom_name); jt != reg.reduced.end()) {
      out.reduced = jt->second(sc.custom_params);
      if (sc.u_set) out.reduced.u_set = *sc.u_set;
      if (sc.d_set) out.reduced.d_set = *sc.d_set;
    } else {
      throw Error::config("system.name: no registered custom system '" + sc.custom_name +
                          "'");
    }
    out.label = "custom:" + sc.custom_name;
  }
  return out;
}

/// Built-in custom example: a single integrator zdot = u with U = [-1, 1]
/// and a frozen disturbance, the standard analytic test problem.
inline void register_builtin_customs() {
  static bool done = false;
  if (done) return;
  done = true;
  register_custom_reduced("single_integrator", [](const json& params) {
    double lo = -1.0, hi = 1.0;
    if (!params.is_null()) {
      cfg::check_keys(params, "system.params", {"u_min", "u_max"});
      lo = cfg::number(params, "system.params", "u_min", -1.0);
      hi = cfg::number(params, "system.params", "u_max", 1.0);
    }
    ReducedSystem red;
    red.n_z = 1;
    red.u_set = BoxSet(Eigen::VectorXd::Constant(1, lo), Eigen::VectorXd::Constant(1, hi), 2);
    red.d_set = BoxSet::cube(0.0, 0.0, 1, 2);
    red.provenance = "handwritten:single_integrator";
    red.F = [](const Eigen::VectorXd&, const Eigen::VectorXd& u, const Eigen::VectorXd&) {
      return u;
    };
    return red;
  });
}

}  // namespace spreach
