#pragma once

#include <json.hpp>

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "spreach/assumptions.hpp"
#include "spreach/feedback.hpp"
#include "spreach/reach.hpp"

namespace spreach {

namespace detail {

inline nlohmann::json to_json(const Eigen::VectorXd& v) {
  nlohmann::json a = nlohmann::json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

inline nlohmann::json to_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (int i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace detail

inline nlohmann::json report_json(const RegularityReport& r) {
  nlohmann::json j;
  j["k_estimate"] = r.k_estimate;
  j["sample_count"] = r.sample_count;
  j["seed"] = r.seed;
  j["pass"] = std::isfinite(r.k_estimate);
  j["worst_coupling"] = {{"z", detail::to_json(r.worst_coupling.z)},
                         {"u", detail::to_json(r.worst_coupling.u)},
                         {"d", detail::to_json(r.worst_coupling.d)},
                         {"value", r.worst_coupling.value}};
  j["worst_drift"] = {{"z", detail::to_json(r.worst_drift.z)},
                      {"u", detail::to_json(r.worst_drift.u)},
                      {"d", detail::to_json(r.worst_drift.d)},
                      {"value", r.worst_drift.value}};
  return j;
}

inline nlohmann::json report_json(const StabilityResult& r) {
  nlohmann::json j;
  j["pass"] = r.passed();
  j["sample_count"] = r.sample_count;
  j["seed"] = r.seed;
  j["tolerance"] = r.tol;
  if (r.cert) {
    j["nu"] = r.cert->nu;
    j["alpha"] = r.cert->alpha_decay;
    j["kappa"] = r.cert->kappa;
    j["p"] = detail::to_json(r.cert->P);
  }
  if (r.witness) {
    j["witness"] = {{"z", detail::to_json(r.witness->z)},
                    {"u", detail::to_json(r.witness->u)},
                    {"d", detail::to_json(r.witness->d)},
                    {"eigenvalue", r.witness->eigenvalue}};
  }
  return j;
}

inline nlohmann::json report_json(const IsaacsResult& r) {
  nlohmann::json j;
  j["pass"] = r.passed();
  j["max_gap"] = r.max_gap;
  j["n_probes"] = r.n_probes;
  j["seed"] = r.seed;
  j["tolerance"] = r.tol;
  if (r.worst_z.size()) j["worst_z"] = detail::to_json(r.worst_z);
  if (r.worst_lambda.size()) j["worst_lambda"] = detail::to_json(r.worst_lambda);
  return j;
}

inline nlohmann::json report_json(const DecayResult& r) {
  nlohmann::json j;
  j["pass"] = r.passed();
  j["worst_ratio"] = r.worst_ratio;
  j["n_trials"] = r.n_trials;
  j["seed"] = r.seed;
  j["tolerance"] = r.tol;
  return j;
}

inline nlohmann::json report_json(const ContainmentReport& r, int max_examples = 20) {
  nlohmann::json j;
  j["verdict"] = r.verdict ? "pass" : "fail";
  j["checked_nodes"] = r.checked_nodes;
  j["dilation_cells"] = r.dilation_cells;
  j["violation_count"] = r.violations.size();
  j["inner_nodes"] = r.inner_nodes;
  j["zero_set_nodes"] = r.zero_set_nodes;
  nlohmann::json ex = nlohmann::json::array();
  for (std::size_t i = 0; i < r.violations.size() && i < static_cast<std::size_t>(max_examples);
       ++i) {
    const auto& v = r.violations[i];
    ex.push_back({{"coords", v.coords},
                  {"v_bar", v.v_bar},
                  {"v_eps", v.v_eps},
                  {"inclusion", v.inclusion}});
  }
  j["examples"] = ex;
  return j;
}

inline nlohmann::json report_json(const ReachExperimentReport& r) {
  nlohmann::json j;
  j["t"] = r.t;
  j["eta"] = r.eta;
  j["eps"] = r.eps;
  j["seed"] = r.seed;
  j["all_consistent"] = r.all_consistent();
  nlohmann::json states = nlohmann::json::array();
  for (const auto& s : r.states) {
    nlohmann::json sj;
    sj["z0"] = detail::to_json(s.z0);
    sj["y0"] = detail::to_json(s.y0);
    sj["v_bar"] = s.v_bar;
    sj["label"] = to_string(s.label);
    sj["n_runs"] = s.n_runs;
    sj["n_reached"] = s.n_reached;
    sj["n_errors"] = s.n_errors;
    sj["reach_fraction"] = s.reach_fraction;
    sj["consistent"] = s.consistent;
    nlohmann::json runs = nlohmann::json::array();
    for (std::size_t i = 0; i < s.run_reached.size(); ++i)
      runs.push_back({{"reached", s.run_reached[i] != 0},
                      {"error", s.run_errors[i]}});
    sj["runs"] = runs;
    states.push_back(sj);
  }
  j["states"] = states;
  return j;
}

}  // namespace spreach
