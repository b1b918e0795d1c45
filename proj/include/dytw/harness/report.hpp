#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "dytw/conditions.hpp"
#include "dytw/harness/serialize.hpp"
#include "dytw/instance.hpp"
#include "dytw/norm_estim.hpp"

namespace dytw {

struct EvalOptions {
  OptimizerOptions opt;
  /// epsilon for the necessary condition N, as a fraction of q.
  double eps_fraction = 0.25;
  /// comparability threshold for the ordering flags.
  double K = 100.0;
};

/// Everything the harness records about one instance: condition values,
/// norm estimates, their ratios, and the ordering flags.
struct Report {
  std::string digest;
  int dimension = 0;
  int depth = 0;
  double p = 0.0, q = 0.0, eps = 0.0;
  double estimate_T = 0.0, estimate_M = 0.0;
  double n1 = std::numeric_limits<double>::quiet_NaN();
  double n2 = std::numeric_limits<double>::quiet_NaN();
  double I = 0.0, Istar = 0.0, S = 0.0, N = 0.0;
  double V1 = std::numeric_limits<double>::quiet_NaN();
  double V2 = std::numeric_limits<double>::quiet_NaN();
  double fw_sigma_omega = 0.0, fw_omega_sigma = 0.0, dlbo = 0.0;
  bool converged_T = true, converged_M = true;
  double K = 100.0;
  bool ordering_N_le_KM = true, ordering_M_le_KS = true;
  std::map<std::string, double> ratios;
};

inline const std::vector<std::string>& report_ratio_names() {
  static const std::vector<std::string> names = {
      "T_over_I",    "I_over_T",    "T_over_Istar", "M_over_S",  "S_over_M", "N_over_M",
      "S_over_N",    "M_over_T",    "T_over_pair",  "T_over_maxV"};
  return names;
}

/// Recomputes the derived ratio map from the recorded values (the same
/// arithmetic eval uses, so reports are re-derivable offline).
inline std::map<std::string, double> derive_ratios(const Report& r) {
  std::map<std::string, double> out;
  out["T_over_I"] = r.estimate_T / r.I;
  out["I_over_T"] = r.I / r.estimate_T;
  out["T_over_Istar"] = r.estimate_T / r.Istar;
  out["M_over_S"] = r.estimate_M / r.S;
  out["S_over_M"] = r.S / r.estimate_M;
  out["N_over_M"] = r.N / r.estimate_M;
  out["S_over_N"] = r.S / r.N;
  out["M_over_T"] = r.estimate_M / r.estimate_T;
  out["T_over_pair"] = r.estimate_T / (r.n1 + r.n2);
  out["T_over_maxV"] = r.estimate_T / std::max(r.V1, r.V2);
  return out;
}

/// Runs every condition and estimator on the instance and assembles the
/// full report. Quantities needing q > 1 (Wolff pair, maximal pair) stay
/// NaN outside their range.
inline Report eval_instance(const Instance& inst, const EvalOptions& options = {}) {
  Report r;
  r.digest = instance_digest(inst);
  r.dimension = inst.tree.dimension();
  r.depth = inst.tree.depth();
  r.p = inst.p;
  r.q = inst.q;
  r.eps = options.eps_fraction * inst.q;
  r.K = options.K;

  NormEstimate t_est = estimate_norm_summation(inst, options.opt);
  NormEstimate m_est = estimate_norm_maximal(inst, options.opt);
  r.estimate_T = t_est.value;
  r.estimate_M = m_est.value;
  r.converged_T = t_est.converged;
  r.converged_M = m_est.converged;

  r.I = integral_condition(inst.tree, inst.lambda, inst.sigma, inst.omega, inst.p, inst.q, false);
  r.Istar = integral_condition(inst.tree, inst.lambda, inst.sigma, inst.omega, inst.p, inst.q, true);
  auto [s, n] =
      maximal_condition_values(inst.tree, inst.lambda, inst.sigma, inst.omega, inst.p, inst.q, r.eps);
  r.S = s;
  r.N = n;
  r.fw_sigma_omega = fw_characteristic(inst.tree, inst.sigma, inst.omega);
  r.fw_omega_sigma = fw_characteristic(inst.tree, inst.omega, inst.sigma);
  r.dlbo = dlbo_ratio(inst.tree, inst.lambda);

  if (inst.q > 1.0 && !std::isinf(inst.p)) {
    auto [v1, v2] = wolff_condition(inst.tree, inst.lambda, inst.sigma, inst.omega, inst.p, inst.q);
    r.V1 = v1;
    r.V2 = v2;
    auto [p1, p2] =
        maximal_pair_norms(inst.tree, inst.lambda, inst.sigma, inst.omega, inst.p, inst.q, options.opt);
    r.n1 = p1.value;
    r.n2 = p2.value;
  }

  r.ordering_N_le_KM = r.N <= r.K * r.estimate_M * (1.0 + 1e-12) || r.N == 0.0;
  r.ordering_M_le_KS = r.estimate_M <= r.K * r.S * (1.0 + 1e-12) || r.estimate_M == 0.0;
  r.ratios = derive_ratios(r);
  return r;
}

inline nlohmann::json report_to_json(const Report& r) {
  nlohmann::json j;
  j["digest"] = r.digest;
  j["dimension"] = r.dimension;
  j["depth"] = r.depth;
  j["p"] = json_number(r.p);
  j["q"] = json_number(r.q);
  j["eps"] = json_number(r.eps);
  j["estimate_T"] = json_number(r.estimate_T);
  j["estimate_M"] = json_number(r.estimate_M);
  j["n1"] = json_number(r.n1);
  j["n2"] = json_number(r.n2);
  j["I"] = json_number(r.I);
  j["Istar"] = json_number(r.Istar);
  j["S"] = json_number(r.S);
  j["N"] = json_number(r.N);
  j["V1"] = json_number(r.V1);
  j["V2"] = json_number(r.V2);
  j["fw_sigma_omega"] = json_number(r.fw_sigma_omega);
  j["fw_omega_sigma"] = json_number(r.fw_omega_sigma);
  j["dlbo"] = json_number(r.dlbo);
  j["converged_T"] = r.converged_T;
  j["converged_M"] = r.converged_M;
  j["K"] = json_number(r.K);
  j["ordering_N_le_KM"] = r.ordering_N_le_KM;
  j["ordering_M_le_KS"] = r.ordering_M_le_KS;
  nlohmann::json ratios = nlohmann::json::object();
  for (auto& [name, value] : r.ratios) ratios[name] = json_number(value);
  j["ratios"] = std::move(ratios);
  return j;
}

inline Report report_from_json(const nlohmann::json& j) {
  Report r;
  r.digest = j.at("digest").get<std::string>();
  r.dimension = j.at("dimension").get<int>();
  r.depth = j.at("depth").get<int>();
  r.p = number_from_json(j.at("p"));
  r.q = number_from_json(j.at("q"));
  r.eps = number_from_json(j.at("eps"));
  r.estimate_T = number_from_json(j.at("estimate_T"));
  r.estimate_M = number_from_json(j.at("estimate_M"));
  r.n1 = number_from_json(j.at("n1"));
  r.n2 = number_from_json(j.at("n2"));
  r.I = number_from_json(j.at("I"));
  r.Istar = number_from_json(j.at("Istar"));
  r.S = number_from_json(j.at("S"));
  r.N = number_from_json(j.at("N"));
  r.V1 = number_from_json(j.at("V1"));
  r.V2 = number_from_json(j.at("V2"));
  r.fw_sigma_omega = number_from_json(j.at("fw_sigma_omega"));
  r.fw_omega_sigma = number_from_json(j.at("fw_omega_sigma"));
  r.dlbo = number_from_json(j.at("dlbo"));
  r.converged_T = j.at("converged_T").get<bool>();
  r.converged_M = j.at("converged_M").get<bool>();
  r.K = number_from_json(j.at("K"));
  r.ordering_N_le_KM = j.at("ordering_N_le_KM").get<bool>();
  r.ordering_M_le_KS = j.at("ordering_M_le_KS").get<bool>();
  for (auto& [name, value] : j.at("ratios").items()) r.ratios[name] = number_from_json(value);
  return r;
}

inline std::string report_csv_header() {
  std::vector<std::string> cells = {"digest", "dim",  "depth", "p",  "q",     "eps",
                                    "estimate_T", "estimate_M", "n1", "n2", "I", "Istar",
                                    "S",      "N",    "V1",    "V2", "fw_so", "fw_os",
                                    "dlbo",   "conv_T", "conv_M"};
  for (auto& name : report_ratio_names()) cells.push_back(name);
  return csv_row(cells);
}

inline std::string report_csv_line(const Report& r) {
  std::vector<std::string> cells = {r.digest,
                                    std::to_string(r.dimension),
                                    std::to_string(r.depth),
                                    format_double(r.p),
                                    format_double(r.q),
                                    format_double(r.eps),
                                    format_double(r.estimate_T),
                                    format_double(r.estimate_M),
                                    format_double(r.n1),
                                    format_double(r.n2),
                                    format_double(r.I),
                                    format_double(r.Istar),
                                    format_double(r.S),
                                    format_double(r.N),
                                    format_double(r.V1),
                                    format_double(r.V2),
                                    format_double(r.fw_sigma_omega),
                                    format_double(r.fw_omega_sigma),
                                    format_double(r.dlbo),
                                    r.converged_T ? "1" : "0",
                                    r.converged_M ? "1" : "0"};
  for (auto& name : report_ratio_names()) cells.push_back(format_double(r.ratios.at(name)));
  return csv_row(cells);
}

}  // namespace dytw
