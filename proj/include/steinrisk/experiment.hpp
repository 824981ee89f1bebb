#pragma once

// Experiment configuration: one JSON document with flat sections. Unknown
// keys anywhere are rejected.
//
//   {
//     "model":      {"k": 10, "V": 1.0, "A": 2.0},
//     "estimators": [{"kind": "JamesStein"}, {"kind": "ADM", "m": 4, "c": 1}],
//     "run":        {"theta_grid": {"start": 0, "stop": 12, "step": 0.5},
//                    "n_reps": 200000, "seed": 20111028, "crn": true,
//                    "threads": 0, "output_path": "out"},
//     "shrink":     {"y_norm_sq": 16}            or {"y": [..k values..]},
//     "minimax":    {"t_min": 1e-6, "t_max": 1e8, "points": 2000},
//     "posterior":  {"y_norm_sq": 3.7},
//     "divergence": {"theta_norm_sq": 1, "eps": [1e-2, 1e-3],
//                    "upper_cuts": [1e2, 1e4]}
//   }

#include <cmath>
#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "steinrisk/minimax.hpp"
#include "steinrisk/model.hpp"
#include "steinrisk/risk.hpp"
#include "steinrisk/shrinkage.hpp"

namespace steinrisk {

/// Malformed or unrecognized configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EstimatorSpec {
  EstimatorKind kind = EstimatorKind::JamesStein;
  std::string name;           // empty: kind default
  std::optional<double> m;    // ADM; default (k - 2) / 2
  double c = 1.0;             // ADM

  ShrinkageEstimator build(const ModelConfig& cfg) const {
    switch (kind) {
      case EstimatorKind::JamesStein:
        return name.empty() ? ShrinkageEstimator::james_stein() : ShrinkageEstimator::james_stein(name);
      case EstimatorKind::PositivePartJS:
        return name.empty() ? ShrinkageEstimator::positive_part() : ShrinkageEstimator::positive_part(name);
      case EstimatorKind::MLE:
        return name.empty() ? ShrinkageEstimator::mle() : ShrinkageEstimator::mle(name);
      case EstimatorKind::ADM: {
        const double mv = m ? *m : (cfg.k() - 2) / 2.0;
        return ShrinkageEstimator::adm(AdmParams(mv, c), name);
      }
      case EstimatorKind::Custom:
        break;
    }
    throw ConfigError("estimators: Custom rules cannot be built from a config file");
  }
};

struct DivergenceSpec {
  double theta_norm_sq = 1.0;
  std::vector<double> eps{1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8};
  std::vector<double> upper_cuts{1e2, 1e3, 1e4, 1e5, 1e6, 1e7, 1e8, 1e9, 1e10, 1e11, 1e12};
};

struct ExperimentConfig {
  ModelConfig model{10, 1.0};
  std::vector<EstimatorSpec> estimators;
  std::vector<double> theta_grid = theta_range(0.0, 12.0, 0.5);
  std::int64_t n_reps = 200'000;
  std::uint64_t seed = 20111028;
  bool crn = true;
  unsigned threads = 0;
  std::string output_path = ".";

  std::optional<std::vector<double>> shrink_y;
  std::optional<double> shrink_y_norm_sq;
  LogGrid minimax_grid{};
  std::optional<double> posterior_y_norm_sq;
  DivergenceSpec divergence;

  std::vector<ShrinkageEstimator> build_estimators() const {
    std::vector<ShrinkageEstimator> out;
    for (const auto& s : estimators) out.push_back(s.build(model));
    return out;
  }

  RiskRunOptions run_options() const { return {n_reps, seed, crn, threads}; }
};

namespace detail {

using nlohmann::json;

inline void require_object(const json& j, std::string_view where) {
  if (!j.is_object()) throw ConfigError(std::string(where) + ": expected an object");
}

inline void reject_unknown(const json& j, std::string_view where, std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError(std::string(where) + ": unknown key '" + key + "'");
  }
}

template <class T>
T get(const json& j, std::string_view where) {
  try {
    return j.get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string(where) + ": " + e.what());
  }
}

inline double get_real(const json& j, std::string_view where) {
  if (!j.is_number()) throw ConfigError(std::string(where) + ": expected a number");
  return j.get<double>();
}

inline std::vector<double> get_reals(const json& j, std::string_view where) {
  if (!j.is_array()) throw ConfigError(std::string(where) + ": expected an array of numbers");
  std::vector<double> v;
  for (const auto& x : j) v.push_back(get_real(x, where));
  return v;
}

inline EstimatorKind parse_kind(const std::string& s, std::string_view where) {
  for (auto k : {EstimatorKind::JamesStein, EstimatorKind::PositivePartJS, EstimatorKind::ADM, EstimatorKind::MLE,
                 EstimatorKind::Custom})
    if (s == to_string(k)) {
      if (k == EstimatorKind::Custom) throw ConfigError(std::string(where) + ": Custom rules are library-only");
      return k;
    }
  throw ConfigError(std::string(where) + ": unknown kind '" + s + "'");
}

/// Wraps a DomainError so its message names the config field.
template <class F>
auto in_field(std::string_view field, F&& f) {
  try {
    return f();
  } catch (const DomainError& e) {
    throw DomainError(std::string(field) + ": " + e.what());
  }
}

}  // namespace detail

/// Throws ConfigError for syntax, type, or unknown-key problems, and
/// DomainError (naming the field) for values outside their domain.
inline ExperimentConfig parse_experiment_config(std::string_view text) {
  using detail::json;
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  detail::require_object(root, "config");
  detail::reject_unknown(root, "config", {"model", "estimators", "run", "shrink", "minimax", "posterior", "divergence"});

  ExperimentConfig cfg;
  if (root.contains("model")) {
    const auto& m = root["model"];
    detail::require_object(m, "model");
    detail::reject_unknown(m, "model", {"k", "V", "A"});
    int k = cfg.model.k();
    double V = cfg.model.V();
    std::optional<double> A;
    if (m.contains("k")) {
      if (!m["k"].is_number_integer()) throw ConfigError("model.k: expected an integer");
      k = m["k"].get<int>();
    }
    if (m.contains("V")) V = detail::get_real(m["V"], "model.V");
    if (m.contains("A") && !m["A"].is_null()) A = detail::get_real(m["A"], "model.A");
    if (k < 1) throw DomainError("model.k: must be >= 1");
    if (!(V > 0.0)) throw DomainError("model.V: must be > 0");
    if (A && !(*A >= 0.0)) throw DomainError("model.A: must be >= 0");
    cfg.model = ModelConfig(k, V, A);
  }

  if (root.contains("estimators")) {
    const auto& list = root["estimators"];
    if (!list.is_array()) throw ConfigError("estimators: expected an array");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string where = "estimators[" + std::to_string(i) + "]";
      const auto& e = list[i];
      detail::require_object(e, where);
      detail::reject_unknown(e, where, {"kind", "name", "m", "c"});
      if (!e.contains("kind")) throw ConfigError(where + ": missing 'kind'");
      EstimatorSpec spec;
      spec.kind = detail::parse_kind(detail::get<std::string>(e["kind"], where + ".kind"), where + ".kind");
      if (e.contains("name")) spec.name = detail::get<std::string>(e["name"], where + ".name");
      if (spec.name.find_first_of(",\"\n\r") != std::string::npos)
        throw ConfigError(where + ".name: must not contain commas, quotes or newlines");
      if ((e.contains("m") || e.contains("c")) && spec.kind != EstimatorKind::ADM)
        throw ConfigError(where + ": 'm' and 'c' apply to ADM only");
      if (e.contains("m")) spec.m = detail::get_real(e["m"], where + ".m");
      if (e.contains("c")) spec.c = detail::get_real(e["c"], where + ".c");
      if (spec.kind == EstimatorKind::ADM) {
        const double mv = spec.m ? *spec.m : (cfg.model.k() - 2) / 2.0;
        detail::in_field(where, [&] { return AdmParams(mv, spec.c); });
      }
      cfg.estimators.push_back(spec);
    }
  }

  if (root.contains("run")) {
    const auto& r = root["run"];
    detail::require_object(r, "run");
    detail::reject_unknown(r, "run", {"theta_grid", "n_reps", "seed", "crn", "threads", "output_path"});
    if (r.contains("theta_grid")) {
      const auto& g = r["theta_grid"];
      if (g.is_array()) {
        cfg.theta_grid = detail::get_reals(g, "run.theta_grid");
      } else {
        detail::require_object(g, "run.theta_grid");
        detail::reject_unknown(g, "run.theta_grid", {"start", "stop", "step"});
        for (auto key : {"start", "stop", "step"})
          if (!g.contains(key)) throw ConfigError(std::string("run.theta_grid: missing '") + key + "'");
        cfg.theta_grid = detail::in_field("run.theta_grid", [&] {
          return theta_range(detail::get_real(g["start"], "run.theta_grid.start"),
                             detail::get_real(g["stop"], "run.theta_grid.stop"),
                             detail::get_real(g["step"], "run.theta_grid.step"));
        });
      }
      if (cfg.theta_grid.empty()) throw DomainError("run.theta_grid: must not be empty");
      for (std::size_t i = 0; i < cfg.theta_grid.size(); ++i) {
        if (!(cfg.theta_grid[i] >= 0.0)) throw DomainError("run.theta_grid: values must be >= 0");
        if (i > 0 && !(cfg.theta_grid[i] > cfg.theta_grid[i - 1]))
          throw DomainError("run.theta_grid: values must be strictly ascending");
      }
    }
    if (r.contains("n_reps")) {
      if (!r["n_reps"].is_number_integer()) throw ConfigError("run.n_reps: expected an integer");
      cfg.n_reps = r["n_reps"].get<std::int64_t>();
      if (cfg.n_reps < 2) throw DomainError("run.n_reps: must be >= 2");
    }
    if (r.contains("seed")) {
      if (!r["seed"].is_number_unsigned()) throw ConfigError("run.seed: expected a nonnegative integer");
      cfg.seed = r["seed"].get<std::uint64_t>();
    }
    if (r.contains("crn")) cfg.crn = detail::get<bool>(r["crn"], "run.crn");
    if (r.contains("threads")) {
      if (!r["threads"].is_number_unsigned()) throw ConfigError("run.threads: expected a nonnegative integer");
      cfg.threads = r["threads"].get<unsigned>();
    }
    if (r.contains("output_path")) cfg.output_path = detail::get<std::string>(r["output_path"], "run.output_path");
  }

  if (root.contains("shrink")) {
    const auto& s = root["shrink"];
    detail::require_object(s, "shrink");
    detail::reject_unknown(s, "shrink", {"y", "y_norm_sq"});
    if (s.contains("y") && s.contains("y_norm_sq")) throw ConfigError("shrink: give either 'y' or 'y_norm_sq'");
    if (s.contains("y")) {
      cfg.shrink_y = detail::get_reals(s["y"], "shrink.y");
      if (cfg.shrink_y->size() != static_cast<std::size_t>(cfg.model.k()))
        throw DomainError("shrink.y: length must equal model.k");
    }
    if (s.contains("y_norm_sq")) {
      cfg.shrink_y_norm_sq = detail::get_real(s["y_norm_sq"], "shrink.y_norm_sq");
      if (!(*cfg.shrink_y_norm_sq >= 0.0)) throw DomainError("shrink.y_norm_sq: must be >= 0");
    }
  }

  if (root.contains("minimax")) {
    const auto& m = root["minimax"];
    detail::require_object(m, "minimax");
    detail::reject_unknown(m, "minimax", {"t_min", "t_max", "points"});
    if (m.contains("t_min")) cfg.minimax_grid.lo = detail::get_real(m["t_min"], "minimax.t_min");
    if (m.contains("t_max")) cfg.minimax_grid.hi = detail::get_real(m["t_max"], "minimax.t_max");
    if (m.contains("points")) {
      if (!m["points"].is_number_integer()) throw ConfigError("minimax.points: expected an integer");
      cfg.minimax_grid.points = m["points"].get<int>();
    }
    detail::in_field("minimax", [&] { return cfg.minimax_grid.values().size(); });
  }

  if (root.contains("posterior")) {
    const auto& p = root["posterior"];
    detail::require_object(p, "posterior");
    detail::reject_unknown(p, "posterior", {"y_norm_sq"});
    if (p.contains("y_norm_sq")) cfg.posterior_y_norm_sq = detail::get_real(p["y_norm_sq"], "posterior.y_norm_sq");
  }

  if (root.contains("divergence")) {
    const auto& d = root["divergence"];
    detail::require_object(d, "divergence");
    detail::reject_unknown(d, "divergence", {"theta_norm_sq", "eps", "upper_cuts"});
    if (d.contains("theta_norm_sq"))
      cfg.divergence.theta_norm_sq = detail::get_real(d["theta_norm_sq"], "divergence.theta_norm_sq");
    if (d.contains("eps")) cfg.divergence.eps = detail::get_reals(d["eps"], "divergence.eps");
    if (d.contains("upper_cuts")) cfg.divergence.upper_cuts = detail::get_reals(d["upper_cuts"], "divergence.upper_cuts");
  }
  return cfg;
}

inline ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_experiment_config(ss.str());
}

}  // namespace steinrisk
