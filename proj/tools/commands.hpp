#pragma once

// Subcommand bodies for the steinrisk CLI. Each returns a process exit code:
// 0 success, 4 when a checked property fails. Configuration and domain
// problems surface as ConfigError / DomainError for main() to map to 2 / 3.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "steinrisk/bayes_identity.hpp"
#include "steinrisk/csv.hpp"
#include "steinrisk/experiment.hpp"
#include "steinrisk/figure1.hpp"
#include "steinrisk/minimax.hpp"
#include "steinrisk/risk.hpp"
#include "steinrisk/shrinkage.hpp"

namespace steinrisk::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitDomain = 3;
inline constexpr int kExitInvariant = 4;

inline constexpr double kIdentityRelTol = 1e-10;
inline constexpr double kContrastStableTol = 1e-9;

template <class... Args>
std::string format(const char* f, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

inline std::vector<ShrinkageEstimator> estimators_or(const ExperimentConfig& cfg,
                                                     std::vector<ShrinkageEstimator> fallback) {
  return cfg.estimators.empty() ? fallback : cfg.build_estimators();
}

inline int cmd_shrink(const ExperimentConfig& cfg, std::ostream& out) {
  const ModelConfig& model = cfg.model;
  if (!cfg.shrink_y && !cfg.shrink_y_norm_sq)
    throw ConfigError("shrink: need shrink.y or shrink.y_norm_sq (or --y-norm-sq)");
  const double y_norm_sq = cfg.shrink_y ? norm_sq(*cfg.shrink_y) : *cfg.shrink_y_norm_sq;
  const auto ests = estimators_or(cfg, {ShrinkageEstimator::james_stein(), ShrinkageEstimator::positive_part(),
                                        ShrinkageEstimator::adm(AdmParams::default_for(model)),
                                        ShrinkageEstimator::mle()});

  out << format("k = %d, V = %.10g, |y|^2 = %.10g, T = %.10g\n", model.k(), model.V(), y_norm_sq,
                y_norm_sq / (2.0 * model.V()));
  out << format("%-24s %18s %18s %18s  %s\n", "estimator", "B", "coefficient", "g", "note");
  for (const auto& e : ests) {
    const double B = e.shrink_factor(y_norm_sq, model);
    const double coef = e.coefficient(y_norm_sq, model);
    const std::string g = y_norm_sq > 0.0 ? format("%18.10g", e.g_of_theorem(y_norm_sq, model)) : format("%18s", "-");
    std::string note;
    if (coef < 0.0) note = "sign reversal";
    else if (coef == 0.0) note = "total shrinkage";
    out << format("%-24s %18.10g %18.10g ", e.name().c_str(), B, coef) << g << "  " << note << '\n';
    if (cfg.shrink_y) {
      out << "  delta =";
      for (double v : e.estimate(*cfg.shrink_y, model)) out << format(" %.10g", v);
      out << '\n';
    }
  }
  return kExitOk;
}

inline int cmd_figure1(const ExperimentConfig& cfg, std::ostream& out) {
  const ModelConfig& model = cfg.model;
  if (model.k() < 3) throw DomainError("model.k: figure1 needs k >= 3");
  const auto curve = risk_curve(figure1::all_estimators(model), cfg.theta_grid, model, cfg.run_options());

  std::vector<std::string> left_names, right_names;
  for (const auto& e : figure1::left_panel(model)) left_names.push_back(e.name());
  for (const auto& e : figure1::right_panel(model)) right_names.push_back(e.name());

  const std::string setup = format("k=%d V=%.17g crn=%s", model.k(), model.V(), cfg.crn ? "true" : "false");
  std::filesystem::create_directories(cfg.output_path);
  const auto left_path = std::filesystem::path(cfg.output_path) / "left_panel.csv";
  const auto right_path = std::filesystem::path(cfg.output_path) / "right_panel.csv";
  {
    std::ofstream f(left_path, std::ios::binary);
    csv::write_risk_table(f, csv::select(curve, left_names),
                          {"left panel: James-Stein and ADM with m = (k-2)/d, d in {2,4,6,8,10}, c = 1", setup});
  }
  {
    std::ofstream f(right_path, std::ios::binary);
    csv::write_risk_table(
        f, csv::select(curve, right_names),
        {"right panel: ADM(m=(k-2)/2), James-Stein, positive-part James-Stein", setup,
         "the admissible-estimator curve is omitted: its shrink factor is not implemented by this tool"});
  }
  out << "wrote " << left_path.string() << '\n' << "wrote " << right_path.string() << '\n';

  const auto checks = figure1::check(curve);
  out << figure1::describe(checks);
  if (!checks.ok()) {
    out << "figure1: invariant violation\n";
    return kExitInvariant;
  }
  return kExitOk;
}

inline int cmd_check_minimax(const ExperimentConfig& cfg, std::ostream& out) {
  const ModelConfig& model = cfg.model;
  if (model.k() < 3) throw DomainError("model.k: certification needs k >= 3");
  const auto ests = estimators_or(cfg, {ShrinkageEstimator::james_stein(), ShrinkageEstimator::positive_part(),
                                        ShrinkageEstimator::adm(AdmParams::default_for(model))});
  std::vector<BaranchikReport> reports;
  bool all = true;
  for (const auto& e : ests) {
    reports.push_back(certify(e, model, cfg.minimax_grid));
    all = all && reports.back().certified;
    out << to_key_value(reports.back()) << '\n';
  }
  std::filesystem::create_directories(cfg.output_path);
  const auto path = std::filesystem::path(cfg.output_path) / "minimax.csv";
  std::ofstream f(path, std::ios::binary);
  f << kMinimaxCsvHeader << '\n';
  for (const auto& r : reports) f << to_csv_row(r) << '\n';
  out << "wrote " << path.string() << '\n';
  return all ? kExitOk : kExitInvariant;
}

inline int cmd_posterior_identity(const ExperimentConfig& cfg, std::ostream& out) {
  const ModelConfig& model = cfg.model;
  if (model.k() % 2 != 0 || model.k() < 4)
    throw DomainError("model.k: posterior-identity needs even k >= 4 (odd k makes the (-V, 0) prior integral complex)");
  if (!cfg.posterior_y_norm_sq) throw ConfigError("posterior-identity: need posterior.y_norm_sq (or --y-norm-sq)");
  const double y_norm_sq = *cfg.posterior_y_norm_sq;
  if (!(y_norm_sq > 0.0)) throw DomainError("posterior.y_norm_sq: must be > 0");

  const auto d = posterior_shrink_decomposition(y_norm_sq, model);
  const auto q = posterior_pieces_by_quadrature(y_norm_sq, model);
  const double closed = model.V() * (model.k() - 2) / y_norm_sq;
  const double rel = std::abs(d.normalized_EB - closed) / closed;
  out << format("k = %d, V = %.17g, |y|^2 = %.17g\n", model.k(), model.V(), y_norm_sq)
      << format("upper_piece  P(chi2_k >= |y|^2/V) = %.17g   (A-quadrature %.17g)\n", d.upper_piece, q.upper_piece)
      << format("lower_piece  P(chi2_k <= |y|^2/V) = %.17g   (A-quadrature %.17g)\n", d.lower_piece, q.lower_piece)
      << format("sum of pieces = %.17g\n", d.upper_piece + d.lower_piece)
      << format("log common_factor = %.17g, log normalizer = %.17g\n", d.log_common_factor, d.log_normalizer)
      << format("normalized E(B|y) = %.17g\n", d.normalized_EB)
      << format("V(k-2)/|y|^2      = %.17g\n", closed) << format("relative difference = %.3g\n", rel);
  if (!(rel <= kIdentityRelTol)) {
    out << "posterior-identity: normalized E(B|y) disagrees with V(k-2)/|y|^2\n";
    return kExitInvariant;
  }
  return kExitOk;
}

inline int cmd_divergence(const ExperimentConfig& cfg, std::ostream& out) {
  const ModelConfig& model = cfg.model;
  const auto& spec = cfg.divergence;
  if (spec.eps.empty()) throw DomainError("divergence.eps: must not be empty");
  for (std::size_t i = 1; i < spec.eps.size(); ++i)
    if (!(spec.eps[i] < spec.eps[i - 1])) throw DomainError("divergence.eps: must be strictly decreasing");

  out << format("k = %d, V = %.17g, |theta|^2 = %.17g\n", model.k(), model.V(), spec.theta_norm_sq);
  out << "prior mass magnitude over A in (-V, -eps):\n";
  out << format("%14s %24s %24s %16s %6s\n", "eps", "log_magnitude", "magnitude", "log10_growth", "sign");
  bool increasing = true;
  double prev = 0.0;
  for (std::size_t i = 0; i < spec.eps.size(); ++i) {
    const auto p = improper_prior_probe(spec.theta_norm_sq, model, spec.eps[i]);
    const std::string growth =
        i == 0 ? format("%16s", "-") : format("%16.6g", (p.log_magnitude - prev) / std::log(10.0));
    if (i > 0 && !(p.log_magnitude > prev)) increasing = false;
    out << format("%14.6g %24.17g %24.17g ", p.eps, p.log_magnitude, p.magnitude) << growth
        << format(" %6d\n", p.sign);
    prev = p.log_magnitude;
  }

  if (!spec.upper_cuts.empty()) {
    out << "contrast, A in (0, cut):\n";
    out << format("%14s %24s %16s\n", "cut", "integral", "change");
    double last = 0.0, last_change = INFINITY;
    for (std::size_t i = 0; i < spec.upper_cuts.size(); ++i) {
      const double v = proper_side_integral(spec.theta_norm_sq, model, spec.upper_cuts[i]);
      last_change = i == 0 ? INFINITY : std::abs(v - last);
      out << format("%14.6g %24.17g ", spec.upper_cuts[i], v)
          << (i == 0 ? format("%16s", "-") : format("%16.6g", last_change)) << '\n';
      last = v;
    }
    out << "contrast " << (last_change < kContrastStableTol ? "stabilized" : "not yet stable")
        << format(" (last change %.3g, tolerance %.0e)\n", last_change, kContrastStableTol);
  }
  out << (increasing ? "magnitude strictly increasing as eps decreases\n"
                     : "divergence: magnitude failed to increase\n");
  return increasing ? kExitOk : kExitInvariant;
}

}  // namespace steinrisk::cli
