#pragma once

// Risk-curve reproduction for k = 10: five ADM estimators against James-Stein
// (left panel), and ADM(m*) against James-Stein and its positive part (right
// panel), with the ordering and crossing properties the curves must show.

#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "steinrisk/risk.hpp"
#include "steinrisk/shrinkage.hpp"

namespace steinrisk::figure1 {

/// Divisors d in m = (k - 2) / d for the left-panel ADM curves.
inline constexpr int kAdmDivisors[] = {2, 4, 6, 8, 10};

inline constexpr double kSigmas = 3.0;

inline std::vector<double> default_theta_grid() { return theta_range(0.0, 12.0, 0.5); }

inline ShrinkageEstimator adm_for_divisor(const ModelConfig& cfg, int divisor) {
  return ShrinkageEstimator::adm(AdmParams((cfg.k() - 2) / static_cast<double>(divisor), 1.0));
}

/// JS followed by ADM with m decreasing.
inline std::vector<ShrinkageEstimator> left_panel(const ModelConfig& cfg) {
  std::vector<ShrinkageEstimator> out{ShrinkageEstimator::james_stein()};
  for (int d : kAdmDivisors) out.push_back(adm_for_divisor(cfg, d));
  return out;
}

/// ADM(m*), JS, positive-part JS. The admissible-estimator curve is omitted.
inline std::vector<ShrinkageEstimator> right_panel(const ModelConfig& cfg) {
  return {adm_for_divisor(cfg, 2), ShrinkageEstimator::james_stein(), ShrinkageEstimator::positive_part()};
}

/// Union of both panels, simulated once so the panels share cells.
inline std::vector<ShrinkageEstimator> all_estimators(const ModelConfig& cfg) {
  auto out = left_panel(cfg);
  out.push_back(ShrinkageEstimator::positive_part());
  return out;
}

struct Violation {
  double theta_norm;
  std::string detail;
};

struct Checks {
  std::vector<Violation> m_ordering;          // risk must not drop as m decreases
  std::vector<Violation> adm_above_minimax;   // ADM(m*) above kV + 3 SE
  std::vector<Violation> positive_part_worse; // positive part above JS by > 3 paired SE
  std::vector<Violation> above_minimax;       // any curve above kV + 3 SE
  std::optional<double> theta_positive_part_better;
  std::optional<double> theta_adm_better;     // larger than the one above
  double max_abs_adm_minus_js = 0.0;
  double max_js_oracle_z = 0.0;               // |mc - exact| / SE, reported only

  bool crossing_found() const { return theta_positive_part_better && theta_adm_better; }
  bool ok() const {
    return m_ordering.empty() && adm_above_minimax.empty() && positive_part_worse.empty() &&
           above_minimax.empty() && crossing_found();
  }
};

template <class... Args>
std::string fmt(const char* f, Args... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

/// Evaluates the panel properties on a CRN curve over all_estimators(cfg).
inline Checks check(const RiskCurve& curve) {
  const ModelConfig& cfg = curve.model();
  const double kV = cfg.k() * cfg.V();
  const auto js = *curve.index_of(ShrinkageEstimator::james_stein().name());
  const auto pp = *curve.index_of(ShrinkageEstimator::positive_part().name());
  std::vector<std::size_t> adm;
  for (int d : kAdmDivisors) adm.push_back(*curve.index_of(adm_for_divisor(cfg, d).name()));
  const std::size_t adm_star = adm.front();

  Checks c;
  std::optional<double> first_pp_better;
  for (std::size_t t = 0; t < curve.theta_grid().size(); ++t) {
    const double theta = curve.theta_grid()[t];
    for (std::size_t i = 0; i + 1 < adm.size(); ++i) {
      // adm[i] has the larger m; its risk should be no higher.
      const auto d = curve.difference(adm[i + 1], adm[i], t);
      if (d.mean < -kSigmas * d.std_err)
        c.m_ordering.push_back({theta, curve.estimator_names()[adm[i + 1]] + " below " +
                                           curve.estimator_names()[adm[i]] +
                                           fmt(" by %.6g (paired SE %.3g)", -d.mean, d.std_err)});
    }
    for (std::size_t e = 0; e < curve.estimator_names().size(); ++e) {
      const auto& p = curve.at(e, t);
      if (p.risk_hat > kV + kSigmas * p.std_err) {
        Violation v{theta, p.estimator_name + fmt(" risk %.6g > kV=%.6g + 3 SE (%.3g)", p.risk_hat, kV, p.std_err)};
        if (e == adm_star) c.adm_above_minimax.push_back(v);
        c.above_minimax.push_back(v);
      }
    }
    const auto pj = curve.difference(pp, js, t);
    if (pj.mean > kSigmas * pj.std_err)
      c.positive_part_worse.push_back(
          {theta, fmt("positive part exceeds JS by %.6g (paired SE %.3g)", pj.mean, pj.std_err)});

    const auto aj = curve.difference(adm_star, js, t);
    c.max_abs_adm_minus_js = std::max(c.max_abs_adm_minus_js, std::abs(aj.mean));

    const auto ap = curve.difference(adm_star, pp, t);
    if (!first_pp_better && ap.mean > kSigmas * ap.std_err) first_pp_better = theta;
    if (first_pp_better && !c.theta_adm_better && theta > *first_pp_better && ap.mean < -kSigmas * ap.std_err) {
      c.theta_positive_part_better = first_pp_better;
      c.theta_adm_better = theta;
    }

    const auto& jp = curve.at(js, t);
    if (jp.std_err > 0.0)
      c.max_js_oracle_z =
          std::max(c.max_js_oracle_z, std::abs(jp.risk_hat - exact_js_risk(theta, cfg)) / jp.std_err);
  }
  return c;
}

inline std::string describe(const Checks& c) {
  std::string out;
  auto list = [&](const char* title, const std::vector<Violation>& vs) {
    for (const auto& v : vs) out += std::string(title) + fmt(" theta_norm=%.6g: ", v.theta_norm) + v.detail + "\n";
  };
  list("m-ordering violated at", c.m_ordering);
  list("ADM(m*) above minimax risk at", c.adm_above_minimax);
  list("positive part worse than JS at", c.positive_part_worse);
  list("risk above kV at", c.above_minimax);
  if (c.crossing_found())
    out += fmt("crossing: positive part better at theta_norm=%.6g, ADM(m*) better at theta_norm=%.6g\n",
               *c.theta_positive_part_better, *c.theta_adm_better);
  else
    out += "crossing: not detected at 3 paired SEs\n";
  out += fmt("max |ADM(m*) - JS| = %.6g; max |JS mc - exact| / SE = %.3g\n", c.max_abs_adm_minus_js,
             c.max_js_oracle_z);
  return out;
}

}  // namespace steinrisk::figure1
