// Defines a shrinkage rule outside the built-ins, certifies it with
// Baranchik's conditions, and compares its Monte Carlo risk to James-Stein.
//
//   B(|y|^2) = V (k - 2) / (|y|^2 + V (k - 2))
//
// g = B |y|^2 / V rises from 0 toward k - 2, so the rule is minimax.

#include <cstdio>

#include "steinrisk/steinrisk.hpp"

using namespace steinrisk;

int main() {
  const ModelConfig cfg(10, 1.0);
  const auto rule = ShrinkageEstimator::custom("soft", [](double y_norm_sq, const ModelConfig& c) {
    const double a = c.V() * (c.k() - 2);
    return a / (y_norm_sq + a);
  });

  const auto report = certify(rule, cfg);
  std::printf("%s\n", to_key_value(report).c_str());

  RiskRunOptions opt;
  opt.n_reps = 50'000;
  const auto curve = risk_curve({ShrinkageEstimator::james_stein(), rule}, theta_range(0.0, 8.0, 1.0), cfg, opt);
  std::printf("%8s %10s %10s %12s\n", "|theta|", "JS", "soft", "soft - JS");
  for (std::size_t t = 0; t < curve.theta_grid().size(); ++t) {
    const auto d = curve.difference(1, 0, t);
    std::printf("%8g %10.4f %10.4f %+8.4f (%.4f)\n", curve.theta_grid()[t], curve.at(0, t).risk_hat,
                curve.at(1, t).risk_hat, d.mean, d.std_err);
  }
  return report.certified ? 0 : 1;
}
