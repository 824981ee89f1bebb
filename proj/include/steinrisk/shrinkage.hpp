#pragma once

// Spherically symmetric shrinkage rules delta(y) = (1 - B(|y|^2)) y.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "steinrisk/model.hpp"

namespace steinrisk {

enum class EstimatorKind { JamesStein, PositivePartJS, ADM, MLE, Custom };

inline std::string_view to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::JamesStein: return "JamesStein";
    case EstimatorKind::PositivePartJS: return "PositivePartJS";
    case EstimatorKind::ADM: return "ADM";
    case EstimatorKind::MLE: return "MLE";
    case EstimatorKind::Custom: return "Custom";
  }
  return "?";
}

/// ADM tuning constants: m (adjustment) and c.
struct AdmParams {
  double m;
  double c = 1.0;

  AdmParams(double m_, double c_ = 1.0) : m(m_), c(c_) {
    if (!(m > 0.0) || !std::isfinite(m)) throw DomainError("AdmParams: m must be positive");
    if (!(c > 0.0) || !std::isfinite(c)) throw DomainError("AdmParams: c must be positive");
    if (!(m - c + 1.0 > 0.0)) throw DomainError("AdmParams: m - c + 1 must be positive");
  }

  /// m = (k - 2) / 2, c = 1.
  static AdmParams default_for(const ModelConfig& cfg) {
    if (cfg.k() < 3) throw DomainError("AdmParams::default_for: k must be >= 3");
    return AdmParams((cfg.k() - 2) / 2.0, 1.0);
  }

  /// Limit of T * B_hat(T) as T -> infinity.
  double bracket_limit() const noexcept { return m - c + 1.0; }

  /// Limit of B_hat(T) as T -> 0+.
  double shrink_at_origin() const noexcept { return (m - c + 1.0) / (m + 1.0); }

  friend bool operator==(const AdmParams&, const AdmParams&) = default;
};

/// The bracketed term of the ADM shrinker, T * B_hat(T).
inline double adm_bracket(double T, const AdmParams& p) {
  if (!(T > 0.0) || std::isnan(T)) throw DomainError("adm_shrink_factor: T must be > 0");
  const double shifted = T - p.m - 1.0;
  const double root = std::sqrt(shifted * shifted + 4.0 * p.c * T);
  return 2.0 * (p.m - p.c + 1.0) * T / (T + p.m + 1.0 + root);
}

/// ADM shrink factor B_hat(T) with T = |y|^2 / (2V).
inline double adm_shrink_factor(double T, const AdmParams& p) {
  if (!(T > 0.0) || std::isnan(T)) throw DomainError("adm_shrink_factor: T must be > 0");
  const double shifted = T - p.m - 1.0;
  const double root = std::sqrt(shifted * shifted + 4.0 * p.c * T);
  // Algebraically (1/T) * bracket; the T cancels exactly.
  return 2.0 * (p.m - p.c + 1.0) / (T + p.m + 1.0 + root);
}

/// V (k - 2) / |y|^2. Exceeds 1 (sign reversal) when |y|^2 < V (k - 2).
inline double js_shrink_factor(double y_norm_sq, const ModelConfig& cfg) {
  if (cfg.k() < 3) throw DomainError("js_shrink_factor: k must be >= 3");
  if (std::isnan(y_norm_sq) || y_norm_sq < 0.0)
    throw DomainError("js_shrink_factor: |y|^2 must be >= 0");
  if (y_norm_sq == 0.0) throw SingularInputError("js_shrink_factor: undefined at y = 0");
  return cfg.V() * (cfg.k() - 2) / y_norm_sq;
}

/// (1 - B_JS)^+; 0 at y = 0.
inline double positive_part_shrink_coefficient(double y_norm_sq, const ModelConfig& cfg) {
  if (cfg.k() < 3) throw DomainError("positive_part_shrink_coefficient: k must be >= 3");
  if (std::isnan(y_norm_sq) || y_norm_sq < 0.0)
    throw DomainError("positive_part_shrink_coefficient: |y|^2 must be >= 0");
  if (y_norm_sq == 0.0) return 0.0;
  const double coef = 1.0 - js_shrink_factor(y_norm_sq, cfg);
  return coef > 0.0 ? coef : 0.0;
}

/// Shrink-factor callback for user-defined rules: B(|y|^2, cfg).
using ShrinkFactorFn = std::function<double(double y_norm_sq, const ModelConfig&)>;

class ShrinkageEstimator {
 public:
  static ShrinkageEstimator james_stein(std::string name = "JS") {
    return ShrinkageEstimator(std::move(name), EstimatorKind::JamesStein);
  }
  static ShrinkageEstimator positive_part(std::string name = "PositivePartJS") {
    return ShrinkageEstimator(std::move(name), EstimatorKind::PositivePartJS);
  }
  static ShrinkageEstimator mle(std::string name = "MLE") {
    return ShrinkageEstimator(std::move(name), EstimatorKind::MLE);
  }
  static ShrinkageEstimator adm(AdmParams p, std::string name = {}) {
    if (name.empty()) name = default_adm_name(p);
    ShrinkageEstimator e(std::move(name), EstimatorKind::ADM);
    e.adm_ = p;
    return e;
  }
  /// Custom rules receive theta on the first axis in risk simulations; the
  /// vector rule is always (1 - B) y.
  static ShrinkageEstimator custom(std::string name, ShrinkFactorFn fn) {
    if (!fn) throw DomainError("ShrinkageEstimator::custom: empty shrink-factor function");
    ShrinkageEstimator e(std::move(name), EstimatorKind::Custom);
    e.custom_ = std::make_shared<const ShrinkFactorFn>(std::move(fn));
    return e;
  }

  const std::string& name() const noexcept { return name_; }
  EstimatorKind kind() const noexcept { return kind_; }
  const std::optional<AdmParams>& adm_params() const noexcept { return adm_; }

  /// Scalar B(|y|^2). ADM and positive-part use their y -> 0 limits at
  /// |y|^2 = 0 (where delta = 0 regardless); plain JS throws there.
  double shrink_factor(double y_norm_sq, const ModelConfig& cfg) const {
    if (std::isnan(y_norm_sq) || y_norm_sq < 0.0)
      throw DomainError(name_ + ": |y|^2 must be >= 0");
    switch (kind_) {
      case EstimatorKind::JamesStein:
        return js_shrink_factor(y_norm_sq, cfg);
      case EstimatorKind::PositivePartJS:
        positive_part_shrink_coefficient(y_norm_sq, cfg);  // argument checks
        return y_norm_sq == 0.0 ? 1.0 : std::min(js_shrink_factor(y_norm_sq, cfg), 1.0);
      case EstimatorKind::ADM:
        if (y_norm_sq == 0.0) return adm_->shrink_at_origin();
        return adm_shrink_factor(y_norm_sq / (2.0 * cfg.V()), *adm_);
      case EstimatorKind::MLE:
        return 0.0;
      case EstimatorKind::Custom:
        return (*custom_)(y_norm_sq, cfg);
    }
    return 0.0;
  }

  double coefficient(double y_norm_sq, const ModelConfig& cfg) const {
    if (kind_ == EstimatorKind::PositivePartJS)
      return positive_part_shrink_coefficient(y_norm_sq, cfg);
    return 1.0 - shrink_factor(y_norm_sq, cfg);
  }

  /// g with delta(y) = (1 - V g / |y|^2) y, i.e. g = B |y|^2 / V.
  double g_of_theorem(double y_norm_sq, const ModelConfig& cfg) const {
    if (!(y_norm_sq > 0.0)) throw DomainError("g_of_theorem: |y|^2 must be > 0");
    if (kind_ == EstimatorKind::ADM)
      return 2.0 * adm_bracket(y_norm_sq / (2.0 * cfg.V()), *adm_);
    return shrink_factor(y_norm_sq, cfg) * y_norm_sq / cfg.V();
  }

  /// Writes (1 - B) y into out. out may alias y.
  void estimate_into(std::span<const double> y, const ModelConfig& cfg, std::span<double> out) const {
    if (y.size() != static_cast<std::size_t>(cfg.k()) || out.size() != y.size())
      throw DomainError(name_ + ": length(y) must equal k");
    if (kind_ == EstimatorKind::MLE) {
      for (std::size_t i = 0; i < y.size(); ++i) out[i] = y[i];
      return;
    }
    const double coef = coefficient(norm_sq(y), cfg);
    for (std::size_t i = 0; i < y.size(); ++i) out[i] = coef * y[i];
  }

  std::vector<double> estimate(std::span<const double> y, const ModelConfig& cfg) const {
    std::vector<double> out(y.size());
    estimate_into(y, cfg, out);
    return out;
  }

 private:
  ShrinkageEstimator(std::string name, EstimatorKind kind) : name_(std::move(name)), kind_(kind) {}

  static std::string default_adm_name(const AdmParams& p) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "ADM:m=%g:c=%g", p.m, p.c);
    return buf;
  }

  std::string name_;
  EstimatorKind kind_;
  std::optional<AdmParams> adm_;
  std::shared_ptr<const ShrinkFactorFn> custom_;
};

/// Free-function form of ShrinkageEstimator::estimate.
inline std::vector<double> estimate(const ShrinkageEstimator& est, std::span<const double> y,
                                    const ModelConfig& cfg) {
  return est.estimate(y, cfg);
}

inline double g_of_theorem(const ShrinkageEstimator& est, double y_norm_sq, const ModelConfig& cfg) {
  return est.g_of_theorem(y_norm_sq, cfg);
}

}  // namespace steinrisk
