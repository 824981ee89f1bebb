#pragma once

// Two-level normal model: y_i | theta_i ~ N(theta_i, V), theta_i ~ N(0, A).

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace steinrisk {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Input at which the rule is undefined (plain James-Stein at y = 0).
class SingularInputError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Failure while evaluating an estimator across a grid or a simulation.
class EvaluationError : public std::runtime_error {
 public:
  EvaluationError(const std::string& what, double at)
      : std::runtime_error(what), at_(at) {}

  /// Grid coordinate (T, |y|^2 or theta norm) where evaluation failed.
  double at() const noexcept { return at_; }

 private:
  double at_;
};

class ModelConfig {
 public:
  ModelConfig(int k, double V, std::optional<double> A = std::nullopt)
      : k_(k), V_(V), A_(A) {
    if (k < 1) throw DomainError("ModelConfig: k must be >= 1");
    if (!(V > 0.0) || !std::isfinite(V))
      throw DomainError("ModelConfig: V must be positive and finite");
    if (A && (!(*A >= 0.0) || std::isnan(*A)))
      throw DomainError("ModelConfig: A must be nonnegative");
  }

  int k() const noexcept { return k_; }
  double V() const noexcept { return V_; }
  const std::optional<double>& A() const noexcept { return A_; }

  /// B = V / (V + A), in (0, 1]; absent when A is.
  std::optional<double> B() const {
    if (!A_) return std::nullopt;
    return V_ / (V_ + *A_);
  }

  ModelConfig with_V(double V) const { return ModelConfig(k_, V, A_); }

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;

 private:
  int k_;
  double V_;
  std::optional<double> A_;
};

namespace detail {

inline double plain_sum_sq(std::span<const double> y) {
  double s = 0.0;
  for (double v : y) s += v * v;
  return s;
}

// Neumaier compensated sum of squares.
inline double compensated_sum_sq(std::span<const double> y) {
  double s = 0.0;
  double comp = 0.0;
  for (double v : y) {
    const double term = v * v;
    const double t = s + term;
    if (std::abs(s) >= std::abs(term))
      comp += (s - t) + term;
    else
      comp += (term - t) + s;
    s = t;
  }
  return s + comp;
}

inline constexpr std::size_t kCompensatedSumThreshold = 10000;

}  // namespace detail

inline double norm_sq(std::span<const double> y) {
  return y.size() > detail::kCompensatedSumThreshold
             ? detail::compensated_sum_sq(y)
             : detail::plain_sum_sq(y);
}

/// Summary of one observation vector: |y|^2 and T = |y|^2 / (2V).
struct ObservationStats {
  std::vector<double> y;
  double y_norm_sq;
  double T;

  static ObservationStats from(std::span<const double> y,
                               const ModelConfig& cfg) {
    if (y.size() != static_cast<std::size_t>(cfg.k()))
      throw DomainError("ObservationStats: length(y) must equal k");
    const double s = norm_sq(y);
    return {std::vector<double>(y.begin(), y.end()), s, s / (2.0 * cfg.V())};
  }
};

}  // namespace steinrisk
