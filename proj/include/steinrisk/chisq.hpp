#pragma once

// Central chi-squared CDF via the regularized incomplete gamma function, and
// the inverse first moment of a noncentral chi-squared variate.

#include <cmath>
#include <limits>
#include <string>

#include "steinrisk/model.hpp"

namespace steinrisk {

struct GammaTails {
  double lower;  // P(a, x)
  double upper;  // Q(a, x)
};

class ChiSquaredEngine {
 public:
  explicit ChiSquaredEngine(double abs_tol = 1e-12, int max_terms = 100000)
      : abs_tol_(abs_tol), max_terms_(max_terms) {
    if (!(abs_tol > 0.0)) throw DomainError("ChiSquaredEngine: abs_tol must be positive");
    if (max_terms < 1) throw DomainError("ChiSquaredEngine: max_terms must be >= 1");
  }

  double abs_tol() const noexcept { return abs_tol_; }
  int max_terms() const noexcept { return max_terms_; }

  /// Regularized incomplete gamma pair (P, Q). Series below a + 1, Lentz
  /// continued fraction above; the other tail is the complement.
  GammaTails regularized_gamma(double a, double x) const {
    if (!(a > 0.0) || !std::isfinite(a))
      throw DomainError("regularized_gamma: shape must be positive and finite");
    if (!(x >= 0.0) || !std::isfinite(x))
      throw DomainError("regularized_gamma: x must be finite and >= 0");
    if (x == 0.0) return {0.0, 1.0};
    const double log_prefactor = -x + a * std::log(x) - std::lgamma(a);
    if (x < a + 1.0) {
      const double p = std::exp(log_prefactor) * lower_series(a, x);
      return {p, 1.0 - p};
    }
    const double q = std::exp(log_prefactor) * upper_fraction(a, x);
    return {1.0 - q, q};
  }

  /// P(chi^2_k <= x).
  double lower_cdf(int k, double x) const {
    check_dof(k);
    return regularized_gamma(0.5 * k, 0.5 * x).lower;
  }

  /// P(chi^2_k >= x).
  double upper_tail(int k, double x) const {
    check_dof(k);
    return regularized_gamma(0.5 * k, 0.5 * x).upper;
  }

  /// E[1 / chi^2_k(lambda)] as a Poisson(lambda/2) mixture of central
  /// inverse moments 1/(k + 2j - 2). Summed outward from the Poisson mode so
  /// that e^{-lambda/2} never has to be formed on its own.
  double inverse_moment(int k, double lambda) const {
    if (k <= 2) throw DomainError("inverse_chisq_moment: k must be >= 3 (moment is infinite)");
    if (!(lambda >= 0.0) || !std::isfinite(lambda))
      throw DomainError("inverse_chisq_moment: lambda must be finite and >= 0");
    const double h = 0.5 * lambda;
    auto central = [k](double j) { return 1.0 / (k + 2.0 * j - 2.0); };
    if (h == 0.0) return central(0.0);

    const double mode = std::floor(h);
    const double log_w_mode = -h + mode * std::log(h) - std::lgamma(mode + 1.0);
    const double w_mode = std::exp(log_w_mode);

    double sum = w_mode * central(mode);
    int terms = 1;

    // Upward: j > h past the mode, stop once the term drops below abs_tol.
    double w = w_mode;
    for (double j = mode + 1.0;; j += 1.0) {
      w *= h / j;
      const double term = w * central(j);
      sum += term;
      if (++terms > max_terms_) throw_cap(k, lambda);
      if (term < abs_tol_ * 1e-3 && j > h) break;
    }
    // Downward toward j = 0.
    w = w_mode;
    for (double j = mode - 1.0; j >= 0.0; j -= 1.0) {
      w *= (j + 1.0) / h;
      const double term = w * central(j);
      sum += term;
      if (++terms > max_terms_) throw_cap(k, lambda);
      if (term < abs_tol_ * 1e-3) break;
    }
    return sum;
  }

 private:
  static void check_dof(int k) {
    if (k < 1) throw DomainError("chi-squared: degrees of freedom must be >= 1");
  }

  [[noreturn]] void throw_cap(int k, double lambda) const {
    throw EvaluationError("inverse_chisq_moment: series did not converge within max_terms (k=" +
                              std::to_string(k) + ")",
                          lambda);
  }

  // sum_{n>=0} x^n / (a (a+1) ... (a+n))
  double lower_series(double a, double x) const {
    double term = 1.0 / a;
    double sum = term;
    for (int n = 1; n <= max_terms_; ++n) {
      term *= x / (a + n);
      sum += term;
      if (std::abs(term) < std::abs(sum) * std::numeric_limits<double>::epsilon())
        return sum;
    }
    throw EvaluationError("regularized_gamma: series did not converge", x);
  }

  // Continued fraction for Gamma(a, x) e^x x^{-a}, modified Lentz.
  double upper_fraction(double a, double x) const {
    constexpr double tiny = std::numeric_limits<double>::min() / std::numeric_limits<double>::epsilon();
    constexpr double eps = std::numeric_limits<double>::epsilon();
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= max_terms_; ++i) {
      const double an = -i * (i - a);
      b += 2.0;
      d = an * d + b;
      if (std::abs(d) < tiny) d = tiny;
      c = b + an / c;
      if (std::abs(c) < tiny) c = tiny;
      d = 1.0 / d;
      const double delta = d * c;
      h *= delta;
      if (std::abs(delta - 1.0) < eps) return h;
    }
    throw EvaluationError("regularized_gamma: continued fraction did not converge", x);
  }

  double abs_tol_;
  int max_terms_;
};

inline double chisq_lower_cdf(int k, double x) { return ChiSquaredEngine{}.lower_cdf(k, x); }

inline double chisq_upper_tail(int k, double x) { return ChiSquaredEngine{}.upper_tail(k, x); }

inline double inverse_chisq_moment(int k, double lambda) {
  return ChiSquaredEngine{}.inverse_moment(k, lambda);
}

}  // namespace steinrisk
