#pragma once

// The generalized-Bayes calculation behind James-Stein under A ~ Unif(-V, inf):
// the two chi-squared pieces of E(B | y), their normalization back to
// V (k - 2) / |y|^2, and a probe of the divergent prior mass on (-V, 0).

#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include "steinrisk/chisq.hpp"
#include "steinrisk/model.hpp"
#include "steinrisk/quadrature.hpp"

namespace steinrisk {

struct PosteriorDecomposition {
  double upper_piece;        // P(chi^2_k >= |y|^2 / V), from A in (-V, 0)
  double lower_piece;        // P(chi^2_k <= |y|^2 / V), from A in (0, inf)
  double log_common_factor;  // log[V Gamma(k/2) 2^{k/2} / (|y|^2)^{k/2}]
  double log_normalizer;     // log[Gamma(k/2 - 1) 2^{k/2 - 1} / (|y|^2)^{k/2 - 1}]
  double common_factor;      // exp(log_common_factor); may overflow for large k
  double normalizer;
  double normalized_EB;
};

inline PosteriorDecomposition posterior_shrink_decomposition(double y_norm_sq, const ModelConfig& cfg,
                                                             const ChiSquaredEngine& engine = ChiSquaredEngine{}) {
  const int k = cfg.k();
  if (k < 3) throw DomainError("posterior_shrink_decomposition: k must be >= 3");
  if (!(y_norm_sq > 0.0) || !std::isfinite(y_norm_sq))
    throw DomainError("posterior_shrink_decomposition: |y|^2 must be positive and finite");
  const double V = cfg.V();
  const double half_k = 0.5 * k;
  const auto tails = engine.regularized_gamma(half_k, 0.5 * y_norm_sq / V);

  PosteriorDecomposition d{};
  d.upper_piece = tails.upper;
  d.lower_piece = tails.lower;
  d.log_common_factor =
      std::log(V) + std::lgamma(half_k) + half_k * std::numbers::ln2 - half_k * std::log(y_norm_sq);
  d.log_normalizer = std::lgamma(half_k - 1.0) + (half_k - 1.0) * std::numbers::ln2 -
                     (half_k - 1.0) * std::log(y_norm_sq);
  d.common_factor = std::exp(d.log_common_factor);
  d.normalizer = std::exp(d.log_normalizer);
  d.normalized_EB = std::exp(d.log_common_factor - d.log_normalizer) * (d.upper_piece + d.lower_piece);
  return d;
}

struct PosteriorPiecesQuadrature {
  double upper_piece;
  double lower_piece;
  quad::Result upper;
  quad::Result lower;
};

/// Both pieces by direct quadrature over A of
/// V (V + A)^{-k/2 - 1} e^{-|y|^2 / (2 (V + A))}, scaled by the common
/// factor. Shares nothing with the incomplete-gamma route.
inline PosteriorPiecesQuadrature posterior_pieces_by_quadrature(double y_norm_sq, const ModelConfig& cfg,
                                                                double rel_tol = 1e-12) {
  const int k = cfg.k();
  if (k < 3) throw DomainError("posterior_pieces_by_quadrature: k must be >= 3");
  if (!(y_norm_sq > 0.0) || !std::isfinite(y_norm_sq))
    throw DomainError("posterior_pieces_by_quadrature: |y|^2 must be positive and finite");
  const double V = cfg.V();
  const double half_k = 0.5 * k;
  const double log_common =
      std::log(V) + std::lgamma(half_k) + half_k * std::numbers::ln2 - half_k * std::log(y_norm_sq);
  // Integrate over z = log(V + A) so that dA = e^z dz.
  auto integrand = [&](double z) {
    const double u = std::exp(z);
    return std::exp(std::log(V) - (half_k + 1.0) * z - 0.5 * y_norm_sq / u + z - log_common);
  };
  const double z_split = std::log(V);
  const double z_peak = std::log(y_norm_sq / k);
  const double z_lo = std::min(z_split, z_peak) - 40.0;
  const double z_hi = std::max(z_split, z_peak) + 200.0 / half_k + 20.0;

  auto unit_breaks = [](double a, double b) {
    std::vector<double> br{a};
    for (double z = std::ceil(a); z < b; z += 1.0)
      if (z > a) br.push_back(z);
    br.push_back(b);
    return br;
  };
  quad::Options opt;
  opt.rel_tol = rel_tol;
  PosteriorPiecesQuadrature out{};
  out.upper = quad::integrate(integrand, unit_breaks(z_lo, z_split), opt);
  out.lower = quad::integrate(integrand, unit_breaks(z_split, z_hi), opt);
  out.upper_piece = out.upper.value;
  out.lower_piece = out.lower.value;
  return out;
}

struct ConditionalPosterior {
  std::vector<double> mean;
  double variance;
};

/// theta | y, A ~ N((1 - B) y, V (1 - B)) with B = V / (V + A).
inline ConditionalPosterior conditional_posterior_params(std::span<const double> y, double A,
                                                         const ModelConfig& cfg) {
  if (y.size() != static_cast<std::size_t>(cfg.k()))
    throw DomainError("conditional_posterior_params: length(y) must equal k");
  if (std::isnan(A) || A < 0.0) throw DomainError("conditional_posterior_params: A must be >= 0");
  const double V = cfg.V();
  // 1 - B = A / (V + A), written to stay exact at A = 0 and finite as A -> inf.
  const double keep = std::isinf(A) ? 1.0 : A / (V + A);
  ConditionalPosterior post{std::vector<double>(y.size()), V * keep};
  for (std::size_t i = 0; i < y.size(); ++i) post.mean[i] = keep * y[i];
  return post;
}

struct ProbeResult {
  double eps;
  double log_magnitude;  // log of the integral of |integrand|
  double magnitude;      // exp(log_magnitude); +inf once it leaves double range
  int sign;              // sign of (2 pi A)^{k/2} for A < 0: (-1)^{k/2}
  quad::Result quadrature;
};

/// Magnitude of the prior density of theta contributed by A in (-V + d0, -eps),
/// with d0 = 1e-3 eps:
///   int e^{-|theta|^2 / (2A)} / (2 pi |A|)^{k/2} dA.
/// Evaluated in log space around the dominant endpoint A = -eps.
inline ProbeResult improper_prior_probe(double theta_norm_sq, const ModelConfig& cfg, double eps,
                                        const quad::Options& opt = {}) {
  const int k = cfg.k();
  const double V = cfg.V();
  if (k % 2 != 0) throw DomainError("improper_prior_probe: k must be even (odd k needs complex integration)");
  if (k < 4) throw DomainError("improper_prior_probe: k must be >= 4");
  if (!(theta_norm_sq > 0.0) || !std::isfinite(theta_norm_sq))
    throw DomainError("improper_prior_probe: |theta|^2 must be positive and finite");
  if (!(eps > 0.0) || !(eps < V)) throw DomainError("improper_prior_probe: need 0 < eps < V");

  const double s = theta_norm_sq;
  const double half_k = 0.5 * k;
  const double inner_offset = eps * 1e-3;
  const double span = V - inner_offset - eps;
  if (!(span > 0.0)) throw DomainError("improper_prior_probe: eps too close to V");

  // |A| = eps + d; log f(eps + d) - log f(eps), free of cancellation.
  auto scaled = [&](double d) {
    const double rel = d / eps;
    return std::exp(-s * d / (2.0 * eps * (eps + d)) - half_k * std::log1p(rel));
  };
  const double log_peak = s / (2.0 * eps) - half_k * std::log(2.0 * std::numbers::pi * eps);
  const double slope = s / (2.0 * eps * eps) + half_k / eps;
  const auto breaks = quad::geometric_breaks(0.0, span, 0.1 / slope);
  const auto q = quad::integrate(scaled, breaks, opt);
  if (!q.converged) throw EvaluationError("improper_prior_probe: quadrature did not converge", eps);

  ProbeResult r;
  r.eps = eps;
  r.log_magnitude = log_peak + std::log(q.value);
  r.magnitude = std::exp(r.log_magnitude);
  r.sign = (k / 2) % 2 == 0 ? 1 : -1;
  r.quadrature = q;
  return r;
}

/// Contrast case: int_0^upper_cut e^{-|theta|^2 / (2A)} / (2 pi A)^{k/2} dA,
/// which converges as upper_cut grows when k >= 3.
inline double proper_side_integral(double theta_norm_sq, const ModelConfig& cfg, double upper_cut,
                                   double rel_tol = 1e-13) {
  const int k = cfg.k();
  if (k < 3) throw DomainError("proper_side_integral: k must be >= 3");
  if (!(theta_norm_sq > 0.0) || !std::isfinite(theta_norm_sq))
    throw DomainError("proper_side_integral: |theta|^2 must be positive and finite");
  if (!(upper_cut > 0.0) || !std::isfinite(upper_cut))
    throw DomainError("proper_side_integral: upper cut must be positive and finite");
  const double s = theta_norm_sq;
  const double half_k = 0.5 * k;
  const double log_norm = -half_k * std::log(2.0 * std::numbers::pi);
  // z = log A.
  auto integrand = [&](double z) {
    return std::exp(log_norm - 0.5 * s * std::exp(-z) - (half_k - 1.0) * z);
  };
  const double z_peak = std::log(s / (k - 2.0));
  const double z_hi = std::log(upper_cut);
  const double z_lo = std::min(z_peak, z_hi) - 12.0;
  std::vector<double> breaks{z_lo};
  for (double z = z_lo + 1.0; z < z_hi; z += 1.0) breaks.push_back(z);
  breaks.push_back(z_hi);
  quad::Options opt;
  opt.rel_tol = rel_tol;
  const auto q = quad::integrate(integrand, breaks, opt);
  if (!q.converged) throw EvaluationError("proper_side_integral: quadrature did not converge", upper_cut);
  return q.value;
}

}  // namespace steinrisk
