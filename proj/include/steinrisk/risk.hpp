#pragma once

// Monte Carlo risk R(theta, delta) = E|theta - delta(y)|^2 for spherically
// symmetric rules, with common random numbers across estimators, and the
// closed-form James-Stein risk used as an oracle.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "steinrisk/chisq.hpp"
#include "steinrisk/model.hpp"
#include "steinrisk/philox.hpp"
#include "steinrisk/shrinkage.hpp"

namespace steinrisk {

struct RiskPoint {
  std::string estimator_name;
  double theta_norm = 0.0;
  double risk_hat = 0.0;
  double std_err = 0.0;
  std::int64_t n_reps = 0;
  std::uint64_t seed = 0;

  friend bool operator==(const RiskPoint&, const RiskPoint&) = default;
};

/// Mean and standard error of a difference of two risk estimates.
struct PairedDifference {
  double mean;
  double std_err;
};

/// Online means and co-moment matrix of per-replicate losses (Welford).
class LossMoments {
 public:
  explicit LossMoments(std::size_t n_estimators)
      : dim_(n_estimators), mean_(n_estimators, 0.0), comoment_(n_estimators * n_estimators, 0.0),
        delta_(n_estimators) {}

  void add(const std::vector<double>& losses) {
    ++count_;
    const double inv_n = 1.0 / static_cast<double>(count_);
    for (std::size_t i = 0; i < dim_; ++i) {
      delta_[i] = losses[i] - mean_[i];
      mean_[i] += delta_[i] * inv_n;
    }
    for (std::size_t i = 0; i < dim_; ++i) {
      const double after = losses[i] - mean_[i];
      for (std::size_t j = 0; j < dim_; ++j) comoment_[i * dim_ + j] += delta_[j] * after;
    }
  }

  std::int64_t count() const noexcept { return count_; }
  double mean(std::size_t i) const { return mean_[i]; }
  double covariance(std::size_t i, std::size_t j) const {
    return comoment_[i * dim_ + j] / static_cast<double>(count_ - 1);
  }
  double std_err(std::size_t i) const {
    return std::sqrt(std::max(covariance(i, i), 0.0) / static_cast<double>(count_));
  }
  /// Difference mean(a) - mean(b) with its standard error under pairing.
  PairedDifference difference(std::size_t a, std::size_t b) const {
    const double var = covariance(a, a) + covariance(b, b) - 2.0 * covariance(a, b);
    return {mean_[a] - mean_[b], std::sqrt(std::max(var, 0.0) / static_cast<double>(count_))};
  }

 private:
  std::size_t dim_;
  std::int64_t count_ = 0;
  std::vector<double> mean_;
  std::vector<double> comoment_;
  std::vector<double> delta_;
};

namespace detail {

/// Runs n_reps replicates at theta = (theta_norm, 0, ..., 0), feeding every
/// estimator the same draws from stream `stream`.
inline LossMoments simulate_cell(const std::vector<ShrinkageEstimator>& estimators, double theta_norm,
                                 const ModelConfig& cfg, std::int64_t n_reps, std::uint64_t seed,
                                 std::uint32_t stream) {
  const int k = cfg.k();
  const double sd = std::sqrt(cfg.V());
  LossMoments moments(estimators.size());
  std::vector<double> y(k);
  std::vector<double> losses(estimators.size());
  for (std::int64_t rep = 0; rep < n_reps; ++rep) {
    NormalStream noise(seed, stream, static_cast<std::uint64_t>(rep));
    for (int i = 0; i < k; ++i) y[i] = sd * noise.next();
    y[0] += theta_norm;
    const double y_norm_sq = norm_sq(y);
    for (std::size_t e = 0; e < estimators.size(); ++e) {
      double coef;
      try {
        coef = estimators[e].coefficient(y_norm_sq, cfg);
      } catch (const std::exception& ex) {
        throw EvaluationError("mc_risk(" + estimators[e].name() + "): replicate " + std::to_string(rep) +
                                  " at theta_norm=" + std::to_string(theta_norm) + " |y|^2=" +
                                  std::to_string(y_norm_sq) + ": " + ex.what(),
                              theta_norm);
      }
      double loss = 0.0;
      for (int i = 0; i < k; ++i) {
        const double diff = (i == 0 ? theta_norm : 0.0) - coef * y[i];
        loss += diff * diff;
      }
      losses[e] = loss;
    }
    moments.add(losses);
  }
  return moments;
}

inline void check_run_args(double theta_norm, std::int64_t n_reps) {
  if (n_reps < 2) throw DomainError("risk: n_reps must be >= 2");
  if (!(theta_norm >= 0.0) || !std::isfinite(theta_norm))
    throw DomainError("risk: theta_norm must be finite and >= 0");
}

}  // namespace detail

/// Monte Carlo risk of one estimator; replicate r draws from stream
/// (seed, 0, r), which is what risk_curve uses for the first grid theta.
inline RiskPoint mc_risk(const ShrinkageEstimator& est, double theta_norm, const ModelConfig& cfg,
                         std::int64_t n_reps, std::uint64_t seed) {
  detail::check_run_args(theta_norm, n_reps);
  const auto m = detail::simulate_cell({est}, theta_norm, cfg, n_reps, seed, 0);
  return {est.name(), theta_norm, m.mean(0), m.std_err(0), n_reps, seed};
}

/// kV - V (k - 2)^2 E[1 / chi^2_k(|theta|^2 / V)].
inline double exact_js_risk(double theta_norm, const ModelConfig& cfg,
                            const ChiSquaredEngine& engine = ChiSquaredEngine{}) {
  const int k = cfg.k();
  if (k < 3) throw DomainError("exact_js_risk: k must be >= 3");
  if (!(theta_norm >= 0.0) || !std::isfinite(theta_norm))
    throw DomainError("exact_js_risk: theta_norm must be finite and >= 0");
  const double V = cfg.V();
  const double lambda = theta_norm * theta_norm / V;
  const double km2 = k - 2.0;
  return k * V - V * km2 * km2 * engine.inverse_moment(k, lambda);
}

class RiskCurve {
 public:
  RiskCurve(ModelConfig model, std::vector<double> theta_grid, std::vector<std::string> estimator_names, bool crn)
      : model_(std::move(model)), theta_grid_(std::move(theta_grid)), names_(std::move(estimator_names)),
        crn_(crn) {}

  const ModelConfig& model() const noexcept { return model_; }
  const std::vector<double>& theta_grid() const noexcept { return theta_grid_; }
  const std::vector<std::string>& estimator_names() const noexcept { return names_; }
  bool crn() const noexcept { return crn_; }

  /// Theta-major: all estimators at theta_grid[0], then theta_grid[1], ...
  const std::vector<RiskPoint>& points() const noexcept { return points_; }

  const RiskPoint& at(std::size_t estimator, std::size_t theta) const {
    return points_.at(theta * names_.size() + estimator);
  }

  std::optional<std::size_t> index_of(const std::string& name) const {
    for (std::size_t i = 0; i < names_.size(); ++i)
      if (names_[i] == name) return i;
    return std::nullopt;
  }

  /// risk(a) - risk(b) at one theta. Paired standard error under CRN,
  /// independent-samples standard error otherwise.
  PairedDifference difference(std::size_t a, std::size_t b, std::size_t theta) const {
    if (crn_ && theta < moments_.size()) return moments_[theta].difference(a, b);
    const auto& pa = at(a, theta);
    const auto& pb = at(b, theta);
    return {pa.risk_hat - pb.risk_hat, std::hypot(pa.std_err, pb.std_err)};
  }

  /// Used by risk_curve and by CSV loading.
  void set_points(std::vector<RiskPoint> pts) { points_ = std::move(pts); }
  void set_moments(std::vector<LossMoments> m) { moments_ = std::move(m); }

 private:
  ModelConfig model_;
  std::vector<double> theta_grid_;
  std::vector<std::string> names_;
  bool crn_;
  std::vector<RiskPoint> points_;
  std::vector<LossMoments> moments_;  // per theta, only under CRN
};

struct RiskRunOptions {
  std::int64_t n_reps = 200'000;
  std::uint64_t seed = 20111028;
  bool crn = true;
  unsigned threads = 0;  // 0: hardware concurrency
};

/// Theta grid start, start + step, ..., up to stop inclusive.
inline std::vector<double> theta_range(double start, double stop, double step) {
  if (!(step > 0.0) || !(stop >= start) || !(start >= 0.0))
    throw DomainError("theta_range: need 0 <= start <= stop and step > 0");
  std::vector<double> grid;
  const auto n = static_cast<std::int64_t>(std::floor((stop - start) / step + 1e-9));
  for (std::int64_t i = 0; i <= n; ++i) grid.push_back(start + static_cast<double>(i) * step);
  return grid;
}

/// Every (estimator, theta) cell. With CRN, all estimators at theta index t
/// share stream t; without, cell (e, t) gets its own stream. Work is split
/// across threads by theta (CRN) or cell; results do not depend on the
/// thread count.
inline RiskCurve risk_curve(const std::vector<ShrinkageEstimator>& estimators, const std::vector<double>& theta_grid,
                            const ModelConfig& cfg, const RiskRunOptions& opt = {}) {
  if (estimators.empty()) throw DomainError("risk_curve: estimator list is empty");
  if (theta_grid.empty()) throw DomainError("risk_curve: theta grid is empty");
  for (std::size_t i = 0; i < theta_grid.size(); ++i) {
    detail::check_run_args(theta_grid[i], opt.n_reps);
    if (i > 0 && !(theta_grid[i] > theta_grid[i - 1]))
      throw DomainError("risk_curve: theta grid must be strictly ascending");
  }
  const std::size_t E = estimators.size();
  const std::size_t Tn = theta_grid.size();
  std::vector<std::string> names;
  for (const auto& e : estimators) names.push_back(e.name());

  const std::size_t n_tasks = opt.crn ? Tn : Tn * E;
  std::vector<std::optional<LossMoments>> results(n_tasks);
  std::vector<std::exception_ptr> errors(n_tasks);

  auto run_task = [&](std::size_t task) {
    try {
      if (opt.crn) {
        results[task] = detail::simulate_cell(estimators, theta_grid[task], cfg, opt.n_reps, opt.seed,
                                              static_cast<std::uint32_t>(task));
      } else {
        const std::size_t t = task / E, e = task % E;
        results[task] = detail::simulate_cell({estimators[e]}, theta_grid[t], cfg, opt.n_reps, opt.seed,
                                              static_cast<std::uint32_t>(task));
      }
    } catch (...) {
      errors[task] = std::current_exception();
    }
  };

  unsigned n_threads = opt.threads ? opt.threads : std::max(1u, std::thread::hardware_concurrency());
  n_threads = static_cast<unsigned>(std::min<std::size_t>(n_threads, n_tasks));
  if (n_threads <= 1) {
    for (std::size_t t = 0; t < n_tasks; ++t) run_task(t);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < n_threads; ++w)
      pool.emplace_back([&] {
        for (std::size_t t = next++; t < n_tasks; t = next++) run_task(t);
      });
  }
  for (const auto& err : errors)
    if (err) std::rethrow_exception(err);

  RiskCurve curve(cfg, theta_grid, names, opt.crn);
  std::vector<RiskPoint> pts;
  pts.reserve(Tn * E);
  std::vector<LossMoments> moments;
  for (std::size_t t = 0; t < Tn; ++t) {
    for (std::size_t e = 0; e < E; ++e) {
      const LossMoments& m = opt.crn ? *results[t] : *results[t * E + e];
      const std::size_t slot = opt.crn ? e : 0;
      pts.push_back({names[e], theta_grid[t], m.mean(slot), m.std_err(slot), opt.n_reps, opt.seed});
    }
    if (opt.crn) moments.push_back(*results[t]);
  }
  curve.set_points(std::move(pts));
  curve.set_moments(std::move(moments));
  return curve;
}

}  // namespace steinrisk
