#pragma once

// Numerical check of Baranchik's sufficient conditions for minimaxity of
// delta(y) = (1 - V g(|y|) / |y|^2) y: g nondecreasing and 0 <= g <= 2(k - 2).

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "steinrisk/model.hpp"
#include "steinrisk/shrinkage.hpp"

namespace steinrisk {

/// Logarithmically spaced grid on [lo, hi].
struct LogGrid {
  double lo = 1e-6;
  double hi = 1e8;
  int points = 2000;

  std::vector<double> values() const {
    if (!(lo > 0.0) || !(hi > lo) || points < 2) throw DomainError("LogGrid: need 0 < lo < hi and points >= 2");
    std::vector<double> v(points);
    const double a = std::log(lo);
    const double step = (std::log(hi) - a) / (points - 1);
    for (int i = 0; i < points; ++i) v[i] = std::exp(a + step * i);
    v.front() = lo;
    v.back() = hi;
    return v;
  }

  LogGrid doubled() const { return {lo, hi, 2 * points - 1}; }
};

/// The ADM g is twice the bracketed term of its shrinker. Reading the bracket
/// itself as g gives a different (looser) bound on m; both verdicts are kept.
struct BracketIdentification {
  double bracket_sup;  // sup of T * B_hat(T)
  double bound;        // 2(k - 2)
  bool within_bound;
  std::string note;
};

struct BaranchikReport {
  std::string estimator_name;
  int k = 0;
  LogGrid grid;
  bool nondecreasing = false;
  double min_g = 0.0;
  double sup_g = 0.0;
  double bound = 0.0;
  bool certified = false;
  std::optional<double> first_decrease_T;  // where monotonicity failed, if it did
  std::optional<BracketIdentification> bracket;
};

inline constexpr double kMonotoneSlack = 1e-12;

inline BaranchikReport certify(const ShrinkageEstimator& est, const ModelConfig& cfg, const LogGrid& grid = {}) {
  if (cfg.k() < 3) throw DomainError("certify: k must be >= 3");
  const auto Ts = grid.values();
  const double V = cfg.V();
  auto g_at = [&](double T) {
    try {
      const double g = est.g_of_theorem(2.0 * V * T, cfg);
      if (std::isnan(g)) throw DomainError("g evaluated to NaN");
      return g;
    } catch (const std::exception& e) {
      throw EvaluationError("certify(" + est.name() + "): g evaluation failed at T=" + std::to_string(T) + ": " +
                                e.what(),
                            T);
    }
  };

  BaranchikReport r;
  r.estimator_name = est.name();
  r.k = cfg.k();
  r.grid = grid;
  r.bound = 2.0 * (cfg.k() - 2);
  r.nondecreasing = true;
  r.min_g = std::numeric_limits<double>::infinity();
  r.sup_g = -std::numeric_limits<double>::infinity();

  double prev = 0.0;
  for (std::size_t i = 0; i < Ts.size(); ++i) {
    const double g = g_at(Ts[i]);
    if (i > 0 && g < prev - kMonotoneSlack * (1.0 + std::abs(prev))) {
      if (r.nondecreasing) r.first_decrease_T = Ts[i];
      r.nondecreasing = false;
    }
    r.min_g = std::min(r.min_g, g);
    r.sup_g = std::max(r.sup_g, g);
    prev = g;
  }
  // Large-T limit proxy.
  r.sup_g = std::max(r.sup_g, g_at(10.0 * grid.hi));
  r.certified = r.nondecreasing && r.min_g >= 0.0 && r.sup_g <= r.bound;

  if (est.kind() == EstimatorKind::ADM) {
    const auto& p = *est.adm_params();
    const double bracket_sup = std::max(adm_bracket(10.0 * grid.hi, p), p.bracket_limit());
    BracketIdentification b{bracket_sup, r.bound, bracket_sup <= r.bound, {}};
    char buf[320];
    std::snprintf(buf, sizeof buf,
                  "g = 2*bracket (bracket = T*B_hat); sup g = %.10g vs bound %.10g -> %s. "
                  "Bracket-as-g reading: sup bracket = %.10g (limit m-c+1 = %.10g) vs bound %.10g -> %s",
                  r.sup_g, r.bound, r.sup_g <= r.bound ? "within" : "exceeds", bracket_sup, p.bracket_limit(),
                  r.bound, b.within_bound ? "within" : "exceeds");
    b.note = buf;
    r.bracket = b;
  }
  return r;
}

struct SignAudit {
  double min_coefficient;
  double max_coefficient;
  bool reverses_sign;
};

/// Range of the shrink coefficient 1 - B over a grid of |y|^2 values.
inline SignAudit shrinker_sign_audit(const ShrinkageEstimator& est, const ModelConfig& cfg,
                                     const LogGrid& y_norm_sq_grid = {}) {
  if (cfg.k() < 3) throw DomainError("shrinker_sign_audit: k must be >= 3");
  SignAudit a{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(), false};
  for (double s : y_norm_sq_grid.values()) {
    double coef;
    try {
      coef = est.coefficient(s, cfg);
    } catch (const std::exception& e) {
      throw EvaluationError("shrinker_sign_audit(" + est.name() + "): " + e.what(), s);
    }
    a.min_coefficient = std::min(a.min_coefficient, coef);
    a.max_coefficient = std::max(a.max_coefficient, coef);
  }
  a.reverses_sign = a.min_coefficient < 0.0;
  return a;
}

/// Flat "key = value" block.
inline std::string to_key_value(const BaranchikReport& r) {
  std::ostringstream os;
  os.precision(17);
  os << "estimator = " << r.estimator_name << '\n'
     << "k = " << r.k << '\n'
     << "grid = T log-grid [" << r.grid.lo << ", " << r.grid.hi << "] points=" << r.grid.points << '\n'
     << "nondecreasing = " << (r.nondecreasing ? "true" : "false") << '\n';
  if (r.first_decrease_T) os << "first_decrease_T = " << *r.first_decrease_T << '\n';
  os << "min_g = " << r.min_g << '\n'
     << "sup_g = " << r.sup_g << '\n'
     << "bound = " << r.bound << '\n'
     << "certified = " << (r.certified ? "true" : "false") << '\n';
  if (r.bracket) {
    os << "bracket_sup = " << r.bracket->bracket_sup << '\n'
       << "bracket_within_bound = " << (r.bracket->within_bound ? "true" : "false") << '\n'
       << "bracket_identification_note = " << r.bracket->note << '\n';
  }
  return os.str();
}

inline constexpr const char* kMinimaxCsvHeader =
    "estimator,k,t_min,t_max,points,nondecreasing,min_g,sup_g,bound,certified,bracket_sup";

inline std::string to_csv_row(const BaranchikReport& r) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%s,%d,%.17g,%.17g,%d,%s,%.17g,%.17g,%.17g,%s,", r.estimator_name.c_str(), r.k,
                r.grid.lo, r.grid.hi, r.grid.points, r.nondecreasing ? "true" : "false", r.min_g, r.sup_g, r.bound,
                r.certified ? "true" : "false");
  std::string row = buf;
  if (r.bracket) {
    std::snprintf(buf, sizeof buf, "%.17g", r.bracket->bracket_sup);
    row += buf;
  }
  return row;
}

}  // namespace steinrisk
