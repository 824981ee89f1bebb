#pragma once

// Globally adaptive Gauss-Legendre quadrature. Each panel is integrated with
// an n-point and a 2n-point rule; their difference is the panel's error
// estimate, and the worst panel is bisected until the total error meets the
// relative tolerance or the panel cap is reached.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <queue>
#include <vector>

namespace steinrisk::quad {

struct Options {
  double rel_tol = 1e-9;
  double abs_tol = 0.0;
  std::size_t max_panels = 1'000'000;
};

struct Result {
  double value = 0.0;
  double error = 0.0;
  std::size_t panels = 0;
  bool converged = false;
};

namespace detail {

template <std::size_t N>
struct GaussLegendre {
  std::array<double, N> nodes{};
  std::array<double, N> weights{};

  GaussLegendre() {
    for (std::size_t i = 0; i < N; ++i) {
      // Chebyshev-type initial guess, then Newton on P_N.
      double x = std::cos(std::numbers::pi * (i + 0.75) / (N + 0.5));
      double dp = 0.0;
      for (int iter = 0; iter < 100; ++iter) {
        double p0 = 1.0, p1 = x;
        for (std::size_t n = 2; n <= N; ++n) {
          const double p2 = ((2.0 * n - 1.0) * x * p1 - (n - 1.0) * p0) / n;
          p0 = p1;
          p1 = p2;
        }
        dp = N * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
      nodes[i] = x;
      weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
  }

  template <class F>
  double apply(const F& f, double a, double b) const {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double s = 0.0;
    for (std::size_t i = 0; i < N; ++i) s += weights[i] * f(mid + half * nodes[i]);
    return half * s;
  }
};

inline const GaussLegendre<10>& coarse_rule() {
  static const GaussLegendre<10> rule;
  return rule;
}
inline const GaussLegendre<20>& fine_rule() {
  static const GaussLegendre<20> rule;
  return rule;
}

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

template <class F>
Panel make_panel(const F& f, double a, double b) {
  const double fine = fine_rule().apply(f, a, b);
  const double coarse = coarse_rule().apply(f, a, b);
  return {a, b, fine, std::abs(fine - coarse)};
}

}  // namespace detail

/// Integrates f over consecutive intervals [breaks[i], breaks[i+1]].
/// Breakpoints must be ascending; supply geometric breakpoints where the
/// integrand varies on very different scales.
template <class F>
Result integrate(const F& f, const std::vector<double>& breaks, const Options& opt = {}) {
  std::priority_queue<detail::Panel> heap;
  double total = 0.0;
  double err = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    if (!(breaks[i + 1] > breaks[i])) continue;
    auto p = detail::make_panel(f, breaks[i], breaks[i + 1]);
    total += p.value;
    err += p.error;
    heap.push(p);
  }
  Result r;
  auto done = [&] { return err <= std::max(opt.abs_tol, opt.rel_tol * std::abs(total)); };
  while (!heap.empty() && !done() && heap.size() < opt.max_panels) {
    const auto worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) break;  // interval exhausted in double
    heap.pop();
    const auto left = detail::make_panel(f, worst.a, mid);
    const auto right = detail::make_panel(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }
  // Re-sum to shed the drift of the incremental updates.
  r.panels = heap.size();
  total = 0.0;
  err = 0.0;
  while (!heap.empty()) {
    total += heap.top().value;
    err += heap.top().error;
    heap.pop();
  }
  r.value = total;
  r.error = err;
  r.converged = err <= std::max(opt.abs_tol, opt.rel_tol * std::abs(total));
  return r;
}

template <class F>
Result integrate(const F& f, double a, double b, const Options& opt = {}) {
  return integrate(f, std::vector<double>{a, b}, opt);
}

/// a = b_0 < a + h < a + 2h < a + 4h < ... < b.
inline std::vector<double> geometric_breaks(double a, double b, double h) {
  std::vector<double> out{a};
  for (double d = h; a + d < b; d *= 2.0) out.push_back(a + d);
  out.push_back(b);
  return out;
}

}  // namespace steinrisk::quad
