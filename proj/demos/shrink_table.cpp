// Shrink factors of the built-in rules across |y|^2 for k = 10, V = 1, next to
// the exact James-Stein risk at the matching |theta|.

#include <cmath>
#include <cstdio>

#include "steinrisk/steinrisk.hpp"

using namespace steinrisk;

int main() {
  const ModelConfig cfg(10, 1.0);
  const auto adm = ShrinkageEstimator::adm(AdmParams::default_for(cfg));
  std::printf("%8s %10s %10s %10s %12s\n", "|y|^2", "JS", "JS+", "ADM", "R_JS(|y|)");
  for (double s : {0.5, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0}) {
    std::printf("%8g %10.5f %10.5f %10.5f %12.6f\n", s, js_shrink_factor(s, cfg),
                ShrinkageEstimator::positive_part().shrink_factor(s, cfg), adm.shrink_factor(s, cfg),
                exact_js_risk(std::sqrt(s), cfg));
  }
}
