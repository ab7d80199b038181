// Smooths a step edge with the three smoothing families and prints the
// derivative response profile next to the continuous value.

#include <cmath>
#include <cstdio>
#include <numbers>

#include "scsp/metrics.hpp"
#include "scsp/signal.hpp"

int main() {
  using namespace scsp;
  const double sigma = 0.75;
  const ScaleParam scale = ScaleParam::from_sigma(sigma);

  Signal1D step{std::vector<double>(41), 20};
  for (int i = 0; i < 41; ++i) step.samples[static_cast<std::size_t>(i)] = step.x_at(i) >= 0 ? 1.0 : 0.0;

  std::printf("sigma = %g\n", sigma);
  std::printf("%-10s %10s %10s %10s\n", "family", "E_norm", "E_deltas", "E_cascade");
  for (auto f : kAllKernelFamilies) {
    const auto r = smoothing_error_report(f, scale);
    const auto c = r.get(metric::kCascade);
    std::printf("%-10s %10.3g %10.3g %10.3g\n", std::string(to_string(f)).c_str(), *r.get(metric::kNorm),
                *r.get(metric::kDeltaScale), c ? *c : NAN);
  }

  // Derivative of the smoothed step around the edge.
  const double peak = 1.0 / std::sqrt(2 * std::numbers::pi * sigma * sigma);
  std::printf("\nfirst derivative at the edge (continuous %.6f)\n", peak);
  for (auto f : {DerivKernelFamily::SampledDeriv, DerivKernelFamily::DiscAnalogueDeriv, DerivKernelFamily::HybridSampled}) {
    const auto k = derivative_kernel(f, 1, scale);
    const auto out = convolve_1d(step, k, BoundaryPolicy::replicate());
    std::printf("%-18s", std::string(to_string(f)).c_str());
    for (int x = -2; x <= 1; ++x) std::printf(" %9.6f", out.samples[static_cast<std::size_t>(x + 20)]);
    std::printf("\n");
  }
  return 0;
}
