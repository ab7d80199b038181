// Acceptance run: one PASS/FAIL line per criterion. argv[1] is the path of
// the command-line runner, used by the determinism check.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "scsp/directional.hpp"
#include "scsp/experiments.hpp"
#include "scsp/metrics.hpp"
#include "scsp/scalesel.hpp"
#include "scsp/signal.hpp"

using namespace scsp;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool ok = true;
  std::string detail;

  void check(bool cond, const std::string& what) {
    if (!cond) {
      if (ok) detail = what;
      ok = false;
    }
  }
};

std::string num(double v) {
  char b[40];
  std::snprintf(b, sizeof b, "%.3g", v);
  return b;
}

std::vector<double> log_grid(double lo, double hi, int n) { return log_scale_grid(lo, hi, n); }

const char* g_cli = nullptr;

Outcome c1() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  double worst_norm = 0, worst_ds = 0, worst_casc = 0;
  for (double sigma : log_grid(0.1, 4.0, 100)) {
    const auto r = smoothing_error_report(KernelFamily::DiscAnalogue, ScaleParam::from_sigma(sigma), {1e-12});
    worst_norm = std::max(worst_norm, std::abs(*r.get(metric::kNorm)));
    worst_ds = std::max(worst_ds, std::abs(*r.get(metric::kDeltaScale)));
    worst_casc = std::max(worst_casc, *r.get(metric::kCascade));
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  o.check(worst_norm <= 1e-8, "E_norm " + num(worst_norm));
  o.check(worst_ds <= 1e-8, "E_deltas " + num(worst_ds));
  o.check(worst_casc <= 1e-7, "E_cascade " + num(worst_casc));
  o.check(secs < 5.0, "runtime " + num(secs) + " s");
  if (o.ok)
    o.detail = "max |E_norm| " + num(worst_norm) + ", |E_deltas| " + num(worst_ds) + ", E_cascade " + num(worst_casc) +
               ", " + num(secs) + " s";
  return o;
}

Outcome c2() {
  Outcome o;
  const double ds = *smoothing_error_report(KernelFamily::Integrated, ScaleParam::from_sigma(4.0)).get(metric::kDeltaScale);
  o.check(std::abs(ds - 1.0 / 12.0) <= 5e-3, "E_deltas " + num(ds));
  if (o.ok) o.detail = "E_deltas(sigma=4) = " + num(ds);
  return o;
}

Outcome c3() {
  Outcome o;
  const double fine = *smoothing_error_report(KernelFamily::Sampled, ScaleParam::from_sigma(0.3)).get(metric::kNorm);
  const double coarse = *smoothing_error_report(KernelFamily::Sampled, ScaleParam::from_sigma(1.5)).get(metric::kNorm);
  o.check(fine > 0.1, "E_norm(0.3) " + num(fine));
  o.check(std::abs(coarse) < 1e-4, "E_norm(1.5) " + num(coarse));
  if (o.ok) o.detail = "E_norm(0.3) = " + num(fine) + ", E_norm(1.5) = " + num(coarse);
  return o;
}

Outcome c4() {
  Outcome o;
  const double fact[] = {1, 1, 2, 6, 24};
  double worst = 0;
  for (auto f : {DerivKernelFamily::DiscAnalogueDeriv, DerivKernelFamily::HybridSampled, DerivKernelFamily::HybridIntegrated})
    for (double sigma : log_grid(0.1, 2.0, 50))
      for (int a = 1; a <= 4; ++a) {
        const ScaleParam sc = ScaleParam::from_sigma(sigma);
        const double e1 = std::abs(monomial_response(f, a, a, sc) - fact[a]);
        worst = std::max(worst, e1);
        o.check(e1 <= 1e-8, std::string(to_string(f)) + " P_" + std::to_string(a) + "_" + std::to_string(a) + " off by " +
                                num(e1) + " at sigma " + num(sigma));
        if (a >= 2) {
          const double e2 = std::abs(monomial_response(f, a, a - 2, sc));
          worst = std::max(worst, e2);
          o.check(e2 <= 1e-8, std::string(to_string(f)) + " P_" + std::to_string(a) + "_" + std::to_string(a - 2) +
                                  " = " + num(e2) + " at sigma " + num(sigma));
        }
      }
  if (o.ok) o.detail = "worst deviation " + num(worst) + " over 3 families x 50 scales";
  return o;
}

Outcome c5() {
  Outcome o;
  const double fine = monomial_response(DerivKernelFamily::SampledDeriv, 1, 1, ScaleParam::from_sigma(0.4));
  const double coarse = monomial_response(DerivKernelFamily::SampledDeriv, 1, 1, ScaleParam::from_sigma(1.5));
  o.check(std::abs(fine - 1.0) > 0.05, "P_1_1(0.4) = " + num(fine));
  o.check(std::abs(coarse - 1.0) <= 1e-3, "P_1_1(1.5) = " + num(coarse));
  if (o.ok) o.detail = "P_1_1(0.4) = " + num(fine) + ", P_1_1(1.5) = " + num(coarse);
  return o;
}

// Independent quadrature of int |x|^p |g^(alpha)(x; 1)| dx, split at the Hermite zeros.
double abs_moment(int alpha, int p) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  auto f = [=](double x) {
    const double phi = std::exp(-0.5 * x * x) / std::sqrt(2 * kPi);
    double he = 1;
    switch (alpha) {
      case 1: he = x; break;
      case 2: he = x * x - 1; break;
      case 3: he = x * x * x - 3 * x; break;
      case 4: he = x * x * x * x - 6 * x * x + 3; break;
      default: break;
    }
    return std::pow(x, p) * std::abs(he) * phi;
  };
  const double cuts[] = {0.0, std::sqrt(3.0 - std::sqrt(6.0)), 1.0, std::sqrt(3.0), std::sqrt(3.0 + std::sqrt(6.0)), 40.0};
  double acc = 0;
  for (int i = 0; i < 5; ++i) acc += GK::integrate(f, cuts[i], cuts[i + 1], 10, 1e-13);
  return 2 * acc;
}

Outcome c6() {
  Outcome o;
  const double l1_printed[] = {1, 0.798, 0.968, 1.510, 2.801};
  const double spread_printed[] = {1, 1.414, 1.498, 1.498, 1.481};
  double worst = 0;
  for (int a = 0; a <= 4; ++a) {
    const double q0 = abs_moment(a, 0);
    const double qs = std::sqrt(abs_moment(a, 2) / q0);
    const double l1 = ref_l1_norm(a, 1.0);
    const double sp = ref_spread(a, 1.0);
    worst = std::max({worst, std::abs(l1 - q0), std::abs(sp - qs)});
    o.check(std::abs(l1 - q0) <= 1e-6, "N_" + std::to_string(a) + " vs quadrature " + num(l1 - q0));
    o.check(std::abs(sp - qs) <= 1e-6, "S_" + std::to_string(a) + " vs quadrature " + num(sp - qs));
    o.check(std::abs(l1 - l1_printed[a]) <= 5e-4, "N_" + std::to_string(a) + " vs printed");
    o.check(std::abs(sp - spread_printed[a]) <= 5e-4, "S_" + std::to_string(a) + " vs printed");
  }
  if (o.ok) o.detail = "max deviation from quadrature " + num(worst);
  return o;
}

Outcome c7() {
  Outcome o;
  o.check(spread_measure(central_difference_mask(1)) == 1.0, "delta_x");
  o.check(spread_measure(central_difference_mask(2)) == std::sqrt(0.5), "delta_xx");
  o.check(spread_measure(central_difference_mask(3)) == std::sqrt(2.0), "delta_xxx");
  o.check(spread_measure(central_difference_mask(4)) == 1.0, "delta_xxxx");
  if (o.ok) o.detail = "1, 1/sqrt2, sqrt2, 1 exactly";
  return o;
}

Outcome c8() {
  Outcome o;
  double worst = 0;
  const auto acc = kAccumulationGrid.grid();
  for (auto d : kAllDetectors)
    for (double sr : log_grid(0.5, 4.0, 50)) {
      const auto row = scale_selection_cell(d, ContinuousTheory{}, sr, acc);
      worst = std::max(worst, std::abs(row.rel_error));
      o.check(std::abs(row.rel_error) <= 5e-3 && row.kind == ExtremumKind::InteriorExtremum,
              std::string(to_string(d)) + " at " + num(sr) + ": " + num(row.rel_error));
    }
  if (o.ok) o.detail = "worst relative error " + num(worst);
  return o;
}

Outcome c9() {
  Outcome o;
  const auto acc = kAccumulationGrid.grid();
  const auto fine = scale_selection_cell(Detector::LaplacianNorm, DerivKernelFamily::SampledDeriv, 0.5, acc);
  o.check(fine.kind == ExtremumKind::BoundaryExtremum && fine.sigma_hat == acc.front(),
          "sampled laplacian at 0.5: " + std::string(to_string(fine.kind)) + " " + num(fine.sigma_hat));
  double worst = 0;
  for (auto d : kAllDetectors)
    for (auto f : kAllDerivKernelFamilies) {
      const auto row = scale_selection_cell(d, f, 3.0, acc);
      worst = std::max(worst, std::abs(row.rel_error));
      o.check(std::abs(row.rel_error) < 0.05, std::string(to_string(d)) + "/" + std::string(to_string(f)) + " at 3: " +
                                                   num(row.rel_error));
    }
  const auto t0 = std::chrono::steady_clock::now();
  for (auto d : kAllDetectors)
    for (auto f : {DerivKernelFamily::SampledDeriv, DerivKernelFamily::IntegratedDeriv, DerivKernelFamily::DiscAnalogueDeriv})
      run_scale_selection_experiment(d, f);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  o.check(secs < 180.0, "full run " + num(secs) + " s");
  if (o.ok) o.detail = "boundary at " + num(fine.sigma_hat) + ", worst |error| at 3: " + num(worst) + ", full run " + num(secs) + " s";
  return o;
}

Mask2D literal(int size, std::vector<double> rows) { return Mask2D(size, std::move(rows)); }

Outcome c10() {
  Outcome o;
  const Mask2D lap = cartesian_mask(2, 0) + cartesian_mask(0, 2);
  double worst = 0;
  for (int i = 0; i < 36; ++i) {
    const double phi = i * 2 * kPi / 36;
    const double d = (directional_mask(2, 0, phi) + directional_mask(0, 2, phi)).max_abs_diff(lap);
    worst = std::max(worst, d);
  }
  o.check(worst <= 1e-14, "Laplacian steering " + num(worst));
  for (int m1 = 0; m1 <= 4; ++m1)
    for (int m2 = 0; m1 + m2 <= 4; ++m2)
      if (m1 + m2 > 0) o.check(directional_mask(m1, m2, 0.0) == cartesian_mask(m1, m2), "phi = 0 mask mismatch");

  // Printed grids, top row is the positive y side.
  const double h = 0.5, q = 0.25;
  const std::vector<std::tuple<int, int, Mask2D>> printed = {
      {1, 0, literal(3, {0, 0, 0, -h, 0, h, 0, 0, 0})},
      {0, 1, literal(3, {0, h, 0, 0, 0, 0, 0, -h, 0})},
      {2, 0, literal(3, {0, 0, 0, 1, -2, 1, 0, 0, 0})},
      {1, 1, literal(3, {-q, 0, q, 0, 0, 0, q, 0, -q})},
      {0, 2, literal(3, {0, 1, 0, 0, -2, 0, 0, 1, 0})},
      {3, 0, literal(5, {0, 0, 0, 0, 0, 0, 0, 0, 0, 0, -h, 1, 0, -1, h, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0})},
      {2, 1, literal(5, {0, 0, 0, 0, 0, 0, h, -1, h, 0, 0, 0, 0, 0, 0, 0, -h, 1, -h, 0, 0, 0, 0, 0, 0})},
      {1, 2, literal(5, {0, 0, 0, 0, 0, 0, -h, 0, h, 0, 0, 1, 0, -1, 0, 0, -h, 0, h, 0, 0, 0, 0, 0, 0})},
      {0, 3, literal(5, {0, 0, h, 0, 0, 0, 0, -1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, -h, 0, 0})},
      {4, 0, literal(5, {0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, -4, 6, -4, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0})},
      {3, 1, literal(5, {0, 0, 0, 0, 0, -q, h, 0, -h, q, 0, 0, 0, 0, 0, q, -h, 0, h, -q, 0, 0, 0, 0, 0})},
      {2, 2, literal(5, {0, 0, 0, 0, 0, 0, 1, -2, 1, 0, 0, -2, 4, -2, 0, 0, 1, -2, 1, 0, 0, 0, 0, 0, 0})},
      {1, 3, literal(5, {0, -q, 0, q, 0, 0, h, 0, -h, 0, 0, 0, 0, 0, 0, 0, -h, 0, h, 0, 0, q, 0, -q, 0})},
      {0, 4, literal(5, {0, 0, 1, 0, 0, 0, 0, -4, 0, 0, 0, 0, 6, 0, 0, 0, 0, -4, 0, 0, 0, 0, 1, 0, 0})},
  };
  for (const auto& [mx, my, m] : printed)
    o.check(cartesian_mask(mx, my) == m, "printed mask (" + std::to_string(mx) + "," + std::to_string(my) + ")");
  if (o.ok) o.detail = "36 angles max dev " + num(worst) + ", 14 printed masks exact";
  return o;
}

Outcome c11() {
  Outcome o;
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0;
  for (int trial = 0; trial < 4; ++trial) {
    Signal1D f{std::vector<double>(256), 128};
    for (double& v : f.samples) v = u(rng);
    for (double sigma : {0.3, 1.0, 2.5})
      for (int a = 1; a <= 4; ++a) {
        const auto t = smoothing_kernel(KernelFamily::DiscAnalogue, ScaleParam::from_sigma(sigma));
        const auto d = central_difference_mask(a);
        const auto lhs = convolve_1d(convolve_1d(f, t), d);
        const auto rhs = convolve_1d(convolve_1d(f, d), t);
        const int margin = t.radius() + d.radius();
        for (int i = margin; i < 256 - margin; ++i)
          worst = std::max(worst, std::abs(lhs.samples[static_cast<std::size_t>(i)] - rhs.samples[static_cast<std::size_t>(i)]));
      }
  }
  o.check(worst <= 1e-12, "max interior difference " + num(worst));
  if (o.ok) o.detail = "max interior difference " + num(worst);
  return o;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome c12() {
  Outcome o;
  if (!g_cli) {
    o.check(false, "runner path not given");
    return o;
  }
  const auto dir = std::filesystem::temp_directory_path() / ("scsp_accept_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  const std::vector<std::string> runs = {
      "kernel-dump --family integrated --order 2 --sigma 1.5",
      "smoothing-metrics --families all",
      "derivative-metrics --families all",
      "monomial-response --families all",
      "scale-selection --detector all",
      "scale-selection --detector laplacian --family continuous,hybrid-sampled --boundary mirror",
      "directional-dump --order 2 --perp 1 --phi 0.5235987755982988",
      "directional-dump --order 1 --perp 0 --phi 0.5 --kind kernel",
      "affine-dump --sigma1 8 --sigma2 4 --phi 0.5235987755982988",
      "affine-dump --sigma1 3 --sigma2 1.5 --phi 1 --kind integrated",
  };
  int idx = 0;
  for (const auto& args : runs) {
    std::string first;
    for (int rep = 0; rep < 3; ++rep) {
      const auto out = dir / ("run" + std::to_string(idx) + "_" + std::to_string(rep) + ".csv");
      // The third repetition pins a single worker.
      const std::string env = rep == 2 ? "SCSP_THREADS=1 " : "";
      const std::string cmd = env + "\"" + std::string(g_cli) + "\" " + args + " --out \"" + out.string() + "\"";
      const int rc = std::system(cmd.c_str());
      o.check(rc == 0, "exit status for: " + args);
      const std::string text = slurp(out);
      o.check(!text.empty(), "empty output for: " + args);
      if (rep == 0) first = text;
      else o.check(text == first, "bytes differ for: " + args);
    }
    ++idx;
  }
  std::filesystem::remove_all(dir);
  if (o.ok) o.detail = std::to_string(runs.size()) + " configurations x 3 runs byte-identical";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) g_cli = argv[1];
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"discrete-analogue exactness", c1}, {"integrated-kernel scale offset", c2},
      {"sampled-kernel fine-scale failure", c3}, {"monomial exactness", c4},
      {"sampled-derivative fine-scale breakdown", c5}, {"reference constants", c6},
      {"central-difference spread floors", c7}, {"scale-selection oracle", c8},
      {"scale-selection discrete behaviour", c9}, {"steering identities", c10},
      {"commutation property", c11}, {"runner determinism", c12},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.ok = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s criterion %zu: %s (%s) [%.2f s]\n", o.ok ? "PASS" : "FAIL", i + 1, criteria[i].first,
                o.detail.c_str(), secs);
    if (!o.ok) ++failed;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
