#pragma once

// Scale-normalized detectors, scale-space signatures, extremum selection
// over scale and the blob / edge / ridge scale-selection benchmark.

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "scsp/error.hpp"
#include "scsp/kernels.hpp"
#include "scsp/signal.hpp"
#include "scsp/specfun.hpp"

namespace scsp {

enum class Detector { LaplacianNorm, DetHessianNorm, GradMagNorm, RidgeStrengthNorm };
enum class Polarity { Min, Max };
enum class ExtremumKind { InteriorExtremum, BoundaryExtremum };

inline constexpr Detector kAllDetectors[] = {Detector::LaplacianNorm, Detector::DetHessianNorm, Detector::GradMagNorm,
                                             Detector::RidgeStrengthNorm};

struct GammaPower {
  double gamma = 1.0;

  void validate() const {
    if (!(gamma > 0.0 && gamma <= 2.0)) throw domain_error("GammaPower: gamma must lie in (0, 2]");
  }
};

inline GammaPower default_gamma(Detector d) {
  switch (d) {
    case Detector::LaplacianNorm:
    case Detector::DetHessianNorm: return {1.0};
    case Detector::GradMagNorm: return {0.5};
    case Detector::RidgeStrengthNorm: return {0.75};
  }
  return {1.0};
}

/// Laplacian and ridge strength are negative on bright features.
inline Polarity detector_polarity(Detector d) {
  return (d == Detector::LaplacianNorm || d == Detector::RidgeStrengthNorm) ? Polarity::Min : Polarity::Max;
}

inline std::string_view to_string(Detector d) {
  switch (d) {
    case Detector::LaplacianNorm: return "laplacian";
    case Detector::DetHessianNorm: return "dethessian";
    case Detector::GradMagNorm: return "gradmag";
    case Detector::RidgeStrengthNorm: return "ridge";
  }
  return "?";
}

inline std::optional<Detector> parse_detector(std::string_view name) {
  for (auto d : kAllDetectors)
    if (to_string(d) == name) return d;
  return std::nullopt;
}

inline std::string_view to_string(Polarity p) { return p == Polarity::Min ? "min" : "max"; }
inline std::string_view to_string(ExtremumKind k) {
  return k == ExtremumKind::InteriorExtremum ? "interior" : "boundary";
}

/// Partial derivatives of L at one point and scale.
struct DerivativeJet {
  double Lx = 0.0, Ly = 0.0, Lxx = 0.0, Lxy = 0.0, Lyy = 0.0;
};

/// Scale-normalized detector value from the raw derivatives at variance s.
inline double combine(Detector d, const DerivativeJet& j, double s, GammaPower g) {
  const double gamma = g.gamma;
  switch (d) {
    case Detector::LaplacianNorm: return std::pow(s, gamma) * (j.Lxx + j.Lyy);
    case Detector::DetHessianNorm: return std::pow(s, 2.0 * gamma) * (j.Lxx * j.Lyy - j.Lxy * j.Lxy);
    case Detector::GradMagNorm: return std::pow(s, gamma / 2.0) * std::hypot(j.Lx, j.Ly);
    case Detector::RidgeStrengthNorm: {
      // Smaller Hessian eigenvalue L_pp.
      const double diff = j.Lxx - j.Lyy;
      return std::pow(s, gamma) * 0.5 * (j.Lxx + j.Lyy - std::sqrt(diff * diff + 4.0 * j.Lxy * j.Lxy));
    }
  }
  return 0.0;
}

inline double combine(Detector d, const DerivativeJet& j, double s) { return combine(d, j, s, default_gamma(d)); }

/// Which synthetic model a detector is benchmarked on.
enum class FeatureModel { Blob, Edge, Ridge };

inline FeatureModel feature_model(Detector d) {
  switch (d) {
    case Detector::GradMagNorm: return FeatureModel::Edge;
    case Detector::RidgeStrengthNorm: return FeatureModel::Ridge;
    default: return FeatureModel::Blob;
  }
}

inline Image2D feature_image(FeatureModel m, ScaleParam s0, int extent) {
  switch (m) {
    case FeatureModel::Blob: return gaussian_blob(s0, extent);
    case FeatureModel::Edge: return diffuse_edge(s0, extent);
    case FeatureModel::Ridge: return diffuse_ridge(s0, extent);
  }
  throw domain_error("feature_image: unknown model");
}

/// Closed-form derivatives at the model center for the continuous theory.
inline DerivativeJet continuous_center_jet(FeatureModel m, double s0, double s) {
  const double t = s0 + s;
  DerivativeJet j;
  switch (m) {
    case FeatureModel::Blob:
      j.Lxx = j.Lyy = -1.0 / (2.0 * std::numbers::pi * t * t);
      break;
    case FeatureModel::Edge: j.Lx = gauss(0.0, t); break;
    case FeatureModel::Ridge: j.Lxx = gauss_deriv(0.0, std::sqrt(t), 2); break;
  }
  return j;
}

/// Separable kernels of one family at one scale: index a holds the order-a
/// kernel (a = 0 is the natural smoother).
struct KernelSet {
  double s = 0.0;
  std::vector<DiscreteKernel1D> k;

  KernelSet(DerivKernelFamily family, ScaleParam scale, int max_order, const TruncationPolicy& policy)
      : s(scale.variance()) {
    for (int a = 0; a <= max_order; ++a) k.push_back(family_kernel(family, a, scale, policy));
  }
};

namespace detail {

inline int detector_max_order(Detector d) { return d == Detector::GradMagNorm ? 1 : 2; }

struct Needed {
  bool x = false, y = false, xx = false, xy = false, yy = false;
};

inline Needed needed_derivatives(Detector d) {
  switch (d) {
    case Detector::LaplacianNorm: return {false, false, true, false, true};
    case Detector::GradMagNorm: return {true, true, false, false, false};
    default: return {false, false, true, true, true};
  }
}

inline double fetch_pixel(const Image2D& img, int ix, int iy, const BoundaryPolicy& b) {
  if (ix >= 0 && ix < img.width && iy >= 0 && iy < img.height) return img.at(ix, iy);
  if (b.kind == BoundaryPolicy::Kind::Analytic) return b.extension(ix - img.x0, iy - img.y0);
  const int ex = extend_index(ix, img.width, b.kind);
  const int ey = extend_index(iy, img.height, b.kind);
  return (ex < 0 || ey < 0) ? 0.0 : img.at(ex, ey);
}

}  // namespace detail

/// Derivative jet at integer point (x, y): for every column offset m the
/// y-kernels are reduced first, then combined along x.
inline DerivativeJet derivative_jet_at(const Image2D& img, int x, int y, const KernelSet& ks, Detector d,
                                       const BoundaryPolicy& boundary = BoundaryPolicy::replicate()) {
  detail::require(img.contains(x, y), "derivative_jet_at: point outside image");
  const auto need = detail::needed_derivatives(d);
  const int ix = x + img.x0;
  const int iy = y + img.y0;

  // col[b][m + R]: sum_n K_b(n) f(x - m, y - n)
  int R = 0;
  for (const auto& k : ks.k) R = std::max(R, k.radius());
  std::vector<std::vector<double>> col(ks.k.size(), std::vector<double>(static_cast<std::size_t>(2 * R + 1), 0.0));
  for (int m = -R; m <= R; ++m) {
    for (std::size_t b = 0; b < ks.k.size(); ++b) {
      const auto& kb = ks.k[b];
      double acc = 0.0;
      for (int n = -kb.radius(); n <= kb.radius(); ++n)
        acc += kb[n] * detail::fetch_pixel(img, ix - m, iy - n, boundary);
      col[b][static_cast<std::size_t>(m + R)] = acc;
    }
  }
  const auto apply = [&](int a, int b) {
    const auto& ka = ks.k[static_cast<std::size_t>(a)];
    const auto& c = col[static_cast<std::size_t>(b)];
    double acc = 0.0;
    for (int m = -ka.radius(); m <= ka.radius(); ++m) acc += ka[m] * c[static_cast<std::size_t>(m + R)];
    return acc;
  };

  DerivativeJet j;
  if (need.x) j.Lx = apply(1, 0);
  if (need.y) j.Ly = apply(0, 1);
  if (need.xx) j.Lxx = apply(2, 0);
  if (need.xy) j.Lxy = apply(1, 1);
  if (need.yy) j.Lyy = apply(0, 2);
  return j;
}

inline double detector_response_at(const Image2D& img, Detector d, int x, int y, const KernelSet& ks,
                                   const BoundaryPolicy& boundary = BoundaryPolicy::replicate()) {
  return combine(d, derivative_jet_at(img, x, y, ks, d, boundary), ks.s);
}

/// Full detector image using the family's separable derivative kernels.
inline Image2D detector_response(const Image2D& img, Detector d, ScaleParam scale, DerivKernelFamily family,
                                 const TruncationPolicy& policy = {},
                                 const BoundaryPolicy& boundary = BoundaryPolicy::replicate()) {
  const double s = scale.variance();
  detail::require_positive_scale(s, "detector_response");
  const KernelSet ks(family, scale, detail::detector_max_order(d), policy);
  const auto need = detail::needed_derivatives(d);
  const auto deriv = [&](int a, int b) {
    return separable_convolve_2d(img, ks.k[static_cast<std::size_t>(a)], ks.k[static_cast<std::size_t>(b)], boundary);
  };
  std::optional<Image2D> lx, ly, lxx, lxy, lyy;
  if (need.x) lx = deriv(1, 0);
  if (need.y) ly = deriv(0, 1);
  if (need.xx) lxx = deriv(2, 0);
  if (need.xy) lxy = deriv(1, 1);
  if (need.yy) lyy = deriv(0, 2);

  Image2D out(img.width, img.height, img.x0, img.y0);
  for (std::size_t i = 0; i < out.samples.size(); ++i) {
    DerivativeJet j;
    if (lx) j.Lx = lx->samples[i];
    if (ly) j.Ly = ly->samples[i];
    if (lxx) j.Lxx = lxx->samples[i];
    if (lxy) j.Lxy = lxy->samples[i];
    if (lyy) j.Lyy = lyy->samples[i];
    out.samples[i] = combine(d, j, s);
  }
  return out;
}

struct ScaleSignature {
  std::vector<double> scales;  // sigma, strictly increasing
  std::vector<double> responses;
  int x = 0;
  int y = 0;

  void validate() const {
    detail::require(scales.size() == responses.size(), "ScaleSignature: length mismatch");
    validate_scales();
  }

  void validate_scales() const {
    for (std::size_t i = 1; i < scales.size(); ++i)
      detail::require(scales[i] > scales[i - 1], "ScaleSignature: scales must be strictly increasing");
    for (double v : scales) detail::require(v > 0.0, "ScaleSignature: scales must be positive");
  }
};

struct ScaleEstimate {
  double sigma_hat = 0.0;
  ExtremumKind kind = ExtremumKind::InteriorExtremum;
  Polarity polarity = Polarity::Max;
};

/// sigma_min * r^i for i = 0..count-1, r = (sigma_max / sigma_min)^(1/(count-1)).
inline std::vector<double> log_scale_grid(double sigma_min, double sigma_max, int count) {
  detail::require(sigma_min > 0.0 && sigma_max > sigma_min, "log_scale_grid: need 0 < min < max");
  detail::require(count >= 2, "log_scale_grid: need at least two levels");
  std::vector<double> g(static_cast<std::size_t>(count));
  const double r = std::pow(sigma_max / sigma_min, 1.0 / (count - 1));
  for (int i = 0; i < count; ++i) g[static_cast<std::size_t>(i)] = sigma_min * std::pow(r, i);
  g.back() = sigma_max;
  return g;
}

inline ScaleSignature scale_signature(const Image2D& img, Detector d, int x, int y, const std::vector<double>& sigmas,
                                      DerivKernelFamily family, const TruncationPolicy& policy = {},
                                      const BoundaryPolicy& boundary = BoundaryPolicy::replicate()) {
  detail::require(img.contains(x, y), "scale_signature: point outside image");
  ScaleSignature sig{sigmas, {}, x, y};
  sig.validate_scales();
  sig.responses.reserve(sigmas.size());
  for (double sigma : sigmas) {
    const KernelSet ks(family, ScaleParam::from_sigma(sigma), detail::detector_max_order(d), policy);
    sig.responses.push_back(detector_response_at(img, d, x, y, ks, boundary));
  }
  return sig;
}

/// Signature of the continuous theory at the center of the model for d.
inline ScaleSignature continuous_signature(Detector d, ScaleParam s0, const std::vector<double>& sigmas) {
  ScaleSignature sig{sigmas, {}, 0, 0};
  sig.validate_scales();
  for (double sigma : sigmas) {
    const double s = sigma * sigma;
    sig.responses.push_back(combine(d, continuous_center_jet(feature_model(d), s0.variance(), s), s));
  }
  return sig;
}

/// Vertex abscissa of the parabola through three points.
inline double parabola_vertex(double t0, double r0, double t1, double r1, double t2, double r2) {
  const double a = (t1 - t0) * (r1 - r2);
  const double b = (t1 - t2) * (r1 - r0);
  const double den = a - b;
  if (den == 0.0) return t1;
  return t1 - 0.5 * ((t1 - t0) * a - (t1 - t2) * b) / den;
}

/// Interior extremum of the requested polarity nearest `reference` (in
/// log sigma; the strongest one if no reference is given), refined by a
/// parabola through the neighbours in log sigma. Falls back to the global
/// extremum, flagged as a boundary extremum.
inline ScaleEstimate select_scale(const ScaleSignature& sig, Polarity polarity,
                                  std::optional<double> reference = std::nullopt) {
  sig.validate();
  const std::size_t n = sig.scales.size();
  if (n < 3) throw domain_error("select_scale: signature needs at least 3 scales");
  const double sign = polarity == Polarity::Max ? 1.0 : -1.0;
  const auto v = [&](std::size_t i) { return sign * sig.responses[i]; };

  std::optional<std::size_t> best;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (!(v(i) > v(i - 1) && v(i) >= v(i + 1))) continue;
    if (!best) {
      best = i;
      continue;
    }
    if (reference) {
      const double lr = std::log(*reference);
      if (std::abs(std::log(sig.scales[i]) - lr) < std::abs(std::log(sig.scales[*best]) - lr)) best = i;
    } else if (v(i) > v(*best)) {
      best = i;
    }
  }

  if (!best) {
    std::size_t idx = 0;
    for (std::size_t i = 1; i < n; ++i)
      if (v(i) > v(idx)) idx = i;
    return {sig.scales[idx], ExtremumKind::BoundaryExtremum, polarity};
  }
  const std::size_t i = *best;
  const double t0 = std::log(sig.scales[i - 1]);
  const double t1 = std::log(sig.scales[i]);
  const double t2 = std::log(sig.scales[i + 1]);
  const double t = std::clamp(parabola_vertex(t0, sig.responses[i - 1], t1, sig.responses[i], t2, sig.responses[i + 1]),
                              t0, t2);
  return {std::exp(t), ExtremumKind::InteriorExtremum, polarity};
}

inline double relative_scale_error(double sigma_hat, double sigma_ref) {
  if (!(sigma_hat > 0.0) || !(sigma_ref > 0.0)) throw domain_error("relative_scale_error: scales must be positive");
  return sigma_hat / sigma_ref - 1.0;
}

/// Analytic responses in place of a discrete kernel family.
struct ContinuousTheory {};

using ResponseSource = std::variant<ContinuousTheory, DerivKernelFamily>;

inline std::string to_string(const ResponseSource& src) {
  if (const auto* f = std::get_if<DerivKernelFamily>(&src)) return std::string(to_string(*f));
  return "continuous";
}

struct ScaleGridConfig {
  double sigma_min = 0.1;
  double sigma_max = 4.0;
  int count = 50;

  std::vector<double> grid() const { return log_scale_grid(sigma_min, sigma_max, count); }
};

inline constexpr ScaleGridConfig kReferenceGrid{0.1, 4.0, 50};
inline constexpr ScaleGridConfig kAccumulationGrid{0.1, 6.0, 80};

struct ScaleSelectionRow {
  double sigma_ref = 0.0;
  double sigma_hat = 0.0;
  double rel_error = 0.0;
  ExtremumKind kind = ExtremumKind::InteriorExtremum;
};

/// Half-width of the synthetic image for reference scale sigma_ref.
inline int experiment_extent(double sigma_ref, double sigma_max) {
  const int e = static_cast<int>(std::ceil(4.0 * (sigma_ref + sigma_max)));
  return std::max(e, min_model_extent(ScaleParam::from_sigma(sigma_ref)));
}

/// One cell of the benchmark: model of scale sigma_ref, signature at its
/// center over the accumulation scales, extremum nearest sigma_ref.
inline ScaleSelectionRow scale_selection_cell(Detector d, const ResponseSource& src, double sigma_ref,
                                              const std::vector<double>& acc_sigmas,
                                              const std::vector<KernelSet>* kernels = nullptr,
                                              const TruncationPolicy& policy = {}) {
  const ScaleParam s0 = ScaleParam::from_sigma(sigma_ref);
  ScaleSignature sig;
  if (std::holds_alternative<ContinuousTheory>(src)) {
    sig = continuous_signature(d, s0, acc_sigmas);
  } else {
    const auto family = std::get<DerivKernelFamily>(src);
    const Image2D img = feature_image(feature_model(d), s0, experiment_extent(sigma_ref, acc_sigmas.back()));
    if (kernels) {
      sig = ScaleSignature{acc_sigmas, {}, 0, 0};
      for (const auto& ks : *kernels) sig.responses.push_back(detector_response_at(img, d, 0, 0, ks));
    } else {
      sig = scale_signature(img, d, 0, 0, acc_sigmas, family, policy);
    }
  }
  const ScaleEstimate est = select_scale(sig, detector_polarity(d), sigma_ref);
  return {sigma_ref, est.sigma_hat, relative_scale_error(est.sigma_hat, sigma_ref), est.kind};
}

inline std::vector<KernelSet> kernel_sets(DerivKernelFamily family, const std::vector<double>& sigmas, int max_order,
                                          const TruncationPolicy& policy = {}) {
  std::vector<KernelSet> out;
  out.reserve(sigmas.size());
  for (double sigma : sigmas) out.emplace_back(family, ScaleParam::from_sigma(sigma), max_order, policy);
  return out;
}

inline std::vector<ScaleSelectionRow> run_scale_selection_experiment(Detector d, const ResponseSource& src,
                                                                     const ScaleGridConfig& ref = kReferenceGrid,
                                                                     const ScaleGridConfig& acc = kAccumulationGrid,
                                                                     const TruncationPolicy& policy = {}) {
  const auto refs = ref.grid();
  const auto accs = acc.grid();
  std::optional<std::vector<KernelSet>> kernels;
  if (const auto* f = std::get_if<DerivKernelFamily>(&src))
    kernels = kernel_sets(*f, accs, detail::detector_max_order(d), policy);
  std::vector<ScaleSelectionRow> rows;
  rows.reserve(refs.size());
  for (double sr : refs) rows.push_back(scale_selection_cell(d, src, sr, accs, kernels ? &*kernels : nullptr, policy));
  return rows;
}

}  // namespace scsp
