#pragma once

// 1-D discrete smoothing and derivative-approximation kernels.
//
// Every kernel is a convolution kernel T(n), applied as
//   L(x) = sum_n T(n) f(x - n),
// stored densely over n in [-N, N].

#include <cmath>
#include <cstdlib>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "scsp/error.hpp"
#include "scsp/specfun.hpp"

namespace scsp {

enum class KernelFamily { Sampled, NormSampled, Integrated, DiscAnalogue };

enum class DerivKernelFamily { SampledDeriv, IntegratedDeriv, DiscAnalogueDeriv, HybridSampled, HybridIntegrated };

inline constexpr KernelFamily kAllKernelFamilies[] = {KernelFamily::Sampled, KernelFamily::NormSampled,
                                                      KernelFamily::Integrated, KernelFamily::DiscAnalogue};

inline constexpr DerivKernelFamily kAllDerivKernelFamilies[] = {
    DerivKernelFamily::SampledDeriv, DerivKernelFamily::IntegratedDeriv, DerivKernelFamily::DiscAnalogueDeriv,
    DerivKernelFamily::HybridSampled, DerivKernelFamily::HybridIntegrated};

/// Tail bound: the truncated Gaussian mass 2 * int_N^inf g(x; s) dx <= epsilon.
struct TruncationPolicy {
  double epsilon = 1e-8;

  void validate() const {
    if (!(epsilon > 0.0 && epsilon < 0.1)) {
      throw domain_error("truncation epsilon must lie in (0, 0.1), got " + std::to_string(epsilon));
    }
  }
};

/// Which construction produced a kernel; monostate marks a bare difference operator.
using KernelTag = std::variant<std::monostate, KernelFamily, DerivKernelFamily>;

inline std::string_view to_string(KernelFamily f) {
  switch (f) {
    case KernelFamily::Sampled: return "sampled";
    case KernelFamily::NormSampled: return "normsampled";
    case KernelFamily::Integrated: return "integrated";
    case KernelFamily::DiscAnalogue: return "disc";
  }
  return "?";
}

inline std::string_view to_string(DerivKernelFamily f) {
  switch (f) {
    case DerivKernelFamily::SampledDeriv: return "sampled";
    case DerivKernelFamily::IntegratedDeriv: return "integrated";
    case DerivKernelFamily::DiscAnalogueDeriv: return "disc";
    case DerivKernelFamily::HybridSampled: return "hybrid-sampled";
    case DerivKernelFamily::HybridIntegrated: return "hybrid-integrated";
  }
  return "?";
}

inline std::string to_string(const KernelTag& tag) {
  if (const auto* f = std::get_if<KernelFamily>(&tag)) return std::string(to_string(*f));
  if (const auto* d = std::get_if<DerivKernelFamily>(&tag)) return std::string(to_string(*d));
  return "difference";
}

inline std::optional<KernelFamily> parse_kernel_family(std::string_view name) {
  for (auto f : kAllKernelFamilies)
    if (to_string(f) == name) return f;
  return std::nullopt;
}

inline std::optional<DerivKernelFamily> parse_deriv_kernel_family(std::string_view name) {
  for (auto f : kAllDerivKernelFamilies)
    if (to_string(f) == name) return f;
  return std::nullopt;
}

/// Smoothing family whose kernel accompanies a derivative family in the
/// orthogonal direction and as the incremental smoother of cascade tests.
inline KernelFamily natural_smoother(DerivKernelFamily f) {
  switch (f) {
    case DerivKernelFamily::SampledDeriv: return KernelFamily::Sampled;
    case DerivKernelFamily::IntegratedDeriv: return KernelFamily::Integrated;
    case DerivKernelFamily::DiscAnalogueDeriv: return KernelFamily::DiscAnalogue;
    case DerivKernelFamily::HybridSampled: return KernelFamily::NormSampled;
    case DerivKernelFamily::HybridIntegrated: return KernelFamily::Integrated;
  }
  return KernelFamily::Sampled;
}

class DiscreteKernel1D {
 public:
  DiscreteKernel1D() : coeffs_{1.0} {}

  DiscreteKernel1D(std::vector<double> coeffs, double scale, KernelTag tag, int deriv_order)
      : coeffs_(std::move(coeffs)), scale_(scale), tag_(tag), deriv_order_(deriv_order) {
    if (coeffs_.empty() || coeffs_.size() % 2 == 0) {
      throw domain_error("DiscreteKernel1D: need an odd, non-zero number of taps");
    }
    for (double c : coeffs_)
      if (!std::isfinite(c)) throw domain_error("DiscreteKernel1D: non-finite coefficient");
  }

  /// Builds a kernel from its values at n = 0..N, mirrored with the parity
  /// of the derivative order so symmetry holds bit-exactly.
  static DiscreteKernel1D from_half(std::span<const double> half, double scale, KernelTag tag, int deriv_order) {
    if (half.empty()) throw domain_error("DiscreteKernel1D: empty half kernel");
    const int radius = static_cast<int>(half.size()) - 1;
    const bool odd = deriv_order % 2 != 0;
    std::vector<double> c(2 * half.size() - 1);
    for (int n = 0; n <= radius; ++n) {
      const double v = (odd && n == 0) ? 0.0 : half[static_cast<std::size_t>(n)];
      c[static_cast<std::size_t>(radius + n)] = v;
      c[static_cast<std::size_t>(radius - n)] = odd ? -v : v;
    }
    return DiscreteKernel1D(std::move(c), scale, tag, deriv_order);
  }

  int radius() const { return static_cast<int>(coeffs_.size() / 2); }
  std::size_t size() const { return coeffs_.size(); }

  /// Coefficient at n; requires |n| <= radius().
  double operator[](int n) const { return coeffs_[static_cast<std::size_t>(n + radius())]; }

  /// Coefficient at n, zero outside the support.
  double at(int n) const { return std::abs(n) > radius() ? 0.0 : (*this)[n]; }

  std::span<const double> taps() const { return coeffs_; }
  double scale() const { return scale_; }
  const KernelTag& tag() const { return tag_; }
  int deriv_order() const { return deriv_order_; }

  /// Weights in correlation order, w(k) = T(-k) for k = -N..N; this is the
  /// layout in which difference stencils are usually printed.
  std::vector<double> stencil() const { return {coeffs_.rbegin(), coeffs_.rend()}; }

  /// Sum of coefficients, accumulated as mirror pairs so antisymmetric
  /// kernels sum to exactly zero.
  double sum() const {
    double acc = (*this)[0];
    for (int n = radius(); n >= 1; --n) acc += (*this)[n] + (*this)[-n];
    return acc;
  }

 private:
  std::vector<double> coeffs_;
  double scale_ = 0.0;
  KernelTag tag_{};
  int deriv_order_ = 0;
};

/// Full linear convolution (a * b)(n) = sum_m a(m) b(n - m), radius ra + rb.
/// Result is mirrored from n >= 0, so parity is exact.
inline DiscreteKernel1D kernel_convolve(const DiscreteKernel1D& a, const DiscreteKernel1D& b, KernelTag tag = {}) {
  const int ra = a.radius();
  const int rb = b.radius();
  const int r = ra + rb;
  std::vector<double> half(static_cast<std::size_t>(r) + 1, 0.0);
  for (int n = 0; n <= r; ++n) {
    double acc = 0.0;
    for (int m = std::max(-ra, n - rb); m <= std::min(ra, n + rb); ++m) acc += a[m] * b[n - m];
    half[static_cast<std::size_t>(n)] = acc;
  }
  return DiscreteKernel1D::from_half(half, a.scale() + b.scale(), tag, a.deriv_order() + b.deriv_order());
}

/// Smallest N >= 1 with 2 (1 - erg(N; s)) <= eps.
inline int truncation_radius(ScaleParam scale, double eps) {
  const double s = scale.variance();
  detail::require_positive_scale(s, "truncation_radius");
  TruncationPolicy{eps}.validate();
  int n = 1;
  while (2.0 * erg_upper(static_cast<double>(n), s) > eps) ++n;
  return n;
}

namespace detail {

inline DiscreteKernel1D disc_analogue_kernel(double s, const TruncationPolicy& policy) {
  // The discrete kernel has heavier tails than g at fine scales
  // ((s/2)^n / n! for small s), so the radius also bounds its own tail:
  // both the mass and the second moment cut off must stay below epsilon.
  const int gauss_radius = truncation_radius(ScaleParam(s), policy.epsilon);
  int nmax = gauss_radius + 24;
  for (;;) {
    const std::vector<double> t = bessel_i_scaled_table(nmax, s);
    double mass = 0.0;    // 2 sum_{k>n} T(k)
    double moment = 0.0;  // 2 sum_{k>n} k^2 T(k)
    int radius = 0;
    for (int n = nmax - 1; n >= 0; --n) {
      const double k = n + 1;
      mass += 2.0 * t[static_cast<std::size_t>(n) + 1];
      moment += 2.0 * k * k * t[static_cast<std::size_t>(n) + 1];
      if (mass > policy.epsilon || moment > policy.epsilon) {
        radius = n + 1;
        break;
      }
    }
    if (radius < nmax - 2) {
      radius = std::max({radius, gauss_radius, 1});
      return DiscreteKernel1D::from_half(std::span(t).first(static_cast<std::size_t>(radius) + 1), s,
                                         KernelFamily::DiscAnalogue, 0);
    }
    nmax *= 2;
  }
}

}  // namespace detail

inline DiscreteKernel1D smoothing_kernel(KernelFamily family, ScaleParam scale, const TruncationPolicy& policy = {}) {
  const double s = scale.variance();
  detail::require_positive_scale(s, "smoothing_kernel");
  policy.validate();
  if (family == KernelFamily::DiscAnalogue) return detail::disc_analogue_kernel(s, policy);

  const int radius = truncation_radius(scale, policy.epsilon);
  std::vector<double> half(static_cast<std::size_t>(radius) + 1);
  switch (family) {
    case KernelFamily::Sampled:
    case KernelFamily::NormSampled:
      for (int n = 0; n <= radius; ++n) half[static_cast<std::size_t>(n)] = gauss(n, s);
      break;
    case KernelFamily::Integrated: {
      // erfc differences stay accurate in the tails where erg is close to 1.
      const double root = std::sqrt(2.0 * s);
      half[0] = std::erf(0.5 / root);
      for (int n = 1; n <= radius; ++n)
        half[static_cast<std::size_t>(n)] = 0.5 * (std::erfc((n - 0.5) / root) - std::erfc((n + 0.5) / root));
      break;
    }
    case KernelFamily::DiscAnalogue: break;
  }
  if (family == KernelFamily::NormSampled) {
    double total = half[0];
    for (int n = radius; n >= 1; --n) total += 2.0 * half[static_cast<std::size_t>(n)];
    for (double& v : half) v /= total;
  }
  return DiscreteKernel1D::from_half(half, s, family, 0);
}

/// Central difference operator delta_{x^alpha} as a convolution kernel.
/// Stencils (correlation order): (-1/2, 0, 1/2), (1, -2, 1),
/// (-1/2, 1, 0, -1, 1/2), (1, -4, 6, -4, 1).
inline DiscreteKernel1D central_difference_mask(int alpha) {
  detail::require_order(alpha, 1, kMaxDerivOrder, "central_difference_mask");
  // Convolution-order halves T(0..N); T(n) = stencil(-n).
  switch (alpha) {
    case 1: return DiscreteKernel1D::from_half(std::vector{0.0, -0.5}, 0.0, {}, 1);
    case 2: return DiscreteKernel1D::from_half(std::vector{-2.0, 1.0}, 0.0, {}, 2);
    case 3: return DiscreteKernel1D::from_half(std::vector{0.0, 1.0, -0.5}, 0.0, {}, 3);
    default: return DiscreteKernel1D::from_half(std::vector{6.0, -4.0, 1.0}, 0.0, {}, 4);
  }
}

inline DiscreteKernel1D derivative_kernel(DerivKernelFamily family, int alpha, ScaleParam scale,
                                          const TruncationPolicy& policy = {}) {
  detail::require_order(alpha, 1, kMaxDerivOrder, "derivative_kernel");
  const double s = scale.variance();
  detail::require_positive_scale(s, "derivative_kernel");
  policy.validate();
  const double sigma = scale.sigma();

  switch (family) {
    case DerivKernelFamily::SampledDeriv: {
      const int radius = truncation_radius(scale, policy.epsilon);
      std::vector<double> half(static_cast<std::size_t>(radius) + 1);
      for (int n = 0; n <= radius; ++n) half[static_cast<std::size_t>(n)] = gauss_deriv(n, sigma, alpha);
      return DiscreteKernel1D::from_half(half, s, family, alpha);
    }
    case DerivKernelFamily::IntegratedDeriv: {
      const int radius = truncation_radius(scale, policy.epsilon);
      std::vector<double> half(static_cast<std::size_t>(radius) + 1);
      for (int n = 0; n <= radius; ++n) {
        half[static_cast<std::size_t>(n)] =
            gauss_deriv(n + 0.5, sigma, alpha - 1) - gauss_deriv(n - 0.5, sigma, alpha - 1);
      }
      return DiscreteKernel1D::from_half(half, s, family, alpha);
    }
    case DerivKernelFamily::DiscAnalogueDeriv:
    case DerivKernelFamily::HybridSampled:
    case DerivKernelFamily::HybridIntegrated: {
      const DiscreteKernel1D smooth = smoothing_kernel(natural_smoother(family), scale, policy);
      DiscreteKernel1D k = kernel_convolve(central_difference_mask(alpha), smooth, family);
      return k;
    }
  }
  throw domain_error("derivative_kernel: unknown family");
}

/// Smoothing kernel for alpha == 0, derivative kernel otherwise.
inline DiscreteKernel1D family_kernel(DerivKernelFamily family, int alpha, ScaleParam scale,
                                      const TruncationPolicy& policy = {}) {
  if (alpha == 0) return smoothing_kernel(natural_smoother(family), scale, policy);
  return derivative_kernel(family, alpha, scale, policy);
}

}  // namespace scsp
