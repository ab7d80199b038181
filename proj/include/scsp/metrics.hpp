#pragma once

// Error measures for discrete smoothing and derivative kernels, and the
// monomial-response probes P_{alpha,k}.

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <variant>

#include "scsp/error.hpp"
#include "scsp/kernels.hpp"
#include "scsp/specfun.hpp"

namespace scsp {

/// Per-scale error measures for one family. A value of std::nullopt marks a
/// singular measure (for example the variance of a zero-sum kernel).
struct MetricReport {
  std::string family;
  double sigma = 0.0;
  std::map<std::string, std::optional<double>> values;
  std::string note;

  std::optional<double> get(const std::string& name) const {
    auto it = values.find(name);
    return it == values.end() ? std::nullopt : it->second;
  }
};

namespace metric {
inline constexpr const char* kNorm = "E_norm";
inline constexpr const char* kDeltaScale = "E_deltas";
inline constexpr const char* kRelScale = "E_relscale";
inline constexpr const char* kCascade = "E_cascade";
inline constexpr const char* kL1 = "l1_norm";
inline constexpr const char* kSpread = "spread";
inline constexpr const char* kSpreadOffset = "spread_offset";
}  // namespace metric

inline double l1_norm(const DiscreteKernel1D& k) {
  double acc = std::abs(k[0]);
  for (int n = k.radius(); n >= 1; --n) acc += std::abs(k[n]) + std::abs(k[-n]);
  return acc;
}

namespace detail {

struct Moments {
  double m0 = 0.0, m1 = 0.0, m2 = 0.0;
};

/// Zeroth to second moments of w(n), accumulated as mirror pairs so the
/// first moment of a symmetric kernel is exactly zero.
template <class W>
Moments pair_moments(const DiscreteKernel1D& k, W&& w) {
  Moments m{w(k[0]), 0.0, 0.0};
  for (int n = k.radius(); n >= 1; --n) {
    const double a = w(k[n]);
    const double b = w(k[-n]);
    const double dn = static_cast<double>(n);
    m.m0 += a + b;
    m.m1 += dn * (a - b);
    m.m2 += dn * dn * (a + b);
  }
  return m;
}

/// l1 distance between two kernels, zero-extended to the larger support.
inline double l1_distance(const DiscreteKernel1D& a, const DiscreteKernel1D& b) {
  const int r = std::max(a.radius(), b.radius());
  double acc = 0.0;
  for (int n = -r; n <= r; ++n) acc += std::abs(a.at(n) - b.at(n));
  return acc;
}

}  // namespace detail

/// Mean-compensated second moment of the coefficient distribution.
inline double kernel_variance(const DiscreteKernel1D& k) {
  const auto m = detail::pair_moments(k, [](double c) { return c; });
  if (std::abs(m.m0) <= 1e-12 * l1_norm(k)) {
    throw undefined_variance("kernel_variance: coefficients sum to zero; use spread_measure");
  }
  const double mean = m.m1 / m.m0;
  return m.m2 / m.m0 - mean * mean;
}

/// Standard deviation of the distribution proportional to |T(n)|.
inline double spread_measure(const DiscreteKernel1D& k) {
  const auto m = detail::pair_moments(k, [](double c) { return std::abs(c); });
  if (!(m.m0 > 0.0)) throw domain_error("spread_measure: all-zero kernel");
  const double mean = m.m1 / m.m0;
  return std::sqrt(m.m2 / m.m0 - mean * mean);
}

inline MetricReport smoothing_error_report(KernelFamily family, ScaleParam scale,
                                           const TruncationPolicy& policy = {}) {
  const double s = scale.variance();
  detail::require_positive_scale(s, "smoothing_error_report");
  const DiscreteKernel1D t = smoothing_kernel(family, scale, policy);
  const DiscreteKernel1D t2 = smoothing_kernel(family, ScaleParam(2.0 * s), policy);

  MetricReport r{std::string(to_string(family)), scale.sigma(), {}, {}};
  r.values[metric::kNorm] = t.sum() - 1.0;
  try {
    const double v = kernel_variance(t);
    const double ds = v - s;
    r.values[metric::kDeltaScale] = ds;
    // Written in terms of E_deltas so the two measures agree algebraically.
    r.values[metric::kRelScale] = std::sqrt((s + ds) / s) - 1.0;
  } catch (const undefined_variance&) {
    r.values[metric::kDeltaScale] = std::nullopt;
    r.values[metric::kRelScale] = std::nullopt;
  }
  const DiscreteKernel1D tt = kernel_convolve(t, t);
  r.values[metric::kCascade] = detail::l1_distance(tt, t2) / l1_norm(t2);
  r.note = "epsilon=" + std::to_string(policy.epsilon);
  return r;
}

inline double spread_offset(DerivKernelFamily family, int alpha, ScaleParam scale,
                            const TruncationPolicy& policy = {}) {
  const DiscreteKernel1D k = derivative_kernel(family, alpha, scale, policy);
  return spread_measure(k) - ref_spread(alpha, scale.sigma());
}

/// Derivative normalization error against N_alpha, spread, spread offset and
/// the cascade error T_alpha(2s) vs T(s) * T_alpha(s), where T is the
/// natural smoother of the family.
inline MetricReport derivative_error_report(DerivKernelFamily family, int alpha, ScaleParam scale,
                                            const TruncationPolicy& policy = {}) {
  detail::require_order(alpha, 1, kMaxDerivOrder, "derivative_error_report");
  const double s = scale.variance();
  detail::require_positive_scale(s, "derivative_error_report");
  const double sigma = scale.sigma();

  const DiscreteKernel1D ka = derivative_kernel(family, alpha, scale, policy);
  const DiscreteKernel1D ka2 = derivative_kernel(family, alpha, ScaleParam(2.0 * s), policy);
  const KernelFamily smoother = natural_smoother(family);
  const DiscreteKernel1D t = smoothing_kernel(smoother, scale, policy);

  MetricReport r{std::string(to_string(family)), sigma, {}, {}};
  const double l1 = l1_norm(ka);
  r.values[metric::kL1] = l1;
  r.values[metric::kNorm] = l1 / ref_l1_norm(alpha, sigma) - 1.0;
  const double spread = spread_measure(ka);
  r.values[metric::kSpread] = spread;
  r.values[metric::kSpreadOffset] = spread - ref_spread(alpha, sigma);
  r.values[metric::kCascade] = detail::l1_distance(ka2, kernel_convolve(t, ka)) / l1_norm(ka2);
  r.note = "alpha=" + std::to_string(alpha) + " smoother=" + std::string(to_string(smoother)) +
           " epsilon=" + std::to_string(policy.epsilon);
  return r;
}

/// Truncation used by the monomial probes unless overridden: with P_{M,M}
/// = M! * sum(T), the default kernel tail would be amplified by up to 4! = 24.
inline constexpr double kProbeEpsilon = 1e-12;

/// Value at x = 0 of the order-alpha kernel (alpha = 0 selects the natural
/// smoother) applied to p(x) = x^k.
inline double monomial_response(DerivKernelFamily family, int alpha, int k, ScaleParam scale,
                                const TruncationPolicy& policy = {kProbeEpsilon}) {
  detail::require_order(alpha, 0, kMaxDerivOrder, "monomial_response");
  detail::require_order(k, 0, kMaxDerivOrder, "monomial_response");
  const DiscreteKernel1D t = family_kernel(family, alpha, scale, policy);
  // sum_n T(n) (0 - n)^k, taken as mirror pairs so parity zeros are exact.
  const auto pw = [k](double x) {
    double p = 1.0;
    for (int i = 0; i < k; ++i) p *= x;
    return p;
  };
  double acc = k == 0 ? t[0] : 0.0;
  for (int n = t.radius(); n >= 1; --n) acc += t[n] * pw(-n) + t[-n] * pw(n);
  return acc;
}

}  // namespace scsp
