#pragma once

// 2-D Cartesian difference masks, steered directional derivative masks and
// affine Gaussian kernels.

#include <array>
#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "scsp/error.hpp"
#include "scsp/kernels.hpp"
#include "scsp/signal.hpp"

namespace scsp {

/// Square mask of side 3 or 5, applied by correlation
///   out(x, y) = sum M(dx, dy) f(x + dx, y + dy).
/// Stored in printed layout: row 0 is dy = +r, column 0 is dx = -r.
class Mask2D {
 public:
  Mask2D() = default;
  explicit Mask2D(int size) : size_(size), coeffs_(static_cast<std::size_t>(size * size), 0.0) {
    detail::require(size == 3 || size == 5, "Mask2D: size must be 3 or 5");
  }
  Mask2D(int size, std::vector<double> rows) : size_(size), coeffs_(std::move(rows)) {
    detail::require(size == 3 || size == 5, "Mask2D: size must be 3 or 5");
    detail::require(coeffs_.size() == static_cast<std::size_t>(size * size), "Mask2D: wrong coefficient count");
  }

  int size() const { return size_; }
  int radius() const { return size_ / 2; }

  double at(int dx, int dy) const { return coeffs_[index(dx, dy)]; }
  double& at(int dx, int dy) { return coeffs_[index(dx, dy)]; }

  /// Printed row-major layout (top row first).
  const std::vector<double>& rows() const { return coeffs_; }

  /// Same operator embedded in a 5x5 grid.
  Mask2D widened(int size) const {
    if (size == size_) return *this;
    detail::require(size > size_, "Mask2D: cannot shrink");
    Mask2D out(size);
    const int r = radius();
    for (int dy = -r; dy <= r; ++dy)
      for (int dx = -r; dx <= r; ++dx) out.at(dx, dy) = at(dx, dy);
    return out;
  }

  Mask2D& operator+=(const Mask2D& o) {
    const int s = std::max(size_, o.size_);
    Mask2D a = widened(s);
    const Mask2D b = o.widened(s);
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i) a.coeffs_[i] += b.coeffs_[i];
    return *this = std::move(a);
  }
  friend Mask2D operator+(Mask2D a, const Mask2D& b) { return a += b; }
  friend Mask2D operator*(double w, Mask2D m) {
    for (double& c : m.coeffs_) c *= w;
    return m;
  }
  friend bool operator==(const Mask2D&, const Mask2D&) = default;

  double max_abs_diff(const Mask2D& o) const {
    const int s = std::max(size_, o.size_);
    const Mask2D a = widened(s);
    const Mask2D b = o.widened(s);
    double d = 0.0;
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i) d = std::max(d, std::abs(a.coeffs_[i] - b.coeffs_[i]));
    return d;
  }

 private:
  std::size_t index(int dx, int dy) const {
    const int r = radius();
    return static_cast<std::size_t>((r - dy) * size_ + (dx + r));
  }

  int size_ = 3;
  std::vector<double> coeffs_ = std::vector<double>(9, 0.0);
};

namespace detail {

inline void require_mask_order(int mx, int my, const char* what) {
  if (mx < 0 || my < 0 || mx + my < 1 || mx + my > kMaxDerivOrder) {
    throw unsupported_order(std::string(what) + ": orders (" + std::to_string(mx) + ", " + std::to_string(my) +
                            ") need 1 <= total <= 4");
  }
}

inline int mask_size_for(int order) { return order <= 2 ? 3 : 5; }

// clang-format off
inline Mask2D printed_mask(int mx, int my) {
  constexpr double h = 0.5, q = 0.25;
  switch (mx * 10 + my) {
    case 10: return Mask2D(3, { 0, 0, 0,
                               -h, 0, h,
                                0, 0, 0});
    case 1:  return Mask2D(3, { 0, h, 0,
                                0, 0, 0,
                                0,-h, 0});
    case 20: return Mask2D(3, { 0, 0, 0,
                                1,-2, 1,
                                0, 0, 0});
    case 11: return Mask2D(3, {-q, 0, q,
                                0, 0, 0,
                                q, 0,-q});
    case 2:  return Mask2D(3, { 0, 1, 0,
                                0,-2, 0,
                                0, 1, 0});
    case 30: return Mask2D(5, { 0, 0, 0, 0, 0,
                                0, 0, 0, 0, 0,
                               -h, 1, 0,-1, h,
                                0, 0, 0, 0, 0,
                                0, 0, 0, 0, 0});
    case 21: return Mask2D(5, { 0, 0, 0, 0, 0,
                                0, h,-1, h, 0,
                                0, 0, 0, 0, 0,
                                0,-h, 1,-h, 0,
                                0, 0, 0, 0, 0});
    case 12: return Mask2D(5, { 0, 0, 0, 0, 0,
                                0,-h, 0, h, 0,
                                0, 1, 0,-1, 0,
                                0,-h, 0, h, 0,
                                0, 0, 0, 0, 0});
    case 3:  return Mask2D(5, { 0, 0, h, 0, 0,
                                0, 0,-1, 0, 0,
                                0, 0, 0, 0, 0,
                                0, 0, 1, 0, 0,
                                0, 0,-h, 0, 0});
    case 40: return Mask2D(5, { 0, 0, 0, 0, 0,
                                0, 0, 0, 0, 0,
                                1,-4, 6,-4, 1,
                                0, 0, 0, 0, 0,
                                0, 0, 0, 0, 0});
    case 31: return Mask2D(5, { 0, 0, 0, 0, 0,
                               -q, h, 0,-h, q,
                                0, 0, 0, 0, 0,
                                q,-h, 0, h,-q,
                                0, 0, 0, 0, 0});
    case 22: return Mask2D(5, { 0, 0, 0, 0, 0,
                                0, 1,-2, 1, 0,
                                0,-2, 4,-2, 0,
                                0, 1,-2, 1, 0,
                                0, 0, 0, 0, 0});
    case 13: return Mask2D(5, { 0,-q, 0, q, 0,
                                0, h, 0,-h, 0,
                                0, 0, 0, 0, 0,
                                0,-h, 0, h, 0,
                                0, q, 0,-q, 0});
    case 4:  return Mask2D(5, { 0, 0, 1, 0, 0,
                                0, 0,-4, 0, 0,
                                0, 0, 6, 0, 0,
                                0, 0,-4, 0, 0,
                                0, 0, 1, 0, 0});
    default: break;
  }
  throw unsupported_order("printed_mask: no mask for these orders");
}
// clang-format on

}  // namespace detail

/// Outer product of the 1-D central difference stencils, sx(dx) * sy(dy);
/// an order of 0 contributes the identity.
inline Mask2D outer_product_mask(int mx, int my) {
  detail::require_mask_order(mx, my, "outer_product_mask");
  const auto stencil = [](int m) {
    return m == 0 ? std::vector<double>{1.0} : central_difference_mask(m).stencil();
  };
  const auto sx = stencil(mx);
  const auto sy = stencil(my);
  const int rx = static_cast<int>(sx.size() / 2);
  const int ry = static_cast<int>(sy.size() / 2);
  Mask2D m(detail::mask_size_for(mx + my));
  for (int dy = -ry; dy <= ry; ++dy)
    for (int dx = -rx; dx <= rx; ++dx)
      m.at(dx, dy) = sx[static_cast<std::size_t>(dx + rx)] * sy[static_cast<std::size_t>(dy + ry)];
  return m;
}

/// delta_{x^mx y^my} as tabulated (3x3 up to order 2, 5x5 for orders 3-4).
inline Mask2D cartesian_mask(int mx, int my) {
  detail::require_mask_order(mx, my, "cartesian_mask");
  return detail::printed_mask(mx, my);
}

/// Weights w_k of d_{x^k y^{m-k}}, k = 0..m, in the expansion of
/// (cos phi d_x + sin phi d_y)^m1 (-sin phi d_x + cos phi d_y)^m2.
inline std::vector<double> directional_weights(int m1, int m2, double phi) {
  detail::require_mask_order(m1, m2, "directional_weights");
  const double c = std::cos(phi);
  const double s = std::sin(phi);
  std::vector<double> p{1.0};  // p[k]: coefficient of d_x^k
  const auto multiply = [&p](double ax, double ay) {
    std::vector<double> q(p.size() + 1, 0.0);
    for (std::size_t k = 0; k < p.size(); ++k) {
      q[k + 1] += ax * p[k];
      q[k] += ay * p[k];
    }
    p = std::move(q);
  };
  for (int i = 0; i < m1; ++i) multiply(c, s);
  for (int i = 0; i < m2; ++i) multiply(-s, c);
  return p;
}

inline Mask2D directional_mask(int m1, int m2, double phi) {
  const auto w = directional_weights(m1, m2, phi);
  const int m = m1 + m2;
  Mask2D out(detail::mask_size_for(m));
  for (int k = 0; k <= m; ++k) {
    const double wk = w[static_cast<std::size_t>(k)];
    if (wk != 0.0) out += wk * cartesian_mask(k, m - k);
  }
  return out;
}

/// 2-D correlation with a small mask, same-size output.
inline Image2D apply_directional(const Image2D& img, const Mask2D& mask,
                                 const BoundaryPolicy& boundary = BoundaryPolicy::replicate()) {
  detail::require(!img.samples.empty(), "apply_directional: empty image");
  const auto fetch = [&](int ix, int iy) -> double {
    if (ix >= 0 && ix < img.width && iy >= 0 && iy < img.height) return img.at(ix, iy);
    if (boundary.kind == BoundaryPolicy::Kind::Analytic) return boundary.extension(ix - img.x0, iy - img.y0);
    const int ex = detail::extend_index(ix, img.width, boundary.kind);
    const int ey = detail::extend_index(iy, img.height, boundary.kind);
    return (ex < 0 || ey < 0) ? 0.0 : img.at(ex, ey);
  };
  const int r = mask.radius();
  Image2D out(img.width, img.height, img.x0, img.y0);
  for (int iy = 0; iy < img.height; ++iy) {
    for (int ix = 0; ix < img.width; ++ix) {
      double acc = 0.0;
      for (int dy = -r; dy <= r; ++dy)
        for (int dx = -r; dx <= r; ++dx) {
          const double m = mask.at(dx, dy);
          if (m != 0.0) acc += m * fetch(ix + dx, iy + dy);
        }
      out.at(ix, iy) = acc;
    }
  }
  return out;
}

/// Principal standard deviations and orientation of an affine Gaussian.
struct AffineParams {
  double sigma1 = 1.0;
  double sigma2 = 1.0;
  double phi = 0.0;

  static AffineParams make(double sigma1, double sigma2, double phi) {
    AffineParams p{sigma1, sigma2, std::fmod(phi, std::numbers::pi)};
    if (p.phi < 0.0) p.phi += std::numbers::pi;
    p.validate();
    return p;
  }

  void validate() const {
    if (!(sigma1 > 0.0 && sigma2 > 0.0) || !std::isfinite(sigma1) || !std::isfinite(sigma2))
      throw domain_error("AffineParams: sigma1 and sigma2 must be positive");
    if (!std::isfinite(phi)) throw domain_error("AffineParams: phi must be finite");
  }

  /// Covariance entries (Cxx, Cxy, Cyy).
  std::array<double, 3> covariance() const {
    const double c = std::cos(phi);
    const double s = std::sin(phi);
    const double l1 = sigma1 * sigma1;
    const double l2 = sigma2 * sigma2;
    return {l1 * c * c + l2 * s * s, (l1 - l2) * c * s, l1 * s * s + l2 * c * c};
  }
};

inline double affine_gaussian(double x, double y, const AffineParams& p) {
  p.validate();
  const double c = std::cos(p.phi);
  const double s = std::sin(p.phi);
  const double v1 = p.sigma1 * p.sigma1;
  const double v2 = p.sigma2 * p.sigma2;
  const double a = (v2 * x * x + v1 * y * y) * c * c + (v1 * x * x + v2 * y * y) * s * s - 2.0 * (v1 - v2) * c * s * x * y;
  return std::exp(-a / (2.0 * v1 * v2)) / (2.0 * std::numbers::pi * p.sigma1 * p.sigma2);
}

/// Half-widths (hx, hy) of the box around the ellipse at Mahalanobis radius
/// sqrt(-2 ln eps), outside of which the 2-D mass is at most eps.
inline std::pair<int, int> affine_support(const AffineParams& p, const TruncationPolicy& policy = {}) {
  p.validate();
  policy.validate();
  const auto cov = p.covariance();
  const double r = std::sqrt(-2.0 * std::log(policy.epsilon));
  return {std::max(1, static_cast<int>(std::ceil(r * std::sqrt(cov[0])))),
          std::max(1, static_cast<int>(std::ceil(r * std::sqrt(cov[2]))))};
}

inline Image2D sampled_affine_kernel(const AffineParams& p, const TruncationPolicy& policy = {}) {
  const auto [hx, hy] = affine_support(p, policy);
  Image2D out(2 * hx + 1, 2 * hy + 1, hx, hy);
  for (int y = -hy; y <= hy; ++y)
    for (int x = -hx; x <= hx; ++x) out.at(x + hx, y + hy) = affine_gaussian(x, y, p);
  return out;
}

namespace detail {

/// Integral of g_aff over [x0, x0 + h] x [y0, y0 + h] split into m x m
/// cells, 8 x 8 Gauss-Legendre points per cell.
inline double affine_cell_integral(const AffineParams& p, double x0, double y0, double h, int m) {
  using GL = boost::math::quadrature::gauss<double, 8>;
  static const auto nodes = [] {
    std::array<std::pair<double, double>, 8> out{};
    const auto& a = GL::abscissa();
    const auto& w = GL::weights();
    std::size_t i = 0;
    for (std::size_t j = 0; j < a.size(); ++j) {
      out[i++] = {a[j], w[j]};
      out[i++] = {-a[j], w[j]};
    }
    return out;
  }();
  const double cell = h / m;
  const double half = 0.5 * cell;
  double total = 0.0;
  for (int cy = 0; cy < m; ++cy) {
    const double ym = y0 + (cy + 0.5) * cell;
    for (int cx = 0; cx < m; ++cx) {
      const double xm = x0 + (cx + 0.5) * cell;
      double acc = 0.0;
      for (const auto& [ty, wy] : nodes)
        for (const auto& [tx, wx] : nodes) acc += wx * wy * affine_gaussian(xm + half * tx, ym + half * ty, p);
      total += acc * half * half;
    }
  }
  return total;
}

}  // namespace detail

/// Per-pixel integral of the affine Gaussian over each unit square. The
/// tensor rule is refined by halving cells until two estimates agree to
/// 1e-10.
inline Image2D integrated_affine_kernel(const AffineParams& p, const TruncationPolicy& policy = {}) {
  const auto [hx, hy] = affine_support(p, policy);
  Image2D out(2 * hx + 1, 2 * hy + 1, hx, hy);
  constexpr double kTol = 1e-10;
  constexpr int kMaxSplit = 64;
  for (int y = -hy; y <= hy; ++y) {
    for (int x = -hx; x <= hx; ++x) {
      double prev = detail::affine_cell_integral(p, x - 0.5, y - 0.5, 1.0, 1);
      for (int m = 2; m <= kMaxSplit; m *= 2) {
        const double next = detail::affine_cell_integral(p, x - 0.5, y - 0.5, 1.0, m);
        const bool done = std::abs(next - prev) <= kTol;
        prev = next;
        if (done) break;
      }
      out.at(x + hx, y + hy) = prev;
    }
  }
  return out;
}

}  // namespace scsp
