#pragma once

// Discrete convolution of 1-D signals and separable 2-D images, plus the
// synthetic blob / edge / ridge generators used by the scale-selection runs.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "scsp/error.hpp"
#include "scsp/kernels.hpp"
#include "scsp/specfun.hpp"

namespace scsp {

/// Samples f(x) with x = i - origin for array index i.
struct Signal1D {
  std::vector<double> samples;
  int origin = 0;

  int size() const { return static_cast<int>(samples.size()); }
  double x_at(int i) const { return static_cast<double>(i - origin); }
};

/// Row-major image; pixel (ix, iy) sits at coordinates (ix - x0, iy - y0).
struct Image2D {
  int width = 0;
  int height = 0;
  std::vector<double> samples;
  int x0 = 0;
  int y0 = 0;

  Image2D() = default;
  Image2D(int w, int h, int ox = 0, int oy = 0, double fill = 0.0)
      : width(w), height(h), samples(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill), x0(ox), y0(oy) {
    detail::require(w > 0 && h > 0, "Image2D: width and height must be positive");
  }

  double& at(int ix, int iy) { return samples[static_cast<std::size_t>(iy) * static_cast<std::size_t>(width) + ix]; }
  double at(int ix, int iy) const {
    return samples[static_cast<std::size_t>(iy) * static_cast<std::size_t>(width) + ix];
  }

  /// Value at integer coordinates (x, y).
  double value(int x, int y) const {
    detail::require(contains(x, y), "Image2D: point outside image");
    return at(x + x0, y + y0);
  }

  bool contains(int x, int y) const {
    const int ix = x + x0;
    const int iy = y + y0;
    return ix >= 0 && ix < width && iy >= 0 && iy < height;
  }
};

struct BoundaryPolicy {
  enum class Kind { Replicate, Mirror, ZeroPad, Analytic };

  Kind kind = Kind::Replicate;
  /// Closed-form continuation f(x, y), consulted only outside the domain.
  std::function<double(double, double)> extension;

  static BoundaryPolicy replicate() { return {Kind::Replicate, {}}; }
  static BoundaryPolicy mirror() { return {Kind::Mirror, {}}; }
  static BoundaryPolicy zero_pad() { return {Kind::ZeroPad, {}}; }
  static BoundaryPolicy analytic(std::function<double(double, double)> f) {
    detail::require(static_cast<bool>(f), "BoundaryPolicy: analytic extension needs a function");
    return {Kind::Analytic, std::move(f)};
  }
  /// 1-D convenience: the continuation ignores y.
  static BoundaryPolicy analytic_1d(std::function<double(double)> f) {
    detail::require(static_cast<bool>(f), "BoundaryPolicy: analytic extension needs a function");
    return {Kind::Analytic, [g = std::move(f)](double x, double) { return g(x); }};
  }
};

inline std::string_view to_string(BoundaryPolicy::Kind k) {
  switch (k) {
    case BoundaryPolicy::Kind::Replicate: return "replicate";
    case BoundaryPolicy::Kind::Mirror: return "mirror";
    case BoundaryPolicy::Kind::ZeroPad: return "zero";
    case BoundaryPolicy::Kind::Analytic: return "analytic";
  }
  return "?";
}

namespace detail {

inline double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double acc = 0.0;
    for (double x : v) acc += x;
    return acc;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

/// Array index for j under Replicate / Mirror (reflect about the edge
/// samples, not repeating them); -1 for ZeroPad outside [0, n).
inline int extend_index(int j, int n, BoundaryPolicy::Kind kind) {
  if (j >= 0 && j < n) return j;
  switch (kind) {
    case BoundaryPolicy::Kind::Replicate: return std::clamp(j, 0, n - 1);
    case BoundaryPolicy::Kind::Mirror: {
      if (n == 1) return 0;
      const int period = 2 * (n - 1);
      int m = j % period;
      if (m < 0) m += period;
      return m < n ? m : period - m;
    }
    default: return -1;
  }
}

/// out[i] = sum_n k(n) src(i - n) for i in [0, count), where src(j) is
/// supplied by fetch for any integer j.
template <class Fetch>
void convolve_line(const DiscreteKernel1D& k, int count, Fetch&& fetch, double* out, std::vector<double>& scratch) {
  const int r = k.radius();
  const bool pairwise = k.size() > 32;
  scratch.resize(k.size());
  for (int i = 0; i < count; ++i) {
    if (pairwise) {
      for (int n = -r; n <= r; ++n) scratch[static_cast<std::size_t>(n + r)] = k[n] * fetch(i - n);
      out[i] = pairwise_sum(scratch);
    } else {
      double acc = 0.0;
      for (int n = -r; n <= r; ++n) acc += k[n] * fetch(i - n);
      out[i] = acc;
    }
  }
}

}  // namespace detail

inline Signal1D convolve_1d(const Signal1D& f, const DiscreteKernel1D& k,
                            const BoundaryPolicy& boundary = BoundaryPolicy::replicate()) {
  detail::require(!f.samples.empty(), "convolve_1d: empty signal");
  const int n = f.size();
  const auto fetch = [&](int j) -> double {
    if (j >= 0 && j < n) return f.samples[static_cast<std::size_t>(j)];
    if (boundary.kind == BoundaryPolicy::Kind::Analytic) return boundary.extension(f.x_at(j), 0.0);
    const int e = detail::extend_index(j, n, boundary.kind);
    return e < 0 ? 0.0 : f.samples[static_cast<std::size_t>(e)];
  };
  Signal1D out{std::vector<double>(f.samples.size()), f.origin};
  std::vector<double> scratch;
  detail::convolve_line(k, n, fetch, out.samples.data(), scratch);
  return out;
}

enum class PassOrder { RowsFirst, ColumnsFirst };

namespace detail {

/// Convolves along x with kx for every row, then along y with ky.  For the
/// analytic policy the first pass also fills the ry rows (or columns) beyond
/// each edge so the second pass sees an exact continuation.
inline Image2D separable_pass_xy(const Image2D& img, const DiscreteKernel1D& kx, const DiscreteKernel1D& ky,
                                 const BoundaryPolicy& boundary) {
  const int w = img.width;
  const int h = img.height;
  const bool analytic = boundary.kind == BoundaryPolicy::Kind::Analytic;
  const int pad = analytic ? ky.radius() : 0;
  const int hh = h + 2 * pad;

  auto source = [&](int ix, int iy) -> double {
    if (ix >= 0 && ix < w && iy >= 0 && iy < h) return img.at(ix, iy);
    if (analytic) return boundary.extension(ix - img.x0, iy - img.y0);
    const int ex = extend_index(ix, w, boundary.kind);
    const int ey = extend_index(iy, h, boundary.kind);
    return (ex < 0 || ey < 0) ? 0.0 : img.at(ex, ey);
  };

  std::vector<double> mid(static_cast<std::size_t>(w) * static_cast<std::size_t>(hh));
  std::vector<double> scratch;
  for (int r = 0; r < hh; ++r) {
    const int iy = r - pad;
    detail::convolve_line(kx, w, [&](int j) { return source(j, iy); },
                          mid.data() + static_cast<std::size_t>(r) * static_cast<std::size_t>(w), scratch);
  }

  Image2D out(w, h, img.x0, img.y0);
  std::vector<double> column(static_cast<std::size_t>(h));
  for (int ix = 0; ix < w; ++ix) {
    const auto fetch = [&](int iy) -> double {
      int r = iy + pad;
      if (!analytic) {
        const int e = extend_index(iy, h, boundary.kind);
        if (e < 0) return 0.0;
        r = e;
      }
      return mid[static_cast<std::size_t>(r) * static_cast<std::size_t>(w) + ix];
    };
    detail::convolve_line(ky, h, fetch, column.data(), scratch);
    for (int iy = 0; iy < h; ++iy) out.at(ix, iy) = column[static_cast<std::size_t>(iy)];
  }
  return out;
}

inline Image2D transpose(const Image2D& img) {
  Image2D out(img.height, img.width, img.y0, img.x0);
  for (int iy = 0; iy < img.height; ++iy)
    for (int ix = 0; ix < img.width; ++ix) out.at(iy, ix) = img.at(ix, iy);
  return out;
}

}  // namespace detail

/// Convolution with kx along x and ky along y.
inline Image2D separable_convolve_2d(const Image2D& img, const DiscreteKernel1D& kx, const DiscreteKernel1D& ky,
                                     const BoundaryPolicy& boundary = BoundaryPolicy::replicate(),
                                     PassOrder order = PassOrder::RowsFirst) {
  detail::require(!img.samples.empty(), "separable_convolve_2d: empty image");
  if (order == PassOrder::RowsFirst) return detail::separable_pass_xy(img, kx, ky, boundary);
  BoundaryPolicy swapped = boundary;
  if (boundary.kind == BoundaryPolicy::Kind::Analytic) {
    swapped.extension = [f = boundary.extension](double x, double y) { return f(y, x); };
  }
  return detail::transpose(detail::separable_pass_xy(detail::transpose(img), ky, kx, swapped));
}

namespace detail {

inline int require_extent(double s0, int extent, const char* what) {
  require_positive_scale(s0, what);
  const double need = std::max(4.0 * std::sqrt(s0), static_cast<double>(truncation_radius(ScaleParam(s0), 1e-8)));
  if (static_cast<double>(extent) < need) {
    throw domain_error(std::string(what) + ": extent " + std::to_string(extent) + " clips the model tails; need >= " +
                       std::to_string(static_cast<int>(std::ceil(need))));
  }
  return extent;
}

template <class F>
Image2D sample_grid(int extent, F&& f) {
  const int side = 2 * extent + 1;
  Image2D img(side, side, extent, extent);
  for (int y = -extent; y <= extent; ++y)
    for (int x = -extent; x <= extent; ++x) img.at(x + extent, y + extent) = f(x, y);
  return img;
}

}  // namespace detail

/// Smallest extent accepted by the generators for a model of scale s0.
inline int min_model_extent(ScaleParam s0) {
  const double s = s0.variance();
  detail::require_positive_scale(s, "min_model_extent");
  return std::max(static_cast<int>(std::ceil(4.0 * std::sqrt(s))), truncation_radius(s0, 1e-8));
}

/// g_2D(x, y; s0) on [-extent, extent]^2.
inline Image2D gaussian_blob(ScaleParam s0, int extent) {
  const double s = s0.variance();
  detail::require_extent(s, extent, "gaussian_blob");
  return detail::sample_grid(extent, [s](int x, int y) {
    return std::exp(-(static_cast<double>(x) * x + static_cast<double>(y) * y) / (2.0 * s)) /
           (2.0 * std::numbers::pi * s);
  });
}

/// erg(x; s0), constant along y.
inline Image2D diffuse_edge(ScaleParam s0, int extent) {
  const double s = s0.variance();
  detail::require_extent(s, extent, "diffuse_edge");
  return detail::sample_grid(extent, [s](int x, int) { return erg(x, s); });
}

/// g(x; s0), constant along y.
inline Image2D diffuse_ridge(ScaleParam s0, int extent) {
  const double s = s0.variance();
  detail::require_extent(s, extent, "diffuse_ridge");
  return detail::sample_grid(extent, [s](int x, int) { return gauss(x, s); });
}

}  // namespace scsp
