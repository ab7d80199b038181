#pragma once

// Experiment drivers behind the command-line runner. Each experiment turns an
// ExperimentConfig into CSV text: '#' metadata lines, a header row, then data
// rows with 17 significant digits.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "scsp/directional.hpp"
#include "scsp/kernels.hpp"
#include "scsp/metrics.hpp"
#include "scsp/parallel.hpp"
#include "scsp/scalesel.hpp"
#include "scsp/signal.hpp"

namespace scsp {

inline constexpr const char* kToolVersion = "scsp-experiments 1.0.0";

/// Invalid configuration; `field` names the offending option.
class config_error : public std::invalid_argument {
 public:
  config_error(std::string field, const std::string& msg)
      : std::invalid_argument(field + ": " + msg), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct ExperimentInfo {
  const char* name;
  const char* summary;
};

inline constexpr ExperimentInfo kExperiments[] = {
    {"kernel-dump", "coefficients of one smoothing or derivative kernel (kernel shape plots)"},
    {"smoothing-metrics", "E_norm, E_deltas, E_relscale, E_cascade over scale (smoothing-kernel error figures)"},
    {"derivative-metrics", "l1 norm, normalization error, spread, spread offset, cascade error of derivative kernels"},
    {"monomial-response", "P_alpha_k responses of derivative kernels to x^k (monomial-response figures)"},
    {"scale-selection", "selected scales and relative errors for blob/edge/ridge detectors (scale-selection figures)"},
    {"directional-dump", "directional derivative masks or their equivalent affine kernels (directional-derivative figures)"},
    {"affine-dump", "sampled or integrated affine Gaussian kernel (affine kernel figure)"},
};

inline std::string list_experiments() {
  std::string out = std::string(kToolVersion) + "\n\nexperiments:\n";
  for (const auto& e : kExperiments) {
    char line[256];
    std::snprintf(line, sizeof line, "  %-20s %s\n", e.name, e.summary);
    out += line;
  }
  return out;
}

inline std::string experiment_names() {
  std::string out;
  for (const auto& e : kExperiments) {
    if (!out.empty()) out += ", ";
    out += e.name;
  }
  return out;
}

/// Scale sweep min:max:count, log spaced unless `linear`.
struct SigmaRange {
  double min = 0.1;
  double max = 2.0;
  int count = 20;
  bool linear = false;

  std::vector<double> values() const {
    if (count == 1) return {min};
    if (!linear) return log_scale_grid(min, max, count);
    std::vector<double> v(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) v[static_cast<std::size_t>(i)] = min + (max - min) * i / (count - 1);
    v.back() = max;
    return v;
  }
};

/// Formats a double with 17 significant digits; non-finite values become SINGULAR.
inline std::string fmt(double v) {
  if (!std::isfinite(v)) return "SINGULAR";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : std::string("SINGULAR"); }

namespace detail {

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.emplace_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline double parse_double(const std::string& text, const std::string& field) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size() || !std::isfinite(v)) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw config_error(field, "not a number: '" + text + "'");
  }
}

inline int parse_int(const std::string& text, const std::string& field) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(text, &used);
    if (used != text.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw config_error(field, "not an integer: '" + text + "'");
  }
}

}  // namespace detail

/// Accepts "min:max:count", "min:max:count:lin" or a single scale value.
inline SigmaRange parse_sigma_range(const std::string& text, const std::string& field = "--sigma") {
  const auto parts = detail::split(text, ':');
  SigmaRange r;
  if (parts.size() == 1) {
    r.min = r.max = detail::parse_double(parts[0], field);
    r.count = 1;
  } else if (parts.size() == 3 || parts.size() == 4) {
    r.min = detail::parse_double(parts[0], field);
    r.max = detail::parse_double(parts[1], field);
    r.count = detail::parse_int(parts[2], field);
    if (parts.size() == 4) {
      if (parts[3] == "lin") r.linear = true;
      else if (parts[3] != "log") throw config_error(field, "spacing must be 'lin' or 'log', got '" + parts[3] + "'");
    }
    if (r.count < 2) throw config_error(field, "count must be >= 2");
    if (!(r.max > r.min)) throw config_error(field, "max must exceed min");
  } else {
    throw config_error(field, "expected min:max:count or a single value, got '" + text + "'");
  }
  if (!(r.min > 0.0)) throw config_error(field, "scales must be positive");
  return r;
}

inline std::string describe(const SigmaRange& r) {
  if (r.count == 1) return fmt(r.min);
  return fmt(r.min) + ":" + fmt(r.max) + ":" + std::to_string(r.count) + (r.linear ? ":lin" : ":log");
}

struct ExperimentConfig {
  std::string experiment;
  std::vector<std::string> families;  // empty selects the experiment default
  std::vector<std::string> detectors;
  std::vector<int> orders;
  std::vector<int> monomials;
  std::optional<SigmaRange> sigma;
  std::optional<SigmaRange> acc_sigma;
  std::optional<double> epsilon;
  std::string boundary = "replicate";
  std::string out;
  int perp_order = 0;
  double phi = 0.0;
  double sigma1 = 8.0;
  double sigma2 = 4.0;
  std::string kind;
};

namespace detail {

inline const std::vector<std::string>& expand_all(const std::vector<std::string>& v,
                                                  const std::vector<std::string>& all) {
  if (v.empty() || (v.size() == 1 && v[0] == "all")) return all;
  return v;
}

inline std::vector<std::string> names_of_smoothing() {
  std::vector<std::string> v;
  for (auto f : kAllKernelFamilies) v.emplace_back(to_string(f));
  return v;
}

inline std::vector<std::string> names_of_deriv() {
  std::vector<std::string> v;
  for (auto f : kAllDerivKernelFamilies) v.emplace_back(to_string(f));
  return v;
}

inline std::string joined(const std::vector<std::string>& v, const char* sep = ", ") {
  std::string out;
  for (const auto& s : v) {
    if (!out.empty()) out += sep;
    out += s;
  }
  return out;
}

inline KernelFamily need_smoothing_family(const std::string& name) {
  if (auto f = parse_kernel_family(name)) return *f;
  throw config_error("--families", "unknown smoothing family '" + name + "' (valid: " + joined(names_of_smoothing()) + ")");
}

inline DerivKernelFamily need_deriv_family(const std::string& name) {
  if (auto f = parse_deriv_kernel_family(name)) return *f;
  throw config_error("--families", "unknown derivative family '" + name + "' (valid: " + joined(names_of_deriv()) + ")");
}

inline BoundaryPolicy need_boundary(const std::string& name) {
  if (name == "replicate") return BoundaryPolicy::replicate();
  if (name == "mirror") return BoundaryPolicy::mirror();
  if (name == "zero") return BoundaryPolicy::zero_pad();
  throw config_error("--boundary", "unknown boundary policy '" + name + "' (valid: replicate, mirror, zero)");
}

inline TruncationPolicy need_policy(double eps) {
  try {
    TruncationPolicy p{eps};
    p.validate();
    return p;
  } catch (const domain_error& e) {
    throw config_error("--epsilon", e.what());
  }
}

inline std::vector<int> need_orders(const std::vector<int>& v, std::vector<int> dflt, int lo, int hi,
                                    const char* field) {
  if (v.empty()) return dflt;
  for (int a : v)
    if (a < lo || a > hi)
      throw config_error(field, "order " + std::to_string(a) + " outside [" + std::to_string(lo) + ", " +
                                    std::to_string(hi) + "]");
  return v;
}

struct Csv {
  std::vector<std::string> meta;
  std::string header;
  std::vector<std::string> rows;

  std::string str() const {
    std::string out;
    for (const auto& m : meta) out += "# " + m + "\n";
    out += header + "\n";
    for (const auto& r : rows) out += r + "\n";
    return out;
  }
};

inline Csv start_csv(const ExperimentConfig& c, const std::string& config_echo, const std::string& boundary,
                     double eps, const std::string& header) {
  Csv csv;
  csv.meta.push_back(kToolVersion);
  csv.meta.push_back("experiment: " + c.experiment);
  csv.meta.push_back("config: " + config_echo);
  csv.meta.push_back("boundary: " + boundary);
  csv.meta.push_back("epsilon: " + fmt(eps));
  csv.header = header;
  return csv;
}

/// (family, sigma, metric, value) rows sorted by family name, sigma, metric.
struct MetricRow {
  std::string family;
  double sigma;
  std::string metric;
  std::optional<double> value;
};

inline void add_sorted_metric_rows(Csv& csv, std::vector<MetricRow> rows) {
  std::sort(rows.begin(), rows.end(), [](const MetricRow& a, const MetricRow& b) {
    return std::tie(a.family, a.sigma, a.metric) < std::tie(b.family, b.sigma, b.metric);
  });
  for (const auto& r : rows) csv.rows.push_back(r.family + "," + fmt(r.sigma) + "," + r.metric + "," + fmt(r.value));
}

inline std::string run_kernel_dump(const ExperimentConfig& c) {
  if (c.families.size() > 1) throw config_error("--families", "kernel-dump takes exactly one family");
  const std::string name = c.families.empty() ? "disc" : c.families[0];
  const SigmaRange sr = c.sigma.value_or(SigmaRange{1.0, 1.0, 1});
  if (sr.count != 1) throw config_error("--sigma", "kernel-dump takes a single scale");
  const auto policy = need_policy(c.epsilon.value_or(1e-8));
  const int alpha = c.orders.empty() ? 0 : c.orders[0];
  if (c.orders.size() > 1) throw config_error("--order", "kernel-dump takes a single order");
  if (alpha < 0 || alpha > kMaxDerivOrder) throw config_error("--order", "order must lie in [0, 4]");
  const ScaleParam scale = ScaleParam::from_sigma(sr.min);

  DiscreteKernel1D k;
  if (alpha == 0) {
    k = smoothing_kernel(need_smoothing_family(name), scale, policy);
  } else {
    k = derivative_kernel(need_deriv_family(name), alpha, scale, policy);
  }
  Csv csv = start_csv(c, "family=" + name + ";sigma=" + fmt(sr.min) + ";order=" + std::to_string(alpha), "none",
                      policy.epsilon, "n,coeff");
  csv.meta.push_back("notes: convolution kernel T(n), L(x) = sum_n T(n) f(x - n); radius " +
                     std::to_string(k.radius()));
  for (int n = -k.radius(); n <= k.radius(); ++n) csv.rows.push_back(std::to_string(n) + "," + fmt(k[n]));
  return csv.str();
}

inline std::string run_smoothing_metrics(const ExperimentConfig& c) {
  const auto all = names_of_smoothing();
  const auto& names = expand_all(c.families, all);
  std::vector<KernelFamily> fams;
  for (const auto& n : names) fams.push_back(need_smoothing_family(n));
  const SigmaRange sr = c.sigma.value_or(SigmaRange{0.1, 2.0, 100});
  const auto sigmas = sr.values();
  const auto policy = need_policy(c.epsilon.value_or(1e-8));

  std::vector<MetricReport> reports(fams.size() * sigmas.size());
  parallel_for(reports.size(), [&](std::size_t i) {
    const double sigma = sigmas[i % sigmas.size()];
    reports[i] = smoothing_error_report(fams[i / sigmas.size()], ScaleParam::from_sigma(sigma), policy);
    reports[i].sigma = sigma;
  });

  Csv csv = start_csv(c, "families=" + joined(names, "|") + ";sigma=" + describe(sr), "none", policy.epsilon,
                      "family,sigma,metric,value");
  csv.meta.push_back("notes: normsampled normalized over the truncated support; cascade compares T(s)*T(s) with T(2s)");
  std::vector<MetricRow> rows;
  for (const auto& r : reports)
    for (const auto& [m, v] : r.values) rows.push_back({r.family, r.sigma, m, v});
  add_sorted_metric_rows(csv, std::move(rows));
  return csv.str();
}

inline std::string run_derivative_metrics(const ExperimentConfig& c) {
  const auto all = names_of_deriv();
  const auto& names = expand_all(c.families, all);
  std::vector<DerivKernelFamily> fams;
  for (const auto& n : names) fams.push_back(need_deriv_family(n));
  const auto orders = need_orders(c.orders, {1, 2, 3, 4}, 1, kMaxDerivOrder, "--order");
  const SigmaRange sr = c.sigma.value_or(SigmaRange{0.1, 2.0, 100});
  const auto sigmas = sr.values();
  const auto policy = need_policy(c.epsilon.value_or(1e-8));

  const std::size_t per_family = orders.size() * sigmas.size();
  std::vector<MetricReport> reports(fams.size() * per_family);
  std::vector<int> report_alpha(reports.size());
  parallel_for(reports.size(), [&](std::size_t i) {
    const auto f = fams[i / per_family];
    const int alpha = orders[(i % per_family) / sigmas.size()];
    report_alpha[i] = alpha;
    const double sigma = sigmas[i % sigmas.size()];
    reports[i] = derivative_error_report(f, alpha, ScaleParam::from_sigma(sigma), policy);
    reports[i].sigma = sigma;
  });

  std::string smoothers;
  for (auto f : fams)
    smoothers += std::string(smoothers.empty() ? "" : " ") + std::string(to_string(f)) + "->" +
                 std::string(to_string(natural_smoother(f)));
  Csv csv = start_csv(c, "families=" + joined(names, "|") + ";orders=" + [&] {
    std::string o;
    for (int a : orders) o += (o.empty() ? "" : "|") + std::to_string(a);
    return o;
  }() + ";sigma=" + describe(sr), "none", policy.epsilon, "family,sigma,metric,value");
  csv.meta.push_back("notes: metric suffix _<alpha> is the derivative order; cascade smoothers " + smoothers);
  std::vector<MetricRow> rows;
  for (std::size_t i = 0; i < reports.size(); ++i)
    for (const auto& [m, v] : reports[i].values)
      rows.push_back({reports[i].family, reports[i].sigma, m + "_" + std::to_string(report_alpha[i]), v});
  add_sorted_metric_rows(csv, std::move(rows));
  return csv.str();
}

inline std::string run_monomial_response(const ExperimentConfig& c) {
  const auto all = names_of_deriv();
  const auto& names = expand_all(c.families, all);
  std::vector<DerivKernelFamily> fams;
  for (const auto& n : names) fams.push_back(need_deriv_family(n));
  const auto orders = need_orders(c.orders, {1, 2, 3, 4}, 0, kMaxDerivOrder, "--order");
  const auto monos = need_orders(c.monomials, {0, 1, 2, 3, 4}, 0, kMaxDerivOrder, "--monomial");
  const SigmaRange sr = c.sigma.value_or(SigmaRange{0.1, 2.0, 50});
  const auto sigmas = sr.values();
  const auto policy = need_policy(c.epsilon.value_or(kProbeEpsilon));

  struct Cell {
    std::size_t f;
    int alpha, k;
    double sigma;
  };
  std::vector<Cell> cells;
  for (std::size_t f = 0; f < fams.size(); ++f)
    for (int a : orders)
      for (int k : monos)
        for (double s : sigmas) cells.push_back({f, a, k, s});
  std::vector<double> values(cells.size());
  parallel_for(cells.size(), [&](std::size_t i) {
    const auto& cl = cells[i];
    values[i] = monomial_response(fams[cl.f], cl.alpha, cl.k, ScaleParam::from_sigma(cl.sigma), policy);
  });

  Csv csv = start_csv(c, "families=" + joined(names, "|") + ";sigma=" + describe(sr), "analytic", policy.epsilon,
                      "family,sigma,metric,value");
  csv.meta.push_back("notes: P_<alpha>_<k> is the order-alpha kernel applied to x^k at x = 0; alpha 0 is the smoother");
  std::vector<MetricRow> rows;
  for (std::size_t i = 0; i < cells.size(); ++i)
    rows.push_back({names[cells[i].f], cells[i].sigma,
                    "P_" + std::to_string(cells[i].alpha) + "_" + std::to_string(cells[i].k), values[i]});
  add_sorted_metric_rows(csv, std::move(rows));
  return csv.str();
}

inline std::string run_scale_selection(const ExperimentConfig& c) {
  std::vector<std::string> all_det;
  for (auto d : kAllDetectors) all_det.emplace_back(to_string(d));
  const auto& det_names = expand_all(c.detectors, all_det);
  std::vector<Detector> dets;
  for (const auto& n : det_names) {
    auto d = parse_detector(n);
    if (!d) throw config_error("--detector", "unknown detector '" + n + "' (valid: " + joined(all_det) + ")");
    dets.push_back(*d);
  }
  std::vector<std::string> all_src = names_of_deriv();
  all_src.push_back("continuous");
  const std::vector<std::string> dflt{"sampled", "integrated", "disc"};
  const auto& src_names = c.families.empty() ? dflt : expand_all(c.families, all_src);
  std::vector<ResponseSource> srcs;
  for (const auto& n : src_names) {
    if (n == "continuous") srcs.emplace_back(ContinuousTheory{});
    else if (auto f = parse_deriv_kernel_family(n)) srcs.emplace_back(*f);
    else throw config_error("--families", "unknown family '" + n + "' (valid: " + joined(all_src) + ")");
  }
  const SigmaRange ref = c.sigma.value_or(SigmaRange{0.1, 4.0, 50});
  const SigmaRange acc = c.acc_sigma.value_or(SigmaRange{0.1, 6.0, 80});
  if (ref.count < 1) throw config_error("--sigma", "need at least one reference scale");
  if (acc.count < 3) throw config_error("--acc-sigma", "need at least three accumulation scales");
  const auto refs = ref.values();
  const auto accs = acc.values();
  const auto policy = need_policy(c.epsilon.value_or(1e-8));
  const BoundaryPolicy boundary = need_boundary(c.boundary);

  struct Combo {
    Detector d;
    ResponseSource src;
    std::vector<KernelSet> kernels;
  };
  std::vector<Combo> combos;
  for (auto d : dets)
    for (const auto& s : srcs) combos.push_back({d, s, {}});
  parallel_for(combos.size(), [&](std::size_t i) {
    if (const auto* f = std::get_if<DerivKernelFamily>(&combos[i].src))
      combos[i].kernels = kernel_sets(*f, accs, detail::detector_max_order(combos[i].d), policy);
  });

  const std::size_t per = refs.size();
  std::vector<ScaleSelectionRow> rows(combos.size() * per);
  parallel_for(rows.size(), [&](std::size_t i) {
    const auto& cb = combos[i / per];
    const double sigma_ref = refs[i % per];
    if (std::holds_alternative<ContinuousTheory>(cb.src)) {
      rows[i] = scale_selection_cell(cb.d, cb.src, sigma_ref, accs);
      return;
    }
    const Image2D img = feature_image(feature_model(cb.d), ScaleParam::from_sigma(sigma_ref),
                                      experiment_extent(sigma_ref, accs.back()));
    ScaleSignature sig{accs, {}, 0, 0};
    for (const auto& ks : cb.kernels) sig.responses.push_back(detector_response_at(img, cb.d, 0, 0, ks, boundary));
    const ScaleEstimate est = select_scale(sig, detector_polarity(cb.d), sigma_ref);
    rows[i] = {sigma_ref, est.sigma_hat, relative_scale_error(est.sigma_hat, sigma_ref), est.kind};
  });

  Csv csv = start_csv(c,
                      "detectors=" + joined(det_names, "|") + ";families=" + joined(src_names, "|") +
                          ";sigma=" + describe(ref) + ";acc_sigma=" + describe(acc),
                      c.boundary, policy.epsilon, "detector,family,sigma_ref,sigma_hat,rel_error,extremum_kind");
  csv.meta.push_back(
      "notes: signature at the model center; extremum nearest sigma_ref refined by a parabola in log sigma; "
      "gamma laplacian=1 dethessian=1 gradmag=0.5 ridge=0.75");
  struct Out {
    std::string det, fam;
    double sigma_ref;
    std::string line;
  };
  std::vector<Out> outs;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& cb = combos[i / per];
    const std::string dn(to_string(cb.d));
    const std::string fn = to_string(cb.src);
    const auto& r = rows[i];
    outs.push_back({dn, fn, r.sigma_ref,
                    dn + "," + fn + "," + fmt(r.sigma_ref) + "," + fmt(r.sigma_hat) + "," + fmt(r.rel_error) + "," +
                        std::string(to_string(r.kind))});
  }
  std::sort(outs.begin(), outs.end(),
            [](const Out& a, const Out& b) { return std::tie(a.det, a.fam, a.sigma_ref) < std::tie(b.det, b.fam, b.sigma_ref); });
  for (const auto& o : outs) csv.rows.push_back(o.line);
  return csv.str();
}

inline void add_grid_rows(Csv& csv, const Image2D& img) {
  for (int iy = img.height - 1; iy >= 0; --iy)
    for (int ix = 0; ix < img.width; ++ix)
      csv.rows.push_back(std::to_string(ix - img.x0) + "," + std::to_string(iy - img.y0) + "," + fmt(img.at(ix, iy)));
}

inline AffineParams need_affine(const ExperimentConfig& c) {
  try {
    return AffineParams::make(c.sigma1, c.sigma2, c.phi);
  } catch (const domain_error& e) {
    throw config_error("--sigma1/--sigma2/--phi", e.what());
  }
}

inline std::string run_directional_dump(const ExperimentConfig& c) {
  if (c.orders.size() > 1) throw config_error("--order", "directional-dump takes a single order");
  const int m1 = c.orders.empty() ? 1 : c.orders[0];
  const int m2 = c.perp_order;
  if (m1 < 0 || m2 < 0 || m1 + m2 < 1 || m1 + m2 > kMaxDerivOrder)
    throw config_error("--order/--perp", "need 1 <= order + perp <= 4");
  const std::string kind = c.kind.empty() ? "mask" : c.kind;
  const Mask2D mask = directional_mask(m1, m2, c.phi);
  const std::string echo = "order=" + std::to_string(m1) + ";perp=" + std::to_string(m2) + ";phi=" + fmt(c.phi) +
                           ";kind=" + kind;
  if (kind == "mask") {
    Csv csv = start_csv(c, echo, "none", 0.0, "x,y,value");
    csv.meta.push_back("notes: correlation mask, out(x,y) = sum M(dx,dy) f(x+dx,y+dy); y points up");
    Image2D img(mask.size(), mask.size(), mask.radius(), mask.radius());
    for (int dy = -mask.radius(); dy <= mask.radius(); ++dy)
      for (int dx = -mask.radius(); dx <= mask.radius(); ++dx)
        img.at(dx + mask.radius(), dy + mask.radius()) = mask.at(dx, dy);
    add_grid_rows(csv, img);
    return csv.str();
  }
  if (kind != "kernel") throw config_error("--kind", "directional-dump kind must be 'mask' or 'kernel'");
  const AffineParams p = need_affine(c);
  const auto policy = need_policy(c.epsilon.value_or(1e-8));
  const BoundaryPolicy boundary = need_boundary(c.boundary);
  const Image2D k = sampled_affine_kernel(p, policy);
  Csv csv = start_csv(c, echo + ";sigma1=" + fmt(p.sigma1) + ";sigma2=" + fmt(p.sigma2), c.boundary, policy.epsilon,
                      "x,y,value");
  csv.meta.push_back("notes: directional mask applied to the sampled affine Gaussian kernel");
  add_grid_rows(csv, apply_directional(k, mask, boundary));
  return csv.str();
}

inline std::string run_affine_dump(const ExperimentConfig& c) {
  const AffineParams p = need_affine(c);
  const auto policy = need_policy(c.epsilon.value_or(1e-8));
  const std::string kind = c.kind.empty() ? "sampled" : c.kind;
  Image2D k;
  if (kind == "sampled") k = sampled_affine_kernel(p, policy);
  else if (kind == "integrated") k = integrated_affine_kernel(p, policy);
  else throw config_error("--kind", "affine-dump kind must be 'sampled' or 'integrated'");
  Csv csv = start_csv(c,
                      "sigma1=" + fmt(p.sigma1) + ";sigma2=" + fmt(p.sigma2) + ";phi=" + fmt(p.phi) + ";kind=" + kind,
                      "none", policy.epsilon, "x,y,value");
  csv.meta.push_back("notes: support box at Mahalanobis radius sqrt(-2 ln epsilon)");
  add_grid_rows(csv, k);
  return csv.str();
}

}  // namespace detail

/// Runs one experiment and returns the CSV text.
inline std::string run_experiment(const ExperimentConfig& c) {
  if (c.epsilon && !(*c.epsilon > 0.0 && *c.epsilon < 0.1))
    throw config_error("--epsilon", "must lie in (0, 0.1)");
  if (c.experiment == "kernel-dump") return detail::run_kernel_dump(c);
  if (c.experiment == "smoothing-metrics") return detail::run_smoothing_metrics(c);
  if (c.experiment == "derivative-metrics") return detail::run_derivative_metrics(c);
  if (c.experiment == "monomial-response") return detail::run_monomial_response(c);
  if (c.experiment == "scale-selection") return detail::run_scale_selection(c);
  if (c.experiment == "directional-dump") return detail::run_directional_dump(c);
  if (c.experiment == "affine-dump") return detail::run_affine_dump(c);
  throw config_error("--experiment", "unknown experiment '" + c.experiment + "' (valid: " + experiment_names() + ")");
}

}  // namespace scsp
