#include <cmath>
#include <cstdlib>
#include <limits>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "scsp/experiments.hpp"

using namespace scsp;

namespace {

struct Parsed {
  std::vector<std::string> meta;
  std::string header;
  std::vector<std::vector<std::string>> rows;
};

Parsed parse(const std::string& csv) {
  Parsed p;
  std::istringstream in(csv);
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("# ", 0) == 0) {
      EXPECT_TRUE(p.header.empty()) << "metadata after header";
      p.meta.push_back(line.substr(2));
    } else if (p.header.empty()) {
      p.header = line;
    } else {
      p.rows.push_back(detail::split(line, ','));
    }
  }
  return p;
}

ExperimentConfig cfg(const std::string& name) {
  ExperimentConfig c;
  c.experiment = name;
  return c;
}

// Every data field is an integer, a finite 17-digit number, SINGULAR, or a name.
void expect_well_formed(const Parsed& p) {
  const auto columns = detail::split(p.header, ',').size();
  for (const auto& r : p.rows) {
    ASSERT_EQ(r.size(), columns);
    for (const auto& f : r) {
      EXPECT_FALSE(f.empty());
      EXPECT_EQ(f.find("nan"), std::string::npos);
      EXPECT_EQ(f.find("inf"), std::string::npos);
    }
  }
}

void set_threads(const char* v) {
  if (v) setenv("SCSP_THREADS", v, 1);
  else unsetenv("SCSP_THREADS");
}

}  // namespace

TEST(Catalog, ListsAllExperiments) {
  const auto text = list_experiments();
  for (const char* n : {"kernel-dump", "smoothing-metrics", "derivative-metrics", "monomial-response", "scale-selection",
                        "directional-dump", "affine-dump"})
    EXPECT_NE(text.find(n), std::string::npos) << n;
  EXPECT_NE(text.find(kToolVersion), std::string::npos);
}

TEST(Catalog, UnknownExperimentNamesValidOnes) {
  try {
    run_experiment(cfg("frobnicate"));
    FAIL() << "no error";
  } catch (const config_error& e) {
    EXPECT_EQ(e.field(), "--experiment");
    EXPECT_NE(std::string(e.what()).find("smoothing-metrics"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("frobnicate"), std::string::npos);
  }
}

TEST(Format, SeventeenDigitsAndSingular) {
  EXPECT_EQ(fmt(0.1), "0.10000000000000001");
  EXPECT_EQ(fmt(2.0), "2");
  EXPECT_EQ(fmt(std::numeric_limits<double>::quiet_NaN()), "SINGULAR");
  EXPECT_EQ(fmt(std::numeric_limits<double>::infinity()), "SINGULAR");
  EXPECT_EQ(fmt(std::optional<double>{}), "SINGULAR");
  EXPECT_EQ(std::stod(fmt(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(SigmaRange, Parsing) {
  auto r = parse_sigma_range("0.1:2:100");
  EXPECT_EQ(r.count, 100);
  EXPECT_FALSE(r.linear);
  auto v = r.values();
  EXPECT_EQ(v.front(), 0.1);
  EXPECT_EQ(v.back(), 2.0);
  EXPECT_NEAR(v[1] / v[0], v[99] / v[98], 1e-12);
  r = parse_sigma_range("1:3:5:lin");
  EXPECT_EQ(r.values(), (std::vector<double>{1.0, 1.5, 2.0, 2.5, 3.0}));
  r = parse_sigma_range("1.5");
  EXPECT_EQ(r.values(), std::vector<double>{1.5});
  for (const char* bad : {"0:1:5", "1:0.5:5", "1:2:1", "1:2", "a:2:3", "1:2:3:cubic", "-1", "1:2:x"})
    EXPECT_THROW(parse_sigma_range(bad), config_error) << bad;
}

TEST(SmoothingMetrics, DiscAnalogueRowsAreExact) {
  auto c = cfg("smoothing-metrics");
  c.families = {"all"};
  c.sigma = parse_sigma_range("0.1:2:100");
  const auto p = parse(run_experiment(c));
  EXPECT_EQ(p.header, "family,sigma,metric,value");
  EXPECT_EQ(p.meta[0], kToolVersion);
  EXPECT_EQ(p.meta[1], "experiment: smoothing-metrics");
  EXPECT_EQ(p.meta[2].rfind("config: ", 0), 0u);
  EXPECT_EQ(p.meta[3].rfind("boundary: ", 0), 0u);
  EXPECT_EQ(p.meta[4], "epsilon: 1e-08");
  expect_well_formed(p);
  EXPECT_EQ(p.rows.size(), 4u * 100u * 4u);
  int disc_rows = 0;
  for (const auto& r : p.rows)
    if (r[0] == "disc" && r[2] == "E_deltas") {
      EXPECT_LT(std::abs(std::stod(r[3])), 1e-8) << r[1];
      ++disc_rows;
    }
  EXPECT_EQ(disc_rows, 100);
}

TEST(SmoothingMetrics, RowsSortedByFamilySigmaMetric) {
  auto c = cfg("smoothing-metrics");
  c.families = {"sampled", "disc"};
  c.sigma = parse_sigma_range("0.5:1:3");
  const auto p = parse(run_experiment(c));
  for (std::size_t i = 1; i < p.rows.size(); ++i) {
    const auto& a = p.rows[i - 1];
    const auto& b = p.rows[i];
    EXPECT_LE(std::make_tuple(a[0], std::stod(a[1]), a[2]), std::make_tuple(b[0], std::stod(b[1]), b[2]));
  }
  EXPECT_EQ(p.rows.front()[0], "disc");
}

TEST(MonomialResponse, DiscSecondOrderIsTwo) {
  auto c = cfg("monomial-response");
  c.families = {"disc"};
  c.orders = {2};
  c.monomials = {2};
  c.sigma = parse_sigma_range("0.1:2:50");
  const auto p = parse(run_experiment(c));
  expect_well_formed(p);
  ASSERT_EQ(p.rows.size(), 50u);
  for (const auto& r : p.rows) {
    EXPECT_EQ(r[2], "P_2_2");
    EXPECT_NEAR(std::stod(r[3]), 2.0, 1e-8);
  }
}

TEST(DerivativeMetrics, SuffixedMetricsAndValues) {
  auto c = cfg("derivative-metrics");
  c.families = {"sampled"};
  c.orders = {2};
  c.sigma = parse_sigma_range("2");
  const auto p = parse(run_experiment(c));
  expect_well_formed(p);
  std::set<std::string> metrics;
  for (const auto& r : p.rows) metrics.insert(r[2]);
  EXPECT_EQ(metrics, (std::set<std::string>{"E_cascade_2", "E_norm_2", "l1_norm_2", "spread_2", "spread_offset_2"}));
  for (const auto& r : p.rows)
    if (r[2] == "E_norm_2") {
      EXPECT_NEAR(std::stod(r[3]), *derivative_error_report(DerivKernelFamily::SampledDeriv, 2, ScaleParam(4.0)).get("E_norm"),
                  1e-15);
    }
}

TEST(ScaleSelection, FiftyRowsWithDocumentedColumns) {
  auto c = cfg("scale-selection");
  c.detectors = {"laplacian"};
  c.families = {"sampled"};
  const auto p = parse(run_experiment(c));
  expect_well_formed(p);
  EXPECT_EQ(p.header, "detector,family,sigma_ref,sigma_hat,rel_error,extremum_kind");
  ASSERT_EQ(p.rows.size(), 50u);
  EXPECT_EQ(p.rows.front()[2], "0.10000000000000001");
  EXPECT_EQ(p.rows.back()[2], "4");
  for (const auto& r : p.rows) {
    EXPECT_EQ(r[0], "laplacian");
    EXPECT_EQ(r[1], "sampled");
    EXPECT_TRUE(r[5] == "interior" || r[5] == "boundary");
    EXPECT_NEAR(std::stod(r[4]), std::stod(r[3]) / std::stod(r[2]) - 1.0, 1e-14);
  }
}

TEST(ScaleSelection, MatchesLibraryCells) {
  auto c = cfg("scale-selection");
  c.detectors = {"ridge", "gradmag"};
  c.families = {"continuous", "hybrid-integrated"};
  c.sigma = parse_sigma_range("0.5:3:4");
  const auto p = parse(run_experiment(c));
  ASSERT_EQ(p.rows.size(), 16u);
  const auto acc = kAccumulationGrid.grid();
  for (const auto& r : p.rows) {
    const Detector d = *parse_detector(r[0]);
    const ResponseSource src = r[1] == "continuous" ? ResponseSource{ContinuousTheory{}}
                                                    : ResponseSource{*parse_deriv_kernel_family(r[1])};
    const auto cell = scale_selection_cell(d, src, std::stod(r[2]), acc);
    EXPECT_EQ(r[3], fmt(cell.sigma_hat)) << r[0] << " " << r[1] << " " << r[2];
  }
  // Sorted by detector, then family, then sigma_ref.
  EXPECT_EQ(p.rows.front()[0], "gradmag");
  EXPECT_EQ(p.rows.front()[1], "continuous");
}

TEST(Dumps, KernelDirectionalAffine) {
  auto k = cfg("kernel-dump");
  k.families = {"integrated"};
  k.orders = {1};
  k.sigma = parse_sigma_range("1");
  auto p = parse(run_experiment(k));
  EXPECT_EQ(p.header, "n,coeff");
  const auto ker = derivative_kernel(DerivKernelFamily::IntegratedDeriv, 1, ScaleParam(1.0));
  ASSERT_EQ(p.rows.size(), ker.size());
  EXPECT_EQ(p.rows[static_cast<std::size_t>(ker.radius() + 1)][1], fmt(ker[1]));

  auto d = cfg("directional-dump");
  d.orders = {1};
  d.perp_order = 1;
  d.phi = 0.0;
  p = parse(run_experiment(d));
  ASSERT_EQ(p.rows.size(), 9u);
  EXPECT_EQ(p.rows[0], (std::vector<std::string>{"-1", "1", "-0.25"}));  // top-left, y up
  d.kind = "kernel";
  d.sigma1 = 3;
  d.sigma2 = 2;
  p = parse(run_experiment(d));
  expect_well_formed(p);
  EXPECT_GT(p.rows.size(), 100u);

  auto a = cfg("affine-dump");
  a.sigma1 = 2;
  a.sigma2 = 1;
  a.phi = std::numbers::pi / 6;
  a.kind = "integrated";
  p = parse(run_experiment(a));
  double sum = 0;
  for (const auto& r : p.rows) sum += std::stod(r[2]);
  EXPECT_NEAR(sum, 1.0, 1e-6);
}

TEST(ConfigErrors, NameTheField) {
  auto expect_field = [](ExperimentConfig c, const std::string& field) {
    try {
      run_experiment(c);
      ADD_FAILURE() << "no error for " << field;
    } catch (const config_error& e) {
      EXPECT_EQ(e.field(), field) << e.what();
    }
  };
  auto c = cfg("smoothing-metrics");
  c.families = {"gaussian"};
  expect_field(c, "--families");
  c = cfg("derivative-metrics");
  c.orders = {5};
  expect_field(c, "--order");
  c = cfg("smoothing-metrics");
  c.epsilon = 0.5;
  expect_field(c, "--epsilon");
  c = cfg("scale-selection");
  c.detectors = {"harris"};
  expect_field(c, "--detector");
  c = cfg("scale-selection");
  c.boundary = "wrap";
  expect_field(c, "--boundary");
  c = cfg("affine-dump");
  c.kind = "fancy";
  expect_field(c, "--kind");
  c = cfg("affine-dump");
  c.sigma1 = -1;
  expect_field(c, "--sigma1/--sigma2/--phi");
  c = cfg("kernel-dump");
  c.sigma = parse_sigma_range("1:2:3");
  expect_field(c, "--sigma");
  c = cfg("monomial-response");
  c.monomials = {7};
  expect_field(c, "--monomial");
}

TEST(Determinism, IdenticalAcrossRunsAndThreadCounts) {
  std::vector<ExperimentConfig> cs;
  auto c = cfg("smoothing-metrics");
  c.sigma = parse_sigma_range("0.1:2:30");
  cs.push_back(c);
  c = cfg("derivative-metrics");
  c.sigma = parse_sigma_range("0.1:2:10");
  cs.push_back(c);
  c = cfg("monomial-response");
  c.sigma = parse_sigma_range("0.1:2:10");
  cs.push_back(c);
  c = cfg("scale-selection");
  c.sigma = parse_sigma_range("0.3:3:6");
  cs.push_back(c);
  const char* saved = std::getenv("SCSP_THREADS");
  const std::string saved_value = saved ? saved : "";
  for (const auto& e : cs) {
    set_threads("1");
    const auto one = run_experiment(e);
    set_threads("7");
    const auto seven = run_experiment(e);
    const auto again = run_experiment(e);
    EXPECT_EQ(one, seven) << e.experiment;
    EXPECT_EQ(seven, again) << e.experiment;
  }
  set_threads(saved ? saved_value.c_str() : nullptr);
}
