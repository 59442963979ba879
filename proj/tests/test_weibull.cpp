#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "hospstay/error.hpp"
#include "hospstay/weibull.hpp"
#include "test_support.hpp"

using namespace hospstay;
namespace ht = hospstay::testing;

namespace {

std::vector<double> grid(int from, int to) {
  std::vector<double> ts;
  for (int t = from; t <= to; ++t) ts.push_back(t);
  return ts;
}

}  // namespace

TEST_CASE("survival function values") {
  CHECK(weibull_survival({1.0, 10.0}, 0.0) == 1.0);
  CHECK(weibull_survival({1.0, 10.0}, 10.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK(weibull_survival({2.0, 14.0}, 14.0) == doctest::Approx(0.367879441171).epsilon(1e-12));
  CHECK_THROWS_AS(validate(WeibullParams{0.0, 1.0}), Error);
  CHECK_THROWS_AS(validate(WeibullParams{1.0, -1.0}), Error);
}

TEST_CASE("inverse transform") {
  for (double k : {0.5, 1.0, 2.0, 3.7}) {
    CHECK(weibull_inverse({k, 12.0}, std::exp(-1.0)) == doctest::Approx(12.0).epsilon(1e-14));
  }
  CHECK(weibull_inverse({1.5, 12.0}, std::nextafter(1.0, 0.0)) < 1e-8);
  CHECK(weibull_inverse({1.5, 12.0}, std::nextafter(1.0, 0.0)) > 0.0);
}

TEST_CASE("sampling law of large numbers") {
  RandomStream stream(12345);
  const WeibullParams law{1.0, 10.0};
  const int n = 100000;
  double sum = 0.0;
  int beyond = 0;
  for (int i = 0; i < n; ++i) {
    const double x = weibull_sample(law, stream);
    sum += x;
    beyond += x > 10.0;
  }
  CHECK(std::abs(sum / n - 10.0) < 0.1);
  CHECK(std::abs(static_cast<double>(beyond) / n - std::exp(-1.0)) < 0.01);
}

TEST_CASE("self fit recovers generating parameters") {
  for (WeibullParams truth : {WeibullParams{1.0, 10.0}, WeibullParams{2.0, 14.0}}) {
    const auto report = fit_weibull(ht::sampled_weibull(truth, grid(1, 40)));
    CHECK(report.converged);
    CHECK(std::abs(report.params.shape - truth.shape) <= 1e-4);
    CHECK(std::abs(report.params.scale - truth.scale) <= 1e-3);
    CHECK(report.sse <= 1e-12);
  }
}

TEST_CASE("self fit on assorted grids") {
  for (WeibullParams truth : {WeibullParams{0.8, 5.0}, WeibullParams{1.5, 12.0}, WeibullParams{3.0, 20.0}}) {
    std::vector<double> ts;
    for (int i = 1; i <= 12; ++i) ts.push_back(truth.scale * 0.25 * i);
    const auto report = fit_weibull(ht::sampled_weibull(truth, ts));
    CHECK(std::abs(report.params.shape / truth.shape - 1.0) < 1e-3);
    CHECK(std::abs(report.params.scale / truth.scale - 1.0) < 1e-3);
  }
}

TEST_CASE("end-to-end recovery from censored data") {
  ht::CureDesign design;
  design.seed = 77;
  const auto data = ht::cure_data(design);
  const auto est = latency(npmcm_estimate(data));
  const auto report = fit_weibull(est.latency);
  CHECK(std::abs(report.params.shape - 1.5) <= 0.15);
  CHECK(std::abs(report.params.scale - 12.0) <= 1.0);
}

TEST_CASE("objective trace is non-increasing") {
  FitOptions options;
  options.trace = true;
  const auto report = fit_weibull(ht::sampled_weibull({1.3, 9.0}, grid(1, 30)), options);
  REQUIRE(report.trace.size() >= 2);
  for (std::size_t i = 1; i < report.trace.size(); ++i) CHECK(report.trace[i] <= report.trace[i - 1]);
}

TEST_CASE("re-encoding the same step function gives identical parameters") {
  ht::CureDesign design;
  design.n = 400;
  design.seed = 3;
  const auto curve = latency(npmcm_estimate(ht::cure_data(design))).latency;
  const auto a = fit_weibull(curve);

  std::stringstream ss;
  ss << "t,survival\n0,1.0\n";
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const double t = curve.jump_times()[i];
    const double v = curve.values()[i];
    ss << format_real(t) << ',' << format_real(v) << '\n';
    ss << format_real(t + 0.01) << ',' << format_real(v) << '\n';  // redundant row
  }
  ss << format_real(curve.max_time()) << ',' << format_real(curve.plateau()) << '\n';
  const auto b = fit_weibull(read_curve_csv(ss));
  CHECK(std::abs(a.params.shape - b.params.shape) <= 1e-10);
  CHECK(std::abs(a.params.scale - b.params.scale) <= 1e-10);
}

TEST_CASE("fit errors and warnings") {
  SurvivalCurve one({3.0}, {0.0}, 3.0);
  CHECK_THROWS_WITH(fit_weibull(one), "underdetermined fit");
  SurvivalCurve high({1.0, 2.0, 3.0}, {0.9, 0.8, 0.7}, 5.0);
  const auto report = fit_weibull(high);
  CHECK_FALSE(report.warnings.empty());
  const auto json = to_json(report);
  for (const char* key : {"\"shape\"", "\"scale\"", "\"sse\"", "\"iterations\"", "\"converged\""}) {
    CHECK(json.find(key) != std::string::npos);
  }
}

TEST_CASE("replication streams are distinct and reproducible") {
  auto a = RandomStream::for_replication(1, 0);
  auto b = RandomStream::for_replication(1, 0);
  auto c = RandomStream::for_replication(1, 1);
  const double x = a.uniform();
  CHECK(x == b.uniform());
  CHECK(x != c.uniform());
  RandomStream s(9);
  for (int i = 0; i < 1000; ++i) {
    const double u = s.uniform_open();
    CHECK((u > 0.0 && u < 1.0));
  }
}
