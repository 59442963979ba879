#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "hospstay/conditional.hpp"
#include "hospstay/error.hpp"
#include "test_support.hpp"

using namespace hospstay;
namespace ht = hospstay::testing;

namespace {

Observation aged(double time, bool event, bool cure, double age, Sex sex = Sex::Male) {
  auto o = ht::obs(time, event, cure);
  o.age = age;
  o.sex = sex;
  return o;
}

std::vector<double> epan_weights(const std::vector<Observation>& d, double age, double h) {
  std::vector<double> w;
  for (const auto& o : d) {
    const double u = (age - *o.age) / h;
    w.push_back(std::abs(u) < 1.0 ? 0.75 * (1.0 - u * u) : 0.0);
  }
  return w;
}

// ages in two clusters around 40 and 70; cluster membership by index parity
std::vector<Observation> clustered(std::mt19937_64& rng, int n, double jitter, bool cures_far_only) {
  auto d = ht::random_dataset(rng, n, 0.5, 0.25);
  std::uniform_real_distribution<double> off(-jitter, jitter);
  for (std::size_t i = 0; i < d.size(); ++i) {
    const bool near = i % 2 == 0;
    d[i].age = (near ? 40.0 : 70.0) + (jitter > 0 ? off(rng) : 0.0);
    d[i].sex = Sex::Male;
    if (cures_far_only && near && d[i].known_cure) d[i].known_cure = false;
  }
  return d;
}

std::vector<Observation> near_only(const std::vector<Observation>& d) {
  std::vector<Observation> out;
  for (const auto& o : d) if (*o.age < 55) out.push_back(o);
  return out;
}

const KernelConfig kEpan1{Kernel::Epanechnikov, 1.0};

}  // namespace

TEST_CASE("uniform ages reduce to unconditional estimators") {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 200; ++rep) {
    auto d = ht::random_dataset(rng, 3 + rep % 48, 0.5, 0.25);
    for (auto& o : d) o.age = 55.0;
    const CovariateQuery q{55.0, SexFilter::Any};
    for (auto kernel : {Kernel::Epanechnikov, Kernel::Gaussian}) {
      const KernelConfig cfg{kernel, 3.0};
      CHECK(ht::same_curve(beran_estimate(d, q, cfg), km_estimate(d), 1e-12));
      CHECK(ht::same_curve(npmcm_conditional_estimate(d, q, cfg), npmcm_estimate(d), 1e-12));
    }
  }
}

TEST_CASE("no known cures: conditional npmcm equals beran") {
  std::mt19937_64 rng(6);
  for (int rep = 0; rep < 200; ++rep) {
    auto d = ht::random_dataset(rng, 3 + rep % 48, 0.6, 0.0);
    const CovariateQuery q{45.0, SexFilter::Any};
    const KernelConfig cfg{Kernel::Gaussian, 15.0};
    CHECK(ht::same_curve(npmcm_conditional_estimate(d, q, cfg), beran_estimate(d, q, cfg), 1e-12));
  }
}

TEST_CASE("exact clusters match the subsample") {
  std::mt19937_64 rng(7);
  for (int rep = 0; rep < 200; ++rep) {
    auto d = clustered(rng, 6 + rep % 45, 0.0, false);
    const auto sub = near_only(d);
    const CovariateQuery q{40.0, SexFilter::Any};
    CHECK(ht::same_curve(beran_estimate(d, q, kEpan1), km_estimate(sub), 1e-12));
    CHECK(ht::same_curve(npmcm_conditional_estimate(d, q, kEpan1), npmcm_estimate(sub), 1e-12));
  }
}

TEST_CASE("jittered clusters: far cluster has no influence") {
  std::mt19937_64 rng(8);
  for (int rep = 0; rep < 200; ++rep) {
    auto d = clustered(rng, 6 + rep % 45, 0.1, true);
    const auto sub = near_only(d);
    const CovariateQuery q{40.0, SexFilter::Any};
    const auto full = npmcm_conditional_estimate(d, q, kEpan1);
    CHECK(ht::same_curve(full, npmcm_conditional_estimate(sub, q, kEpan1), 1e-12));
    CHECK(ht::same_curve(full, beran_estimate(sub, q, kEpan1), 1e-12));
    const auto w = epan_weights(d, 40.0, 1.0);
    for (double t : ht::probe_times(d)) {
      CHECK(full(t) == doctest::Approx(ht::weighted_bruteforce(d, w, t, true)).epsilon(1e-12));
    }
  }
}

TEST_CASE("weighted oracle agreement on random data") {
  std::mt19937_64 rng(9);
  for (int rep = 0; rep < 200; ++rep) {
    auto d = ht::random_dataset(rng, 3 + rep % 20, 0.5, 0.25);
    const double age = 20.0 + rep % 50;
    const double h = 25.0;
    const auto w = epan_weights(d, age, h);
    if (std::all_of(w.begin(), w.end(), [](double x) { return x == 0.0; })) continue;
    const CovariateQuery q{age, SexFilter::Any};
    const KernelConfig cfg{Kernel::Epanechnikov, h};
    const auto np = npmcm_conditional_estimate(d, q, cfg);
    const auto be = beran_estimate(d, q, cfg);
    CHECK(ht::well_formed(np));
    CHECK(ht::well_formed(be));
    for (double t : ht::probe_times(d)) {
      CHECK(np(t) == doctest::Approx(ht::weighted_bruteforce(d, w, t, true)).epsilon(1e-12));
      CHECK(be(t) == doctest::Approx(ht::weighted_bruteforce(d, w, t, false)).epsilon(1e-12));
      CHECK(np(t) >= be(t) - 1e-15);
    }
  }
}

TEST_CASE("single positive-weight observation") {
  std::vector<Observation> d{aged(6, true, false, 40), aged(3, false, false, 80), aged(9, true, false, 85)};
  const auto c = beran_estimate(d, {40.0, SexFilter::Any}, kEpan1);
  CHECK(c(5.9) == 1.0);
  CHECK(c(6.0) == 0.0);
}

TEST_CASE("errors") {
  std::vector<Observation> d{aged(6, true, false, 40), aged(3, false, false, 80)};
  CHECK_THROWS_WITH(beran_estimate(d, {60.0, SexFilter::Any}, kEpan1), "bandwidth too small for query point");
  std::vector<Observation> one{aged(6, true, false, 40, Sex::Male), aged(3, true, false, 41, Sex::Female)};
  CHECK_THROWS_AS(beran_estimate(one, {40.0, SexFilter::Male}, kEpan1), Error);
  std::vector<Observation> flat{aged(6, true, false, 50), aged(3, false, false, 50)};
  CHECK_THROWS_WITH(beran_estimate(flat, {50.0, SexFilter::Any}, KernelConfig{}),
                    "degenerate covariate; supply explicit bandwidth");
  auto no_age = d;
  no_age[1].age.reset();
  CHECK_THROWS_AS(beran_estimate(no_age, {40.0, SexFilter::Any}, kEpan1), Error);
}

TEST_CASE("four-observation example under uniform weights") {
  std::vector<Observation> d{aged(1, true, false, 50), aged(2, false, true, 50), aged(3, true, false, 50),
                             aged(4, false, false, 50)};
  const CovariateQuery q{50.0, SexFilter::Any};
  CHECK(npmcm_conditional_estimate(d, q, kEpan1).plateau() == doctest::Approx(0.5));
  CHECK(conditional_event_probability(d, q, kEpan1) == doctest::Approx(0.5));
  const auto est = conditional_latency(d, q, kEpan1);
  CHECK(est.p == doctest::Approx(0.5));
  CHECK(est.latency(1.0) == doctest::Approx(0.5));
  CHECK(est.latency.plateau() == 0.0);

  std::vector<Observation> all{aged(1, true, false, 50), aged(2, true, false, 50)};
  CHECK(conditional_event_probability(all, q, kEpan1) == 1.0);
  std::vector<Observation> none{aged(1, false, false, 50), aged(2, false, false, 50)};
  CHECK(conditional_event_probability(none, q, kEpan1) == 0.0);
  CHECK_THROWS_AS(conditional_latency(none, q, kEpan1), Error);
}

TEST_CASE("permutation invariance") {
  std::mt19937_64 rng(10);
  for (int rep = 0; rep < 100; ++rep) {
    auto d = ht::random_dataset(rng, 20, 0.5, 0.25, false);
    const CovariateQuery q{50.0, SexFilter::Any};
    const KernelConfig cfg{Kernel::Gaussian, 20.0};
    const auto a = npmcm_conditional_estimate(d, q, cfg);
    std::shuffle(d.begin(), d.end(), rng);
    CHECK(ht::same_curve(a, npmcm_conditional_estimate(d, q, cfg), 1e-12));
  }
}

TEST_CASE("sex stratification ignores the other sex") {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 100; ++rep) {
    auto d = ht::random_dataset(rng, 30, 0.5, 0.25);
    const CovariateQuery q{50.0, SexFilter::Male};
    const KernelConfig cfg{Kernel::Gaussian, {}};
    std::size_t males = 0;
    for (const auto& o : d) males += *o.sex == Sex::Male;
    if (males < 3) continue;
    std::vector<double> male_ages;
    for (const auto& o : d) if (*o.sex == Sex::Male) male_ages.push_back(*o.age);
    if (std::adjacent_find(male_ages.begin(), male_ages.end(), std::not_equal_to<>()) == male_ages.end()) continue;
    const auto a = npmcm_conditional_estimate(d, q, cfg);
    for (auto& o : d) {
      if (*o.sex == Sex::Female) {
        o.time += 3.0;
        o.age = *o.age / 2;
        o.event = !o.event;
        o.known_cure = false;
      }
    }
    CHECK(ht::same_curve(a, npmcm_conditional_estimate(d, q, cfg), 0.0));
  }
}

TEST_CASE("rule of thumb bandwidth") {
  std::vector<Observation> d{aged(1, true, false, 40), aged(2, true, false, 60)};
  const double sd = std::sqrt(200.0);
  CHECK(rule_of_thumb_bandwidth(d) == doctest::Approx(1.06 * sd * std::pow(2.0, -0.2)).epsilon(1e-14));
  std::vector<Observation> scaled{aged(1, true, false, 120), aged(2, true, false, 180)};
  CHECK(rule_of_thumb_bandwidth(scaled) == doctest::Approx(3.0 * rule_of_thumb_bandwidth(d)).epsilon(1e-14));
  std::vector<Observation> flat{aged(1, true, false, 50), aged(2, true, false, 50)};
  CHECK_THROWS_WITH(rule_of_thumb_bandwidth(flat), "degenerate covariate; supply explicit bandwidth");
}

TEST_CASE("kernel and filter parsing") {
  CHECK(parse_kernel("gaussian") == Kernel::Gaussian);
  CHECK(parse_kernel("epanechnikov") == Kernel::Epanechnikov);
  CHECK_FALSE(parse_kernel("box").has_value());
  CHECK(parse_sex_filter("any") == SexFilter::Any);
  CHECK(kernel_value(Kernel::Epanechnikov, 1.0) == 0.0);
  CHECK(kernel_value(Kernel::Epanechnikov, 0.0) == 0.75);
}
