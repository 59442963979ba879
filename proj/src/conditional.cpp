#include "hospstay/conditional.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hospstay/error.hpp"

namespace hospstay {

std::optional<Kernel> parse_kernel(std::string_view name) {
  if (name == "epanechnikov") return Kernel::Epanechnikov;
  if (name == "gaussian") return Kernel::Gaussian;
  return std::nullopt;
}

std::optional<SexFilter> parse_sex_filter(std::string_view name) {
  if (name == "any") return SexFilter::Any;
  if (auto sex = parse_sex(name)) return *sex == Sex::Male ? SexFilter::Male : SexFilter::Female;
  return std::nullopt;
}

double kernel_value(Kernel kernel, double u) {
  switch (kernel) {
    case Kernel::Epanechnikov:
      return std::abs(u) < 1.0 ? 0.75 * (1.0 - u * u) : 0.0;
    case Kernel::Gaussian:
      return std::exp(-0.5 * u * u) / std::sqrt(2.0 * std::numbers::pi);
  }
  return 0.0;
}

double rule_of_thumb_bandwidth(std::span<const Observation> observations) {
  std::vector<double> ages;
  for (const auto& obs : observations) {
    if (!obs.age) fail(ErrorKind::Data, "observation without age in conditional estimate");
    ages.push_back(*obs.age);
  }
  if (ages.size() < 2) fail(ErrorKind::Data, "degenerate covariate; supply explicit bandwidth");
  const double n = static_cast<double>(ages.size());
  double mean = 0.0;
  for (double a : ages) mean += a;
  mean /= n;
  double ss = 0.0;
  for (double a : ages) ss += (a - mean) * (a - mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  if (!(sd > 0.0)) fail(ErrorKind::Data, "degenerate covariate; supply explicit bandwidth");
  return 1.06 * sd * std::pow(n, -0.2);
}

namespace {

std::vector<Observation> stratum(std::span<const Observation> observations, SexFilter sex) {
  std::vector<Observation> out;
  for (const auto& obs : observations) {
    validate(obs);
    if (sex == SexFilter::Any ||
        (obs.sex && (*obs.sex == Sex::Male) == (sex == SexFilter::Male))) {
      out.push_back(obs);
    }
  }
  if (out.size() < 2) fail(ErrorKind::Data, "stratum has fewer than 2 observations");
  return out;
}

SurvivalCurve weighted_product_limit(std::span<const Observation> observations,
                                     const CovariateQuery& query, const KernelConfig& config,
                                     bool cures_stay_at_risk) {
  if (!std::isfinite(query.age) || query.age < 0.0) {
    fail(ErrorKind::InvalidArgument, "query age must be finite and >= 0");
  }
  const auto subset = stratum(observations, query.sex);
  const double h = config.bandwidth ? *config.bandwidth : rule_of_thumb_bandwidth(subset);
  if (!(h > 0.0) || !std::isfinite(h)) fail(ErrorKind::InvalidArgument, "bandwidth must be > 0");

  const auto order = product_limit_order(subset);
  const std::size_t n = order.size();
  std::vector<double> weight(n);
  double total = 0.0;
  double max_time = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const auto& obs = subset[order[k]];
    if (!obs.age) fail(ErrorKind::Data, "observation without age in conditional estimate");
    weight[k] = kernel_value(config.kernel, (query.age - *obs.age) / h);
    total += weight[k];
    if (weight[k] > 0.0) max_time = std::max(max_time, obs.time);
  }
  if (!(total > 0.0)) fail(ErrorKind::Data, "bandwidth too small for query point");

  // at_or_after[k] = sum of weights from position k to the end.
  std::vector<double> at_or_after(n + 1, 0.0);
  for (std::size_t k = n; k-- > 0;) at_or_after[k] = at_or_after[k + 1] + weight[k];

  std::vector<double> jumps;
  std::vector<double> values;
  double s = 1.0;
  double cure_weight = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const auto& obs = subset[order[k]];
    if (cures_stay_at_risk && obs.known_cure) cure_weight += weight[k];
    if (!obs.event || weight[k] == 0.0) continue;
    s *= 1.0 - weight[k] / (at_or_after[k] + cure_weight);
    if (!jumps.empty() && jumps.back() == obs.time) {
      values.back() = s;
    } else {
      jumps.push_back(obs.time);
      values.push_back(s);
    }
  }
  return SurvivalCurve(std::move(jumps), std::move(values), max_time);
}

}  // namespace

SurvivalCurve beran_estimate(std::span<const Observation> observations,
                             const CovariateQuery& query, const KernelConfig& config) {
  return weighted_product_limit(observations, query, config, false);
}

SurvivalCurve npmcm_conditional_estimate(std::span<const Observation> observations,
                                         const CovariateQuery& query,
                                         const KernelConfig& config) {
  return weighted_product_limit(observations, query, config, true);
}

double conditional_event_probability(std::span<const Observation> observations,
                                     const CovariateQuery& query, const KernelConfig& config) {
  return event_probability(npmcm_conditional_estimate(observations, query, config));
}

CureModelEstimate conditional_latency(std::span<const Observation> observations,
                                      const CovariateQuery& query, const KernelConfig& config) {
  return latency(npmcm_conditional_estimate(observations, query, config));
}

}  // namespace hospstay
