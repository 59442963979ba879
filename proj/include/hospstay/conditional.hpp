#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hospstay/survival.hpp"

namespace hospstay {

enum class SexFilter { Male, Female, Any };

/// Covariate point at which a conditional curve is estimated.
struct CovariateQuery {
  double age = 0.0;  // years
  SexFilter sex = SexFilter::Any;
};

enum class Kernel { Epanechnikov, Gaussian };

struct KernelConfig {
  Kernel kernel = Kernel::Epanechnikov;
  /// Years; empty selects the rule-of-thumb bandwidth of the stratum.
  std::optional<double> bandwidth;
};

std::optional<Kernel> parse_kernel(std::string_view name);
std::optional<SexFilter> parse_sex_filter(std::string_view name);

double kernel_value(Kernel kernel, double u);

/// 1.06 * sd(age) * n^(-1/5) over the observations' ages.
double rule_of_thumb_bandwidth(std::span<const Observation> observations);

/// Kernel-weighted product-limit estimate of S(t | age, sex). Sex is handled
/// by stratification, age by kernel weights; known_cure flags are ignored.
SurvivalCurve beran_estimate(std::span<const Observation> observations,
                             const CovariateQuery& query, const KernelConfig& config);

/// Weighted form of npmcm_estimate: at each event the risk set is
/// sum_{j >= i} w_j plus the weight of every known cure already passed.
SurvivalCurve npmcm_conditional_estimate(std::span<const Observation> observations,
                                         const CovariateQuery& query,
                                         const KernelConfig& config);

double conditional_event_probability(std::span<const Observation> observations,
                                     const CovariateQuery& query, const KernelConfig& config);

CureModelEstimate conditional_latency(std::span<const Observation> observations,
                                      const CovariateQuery& query, const KernelConfig& config);

}  // namespace hospstay
