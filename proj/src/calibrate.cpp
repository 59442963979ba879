#include "hospstay/calibrate.hpp"

#include <array>

#include "hospstay/error.hpp"

namespace hospstay {

namespace {

constexpr std::array<std::pair<Endpoint, Transition>, 5> kEndpointTransitions{{
    {Endpoint::WardToIcu, Transition::WardToIcu},
    {Endpoint::WardDeath, Transition::WardDeath},
    {Endpoint::WardDischarge, Transition::WardDischarge},
    {Endpoint::IcuDeath, Transition::IcuDeath},
    {Endpoint::IcuDischarge, Transition::IcuDischarge},
}};

double& probability_slot(OutcomeProbabilities& p, Transition t) {
  switch (t) {
    case Transition::WardToIcu: return p.to_icu;
    case Transition::WardDeath: return p.ward_death;
    case Transition::WardDischarge: return p.ward_discharge;
    case Transition::IcuDeath: return p.icu_death;
    case Transition::IcuDischarge: return p.icu_discharge;
  }
  return p.to_icu;
}

DurationLaw fitted_law(const SurvivalCurve& latency_curve) {
  return DurationLaw{fit_weibull(latency_curve).params, std::nullopt};
}

}  // namespace

std::vector<std::string> calibrate(SimulationConfig& config,
                                   std::span<const LineListRecord> records, Date study_end,
                                   const CalibrationOptions& options) {
  std::vector<std::string> warnings;
  std::array<std::vector<Observation>, 5> datasets;

  for (std::size_t k = 0; k < kEndpointTransitions.size(); ++k) {
    const auto [endpoint, transition] = kEndpointTransitions[k];
    datasets[k] = derive_endpoint(records, endpoint, study_end).observations;
    const auto curve = npmcm_estimate(datasets[k]);
    const auto estimate = latency(curve);
    probability_slot(config.transitions.defaults, transition) = estimate.p;
    config.durations.defaults[static_cast<std::size_t>(transition)] = fitted_law(estimate.latency);
  }
  config.transitions.overrides.clear();
  config.durations.overrides.clear();
  if (!options.conditional) return warnings;

  for (auto sex : {Sex::Male, Sex::Female}) {
    for (auto band : kAllAgeBands) {
      const Stratum stratum{sex, band};
      const CovariateQuery query{representative_age(band),
                                 sex == Sex::Male ? SexFilter::Male : SexFilter::Female};
      OutcomeProbabilities p = config.transitions.defaults;
      for (std::size_t k = 0; k < kEndpointTransitions.size(); ++k) {
        const auto transition = kEndpointTransitions[k].second;
        const auto label = to_string(sex) + "/" + to_string(band) + " " + to_string(transition);
        try {
          const auto estimate =
              latency(npmcm_conditional_estimate(datasets[k], query, options.kernel));
          probability_slot(p, transition) = estimate.p;
          config.durations.overrides[{stratum, transition}] = fitted_law(estimate.latency);
        } catch (const Error& e) {
          warnings.push_back(label + ": " + e.what() + "; using unconditional estimate");
        }
      }
      config.transitions.overrides[stratum] = p;
    }
  }
  return warnings;
}

}  // namespace hospstay
