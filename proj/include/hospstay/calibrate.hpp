#pragma once

#include <span>
#include <string>
#include <vector>

#include "hospstay/conditional.hpp"
#include "hospstay/linelist.hpp"
#include "hospstay/simulation.hpp"

namespace hospstay {

struct CalibrationOptions {
  /// Also fill per-stratum (sex x age band) tables from conditional
  /// estimates taken at each band's representative age.
  bool conditional = false;
  KernelConfig kernel;
};

/// Replaces the transition probabilities and duration laws of `config` with
/// NP-MCM estimates from a line list: event probabilities for the five
/// endpoints and Weibull fits to their latency curves. Strata whose
/// estimate fails fall back to the unconditional values; each fallback is
/// reported in the returned warnings.
std::vector<std::string> calibrate(SimulationConfig& config,
                                   std::span<const LineListRecord> records, Date study_end,
                                   const CalibrationOptions& options = {});

}  // namespace hospstay
