#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "hospstay/survival.hpp"

namespace hospstay {

/// Age groups used for stratified simulation tables and summaries.
enum class AgeBand { Under40, From40To59, From60To69, From70 };

inline constexpr std::array<AgeBand, 4> kAllAgeBands{AgeBand::Under40, AgeBand::From40To59,
                                                     AgeBand::From60To69, AgeBand::From70};

AgeBand age_band(double age);
/// "<40", "40-59", "60-69", "70+"
std::string to_string(AgeBand band);
std::optional<AgeBand> parse_age_band(std::string_view text);

/// Age at which conditional estimates are taken for a band.
double representative_age(AgeBand band);

struct Stratum {
  Sex sex = Sex::Male;
  AgeBand band = AgeBand::Under40;
  auto operator<=>(const Stratum&) const = default;
};

}  // namespace hospstay
