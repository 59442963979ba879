#include "hospstay/strata.hpp"

namespace hospstay {

AgeBand age_band(double age) {
  if (age < 40.0) return AgeBand::Under40;
  if (age < 60.0) return AgeBand::From40To59;
  if (age < 70.0) return AgeBand::From60To69;
  return AgeBand::From70;
}

std::string to_string(AgeBand band) {
  switch (band) {
    case AgeBand::Under40: return "<40";
    case AgeBand::From40To59: return "40-59";
    case AgeBand::From60To69: return "60-69";
    case AgeBand::From70: return "70+";
  }
  return "?";
}

std::optional<AgeBand> parse_age_band(std::string_view text) {
  for (auto band : kAllAgeBands) {
    if (text == to_string(band)) return band;
  }
  return std::nullopt;
}

double representative_age(AgeBand band) {
  // Mid-points; the open bands are closed at 20 and 90.
  switch (band) {
    case AgeBand::Under40: return 30.0;
    case AgeBand::From40To59: return 50.0;
    case AgeBand::From60To69: return 65.0;
    case AgeBand::From70: return 80.0;
  }
  return 50.0;
}

}  // namespace hospstay
