// Writes the synthetic line list bundled as data/synthetic_linelist.csv.
//
// Ground truth (documented in data/README.md):
//   2500 admissions, uniform over 2020-03-01 .. 2020-04-29, study end 2020-05-02
//   ward outcome: ICU 0.30, death 0.15, discharge 0.55
//   ward stays:   ICU Weibull(1.3, 6), death Weibull(1.5, 12), discharge Weibull(1.8, 15)
//   ICU outcome:  death 0.35, discharge 0.65
//   ICU stays:    death Weibull(1.6, 16 f), discharge Weibull(1.7, 15 f),
//                 f = (0.8 + 0.005 age) * (1.1 if male)
// Stays are rounded up to whole days (minimum 1).

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "hospstay/linelist.hpp"
#include "hospstay/random.hpp"
#include "hospstay/weibull.hpp"

namespace {

using namespace hospstay;
using std::chrono::days;

int stay(const WeibullParams& law, RandomStream& rng) {
  return std::max(1, static_cast<int>(std::ceil(weibull_sample(law, rng))));
}

std::string cell(const std::optional<Date>& d, Date study_end) {
  return d && *d <= study_end ? format_date(*d) : "";
}

}  // namespace

int main(int argc, char** argv) {
  std::uint64_t seed = 2020;
  int n = 2500;
  std::string output;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--seed" && i + 1 < argc) {
      seed = std::strtoull(argv[++i], nullptr, 10);
    } else if (arg == "--n" && i + 1 < argc) {
      n = std::atoi(argv[++i]);
    } else if (arg == "--output" && i + 1 < argc) {
      output = argv[++i];
    } else {
      std::cerr << "usage: synth_linelist [--seed N] [--n COUNT] [--output PATH]\n";
      return 1;
    }
  }

  const Date start = *parse_date("2020-03-01");
  const Date study_end = *parse_date("2020-05-02");
  RandomStream rng(seed);

  std::ofstream file;
  if (!output.empty()) file.open(output);
  std::ostream& out = output.empty() ? std::cout : file;
  out << "id,sex,age,date_diagnosis,date_hw_admission,date_icu_admission,date_icu_exit,"
         "date_discharge,date_death\n";

  const double band_cdf[] = {0.15, 0.45, 0.65, 1.0};
  const double band_lo[] = {20, 40, 60, 70};
  const double band_hi[] = {40, 60, 70, 95};

  for (int i = 0; i < n; ++i) {
    const bool female = rng.bernoulli(0.45);
    const auto band = rng.discrete(band_cdf);
    const double age = std::round(band_lo[band] + rng.uniform() * (band_hi[band] - band_lo[band]));

    const Date admission = start + days(static_cast<int>(rng.uniform() * 60));
    const Date diagnosis = admission - days(static_cast<int>(rng.uniform() * 6));
    std::optional<Date> icu_admission, icu_exit, discharge, death;

    const double u = rng.uniform();
    if (u < 0.30) {
      icu_admission = admission + days(stay({1.3, 6.0}, rng));
      const double f = (0.8 + 0.005 * age) * (female ? 1.0 : 1.1);
      const bool dies = rng.bernoulli(0.35);
      const WeibullParams law = dies ? WeibullParams{1.6, 16.0 * f} : WeibullParams{1.7, 15.0 * f};
      icu_exit = *icu_admission + days(stay(law, rng));
      (dies ? death : discharge) = icu_exit;
    } else if (u < 0.45) {
      death = admission + days(stay({1.5, 12.0}, rng));
    } else {
      discharge = admission + days(stay({1.8, 15.0}, rng));
    }

    out << "P" << (i + 1) << ',' << (female ? "female" : "male") << ',' << age << ','
        << format_date(diagnosis) << ',' << format_date(admission) << ','
        << cell(icu_admission, study_end) << ',' << cell(icu_exit, study_end) << ','
        << cell(discharge, study_end) << ',' << cell(death, study_end) << '\n';
  }
  return 0;
}
