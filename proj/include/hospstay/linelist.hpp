#pragma once

#include <array>
#include <chrono>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hospstay/survival.hpp"

namespace hospstay {

using Date = std::chrono::sys_days;

/// Strict YYYY-MM-DD.
std::optional<Date> parse_date(std::string_view text);
std::string format_date(Date date);

/// One patient row of a surveillance line list. Absent dates are empty.
struct LineListRecord {
  std::string id;
  std::optional<Sex> sex;
  std::optional<double> age;
  std::optional<Date> diagnosis;
  std::optional<Date> hw_admission;
  std::optional<Date> icu_admission;
  std::optional<Date> icu_exit;
  std::optional<Date> discharge;
  std::optional<Date> death;
  std::size_t source_row = 0;
};

struct Diagnostic {
  std::size_t row = 0;  // CSV line number, header = 1
  std::string column;
  std::string message;
};

struct LineList {
  std::vector<LineListRecord> records;
  /// Rows dropped because they failed validation.
  std::vector<Diagnostic> rejected;
  /// Informational notes (e.g. later admissions of a repeated id ignored).
  std::vector<Diagnostic> notes;
};

inline constexpr std::array<std::string_view, 9> kLineListColumns{
    "id",         "sex",           "age",          "date_diagnosis", "date_hw_admission",
    "date_icu_admission", "date_icu_exit", "date_discharge", "date_death"};

/// Parses a line-list CSV. Missing required columns throw Error(Data); bad
/// rows are collected in `rejected`. Repeated ids keep the row with the
/// earliest ward admission.
LineList parse_linelist(std::istream& in);

/// Throws Error(Data) describing the first chronology violation.
void validate(const LineListRecord& record);

enum class Endpoint { WardToIcu, WardDeath, WardDischarge, IcuDeath, IcuDischarge, HospitalTotal };

inline constexpr std::array<Endpoint, 6> kAllEndpoints{
    Endpoint::WardToIcu, Endpoint::WardDeath,    Endpoint::WardDischarge,
    Endpoint::IcuDeath,  Endpoint::IcuDischarge, Endpoint::HospitalTotal};

/// hw-to-icu, hw-death, hw-discharge, icu-death, icu-discharge, hospital-total
std::string to_string(Endpoint endpoint);
std::optional<Endpoint> parse_endpoint(std::string_view name);

enum class Status { Event, KnownCure, Censored };

struct EndpointDataset {
  Endpoint endpoint = Endpoint::WardToIcu;
  std::vector<Observation> observations;
  /// Record id behind each observation.
  std::vector<std::string> ids;
  /// Records not at risk for this endpoint (e.g. never in ICU).
  std::size_t skipped = 0;
  /// Records excluded from ICU outcome classification: left ICU alive and
  /// then died on the ward.
  std::vector<std::string> flagged;
};

/// Builds the (time, event, known_cure) observations for one endpoint as
/// seen on `study_end`. Dates after study_end are treated as not yet known.
EndpointDataset derive_endpoint(std::span<const LineListRecord> records, Endpoint endpoint,
                                Date study_end);

/// `time,event,known_cure,age,sex`
void write_endpoint_csv(std::ostream& out, const EndpointDataset& dataset);
std::vector<Observation> read_observations_csv(std::istream& in);

struct EndpointCounts {
  std::size_t events = 0;
  std::size_t known_cures = 0;
  std::size_t censored = 0;
  std::size_t skipped = 0;
};

struct DatasetSummary {
  std::size_t records = 0;
  std::size_t admitted = 0;
  std::size_t dead = 0;
  std::size_t discharged = 0;
  std::size_t in_hospital = 0;
  std::size_t in_icu = 0;
  std::array<EndpointCounts, 6> endpoints{};  // indexed like kAllEndpoints
  std::size_t male = 0;
  std::size_t female = 0;
  std::size_t sex_unknown = 0;
  /// <40, 40-59, 60-69, >=70, unknown
  std::array<std::size_t, 5> age_bands{};
};

DatasetSummary summarize(std::span<const LineListRecord> records, Date study_end);
std::string to_json(const DatasetSummary& summary);

}  // namespace hospstay
