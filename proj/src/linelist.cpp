#include "hospstay/linelist.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>

#include <json.hpp>

#include "csv.hpp"
#include "hospstay/error.hpp"
#include "hospstay/strata.hpp"

namespace hospstay {

using namespace std::chrono;

std::optional<Date> parse_date(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  auto number = [&](std::size_t pos, std::size_t len) -> std::optional<int> {
    int v = 0;
    const auto* first = text.data() + pos;
    const auto [ptr, ec] = std::from_chars(first, first + len, v);
    if (ec != std::errc{} || ptr != first + len) return std::nullopt;
    return v;
  };
  const auto y = number(0, 4);
  const auto m = number(5, 2);
  const auto d = number(8, 2);
  if (!y || !m || !d) return std::nullopt;
  const year_month_day ymd{year{*y}, month{static_cast<unsigned>(*m)},
                           day{static_cast<unsigned>(*d)}};
  if (!ymd.ok()) return std::nullopt;
  return sys_days{ymd};
}

std::string format_date(Date date) {
  const year_month_day ymd{date};
  char buffer[16];
  std::snprintf(buffer, sizeof buffer, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buffer;
}

namespace {

struct RowProblem {
  std::string column;
  std::string message;
};

bool before_or_same(const std::optional<Date>& a, const std::optional<Date>& b) {
  return !a || !b || *a <= *b;
}

std::optional<RowProblem> chronology_problem(const LineListRecord& r) {
  if (r.death && r.discharge) return RowProblem{"date_death", "both death and discharge recorded"};
  if (r.icu_admission && !r.hw_admission) {
    return RowProblem{"date_icu_admission", "ICU admission without ward admission"};
  }
  if (r.icu_exit && !r.icu_admission) {
    return RowProblem{"date_icu_exit", "ICU exit without ICU admission"};
  }
  if (r.discharge && !r.hw_admission) {
    return RowProblem{"date_discharge", "discharge without admission"};
  }
  if (!before_or_same(r.hw_admission, r.icu_admission)) {
    return RowProblem{"date_icu_admission", "ICU admission before ward admission"};
  }
  if (!before_or_same(r.icu_admission, r.icu_exit)) {
    return RowProblem{"date_icu_exit", "ICU exit before ICU admission"};
  }
  for (const auto& [exit, column] : {std::pair{r.death, "date_death"},
                                     std::pair{r.discharge, "date_discharge"}}) {
    if (!before_or_same(r.hw_admission, exit)) return RowProblem{column, "before ward admission"};
    if (!before_or_same(r.icu_admission, exit)) return RowProblem{column, "before ICU admission"};
    if (!before_or_same(r.icu_exit, exit)) return RowProblem{column, "before ICU exit"};
  }
  if (r.age && !(*r.age >= 0.0 && *r.age <= 130.0)) return RowProblem{"age", "outside [0, 130]"};
  return std::nullopt;
}

}  // namespace

void validate(const LineListRecord& record) {
  if (auto problem = chronology_problem(record)) {
    fail(ErrorKind::Data, problem->column + ": " + problem->message);
  }
}

LineList parse_linelist(std::istream& in) {
  csv::Reader reader(in);
  const auto& header = reader.header();
  std::array<std::size_t, kLineListColumns.size()> col{};
  std::string missing;
  for (std::size_t i = 0; i < kLineListColumns.size(); ++i) {
    if (auto idx = csv::column_index(header, kLineListColumns[i])) {
      col[i] = *idx;
    } else {
      if (!missing.empty()) missing += ", ";
      missing += kLineListColumns[i];
    }
  }
  if (!missing.empty()) fail(ErrorKind::Data, "line list: missing required columns: " + missing);

  LineList out;
  std::vector<std::string> row;
  while (reader.next(row)) {
    const std::size_t line = reader.row_number();
    auto field = [&](std::size_t i) -> const std::string& { return row[col[i]]; };
    LineListRecord rec;
    rec.source_row = line;
    auto reject = [&](std::string column, std::string message) {
      out.rejected.push_back({line, std::move(column), std::move(message)});
    };

    rec.id = field(0);
    if (rec.id.empty()) {
      reject("id", "empty");
      continue;
    }
    if (!field(1).empty()) {
      rec.sex = parse_sex(field(1));
      if (!rec.sex) {
        reject("sex", "unrecognized value '" + field(1) + "'");
        continue;
      }
    }
    if (!field(2).empty()) {
      char* end = nullptr;
      const double age = std::strtod(field(2).c_str(), &end);
      if (end != field(2).c_str() + field(2).size() || !std::isfinite(age)) {
        reject("age", "expected a number, got '" + field(2) + "'");
        continue;
      }
      rec.age = age;
    }
    bool bad_date = false;
    const std::array<std::optional<Date>*, 6> slots{&rec.diagnosis,     &rec.hw_admission,
                                                    &rec.icu_admission, &rec.icu_exit,
                                                    &rec.discharge,     &rec.death};
    for (std::size_t k = 0; k < slots.size() && !bad_date; ++k) {
      const auto& text = field(3 + k);
      if (text.empty()) continue;
      *slots[k] = parse_date(text);
      if (!*slots[k]) {
        reject(std::string(kLineListColumns[3 + k]), "unparseable date '" + text + "'");
        bad_date = true;
      }
    }
    if (bad_date) continue;
    if (auto problem = chronology_problem(rec)) {
      reject(problem->column, problem->message);
      continue;
    }
    out.records.push_back(std::move(rec));
  }

  // Keep the first admission of every id.
  std::map<std::string, std::size_t> first;
  std::vector<LineListRecord> kept;
  auto earlier = [](const LineListRecord& a, const LineListRecord& b) {
    if (a.hw_admission && b.hw_admission) return *a.hw_admission < *b.hw_admission;
    return a.hw_admission.has_value() && !b.hw_admission.has_value();
  };
  for (auto& rec : out.records) {
    auto [it, inserted] = first.emplace(rec.id, kept.size());
    if (inserted) {
      kept.push_back(std::move(rec));
      continue;
    }
    auto& current = kept[it->second];
    if (earlier(rec, current)) {
      out.notes.push_back({current.source_row, "id",
                           "later admission of '" + rec.id + "' ignored"});
      current = std::move(rec);
    } else {
      out.notes.push_back({rec.source_row, "id", "later admission of '" + rec.id + "' ignored"});
    }
  }
  out.records = std::move(kept);
  return out;
}

std::string to_string(Endpoint endpoint) {
  switch (endpoint) {
    case Endpoint::WardToIcu: return "hw-to-icu";
    case Endpoint::WardDeath: return "hw-death";
    case Endpoint::WardDischarge: return "hw-discharge";
    case Endpoint::IcuDeath: return "icu-death";
    case Endpoint::IcuDischarge: return "icu-discharge";
    case Endpoint::HospitalTotal: return "hospital-total";
  }
  return "?";
}

std::optional<Endpoint> parse_endpoint(std::string_view name) {
  for (auto e : kAllEndpoints) {
    if (name == to_string(e)) return e;
  }
  return std::nullopt;
}

namespace {

// The record as known on study_end.
LineListRecord as_of(const LineListRecord& r, Date study_end) {
  LineListRecord out = r;
  for (auto* d : {&out.hw_admission, &out.icu_admission, &out.icu_exit, &out.discharge,
                  &out.death}) {
    if (*d && **d > study_end) d->reset();
  }
  return out;
}

enum class WardOutcome { ToIcu, Death, Discharge, Stay };
enum class IcuOutcome { Death, Discharge, Stay, WardDeathAfterIcu };

struct Classified {
  Status status;
  Date time;
};

std::pair<WardOutcome, Date> ward_phase(const LineListRecord& r, Date study_end) {
  if (r.icu_admission) return {WardOutcome::ToIcu, *r.icu_admission};
  if (r.death) return {WardOutcome::Death, *r.death};
  if (r.discharge) return {WardOutcome::Discharge, *r.discharge};
  return {WardOutcome::Stay, study_end};
}

std::pair<IcuOutcome, Date> icu_phase(const LineListRecord& r, Date study_end) {
  if (r.icu_exit) {
    if (r.death && *r.death > *r.icu_exit) return {IcuOutcome::WardDeathAfterIcu, *r.icu_exit};
    if (r.death) return {IcuOutcome::Death, *r.icu_exit};
    return {IcuOutcome::Discharge, *r.icu_exit};
  }
  if (r.death) return {IcuOutcome::Death, *r.death};
  if (r.discharge) return {IcuOutcome::Discharge, *r.discharge};
  return {IcuOutcome::Stay, study_end};
}

double days_between(Date from, Date to) { return static_cast<double>((to - from).count()); }

}  // namespace

EndpointDataset derive_endpoint(std::span<const LineListRecord> records, Endpoint endpoint,
                                Date study_end) {
  EndpointDataset out;
  out.endpoint = endpoint;
  for (const auto& original : records) {
    const auto r = as_of(original, study_end);
    if (!r.hw_admission) {
      ++out.skipped;
      continue;
    }
    Observation obs;
    obs.age = r.age;
    obs.sex = r.sex;
    Date start = *r.hw_admission;
    Status status = Status::Censored;
    Date stop = study_end;

    switch (endpoint) {
      case Endpoint::WardToIcu:
      case Endpoint::WardDeath:
      case Endpoint::WardDischarge: {
        const auto [outcome, when] = ward_phase(r, study_end);
        stop = when;
        const WardOutcome target = endpoint == Endpoint::WardToIcu   ? WardOutcome::ToIcu
                                   : endpoint == Endpoint::WardDeath ? WardOutcome::Death
                                                                     : WardOutcome::Discharge;
        if (outcome == WardOutcome::Stay) {
          status = Status::Censored;
        } else {
          status = outcome == target ? Status::Event : Status::KnownCure;
        }
        break;
      }
      case Endpoint::IcuDeath:
      case Endpoint::IcuDischarge: {
        if (!r.icu_admission) {
          ++out.skipped;
          continue;
        }
        start = *r.icu_admission;
        const auto [outcome, when] = icu_phase(r, study_end);
        if (outcome == IcuOutcome::WardDeathAfterIcu) {
          out.flagged.push_back(r.id);
          ++out.skipped;
          continue;
        }
        stop = when;
        const IcuOutcome target =
            endpoint == Endpoint::IcuDeath ? IcuOutcome::Death : IcuOutcome::Discharge;
        if (outcome == IcuOutcome::Stay) {
          status = Status::Censored;
        } else {
          status = outcome == target ? Status::Event : Status::KnownCure;
        }
        break;
      }
      case Endpoint::HospitalTotal: {
        if (r.death || r.discharge) {
          stop = r.death ? *r.death : *r.discharge;
          status = Status::Event;
        }
        break;
      }
    }
    obs.time = days_between(start, stop);
    obs.event = status == Status::Event;
    obs.known_cure = status == Status::KnownCure;
    validate(obs);
    out.observations.push_back(obs);
    out.ids.push_back(r.id);
  }
  return out;
}

void write_endpoint_csv(std::ostream& out, const EndpointDataset& dataset) {
  out << "time,event,known_cure,age,sex\n";
  for (const auto& obs : dataset.observations) {
    out << format_real(obs.time) << ',' << (obs.event ? 1 : 0) << ','
        << (obs.known_cure ? 1 : 0) << ',' << (obs.age ? format_real(*obs.age) : "") << ','
        << (obs.sex ? to_string(*obs.sex) : "") << '\n';
  }
}

namespace {

bool parse_flag(const std::string& text, std::size_t row, std::string_view column) {
  if (text == "1" || text == "true" || text == "TRUE") return true;
  if (text == "0" || text == "false" || text == "FALSE") return false;
  fail(ErrorKind::Data, "row " + std::to_string(row) + ", column '" + std::string(column) +
                            "': expected 0/1, got '" + text + "'");
}

}  // namespace

std::vector<Observation> read_observations_csv(std::istream& in) {
  csv::Reader reader(in);
  const auto& header = reader.header();
  const auto time_col = csv::column_index(header, "time");
  const auto event_col = csv::column_index(header, "event");
  const auto cure_col = csv::column_index(header, "known_cure");
  const auto age_col = csv::column_index(header, "age");
  const auto sex_col = csv::column_index(header, "sex");
  if (!time_col || !event_col || !cure_col) {
    fail(ErrorKind::Data, "observation CSV: header must contain time,event,known_cure");
  }
  std::vector<Observation> out;
  std::vector<std::string> row;
  while (reader.next(row)) {
    const auto line = reader.row_number();
    Observation obs;
    obs.time = csv::parse_real(row[*time_col], line, "time");
    obs.event = parse_flag(row[*event_col], line, "event");
    obs.known_cure = parse_flag(row[*cure_col], line, "known_cure");
    if (age_col && !row[*age_col].empty()) obs.age = csv::parse_real(row[*age_col], line, "age");
    if (sex_col && !row[*sex_col].empty()) {
      obs.sex = parse_sex(row[*sex_col]);
      if (!obs.sex) {
        fail(ErrorKind::Data, "row " + std::to_string(line) + ", column 'sex': unrecognized '" +
                                  row[*sex_col] + "'");
      }
    }
    try {
      validate(obs);
    } catch (const Error& e) {
      fail(ErrorKind::Data, "row " + std::to_string(line) + ": " + e.what());
    }
    out.push_back(obs);
  }
  return out;
}

DatasetSummary summarize(std::span<const LineListRecord> records, Date study_end) {
  DatasetSummary s;
  s.records = records.size();
  for (const auto& original : records) {
    const auto r = as_of(original, study_end);
    if (r.sex) {
      (*r.sex == Sex::Male ? s.male : s.female)++;
    } else {
      ++s.sex_unknown;
    }
    if (r.age) {
      ++s.age_bands[static_cast<std::size_t>(age_band(*r.age))];
    } else {
      ++s.age_bands[4];
    }
    if (!r.hw_admission) continue;
    ++s.admitted;
    if (r.death) {
      ++s.dead;
    } else if (r.discharge) {
      ++s.discharged;
    } else {
      ++s.in_hospital;
      if (r.icu_admission && !r.icu_exit) ++s.in_icu;
    }
  }
  for (std::size_t k = 0; k < kAllEndpoints.size(); ++k) {
    const auto dataset = derive_endpoint(records, kAllEndpoints[k], study_end);
    auto& c = s.endpoints[k];
    c.skipped = dataset.skipped;
    for (const auto& obs : dataset.observations) {
      if (obs.event) {
        ++c.events;
      } else if (obs.known_cure) {
        ++c.known_cures;
      } else {
        ++c.censored;
      }
    }
  }
  return s;
}

std::string to_json(const DatasetSummary& s) {
  nlohmann::ordered_json j;
  j["records"] = s.records;
  j["admitted"] = s.admitted;
  j["dead"] = s.dead;
  j["discharged"] = s.discharged;
  j["in_hospital"] = s.in_hospital;
  j["in_icu"] = s.in_icu;
  auto& endpoints = j["endpoints"];
  for (std::size_t k = 0; k < kAllEndpoints.size(); ++k) {
    const auto& c = s.endpoints[k];
    endpoints[to_string(kAllEndpoints[k])] = {{"events", c.events},
                                              {"known_cures", c.known_cures},
                                              {"censored", c.censored},
                                              {"skipped", c.skipped}};
  }
  j["sex"] = {{"male", s.male}, {"female", s.female}, {"unknown", s.sex_unknown}};
  auto& bands = j["age_bands"];
  for (auto band : kAllAgeBands) {
    bands[to_string(band)] = s.age_bands[static_cast<std::size_t>(band)];
  }
  bands["unknown"] = s.age_bands[4];

  // Shaped like the simulator's "demographics" block.
  const double known_sex = static_cast<double>(s.male + s.female);
  auto& demo = j["demographics"];
  demo["female_fraction"] = known_sex > 0 ? static_cast<double>(s.female) / known_sex : 0.5;
  const std::array<std::pair<double, double>, 4> limits{{{0, 40}, {40, 60}, {60, 70}, {70, 100}}};
  demo["age_bands"] = nlohmann::ordered_json::array();
  for (std::size_t b = 0; b < 4; ++b) {
    demo["age_bands"].push_back({{"min", limits[b].first},
                                 {"max", limits[b].second},
                                 {"weight", s.age_bands[b]}});
  }
  return j.dump(2) + "\n";
}

}  // namespace hospstay
