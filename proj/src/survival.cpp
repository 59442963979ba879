#include "hospstay/survival.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "hospstay/error.hpp"
#include "csv.hpp"

namespace hospstay {

std::string to_string(Sex sex) {
  return sex == Sex::Male ? "male" : "female";
}

std::optional<Sex> parse_sex(std::string_view text) {
  std::string lower;
  for (char c : text) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (lower == "male" || lower == "m" || lower == "0") return Sex::Male;
  if (lower == "female" || lower == "f" || lower == "1") return Sex::Female;
  return std::nullopt;
}

void validate(const Observation& obs) {
  if (!std::isfinite(obs.time) || obs.time < 0.0) {
    fail(ErrorKind::Data, "invalid time");
  }
  if (obs.event && obs.known_cure) {
    fail(ErrorKind::Data, "observation is both an event and a known cure");
  }
  if (obs.age && (!std::isfinite(*obs.age) || *obs.age < 0.0 || *obs.age > 130.0)) {
    fail(ErrorKind::Data, "invalid age");
  }
}

SurvivalCurve::SurvivalCurve(std::vector<double> jump_times, std::vector<double> values,
                             double max_time)
    : jump_times_(std::move(jump_times)), values_(std::move(values)), max_time_(max_time) {
  if (jump_times_.size() != values_.size()) {
    fail(ErrorKind::InvalidArgument, "survival curve: times and values differ in length");
  }
  double previous_time = -1.0;
  double previous_value = 1.0;
  for (std::size_t i = 0; i < jump_times_.size(); ++i) {
    const double t = jump_times_[i];
    const double v = values_[i];
    if (!std::isfinite(t) || t < 0.0 || t <= previous_time) {
      fail(ErrorKind::InvalidArgument, "survival curve: jump times must be strictly increasing and >= 0");
    }
    if (!(v >= 0.0 && v <= 1.0) || v > previous_value) {
      fail(ErrorKind::InvalidArgument, "survival curve: values must be non-increasing in [0,1]");
    }
    previous_time = t;
    previous_value = v;
  }
  if (!std::isfinite(max_time_) || max_time_ < 0.0 ||
      (!jump_times_.empty() && max_time_ < jump_times_.back())) {
    fail(ErrorKind::InvalidArgument, "survival curve: max_time precedes the last jump");
  }
}

double SurvivalCurve::operator()(double t) const {
  auto it = std::upper_bound(jump_times_.begin(), jump_times_.end(), t);
  if (it == jump_times_.begin()) return 1.0;
  return values_[static_cast<std::size_t>(it - jump_times_.begin()) - 1];
}

std::vector<std::pair<double, double>> SurvivalCurve::points() const {
  std::vector<std::pair<double, double>> out;
  out.reserve(jump_times_.size() + 2);
  out.emplace_back(0.0, 1.0);
  for (std::size_t i = 0; i < jump_times_.size(); ++i) {
    out.emplace_back(jump_times_[i], values_[i]);
  }
  out.emplace_back(max_time_, plateau());
  return out;
}

bool SurvivalCurve::same_steps(const SurvivalCurve& other) const {
  return jump_times_ == other.jump_times_ && values_ == other.values_;
}

namespace {

enum class Kind { Event = 0, KnownCure = 1, Censored = 2 };

Kind kind_of(const Observation& obs) {
  if (obs.event) return Kind::Event;
  if (obs.known_cure) return Kind::KnownCure;
  return Kind::Censored;
}

void validate_all(std::span<const Observation> observations) {
  if (observations.empty()) fail(ErrorKind::Data, "no observations");
  for (const auto& obs : observations) validate(obs);
}

double largest_time(std::span<const Observation> observations) {
  double t = 0.0;
  for (const auto& obs : observations) t = std::max(t, obs.time);
  return t;
}

// Appends a step, merging with the previous one when the time repeats.
void push_step(std::vector<double>& times, std::vector<double>& values, double t, double v) {
  if (!times.empty() && times.back() == t) {
    values.back() = v;
  } else {
    times.push_back(t);
    values.push_back(v);
  }
}

}  // namespace

std::vector<std::size_t> product_limit_order(std::span<const Observation> observations) {
  std::vector<std::size_t> order(observations.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& oa = observations[a];
    const auto& ob = observations[b];
    if (oa.time != ob.time) return oa.time < ob.time;
    return static_cast<int>(kind_of(oa)) < static_cast<int>(kind_of(ob));
  });
  return order;
}

SurvivalCurve km_estimate(std::span<const Observation> observations) {
  validate_all(observations);
  std::vector<double> all_times;
  std::vector<double> event_times;
  for (const auto& obs : observations) {
    all_times.push_back(obs.time);
    if (obs.event) event_times.push_back(obs.time);
  }
  std::sort(all_times.begin(), all_times.end());
  std::sort(event_times.begin(), event_times.end());

  // Grouped form: one factor (1 - d/r) per distinct event time, with r
  // counting every subject whose time is >= t.
  std::vector<double> jumps;
  std::vector<double> values;
  double s = 1.0;
  for (std::size_t i = 0; i < event_times.size();) {
    const double t = event_times[i];
    std::size_t j = i;
    while (j < event_times.size() && event_times[j] == t) ++j;
    const auto first_at_risk = std::lower_bound(all_times.begin(), all_times.end(), t);
    const auto at_risk = static_cast<double>(all_times.end() - first_at_risk);
    s *= 1.0 - static_cast<double>(j - i) / at_risk;
    jumps.push_back(t);
    values.push_back(s);
    i = j;
  }
  return SurvivalCurve(std::move(jumps), std::move(values), largest_time(observations));
}

SurvivalCurve km_estimate_reduced(std::span<const Observation> observations) {
  validate_all(observations);
  std::vector<Observation> susceptible;
  std::copy_if(observations.begin(), observations.end(), std::back_inserter(susceptible),
               [](const Observation& o) { return !o.known_cure; });
  if (susceptible.empty()) fail(ErrorKind::Data, "no susceptible observations");
  return km_estimate(susceptible);
}

SurvivalCurve empirical_estimate(std::span<const Observation> observations) {
  validate_all(observations);
  std::vector<double> uncensored;
  for (const auto& obs : observations) {
    if (obs.event) uncensored.push_back(obs.time);
  }
  if (uncensored.empty()) fail(ErrorKind::Data, "no observed events");
  std::sort(uncensored.begin(), uncensored.end());

  const double n = static_cast<double>(uncensored.size());
  std::vector<double> jumps;
  std::vector<double> values;
  for (std::size_t i = 0; i < uncensored.size(); ++i) {
    // Count of uncensored times strictly greater than the current one.
    if (i + 1 < uncensored.size() && uncensored[i + 1] == uncensored[i]) continue;
    jumps.push_back(uncensored[i]);
    values.push_back(static_cast<double>(uncensored.size() - i - 1) / n);
  }
  return SurvivalCurve(std::move(jumps), std::move(values), largest_time(observations));
}

SurvivalCurve npmcm_estimate(std::span<const Observation> observations) {
  validate_all(observations);
  const auto order = product_limit_order(observations);
  const std::size_t n = order.size();

  std::vector<double> jumps;
  std::vector<double> values;
  double s = 1.0;
  std::size_t cures_passed = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const auto& obs = observations[order[k]];
    if (obs.known_cure) ++cures_passed;
    if (!obs.event) continue;
    // 1-based index i = k + 1, so n - i + 1 = n - k.
    const double at_risk = static_cast<double>(n - k + cures_passed);
    s *= 1.0 - 1.0 / at_risk;
    push_step(jumps, values, obs.time, s);
  }
  return SurvivalCurve(std::move(jumps), std::move(values), largest_time(observations));
}

double event_probability(const SurvivalCurve& curve) { return 1.0 - curve.plateau(); }

double empirical_event_probability(std::span<const Observation> observations) {
  validate_all(observations);
  const auto events = std::count_if(observations.begin(), observations.end(),
                                    [](const Observation& o) { return o.event; });
  return static_cast<double>(events) / static_cast<double>(observations.size());
}

CureModelEstimate latency(const SurvivalCurve& curve) {
  const double plateau = curve.plateau();
  if (plateau >= 1.0) fail(ErrorKind::Data, "event probability is zero; latency undefined");
  const double p = 1.0 - plateau;

  std::vector<double> values;
  values.reserve(curve.size());
  for (double v : curve.values()) {
    values.push_back(std::clamp((v - plateau) / p, 0.0, 1.0));
  }
  values.back() = 0.0;
  return {p, SurvivalCurve(curve.jump_times(), std::move(values), curve.max_time())};
}

std::string format_real(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

void write_curve_csv(std::ostream& out, const SurvivalCurve& curve) {
  out << "t,survival\n";
  out << "0,1.0\n";
  for (std::size_t i = 0; i < curve.size(); ++i) {
    out << format_real(curve.jump_times()[i]) << ',' << format_real(curve.values()[i]) << '\n';
  }
  out << format_real(curve.max_time()) << ',' << format_real(curve.plateau()) << '\n';
}

SurvivalCurve read_curve_csv(std::istream& in) {
  csv::Reader reader(in);
  const auto header = reader.header();
  const auto t_col = csv::column_index(header, "t");
  const auto s_col = csv::column_index(header, "survival");
  if (!t_col || !s_col) fail(ErrorKind::Data, "curve CSV: header must contain t,survival");

  std::vector<double> jumps;
  std::vector<double> values;
  double running = 1.0;
  double max_time = 0.0;
  std::vector<std::string> row;
  while (reader.next(row)) {
    const double t = csv::parse_real(row.at(*t_col), reader.row_number(), "t");
    const double s = csv::parse_real(row.at(*s_col), reader.row_number(), "survival");
    max_time = std::max(max_time, t);
    if (s < running) {
      push_step(jumps, values, t, s);
      running = s;
    }
  }
  return SurvivalCurve(std::move(jumps), std::move(values), max_time);
}

std::string curve_to_json(const SurvivalCurve& curve, std::optional<double> event_probability) {
  std::ostringstream out;
  auto write_array = [&](const std::vector<double>& xs) {
    out << '[';
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (i) out << ',';
      out << format_real(xs[i]);
    }
    out << ']';
  };
  out << "{\"jump_times\":";
  write_array(curve.jump_times());
  out << ",\"values\":";
  write_array(curve.values());
  out << ",\"plateau\":" << format_real(curve.plateau());
  out << ",\"max_time\":" << format_real(curve.max_time());
  if (event_probability) out << ",\"event_probability\":" << format_real(*event_probability);
  out << "}\n";
  return out.str();
}

}  // namespace hospstay
