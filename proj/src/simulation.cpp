#include "hospstay/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "hospstay/error.hpp"

namespace hospstay {

std::string to_string(Transition transition) {
  switch (transition) {
    case Transition::WardToIcu: return "ward_to_icu";
    case Transition::WardDeath: return "ward_death";
    case Transition::WardDischarge: return "ward_discharge";
    case Transition::IcuDeath: return "icu_death";
    case Transition::IcuDischarge: return "icu_discharge";
  }
  return "?";
}

std::string to_string(State state) {
  switch (state) {
    case State::Ward: return "HW";
    case State::Icu: return "ICU";
    case State::Dead: return "DEAD";
    case State::Discharged: return "DISCHARGED";
  }
  return "?";
}

const OutcomeProbabilities& TransitionTable::resolve(const Stratum& stratum) const {
  auto it = overrides.find(stratum);
  return it == overrides.end() ? defaults : it->second;
}

int DurationLaw::draw(RandomStream& stream) const {
  if (fixed_days) return *fixed_days;
  // Cap keeps the cast defined for extreme draws; anything this long is past
  // every horizon anyway.
  const double days = std::min(std::ceil(weibull_sample(weibull, stream)), 1e6);
  return std::max(1, static_cast<int>(days));
}

DurationLaw duration_from_median(double median, double shape) {
  return DurationLaw{{shape, median / std::pow(std::log(2.0), 1.0 / shape)}, std::nullopt};
}

const DurationLaw& DurationTable::resolve(const Stratum& stratum, Transition transition) const {
  auto it = overrides.find({stratum, transition});
  return it == overrides.end() ? defaults[static_cast<std::size_t>(transition)] : it->second;
}

std::vector<double> triangular_admission_curve(int start, int peak, int end) {
  if (start < 0 || peak < start || end < peak || end == start) {
    fail(ErrorKind::InvalidArgument, "triangular admission curve needs 0 <= start <= peak <= end, start < end");
  }
  std::vector<double> w(static_cast<std::size_t>(end) + 1, 0.0);
  for (int d = start; d <= end; ++d) {
    double v = 0.0;
    if (d <= peak) {
      v = peak == start ? 1.0 : static_cast<double>(d - start + 1) / (peak - start + 1);
    } else {
      v = static_cast<double>(end - d + 1) / (end - peak + 1);
    }
    w[static_cast<std::size_t>(d)] = v;
  }
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  for (auto& x : w) x /= total;
  return w;
}

SimulationConfig SimulationConfig::defaults() {
  SimulationConfig c;
  c.admission_curve = triangular_admission_curve(0, 30, 90);
  // Synthetic laws: medians follow the reported hospital medians, shapes are
  // placeholders.
  c.durations.defaults = {duration_from_median(3.0, 1.2), duration_from_median(7.0, 1.5),
                          duration_from_median(10.0, 1.8), duration_from_median(15.0, 1.5),
                          duration_from_median(14.0, 1.5)};
  // Synthetic age profile of confirmed cases.
  c.demographics.female_fraction = 0.55;
  c.demographics.age_ranges = {{0, 40, 0.35}, {40, 60, 0.30}, {60, 70, 0.12}, {70, 100, 0.23}};
  return c;
}

namespace {

void check(bool ok, const std::string& message) {
  if (!ok) fail(ErrorKind::InvalidArgument, "config: " + message);
}

bool probability(double p) { return std::isfinite(p) && p >= 0.0 && p <= 1.0; }

void validate(const OutcomeProbabilities& p, const std::string& where) {
  for (double v : {p.to_icu, p.ward_death, p.ward_discharge, p.icu_death, p.icu_discharge}) {
    check(probability(v), where + ": probabilities must lie in [0,1]");
  }
  check(p.to_icu + p.ward_death + p.ward_discharge > 0.0, where + ": ward outcomes all zero");
  check(p.icu_death + p.icu_discharge > 0.0, where + ": ICU outcomes all zero");
}

void validate(const DurationLaw& law, const std::string& where) {
  if (law.fixed_days) {
    check(*law.fixed_days >= 1, where + ": fixed_days must be >= 1");
  } else {
    try {
      validate(law.weibull);
    } catch (const Error& e) {
      check(false, where + ": " + e.what());
    }
  }
}

std::string describe(const Stratum& s) { return to_string(s.sex) + "/" + to_string(s.band); }

}  // namespace

void validate(const SimulationConfig& c) {
  check(c.n_infected > 0, "n_infected must be positive");
  check(c.n_replications > 0, "n_replications must be positive");
  check(c.horizon_days > 0, "horizon_days must be positive");
  check(probability(c.p_hospitalized), "p_hospitalized must lie in [0,1]");
  check(!c.admission_curve.empty(), "admission curve is empty");
  check(c.admission_curve.size() <= static_cast<std::size_t>(c.horizon_days),
        "admission curve extends past the horizon");
  double total = 0.0;
  for (double w : c.admission_curve) {
    check(probability(w), "admission curve weights must lie in [0,1]");
    total += w;
  }
  check(std::abs(total - 1.0) <= 1e-9, "admission curve must sum to 1");
  validate(c.transitions.defaults, "transitions");
  for (const auto& [stratum, p] : c.transitions.overrides) {
    validate(p, "transitions[" + describe(stratum) + "]");
  }
  for (auto t : kAllTransitions) {
    validate(c.durations.defaults[static_cast<std::size_t>(t)], "durations." + to_string(t));
  }
  for (const auto& [key, law] : c.durations.overrides) {
    validate(law, "durations[" + describe(key.first) + "]." + to_string(key.second));
  }
  check(probability(c.demographics.female_fraction), "female_fraction must lie in [0,1]");
  check(!c.demographics.age_ranges.empty(), "demographics need at least one age range");
  double weight = 0.0;
  for (const auto& r : c.demographics.age_ranges) {
    check(std::isfinite(r.min) && std::isfinite(r.max) && r.min >= 0.0 && r.max > r.min &&
              r.max <= 130.0,
          "age ranges need 0 <= min < max <= 130");
    check(std::isfinite(r.weight) && r.weight >= 0.0, "age range weights must be >= 0");
    weight += r.weight;
  }
  check(weight > 0.0, "age range weights are all zero");
}

// ---------------------------------------------------------------------------
// JSON configuration

namespace {

using nlohmann::json;

void only_keys(const json& j, std::initializer_list<std::string_view> allowed,
               const std::string& where) {
  check(j.is_object(), where + " must be an object");
  for (const auto& [key, _] : j.items()) {
    check(std::find(allowed.begin(), allowed.end(), key) != allowed.end(),
          "unknown key '" + key + "' in " + where);
  }
}

double number(const json& j, const char* key, const std::string& where) {
  check(j.contains(key) && j.at(key).is_number(), where + "." + key + " must be a number");
  return j.at(key).get<double>();
}

void read_outcomes(const json& j, OutcomeProbabilities& p, const std::string& where) {
  only_keys(j, {"ward", "icu", "sex", "age_band"}, where);
  if (j.contains("ward")) {
    const auto& w = j.at("ward");
    only_keys(w, {"to_icu", "death", "discharge"}, where + ".ward");
    p.to_icu = number(w, "to_icu", where + ".ward");
    p.ward_death = number(w, "death", where + ".ward");
    p.ward_discharge = number(w, "discharge", where + ".ward");
  }
  if (j.contains("icu")) {
    const auto& i = j.at("icu");
    only_keys(i, {"death", "discharge"}, where + ".icu");
    p.icu_death = number(i, "death", where + ".icu");
    p.icu_discharge = number(i, "discharge", where + ".icu");
  }
}

DurationLaw read_law(const json& j, const std::string& where) {
  only_keys(j, {"shape", "scale", "fixed_days"}, where);
  DurationLaw law;
  if (j.contains("fixed_days")) {
    check(j.at("fixed_days").is_number_integer(), where + ".fixed_days must be an integer");
    law.fixed_days = j.at("fixed_days").get<int>();
  } else {
    law.weibull = {number(j, "shape", where), number(j, "scale", where)};
  }
  return law;
}

json write_law(const DurationLaw& law) {
  if (law.fixed_days) return {{"fixed_days", *law.fixed_days}};
  return {{"shape", law.weibull.shape}, {"scale", law.weibull.scale}};
}

Stratum read_stratum(const json& j, const std::string& where) {
  check(j.contains("sex") && j.at("sex").is_string(), where + ".sex is required");
  check(j.contains("age_band") && j.at("age_band").is_string(), where + ".age_band is required");
  const auto sex = parse_sex(j.at("sex").get<std::string>());
  const auto band = parse_age_band(j.at("age_band").get<std::string>());
  check(sex.has_value(), where + ".sex must be male or female");
  check(band.has_value(), where + ".age_band must be one of <40, 40-59, 60-69, 70+");
  return {*sex, *band};
}

}  // namespace

std::vector<double> read_admission_csv(std::istream& in) {
  std::vector<double> weights;
  std::string line;
  bool header = true;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (header) {
      header = false;
      if (line != "day,weight") fail(ErrorKind::Data, "admission CSV: header must be day,weight");
      continue;
    }
    std::istringstream row(line);
    long day = -1;
    char comma = 0;
    double weight = -1.0;
    if (!(row >> day >> comma >> weight) || comma != ',' || day < 0 || weight < 0.0 ||
        !std::isfinite(weight)) {
      fail(ErrorKind::Data, "admission CSV: bad row " + std::to_string(line_no));
    }
    if (weights.size() <= static_cast<std::size_t>(day)) weights.resize(static_cast<std::size_t>(day) + 1, 0.0);
    weights[static_cast<std::size_t>(day)] += weight;
  }
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(total > 0.0)) fail(ErrorKind::Data, "admission CSV: weights sum to zero");
  for (auto& w : weights) w /= total;
  return weights;
}

SimulationConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::InvalidArgument, std::string("config: invalid JSON: ") + e.what());
  }
  only_keys(j, {"n_infected", "n_replications", "horizon_days", "p_hospitalized", "seed",
                "threads", "admission_curve", "transitions", "durations", "demographics"},
            "config");
  SimulationConfig c = SimulationConfig::defaults();
  auto integer = [&](const char* key, auto& out) {
    if (!j.contains(key)) return;
    check(j.at(key).is_number_integer(), std::string(key) + " must be an integer");
    out = j.at(key).get<std::remove_reference_t<decltype(out)>>();
  };
  integer("n_infected", c.n_infected);
  integer("n_replications", c.n_replications);
  integer("horizon_days", c.horizon_days);
  integer("seed", c.seed);
  integer("threads", c.threads);
  if (j.contains("p_hospitalized")) c.p_hospitalized = number(j, "p_hospitalized", "config");

  if (j.contains("admission_curve")) {
    const auto& a = j.at("admission_curve");
    if (a.contains("weights")) {
      only_keys(a, {"weights"}, "admission_curve");
      check(a.at("weights").is_array(), "admission_curve.weights must be an array");
      std::vector<double> w;
      for (const auto& x : a.at("weights")) {
        check(x.is_number(), "admission_curve.weights must hold numbers");
        w.push_back(x.get<double>());
      }
      const double total = std::accumulate(w.begin(), w.end(), 0.0);
      check(total > 0.0, "admission_curve.weights sum to zero");
      for (auto& x : w) x /= total;
      c.admission_curve = std::move(w);
    } else if (a.contains("csv")) {
      only_keys(a, {"csv"}, "admission_curve");
      std::filesystem::path path = a.at("csv").get<std::string>();
      if (path.is_relative()) path = base_dir / path;
      std::ifstream in(path);
      if (!in) fail(ErrorKind::Io, "cannot open admission curve " + path.string());
      c.admission_curve = read_admission_csv(in);
    } else {
      only_keys(a, {"type", "start", "peak", "end"}, "admission_curve");
      check(a.value("type", "") == "triangular",
            "admission_curve needs weights, csv or type=triangular");
      c.admission_curve = triangular_admission_curve(
          static_cast<int>(number(a, "start", "admission_curve")),
          static_cast<int>(number(a, "peak", "admission_curve")),
          static_cast<int>(number(a, "end", "admission_curve")));
    }
  }

  if (j.contains("transitions")) {
    const auto& t = j.at("transitions");
    only_keys(t, {"ward", "icu", "strata"}, "transitions");
    json base = t;
    base.erase("strata");
    read_outcomes(base, c.transitions.defaults, "transitions");
    c.transitions.overrides.clear();
    for (const auto& s : t.value("strata", json::array())) {
      const auto stratum = read_stratum(s, "transitions.strata");
      OutcomeProbabilities p = c.transitions.defaults;
      read_outcomes(s, p, "transitions.strata");
      c.transitions.overrides[stratum] = p;
    }
  }

  if (j.contains("durations")) {
    const auto& d = j.at("durations");
    only_keys(d, {"ward_to_icu", "ward_death", "ward_discharge", "icu_death", "icu_discharge",
                  "strata"},
              "durations");
    for (auto t : kAllTransitions) {
      const auto key = to_string(t);
      if (d.contains(key)) {
        c.durations.defaults[static_cast<std::size_t>(t)] = read_law(d.at(key), "durations." + key);
      }
    }
    c.durations.overrides.clear();
    for (const auto& s : d.value("strata", json::array())) {
      only_keys(s, {"sex", "age_band", "ward_to_icu", "ward_death", "ward_discharge", "icu_death",
                    "icu_discharge"},
                "durations.strata");
      const auto stratum = read_stratum(s, "durations.strata");
      for (auto t : kAllTransitions) {
        const auto key = to_string(t);
        if (s.contains(key)) {
          c.durations.overrides[{stratum, t}] = read_law(s.at(key), "durations.strata." + key);
        }
      }
    }
  }

  if (j.contains("demographics")) {
    const auto& d = j.at("demographics");
    only_keys(d, {"female_fraction", "age_bands"}, "demographics");
    if (d.contains("female_fraction")) {
      c.demographics.female_fraction = number(d, "female_fraction", "demographics");
    }
    if (d.contains("age_bands")) {
      c.demographics.age_ranges.clear();
      for (const auto& r : d.at("age_bands")) {
        only_keys(r, {"min", "max", "weight"}, "demographics.age_bands");
        c.demographics.age_ranges.push_back({number(r, "min", "demographics.age_bands"),
                                             number(r, "max", "demographics.age_bands"),
                                             number(r, "weight", "demographics.age_bands")});
      }
    }
  }
  validate(c);
  return c;
}

SimulationConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open config " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path.parent_path());
}

std::string to_json(const SimulationConfig& c) {
  nlohmann::ordered_json j;
  j["n_infected"] = c.n_infected;
  j["n_replications"] = c.n_replications;
  j["horizon_days"] = c.horizon_days;
  j["p_hospitalized"] = c.p_hospitalized;
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  j["admission_curve"] = {{"weights", c.admission_curve}};
  auto outcomes = [](const OutcomeProbabilities& p) {
    return nlohmann::ordered_json{
        {"ward", {{"to_icu", p.to_icu}, {"death", p.ward_death}, {"discharge", p.ward_discharge}}},
        {"icu", {{"death", p.icu_death}, {"discharge", p.icu_discharge}}}};
  };
  auto transitions = outcomes(c.transitions.defaults);
  transitions["strata"] = nlohmann::ordered_json::array();
  for (const auto& [s, p] : c.transitions.overrides) {
    auto entry = nlohmann::ordered_json{{"sex", to_string(s.sex)}, {"age_band", to_string(s.band)}};
    entry.update(outcomes(p));
    transitions["strata"].push_back(entry);
  }
  j["transitions"] = transitions;

  nlohmann::ordered_json durations;
  for (auto t : kAllTransitions) {
    durations[to_string(t)] = write_law(c.durations.defaults[static_cast<std::size_t>(t)]);
  }
  std::map<Stratum, nlohmann::ordered_json> strata;
  for (const auto& [key, law] : c.durations.overrides) {
    auto& entry = strata[key.first];
    if (entry.is_null()) {
      entry = {{"sex", to_string(key.first.sex)}, {"age_band", to_string(key.first.band)}};
    }
    entry[to_string(key.second)] = write_law(law);
  }
  durations["strata"] = nlohmann::ordered_json::array();
  for (auto& [_, entry] : strata) durations["strata"].push_back(entry);
  j["durations"] = durations;

  nlohmann::ordered_json demo;
  demo["female_fraction"] = c.demographics.female_fraction;
  demo["age_bands"] = nlohmann::ordered_json::array();
  for (const auto& r : c.demographics.age_ranges) {
    demo["age_bands"].push_back({{"min", r.min}, {"max", r.max}, {"weight", r.weight}});
  }
  j["demographics"] = demo;
  return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Simulation

namespace {

std::vector<double> cumulative(std::span<const double> weights) {
  std::vector<double> cdf(weights.size());
  std::partial_sum(weights.begin(), weights.end(), cdf.begin());
  const double total = cdf.back();
  for (auto& x : cdf) x /= total;
  cdf.back() = 1.0;
  return cdf;
}

// Draws an index of a three- or two-way outcome with renormalized weights.
std::size_t outcome(RandomStream& stream, std::initializer_list<double> weights) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  double u = stream.uniform() * total;
  std::size_t i = 0;
  for (double w : weights) {
    if (u < w) return i;
    u -= w;
    ++i;
  }
  // Rounding fallback: last outcome with positive weight.
  i = weights.size();
  for (auto it = std::rbegin(weights); it != std::rend(weights); ++it) {
    --i;
    if (*it > 0.0) return i;
  }
  return 0;
}

}  // namespace

Simulator::Simulator(SimulationConfig config) : config_(std::move(config)) {
  validate(config_);
  admission_cdf_ = cumulative(config_.admission_curve);
  std::vector<double> age_weights;
  for (const auto& r : config_.demographics.age_ranges) age_weights.push_back(r.weight);
  age_cdf_ = cumulative(age_weights);
}

SimulatedIndividual Simulator::individual(RandomStream& stream) const {
  SimulatedIndividual person;
  person.sex = stream.bernoulli(config_.demographics.female_fraction) ? Sex::Female : Sex::Male;
  const auto& range = config_.demographics.age_ranges[stream.discrete(age_cdf_)];
  person.age = range.min + stream.uniform() * (range.max - range.min);
  person.hospitalized = stream.bernoulli(config_.p_hospitalized);
  if (!person.hospitalized) return person;

  const Stratum stratum{person.sex, age_band(person.age)};
  const auto& p = config_.transitions.resolve(stratum);
  const auto& durations = config_.durations;

  person.admission_day = static_cast<int>(stream.discrete(admission_cdf_));
  int day = person.admission_day;
  person.trajectory.push_back({State::Ward, day});

  const auto ward = outcome(stream, {p.to_icu, p.ward_death, p.ward_discharge});
  if (ward == 0) {
    day += durations.resolve(stratum, Transition::WardToIcu).draw(stream);
    person.trajectory.push_back({State::Icu, day});
    const auto icu = outcome(stream, {p.icu_death, p.icu_discharge});
    const auto t = icu == 0 ? Transition::IcuDeath : Transition::IcuDischarge;
    day += durations.resolve(stratum, t).draw(stream);
    person.trajectory.push_back({icu == 0 ? State::Dead : State::Discharged, day});
  } else {
    const auto t = ward == 1 ? Transition::WardDeath : Transition::WardDischarge;
    day += durations.resolve(stratum, t).draw(stream);
    person.trajectory.push_back({ward == 1 ? State::Dead : State::Discharged, day});
  }
  return person;
}

void Simulator::run_replication(int replication, std::span<std::int32_t> counts,
                                std::int32_t& truncated) const {
  const int horizon = config_.horizon_days;
  auto stream = RandomStream::for_replication(config_.seed, static_cast<std::uint64_t>(replication));

  // Difference arrays per tally; one extra slot past the horizon.
  std::vector<std::int32_t> diff(kTallyCount * static_cast<std::size_t>(horizon + 1), 0);
  auto add = [&](Tally tally, int from, int to) {
    from = std::clamp(from, 0, horizon);
    to = std::clamp(to, 0, horizon);
    if (from >= to) return;
    auto* row = diff.data() + static_cast<std::size_t>(tally) * (horizon + 1);
    ++row[from];
    --row[to];
  };
  auto tally_of = [](State s) {
    switch (s) {
      case State::Ward: return Tally::Ward;
      case State::Icu: return Tally::Icu;
      case State::Dead: return Tally::Dead;
      case State::Discharged: return Tally::Discharged;
    }
    return Tally::Ward;
  };

  truncated = 0;
  for (int i = 0; i < config_.n_infected; ++i) {
    const auto person = individual(stream);
    if (!person.hospitalized) {
      add(Tally::NeverHospitalized, 0, horizon);
      continue;
    }
    add(Tally::NotYetAdmitted, 0, person.admission_day);
    const auto& path = person.trajectory;
    for (std::size_t k = 0; k < path.size(); ++k) {
      const int until = k + 1 < path.size() ? path[k + 1].day : horizon;
      add(tally_of(path[k].state), path[k].day, until);
    }
    if (path.back().day >= horizon) ++truncated;
  }

  for (std::size_t t = 0; t < kTallyCount; ++t) {
    const auto* row = diff.data() + t * (horizon + 1);
    auto* out = counts.data() + t * horizon;
    std::int32_t running = 0;
    for (int d = 0; d < horizon; ++d) {
      running += row[d];
      out[d] = running;
    }
  }
}

OccupancySeries Simulator::run() const {
  OccupancySeries s;
  s.n_infected = config_.n_infected;
  s.horizon_days = config_.horizon_days;
  s.replications = config_.n_replications;
  s.seed = config_.seed;
  const auto per_rep = kTallyCount * static_cast<std::size_t>(s.horizon_days);
  s.counts.assign(per_rep * s.replications, 0);
  s.truncated.assign(static_cast<std::size_t>(s.replications), 0);

  unsigned workers = config_.threads ? config_.threads : std::thread::hardware_concurrency();
  workers = std::clamp(workers, 1u, static_cast<unsigned>(s.replications));
  auto work = [&](unsigned worker) {
    for (int r = static_cast<int>(worker); r < s.replications; r += static_cast<int>(workers)) {
      run_replication(r, std::span(s.counts).subspan(per_rep * r, per_rep),
                      s.truncated[static_cast<std::size_t>(r)]);
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
  }

  // Reduction in replication order so the result is independent of workers.
  const double n = s.replications;
  for (std::size_t state = 0; state < kReportedCount; ++state) {
    auto& mean = s.mean[state];
    auto& sd = s.sd[state];
    mean.assign(static_cast<std::size_t>(s.horizon_days), 0.0);
    sd.assign(static_cast<std::size_t>(s.horizon_days), 0.0);
    for (int d = 0; d < s.horizon_days; ++d) {
      double sum = 0.0;
      for (int r = 0; r < s.replications; ++r) sum += s.count(r, static_cast<Tally>(state), d);
      const double m = sum / n;
      double ss = 0.0;
      for (int r = 0; r < s.replications; ++r) {
        const double x = s.count(r, static_cast<Tally>(state), d) - m;
        ss += x * x;
      }
      mean[static_cast<std::size_t>(d)] = m;
      sd[static_cast<std::size_t>(d)] = s.replications > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    }
  }
  return s;
}

std::int32_t OccupancySeries::count(int replication, Tally tally, int day) const {
  const auto index = (static_cast<std::size_t>(replication) * kTallyCount +
                      static_cast<std::size_t>(tally)) *
                         static_cast<std::size_t>(horizon_days) +
                     static_cast<std::size_t>(day);
  return counts[index];
}

std::int64_t OccupancySeries::total_truncated() const {
  return std::accumulate(truncated.begin(), truncated.end(), std::int64_t{0});
}

SimulatedIndividual simulate_individual(const SimulationConfig& config, RandomStream& stream) {
  return Simulator(config).individual(stream);
}

OccupancySeries simulate_outbreak(const SimulationConfig& config) {
  return Simulator(config).run();
}

// ---------------------------------------------------------------------------
// Output

void write_occupancy_csv(std::ostream& out, const OccupancySeries& s) {
  out << "day,mean_hw,sd_hw,mean_icu,sd_icu,mean_dead,sd_dead,mean_discharged,sd_discharged\n";
  for (int d = 0; d < s.horizon_days; ++d) {
    out << d;
    for (std::size_t state = 0; state < kReportedCount; ++state) {
      out << ',' << format_real(s.mean[state][static_cast<std::size_t>(d)]) << ','
          << format_real(s.sd[state][static_cast<std::size_t>(d)]);
    }
    out << '\n';
  }
}

OccupancySeries read_occupancy_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) fail(ErrorKind::Data, "occupancy CSV: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "day,mean_hw,sd_hw,mean_icu,sd_icu,mean_dead,sd_dead,mean_discharged,sd_discharged") {
    fail(ErrorKind::Data, "occupancy CSV: unexpected header");
  }
  OccupancySeries s;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> fields;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (cell.empty() || end != cell.c_str() + cell.size() || !std::isfinite(v)) {
        fail(ErrorKind::Data, "occupancy CSV: bad value on row " + std::to_string(row));
      }
      fields.push_back(v);
    }
    if (fields.size() != 9 || fields[0] != s.horizon_days) {
      fail(ErrorKind::Data, "occupancy CSV: malformed row " + std::to_string(row));
    }
    for (std::size_t state = 0; state < kReportedCount; ++state) {
      s.mean[state].push_back(fields[1 + 2 * state]);
      s.sd[state].push_back(fields[2 + 2 * state]);
    }
    ++s.horizon_days;
  }
  return s;
}

std::string metadata_json(const OccupancySeries& s) {
  nlohmann::ordered_json j;
  j["seed"] = s.seed;
  j["replications"] = s.replications;
  j["n_infected"] = s.n_infected;
  j["horizon_days"] = s.horizon_days;
  const auto truncated_reps =
      std::count_if(s.truncated.begin(), s.truncated.end(), [](auto n) { return n > 0; });
  j["truncated"] = {{"any", s.total_truncated() > 0},
                    {"individuals", s.total_truncated()},
                    {"replications", truncated_reps}};
  j["capacity_statistic"] = "mean";
  return j.dump(2) + "\n";
}

std::vector<CapacityRow> capacity_excess(const OccupancySeries& series, CapacityRange ward,
                                         CapacityRange icu) {
  if (ward.first > ward.last || icu.first > icu.last) {
    fail(ErrorKind::InvalidArgument, "capacity range is empty");
  }
  if (series.mean[0].size() != static_cast<std::size_t>(series.horizon_days) ||
      series.mean[1].size() != static_cast<std::size_t>(series.horizon_days)) {
    fail(ErrorKind::InvalidArgument, "occupancy series has no means");
  }
  std::vector<CapacityRow> rows;
  auto scan = [&](Resource resource, const std::vector<double>& demand, CapacityRange range) {
    for (int c = range.first; c <= range.last; ++c) {
      const auto days = std::count_if(demand.begin(), demand.end(), [&](double m) { return m > c; });
      rows.push_back({resource, c, static_cast<int>(days)});
    }
  };
  scan(Resource::Ward, series.mean[0], ward);
  scan(Resource::Icu, series.mean[1], icu);
  return rows;
}

namespace {
const char* resource_name(Resource r) { return r == Resource::Ward ? "hw" : "icu"; }
}  // namespace

void write_capacity_csv(std::ostream& out, std::span<const CapacityRow> rows) {
  out << "resource,capacity,days_exceeded\n";
  for (const auto& row : rows) {
    out << resource_name(row.resource) << ',' << row.capacity << ',' << row.days_exceeded << '\n';
  }
}

Comparison compare_conditional(const SimulationConfig& unconditional,
                               const SimulationConfig& conditional, CapacityRange ward,
                               CapacityRange icu) {
  if (unconditional.n_infected != conditional.n_infected ||
      unconditional.horizon_days != conditional.horizon_days ||
      unconditional.seed != conditional.seed) {
    fail(ErrorKind::InvalidArgument,
         "compare: configurations must share n_infected, horizon_days and seed");
  }
  Comparison c;
  c.unconditional = simulate_outbreak(unconditional);
  c.conditional = simulate_outbreak(conditional);
  for (std::size_t state = 0; state < kReportedCount; ++state) {
    auto& diff = c.mean_difference[state];
    for (int d = 0; d < unconditional.horizon_days; ++d) {
      const auto i = static_cast<std::size_t>(d);
      diff.push_back(c.conditional.mean[state][i] - c.unconditional.mean[state][i]);
      c.max_abs_difference[state] = std::max(c.max_abs_difference[state], std::abs(diff.back()));
    }
  }
  c.capacity_unconditional = capacity_excess(c.unconditional, ward, icu);
  c.capacity_conditional = capacity_excess(c.conditional, ward, icu);
  return c;
}

void write_comparison_csv(std::ostream& out, const Comparison& c) {
  out << "day,diff_hw,diff_icu,diff_dead,diff_discharged\n";
  for (std::size_t d = 0; d < c.mean_difference[0].size(); ++d) {
    out << d;
    for (std::size_t state = 0; state < kReportedCount; ++state) {
      out << ',' << format_real(c.mean_difference[state][d]);
    }
    out << '\n';
  }
}

void write_comparison_capacity_csv(std::ostream& out, const Comparison& c) {
  out << "resource,capacity,days_exceeded_unconditional,days_exceeded_conditional\n";
  for (std::size_t i = 0; i < c.capacity_unconditional.size(); ++i) {
    const auto& u = c.capacity_unconditional[i];
    out << resource_name(u.resource) << ',' << u.capacity << ',' << u.days_exceeded << ','
        << c.capacity_conditional[i].days_exceeded << '\n';
  }
}

std::string comparison_summary_json(const Comparison& c) {
  nlohmann::ordered_json j;
  const char* names[] = {"hw", "icu", "dead", "discharged"};
  for (std::size_t state = 0; state < kReportedCount; ++state) {
    j["max_abs_mean_difference"][names[state]] = c.max_abs_difference[state];
  }
  j["unconditional"] = nlohmann::ordered_json::parse(metadata_json(c.unconditional));
  j["conditional"] = nlohmann::ordered_json::parse(metadata_json(c.conditional));
  return j.dump(2) + "\n";
}

}  // namespace hospstay
