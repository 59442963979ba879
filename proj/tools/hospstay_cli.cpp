// Command-line front end. Talks to the library only through hospstay.h.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "hospstay/hospstay.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitData = 2;

/// Thrown to leave a subcommand with a given exit status.
struct Exit {
  int code;
};

template <class T, void (*Destroy)(T*)>
struct Deleter {
  void operator()(T* p) const { Destroy(p); }
};

using Observations = std::unique_ptr<hs_observations, Deleter<hs_observations, hs_observations_destroy>>;
using Curve = std::unique_ptr<hs_curve, Deleter<hs_curve, hs_curve_destroy>>;
using LineList = std::unique_ptr<hs_linelist, Deleter<hs_linelist, hs_linelist_destroy>>;
using SimConfig = std::unique_ptr<hs_sim_config, Deleter<hs_sim_config, hs_sim_config_destroy>>;
using Occupancy = std::unique_ptr<hs_occupancy, Deleter<hs_occupancy, hs_occupancy_destroy>>;

void check(hs_status status, const std::string& stage) {
  if (status == HS_OK) return;
  std::cerr << "hospstay " << stage << ": " << hs_last_error() << '\n';
  throw Exit{status == HS_ERR_INVALID_ARGUMENT ? kExitValidation : kExitData};
}

[[noreturn]] void usage_error(const std::string& message) {
  std::cerr << "hospstay: " << message << '\n';
  throw Exit{kExitValidation};
}

/// Takes ownership of a library-allocated string.
std::string take(char* s) {
  std::string out = s ? s : "";
  hs_string_free(s);
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) {
    std::cerr << "hospstay: cannot write " << path << '\n';
    throw Exit{kExitData};
  }
}

struct Range {
  int first;
  int last;
};

Range parse_range(const std::string& text, const char* flag) {
  const auto colon = text.find(':');
  try {
    if (colon == std::string::npos) usage_error(std::string(flag) + " expects FIRST:LAST");
    std::size_t used = 0;
    const int first = std::stoi(text.substr(0, colon), &used);
    if (used != colon) usage_error(std::string(flag) + " expects FIRST:LAST");
    const auto tail = text.substr(colon + 1);
    const int last = std::stoi(tail, &used);
    if (used != tail.size()) usage_error(std::string(flag) + " expects FIRST:LAST");
    return {first, last};
  } catch (const std::logic_error&) {
    usage_error(std::string(flag) + " expects FIRST:LAST");
  }
}

LineList read_linelist(const std::string& path) {
  hs_linelist* raw = nullptr;
  check(hs_linelist_read_csv(path.c_str(), &raw), "ingest");
  LineList list(raw);
  for (size_t i = 0; i < hs_linelist_rejected_count(list.get()); ++i) {
    std::cerr << "hospstay: rejected " << hs_linelist_rejected(list.get(), i) << '\n';
  }
  return list;
}

hs_endpoint endpoint_of(const std::string& name) {
  hs_endpoint e{};
  check(hs_parse_endpoint(name.c_str(), &e), "endpoint");
  return e;
}

struct CovariateFlags {
  std::optional<double> age;
  std::string sex = "any";
  std::optional<double> bandwidth;
  std::string kernel = "epanechnikov";

  void add_to(CLI::App& app) {
    app.add_option("--age", age, "Query age in years (conditional estimators)")->check(CLI::NonNegativeNumber);
    app.add_option("--sex", sex, "Stratum: male, female or any")->capture_default_str();
    app.add_option("--bandwidth", bandwidth, "Kernel bandwidth in years (default: rule of thumb)")
        ->check(CLI::PositiveNumber);
    app.add_option("--kernel", kernel, "Kernel: epanechnikov or gaussian")->capture_default_str();
  }

  hs_covariate_query query(double fallback_age = 0.0) const {
    hs_covariate_query q{};
    q.age = age.value_or(fallback_age);
    check(hs_parse_sex(sex.c_str(), &q.sex), "--sex");
    check(hs_parse_kernel(kernel.c_str(), &q.kernel), "--kernel");
    q.bandwidth = bandwidth.value_or(0.0);
    return q;
  }
};

struct CapacityFlags {
  std::string hw = "15:90";
  std::string icu = "5:15";

  void add_to(CLI::App& app) {
    app.add_option("--hw-range", hw, "Ward capacities FIRST:LAST")->capture_default_str();
    app.add_option("--icu-range", icu, "ICU capacities FIRST:LAST")->capture_default_str();
  }
};

// -- subcommands ------------------------------------------------------------

struct IngestArgs {
  std::string input;
  std::string study_end;
  std::string endpoint;
  std::string output;
  std::string summary;
};

void run_ingest(const IngestArgs& a) {
  if (a.endpoint.empty() && a.summary.empty()) usage_error("ingest needs --endpoint or --summary");
  auto list = read_linelist(a.input);
  if (!a.summary.empty()) {
    char* json = nullptr;
    check(hs_linelist_summary_json(list.get(), a.study_end.c_str(), &json), "summary");
    write_text(a.summary, take(json));
  }
  if (!a.endpoint.empty()) {
    hs_observations* raw = nullptr;
    check(hs_linelist_derive(list.get(), endpoint_of(a.endpoint), a.study_end.c_str(), &raw),
          "ingest");
    Observations obs(raw);
    char* csv = nullptr;
    check(hs_observations_to_csv(obs.get(), &csv), "ingest");
    write_text(a.output, take(csv));
  }
}

struct EstimateArgs {
  std::string input;
  std::string endpoint;
  std::string study_end;
  std::string estimator = "npmcm";
  bool latency = false;
  std::string format = "csv";
  std::string output;
  CovariateFlags covariates;
};

Observations load_observations(const std::string& input, const std::string& endpoint,
                               const std::string& study_end) {
  hs_observations* raw = nullptr;
  if (endpoint.empty()) {
    check(hs_observations_read_csv(input.c_str(), &raw), "read observations");
    return Observations(raw);
  }
  if (study_end.empty()) usage_error("--endpoint needs --study-end");
  auto list = read_linelist(input);
  check(hs_linelist_derive(list.get(), endpoint_of(endpoint), study_end.c_str(), &raw), "ingest");
  return Observations(raw);
}

void run_estimate(const EstimateArgs& a) {
  hs_estimator estimator{};
  check(hs_parse_estimator(a.estimator.c_str(), &estimator), "--estimator");
  if (a.format != "csv" && a.format != "json") usage_error("--format must be csv or json");
  const bool conditional = estimator == HS_EST_BERAN || estimator == HS_EST_NPMCM_CONDITIONAL;
  if (conditional && !a.covariates.age) usage_error("--estimator " + a.estimator + " needs --age");
  const auto query = a.covariates.query();

  auto obs = load_observations(a.input, a.endpoint, a.study_end);
  hs_curve* raw = nullptr;
  check(hs_estimate(obs.get(), estimator, conditional ? &query : nullptr, &raw), "estimate");
  Curve curve(raw);
  if (a.latency) {
    hs_curve* lat = nullptr;
    check(hs_curve_latency(curve.get(), nullptr, &lat), "latency");
    curve.reset(lat);
  }
  // The empirical curve always ends at 0; its event probability is the
  // share of observed events instead.
  double p = hs_curve_event_probability(curve.get());
  if (estimator == HS_EST_EMPIRICAL && !a.latency) {
    check(hs_empirical_event_probability(obs.get(), &p), "estimate");
  }
  char* text = nullptr;
  check(hs_curve_serialize_with_probability(
            curve.get(), a.format == "json" ? HS_FORMAT_JSON : HS_FORMAT_CSV, p, &text),
        "estimate");
  write_text(a.output, take(text));
}

struct WeibullArgs {
  std::string input;
  std::string output;
};

void run_weibull(const WeibullArgs& a) {
  hs_curve* raw = nullptr;
  check(hs_curve_read_csv(a.input.c_str(), &raw), "read curve");
  Curve curve(raw);
  hs_fit_report report{};
  check(hs_fit_weibull(curve.get(), &report), "weibull");
  if (hs_curve_plateau(curve.get()) >= 0.5) {
    std::cerr << "hospstay weibull: warning: curve plateau >= 0.5; fit covers little mass\n";
  }
  char* json = nullptr;
  check(hs_fit_report_json(&report, &json), "weibull");
  write_text(a.output, take(json));
}

struct SimulateArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> replications;
  std::optional<int> threads;
  std::string linelist;
  std::string study_end;
  bool conditional = false;
  std::string out_dir;
  std::string write_config;
  CovariateFlags covariates;
  CapacityFlags capacity;
};

SimConfig build_config(const std::string& path, const SimulateArgs& a, bool conditional) {
  hs_sim_config* raw = nullptr;
  if (path.empty()) {
    check(hs_sim_config_default(&raw), "config");
  } else {
    check(hs_sim_config_read_json(path.c_str(), &raw), "config");
  }
  SimConfig config(raw);
  if (a.seed) check(hs_sim_config_set_seed(config.get(), *a.seed), "--seed");
  if (a.replications) check(hs_sim_config_set_replications(config.get(), *a.replications), "--replications");
  if (a.threads) check(hs_sim_config_set_threads(config.get(), *a.threads), "--threads");
  if (!a.linelist.empty()) {
    if (a.study_end.empty()) usage_error("--linelist needs --study-end");
    auto list = read_linelist(a.linelist);
    const auto query = a.covariates.query();
    char* warnings = nullptr;
    check(hs_sim_config_calibrate(config.get(), list.get(), a.study_end.c_str(), conditional ? 1 : 0,
                                  &query, &warnings),
          "calibrate");
    const auto text = take(warnings);
    if (!text.empty()) std::cerr << text;
  }
  return config;
}

std::string in_dir(const std::string& dir, const char* name) {
  return (std::filesystem::path(dir) / name).string();
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    std::cerr << "hospstay: cannot create " << dir << ": " << ec.message() << '\n';
    throw Exit{kExitData};
  }
}

void run_simulate(const SimulateArgs& a) {
  if (a.conditional && a.linelist.empty()) usage_error("--conditional needs --linelist");
  const auto hw = parse_range(a.capacity.hw, "--hw-range");
  const auto icu = parse_range(a.capacity.icu, "--icu-range");
  auto config = build_config(a.config, a, a.conditional);
  if (!a.write_config.empty()) {
    char* json = nullptr;
    check(hs_sim_config_to_json(config.get(), &json), "config");
    write_text(a.write_config, take(json));
  }
  hs_occupancy* raw = nullptr;
  check(hs_simulate(config.get(), &raw), "simulate");
  Occupancy occupancy(raw);

  ensure_dir(a.out_dir);
  char* text = nullptr;
  check(hs_occupancy_to_csv(occupancy.get(), &text), "simulate");
  write_text(in_dir(a.out_dir, "occupancy.csv"), take(text));
  check(hs_capacity_csv(occupancy.get(), hw.first, hw.last, icu.first, icu.last, &text), "capacity");
  write_text(in_dir(a.out_dir, "capacity.csv"), take(text));
  check(hs_occupancy_metadata_json(occupancy.get(), &text), "simulate");
  write_text(in_dir(a.out_dir, "metadata.json"), take(text));
}

struct CapacityArgs {
  std::string occupancy;
  std::string output;
  CapacityFlags capacity;
};

void run_capacity(const CapacityArgs& a) {
  const auto hw = parse_range(a.capacity.hw, "--hw-range");
  const auto icu = parse_range(a.capacity.icu, "--icu-range");
  hs_occupancy* raw = nullptr;
  check(hs_occupancy_read_csv(a.occupancy.c_str(), &raw), "read occupancy");
  Occupancy occupancy(raw);
  char* text = nullptr;
  check(hs_capacity_csv(occupancy.get(), hw.first, hw.last, icu.first, icu.last, &text), "capacity");
  write_text(a.output, take(text));
}

struct CompareArgs {
  SimulateArgs base;
  std::string conditional_config;
};

void run_compare(const CompareArgs& a) {
  const auto hw = parse_range(a.base.capacity.hw, "--hw-range");
  const auto icu = parse_range(a.base.capacity.icu, "--icu-range");
  SimConfig unconditional;
  SimConfig conditional;
  if (!a.conditional_config.empty()) {
    if (!a.base.linelist.empty()) usage_error("use either --conditional-config or --linelist");
    SimulateArgs plain = a.base;
    unconditional = build_config(a.base.config, plain, false);
    conditional = build_config(a.conditional_config, plain, false);
  } else if (!a.base.linelist.empty()) {
    unconditional = build_config(a.base.config, a.base, false);
    conditional = build_config(a.base.config, a.base, true);
  } else {
    usage_error("compare needs --conditional-config or --linelist");
  }
  char* diff = nullptr;
  char* capacity = nullptr;
  char* summary = nullptr;
  check(hs_compare(unconditional.get(), conditional.get(), hw.first, hw.last, icu.first, icu.last,
                   &diff, &capacity, &summary),
        "compare");
  ensure_dir(a.base.out_dir);
  write_text(in_dir(a.base.out_dir, "difference.csv"), take(diff));
  write_text(in_dir(a.base.out_dir, "capacity_compare.csv"), take(capacity));
  write_text(in_dir(a.base.out_dir, "compare.json"), take(summary));
}

void add_simulation_flags(CLI::App& cmd, SimulateArgs& a) {
  cmd.add_option("--seed", a.seed, "Override the configuration seed");
  cmd.add_option("--replications", a.replications, "Override the replication count")
      ->check(CLI::PositiveNumber);
  cmd.add_option("--threads", a.threads, "Worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
  cmd.add_option("--linelist", a.linelist, "Calibrate tables from this line-list CSV");
  cmd.add_option("--study-end", a.study_end, "Study end date YYYY-MM-DD (with --linelist)");
  cmd.add_option("--out-dir", a.out_dir, "Output directory")->required();
  a.covariates.add_to(cmd);
  a.capacity.add_to(cmd);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Length-of-stay estimation and hospital demand simulation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(hs_version()));

  IngestArgs ingest;
  auto* ingest_cmd = app.add_subcommand("ingest", "Derive endpoint observations from a line list");
  ingest_cmd->add_option("--input", ingest.input, "Line-list CSV")->required();
  ingest_cmd->add_option("--study-end", ingest.study_end, "Study end date YYYY-MM-DD")->required();
  ingest_cmd->add_option("--endpoint", ingest.endpoint,
                         "hw-to-icu, hw-death, hw-discharge, icu-death, icu-discharge, hospital-total");
  ingest_cmd->add_option("--output", ingest.output, "Observation CSV (default: stdout)");
  ingest_cmd->add_option("--summary", ingest.summary, "Write a JSON summary here");

  EstimateArgs estimate;
  auto* estimate_cmd = app.add_subcommand("estimate", "Estimate a survival curve");
  estimate_cmd->add_option("--input", estimate.input, "Observation CSV, or a line list with --endpoint")
      ->required();
  estimate_cmd->add_option("--endpoint", estimate.endpoint, "Treat --input as a line list and derive this endpoint");
  estimate_cmd->add_option("--study-end", estimate.study_end, "Study end date (with --endpoint)");
  estimate_cmd->add_option("--estimator", estimate.estimator,
                           "km, km-reduced, empirical, npmcm, beran, npmcm-cond")
      ->capture_default_str();
  estimate_cmd->add_flag("--latency", estimate.latency, "Emit the latency curve S0 instead of S");
  estimate_cmd->add_option("--format", estimate.format, "csv or json")->capture_default_str();
  estimate_cmd->add_option("--output", estimate.output, "Output path (default: stdout)");
  estimate.covariates.add_to(*estimate_cmd);

  WeibullArgs weibull;
  auto* weibull_cmd = app.add_subcommand("weibull", "Fit a Weibull law to a curve CSV");
  weibull_cmd->add_option("--input", weibull.input, "Curve CSV (t,survival)")->required();
  weibull_cmd->add_option("--output", weibull.output, "Fit report JSON (default: stdout)");

  SimulateArgs simulate;
  auto* simulate_cmd = app.add_subcommand("simulate", "Run the Monte Carlo outbreak simulator");
  simulate_cmd->add_option("--config", simulate.config, "Simulation config JSON (default: built-in)");
  simulate_cmd->add_flag("--conditional", simulate.conditional,
                         "With --linelist, calibrate per sex and age band");
  simulate_cmd->add_option("--write-config", simulate.write_config, "Save the effective config JSON");
  add_simulation_flags(*simulate_cmd, simulate);

  CapacityArgs capacity;
  auto* capacity_cmd = app.add_subcommand("capacity", "Days of demand above each capacity");
  capacity_cmd->add_option("--occupancy", capacity.occupancy, "occupancy.csv from simulate")->required();
  capacity_cmd->add_option("--output", capacity.output, "Output CSV (default: stdout)");
  capacity.capacity.add_to(*capacity_cmd);

  CompareArgs compare;
  auto* compare_cmd = app.add_subcommand("compare", "Compare unconditional and conditional simulations");
  compare_cmd->add_option("--config", compare.base.config, "Unconditional (or base) config JSON");
  compare_cmd->add_option("--conditional-config", compare.conditional_config, "Conditional config JSON");
  add_simulation_flags(*compare_cmd, compare.base);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (*ingest_cmd) run_ingest(ingest);
    if (*estimate_cmd) run_estimate(estimate);
    if (*weibull_cmd) run_weibull(weibull);
    if (*simulate_cmd) run_simulate(simulate);
    if (*capacity_cmd) run_capacity(capacity);
    if (*compare_cmd) run_compare(compare);
  } catch (const Exit& e) {
    return e.code;
  }
  return kExitOk;
}
