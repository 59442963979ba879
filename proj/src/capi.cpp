// extern "C" surface over the C++ core.

#include "hospstay/hospstay.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <new>
#include <sstream>

#include "hospstay/calibrate.hpp"
#include "hospstay/conditional.hpp"
#include "hospstay/error.hpp"
#include "hospstay/linelist.hpp"
#include "hospstay/simulation.hpp"
#include "hospstay/survival.hpp"
#include "hospstay/weibull.hpp"

struct hs_observations {
  std::vector<hospstay::Observation> items;
};

struct hs_curve {
  hospstay::SurvivalCurve curve;
};

struct hs_linelist {
  hospstay::LineList list;
  std::vector<std::string> rejected_text;
};

struct hs_sim_config {
  hospstay::SimulationConfig config;
};

struct hs_occupancy {
  hospstay::OccupancySeries series;
};

namespace {

using namespace hospstay;

thread_local std::string last_error;

hs_status status_of(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return HS_ERR_INVALID_ARGUMENT;
    case ErrorKind::Data: return HS_ERR_DATA;
    case ErrorKind::Io: return HS_ERR_IO;
    case ErrorKind::Numeric: return HS_ERR_NUMERIC;
  }
  return HS_ERR_INTERNAL;
}

// Runs `body`, translating exceptions into a status and hs_last_error().
template <class F>
hs_status guarded(F&& body) {
  try {
    body();
    last_error.clear();
    return HS_OK;
  } catch (const Error& e) {
    last_error = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
  } catch (const std::exception& e) {
    last_error = e.what();
  } catch (...) {
    last_error = "unknown error";
  }
  return HS_ERR_INTERNAL;
}

void require(bool ok, const char* what) {
  if (!ok) fail(ErrorKind::InvalidArgument, std::string("null argument: ") + what);
}

char* duplicate(const std::string& s) {
  auto* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

std::ifstream open_input(const char* path) {
  require(path != nullptr, "path");
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, std::string("cannot open ") + path);
  return in;
}

Date study_end_date(const char* text) {
  require(text != nullptr, "study_end");
  const auto date = parse_date(text);
  if (!date) fail(ErrorKind::InvalidArgument, std::string("invalid study end date '") + text + "'");
  return *date;
}

CovariateQuery to_query(const hs_covariate_query& q) {
  CovariateQuery out{q.age, SexFilter::Any};
  switch (q.sex) {
    case HS_SEX_MALE: out.sex = SexFilter::Male; break;
    case HS_SEX_FEMALE: out.sex = SexFilter::Female; break;
    case HS_SEX_ANY: out.sex = SexFilter::Any; break;
    default: fail(ErrorKind::InvalidArgument, "query sex must be male, female or any");
  }
  return out;
}

KernelConfig to_kernel(const hs_covariate_query& q) {
  KernelConfig k;
  k.kernel = q.kernel == HS_KERNEL_GAUSSIAN ? Kernel::Gaussian : Kernel::Epanechnikov;
  if (q.bandwidth > 0.0) k.bandwidth = q.bandwidth;
  return k;
}

}  // namespace

extern "C" {

const char* hs_version(void) { return "0.1.0"; }

const char* hs_last_error(void) { return last_error.c_str(); }

void hs_string_free(char* s) { std::free(s); }

hs_status hs_parse_estimator(const char* name, hs_estimator* out) {
  return guarded([&] {
    require(name && out, "name/out");
    static const std::pair<const char*, hs_estimator> table[] = {
        {"km", HS_EST_KM},       {"km-reduced", HS_EST_KM_REDUCED},
        {"empirical", HS_EST_EMPIRICAL}, {"npmcm", HS_EST_NPMCM},
        {"beran", HS_EST_BERAN}, {"npmcm-cond", HS_EST_NPMCM_CONDITIONAL}};
    for (const auto& [text, value] : table) {
      if (std::strcmp(name, text) == 0) {
        *out = value;
        return;
      }
    }
    fail(ErrorKind::InvalidArgument, std::string("unknown estimator '") + name + "'");
  });
}

hs_status hs_parse_endpoint(const char* name, hs_endpoint* out) {
  return guarded([&] {
    require(name && out, "name/out");
    const auto e = parse_endpoint(name);
    if (!e) fail(ErrorKind::InvalidArgument, std::string("unknown endpoint '") + name + "'");
    *out = static_cast<hs_endpoint>(*e);
  });
}

hs_status hs_parse_kernel(const char* name, hs_kernel* out) {
  return guarded([&] {
    require(name && out, "name/out");
    const auto k = parse_kernel(name);
    if (!k) fail(ErrorKind::InvalidArgument, std::string("unknown kernel '") + name + "'");
    *out = *k == Kernel::Gaussian ? HS_KERNEL_GAUSSIAN : HS_KERNEL_EPANECHNIKOV;
  });
}

hs_status hs_parse_sex(const char* name, hs_sex* out) {
  return guarded([&] {
    require(name && out, "name/out");
    const auto s = parse_sex_filter(name);
    if (!s) fail(ErrorKind::InvalidArgument, std::string("unknown sex '") + name + "'");
    *out = *s == SexFilter::Any ? HS_SEX_ANY : *s == SexFilter::Male ? HS_SEX_MALE : HS_SEX_FEMALE;
  });
}

// -- observations -----------------------------------------------------------

hs_status hs_observations_create(hs_observations** out) {
  return guarded([&] {
    require(out, "out");
    *out = new hs_observations{};
  });
}

hs_status hs_observations_add(hs_observations* obs, double time, int event, int known_cure,
                              double age, hs_sex sex) {
  return guarded([&] {
    require(obs, "obs");
    Observation o;
    o.time = time;
    o.event = event != 0;
    o.known_cure = known_cure != 0;
    if (age >= 0.0) o.age = age;
    if (sex == HS_SEX_MALE) o.sex = Sex::Male;
    if (sex == HS_SEX_FEMALE) o.sex = Sex::Female;
    validate(o);
    obs->items.push_back(o);
  });
}

size_t hs_observations_size(const hs_observations* obs) { return obs ? obs->items.size() : 0; }

hs_status hs_observations_read_csv(const char* path, hs_observations** out) {
  return guarded([&] {
    require(out, "out");
    auto in = open_input(path);
    auto items = read_observations_csv(in);
    *out = new hs_observations{std::move(items)};
  });
}

hs_status hs_observations_to_csv(const hs_observations* obs, char** out) {
  return guarded([&] {
    require(obs && out, "obs/out");
    EndpointDataset dataset;
    dataset.observations = obs->items;
    std::ostringstream s;
    write_endpoint_csv(s, dataset);
    *out = duplicate(s.str());
  });
}

hs_status hs_empirical_event_probability(const hs_observations* obs, double* out) {
  return guarded([&] {
    require(obs && out, "obs/out");
    *out = empirical_event_probability(obs->items);
  });
}

void hs_observations_destroy(hs_observations* obs) { delete obs; }

// -- line lists -------------------------------------------------------------

hs_status hs_linelist_read_csv(const char* path, hs_linelist** out) {
  return guarded([&] {
    require(out, "out");
    auto in = open_input(path);
    auto result = std::make_unique<hs_linelist>();
    result->list = parse_linelist(in);
    for (const auto& d : result->list.rejected) {
      result->rejected_text.push_back("row " + std::to_string(d.row) + ", column " + d.column +
                                      ": " + d.message);
    }
    *out = result.release();
  });
}

size_t hs_linelist_size(const hs_linelist* list) { return list ? list->list.records.size() : 0; }

size_t hs_linelist_rejected_count(const hs_linelist* list) {
  return list ? list->rejected_text.size() : 0;
}

const char* hs_linelist_rejected(const hs_linelist* list, size_t index) {
  if (!list || index >= list->rejected_text.size()) return nullptr;
  return list->rejected_text[index].c_str();
}

hs_status hs_linelist_derive(const hs_linelist* list, hs_endpoint endpoint, const char* study_end,
                             hs_observations** out) {
  return guarded([&] {
    require(list && out, "list/out");
    if (endpoint < HS_ENDPOINT_HW_TO_ICU || endpoint > HS_ENDPOINT_HOSPITAL_TOTAL) {
      fail(ErrorKind::InvalidArgument, "unknown endpoint");
    }
    auto dataset = derive_endpoint(list->list.records, static_cast<Endpoint>(endpoint),
                                   study_end_date(study_end));
    *out = new hs_observations{std::move(dataset.observations)};
  });
}

hs_status hs_linelist_summary_json(const hs_linelist* list, const char* study_end, char** out) {
  return guarded([&] {
    require(list && out, "list/out");
    *out = duplicate(to_json(summarize(list->list.records, study_end_date(study_end))));
  });
}

void hs_linelist_destroy(hs_linelist* list) { delete list; }

// -- curves -----------------------------------------------------------------

hs_status hs_estimate(const hs_observations* obs, hs_estimator estimator,
                      const hs_covariate_query* query, hs_curve** out) {
  return guarded([&] {
    require(obs && out, "obs/out");
    SurvivalCurve curve;
    switch (estimator) {
      case HS_EST_KM: curve = km_estimate(obs->items); break;
      case HS_EST_KM_REDUCED: curve = km_estimate_reduced(obs->items); break;
      case HS_EST_EMPIRICAL: curve = empirical_estimate(obs->items); break;
      case HS_EST_NPMCM: curve = npmcm_estimate(obs->items); break;
      case HS_EST_BERAN:
      case HS_EST_NPMCM_CONDITIONAL: {
        if (!query) fail(ErrorKind::InvalidArgument, "conditional estimator needs a covariate query");
        const auto q = to_query(*query);
        const auto k = to_kernel(*query);
        curve = estimator == HS_EST_BERAN ? beran_estimate(obs->items, q, k)
                                          : npmcm_conditional_estimate(obs->items, q, k);
        break;
      }
      default: fail(ErrorKind::InvalidArgument, "unknown estimator");
    }
    *out = new hs_curve{std::move(curve)};
  });
}

hs_status hs_curve_read_csv(const char* path, hs_curve** out) {
  return guarded([&] {
    require(out, "out");
    auto in = open_input(path);
    *out = new hs_curve{read_curve_csv(in)};
  });
}

hs_status hs_curve_latency(const hs_curve* curve, double* p, hs_curve** latency_out) {
  return guarded([&] {
    require(curve && latency_out, "curve/latency");
    auto estimate = latency(curve->curve);
    if (p) *p = estimate.p;
    *latency_out = new hs_curve{std::move(estimate.latency)};
  });
}

double hs_curve_evaluate(const hs_curve* curve, double t) {
  return curve ? curve->curve(t) : std::nan("");
}

double hs_curve_plateau(const hs_curve* curve) {
  return curve ? curve->curve.plateau() : std::nan("");
}

double hs_curve_event_probability(const hs_curve* curve) {
  return curve ? event_probability(curve->curve) : std::nan("");
}

size_t hs_curve_jump_count(const hs_curve* curve) { return curve ? curve->curve.size() : 0; }

hs_status hs_curve_jump(const hs_curve* curve, size_t index, double* t, double* s) {
  return guarded([&] {
    require(curve && t && s, "curve/t/s");
    if (index >= curve->curve.size()) fail(ErrorKind::InvalidArgument, "jump index out of range");
    *t = curve->curve.jump_times()[index];
    *s = curve->curve.values()[index];
  });
}

hs_status hs_curve_serialize_with_probability(const hs_curve* curve, hs_format format,
                                              double event_probability, char** out) {
  return guarded([&] {
    require(curve && out, "curve/out");
    if (format == HS_FORMAT_JSON) {
      *out = duplicate(curve_to_json(curve->curve, event_probability));
    } else {
      std::ostringstream s;
      write_curve_csv(s, curve->curve);
      *out = duplicate(s.str());
    }
  });
}

hs_status hs_curve_serialize(const hs_curve* curve, hs_format format, char** out) {
  if (!curve) return hs_curve_serialize_with_probability(curve, format, 0.0, out);
  return hs_curve_serialize_with_probability(curve, format, event_probability(curve->curve), out);
}

void hs_curve_destroy(hs_curve* curve) { delete curve; }

// -- fitting ----------------------------------------------------------------

hs_status hs_fit_weibull(const hs_curve* curve, hs_fit_report* out) {
  return guarded([&] {
    require(curve && out, "curve/out");
    const auto report = fit_weibull(curve->curve);
    *out = {report.params.shape, report.params.scale, report.sse, report.iterations,
            report.converged ? 1 : 0};
  });
}

hs_status hs_fit_report_json(const hs_fit_report* report, char** out) {
  return guarded([&] {
    require(report && out, "report/out");
    FitReport r;
    r.params = {report->shape, report->scale};
    r.sse = report->sse;
    r.iterations = report->iterations;
    r.converged = report->converged != 0;
    *out = duplicate(to_json(r));
  });
}

// -- simulation -------------------------------------------------------------

hs_status hs_sim_config_default(hs_sim_config** out) {
  return guarded([&] {
    require(out, "out");
    *out = new hs_sim_config{SimulationConfig::defaults()};
  });
}

hs_status hs_sim_config_read_json(const char* path, hs_sim_config** out) {
  return guarded([&] {
    require(path && out, "path/out");
    *out = new hs_sim_config{load_config(path)};
  });
}

hs_status hs_sim_config_to_json(const hs_sim_config* config, char** out) {
  return guarded([&] {
    require(config && out, "config/out");
    *out = duplicate(to_json(config->config));
  });
}

hs_status hs_sim_config_set_seed(hs_sim_config* config, uint64_t seed) {
  return guarded([&] {
    require(config, "config");
    config->config.seed = seed;
  });
}

hs_status hs_sim_config_set_replications(hs_sim_config* config, int replications) {
  return guarded([&] {
    require(config, "config");
    if (replications <= 0) fail(ErrorKind::InvalidArgument, "replications must be positive");
    config->config.n_replications = replications;
  });
}

hs_status hs_sim_config_set_threads(hs_sim_config* config, int threads) {
  return guarded([&] {
    require(config, "config");
    if (threads < 0) fail(ErrorKind::InvalidArgument, "threads must be >= 0");
    config->config.threads = static_cast<unsigned>(threads);
  });
}

hs_status hs_sim_config_calibrate(hs_sim_config* config, const hs_linelist* list,
                                  const char* study_end, int conditional,
                                  const hs_covariate_query* query, char** warnings) {
  return guarded([&] {
    require(config && list, "config/list");
    CalibrationOptions options;
    options.conditional = conditional != 0;
    if (query) options.kernel = to_kernel(*query);
    auto updated = config->config;
    const auto notes = calibrate(updated, list->list.records, study_end_date(study_end), options);
    validate(updated);
    config->config = std::move(updated);
    if (warnings) {
      std::string text;
      for (const auto& n : notes) text += n + "\n";
      *warnings = duplicate(text);
    }
  });
}

void hs_sim_config_destroy(hs_sim_config* config) { delete config; }

hs_status hs_simulate(const hs_sim_config* config, hs_occupancy** out) {
  return guarded([&] {
    require(config && out, "config/out");
    *out = new hs_occupancy{simulate_outbreak(config->config)};
  });
}

hs_status hs_occupancy_read_csv(const char* path, hs_occupancy** out) {
  return guarded([&] {
    require(out, "out");
    auto in = open_input(path);
    *out = new hs_occupancy{read_occupancy_csv(in)};
  });
}

int hs_occupancy_days(const hs_occupancy* occupancy) {
  return occupancy ? occupancy->series.horizon_days : 0;
}

double hs_occupancy_mean(const hs_occupancy* occupancy, hs_state state, int day) {
  if (!occupancy || state < HS_STATE_HW || state > HS_STATE_DISCHARGED || day < 0 ||
      day >= occupancy->series.horizon_days) {
    return std::nan("");
  }
  return occupancy->series.mean[static_cast<std::size_t>(state)][static_cast<std::size_t>(day)];
}

hs_status hs_occupancy_to_csv(const hs_occupancy* occupancy, char** out) {
  return guarded([&] {
    require(occupancy && out, "occupancy/out");
    std::ostringstream s;
    write_occupancy_csv(s, occupancy->series);
    *out = duplicate(s.str());
  });
}

hs_status hs_occupancy_metadata_json(const hs_occupancy* occupancy, char** out) {
  return guarded([&] {
    require(occupancy && out, "occupancy/out");
    *out = duplicate(metadata_json(occupancy->series));
  });
}

hs_status hs_capacity_csv(const hs_occupancy* occupancy, int hw_first, int hw_last, int icu_first,
                          int icu_last, char** out) {
  return guarded([&] {
    require(occupancy && out, "occupancy/out");
    const auto rows =
        capacity_excess(occupancy->series, {hw_first, hw_last}, {icu_first, icu_last});
    std::ostringstream s;
    write_capacity_csv(s, rows);
    *out = duplicate(s.str());
  });
}

void hs_occupancy_destroy(hs_occupancy* occupancy) { delete occupancy; }

hs_status hs_compare(const hs_sim_config* unconditional, const hs_sim_config* conditional,
                     int hw_first, int hw_last, int icu_first, int icu_last,
                     char** difference_csv, char** capacity_csv, char** summary_json) {
  return guarded([&] {
    require(unconditional && conditional, "configs");
    const auto c = compare_conditional(unconditional->config, conditional->config,
                                       {hw_first, hw_last}, {icu_first, icu_last});
    std::string diff, cap, summary;
    {
      std::ostringstream s;
      write_comparison_csv(s, c);
      diff = s.str();
    }
    {
      std::ostringstream s;
      write_comparison_capacity_csv(s, c);
      cap = s.str();
    }
    summary = comparison_summary_json(c);
    if (difference_csv) *difference_csv = duplicate(diff);
    if (capacity_csv) *capacity_csv = duplicate(cap);
    if (summary_json) *summary_json = duplicate(summary);
  });
}

}  // extern "C"
