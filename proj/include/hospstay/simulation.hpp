#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hospstay/random.hpp"
#include "hospstay/strata.hpp"
#include "hospstay/weibull.hpp"

namespace hospstay {

enum class Transition { WardToIcu, WardDeath, WardDischarge, IcuDeath, IcuDischarge };

inline constexpr std::array<Transition, 5> kAllTransitions{
    Transition::WardToIcu, Transition::WardDeath, Transition::WardDischarge,
    Transition::IcuDeath, Transition::IcuDischarge};

/// ward_to_icu, ward_death, ward_discharge, icu_death, icu_discharge
std::string to_string(Transition transition);

/// Outcome probabilities of a ward stay and of an ICU stay. Each set is
/// renormalized to sum to one before sampling.
struct OutcomeProbabilities {
  double to_icu = 0.0845;
  double ward_death = 0.1561;
  double ward_discharge = 0.7953;
  double icu_death = 0.2222;
  double icu_discharge = 0.6820;
};

struct TransitionTable {
  OutcomeProbabilities defaults;
  std::map<Stratum, OutcomeProbabilities> overrides;

  const OutcomeProbabilities& resolve(const Stratum& stratum) const;
};

/// Length of stay in days: a Weibull law rounded up to whole days (minimum
/// one), or a fixed number of days.
struct DurationLaw {
  WeibullParams weibull;
  std::optional<int> fixed_days;

  int draw(RandomStream& stream) const;
};

/// Weibull with the given shape whose median is `median` days.
DurationLaw duration_from_median(double median, double shape);

struct DurationTable {
  std::array<DurationLaw, 5> defaults;  // indexed by Transition
  std::map<std::pair<Stratum, Transition>, DurationLaw> overrides;

  const DurationLaw& resolve(const Stratum& stratum, Transition transition) const;
};

struct AgeRange {
  double min = 0.0;
  double max = 100.0;
  double weight = 1.0;
};

/// Sex and age marginals of the simulated infected population.
struct Demographics {
  double female_fraction = 0.5;
  std::vector<AgeRange> age_ranges;
};

struct SimulationConfig {
  int n_infected = 1000;
  int n_replications = 1000;
  int horizon_days = 200;
  double p_hospitalized = 2453.0 / 10454.0;
  /// Probability of admission on day d, for d = 0 .. size()-1 < horizon_days.
  std::vector<double> admission_curve;
  TransitionTable transitions;
  DurationTable durations;
  Demographics demographics;
  std::uint64_t seed = 20200507;
  /// Worker threads for replications; 0 uses the hardware concurrency.
  unsigned threads = 0;

  /// Built-in configuration: published outcome probabilities with
  /// synthetic demographics, durations and admission pulse.
  static SimulationConfig defaults();
};

/// Weights rising linearly from `start` to `peak` and falling to `end`,
/// normalized to sum to one.
std::vector<double> triangular_admission_curve(int start, int peak, int end);

/// Throws Error(InvalidArgument) on the first broken invariant.
void validate(const SimulationConfig& config);

SimulationConfig parse_config(const std::string& json_text,
                              const std::filesystem::path& base_dir = {});
SimulationConfig load_config(const std::filesystem::path& path);
std::string to_json(const SimulationConfig& config);

/// `day,weight` CSV; weights are normalized.
std::vector<double> read_admission_csv(std::istream& in);

enum class State { Ward, Icu, Dead, Discharged };
std::string to_string(State state);

struct StateEntry {
  State state;
  int day;
  bool operator==(const StateEntry&) const = default;
};

struct SimulatedIndividual {
  Sex sex = Sex::Male;
  double age = 0.0;
  bool hospitalized = false;
  int admission_day = -1;
  std::vector<StateEntry> trajectory;
};

/// Per-day tallies. Every infected individual is in exactly one of them.
enum class Tally { Ward, Icu, Dead, Discharged, NotYetAdmitted, NeverHospitalized };
inline constexpr std::size_t kTallyCount = 6;
/// The four reported states (ward, ICU, cumulative deaths and discharges).
inline constexpr std::size_t kReportedCount = 4;

struct OccupancySeries {
  int n_infected = 0;
  int horizon_days = 0;
  int replications = 0;
  std::uint64_t seed = 0;

  /// counts[(rep * kTallyCount + tally) * horizon_days + day]; empty when the
  /// series was read back from its CSV summary.
  std::vector<std::int32_t> counts;
  /// Individuals per replication whose trajectory continues past the horizon.
  std::vector<std::int32_t> truncated;

  /// Across-replication mean and sample standard deviation per reported
  /// state, indexed [state][day].
  std::array<std::vector<double>, kReportedCount> mean;
  std::array<std::vector<double>, kReportedCount> sd;

  bool has_replications() const { return !counts.empty(); }
  std::int32_t count(int replication, Tally tally, int day) const;
  std::int64_t total_truncated() const;
};

class Simulator {
 public:
  explicit Simulator(SimulationConfig config);

  const SimulationConfig& config() const { return config_; }

  SimulatedIndividual individual(RandomStream& stream) const;

  /// All replications; replication r uses RandomStream::for_replication(seed, r).
  OccupancySeries run() const;

 private:
  void run_replication(int replication, std::span<std::int32_t> counts,
                       std::int32_t& truncated) const;

  SimulationConfig config_;
  std::vector<double> admission_cdf_;
  std::vector<double> age_cdf_;
};

SimulatedIndividual simulate_individual(const SimulationConfig& config, RandomStream& stream);
OccupancySeries simulate_outbreak(const SimulationConfig& config);

/// `day,mean_hw,sd_hw,mean_icu,sd_icu,mean_dead,sd_dead,mean_discharged,sd_discharged`
void write_occupancy_csv(std::ostream& out, const OccupancySeries& series);
OccupancySeries read_occupancy_csv(std::istream& in);
std::string metadata_json(const OccupancySeries& series);

enum class Resource { Ward, Icu };

struct CapacityRange {
  int first = 0;
  int last = 0;
};

inline constexpr CapacityRange kDefaultWardCapacities{15, 90};
inline constexpr CapacityRange kDefaultIcuCapacities{5, 15};

struct CapacityRow {
  Resource resource;
  int capacity;
  int days_exceeded;
};

/// Days on which mean demand strictly exceeds each capacity.
std::vector<CapacityRow> capacity_excess(const OccupancySeries& series,
                                         CapacityRange ward = kDefaultWardCapacities,
                                         CapacityRange icu = kDefaultIcuCapacities);

/// `resource,capacity,days_exceeded`
void write_capacity_csv(std::ostream& out, std::span<const CapacityRow> rows);

struct Comparison {
  OccupancySeries unconditional;
  OccupancySeries conditional;
  /// conditional minus unconditional mean, [state][day]
  std::array<std::vector<double>, kReportedCount> mean_difference;
  std::array<double, kReportedCount> max_abs_difference{};
  std::vector<CapacityRow> capacity_unconditional;
  std::vector<CapacityRow> capacity_conditional;
};

/// Runs both configurations; they must share n_infected, horizon and seed.
Comparison compare_conditional(const SimulationConfig& unconditional,
                               const SimulationConfig& conditional,
                               CapacityRange ward = kDefaultWardCapacities,
                               CapacityRange icu = kDefaultIcuCapacities);

/// `day,diff_hw,diff_icu,diff_dead,diff_discharged`
void write_comparison_csv(std::ostream& out, const Comparison& comparison);
/// `resource,capacity,days_exceeded_unconditional,days_exceeded_conditional`
void write_comparison_capacity_csv(std::ostream& out, const Comparison& comparison);
std::string comparison_summary_json(const Comparison& comparison);

}  // namespace hospstay
