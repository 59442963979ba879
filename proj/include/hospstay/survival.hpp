#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace hospstay {

enum class Sex { Male, Female };

std::string to_string(Sex sex);
std::optional<Sex> parse_sex(std::string_view text);

/// One subject: follow-up time, whether the event was observed, and whether
/// the subject is known never to experience it.
struct Observation {
  double time = 0.0;  // days
  bool event = false;
  bool known_cure = false;
  std::optional<double> age;  // years
  std::optional<Sex> sex;
};

/// Throws Error(Data) when an observation breaks its invariants.
void validate(const Observation& obs);

/// Right-continuous step estimate of S(t) = P(Y > t).
///
/// The curve is 1 before the first jump, takes values[i] on
/// [jump_times[i], jump_times[i+1]) and stays at the plateau after the last
/// jump. max_time records the largest follow-up time behind the estimate
/// and is only used when exporting.
class SurvivalCurve {
 public:
  /// S == 1 with no jumps.
  SurvivalCurve() = default;

  /// Validates: times strictly increasing and >= 0, values in [0,1] and
  /// non-increasing, max_time >= last jump time.
  SurvivalCurve(std::vector<double> jump_times, std::vector<double> values,
                double max_time);

  double operator()(double t) const;

  const std::vector<double>& jump_times() const { return jump_times_; }
  const std::vector<double>& values() const { return values_; }
  double plateau() const { return values_.empty() ? 1.0 : values_.back(); }
  double max_time() const { return max_time_; }
  std::size_t size() const { return jump_times_.size(); }
  bool empty() const { return jump_times_.empty(); }

  /// (t, S) export: leading (0, 1) anchor, one row per jump, trailing
  /// (max_time, plateau).
  std::vector<std::pair<double, double>> points() const;

  /// Same step function, ignoring max_time.
  bool same_steps(const SurvivalCurve& other) const;

 private:
  std::vector<double> jump_times_;
  std::vector<double> values_;
  double max_time_ = 0.0;
};

/// Event probability p and latency curve S0 from S = (1 - p) + p S0.
struct CureModelEstimate {
  double p = 0.0;
  SurvivalCurve latency;
};

// Unconditional estimators. All throw Error(Data) on invalid input.

/// Kaplan-Meier; known_cure flags are treated as plain censoring.
SurvivalCurve km_estimate(std::span<const Observation> observations);

/// Kaplan-Meier on the subjects not known to be cured.
SurvivalCurve km_estimate_reduced(std::span<const Observation> observations);

/// Empirical survival of the uncensored times only.
SurvivalCurve empirical_estimate(std::span<const Observation> observations);

/// Product-limit estimator with known cures: at the i-th ordered subject
/// (1-based) with an observed event the curve is multiplied by
/// 1 - 1 / (n - i + 1 + sum_{j <= i} x_j), where x_j marks known cures. Known
/// cures therefore never leave the risk set.
SurvivalCurve npmcm_estimate(std::span<const Observation> observations);

/// 1 - plateau.
double event_probability(const SurvivalCurve& curve);

/// Share of subjects whose event was observed.
double empirical_event_probability(std::span<const Observation> observations);

/// Splits a curve into p = 1 - S(inf) and S0(t) = (S(t) - (1 - p)) / p.
CureModelEstimate latency(const SurvivalCurve& curve);

/// Processing order used by every product-limit estimator: ascending time,
/// then observed events, then known cures, then plain censoring; input order
/// breaks remaining ties.
std::vector<std::size_t> product_limit_order(
    std::span<const Observation> observations);

// Serialization.

/// `t,survival` CSV with the anchor and trailing rows of points().
void write_curve_csv(std::ostream& out, const SurvivalCurve& curve);
/// Reads the CSV written by write_curve_csv. Rows whose value does not drop
/// below the running value are treated as non-jumps.
SurvivalCurve read_curve_csv(std::istream& in);
/// `{"jump_times":[...],"values":[...],"plateau":x,"max_time":y}` plus an
/// optional event probability.
std::string curve_to_json(const SurvivalCurve& curve,
                          std::optional<double> event_probability = {});

/// 17 significant digits, enough to round-trip a double.
std::string format_real(double value);

}  // namespace hospstay
