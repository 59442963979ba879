#pragma once

#include <string>
#include <vector>

#include "hospstay/random.hpp"
#include "hospstay/survival.hpp"

namespace hospstay {

/// Two-parameter Weibull law with survival exp(-(t/scale)^shape).
struct WeibullParams {
  double shape = 1.0;
  double scale = 1.0;  // days
};

void validate(const WeibullParams& params);

double weibull_survival(const WeibullParams& params, double t);

/// Inverse transform: scale * (-ln u)^(1/shape) for u in (0, 1].
double weibull_inverse(const WeibullParams& params, double u);

inline double weibull_sample(const WeibullParams& params, RandomStream& stream) {
  return weibull_inverse(params, stream.uniform_open());
}

struct FitOptions {
  int max_iterations = 500;
  /// Convergence threshold on the simplex diameter in (log shape, log scale).
  double tolerance = 1e-8;
  /// Record the best objective value after every iteration.
  bool trace = false;
};

struct FitReport {
  WeibullParams params;
  double sse = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> trace;
  std::vector<std::string> warnings;
};

/// Weighted least-squares Weibull fit to a step curve.
///
/// Minimizes sum_k m_k (S_W(t_k) - S(t_k))^2 over the jump times t_k, with
/// m_k the size of the jump at t_k, by Nelder-Mead on (log shape, log scale).
/// The start point matches the curve's median and upper quartile.
FitReport fit_weibull(const SurvivalCurve& curve, const FitOptions& options = {});

/// `{"shape":..,"scale":..,"sse":..,"iterations":..,"converged":..}`
std::string to_json(const FitReport& report);

}  // namespace hospstay
