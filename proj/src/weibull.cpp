#include "hospstay/weibull.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "hospstay/error.hpp"

namespace hospstay {

void validate(const WeibullParams& params) {
  if (!(params.shape > 0.0) || !(params.scale > 0.0) || !std::isfinite(params.shape) ||
      !std::isfinite(params.scale)) {
    fail(ErrorKind::InvalidArgument, "Weibull shape and scale must be finite and > 0");
  }
}

double weibull_survival(const WeibullParams& params, double t) {
  if (t <= 0.0) return 1.0;
  return std::exp(-std::pow(t / params.scale, params.shape));
}

double weibull_inverse(const WeibullParams& params, double u) {
  return params.scale * std::pow(-std::log(u), 1.0 / params.shape);
}

namespace {

struct Point {
  double t;
  double value;
  double mass;
};

using Vertex = std::array<double, 2>;  // (log shape, log scale)

// Smallest jump time at which the curve has dropped to `level` or below.
std::optional<double> quantile_time(const SurvivalCurve& curve, double level) {
  for (std::size_t i = 0; i < curve.size(); ++i) {
    if (curve.values()[i] <= level) return curve.jump_times()[i];
  }
  return std::nullopt;
}

Vertex initial_guess(const SurvivalCurve& curve) {
  // Weibull quantiles satisfy ln(-ln S) = k ln t - k ln lambda, so two
  // quantiles pin both parameters.
  const std::array<std::pair<double, double>, 2> level_pairs{{{0.5, 0.25}, {0.75, 0.5}}};
  for (const auto& [upper, lower] : level_pairs) {
    const auto t1 = quantile_time(curve, upper);
    const auto t2 = quantile_time(curve, lower);
    if (!t1 || !t2 || *t1 <= 0.0 || *t2 <= *t1) continue;
    const double shape = (std::log(-std::log(lower)) - std::log(-std::log(upper))) /
                         (std::log(*t2) - std::log(*t1));
    const double scale = *t1 / std::pow(-std::log(upper), 1.0 / shape);
    if (std::isfinite(shape) && shape > 0.0 && std::isfinite(scale) && scale > 0.0) {
      return {std::log(shape), std::log(scale)};
    }
  }
  const double last = std::max(curve.jump_times().back(), 1e-3);
  return {0.0, std::log(last)};
}

double objective(const std::vector<Point>& points, const Vertex& x) {
  const WeibullParams params{std::exp(x[0]), std::exp(x[1])};
  double sse = 0.0;
  for (const auto& p : points) {
    const double r = weibull_survival(params, p.t) - p.value;
    sse += p.mass * r * r;
  }
  return std::isfinite(sse) ? sse : std::numeric_limits<double>::infinity();
}

double distance(const Vertex& a, const Vertex& b) { return std::hypot(a[0] - b[0], a[1] - b[1]); }

}  // namespace

FitReport fit_weibull(const SurvivalCurve& curve, const FitOptions& options) {
  std::vector<Point> points;
  double previous = 1.0;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const double v = curve.values()[i];
    const double mass = previous - v;
    if (mass > 0.0) points.push_back({curve.jump_times()[i], v, mass});
    previous = v;
  }
  if (points.size() < 2) fail(ErrorKind::Data, "underdetermined fit");

  FitReport report;
  if (curve.plateau() >= 0.5) {
    report.warnings.push_back("curve plateau >= 0.5; Weibull fit covers less than half the mass");
  }

  constexpr double kReflect = 1.0;
  constexpr double kExpand = 2.0;
  constexpr double kContract = 0.5;
  constexpr double kShrink = 0.5;
  constexpr double kInitialStep = 0.1;

  const Vertex start = initial_guess(curve);
  std::array<Vertex, 3> simplex{start, Vertex{start[0] + kInitialStep, start[1]},
                                Vertex{start[0], start[1] + kInitialStep}};
  std::array<double, 3> f{};
  for (std::size_t i = 0; i < 3; ++i) f[i] = objective(points, simplex[i]);

  auto sort_simplex = [&] {
    std::array<std::size_t, 3> idx{0, 1, 2};
    std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return f[a] < f[b]; });
    const auto s = simplex;
    const auto g = f;
    for (std::size_t i = 0; i < 3; ++i) {
      simplex[i] = s[idx[i]];
      f[i] = g[idx[i]];
    }
  };
  auto diameter = [&] {
    return std::max({distance(simplex[0], simplex[1]), distance(simplex[0], simplex[2]),
                     distance(simplex[1], simplex[2])});
  };
  auto along = [](const Vertex& from, const Vertex& to, double t) {
    return Vertex{from[0] + t * (to[0] - from[0]), from[1] + t * (to[1] - from[1])};
  };

  sort_simplex();
  while (report.iterations < options.max_iterations) {
    if (diameter() < options.tolerance) {
      report.converged = true;
      break;
    }
    const Vertex centroid{(simplex[0][0] + simplex[1][0]) / 2.0,
                          (simplex[0][1] + simplex[1][1]) / 2.0};
    const Vertex reflected = along(centroid, simplex[2], -kReflect);
    const double fr = objective(points, reflected);

    bool shrink = false;
    if (fr < f[0]) {
      const Vertex expanded = along(centroid, reflected, kExpand);
      const double fe = objective(points, expanded);
      if (fe < fr) {
        simplex[2] = expanded;
        f[2] = fe;
      } else {
        simplex[2] = reflected;
        f[2] = fr;
      }
    } else if (fr < f[1]) {
      simplex[2] = reflected;
      f[2] = fr;
    } else if (fr < f[2]) {
      const Vertex contracted = along(centroid, reflected, kContract);
      const double fc = objective(points, contracted);
      if (fc <= fr) {
        simplex[2] = contracted;
        f[2] = fc;
      } else {
        shrink = true;
      }
    } else {
      const Vertex contracted = along(centroid, simplex[2], kContract);
      const double fc = objective(points, contracted);
      if (fc < f[2]) {
        simplex[2] = contracted;
        f[2] = fc;
      } else {
        shrink = true;
      }
    }
    if (shrink) {
      for (std::size_t i = 1; i < 3; ++i) {
        simplex[i] = along(simplex[0], simplex[i], kShrink);
        f[i] = objective(points, simplex[i]);
      }
    }
    sort_simplex();
    ++report.iterations;
    if (options.trace) report.trace.push_back(f[0]);
  }
  if (!report.converged && diameter() < options.tolerance) report.converged = true;

  if (!std::isfinite(f[0])) fail(ErrorKind::Numeric, "Weibull fit: non-finite objective");
  report.params = {std::exp(simplex[0][0]), std::exp(simplex[0][1])};
  report.sse = f[0];
  return report;
}

std::string to_json(const FitReport& report) {
  std::ostringstream out;
  out << "{\"shape\":" << format_real(report.params.shape)
      << ",\"scale\":" << format_real(report.params.scale)
      << ",\"sse\":" << format_real(report.sse) << ",\"iterations\":" << report.iterations
      << ",\"converged\":" << (report.converged ? "true" : "false") << "}\n";
  return out.str();
}

}  // namespace hospstay
