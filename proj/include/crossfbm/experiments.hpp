#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "crossfbm/gaussian.hpp"
#include "crossfbm/montecarlo.hpp"
#include "crossfbm/sample_path.hpp"

namespace crossfbm {

/// Gaussian random-walk ladder overshoot constant -zeta(1/2)/sqrt(2 pi).
inline constexpr double kOvershootConstant = 0.5825971579390106;

struct EstimatorOptions {
  /// Run even when eps is below the resolution threshold 3 (T/n)^H.
  bool force = false;
  /// Test hook: multiply every generated path by this factor.
  double value_scale = 1.0;
  double ci_level = 0.95;
  ParallelOptions parallel;
};

/// Mean over M paths of eps^{1/H} K_{0,T}(eps, B) / T. Throws GuardViolation
/// when eps < 3 (T/n)^H unless options.force.
/// Diagnostics: the resolution ratio eps / (T/n)^H, the mean variation along
/// the sample-resolved Lebesgue partition per unit time, and for H = 1/2 the
/// overshoot-corrected mean (eps + 0.5826 sigma)^2 K / T with sigma the step std.
MonteCarloSummary estimate_cH_pathwise(HurstExponent h, double eps, std::size_t paths,
                                       const GeneratorConfig& generator, const EstimatorOptions& options = {});

/// Mean over M paths of Kbar_{0,T}(1, B) / T (level-sweep), generated on
/// [0, T] with generator.steps steps. The diagnostics carry the deterministic
/// bracket estimate <= c_H <= estimate + 1/T.
MonteCarloSummary estimate_cH_fekete(HurstExponent h, double horizon, std::size_t paths,
                                     const GeneratorConfig& generator, const EstimatorOptions& options = {});

enum class Direction { ratio_above_one, ratio_below_one, inconclusive };
std::string to_string(Direction d);

struct ConjectureReport {
  double hurst = 0.5;
  MonteCarloSummary chat;
  /// E|Z|^{1/H}, times value_scale^{1/H} when the scale hook is used.
  double moment = 0.0;
  double ratio = 0.0;
  ConfidenceInterval ratio_ci;
  Direction direction = Direction::inconclusive;
  /// What the conjectured inequality predicts (inconclusive at H = 1/2).
  Direction expected = Direction::inconclusive;
  /// Same ratio from the sample-resolved Lebesgue variation diagnostic.
  double sample_resolved_ratio = 0.0;
  std::vector<std::string> warnings;
};

struct ConjectureConfig {
  GeneratorConfig generator;
  std::size_t paths = 1000;
  /// eps = 0 selects 4 (T/n)^H.
  double eps = 0.0;
  EstimatorOptions options;
};

/// Compares c_H with E|Z|^{1/H}; reports the direction, never asserts it.
ConjectureReport conjecture_report(HurstExponent h, const ConjectureConfig& config);
nlohmann::json to_json(const ConjectureReport& r);

/// eps suggestion 4 (T/n)^H for parameter sets without published values.
double suggested_eps(HurstExponent h, double horizon, std::size_t steps);

struct FigureParams {
  double horizon = 1.0;
  std::size_t steps = 30000;
  double eps = 0.014;
  bool published = false;
};

/// Published (T, n, eps) for H in {0.4, 0.5, 0.6}; other H get T = 1,
/// n = 30000 and the suggested eps.
FigureParams figure_defaults(HurstExponent h);

struct FigureCurves {
  double hurst = 0.5;
  double eps = 0.0;
  std::vector<double> t;
  std::vector<double> v_deterministic;
  std::vector<double> v_lebesgue;
  /// Lebesgue stopping times (sample-resolved) and the cumulative variation there.
  std::vector<double> stopping_times;
  std::vector<double> v_at_stopping_times;
  double slope_deterministic = 0.0;
  double slope_lebesgue = 0.0;
  double r2_deterministic = 0.0;
  double r2_lebesgue = 0.0;
  std::vector<std::string> warnings;
};

/// Cumulative (1/H)-variation of a path along the uniform time grid of its
/// samples and along the uniform Lebesgue partition eps*Z, the latter taken
/// at the first sample after each hit.
FigureCurves figure_from_path(const SamplePath& w, HurstExponent h, double eps);
FigureCurves figure_variation_curves(HurstExponent h, double horizon, std::size_t steps, double eps,
                                     std::uint64_t seed);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};
LinearFit least_squares(std::span<const double> x, std::span<const double> y);

struct ConvergenceRow {
  double eps = 0.0;
  double mean_scaled_K = 0.0;
  double se_scaled_K = 0.0;
  std::size_t deterministic_stride = 1;
  double mean_deterministic = 0.0;
  double se_deterministic = 0.0;
};

/// For each eps: mean eps^{1/H} K / T over M paths and, on the same paths, the
/// (1/H)-variation per unit time along a uniform time partition of mesh close
/// to eps^{1/H}, whose limit is E|Z|^{1/H}.
std::vector<ConvergenceRow> convergence_sweep(HurstExponent h, const std::vector<double>& eps_values,
                                              std::size_t paths, const GeneratorConfig& generator,
                                              const EstimatorOptions& options = {});

}  // namespace crossfbm
