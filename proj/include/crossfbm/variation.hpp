#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "crossfbm/crossings.hpp"
#include "crossfbm/sample_path.hpp"

namespace crossfbm {

/// Truncated variation sup_pi sum max(|w_v - w_u| - eps, 0) over time
/// partitions of the window; eps = 0 gives the total variation.
double truncated_variation(const SamplePath& w, double eps, const Window& window);

/// Integral over levels a of U_{s,t}(eps, w - a) + D_{s,t}(eps, w - a).
double band_crossing_integral(const SamplePath& w, double eps, const Window& window);

enum class KbarMethod { level_sweep, quadrature };

std::string to_string(KbarMethod m);
KbarMethod parse_kbar_method(const std::string& name);

struct KbarOptions {
  KbarMethod method = KbarMethod::level_sweep;
  /// Midpoint subdivisions for the quadrature method.
  std::size_t subdivisions = 64;
  /// Level-sweep refuses paths with more local extrema than this.
  std::size_t max_extrema = 10'000'000;
};

/// Shift-averaged crossing count eps^{-1} * integral over rho in [-eps/2, eps/2)
/// of K_{s,t}(eps, w + rho).
double kbar(const SamplePath& w, double eps, const Window& window, const KbarOptions& options = {});

/// Number of strict local extrema among the interior samples.
std::size_t count_extrema(const SamplePath& w);

/// Variation along the Lebesgue partition of a space partition.
struct LebesgueVariation {
  /// sum over cells [a,b] of (b-a)^{1/H} (U + D)(b - a, w - a)
  double band_sum = 0.0;
  /// sum over the Lebesgue partition including the first partial cell
  /// [T_0, T_1]: sum_n |w(T_n) - w(T_{n-1})|^{1/H}
  double partition_sum = 0.0;
  /// |w(T_1) - w_s|^{1/H} when w_s is not a breakpoint, else 0.
  double boundary_term = 0.0;
  /// For uniform partitions: K_{s,t}(eps, w) and eps^{1/H} K.
  std::int64_t K = 0;
  double scaled_K = 0.0;
  /// Whether every identity checked for this partition held.
  bool identity_holds = true;
};

/// Throws std::logic_error when the crossing identities between band counts,
/// the hitting sequence and K fail (they are exact on piecewise-linear paths).
LebesgueVariation lebesgue_variation(const SpacePartition& p, const SamplePath& w, const Window& window,
                                     HurstExponent h);

/// sum |w(t_{i+1}) - w(t_i)|^p over the time partition t_0 < ... < t_k.
double deterministic_variation(const SamplePath& w, std::span<const double> partition, double p);

/// Uniform partition of the window into `cells` cells.
std::vector<double> uniform_time_partition(const Window& window, std::size_t cells);

/// K(eps, w + shift) / K(eps, w); DegeneratePathError when the denominator is 0.
double horizontal_roughness_ratio(const SamplePath& w, double eps, double shift, const Window& window);

}  // namespace crossfbm
