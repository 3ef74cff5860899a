#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "crossfbm/sample_path.hpp"

namespace crossfbm {

/// Partition of the real line given by strictly increasing breakpoints. The
/// uniform partition eps*Z is stored implicitly and covers every path.
class SpacePartition {
 public:
  static SpacePartition uniform(double eps);
  static SpacePartition from_breakpoints(std::vector<double> breakpoints);

  bool is_uniform() const noexcept { return uniform_; }
  /// Spacing of a uniform partition; 0 for explicit breakpoints.
  double spacing() const noexcept { return eps_; }
  const std::vector<double>& breakpoints() const noexcept { return points_; }

  /// Largest cell width. For explicit partitions this is over the listed cells.
  double mesh() const noexcept;
  bool covers(double lo, double hi) const noexcept;

  /// Level of breakpoint index k.
  double level(std::int64_t k) const noexcept {
    return uniform_ ? static_cast<double>(k) * eps_ : points_[static_cast<std::size_t>(k)];
  }
  /// Index of the largest breakpoint <= v.
  std::int64_t floor_index(double v) const noexcept;
  /// Index of the smallest breakpoint >= v.
  std::int64_t ceil_index(double v) const noexcept;
  bool on_level(double v) const noexcept;

 private:
  SpacePartition() = default;
  bool uniform_ = true;
  double eps_ = 0.0;
  std::vector<double> points_;
};

/// Successive hitting times T_1 < T_2 < ... of new breakpoints and the
/// breakpoint reached at each of them.
struct HittingSequence {
  std::vector<double> times;
  std::vector<double> levels;

  std::size_t size() const noexcept { return times.size(); }
  bool empty() const noexcept { return times.empty(); }
};

/// Hitting times of the Lebesgue partition generated by p along the
/// interpolant of w on the window. The window start is T_0.
HittingSequence lebesgue_times(const SpacePartition& p, const SamplePath& w, const Window& window);

/// Number of eps-level crossings K_{s,t}(eps, w + shift).
std::int64_t count_K(const SamplePath& w, double eps, const Window& window, double shift = 0.0);

struct BandCounts {
  std::int64_t up = 0;
  std::int64_t down = 0;
  /// Whether the window start lies strictly inside the band.
  bool starts_inside = false;
};

/// Completed up- and downcrossings of [level, level + eps] inside the window,
/// i.e. U_{s,t}(eps, w - level) and D_{s,t}(eps, w - level).
BandCounts band_crossings(const SamplePath& w, double eps, const Window& window, double level = 0.0);

std::int64_t count_U(const SamplePath& w, double eps, const Window& window, double level = 0.0);
std::int64_t count_D(const SamplePath& w, double eps, const Window& window, double level = 0.0);
/// U plus one if the path starts strictly inside the band.
std::int64_t count_U_bar(const SamplePath& w, double eps, const Window& window, double level = 0.0);

/// Hits of the uniform partition resolved to sample indices: the index of
/// the first sample at or after each exact hitting time, deduplicated.
/// Element 0 is always the first sample of the path.
std::vector<std::size_t> sample_resolved_lebesgue_indices(const SamplePath& w, double eps);

/// Emits a warning text when eps is below 3 (T/n)^H for the path's mean step.
std::optional<std::string> resolution_warning(const SamplePath& w, double eps, HurstExponent h);
/// The resolution threshold 3 (T/n)^H.
double resolution_threshold(double horizon, std::size_t steps, HurstExponent h);

struct CrossingReport {
  Window window;
  double epsilon = 0.0;
  double level = 0.0;
  double shift = 0.0;
  std::int64_t K = 0;
  std::int64_t U = 0;
  std::int64_t D = 0;
  HittingSequence hitting;
  std::vector<std::string> warnings;
};

/// Full report: K for w + shift, U/D for the band [level, level + eps],
/// and the hitting sequence of the uniform partition applied to w + shift.
CrossingReport crossing_report(const SamplePath& w, double eps, const Window& window, double level = 0.0,
                               double shift = 0.0, std::optional<HurstExponent> h = std::nullopt);

/// JSON text with fields window, epsilon, level, shift, K, U, D, hitting_times, hitting_levels, warnings.
std::string to_json(const CrossingReport& report);
CrossingReport crossing_report_from_json(const std::string& text);

}  // namespace crossfbm
