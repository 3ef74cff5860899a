#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "crossfbm/sample_path.hpp"

namespace crossfbm {

enum class LocalTimeEstimator { occupation, upcrossing };

std::string to_string(LocalTimeEstimator e);

/// Uniform level bins [c - width/2, c + width/2) with centers c_i = first_center + i * width.
struct LevelBins {
  double first_center = 0.0;
  double width = 1.0;
  std::size_t count = 1;

  double center(std::size_t i) const noexcept { return first_center + static_cast<double>(i) * width; }
  double lower_edge(std::size_t i) const noexcept { return center(i) - 0.5 * width; }

  /// Bins of the given width, centered on multiples of width, covering [lo, hi].
  static LevelBins covering(double lo, double hi, double width);
};

/// Local-time estimates on a (level, time) grid. values[i][j] is the estimate
/// at level levels[i] and time times[j].
struct LocalTimeField {
  std::vector<double> levels;
  std::vector<double> times;
  std::vector<std::vector<double>> values;
  LocalTimeEstimator estimator = LocalTimeEstimator::occupation;
  /// Bin width for the occupation estimator, band width for the upcrossing one.
  double parameter = 0.0;

  /// sum_i values[i][j] * parameter; equals times[j] - start for the occupation estimator.
  double mass(std::size_t time_index) const;
};

/// Occupation-time estimate L(t, a) = (time in bin around a up to t) / width,
/// evaluated at each of `times` (increasing, inside the path domain).
/// Segment sojourn times are exact for the linear interpolant.
LocalTimeField occupation_local_time(const SamplePath& w, const std::vector<double>& times, const LevelBins& bins);
LocalTimeField occupation_local_time(const SamplePath& w, double t, const LevelBins& bins);

/// Default occupation bin width: (range)/512.
double default_bin_width(const SamplePath& w);

/// (2 / c_H) * eps^{1/H - 1} * U_{0,t}(eps, w - a). With chat empty the
/// un-normalized eps^{1/H - 1} * U is returned when normalize is false;
/// with normalize true and no chat, H = 1/2 uses c = 1 and other H throw ConfigError.
double upcrossing_local_time(const SamplePath& w, HurstExponent h, double t, double eps, double level,
                             std::optional<double> chat, bool normalize = true);

/// Upcrossing estimator on a level grid at several times (normalized as above).
LocalTimeField upcrossing_local_time_field(const SamplePath& w, HurstExponent h, const std::vector<double>& times,
                                           double eps, const std::vector<double>& levels,
                                           std::optional<double> chat, bool normalize = true);

struct GridSupError {
  double sup_error = 0.0;
  double argmax_level = 0.0;
  std::size_t grid_points = 0;
  double band_width = 0.0;
};

struct GridSupOptions {
  std::size_t max_grid_points = 50'000'000;
};

/// max over x in {i k^-7} intersected with [min - 1, max + 1] of
/// |k^{-6(1/H-1)} U_{0,t}(k^-6, w - x) - (chat/2) L(t, x)| where L uses the
/// occupation estimator with bin width k^-6 centered at x. A path whose
/// range on [0,t] is a single point has no local-time density; the result is 0.
GridSupError uniform_grid_sup_error(const SamplePath& w, HurstExponent h, double t, int k, double chat,
                                    const GridSupOptions& options = {});

/// U_{0,t}(eps, w - x_i) for all levels x_i = first + i * spacing, i < count,
/// in one sweep.
std::vector<std::int64_t> upcrossings_on_level_grid(const SamplePath& w, double eps, double first, double spacing,
                                                    std::size_t count);

/// Time spent with w <= z up to the end of the path, for z_i = first + i * spacing.
std::vector<double> occupation_cdf_on_grid(const SamplePath& w, double first, double spacing, std::size_t count);

/// CSV matrix (rows = levels, first column the level, header lists times).
std::string local_time_csv(const LocalTimeField& field);
/// JSON sidecar with estimator, parameter, level and time axes.
std::string local_time_sidecar_json(const LocalTimeField& field);

}  // namespace crossfbm
