#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace crossfbm {

/// Hurst parameter of a fractional Brownian motion, strictly inside (0, 1).
class HurstExponent {
 public:
  explicit HurstExponent(double value);

  double value() const noexcept { return value_; }
  /// 1/H, the natural variation order.
  double inverse() const noexcept { return 1.0 / value_; }

  friend bool operator==(const HurstExponent&, const HurstExponent&) = default;

 private:
  double value_;
};

/// Closed time interval [start, end] used to restrict path functionals.
struct Window {
  double start = 0.0;
  double end = 0.0;

  double length() const noexcept { return end - start; }
};

/// A discretely sampled continuous path, read as its piecewise-linear
/// interpolant between consecutive samples.
class SamplePath {
 public:
  SamplePath(std::vector<double> times, std::vector<double> values);

  /// Path on the uniform grid k*horizon/n, k = 0..n.
  static SamplePath uniform(double horizon, std::vector<double> values);

  std::span<const double> times() const noexcept { return times_; }
  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::size_t steps() const noexcept { return values_.size() - 1; }
  double start_time() const noexcept { return times_.front(); }
  double end_time() const noexcept { return times_.back(); }
  Window domain() const noexcept { return {times_.front(), times_.back()}; }

  /// Value of the interpolant at time t inside the domain.
  double at(double t) const;
  double min_value() const;
  double max_value() const;

  /// Interpolant restricted to [window.start, window.end]; interior vertices
  /// are kept and the endpoints are interpolated.
  SamplePath restrict(const Window& window) const;

  /// Pointwise affine image a*w + b on the same time grid.
  SamplePath affine(double scale, double offset) const;

  /// Time-changed copy with t -> time_scale * t.
  SamplePath rescale_time(double time_scale) const;

  friend bool operator==(const SamplePath&, const SamplePath&) = default;

 private:
  std::vector<double> times_;
  std::vector<double> values_;
};

/// Throws std::invalid_argument unless window lies inside the path domain.
void require_window(const SamplePath& w, const Window& window);

}  // namespace crossfbm
