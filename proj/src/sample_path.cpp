#include "crossfbm/sample_path.hpp"

#include <algorithm>
#include <cmath>

namespace crossfbm {

HurstExponent::HurstExponent(double value) : value_(value) {
  if (!(value > 0.0 && value < 1.0))
    throw std::invalid_argument("Hurst exponent must lie in (0,1), got " + std::to_string(value));
}

SamplePath::SamplePath(std::vector<double> times, std::vector<double> values)
    : times_(std::move(times)), values_(std::move(values)) {
  if (times_.size() != values_.size())
    throw std::invalid_argument("path times and values differ in length");
  if (times_.size() < 2) throw std::invalid_argument("path needs at least 2 samples");
  for (std::size_t i = 0; i < times_.size(); ++i) {
    if (!std::isfinite(times_[i]) || !std::isfinite(values_[i]))
      throw std::invalid_argument("path samples must be finite");
    if (i > 0 && !(times_[i] > times_[i - 1]))
      throw std::invalid_argument("path times must be strictly increasing");
  }
}

SamplePath SamplePath::uniform(double horizon, std::vector<double> values) {
  if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
  if (values.size() < 2) throw std::invalid_argument("path needs at least 2 samples");
  const std::size_t n = values.size() - 1;
  std::vector<double> times(values.size());
  for (std::size_t k = 0; k <= n; ++k) times[k] = horizon * static_cast<double>(k) / static_cast<double>(n);
  return SamplePath(std::move(times), std::move(values));
}

double SamplePath::at(double t) const {
  if (t < times_.front() || t > times_.back())
    throw std::invalid_argument("time outside path domain");
  auto it = std::lower_bound(times_.begin(), times_.end(), t);
  const auto j = static_cast<std::size_t>(it - times_.begin());
  if (times_[j] == t) return values_[j];
  const std::size_t i = j - 1;
  const double frac = (t - times_[i]) / (times_[j] - times_[i]);
  return values_[i] + frac * (values_[j] - values_[i]);
}

double SamplePath::min_value() const { return *std::min_element(values_.begin(), values_.end()); }
double SamplePath::max_value() const { return *std::max_element(values_.begin(), values_.end()); }

void require_window(const SamplePath& w, const Window& window) {
  if (!(window.start <= window.end)) throw std::invalid_argument("window start exceeds end");
  if (window.start < w.start_time() || window.end > w.end_time())
    throw std::invalid_argument("window outside path domain");
}

SamplePath SamplePath::restrict(const Window& window) const {
  require_window(*this, window);
  if (window.start == times_.front() && window.end == times_.back()) return *this;
  if (window.start == window.end) {
    // Degenerate window: a flat path of zero duration is not representable,
    // callers treat it as "no crossings" before reaching here.
    throw std::invalid_argument("window has zero length");
  }
  std::vector<double> t, v;
  auto first = std::upper_bound(times_.begin(), times_.end(), window.start);
  auto last = std::lower_bound(times_.begin(), times_.end(), window.end);
  t.reserve(static_cast<std::size_t>(last - first) + 2);
  v.reserve(t.capacity());
  t.push_back(window.start);
  v.push_back(at(window.start));
  for (auto it = first; it != last; ++it) {
    t.push_back(*it);
    v.push_back(values_[static_cast<std::size_t>(it - times_.begin())]);
  }
  t.push_back(window.end);
  v.push_back(at(window.end));
  return SamplePath(std::move(t), std::move(v));
}

SamplePath SamplePath::affine(double scale, double offset) const {
  std::vector<double> v(values_.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = scale * values_[i] + offset;
  return SamplePath(times_, std::move(v));
}

SamplePath SamplePath::rescale_time(double time_scale) const {
  if (!(time_scale > 0.0)) throw std::invalid_argument("time scale must be positive");
  std::vector<double> t(times_.size());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = time_scale * times_[i];
  return SamplePath(std::move(t), values_);
}

}  // namespace crossfbm
