#include "crossfbm/crossings.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "hit_sweep.hpp"

namespace crossfbm {

SpacePartition SpacePartition::uniform(double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw std::invalid_argument("partition spacing must be positive");
  SpacePartition p;
  p.uniform_ = true;
  p.eps_ = eps;
  return p;
}

SpacePartition SpacePartition::from_breakpoints(std::vector<double> breakpoints) {
  if (breakpoints.size() < 2) throw std::invalid_argument("partition needs at least two breakpoints");
  for (std::size_t i = 0; i < breakpoints.size(); ++i) {
    if (!std::isfinite(breakpoints[i])) throw std::invalid_argument("partition breakpoints must be finite");
    if (i > 0 && !(breakpoints[i] > breakpoints[i - 1]))
      throw std::invalid_argument("partition breakpoints must be strictly increasing");
  }
  SpacePartition p;
  p.uniform_ = false;
  p.points_ = std::move(breakpoints);
  return p;
}

double SpacePartition::mesh() const noexcept {
  if (uniform_) return eps_;
  double m = 0.0;
  for (std::size_t i = 1; i < points_.size(); ++i) m = std::max(m, points_[i] - points_[i - 1]);
  return m;
}

bool SpacePartition::covers(double lo, double hi) const noexcept {
  return uniform_ || (points_.front() <= lo && hi <= points_.back());
}

std::int64_t SpacePartition::floor_index(double v) const noexcept {
  if (uniform_) return static_cast<std::int64_t>(std::floor(v / eps_));
  auto it = std::upper_bound(points_.begin(), points_.end(), v);
  return static_cast<std::int64_t>(it - points_.begin()) - 1;
}

std::int64_t SpacePartition::ceil_index(double v) const noexcept {
  if (uniform_) return static_cast<std::int64_t>(std::ceil(v / eps_));
  auto it = std::lower_bound(points_.begin(), points_.end(), v);
  return static_cast<std::int64_t>(it - points_.begin());
}

bool SpacePartition::on_level(double v) const noexcept {
  if (uniform_) {
    const double q = v / eps_;
    return q == std::floor(q);
  }
  return std::binary_search(points_.begin(), points_.end(), v);
}

namespace {

struct PartitionGrid {
  const SpacePartition& p;
  std::int64_t floor_index(double v) const { return p.floor_index(v); }
  std::int64_t ceil_index(double v) const { return p.ceil_index(v); }
  bool on_level(double v) const { return p.on_level(v); }
};

void require_eps(double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw std::invalid_argument("eps must be positive");
}

}  // namespace

HittingSequence lebesgue_times(const SpacePartition& p, const SamplePath& w, const Window& window) {
  require_window(w, window);
  HittingSequence out;
  if (window.start == window.end) return out;
  const SamplePath path = w.restrict(window);
  if (!p.covers(path.min_value(), path.max_value()))
    throw std::invalid_argument("space partition does not cover the path range");
  const auto times = path.times();
  const auto values = path.values();
  PartitionGrid grid{p};
  detail::sweep_hits(values.size(), [&](std::size_t i) { return values[i]; }, grid,
                     [&](std::size_t i, std::int64_t first, std::int64_t last, int step) {
                       const double x = values[i - 1], y = values[i];
                       const double ta = times[i - 1], dt = times[i] - times[i - 1];
                       for (std::int64_t k = first;; k += step) {
                         const double lvl = p.level(k);
                         double t = ta + (lvl - x) / (y - x) * dt;
                         t = std::clamp(t, ta, times[i]);
                         if (!out.times.empty() && t < out.times.back()) t = out.times.back();
                         out.times.push_back(t);
                         out.levels.push_back(lvl);
                         if (k == last) break;
                       }
                     });
  return out;
}

std::int64_t count_K(const SamplePath& w, double eps, const Window& window, double shift) {
  require_eps(eps);
  require_window(w, window);
  if (window.start == window.end) return 0;
  const SamplePath path = w.restrict(window);
  const auto values = path.values();
  const SpacePartition grid_p = SpacePartition::uniform(eps);
  PartitionGrid grid{grid_p};
  std::int64_t hits = 0;
  const bool on = detail::sweep_hits(
      values.size(), [&](std::size_t i) { return values[i] + shift; }, grid,
      [&](std::size_t, std::int64_t first, std::int64_t last, int step) { hits += (last - first) * step + 1; });
  return detail::k_from_hits(hits, on);
}

BandCounts band_crossings(const SamplePath& w, double eps, const Window& window, double level) {
  require_eps(eps);
  require_window(w, window);
  BandCounts out;
  if (window.start == window.end) return out;
  const SamplePath path = w.restrict(window);
  const auto v = path.values();
  const double top = level + eps;
  // side: -1 last extreme at/below level, +1 at/above top, 0 none yet.
  int side = 0;
  out.starts_inside = v[0] > level && v[0] < top;
  for (double y : v) {
    if (y <= level) {
      if (side == 1) ++out.down;
      side = -1;
    } else if (y >= top) {
      if (side == -1) ++out.up;
      side = 1;
    }
  }
  return out;
}

std::int64_t count_U(const SamplePath& w, double eps, const Window& window, double level) {
  return band_crossings(w, eps, window, level).up;
}

std::int64_t count_D(const SamplePath& w, double eps, const Window& window, double level) {
  return band_crossings(w, eps, window, level).down;
}

std::int64_t count_U_bar(const SamplePath& w, double eps, const Window& window, double level) {
  const BandCounts c = band_crossings(w, eps, window, level);
  return c.up + (c.starts_inside ? 1 : 0);
}

std::vector<std::size_t> sample_resolved_lebesgue_indices(const SamplePath& w, double eps) {
  require_eps(eps);
  const auto values = w.values();
  const SpacePartition grid_p = SpacePartition::uniform(eps);
  PartitionGrid grid{grid_p};
  std::vector<std::size_t> idx{0};
  detail::sweep_hits(values.size(), [&](std::size_t i) { return values[i]; }, grid,
                     [&](std::size_t i, std::int64_t, std::int64_t, int) {
                       if (idx.back() != i) idx.push_back(i);
                     });
  return idx;
}

double resolution_threshold(double horizon, std::size_t steps, HurstExponent h) {
  return 3.0 * std::pow(horizon / static_cast<double>(steps), h.value());
}

std::optional<std::string> resolution_warning(const SamplePath& w, double eps, HurstExponent h) {
  const double threshold = resolution_threshold(w.end_time() - w.start_time(), w.steps(), h);
  if (eps >= threshold) return std::nullopt;
  std::ostringstream os;
  os << "eps=" << eps << " is below the resolution threshold 3(T/n)^H=" << threshold
     << "; sub-sample crossings are invisible and counts are biased low";
  return os.str();
}

CrossingReport crossing_report(const SamplePath& w, double eps, const Window& window, double level, double shift,
                               std::optional<HurstExponent> h) {
  CrossingReport r;
  r.window = window;
  r.epsilon = eps;
  r.level = level;
  r.shift = shift;
  r.K = count_K(w, eps, window, shift);
  const BandCounts b = band_crossings(w, eps, window, level);
  r.U = b.up;
  r.D = b.down;
  r.hitting = lebesgue_times(SpacePartition::uniform(eps), shift == 0.0 ? w : w.affine(1.0, shift), window);
  if (h) {
    if (auto msg = resolution_warning(w, eps, *h)) r.warnings.push_back(*msg);
  }
  return r;
}

std::string to_json(const CrossingReport& r) {
  nlohmann::json j;
  j["window"] = {r.window.start, r.window.end};
  j["epsilon"] = r.epsilon;
  j["level"] = r.level;
  j["shift"] = r.shift;
  j["K"] = r.K;
  j["U"] = r.U;
  j["D"] = r.D;
  j["hitting_times"] = r.hitting.times;
  j["hitting_levels"] = r.hitting.levels;
  j["warnings"] = r.warnings;
  return j.dump();
}

CrossingReport crossing_report_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  CrossingReport r;
  r.window = {j.at("window").at(0).get<double>(), j.at("window").at(1).get<double>()};
  r.epsilon = j.at("epsilon").get<double>();
  r.level = j.value("level", 0.0);
  r.shift = j.value("shift", 0.0);
  r.K = j.at("K").get<std::int64_t>();
  r.U = j.at("U").get<std::int64_t>();
  r.D = j.at("D").get<std::int64_t>();
  r.hitting.times = j.at("hitting_times").get<std::vector<double>>();
  r.hitting.levels = j.at("hitting_levels").get<std::vector<double>>();
  if (j.contains("warnings")) r.warnings = j.at("warnings").get<std::vector<std::string>>();
  return r;
}

}  // namespace crossfbm
