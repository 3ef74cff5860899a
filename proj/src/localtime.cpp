#include "crossfbm/localtime.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "crossfbm/crossings.hpp"
#include "crossfbm/errors.hpp"
#include "crossfbm/paths_io.hpp"

namespace crossfbm {

std::string to_string(LocalTimeEstimator e) {
  return e == LocalTimeEstimator::occupation ? "occupation" : "upcrossing";
}

LevelBins LevelBins::covering(double lo, double hi, double width) {
  if (!(width > 0.0)) throw std::invalid_argument("bin width must be positive");
  if (!(lo <= hi)) throw std::invalid_argument("bin range must satisfy lo <= hi");
  const double first = std::floor(lo / width + 0.5);
  const double last = std::floor(hi / width + 0.5);
  LevelBins b;
  b.width = width;
  b.first_center = first * width;
  b.count = static_cast<std::size_t>(last - first) + 1;
  // Guard against rounding at the outer edges.
  if (b.lower_edge(0) > lo) {
    b.first_center -= width;
    ++b.count;
  }
  if (b.lower_edge(b.count - 1) + width < hi) ++b.count;
  return b;
}

double LocalTimeField::mass(std::size_t j) const {
  double m = 0.0;
  for (const auto& row : values) m += row.at(j);
  return m * parameter;
}

double default_bin_width(const SamplePath& w) {
  const double range = w.max_value() - w.min_value();
  return range > 0.0 ? range / 512.0 : 1.0 / 512.0;
}

namespace {

// Adds the sojourn time of each linear segment to the bins it meets.
void accumulate_occupation(const SamplePath& piece, const LevelBins& bins, std::vector<double>& acc) {
  const auto t = piece.times();
  const auto v = piece.values();
  const double edge0 = bins.lower_edge(0);
  auto bin_of = [&](double x) -> std::int64_t {
    return static_cast<std::int64_t>(std::floor((x - edge0) / bins.width));
  };
  const auto last_bin = static_cast<std::int64_t>(bins.count) - 1;
  const double edge1 = edge0 + static_cast<double>(bins.count) * bins.width;
  // Time spent outside [edge0, edge1) is not deposited anywhere.
  for (std::size_t i = 1; i < v.size(); ++i) {
    const double dt = t[i] - t[i - 1];
    const double a = std::min(v[i - 1], v[i]);
    const double b = std::max(v[i - 1], v[i]);
    if (b < edge0 || a >= edge1) continue;
    if (a == b) {
      acc[static_cast<std::size_t>(std::clamp(bin_of(a), std::int64_t{0}, last_bin))] += dt;
      continue;
    }
    const bool inside = a >= edge0 && b < edge1;
    const std::int64_t k0 = std::clamp(bin_of(a), std::int64_t{0}, last_bin);
    const std::int64_t k1 = std::clamp(bin_of(b), std::int64_t{0}, last_bin);
    if (k0 == k1 && inside) {
      acc[static_cast<std::size_t>(k0)] += dt;
      continue;
    }
    const double rate = dt / (b - a);
    double used = 0.0;
    for (std::int64_t k = k0; k <= k1; ++k) {
      if (inside && k == k1) break;
      const double lo = std::max(a, edge0 + static_cast<double>(k) * bins.width);
      const double hi = std::min(b, edge0 + static_cast<double>(k + 1) * bins.width);
      const double share = std::max(0.0, hi - lo) * rate;
      acc[static_cast<std::size_t>(k)] += share;
      used += share;
    }
    // Fully covered segments deposit exactly dt; the top bin takes the remainder.
    if (inside) acc[static_cast<std::size_t>(k1)] += dt - used;
  }
}

}  // namespace

LocalTimeField occupation_local_time(const SamplePath& w, const std::vector<double>& times, const LevelBins& bins) {
  if (!(bins.width > 0.0) || bins.count == 0) throw std::invalid_argument("occupation bins need positive width");
  LocalTimeField f;
  f.estimator = LocalTimeEstimator::occupation;
  f.parameter = bins.width;
  f.times = times;
  f.levels.resize(bins.count);
  for (std::size_t i = 0; i < bins.count; ++i) f.levels[i] = bins.center(i);
  f.values.assign(bins.count, std::vector<double>(times.size(), 0.0));

  std::vector<double> acc(bins.count, 0.0);
  double prev = w.start_time();
  for (std::size_t j = 0; j < times.size(); ++j) {
    const double te = times[j];
    if (te < prev) throw std::invalid_argument("local time evaluation times must be increasing");
    require_window(w, {w.start_time(), te});
    if (te > prev) accumulate_occupation(w.restrict({prev, te}), bins, acc);
    for (std::size_t i = 0; i < bins.count; ++i) f.values[i][j] = acc[i] / bins.width;
    prev = te;
  }
  return f;
}

LocalTimeField occupation_local_time(const SamplePath& w, double t, const LevelBins& bins) {
  return occupation_local_time(w, std::vector<double>{t}, bins);
}

namespace {

double upcrossing_normalizer(HurstExponent h, double eps, std::optional<double> chat, bool normalize) {
  const double raw = std::pow(eps, h.inverse() - 1.0);
  if (!normalize) return raw;
  double c = 0.0;
  if (chat) {
    c = *chat;
  } else if (h.value() == 0.5) {
    c = 1.0;
  } else {
    throw ConfigError("upcrossing local time normalization needs a c_H estimate for H != 1/2");
  }
  if (!(c > 0.0)) throw ConfigError("c_H estimate must be positive");
  return 2.0 / c * raw;
}

}  // namespace

double upcrossing_local_time(const SamplePath& w, HurstExponent h, double t, double eps, double level,
                             std::optional<double> chat, bool normalize) {
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  const double scale = upcrossing_normalizer(h, eps, chat, normalize);
  const auto u = count_U(w, eps, {w.start_time(), t}, level);
  return scale * static_cast<double>(u);
}

LocalTimeField upcrossing_local_time_field(const SamplePath& w, HurstExponent h, const std::vector<double>& times,
                                           double eps, const std::vector<double>& levels,
                                           std::optional<double> chat, bool normalize) {
  const double scale = upcrossing_normalizer(h, eps, chat, normalize);
  LocalTimeField f;
  f.estimator = LocalTimeEstimator::upcrossing;
  f.parameter = eps;
  f.times = times;
  f.levels = levels;
  f.values.assign(levels.size(), std::vector<double>(times.size(), 0.0));
  for (std::size_t i = 0; i < levels.size(); ++i)
    for (std::size_t j = 0; j < times.size(); ++j)
      f.values[i][j] = scale * static_cast<double>(count_U(w, eps, {w.start_time(), times[j]}, levels[i]));
  return f;
}

std::vector<std::int64_t> upcrossings_on_level_grid(const SamplePath& w, double eps, double first, double spacing,
                                                    std::size_t count) {
  if (!(eps > 0.0) || !(spacing > 0.0)) throw std::invalid_argument("eps and spacing must be positive");
  std::vector<std::int64_t> diff(count + 1, 0);
  const auto v = w.values();
  // Same threshold bookkeeping as the band-crossing integral: levels in
  // [upper, y - eps] switch from "last touched bottom" to "reached top".
  // A level equal to `upper` is still eligible only if the path touched it
  // from above; right after an upcrossing it is not (open bound).
  double upper = v[0];
  bool upper_open = false;
  const auto n = static_cast<std::int64_t>(count);
  for (std::size_t i = 1; i < v.size(); ++i) {
    const double y = v[i];
    const double top = y - eps;
    if (top > upper || (top == upper && !upper_open)) {
      const double pos = (upper - first) / spacing;
      auto lo = static_cast<std::int64_t>(upper_open ? std::floor(pos) + 1.0 : std::ceil(pos));
      auto hi = static_cast<std::int64_t>(std::floor((top - first) / spacing));
      lo = std::max<std::int64_t>(lo, 0);
      hi = std::min<std::int64_t>(hi, n - 1);
      if (lo <= hi) {
        ++diff[static_cast<std::size_t>(lo)];
        --diff[static_cast<std::size_t>(hi + 1)];
      }
    }
    const bool touched = y <= upper;
    const double m = std::min(upper, y);
    if (top >= m) {
      upper = top;
      upper_open = true;
    } else {
      upper = m;
      if (touched) upper_open = false;
    }
  }
  std::vector<std::int64_t> u(count);
  std::int64_t run = 0;
  for (std::size_t i = 0; i < count; ++i) {
    run += diff[i];
    u[i] = run;
  }
  return u;
}

std::vector<double> occupation_cdf_on_grid(const SamplePath& w, double first, double spacing, std::size_t count) {
  std::vector<double> cdf(count, 0.0);
  std::vector<double> tail(count + 1, 0.0);
  const auto t = w.times();
  const auto v = w.values();
  const auto n = static_cast<std::int64_t>(count);
  auto first_at_or_above = [&](double z) {
    return std::clamp(static_cast<std::int64_t>(std::ceil((z - first) / spacing)), std::int64_t{0}, n);
  };
  for (std::size_t i = 1; i < v.size(); ++i) {
    const double dt = t[i] - t[i - 1];
    const double a = std::min(v[i - 1], v[i]);
    const double b = std::max(v[i - 1], v[i]);
    // Grid points z >= b receive the full duration.
    tail[static_cast<std::size_t>(first_at_or_above(b))] += dt;
    if (a == b) continue;
    const double rate = dt / (b - a);
    for (std::int64_t k = first_at_or_above(a); k < n; ++k) {
      const double z = first + static_cast<double>(k) * spacing;
      if (z >= b) break;
      if (z > a) cdf[static_cast<std::size_t>(k)] += (z - a) * rate;
    }
  }
  double run = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    run += tail[i];
    cdf[i] += run;
  }
  return cdf;
}

GridSupError uniform_grid_sup_error(const SamplePath& w, HurstExponent h, double t, int k, double chat,
                                    const GridSupOptions& options) {
  if (k < 1) throw std::invalid_argument("grid index k must be positive");
  require_window(w, {w.start_time(), t});
  GridSupError out;
  const double eps = std::pow(static_cast<double>(k), -6.0);
  const double spacing = std::pow(static_cast<double>(k), -7.0);
  out.band_width = eps;
  if (t == w.start_time()) return out;
  const SamplePath path = w.restrict({w.start_time(), t});
  const double lo = path.min_value(), hi = path.max_value();
  if (lo == hi) return out;

  const double i_lo = std::ceil((lo - 1.0) / spacing);
  const double i_hi = std::floor((hi + 1.0) / spacing);
  const double points = i_hi - i_lo + 1.0;
  if (points > static_cast<double>(options.max_grid_points))
    throw ResourceError("grid for k=" + std::to_string(k) + " has " + std::to_string(points) +
                        " points, above the cap");
  const auto count = static_cast<std::size_t>(points);
  out.grid_points = count;
  const double first = i_lo * spacing;

  const auto ups = upcrossings_on_level_grid(path, eps, first, spacing, count);
  const auto cdf_hi = occupation_cdf_on_grid(path, first + 0.5 * eps, spacing, count);
  const auto cdf_lo = occupation_cdf_on_grid(path, first - 0.5 * eps, spacing, count);
  const double scale = std::pow(eps, h.inverse() - 1.0);
  for (std::size_t i = 0; i < count; ++i) {
    const double occupation = (cdf_hi[i] - cdf_lo[i]) / eps;
    const double err = std::abs(scale * static_cast<double>(ups[i]) - 0.5 * chat * occupation);
    if (err > out.sup_error) {
      out.sup_error = err;
      out.argmax_level = first + static_cast<double>(i) * spacing;
    }
  }
  return out;
}

std::string local_time_csv(const LocalTimeField& f) {
  std::ostringstream os;
  os << "level";
  for (double t : f.times) os << ",t=" << format_double(t);
  os << '\n';
  for (std::size_t i = 0; i < f.levels.size(); ++i) {
    os << format_double(f.levels[i]);
    for (double x : f.values[i]) os << ',' << format_double(x);
    os << '\n';
  }
  return os.str();
}

std::string local_time_sidecar_json(const LocalTimeField& f) {
  nlohmann::json j;
  j["estimator"] = to_string(f.estimator);
  j["parameter"] = f.parameter;
  j["parameter_name"] = f.estimator == LocalTimeEstimator::occupation ? "bin_width" : "eps";
  j["levels"] = f.levels;
  j["times"] = f.times;
  return j.dump(2);
}

}  // namespace crossfbm
