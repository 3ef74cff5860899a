#include "crossfbm/variation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "crossfbm/errors.hpp"

namespace crossfbm {

namespace {

void require_eps(double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw std::invalid_argument("eps must be positive");
}

std::vector<double> window_values(const SamplePath& w, const Window& window) {
  require_window(w, window);
  if (window.start == window.end) return {w.at(window.start)};
  const SamplePath p = w.restrict(window);
  return {p.values().begin(), p.values().end()};
}

// Up/down traversals of the closed band [lo, hi] by a piecewise-linear sequence.
std::pair<std::int64_t, std::int64_t> band_traversals(std::span<const double> v, double lo, double hi) {
  std::int64_t up = 0, down = 0;
  int side = 0;
  for (double y : v) {
    if (y <= lo) {
      if (side == 1) ++down;
      side = -1;
    } else if (y >= hi) {
      if (side == -1) ++up;
      side = 1;
    }
  }
  return {up, down};
}

bool close_rel(double a, double b, double tol = 1e-9) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

// One interval of grid offsets u in [lo, hi) sharing the Lebesgue state of
// the grid u + Z: either sitting on level u + j, or (before the first hit)
// strictly between u + j and u + j + 1.
struct OffsetPiece {
  double lo;
  double hi;
  std::int64_t j;
  bool on;
};

// Exact integral over u in [0,1) of K for the grid u + Z on normalized
// values q (path / eps). Each monotone segment moves every offset's state by
// a formula that is constant on the two sides of frac(q_end), so the state
// stays a short list of offset intervals.
double kbar_level_sweep(std::span<const double> q) {
  std::vector<OffsetPiece> pieces;
  std::vector<OffsetPiece> next;
  {
    const double f0 = std::floor(q[0]);
    const double u0 = q[0] - f0;
    const auto j0 = static_cast<std::int64_t>(f0);
    if (u0 > 0.0) pieces.push_back({0.0, u0, j0, false});
    pieces.push_back({u0, 1.0, j0 - 1, false});
  }
  double total = 0.0;
  for (std::size_t i = 1; i < q.size(); ++i) {
    const double x = q[i - 1], y = q[i];
    if (y == x) continue;
    const double fy = std::floor(y);
    const double uy = y - fy;
    const auto jy = static_cast<std::int64_t>(fy);
    next.clear();
    auto apply = [&](double lo, double hi, std::int64_t j, bool on, bool left_of_split) {
      if (!(hi > lo)) return;
      std::int64_t hits = 0;
      std::int64_t nj = j;
      if (y > x) {
        const std::int64_t top = left_of_split ? jy : jy - 1;
        if (top > j) {
          hits = top - j;
          nj = top;
        }
      } else {
        const std::int64_t bottom = left_of_split ? jy + 1 : jy;
        const std::int64_t from = on ? j - 1 : j;
        if (bottom <= from) {
          hits = from - bottom + 1;
          nj = bottom;
        }
      }
      bool non = on;
      if (hits > 0) {
        total += static_cast<double>(on ? hits : hits - 1) * (hi - lo);
        non = true;
      }
      if (!next.empty() && next.back().j == nj && next.back().on == non && next.back().hi == lo)
        next.back().hi = hi;
      else
        next.push_back({lo, hi, nj, non});
    };
    for (const OffsetPiece& pc : pieces) {
      if (pc.hi <= uy) {
        apply(pc.lo, pc.hi, pc.j, pc.on, true);
      } else if (pc.lo >= uy) {
        apply(pc.lo, pc.hi, pc.j, pc.on, false);
      } else {
        apply(pc.lo, uy, pc.j, pc.on, true);
        apply(uy, pc.hi, pc.j, pc.on, false);
      }
    }
    pieces.swap(next);
  }
  return total;
}

}  // namespace

double truncated_variation(const SamplePath& w, double eps, const Window& window) {
  if (!(eps >= 0.0) || !std::isfinite(eps)) throw std::invalid_argument("eps must be nonnegative");
  const std::vector<double> v = window_values(w, window);
  // Single pass over alternating eps-significant extremes: the value is the
  // sum over consecutive extremes of (|move| - eps).
  double tv = 0.0;
  int dir = 0;
  double lo = v[0], hi = v[0];
  double anchor = 0.0, extreme = 0.0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    const double y = v[i];
    if (dir == 0) {
      lo = std::min(lo, y);
      hi = std::max(hi, y);
      if (y - lo > eps) {
        dir = 1;
        anchor = lo;
        extreme = y;
      } else if (hi - y > eps) {
        dir = -1;
        anchor = hi;
        extreme = y;
      }
    } else if (dir == 1) {
      if (y > extreme) {
        extreme = y;
      } else if (extreme - y > eps) {
        tv += extreme - anchor - eps;
        anchor = extreme;
        extreme = y;
        dir = -1;
      }
    } else {
      if (y < extreme) {
        extreme = y;
      } else if (y - extreme > eps) {
        tv += anchor - extreme - eps;
        anchor = extreme;
        extreme = y;
        dir = 1;
      }
    }
  }
  if (dir != 0) tv += std::abs(extreme - anchor) - eps;
  return tv;
}

double band_crossing_integral(const SamplePath& w, double eps, const Window& window) {
  require_eps(eps);
  const std::vector<double> v = window_values(w, window);
  // For a fixed level a the band automaton is "above" for a < lower,
  // "below" for a >= upper and undecided in between; a vertex y flips
  // every level in [y, lower) to below (a downcrossing each) and every
  // level in [upper, y - eps] to above (an upcrossing each).
  double lower = v[0] - eps;
  double upper = v[0];
  double total = 0.0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    const double y = v[i];
    if (lower > y) total += lower - y;
    if (y - eps > upper) total += (y - eps) - upper;
    lower = std::min(std::max(lower, y - eps), y);
    upper = std::max(std::min(upper, y), y - eps);
  }
  return total;
}

std::string to_string(KbarMethod m) { return m == KbarMethod::level_sweep ? "level-sweep" : "quadrature"; }

KbarMethod parse_kbar_method(const std::string& name) {
  if (name == "level-sweep") return KbarMethod::level_sweep;
  if (name == "quadrature") return KbarMethod::quadrature;
  throw std::invalid_argument("unknown kbar method: " + name);
}

std::size_t count_extrema(const SamplePath& w) {
  const auto v = w.values();
  std::size_t count = 0;
  int prev = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    const int d = (v[i] > v[i - 1]) - (v[i] < v[i - 1]);
    if (d == 0) continue;
    if (prev != 0 && d != prev) ++count;
    prev = d;
  }
  return count;
}

double kbar(const SamplePath& w, double eps, const Window& window, const KbarOptions& options) {
  require_eps(eps);
  require_window(w, window);
  if (window.start == window.end) return 0.0;
  if (options.method == KbarMethod::quadrature) {
    if (options.subdivisions == 0) throw std::invalid_argument("quadrature needs at least one subdivision");
    const double m = static_cast<double>(options.subdivisions);
    double sum = 0.0;
    for (std::size_t i = 0; i < options.subdivisions; ++i) {
      const double rho = -0.5 * eps + (static_cast<double>(i) + 0.5) * eps / m;
      sum += static_cast<double>(count_K(w, eps, window, rho));
    }
    return sum / m;
  }
  const SamplePath path = w.restrict(window);
  if (count_extrema(path) > options.max_extrema)
    throw ResourceError("level-sweep kbar refused: path has more than " + std::to_string(options.max_extrema) +
                        " extrema");
  std::vector<double> q(path.values().begin(), path.values().end());
  for (double& x : q) x /= eps;
  return kbar_level_sweep(q);
}

LebesgueVariation lebesgue_variation(const SpacePartition& p, const SamplePath& w, const Window& window,
                                     HurstExponent h) {
  require_window(w, window);
  LebesgueVariation out;
  if (window.start == window.end) return out;
  const SamplePath path = w.restrict(window);
  const double lo = path.min_value(), hi = path.max_value();
  if (!p.covers(lo, hi)) throw std::invalid_argument("space partition does not cover the path range");
  const double order = h.inverse();
  const auto v = path.values();

  std::int64_t traversals = 0;
  if (p.is_uniform()) {
    const double eps = p.spacing();
    std::vector<double> q(v.begin(), v.end());
    for (double& x : q) x /= eps;
    const auto k_lo = static_cast<std::int64_t>(std::floor(lo / eps)) - 1;
    const auto k_hi = static_cast<std::int64_t>(std::ceil(hi / eps)) + 1;
    for (std::int64_t k = k_lo; k <= k_hi; ++k) {
      const auto [u, d] = band_traversals(q, static_cast<double>(k), static_cast<double>(k + 1));
      traversals += u + d;
    }
    out.band_sum = std::pow(eps, order) * static_cast<double>(traversals);
  } else {
    const auto& b = p.breakpoints();
    for (std::size_t i = 0; i + 1 < b.size(); ++i) {
      if (b[i + 1] < lo || b[i] > hi) continue;
      const auto [u, d] = band_traversals(v, b[i], b[i + 1]);
      traversals += u + d;
      out.band_sum += std::pow(b[i + 1] - b[i], order) * static_cast<double>(u + d);
    }
  }

  const HittingSequence hits = lebesgue_times(p, w, window);
  double prev = v[0];
  for (double level : hits.levels) {
    out.partition_sum += std::pow(std::abs(level - prev), order);
    prev = level;
  }
  const bool start_on = p.on_level(v[0]);
  if (!start_on && !hits.empty()) out.boundary_term = std::pow(std::abs(hits.levels.front() - v[0]), order);

  const auto n_hits = static_cast<std::int64_t>(hits.size());
  const std::int64_t full_cells = n_hits == 0 ? 0 : (start_on ? n_hits : n_hits - 1);
  out.identity_holds = traversals == full_cells && close_rel(out.band_sum + out.boundary_term, out.partition_sum);
  if (p.is_uniform()) {
    out.K = count_K(w, p.spacing(), window);
    out.scaled_K = std::pow(p.spacing(), order) * static_cast<double>(out.K);
    out.identity_holds = out.identity_holds && out.K == traversals &&
                         close_rel(out.partition_sum, out.scaled_K + out.boundary_term);
  }
  if (!out.identity_holds)
    throw std::logic_error("Lebesgue variation identities failed; crossing kernels disagree");
  return out;
}

double deterministic_variation(const SamplePath& w, std::span<const double> partition, double p) {
  if (!(p > 0.0)) throw std::invalid_argument("variation order must be positive");
  if (partition.size() < 2) throw std::invalid_argument("time partition needs at least two points");
  double sum = 0.0;
  double prev = w.at(partition[0]);
  for (std::size_t i = 1; i < partition.size(); ++i) {
    if (!(partition[i] > partition[i - 1])) throw std::invalid_argument("time partition must be increasing");
    const double cur = w.at(partition[i]);
    sum += std::pow(std::abs(cur - prev), p);
    prev = cur;
  }
  return sum;
}

std::vector<double> uniform_time_partition(const Window& window, std::size_t cells) {
  if (cells == 0) throw std::invalid_argument("partition needs at least one cell");
  std::vector<double> t(cells + 1);
  for (std::size_t k = 0; k <= cells; ++k)
    t[k] = window.start + window.length() * static_cast<double>(k) / static_cast<double>(cells);
  t.back() = window.end;
  return t;
}

double horizontal_roughness_ratio(const SamplePath& w, double eps, double shift, const Window& window) {
  const std::int64_t base = count_K(w, eps, window, 0.0);
  if (base == 0) throw DegeneratePathError("horizontal roughness ratio undefined: no crossings at shift 0");
  if (shift == 0.0) return 1.0;
  return static_cast<double>(count_K(w, eps, window, shift)) / static_cast<double>(base);
}

}  // namespace crossfbm
