#include "crossfbm/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>

#include "crossfbm/crossings.hpp"
#include "crossfbm/rng.hpp"
#include "crossfbm/variation.hpp"

namespace crossfbm {

namespace {

bool close_rel(double a, double b, double tol = 1e-9) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

double uniform(Xoshiro256& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform_open(); }

std::size_t pick(Xoshiro256& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }

// Random time in the domain: half the draws land exactly on a vertex.
double random_time(Xoshiro256& rng, const SamplePath& w) {
  if (rng() & 1) return w.times()[pick(rng, w.size())];
  return uniform(rng, w.start_time(), w.end_time());
}

std::vector<double> sorted_times(Xoshiro256& rng, const SamplePath& w, std::size_t count) {
  std::vector<double> t;
  while (t.size() < count) {
    t.clear();
    for (std::size_t i = 0; i < count; ++i) t.push_back(random_time(rng, w));
    std::sort(t.begin(), t.end());
    t.erase(std::unique(t.begin(), t.end()), t.end());
  }
  return t;
}

// eps and shift on the lattice for lattice walks so grid hits land on vertices.
double random_eps(Xoshiro256& rng, bool lattice) {
  static constexpr double kLattice[] = {0.5, 1.0, 2.0, 3.0};
  return lattice ? kLattice[pick(rng, 4)] : uniform(rng, 0.05, 1.5);
}

double random_shift(Xoshiro256& rng, bool lattice) {
  return lattice ? 0.5 * static_cast<double>(pick(rng, 8)) - 2.0 : uniform(rng, -1.0, 1.0);
}

bool is_lattice(const SamplePath& w) {
  for (double v : w.values())
    if (v != std::floor(v)) return false;
  return true;
}

SamplePath shifted_to_origin(const SamplePath& w, double s, double t) {
  const SamplePath p = w.restrict({s, t});
  std::vector<double> times(p.times().begin(), p.times().end());
  std::vector<double> values(p.values().begin(), p.values().end());
  const double t0 = times.front(), v0 = values.front();
  for (double& x : times) x -= t0;
  for (double& x : values) x -= v0;
  // Subtraction can merge nearly equal times; keep them strictly increasing.
  std::vector<double> tt, vv;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!tt.empty() && !(times[i] > tt.back())) continue;
    tt.push_back(times[i]);
    vv.push_back(values[i]);
  }
  if (tt.size() < 2) return SamplePath({0.0, t - s}, {0.0, values.back()});
  return SamplePath(std::move(tt), std::move(vv));
}

using Check = std::function<std::optional<std::string>(const SamplePath&, Xoshiro256&)>;

InvariantResult run_check(const std::string& name, std::size_t paths, std::uint64_t seed, const Check& check) {
  InvariantResult r;
  r.name = name;
  for (std::size_t i = 0; i < paths; ++i) {
    const std::uint64_t s = substream_seed(seed, i);
    const SamplePath w = random_synthetic_path(s);
    Xoshiro256 rng(splitmix64(s));
    ++r.cases;
    std::optional<std::string> fail;
    try {
      fail = check(w, rng);
    } catch (const std::exception& e) {
      fail = std::string("exception: ") + e.what();
    }
    if (fail) {
      if (r.failures == 0) r.first_failure = "path " + std::to_string(i) + ": " + *fail;
      ++r.failures;
    }
  }
  return r;
}

std::string describe(std::initializer_list<std::pair<const char*, double>> fields) {
  std::ostringstream os;
  os.precision(17);
  for (const auto& [k, v] : fields) os << k << '=' << v << ' ';
  return os.str();
}

}  // namespace

SamplePath random_synthetic_path(std::uint64_t seed, std::size_t max_steps) {
  Xoshiro256 rng(seed);
  const std::size_t n = 1 + pick(rng, max_steps);
  const auto kind = pick(rng, 3);
  std::vector<double> t(n + 1), v(n + 1);
  t[0] = kind == 0 ? 0.0 : uniform(rng, -1.0, 1.0);
  v[0] = kind == 0 ? static_cast<double>(pick(rng, 7)) - 3.0 : uniform(rng, -1.0, 1.0);
  for (std::size_t i = 1; i <= n; ++i) {
    switch (kind) {
      case 0:  // +-1 lattice walk on integer times
        t[i] = static_cast<double>(i);
        v[i] = v[i - 1] + ((rng() >> 63) ? 1.0 : -1.0);
        break;
      case 1:  // Gaussian walk on irregular times
        t[i] = t[i - 1] + uniform(rng, 0.01, 1.0);
        v[i] = v[i - 1] + 0.4 * rng.normal();
        break;
      default:  // Gaussian walk with flat stretches
        t[i] = t[i - 1] + uniform(rng, 0.01, 1.0);
        v[i] = (rng() % 4 == 0) ? v[i - 1] : v[i - 1] + 0.3 * rng.normal();
        break;
    }
  }
  return SamplePath(std::move(t), std::move(v));
}

std::vector<InvariantResult> run_invariant_suite(std::size_t paths, std::uint64_t seed) {
  std::vector<InvariantResult> out;

  out.push_back(run_check("K superadditivity sandwich", paths, seed + 1,
                          [](const SamplePath& w, Xoshiro256& rng) -> std::optional<std::string> {
                            const bool lat = is_lattice(w);
                            for (int rep = 0; rep < 8; ++rep) {
                              const auto t = sorted_times(rng, w, 3);
                              const double eps = random_eps(rng, lat), rho = random_shift(rng, lat);
                              const auto rs = count_K(w, eps, {t[0], t[1]}, rho);
                              const auto st = count_K(w, eps, {t[1], t[2]}, rho);
                              const auto rt = count_K(w, eps, {t[0], t[2]}, rho);
                              if (!(rs + st <= rt && rt <= rs + st + 1))
                                return describe({{"r", t[0]}, {"s", t[1]}, {"t", t[2]}, {"eps", eps}, {"rho", rho},
                                                 {"Krs", double(rs)}, {"Kst", double(st)}, {"Krt", double(rt)}});
                            }
                            return std::nullopt;
                          }));

  out.push_back(run_check("K scaling identity", paths, seed + 2,
                          [](const SamplePath& w, Xoshiro256& rng) -> std::optional<std::string> {
                            const bool lat = is_lattice(w);
                            // lambda^{1/H} is a power of two here, so every rescaling is exact.
                            static constexpr double kH[] = {0.5, 0.25, 1.0 / 3.0};
                            static constexpr double kLambda[] = {2.0, 0.5};
                            for (int rep = 0; rep < 6; ++rep) {
                              const double h = kH[pick(rng, 3)];
                              const double lambda = kLambda[pick(rng, 2)];
                              const double tf = std::pow(lambda, 1.0 / h);
                              const SamplePath wl = w.rescale_time(tf).affine(lambda, 0.0);
                              const auto t = sorted_times(rng, w, 2);
                              const double eps = random_eps(rng, lat), rho = random_shift(rng, lat);
                              const auto a = count_K(w, eps, {t[0], t[1]}, rho);
                              const auto b = count_K(wl, lambda * eps, {tf * t[0], tf * t[1]}, lambda * rho);
                              if (a != b)
                                return describe({{"H", h}, {"lambda", lambda}, {"eps", eps}, {"rho", rho},
                                                 {"K", double(a)}, {"K_scaled", double(b)}});
                            }
                            return std::nullopt;
                          }));

  out.push_back(run_check("Kbar shift invariance and stationarity", paths, seed + 3,
                          [](const SamplePath& w, Xoshiro256& rng) -> std::optional<std::string> {
                            const bool lat = is_lattice(w);
                            for (int rep = 0; rep < 4; ++rep) {
                              const auto t = sorted_times(rng, w, 2);
                              const double eps = random_eps(rng, lat), rho = random_shift(rng, false);
                              const double base = kbar(w, eps, {t[0], t[1]});
                              const double shifted = kbar(w.affine(1.0, rho), eps, {t[0], t[1]});
                              if (!close_rel(base, shifted))
                                return describe({{"eps", eps}, {"rho", rho}, {"Kbar", base}, {"Kbar_shift", shifted}});
                              const SamplePath origin = shifted_to_origin(w, t[0], t[1]);
                              const double stat = kbar(origin, eps, origin.domain());
                              if (!close_rel(base, stat))
                                return describe({{"eps", eps}, {"s", t[0]}, {"t", t[1]}, {"Kbar", base},
                                                 {"Kbar_origin", stat}});
                            }
                            return std::nullopt;
                          }));

  out.push_back(run_check("Kbar superadditivity sandwich", paths, seed + 4,
                          [](const SamplePath& w, Xoshiro256& rng) -> std::optional<std::string> {
                            const bool lat = is_lattice(w);
                            for (int rep = 0; rep < 4; ++rep) {
                              const auto t = sorted_times(rng, w, 3);
                              const double eps = random_eps(rng, lat);
                              const double rs = kbar(w, eps, {t[0], t[1]});
                              const double st = kbar(w, eps, {t[1], t[2]});
                              const double rt = kbar(w, eps, {t[0], t[2]});
                              const double tol = 1e-9 * std::max(1.0, rt);
                              if (!(rs + st <= rt + tol && rt <= rs + st + 1.0 + tol))
                                return describe({{"eps", eps}, {"Krs", rs}, {"Kst", st}, {"Krt", rt}});
                            }
                            return std::nullopt;
                          }));

  out.push_back(run_check("U superadditivity and Ubar subadditivity", paths, seed + 5,
                          [](const SamplePath& w, Xoshiro256& rng) -> std::optional<std::string> {
                            const bool lat = is_lattice(w);
                            for (int rep = 0; rep < 8; ++rep) {
                              const auto t = sorted_times(rng, w, 3);
                              const double eps = random_eps(rng, lat), a = random_shift(rng, lat);
                              const auto u_st = count_U(w, eps, {t[0], t[2]}, a);
                              const auto u_su = count_U(w, eps, {t[0], t[1]}, a);
                              const auto u_ut = count_U(w, eps, {t[1], t[2]}, a);
                              const auto b_st = count_U_bar(w, eps, {t[0], t[2]}, a);
                              const auto b_su = count_U_bar(w, eps, {t[0], t[1]}, a);
                              const auto b_ut = count_U_bar(w, eps, {t[1], t[2]}, a);
                              if (!(u_st >= u_su + u_ut) || !(b_st <= b_su + b_ut))
                                return describe({{"eps", eps}, {"a", a}, {"U_st", double(u_st)},
                                                 {"U_su", double(u_su)}, {"U_ut", double(u_ut)},
                                                 {"Ubar_st", double(b_st)}, {"Ubar_su", double(b_su)},
                                                 {"Ubar_ut", double(b_ut)}});
                            }
                            return std::nullopt;
                          }));

  out.push_back(run_check("reflection D(eps,w) = U(eps,eps-w)", paths, seed + 6,
                          [](const SamplePath& w, Xoshiro256& rng) -> std::optional<std::string> {
                            const bool lat = is_lattice(w);
                            for (int rep = 0; rep < 4; ++rep) {
                              const double eps = random_eps(rng, lat);
                              const auto t = sorted_times(rng, w, 2);
                              const auto d = count_D(w, eps, {t[0], t[1]});
                              const auto u = count_U(w.affine(-1.0, eps), eps, {t[0], t[1]});
                              if (d != u) return describe({{"eps", eps}, {"D", double(d)}, {"U", double(u)}});
                            }
                            return std::nullopt;
                          }));

  out.push_back(run_check("uniform-grid variation identity", paths, seed + 7,
                          [](const SamplePath& w, Xoshiro256& rng) -> std::optional<std::string> {
                            const bool lat = is_lattice(w);
                            static constexpr double kH[] = {0.5, 0.4, 0.7};
                            for (int rep = 0; rep < 3; ++rep) {
                              const auto t = sorted_times(rng, w, 2);
                              const double eps = random_eps(rng, lat);
                              const double h = kH[pick(rng, 3)];
                              const Window win{t[0], t[1]};
                              const auto p = SpacePartition::uniform(eps);
                              const LebesgueVariation lv = lebesgue_variation(p, w, win, HurstExponent(h));
                              // Recompute the right-hand side from independent pieces.
                              const auto k = count_K(w, eps, win);
                              const HittingSequence hits = lebesgue_times(p, w, win);
                              const double w0 = w.at(t[0]);
                              double boundary = 0.0;
                              if (!p.on_level(w0) && !hits.empty())
                                boundary = std::pow(std::abs(hits.levels.front() - w0), 1.0 / h);
                              const double rhs = std::pow(eps, 1.0 / h) * static_cast<double>(k) + boundary;
                              if (!close_rel(lv.partition_sum, rhs) || !close_rel(lv.band_sum, lv.scaled_K))
                                return describe({{"eps", eps}, {"H", h}, {"V", lv.partition_sum}, {"rhs", rhs},
                                                 {"band_sum", lv.band_sum}, {"K", double(k)}});
                            }
                            return std::nullopt;
                          }));

  out.push_back(run_check("band crossing integral = truncated variation", paths, seed + 8,
                          [](const SamplePath& w, Xoshiro256& rng) -> std::optional<std::string> {
                            const bool lat = is_lattice(w);
                            for (int rep = 0; rep < 4; ++rep) {
                              const auto t = sorted_times(rng, w, 2);
                              const double eps = random_eps(rng, lat);
                              const double tv = truncated_variation(w, eps, {t[0], t[1]});
                              const double bi = band_crossing_integral(w, eps, {t[0], t[1]});
                              const double kb = eps * kbar(w, eps, {t[0], t[1]});
                              if (!close_rel(tv, bi) || !close_rel(tv, kb))
                                return describe({{"eps", eps}, {"TV", tv}, {"band_integral", bi}, {"eps_Kbar", kb}});
                            }
                            return std::nullopt;
                          }));
  return out;
}

double exhaustive_truncated_variation(const std::vector<double>& values, double eps) {
  const std::size_t n = values.size();
  if (n < 2) return 0.0;
  const std::size_t interior = n - 2;
  if (interior > 24) throw std::invalid_argument("exhaustive oracle limited to 26 vertices");
  double best = 0.0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << interior); ++mask) {
    double sum = 0.0;
    double prev = values.front();
    for (std::size_t i = 0; i < interior; ++i) {
      if (!((mask >> i) & 1)) continue;
      sum += std::max(std::abs(values[i + 1] - prev) - eps, 0.0);
      prev = values[i + 1];
    }
    sum += std::max(std::abs(values.back() - prev) - eps, 0.0);
    best = std::max(best, sum);
  }
  return best;
}

InvariantResult truncated_variation_oracle(std::size_t max_vertices, int lo, int hi) {
  InvariantResult r;
  r.name = "truncated variation vs exhaustive partitions";
  static constexpr double kEps[] = {0.0, 0.5, 1.0, 1.5, 2.0, 3.0};
  std::vector<double> v;
  // Depth-first over all +-1 walks staying in [lo, hi].
  std::function<void()> visit = [&]() {
    if (v.size() >= 2) {
      const SamplePath w = SamplePath::uniform(static_cast<double>(v.size() - 1), v);
      for (double eps : kEps) {
        ++r.cases;
        const double fast = truncated_variation(w, eps, w.domain());
        const double slow = exhaustive_truncated_variation(v, eps);
        if (fast != slow) {
          if (r.failures == 0) {
            std::ostringstream os;
            os << "eps=" << eps << " fast=" << fast << " exhaustive=" << slow << " path=";
            for (double x : v) os << x << ' ';
            r.first_failure = os.str();
          }
          ++r.failures;
        }
      }
    }
    if (v.size() == max_vertices) return;
    for (double step : {-1.0, 1.0}) {
      const double next = v.back() + step;
      if (next < lo || next > hi) continue;
      v.push_back(next);
      visit();
      v.pop_back();
    }
  };
  for (int start = lo; start <= hi; ++start) {
    v.assign(1, static_cast<double>(start));
    visit();
  }
  return r;
}

std::optional<std::string> literal_reflection_counterexample() {
  const double eps = 1.0;
  const SamplePath w = SamplePath::uniform(2.0, {0.0, eps, 0.0});
  const auto d = count_D(w, eps, w.domain());
  const auto u = count_U(w.affine(-1.0, -eps), eps, w.domain());
  if (d == u) return std::nullopt;
  std::ostringstream os;
  os << "zigzag 0 -> eps -> 0 with eps = 1: D(eps, w) = " << d << " but U(eps, -w - eps) = " << u
     << "; U(eps, eps - w) = " << count_U(w.affine(-1.0, eps), eps, w.domain());
  return os.str();
}

}  // namespace crossfbm
