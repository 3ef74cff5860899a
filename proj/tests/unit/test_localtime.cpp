#include <doctest.h>

#include <cmath>

#include <json.hpp>

#include "crossfbm/crossings.hpp"
#include "crossfbm/errors.hpp"
#include "crossfbm/gaussian.hpp"
#include "crossfbm/localtime.hpp"
#include "crossfbm/paths_io.hpp"
#include "crossfbm/rng.hpp"

using namespace crossfbm;

namespace {

SamplePath fbm(double h, std::size_t n, std::uint64_t seed, double horizon = 1.0) {
  GeneratorConfig g;
  g.hurst = HurstExponent(h);
  g.horizon = horizon;
  g.steps = n;
  g.seed = seed;
  return generate_path(g);
}

SamplePath random_walk(std::uint64_t seed, std::size_t n) {
  Xoshiro256 rng(seed);
  std::vector<double> v(n + 1, 0.0);
  for (std::size_t i = 1; i <= n; ++i) v[i] = v[i - 1] + 0.1 * rng.normal();
  return SamplePath::uniform(1.0, v);
}

double sum_f_L(const LocalTimeField& f, double (*fn)(double)) {
  double s = 0.0;
  for (std::size_t i = 0; i < f.levels.size(); ++i) s += fn(f.levels[i]) * f.values[i][0];
  return s * f.parameter;
}

}  // namespace

TEST_SUITE("localtime") {
  TEST_CASE("ramp has unit local time inside its range") {
    const SamplePath w = build_synthetic({RampSpec{0.0, 1.0, 1.0, 7}});
    const LevelBins bins{0.05, 0.1, 10};
    const auto f = occupation_local_time(w, 1.0, bins);
    for (std::size_t i = 0; i < bins.count; ++i) CHECK(f.values[i][0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(f.mass(0) == doctest::Approx(1.0).epsilon(1e-14));
  }

  TEST_CASE("bins that do not cover the range ignore the rest") {
    const SamplePath w = build_synthetic({RampSpec{0.0, 1.0, 1.0, 3}});
    CHECK(occupation_local_time(w, 1.0, LevelBins{0.5, 0.1, 1}).values[0][0] == doctest::Approx(1.0));
    CHECK(occupation_local_time(w, 1.0, LevelBins{0.0, 0.1, 1}).values[0][0] == doctest::Approx(0.5));
    CHECK(occupation_local_time(w, 1.0, LevelBins{3.0, 0.1, 1}).values[0][0] == 0.0);
    const SamplePath c = build_synthetic({ConstantSpec{2.0, 1.0, 4}});
    CHECK(occupation_local_time(c, 1.0, LevelBins{0.0, 0.1, 3}).mass(0) == 0.0);
  }

  TEST_CASE("constant path puts all mass in one bin") {
    const SamplePath w = build_synthetic({ConstantSpec{0.33, 2.0, 4}});
    const auto bins = LevelBins::covering(-1.0, 1.0, 0.1);
    const auto f = occupation_local_time(w, 2.0, bins);
    for (std::size_t i = 0; i < bins.count; ++i) {
      const bool home = bins.lower_edge(i) <= 0.33 && 0.33 < bins.lower_edge(i) + bins.width;
      CHECK(f.values[i][0] == doctest::Approx(home ? 2.0 / 0.1 : 0.0));
    }
  }

  TEST_CASE("mass conservation, monotonicity and support") {
    for (std::uint64_t s = 0; s < 20; ++s) {
      const SamplePath w = random_walk(s, 200);
      const auto bins = LevelBins::covering(w.min_value(), w.max_value(), 0.013);
      const std::vector<double> times{0.1, 0.37, 0.5, 1.0};
      const auto f = occupation_local_time(w, times, bins);
      for (std::size_t j = 0; j < times.size(); ++j) CHECK(f.mass(j) == doctest::Approx(times[j]).epsilon(1e-12));
      for (std::size_t i = 0; i < bins.count; ++i) {
        for (std::size_t j = 1; j < times.size(); ++j) CHECK(f.values[i][j] >= f.values[i][j - 1]);
        const double edge_lo = bins.lower_edge(i), edge_hi = edge_lo + bins.width;
        const SamplePath head = w.restrict({0.0, 0.37});
        if (edge_hi < head.min_value() || edge_lo > head.max_value()) CHECK(f.values[i][1] == 0.0);
      }
    }
  }

  TEST_CASE("occupation density formula for cos on a brownian path") {
    const SamplePath w = fbm(0.5, 1 << 14, 2);
    const auto bins = LevelBins::covering(w.min_value(), w.max_value(), 1e-3);
    const auto f = occupation_local_time(w, 1.0, bins);
    double direct = 0.0;
    const auto t = w.times();
    const auto v = w.values();
    for (std::size_t i = 1; i < w.size(); ++i) direct += segment_integral_cos(t[i] - t[i - 1], v[i - 1], v[i]);
    const double via_l = sum_f_L(f, [](double a) { return std::cos(a); });
    CHECK(std::abs(via_l - direct) / std::abs(direct) < 1e-3);
  }

  TEST_CASE("upcrossing estimator examples") {
    const SamplePath r = build_synthetic({RampSpec{0.0, 1.0, 1.0, 4}});
    CHECK(upcrossing_local_time(r, HurstExponent(0.5), 1.0, 0.1, 0.5, std::nullopt, false) ==
          doctest::Approx(0.1));
    // Normalized with c = 1 at H = 1/2: 2 eps U.
    CHECK(upcrossing_local_time(r, HurstExponent(0.5), 1.0, 0.1, 0.5, std::nullopt) == doctest::Approx(0.2));
    const SamplePath c = build_synthetic({ConstantSpec{0.3, 1.0, 4}});
    CHECK(upcrossing_local_time(c, HurstExponent(0.5), 1.0, 0.1, 0.0, std::nullopt) == 0.0);
    CHECK_THROWS_AS(upcrossing_local_time(r, HurstExponent(0.4), 1.0, 0.1, 0.5, std::nullopt), ConfigError);
    CHECK(upcrossing_local_time(r, HurstExponent(0.4), 1.0, 0.1, 0.5, 1.2) ==
          doctest::Approx(2.0 / 1.2 * std::pow(0.1, 1.5)));
  }

  TEST_CASE("upcrossing field is monotone in t") {
    const SamplePath w = random_walk(9, 300);
    const std::vector<double> times{0.2, 0.6, 1.0};
    const std::vector<double> levels{-0.2, 0.0, 0.1};
    const auto f = upcrossing_local_time_field(w, HurstExponent(0.5), times, 0.05, levels, std::nullopt);
    for (std::size_t i = 0; i < levels.size(); ++i)
      for (std::size_t j = 1; j < times.size(); ++j) CHECK(f.values[i][j] >= f.values[i][j - 1]);
  }

  TEST_CASE("grid kernels agree with per-level computations") {
    for (std::uint64_t s = 0; s < 10; ++s) {
      const SamplePath w = random_walk(70 + s, 120);
      const double eps = 0.04, first = w.min_value() - 0.1, spacing = 0.0173;
      const std::size_t count = static_cast<std::size_t>((w.max_value() - first) / spacing) + 2;
      const auto ups = upcrossings_on_level_grid(w, eps, first, spacing, count);
      const auto cdf = occupation_cdf_on_grid(w, first, spacing, count);
      for (std::size_t i = 0; i < count; ++i) {
        const double a = first + static_cast<double>(i) * spacing;
        CHECK(ups[i] == count_U(w, eps, w.domain(), a));
        double below = 0.0;
        const auto t = w.times();
        const auto v = w.values();
        for (std::size_t k = 1; k < w.size(); ++k)
          below += segment_time_in_band(t[k - 1], v[k - 1], t[k], v[k], first - 10.0, a);
        CHECK(cdf[i] == doctest::Approx(below).epsilon(1e-10));
      }
    }
  }

  TEST_CASE("grid upcrossing kernel on lattice walks (exact ties)") {
    for (std::uint64_t s = 0; s < 40; ++s) {
      const SamplePath w = build_synthetic({LatticeWalkSpec{1.0, 30, s, 0.0, 1.0}});
      for (double eps : {1.0, 2.0, 3.0}) {
        const auto ups = upcrossings_on_level_grid(w, eps, -12.0, 0.5, 49);
        for (std::size_t i = 0; i < 49; ++i)
          CHECK(ups[i] == count_U(w, eps, w.domain(), -12.0 + 0.5 * static_cast<double>(i)));
      }
    }
  }

  TEST_CASE("grid sup error: constant path and ramp") {
    const SamplePath c = build_synthetic({ConstantSpec{0.3, 1.0, 8}});
    CHECK(uniform_grid_sup_error(c, HurstExponent(0.5), 1.0, 3, 1.0).sup_error == 0.0);
    // Ramp: one upcrossing and unit occupation density at every interior grid level.
    const SamplePath r = build_synthetic({RampSpec{0.0, 1.0, 1.0, 16}});
    const int k = 2;
    const double eps = std::pow(k, -6.0), spacing = std::pow(k, -7.0);
    const std::size_t count = static_cast<std::size_t>(1.0 / spacing);
    const auto ups = upcrossings_on_level_grid(r, eps, 0.0, spacing, count);
    const auto hi = occupation_cdf_on_grid(r, 0.5 * eps, spacing, count);
    const auto lo = occupation_cdf_on_grid(r, -0.5 * eps, spacing, count);
    for (std::size_t i = 2; i + 2 < count; ++i) {
      const double a = static_cast<double>(i) * spacing;
      if (a + eps > 1.0) break;
      CHECK(ups[i] == 1);
      CHECK((hi[i] - lo[i]) / eps == doctest::Approx(1.0).epsilon(2.0 * eps));
    }
    const auto e = uniform_grid_sup_error(r, HurstExponent(0.5), 1.0, 3, 1.0);
    CHECK(e.grid_points > 0);
    CHECK(e.band_width == doctest::Approx(std::pow(3.0, -6.0)));
  }

  TEST_CASE("grid guard") {
    GridSupOptions o;
    o.max_grid_points = 100;
    CHECK_THROWS_AS(uniform_grid_sup_error(random_walk(1, 50), HurstExponent(0.5), 1.0, 3, 1.0, o), ResourceError);
  }

  TEST_CASE("csv and sidecar") {
    const SamplePath w = build_synthetic({RampSpec{0.0, 1.0, 1.0, 4}});
    const auto f = occupation_local_time(w, std::vector<double>{0.5, 1.0}, LevelBins{0.25, 0.5, 2});
    const std::string csv = local_time_csv(f);
    CHECK(csv.rfind("level,t=0.5,t=1\n", 0) == 0);
    const auto j = nlohmann::json::parse(local_time_sidecar_json(f));
    CHECK(j["estimator"] == "occupation");
    CHECK(j["parameter"].get<double>() == 0.5);
  }
}
