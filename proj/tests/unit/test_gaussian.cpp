#include <doctest.h>

#include <cmath>
#include <numbers>

#include "crossfbm/errors.hpp"
#include "crossfbm/gaussian.hpp"
#include "crossfbm/rng.hpp"
#include "stats.hpp"

using namespace crossfbm;

namespace {

GeneratorConfig config(double h, double horizon, std::size_t n, std::uint64_t seed) {
  GeneratorConfig g;
  g.hurst = HurstExponent(h);
  g.horizon = horizon;
  g.steps = n;
  g.seed = seed;
  return g;
}

// Simpson rule for 2 * int_0^12 z^p phi(z) dz.
double moment_quadrature(double p) {
  const int m = 200000;
  const double b = 12.0, hstep = b / m;
  double s = 0.0;
  for (int i = 0; i <= m; ++i) {
    const double z = i * hstep;
    const double f = std::pow(z, p) * std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
    s += f * (i == 0 || i == m ? 1.0 : (i % 2 ? 4.0 : 2.0));
  }
  return 2.0 * s * hstep / 3.0;
}

}  // namespace

TEST_SUITE("gaussian") {
  TEST_CASE("hurst exponent range") {
    CHECK_THROWS_AS(HurstExponent(0.0), std::invalid_argument);
    CHECK_THROWS_AS(HurstExponent(1.0), std::invalid_argument);
    CHECK_THROWS_AS(HurstExponent(std::nan("")), std::invalid_argument);
    CHECK(HurstExponent(0.25).inverse() == 4.0);
  }

  TEST_CASE("fbm covariance closed form") {
    CHECK(fbm_covariance(HurstExponent(0.5), 1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
    for (double h : {0.1, 0.4, 0.9}) CHECK(fbm_covariance(HurstExponent(h), 0.0, 3.7) == 0.0);
    CHECK(fbm_covariance(HurstExponent(0.4), 1.0, 2.0) == doctest::Approx(std::pow(2.0, 0.8) / 2.0).epsilon(1e-14));
    CHECK(fbm_covariance(HurstExponent(0.4), 1.0, 2.0) == doctest::Approx(0.87055).epsilon(1e-5));
    CHECK_THROWS(fbm_covariance(HurstExponent(0.4), -1.0, 2.0));
  }

  TEST_CASE("fgn autocovariance") {
    CHECK(fgn_autocovariance(HurstExponent(0.5), 0) == doctest::Approx(1.0));
    CHECK(fgn_autocovariance(HurstExponent(0.5), 3) == doctest::Approx(0.0).epsilon(1e-15));
    const HurstExponent h(0.7);
    // Stationary increments: gamma(k) = Cov(B_{k+1} - B_k, B_1 - B_0).
    for (int k = 1; k < 5; ++k) {
      const double direct = fbm_covariance(h, k + 1.0, 1.0) - fbm_covariance(h, k, 1.0);
      CHECK(fgn_autocovariance(h, k) == doctest::Approx(direct).epsilon(1e-12));
    }
  }

  TEST_CASE("absolute gaussian moments") {
    CHECK(gaussian_abs_moment(2.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(gaussian_abs_moment(1.0) == doctest::Approx(std::sqrt(2.0 / std::numbers::pi)).epsilon(1e-14));
    CHECK(gaussian_abs_moment(1.0) == doctest::Approx(moment_quadrature(1.0)).epsilon(1e-9));
    CHECK(gaussian_abs_moment(2.5) == doctest::Approx(moment_quadrature(2.5)).epsilon(1e-9));
    CHECK(gaussian_abs_moment(2.5) == doctest::Approx(1.23327).epsilon(1e-5));
  }

  TEST_CASE("normal quantile") {
    CHECK(normal_quantile(0.5) == 0.0);
    CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-14));
    CHECK(normal_quantile(1e-10) == doctest::Approx(-6.361340902404056).epsilon(1e-12));
    for (double p : {1e-300, 0.01, 0.3, 0.77, 0.999999})
      CHECK(testutil::normal_cdf(normal_quantile(p)) == doctest::Approx(p).epsilon(1e-10));
  }

  TEST_CASE("generation is deterministic per seed") {
    const auto g = config(0.3, 2.0, 1000, 42);
    const SamplePath a = generate_path(g), b = generate_path(g);
    CHECK(a == b);
    CHECK(a.size() == 1001);
    CHECK(a.values()[0] == 0.0);
    CHECK(a.end_time() == 2.0);
    auto g2 = g;
    g2.seed = 43;
    CHECK_FALSE(generate_path(g2) == a);
  }

  TEST_CASE("brownian increments are normal with variance 1/n") {
    const std::size_t n = 1024, seeds = 500;
    std::vector<double> all;
    all.reserve(n * seeds);
    for (std::size_t s = 0; s < seeds; ++s) {
      const auto inc = generate_increments(config(0.5, 1.0, n, s));
      for (double x : inc) all.push_back(x * std::sqrt(static_cast<double>(n)));
    }
    double ss = 0.0;
    for (double x : all) ss += x * x;
    const double var = ss / static_cast<double>(all.size());
    CHECK(std::abs(var - 1.0) < 0.05);
    // One-sample KS at 1% (critical 1.628 / sqrt(N)).
    CHECK(testutil::ks_normal(all) < 1.628 / std::sqrt(static_cast<double>(all.size())));
  }

  TEST_CASE("covariance on an 8-point sub-grid at H=0.7") {
    const std::size_t n = 4096, seeds = 2000, k = 8;
    const HurstExponent h(0.7);
    std::vector<std::vector<double>> x(seeds, std::vector<double>(k));
    for (std::size_t s = 0; s < seeds; ++s) {
      const SamplePath w = generate_path(config(0.7, 1.0, n, 1000 + s));
      for (std::size_t i = 0; i < k; ++i) x[s][i] = w.values()[(i + 1) * n / k];
    }
    int bad = 0;
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = i; j < k; ++j) {
        std::vector<double> prod(seeds);
        for (std::size_t s = 0; s < seeds; ++s) prod[s] = x[s][i] * x[s][j];
        const double est = testutil::mean(prod);
        const double se = std::sqrt(testutil::variance(prod) / static_cast<double>(seeds));
        const double truth = fbm_covariance(h, static_cast<double>(i + 1) / k, static_cast<double>(j + 1) / k);
        if (std::abs(est - truth) > 3.0 * se) {
          ++bad;
          MESSAGE("cov(" << i << "," << j << ") est " << est << " truth " << truth << " se " << se);
        }
      }
    }
    CHECK(bad == 0);
  }

  TEST_CASE("cholesky fallback matches the covariance") {
    const std::size_t n = 32, seeds = 3000;
    const HurstExponent h(0.3);
    std::vector<double> end(seeds), mid(seeds);
    for (std::size_t s = 0; s < seeds; ++s) {
      auto g = config(0.3, 1.0, n, s);
      g.method = GenerationMethod::cholesky;
      GenerationInfo info;
      const SamplePath w = generate_path(g, &info);
      CHECK(info.used == GenerationMethod::cholesky);
      end[s] = w.values()[n];
      mid[s] = w.values()[n / 2];
    }
    std::vector<double> prod(seeds), sq(seeds);
    for (std::size_t s = 0; s < seeds; ++s) {
      prod[s] = end[s] * mid[s];
      sq[s] = end[s] * end[s];
    }
    const double se_p = std::sqrt(testutil::variance(prod) / seeds);
    const double se_s = std::sqrt(testutil::variance(sq) / seeds);
    CHECK(std::abs(testutil::mean(prod) - fbm_covariance(h, 0.5, 1.0)) < 3.0 * se_p);
    CHECK(std::abs(testutil::mean(sq) - 1.0) < 3.0 * se_s);
  }

  TEST_CASE("circulant embedding is valid for fGn") {
    for (double hv : {0.05, 0.3, 0.5, 0.8, 0.95}) {
      GenerationInfo info;
      auto g = config(hv, 1.0, 1000, 1);
      g.method = GenerationMethod::automatic;
      generate_path(g, &info);
      CHECK(info.used == GenerationMethod::circulant);
      CHECK(info.min_relative_eigenvalue >= -kEigenvalueTolerance);
    }
  }

  TEST_CASE("memory guard and config validation") {
    auto g = config(0.5, 1.0, 1 << 20, 0);
    g.memory_cap_bytes = 1024;
    CHECK_THROWS_AS(generate_path(g), ResourceError);
    auto bad = config(0.5, 1.0, 1, 0);
    CHECK_THROWS_AS(generate_path(bad), std::invalid_argument);
    auto neg = config(0.5, -1.0, 16, 0);
    CHECK_THROWS_AS(generate_path(neg), std::invalid_argument);
    CHECK(parse_generation_method(to_string(GenerationMethod::cholesky)) == GenerationMethod::cholesky);
  }

  TEST_CASE("self-similarity, symmetry and stationary increments (KS at 1%)") {
    const std::size_t n = 1024, m = 1000;
    const HurstExponent h(0.35);
    std::vector<SamplePath> a, b;
    for (std::size_t s = 0; s < m; ++s) {
      a.push_back(generate_path(config(0.35, 1.0, n, 5000 + s)));
      b.push_back(generate_path(config(0.35, 1.0, n, 9000 + s)));
    }
    const double crit = testutil::ks_critical_1pct(m, m);
    std::vector<double> x(m), y(m);
    // B_{lambda t} / lambda^H vs B_t with t = 0.25, lambda = 2 and 4.
    for (double lambda : {2.0, 4.0}) {
      for (std::size_t s = 0; s < m; ++s) {
        x[s] = a[s].at(0.25 * lambda) / std::pow(lambda, h.value());
        y[s] = b[s].at(0.25);
      }
      CHECK(testutil::ks_two_sample(x, y) < crit);
    }
    for (std::size_t s = 0; s < m; ++s) {
      x[s] = -a[s].at(0.7);
      y[s] = b[s].at(0.7);
    }
    CHECK(testutil::ks_two_sample(x, y) < crit);
    for (std::size_t s = 0; s < m; ++s) {
      x[s] = a[s].at(0.6) - a[s].at(0.5);
      y[s] = b[s].at(0.1);
    }
    CHECK(testutil::ks_two_sample(x, y) < crit);
  }
}
