#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "crossfbm/gaussian.hpp"
#include "crossfbm/montecarlo.hpp"
#include "crossfbm/rng.hpp"
#include "crossfbm/variation.hpp"

using namespace crossfbm;

TEST_SUITE("montecarlo") {
  TEST_CASE("rng streams") {
    Xoshiro256 a(1), b(1), c(2);
    for (int i = 0; i < 10; ++i) {
      const auto x = a();
      CHECK(x == b());
      CHECK(x != c());
    }
    CHECK(substream_seed(5, 0) != substream_seed(5, 1));
    CHECK(substream_seed(5, 1) != substream_seed(6, 1));
    Xoshiro256 u(3);
    for (int i = 0; i < 1000; ++i) {
      const double x = u.uniform_open();
      CHECK((x > 0.0 && x < 1.0));
    }
  }

  TEST_CASE("pairwise sum and summary") {
    std::vector<double> xs(1000, 0.1);
    CHECK(pairwise_sum(xs) == doctest::Approx(100.0).epsilon(1e-15));
    const std::vector<double> s{1.0, 2.0, 3.0, 4.0};
    const auto m = summarize("x", s, 0.95);
    CHECK(m.estimate == 2.5);
    CHECK(m.sample_std == doctest::Approx(std::sqrt(5.0 / 3.0)));
    CHECK(m.std_error == doctest::Approx(std::sqrt(5.0 / 3.0) / 2.0));
    CHECK(m.ci.low == doctest::Approx(2.5 - 1.959963984540054 * m.std_error));
    CHECK(m.ci.contains(2.5));
    CHECK(ci_z(0.95) == doctest::Approx(1.959963984540054));
    CHECK_THROWS(ci_z(1.0));
    CHECK_THROWS(summarize("x", std::vector<double>{}, 0.95));
    const auto j = to_json(m);
    CHECK(j["estimate"].get<double>() == 2.5);
  }

  TEST_CASE("parallel_map keeps index order and propagates errors") {
    for (unsigned threads : {1u, 2u, 5u}) {
      ParallelOptions o;
      o.threads = threads;
      const auto r = parallel_map<std::size_t>(100, o, [](std::size_t i) { return i * i; });
      for (std::size_t i = 0; i < 100; ++i) CHECK(r[i] == i * i);
    }
    ParallelOptions o;
    o.threads = 3;
    CHECK_THROWS_AS(parallel_map<int>(50, o,
                                      [](std::size_t i) -> int {
                                        if (i == 17) throw std::runtime_error("boom");
                                        return 0;
                                      }),
                    std::runtime_error);
    ParallelOptions seq;
    seq.threads = 8;
    seq.strict_sequential = true;
    CHECK(seq.resolved_threads() == 1);
  }

  TEST_CASE("results do not depend on the worker count") {
    auto run = [](unsigned threads) {
      ParallelOptions o;
      o.threads = threads;
      const auto samples = parallel_map<double>(40, o, [](std::size_t i) {
        GeneratorConfig g;
        g.steps = 512;
        g.seed = substream_seed(9, i);
        const SamplePath w = generate_path(g);
        return truncated_variation(w, 0.05, w.domain());
      });
      return summarize("tv", samples).estimate;
    };
    const double a = run(1);
    CHECK(run(2) == a);
    CHECK(run(7) == a);
  }

  TEST_CASE("confidence interval coverage") {
    // Quadratic variation of Brownian motion on a fixed grid has mean exactly T.
    const int replications = 200;
    int covered = 0;
    for (int r = 0; r < replications; ++r) {
      std::vector<double> qv;
      for (std::size_t i = 0; i < 20; ++i) {
        GeneratorConfig g;
        g.steps = 64;
        g.seed = substream_seed(1000 + r, i);
        const SamplePath w = generate_path(g);
        qv.push_back(deterministic_variation(w, w.times(), 2.0));
      }
      if (summarize("qv", qv, 0.95).ci.contains(1.0)) ++covered;
    }
    const double coverage = static_cast<double>(covered) / replications;
    MESSAGE("95% CI coverage " << coverage);
    CHECK(coverage > 0.90);
    CHECK(coverage < 0.99);
  }
}
