#include <doctest.h>

#include <cmath>
#include <optional>

#include "crossfbm/crossings.hpp"
#include "crossfbm/gaussian.hpp"
#include "crossfbm/paths_io.hpp"
#include "crossfbm/rng.hpp"
#include "crossfbm/selftest.hpp"

using namespace crossfbm;

namespace {

SamplePath ramp(double from = 0.0, double to = 1.0, std::size_t n = 4) {
  return build_synthetic({RampSpec{from, to, 1.0, n}});
}

SamplePath zigzag(std::vector<double> v, double horizon = 1.0) { return build_synthetic({ZigzagSpec{v, horizon}}); }

SamplePath random_walk(std::uint64_t seed, std::size_t n) {
  Xoshiro256 rng(seed);
  std::vector<double> v(n + 1, 0.0);
  for (std::size_t i = 1; i <= n; ++i) v[i] = v[i - 1] + 0.1 * rng.normal();
  return SamplePath::uniform(1.0, v);
}

// Dense time scan: each segment is cut into `sub` pieces and grid levels are
// picked up in the order the scan meets them.
HittingSequence brute_hits(const SamplePath& w, double eps, std::size_t sub) {
  HittingSequence h;
  std::optional<long> cur;
  const double q0 = w.values()[0] / eps;
  if (q0 == std::floor(q0)) cur = static_cast<long>(q0);
  const auto t = w.times();
  const auto v = w.values();
  for (std::size_t i = 1; i < w.size(); ++i) {
    for (std::size_t k = 0; k < sub; ++k) {
      const double a = static_cast<double>(k) / sub, b = static_cast<double>(k + 1) / sub;
      const double y0 = v[i - 1] + a * (v[i] - v[i - 1]);
      const double y1 = k + 1 == sub ? v[i] : v[i - 1] + b * (v[i] - v[i - 1]);
      const double t0 = t[i - 1] + a * (t[i] - t[i - 1]);
      const double t1 = t[i - 1] + b * (t[i] - t[i - 1]);
      if (y1 == y0) continue;
      // Levels in the half-open range (y0, y1] along the direction of motion.
      const bool up = y1 > y0;
      long lv = up ? static_cast<long>(std::floor(y0 / eps)) + 1 : static_cast<long>(std::ceil(y0 / eps)) - 1;
      while (up ? lv * eps <= y1 : lv * eps >= y1) {
        if (!cur || *cur != lv) {
          h.times.push_back(t0 + (lv * eps - y0) / (y1 - y0) * (t1 - t0));
          h.levels.push_back(lv * eps);
          cur = lv;
        }
        lv += up ? 1 : -1;
      }
    }
  }
  return h;
}

std::int64_t brute_K(const SamplePath& w, double eps, std::size_t sub) {
  const auto h = brute_hits(w, eps, sub);
  const auto n = static_cast<std::int64_t>(h.size());
  const double q0 = w.values()[0] / eps;
  const bool on = q0 == std::floor(q0);
  return std::max<std::int64_t>(n - 1, 0) + (on && n >= 1 ? 1 : 0);
}

// Touches of {a, a + eps} in time order, repeats collapsed; counts a -> a+eps pairs.
std::pair<std::int64_t, std::int64_t> brute_UD(const SamplePath& w, double eps, double a) {
  std::vector<int> seq;
  auto touch = [&](int side) {
    if (seq.empty() || seq.back() != side) seq.push_back(side);
  };
  const auto v = w.values();
  const double b = a + eps;
  auto visit_point = [&](double y) {
    if (y == a) touch(0);
    if (y == b) touch(1);
  };
  visit_point(v[0]);
  for (std::size_t i = 1; i < v.size(); ++i) {
    const double y0 = v[i - 1], y1 = v[i];
    std::vector<std::pair<double, int>> ev;
    for (auto [lvl, side] : {std::pair{a, 0}, std::pair{b, 1}}) {
      if ((y0 < lvl && lvl < y1) || (y1 < lvl && lvl < y0)) ev.push_back({(lvl - y0) / (y1 - y0), side});
    }
    std::sort(ev.begin(), ev.end());
    for (auto [f, side] : ev) touch(side);
    visit_point(y1);
  }
  std::int64_t up = 0, down = 0;
  for (std::size_t i = 1; i < seq.size(); ++i) {
    if (seq[i - 1] == 0 && seq[i] == 1) ++up;
    if (seq[i - 1] == 1 && seq[i] == 0) ++down;
  }
  return {up, down};
}

}  // namespace

TEST_SUITE("crossings") {
  TEST_CASE("space partitions") {
    const auto u = SpacePartition::uniform(0.25);
    CHECK(u.is_uniform());
    CHECK(u.floor_index(0.3) == 1);
    CHECK(u.ceil_index(0.3) == 2);
    CHECK(u.on_level(0.75));
    CHECK_FALSE(u.on_level(0.7));
    CHECK(u.mesh() == 0.25);
    const auto p = SpacePartition::from_breakpoints({-1.0, 0.0, 0.5, 2.0});
    CHECK(p.mesh() == 1.5);
    CHECK(p.covers(-0.5, 1.0));
    CHECK_FALSE(p.covers(-2.0, 1.0));
    CHECK_THROWS(SpacePartition::from_breakpoints({0.0, 0.0, 1.0}));
    CHECK_THROWS(SpacePartition::uniform(0.0));
  }

  TEST_CASE("ramp hitting sequence") {
    const auto h = lebesgue_times(SpacePartition::uniform(0.25), ramp(), {0.0, 1.0});
    REQUIRE(h.size() == 4);
    for (int i = 0; i < 4; ++i) {
      CHECK(h.times[i] == doctest::Approx(0.25 * (i + 1)).epsilon(1e-15));
      CHECK(h.levels[i] == doctest::Approx(0.25 * (i + 1)).epsilon(1e-15));
    }
    const auto c = build_synthetic({ConstantSpec{0.3, 1.0, 5}});
    CHECK(lebesgue_times(SpacePartition::uniform(0.25), c, c.domain()).empty());
  }

  TEST_CASE("zigzag hitting sequence vs dense scan") {
    const SamplePath w = zigzag({0.0, 0.3, 0.1, 0.4});
    const auto h = lebesgue_times(SpacePartition::uniform(0.25), w, w.domain());
    const auto b = brute_hits(w, 0.25, 333334);  // time step ~1e-6
    REQUIRE(h.size() == b.size());
    // Only 0.25 is hit: the dip to 0.1 and the climb to 0.4 reach no other level.
    CHECK(h.size() == 1);
    CHECK(h.times[0] == doctest::Approx(0.25 / 0.3 / 3.0));
    for (std::size_t i = 0; i < h.size(); ++i) {
      CHECK(std::abs(h.times[i] - b.times[i]) < 1e-6);
      CHECK(h.levels[i] == b.levels[i]);
    }
  }

  TEST_CASE("explicit partitions use their breakpoints") {
    const SamplePath w = zigzag({0.0, 1.0, 0.05, 0.9});
    const auto p = SpacePartition::from_breakpoints({-0.5, 0.1, 0.6, 1.5});
    const auto h = lebesgue_times(p, w, w.domain());
    CHECK(h.levels == std::vector<double>{0.1, 0.6, 0.1, 0.6});
    // Dropping to 0.2 only never leaves the level 0.6 for a different breakpoint.
    const SamplePath shallow = zigzag({0.0, 1.0, 0.2, 0.9});
    CHECK(lebesgue_times(p, shallow, shallow.domain()).levels == std::vector<double>{0.1, 0.6});
  }

  TEST_CASE("count_K examples") {
    CHECK(count_K(ramp(), 0.25, {0.0, 1.0}) == 4);
    CHECK(count_K(ramp(), 0.25, {0.0, 1.0}, 0.1) == 3);
    const auto c = build_synthetic({ConstantSpec{0.0, 1.0, 3}});
    CHECK(count_K(c, 0.25, c.domain()) == 0);
  }

  TEST_CASE("count_K vs dense-scan recount on random walks") {
    for (std::uint64_t s = 0; s < 50; ++s) {
      const SamplePath w = random_walk(s, 100);
      for (double eps : {0.05, 0.13, 0.4}) {
        CHECK(count_K(w, eps, w.domain()) == brute_K(w, eps, 2000));
        const auto h = lebesgue_times(SpacePartition::uniform(eps), w, w.domain());
        const auto b = brute_hits(w, eps, 2000);
        CHECK(h.levels == b.levels);
      }
    }
  }

  TEST_CASE("count_U and count_D examples") {
    // Two separate crossings from 0 up to eps.
    const SamplePath fig = zigzag({0.0, 1.0, 0.0, 1.0}, 3.0);
    CHECK(count_U(fig, 1.0, fig.domain()) == 2);
    CHECK(count_U(ramp(), 0.25, {0.0, 1.0}) == 1);
    for (double a : {-0.3, 0.0, 0.2, 0.5, 0.9}) CHECK(count_D(ramp(), 0.25, {0.0, 1.0}, a) == 0);
    const double eps = 0.25;
    const SamplePath z = zigzag({0.0, eps, 0.0});
    CHECK(count_D(z, eps, z.domain()) == 1);
    CHECK(count_U(z, eps, z.domain()) == 1);
    const auto ub = count_U_bar(zigzag({0.1, 0.5, 0.0}), 0.25, {0.0, 1.0});
    CHECK(ub == 1);  // starts inside (0, eps) and never completes an upcrossing
  }

  TEST_CASE("U and D vs pair enumeration") {
    for (std::uint64_t s = 0; s < 60; ++s) {
      const SamplePath w = random_walk(100 + s, 150);
      for (double eps : {0.05, 0.2}) {
        for (double a : {-0.1, 0.0, 0.07}) {
          const auto [u, d] = brute_UD(w, eps, a);
          CHECK(count_U(w, eps, w.domain(), a) == u);
          CHECK(count_D(w, eps, w.domain(), a) == d);
          CHECK(std::abs(u - d) <= 1);
        }
      }
    }
  }

  TEST_CASE("reflection: D(eps, w) = U(eps, eps - w); the literal -w - eps form fails") {
    for (std::uint64_t s = 0; s < 100; ++s) {
      const SamplePath w = random_walk(500 + s, 80);
      CHECK(count_D(w, 0.1, w.domain()) == count_U(w.affine(-1.0, 0.1), 0.1, w.domain()));
    }
    CHECK(literal_reflection_counterexample().has_value());
  }

  TEST_CASE("windows restrict the path") {
    const SamplePath w = ramp();
    CHECK(count_K(w, 0.25, {0.3, 0.8}) == 1);  // hits .5 then .75; start .3 off-grid
    CHECK_THROWS(count_K(w, 0.25, {0.5, 1.5}));
  }

  TEST_CASE("sample-resolved indices and resolution guard") {
    const SamplePath w = ramp(0.0, 1.0, 8);
    const auto idx = sample_resolved_lebesgue_indices(w, 0.3);
    CHECK(idx == std::vector<std::size_t>{0, 3, 5, 8});
    CHECK(resolution_threshold(1.0, 100, HurstExponent(0.5)) == doctest::Approx(0.3));
    CHECK(resolution_warning(SamplePath::uniform(1.0, std::vector<double>(101, 0.0)), 0.2, HurstExponent(0.5)));
    CHECK_FALSE(resolution_warning(SamplePath::uniform(1.0, std::vector<double>(101, 0.0)), 0.31, HurstExponent(0.5)));
  }

  TEST_CASE("crossing report json round trip") {
    const SamplePath w = zigzag({0.0, 0.6, -0.2, 0.9});
    const CrossingReport r = crossing_report(w, 0.25, w.domain(), 0.0, 0.0, HurstExponent(0.5));
    const CrossingReport back = crossing_report_from_json(to_json(r));
    CHECK(back.K == r.K);
    CHECK(back.U == r.U);
    CHECK(back.D == r.D);
    CHECK(back.hitting.times == r.hitting.times);
    CHECK(back.hitting.levels == r.hitting.levels);
    CHECK(back.epsilon == r.epsilon);
  }

  TEST_CASE("exact invariant suite (reduced)") {
    for (const auto& r : run_invariant_suite(60, 99)) {
      INFO(r.name << ": " << r.first_failure);
      CHECK(r.passed());
    }
  }

  TEST_CASE("fBm path counts are reproducible and grid-consistent") {
    GeneratorConfig g;
    g.hurst = HurstExponent(0.5);
    g.steps = 4096;
    g.seed = 3;
    const SamplePath w = generate_path(g);
    CHECK(count_K(w, 0.05, w.domain()) == brute_K(w, 0.05, 50));
  }
}
