#include "crossfbm/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "crossfbm/crossings.hpp"
#include "crossfbm/errors.hpp"
#include "crossfbm/rng.hpp"
#include "crossfbm/variation.hpp"

namespace crossfbm {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

GeneratorConfig path_config(const GeneratorConfig& tmpl, std::size_t index) {
  GeneratorConfig c = tmpl;
  c.seed = substream_seed(tmpl.seed, index);
  return c;
}

SamplePath make_path(const GeneratorConfig& tmpl, std::size_t index, double value_scale) {
  SamplePath p = generate_path(path_config(tmpl, index));
  return value_scale == 1.0 ? p : p.affine(value_scale, 0.0);
}

nlohmann::json generator_json(const GeneratorConfig& g) {
  return {{"hurst", g.hurst.value()}, {"horizon", g.horizon}, {"steps", g.steps},
          {"seed", g.seed},           {"method", to_string(g.method)}, {"rng", kRngName},
          {"normals", kNormalMethod}, {"substreams", "splitmix64(seed ^ splitmix64(index))"}};
}

void check_guard(HurstExponent h, double eps, const GeneratorConfig& g, const EstimatorOptions& o,
                 nlohmann::json& diagnostics) {
  const double threshold = resolution_threshold(g.horizon, g.steps, h);
  diagnostics["resolution_threshold"] = threshold;
  diagnostics["eps_over_step_std"] = eps / std::pow(g.horizon / static_cast<double>(g.steps), h.value());
  if (eps < threshold) {
    std::ostringstream os;
    os << "eps=" << eps << " below resolution threshold 3(T/n)^H=" << threshold;
    if (!o.force) throw GuardViolation(os.str() + " (use force to override)");
    diagnostics["warnings"].push_back(os.str() + "; forced");
  }
}

struct PathwiseSample {
  double scaled_k = 0.0;
  double sample_resolved = 0.0;
  double corrected = 0.0;
};

double sample_resolved_variation(const SamplePath& w, double eps, double order) {
  const auto idx = sample_resolved_lebesgue_indices(w, eps);
  const auto v = w.values();
  double sum = 0.0;
  for (std::size_t k = 1; k < idx.size(); ++k) sum += std::pow(std::abs(v[idx[k]] - v[idx[k - 1]]), order);
  return sum;
}

}  // namespace

MonteCarloSummary estimate_cH_pathwise(HurstExponent h, double eps, std::size_t paths,
                                       const GeneratorConfig& generator, const EstimatorOptions& options) {
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  if (paths < 2) throw std::invalid_argument("need at least two paths");
  GeneratorConfig g = generator;
  g.hurst = h;
  g.validate();
  nlohmann::json diag = nlohmann::json::object();
  check_guard(h, eps * (options.value_scale == 1.0 ? 1.0 : 1.0 / options.value_scale), g, options, diag);
  const auto t0 = Clock::now();
  const double order = h.inverse();
  const double horizon = g.horizon;
  const double step_std = options.value_scale * std::pow(horizon / static_cast<double>(g.steps), h.value());
  const Window window{0.0, horizon};

  const auto results = parallel_map<PathwiseSample>(paths, options.parallel, [&](std::size_t i) {
    const SamplePath w = make_path(g, i, options.value_scale);
    const auto k = static_cast<double>(count_K(w, eps, window));
    PathwiseSample s;
    s.scaled_k = std::pow(eps, order) * k / horizon;
    s.sample_resolved = sample_resolved_variation(w, eps, order) / horizon;
    s.corrected = std::pow(eps + kOvershootConstant * step_std, order) * k / horizon;
    return s;
  });

  std::vector<double> scaled(paths), resolved(paths), corrected(paths);
  for (std::size_t i = 0; i < paths; ++i) {
    scaled[i] = results[i].scaled_k;
    resolved[i] = results[i].sample_resolved;
    corrected[i] = results[i].corrected;
  }
  MonteCarloSummary s = summarize("c_H (pathwise eps^{1/H} K / T)", scaled, options.ci_level);
  s.seed = g.seed;
  s.config = {{"generator", generator_json(g)},
              {"eps", eps},
              {"paths", paths},
              {"value_scale", options.value_scale},
              {"estimator", "pathwise"}};
  const MonteCarloSummary r = summarize("sample-resolved Lebesgue variation / T", resolved, options.ci_level);
  diag["sample_resolved_variation"] = {{"estimate", r.estimate}, {"std_error", r.std_error}};
  if (h.value() == 0.5) {
    const MonteCarloSummary c = summarize("overshoot-corrected", corrected, options.ci_level);
    diag["overshoot_corrected"] = {{"estimate", c.estimate}, {"std_error", c.std_error},
                                   {"step_std", step_std}, {"constant", kOvershootConstant}};
  }
  s.diagnostics = diag;
  s.wall_seconds = seconds_since(t0);
  return s;
}

MonteCarloSummary estimate_cH_fekete(HurstExponent h, double horizon, std::size_t paths,
                                     const GeneratorConfig& generator, const EstimatorOptions& options) {
  if (!(horizon >= 1.0)) throw std::invalid_argument("Fekete estimator needs horizon T >= 1");
  if (paths < 2) throw std::invalid_argument("need at least two paths");
  GeneratorConfig g = generator;
  g.hurst = h;
  g.horizon = horizon;
  g.validate();
  nlohmann::json diag = nlohmann::json::object();
  check_guard(h, 1.0 / options.value_scale, g, options, diag);
  const auto t0 = Clock::now();
  const Window window{0.0, horizon};
  const auto samples = parallel_map<double>(paths, options.parallel, [&](std::size_t i) {
    const SamplePath w = make_path(g, i, options.value_scale);
    return kbar(w, 1.0, window) / horizon;
  });
  MonteCarloSummary s = summarize("c_H (Fekete E[Kbar_{0,T}(1,B)] / T)", samples, options.ci_level);
  s.seed = g.seed;
  s.config = {{"generator", generator_json(g)},
              {"horizon", horizon},
              {"paths", paths},
              {"value_scale", options.value_scale},
              {"estimator", "fekete"},
              {"kbar_method", "level-sweep"}};
  diag["bias_bound"] = 1.0 / horizon;
  diag["fekete_bracket"] = {s.estimate, s.estimate + 1.0 / horizon};
  s.diagnostics = diag;
  s.wall_seconds = seconds_since(t0);
  return s;
}

std::string to_string(Direction d) {
  switch (d) {
    case Direction::ratio_above_one: return "ratio>1";
    case Direction::ratio_below_one: return "ratio<1";
    case Direction::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

double suggested_eps(HurstExponent h, double horizon, std::size_t steps) {
  return 4.0 * std::pow(horizon / static_cast<double>(steps), h.value());
}

ConjectureReport conjecture_report(HurstExponent h, const ConjectureConfig& config) {
  ConjectureReport r;
  r.hurst = h.value();
  GeneratorConfig g = config.generator;
  g.hurst = h;
  const double eps = config.eps > 0.0 ? config.eps : suggested_eps(h, g.horizon, g.steps);
  r.chat = estimate_cH_pathwise(h, eps, config.paths, g, config.options);
  const double scale = config.options.value_scale;
  r.moment = std::pow(scale, h.inverse()) * gaussian_abs_moment(h.inverse());
  r.ratio = r.chat.estimate / r.moment;
  r.ratio_ci = {r.chat.ci.level, r.chat.ci.low / r.moment, r.chat.ci.high / r.moment};
  if (r.ratio_ci.low > 1.0)
    r.direction = Direction::ratio_above_one;
  else if (r.ratio_ci.high < 1.0)
    r.direction = Direction::ratio_below_one;
  if (h.value() < 0.5) r.expected = Direction::ratio_above_one;
  if (h.value() > 0.5) r.expected = Direction::ratio_below_one;
  r.sample_resolved_ratio = r.chat.diagnostics["sample_resolved_variation"]["estimate"].get<double>() / r.moment;

  if (r.chat.diagnostics.contains("warnings"))
    for (const auto& w : r.chat.diagnostics["warnings"]) r.warnings.push_back(w.get<std::string>());
  if (r.expected != Direction::inconclusive && r.direction != Direction::inconclusive && r.direction != r.expected) {
    r.warnings.push_back("observed direction " + to_string(r.direction) + " contradicts the conjectured " +
                         to_string(r.expected));
  }
  if (h.value() == 0.5 && !r.ratio_ci.contains(1.0))
    r.warnings.push_back("ratio CI excludes 1 at H = 1/2 where the ratio is exactly 1; discretization bias likely");
  return r;
}

nlohmann::json to_json(const ConjectureReport& r) {
  return {{"hurst", r.hurst},
          {"chat", to_json(r.chat)},
          {"moment", r.moment},
          {"ratio", r.ratio},
          {"ratio_ci", {{"level", r.ratio_ci.level}, {"low", r.ratio_ci.low}, {"high", r.ratio_ci.high}}},
          {"direction", to_string(r.direction)},
          {"expected_direction", to_string(r.expected)},
          {"sample_resolved_ratio", r.sample_resolved_ratio},
          {"warnings", r.warnings}};
}

FigureParams figure_defaults(HurstExponent h) {
  const double v = h.value();
  if (v == 0.4) return {0.1, 30000, 0.015, true};
  if (v == 0.5) return {1.0, 30000, 0.014, true};
  if (v == 0.6) return {2.0, 30000, 0.013, true};
  return {1.0, 30000, suggested_eps(h, 1.0, 30000), false};
}

LinearFit least_squares(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("least squares needs matching samples");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LinearFit f;
  f.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  f.intercept = my - f.slope * mx;
  f.r2 = (sxx > 0.0 && syy > 0.0) ? (sxy * sxy) / (sxx * syy) : (syy == 0.0 ? 1.0 : 0.0);
  return f;
}

FigureCurves figure_from_path(const SamplePath& w, HurstExponent h, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  FigureCurves f;
  f.hurst = h.value();
  f.eps = eps;
  const double order = h.inverse();
  const auto t = w.times();
  const auto v = w.values();
  f.t.assign(t.begin(), t.end());
  f.v_deterministic.resize(v.size());
  f.v_lebesgue.resize(v.size());
  f.v_deterministic[0] = 0.0;
  for (std::size_t i = 1; i < v.size(); ++i)
    f.v_deterministic[i] = f.v_deterministic[i - 1] + std::pow(std::abs(v[i] - v[i - 1]), order);

  const auto idx = sample_resolved_lebesgue_indices(w, eps);
  double acc = 0.0;
  f.stopping_times.push_back(t[0]);
  f.v_at_stopping_times.push_back(0.0);
  std::size_t next = 1;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (next < idx.size() && idx[next] == i) {
      acc += std::pow(std::abs(v[i] - v[idx[next - 1]]), order);
      f.stopping_times.push_back(t[i]);
      f.v_at_stopping_times.push_back(acc);
      ++next;
    }
    f.v_lebesgue[i] = acc;
  }
  const LinearFit det = least_squares(f.t, f.v_deterministic);
  const LinearFit leb = least_squares(f.t, f.v_lebesgue);
  f.slope_deterministic = det.slope;
  f.r2_deterministic = det.r2;
  f.slope_lebesgue = leb.slope;
  f.r2_lebesgue = leb.r2;
  if (auto msg = resolution_warning(w, eps, h)) f.warnings.push_back(*msg);
  if (idx.size() < 20) f.warnings.push_back("Lebesgue partition has fewer than 20 cells; eps is too coarse");
  return f;
}

FigureCurves figure_variation_curves(HurstExponent h, double horizon, std::size_t steps, double eps,
                                     std::uint64_t seed) {
  GeneratorConfig g;
  g.hurst = h;
  g.horizon = horizon;
  g.steps = steps;
  g.seed = seed;
  return figure_from_path(generate_path(g), h, eps);
}

std::vector<ConvergenceRow> convergence_sweep(HurstExponent h, const std::vector<double>& eps_values,
                                              std::size_t paths, const GeneratorConfig& generator,
                                              const EstimatorOptions& options) {
  if (eps_values.empty()) throw std::invalid_argument("convergence sweep needs eps values");
  for (std::size_t i = 1; i < eps_values.size(); ++i)
    if (!(eps_values[i] < eps_values[i - 1])) throw std::invalid_argument("eps sequence must be decreasing");
  if (paths < 2) throw std::invalid_argument("need at least two paths");
  GeneratorConfig g = generator;
  g.hurst = h;
  g.validate();
  nlohmann::json diag;
  for (double e : eps_values) check_guard(h, e, g, options, diag);
  const double order = h.inverse();
  const double horizon = g.horizon;
  const double dt = horizon / static_cast<double>(g.steps);
  const std::size_t m = eps_values.size();

  std::vector<std::size_t> strides(m);
  for (std::size_t j = 0; j < m; ++j) {
    const double mesh = std::pow(eps_values[j], order);
    strides[j] = std::clamp<std::size_t>(static_cast<std::size_t>(std::lround(mesh / dt)), 1, g.steps);
  }

  const auto per_path = parallel_map<std::vector<double>>(paths, options.parallel, [&](std::size_t i) {
    const SamplePath w = make_path(g, i, options.value_scale);
    const auto v = w.values();
    std::vector<double> out(2 * m);
    for (std::size_t j = 0; j < m; ++j) {
      out[j] = std::pow(eps_values[j], order) * static_cast<double>(count_K(w, eps_values[j], {0.0, horizon})) /
               horizon;
      const std::size_t s = strides[j];
      const std::size_t cells = g.steps / s;
      double sum = 0.0;
      for (std::size_t c = 0; c < cells; ++c) sum += std::pow(std::abs(v[(c + 1) * s] - v[c * s]), order);
      out[m + j] = sum / (static_cast<double>(cells * s) * dt);
    }
    return out;
  });

  std::vector<ConvergenceRow> rows(m);
  std::vector<double> col(paths);
  for (std::size_t j = 0; j < m; ++j) {
    rows[j].eps = eps_values[j];
    rows[j].deterministic_stride = strides[j];
    for (std::size_t i = 0; i < paths; ++i) col[i] = per_path[i][j];
    const MonteCarloSummary a = summarize("scaled K", col, options.ci_level);
    for (std::size_t i = 0; i < paths; ++i) col[i] = per_path[i][m + j];
    const MonteCarloSummary b = summarize("deterministic", col, options.ci_level);
    rows[j].mean_scaled_K = a.estimate;
    rows[j].se_scaled_K = a.std_error;
    rows[j].mean_deterministic = b.estimate;
    rows[j].se_deterministic = b.std_error;
  }
  return rows;
}

}  // namespace crossfbm
