#include "crossfbm/montecarlo.hpp"

#include <cmath>
#include <stdexcept>

#include "crossfbm/rng.hpp"

namespace crossfbm {

double pairwise_sum(std::span<const double> xs) {
  if (xs.size() <= 8) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
  }
  const std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

double ci_z(double level) {
  if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("confidence level must lie in (0,1)");
  return normal_quantile(0.5 + 0.5 * level);
}

MonteCarloSummary summarize(std::string estimand, std::span<const double> samples, double ci_level) {
  if (samples.empty()) throw std::invalid_argument("no Monte Carlo samples");
  MonteCarloSummary s;
  s.estimand = std::move(estimand);
  s.paths = samples.size();
  const double m = static_cast<double>(samples.size());
  s.estimate = pairwise_sum(samples) / m;
  if (samples.size() > 1) {
    std::vector<double> sq(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) sq[i] = (samples[i] - s.estimate) * (samples[i] - s.estimate);
    s.sample_std = std::sqrt(pairwise_sum(sq) / (m - 1.0));
  }
  s.std_error = s.sample_std / std::sqrt(m);
  const double z = ci_z(ci_level);
  s.ci = {ci_level, s.estimate - z * s.std_error, s.estimate + z * s.std_error};
  return s;
}

nlohmann::json to_json(const MonteCarloSummary& s) {
  nlohmann::json j;
  j["estimand"] = s.estimand;
  j["estimate"] = s.estimate;
  j["std_error"] = s.std_error;
  j["sample_std"] = s.sample_std;
  j["ci"] = {{"level", s.ci.level}, {"low", s.ci.low}, {"high", s.ci.high}};
  j["paths"] = s.paths;
  j["seed"] = s.seed;
  j["config"] = s.config;
  j["diagnostics"] = s.diagnostics;
  j["wall_seconds"] = s.wall_seconds;
  return j;
}

}  // namespace crossfbm
