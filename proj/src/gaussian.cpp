#include "crossfbm/gaussian.hpp"

#include <fftw3.h>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include "crossfbm/errors.hpp"
#include "crossfbm/rng.hpp"

namespace crossfbm {

double fbm_covariance(HurstExponent h, double s, double t) {
  if (s < 0.0 || t < 0.0) throw std::invalid_argument("fbm_covariance needs nonnegative times");
  const double two_h = 2.0 * h.value();
  return 0.5 * (std::pow(s, two_h) + std::pow(t, two_h) - std::pow(std::abs(t - s), two_h));
}

double fgn_autocovariance(HurstExponent h, std::int64_t k) {
  const double two_h = 2.0 * h.value();
  const double a = std::abs(static_cast<double>(k));
  return 0.5 * (std::pow(a + 1.0, two_h) - 2.0 * std::pow(a, two_h) + std::pow(std::abs(a - 1.0), two_h));
}

double gaussian_abs_moment(double p) {
  if (!(p > 0.0)) throw std::invalid_argument("gaussian_abs_moment needs p > 0");
  return std::pow(2.0, 0.5 * p) * std::tgamma(0.5 * (p + 1.0)) / std::sqrt(std::numbers::pi);
}

std::string to_string(GenerationMethod m) {
  switch (m) {
    case GenerationMethod::circulant: return "circulant-embedding";
    case GenerationMethod::cholesky: return "cholesky";
    case GenerationMethod::automatic: return "auto";
  }
  return "unknown";
}

GenerationMethod parse_generation_method(const std::string& name) {
  if (name == "circulant-embedding" || name == "circulant") return GenerationMethod::circulant;
  if (name == "cholesky") return GenerationMethod::cholesky;
  if (name == "auto" || name == "automatic") return GenerationMethod::automatic;
  throw std::invalid_argument("unknown generation method: " + name);
}

void GeneratorConfig::validate() const {
  if (steps < 2) throw std::invalid_argument("generator needs steps >= 2");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw std::invalid_argument("generator needs horizon > 0");
}

std::size_t generation_memory_bytes(GenerationMethod method, std::size_t steps) {
  if (method == GenerationMethod::cholesky) return steps * steps * sizeof(double) + 4 * steps * sizeof(double);
  // Embedding of size 2n: real input, half complex spectrum, eigenvalues, output.
  const std::size_t m = 2 * steps;
  return m * sizeof(double) * 3 + (steps + 1) * sizeof(fftw_complex) + steps * sizeof(double);
}

namespace {

// FFTW planning is not thread-safe; execution of distinct plans is.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const noexcept { fftw_free(p); }
};
template <class T>
using FftwBuffer = std::unique_ptr<T[], FftwFree>;

template <class T>
FftwBuffer<T> fftw_buffer(std::size_t count) {
  auto* raw = static_cast<T*>(fftw_malloc(sizeof(T) * count));
  if (raw == nullptr) throw std::bad_alloc();
  return FftwBuffer<T>(raw);
}

class Plan {
 public:
  explicit Plan(fftw_plan p) : plan_(p) {
    if (plan_ == nullptr) throw std::runtime_error("FFTW plan creation failed");
  }
  ~Plan() {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan_);
  }
  Plan(const Plan&) = delete;
  Plan& operator=(const Plan&) = delete;
  void execute() const { fftw_execute(plan_); }

 private:
  fftw_plan plan_;
};

// Eigenvalues of the symmetric circulant embedding of the fGn autocovariance.
std::vector<double> circulant_eigenvalues(HurstExponent h, std::size_t n) {
  const std::size_t m = 2 * n;
  auto in = fftw_buffer<double>(m);
  auto out = fftw_buffer<fftw_complex>(n + 1);
  std::unique_ptr<Plan> plan;
  {
    std::lock_guard lock(fftw_planner_mutex());
    plan = std::make_unique<Plan>(
        fftw_plan_dft_r2c_1d(static_cast<int>(m), in.get(), out.get(), FFTW_ESTIMATE));
  }
  for (std::size_t k = 0; k <= n; ++k) in[k] = fgn_autocovariance(h, static_cast<std::int64_t>(k));
  for (std::size_t k = 1; k < n; ++k) in[m - k] = in[k];
  plan->execute();
  std::vector<double> lambda(n + 1);
  for (std::size_t k = 0; k <= n; ++k) lambda[k] = out[k][0];
  return lambda;
}

// Returns false when a negative eigenvalue exceeds the tolerance.
bool circulant_increments(const GeneratorConfig& cfg, std::vector<double>& x, GenerationInfo& info) {
  const std::size_t n = cfg.steps;
  const std::size_t m = 2 * n;
  std::vector<double> lambda = circulant_eigenvalues(cfg.hurst, n);
  const double lmax = *std::max_element(lambda.begin(), lambda.end());
  const double lmin = *std::min_element(lambda.begin(), lambda.end());
  info.min_relative_eigenvalue = lmin < 0.0 ? lmin / lmax : 0.0;
  if (lmin < -kEigenvalueTolerance * lmax) return false;
  for (double& l : lambda) {
    if (l < 0.0) {
      l = 0.0;
      info.clamped = true;
    }
  }

  auto spec = fftw_buffer<fftw_complex>(n + 1);
  auto out = fftw_buffer<double>(m);
  std::unique_ptr<Plan> plan;
  {
    std::lock_guard lock(fftw_planner_mutex());
    plan = std::make_unique<Plan>(
        fftw_plan_dft_c2r_1d(static_cast<int>(m), spec.get(), out.get(), FFTW_ESTIMATE));
  }

  Xoshiro256 rng(cfg.seed);
  const double md = static_cast<double>(m);
  spec[0][0] = std::sqrt(lambda[0] / md) * rng.normal();
  spec[0][1] = 0.0;
  for (std::size_t k = 1; k < n; ++k) {
    const double scale = std::sqrt(lambda[k] / (2.0 * md));
    spec[k][0] = scale * rng.normal();
    spec[k][1] = scale * rng.normal();
  }
  spec[n][0] = std::sqrt(lambda[n] / md) * rng.normal();
  spec[n][1] = 0.0;
  plan->execute();

  x.assign(out.get(), out.get() + n);
  info.used = GenerationMethod::circulant;
  return true;
}

void cholesky_increments(const GeneratorConfig& cfg, std::vector<double>& x, GenerationInfo& info) {
  const auto n = static_cast<Eigen::Index>(cfg.steps);
  Eigen::MatrixXd cov(n, n);
  std::vector<double> gamma(cfg.steps);
  for (std::size_t k = 0; k < cfg.steps; ++k) gamma[k] = fgn_autocovariance(cfg.hurst, static_cast<std::int64_t>(k));
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) cov(i, j) = gamma[static_cast<std::size_t>(std::abs(i - j))];
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) throw std::runtime_error("fGn covariance is not positive definite");
  Xoshiro256 rng(cfg.seed);
  Eigen::VectorXd z(n);
  for (Eigen::Index i = 0; i < n; ++i) z(i) = rng.normal();
  Eigen::VectorXd y = llt.matrixL() * z;
  x.assign(y.data(), y.data() + n);
  info.used = GenerationMethod::cholesky;
}

}  // namespace

std::vector<double> generate_increments(const GeneratorConfig& config, GenerationInfo* info) {
  config.validate();
  GenerationInfo local;
  GenerationInfo& gi = info ? *info : local;
  gi = GenerationInfo{};

  std::vector<double> x;
  bool done = false;
  if (config.method != GenerationMethod::cholesky) {
    const std::size_t need = generation_memory_bytes(GenerationMethod::circulant, config.steps);
    if (need > config.memory_cap_bytes)
      throw ResourceError("circulant embedding needs " + std::to_string(need) + " bytes, cap is " +
                          std::to_string(config.memory_cap_bytes));
    done = circulant_increments(config, x, gi);
    if (!done && config.method == GenerationMethod::circulant)
      throw std::runtime_error("circulant embedding has a negative eigenvalue beyond tolerance");
  }
  if (!done) {
    const std::size_t need = generation_memory_bytes(GenerationMethod::cholesky, config.steps);
    if (need > config.memory_cap_bytes)
      throw ResourceError("cholesky generation needs " + std::to_string(need) + " bytes, cap is " +
                          std::to_string(config.memory_cap_bytes));
    cholesky_increments(config, x, gi);
  }

  const double step_scale = std::pow(config.horizon / static_cast<double>(config.steps), config.hurst.value());
  for (double& v : x) v *= step_scale;
  return x;
}

SamplePath generate_path(const GeneratorConfig& config, GenerationInfo* info) {
  std::vector<double> x = generate_increments(config, info);
  std::vector<double> w(x.size() + 1);
  w[0] = 0.0;
  double acc = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    acc += x[k];
    w[k + 1] = acc;
  }
  return SamplePath::uniform(config.horizon, std::move(w));
}

}  // namespace crossfbm
