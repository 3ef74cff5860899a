#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "crossfbm/sample_path.hpp"

namespace crossfbm {

/// Cov(B_s, B_t) = (s^{2H} + t^{2H} - |t-s|^{2H}) / 2 under unit normalization
/// E[(B_t - B_s)^2] = |t-s|^{2H}.
double fbm_covariance(HurstExponent h, double s, double t);

/// Autocovariance of unit-step fractional Gaussian noise at integer lag k.
double fgn_autocovariance(HurstExponent h, std::int64_t k);

/// E|Z|^p for standard normal Z, i.e. 2^{p/2} Gamma((p+1)/2) / sqrt(pi).
double gaussian_abs_moment(double p);

enum class GenerationMethod { circulant, cholesky, automatic };

std::string to_string(GenerationMethod m);
GenerationMethod parse_generation_method(const std::string& name);

struct GeneratorConfig {
  HurstExponent hurst{0.5};
  double horizon = 1.0;
  std::size_t steps = 1024;
  std::uint64_t seed = 0;
  GenerationMethod method = GenerationMethod::automatic;
  /// Cap on working memory of the generator, bytes.
  std::size_t memory_cap_bytes = std::size_t{2} << 30;

  void validate() const;
};

/// Outcome details of one generation call.
struct GenerationInfo {
  GenerationMethod used = GenerationMethod::circulant;
  /// Most negative circulant eigenvalue relative to the largest (0 if none).
  double min_relative_eigenvalue = 0.0;
  bool clamped = false;
};

/// Relative threshold below which a negative circulant eigenvalue forces fallback.
inline constexpr double kEigenvalueTolerance = 1e-8;

/// Exact-in-law fBm sample on the grid k*T/n, k = 0..n, starting at 0.
/// A pure function of the config; throws ResourceError when the memory
/// estimate exceeds the cap, and std::runtime_error when the circulant
/// embedding is invalid and method == circulant.
SamplePath generate_path(const GeneratorConfig& config, GenerationInfo* info = nullptr);

/// Increments (fractional Gaussian noise scaled to step T/n) only.
std::vector<double> generate_increments(const GeneratorConfig& config, GenerationInfo* info = nullptr);

/// Estimated working memory of a generation method for n steps.
std::size_t generation_memory_bytes(GenerationMethod method, std::size_t steps);

}  // namespace crossfbm
