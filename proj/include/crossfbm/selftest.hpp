#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "crossfbm/sample_path.hpp"

namespace crossfbm {

struct InvariantResult {
  std::string name;
  std::size_t cases = 0;
  std::size_t failures = 0;
  std::string first_failure;

  bool passed() const noexcept { return failures == 0 && cases > 0; }
};

/// Randomized synthetic path: a lattice walk, a real-valued walk on irregular
/// times, or a walk with flat stretches, chosen by the draw index.
SamplePath random_synthetic_path(std::uint64_t seed, std::size_t max_steps = 120);

/// Exact pathwise invariants, each checked on `paths` random synthetic paths.
/// Integer identities use zero tolerance; real ones 1e-9 relative.
std::vector<InvariantResult> run_invariant_suite(std::size_t paths = 500, std::uint64_t seed = 20240607);

/// Truncated variation against exhaustive maximization over vertex partitions,
/// for every +-1 lattice walk with at most max_vertices vertices inside [lo, hi].
InvariantResult truncated_variation_oracle(std::size_t max_vertices = 12, int lo = -3, int hi = 3);

/// Brute force: max over all subsets of interior vertices.
double exhaustive_truncated_variation(const std::vector<double>& values, double eps);

/// A path on which D(eps, w) != U(eps, -w - eps), if the literal reflection
/// form fails; the form D(eps, w) = U(eps, eps - w) is the one that holds.
std::optional<std::string> literal_reflection_counterexample();

}  // namespace crossfbm
