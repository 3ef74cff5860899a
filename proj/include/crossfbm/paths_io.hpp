#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "crossfbm/sample_path.hpp"

namespace crossfbm {

// ---------------------------------------------------------------- synthetic

struct RampSpec {
  double from = 0.0;
  double to = 1.0;
  double horizon = 1.0;
  std::size_t steps = 4;
};

struct ConstantSpec {
  double value = 0.0;
  double horizon = 1.0;
  std::size_t steps = 2;
};

/// Path through the given vertices at equally spaced times over [0, horizon].
struct ZigzagSpec {
  std::vector<double> vertices;
  double horizon = 1.0;
};

/// Simple random walk with steps +-step_size starting at `start`.
struct LatticeWalkSpec {
  double step_size = 1.0;
  std::size_t steps = 10;
  std::uint64_t seed = 0;
  double start = 0.0;
  double dt = 1.0;
};

struct SyntheticPathSpec;

/// Pieces joined end to end; each piece is shifted in time and value so it
/// starts where the previous one ended.
struct ConcatenationSpec {
  std::vector<SyntheticPathSpec> parts;
};

struct SyntheticPathSpec {
  std::variant<RampSpec, ConstantSpec, ZigzagSpec, LatticeWalkSpec, ConcatenationSpec> kind;
};

SamplePath build_synthetic(const SyntheticPathSpec& spec);

/// Reads {"kind": "ramp"|"constant"|"zigzag"|"lattice-walk"|"concatenation", ...}.
SyntheticPathSpec synthetic_spec_from_json(const std::string& text);

// ------------------------------------------------------- piecewise calculus

/// Exact time a linear segment spends inside the closed band [lo, hi].
double segment_time_in_band(double t0, double w0, double t1, double w1, double lo, double hi);

/// Exact integrals over [t0,t1] of f(w(r)) for a linear segment.
double segment_integral_cos(double dt, double w0, double w1);
double segment_integral_square(double dt, double w0, double w1);

/// sup over sample pairs r < s of |w_s - w_r| / (s - r)^alpha. Exact O(n^2)
/// up to exact_limit samples, above that a scan over all pairs at
/// geometrically spaced index lags (a lower bound on the exact value).
struct HolderOptions {
  std::size_t exact_limit = 10'000;
  bool allow_approximate = true;
};
double holder_seminorm(const SamplePath& w, double alpha, const HolderOptions& options = {});

// -------------------------------------------------------------- file formats

/// Header fields carried by the binary format.
struct PathHeader {
  double hurst = 0.5;
  double horizon = 1.0;
  std::uint64_t steps = 0;
  std::uint64_t seed = 0;
};

inline constexpr char kBinaryMagic[8] = {'F', 'B', 'M', 'P', 'A', 'T', 'H', '\0'};
inline constexpr std::uint32_t kBinaryVersion = 1;

/// Binary layout, all little-endian: 8 magic bytes "FBMPATH\0", u32 version,
/// f64 H, f64 T, u64 n, u64 seed, then n+1 f64 values on the grid kT/n.
void write_binary(std::ostream& out, const PathHeader& header, const SamplePath& w);
std::pair<PathHeader, SamplePath> read_binary(std::istream& in);

/// CSV with optional '#'-prefixed metadata line and header "t,w"; numbers are
/// written in shortest round-trip form.
void write_csv(std::ostream& out, const SamplePath& w, const std::string& metadata_json = {});
SamplePath read_csv(std::istream& in, std::string* metadata_json = nullptr);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double x);
double parse_double(std::string_view text);

/// Loads a path from .bin (binary) or any other extension (CSV).
SamplePath load_path(const std::string& file, std::optional<PathHeader>* header = nullptr);

}  // namespace crossfbm
