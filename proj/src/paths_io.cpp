#include "crossfbm/paths_io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "crossfbm/rng.hpp"

namespace crossfbm {

// ---------------------------------------------------------------- synthetic

namespace {

struct Builder {
  SamplePath operator()(const RampSpec& s) const {
    if (s.steps < 1) throw std::invalid_argument("ramp needs at least one step");
    std::vector<double> v(s.steps + 1);
    for (std::size_t k = 0; k <= s.steps; ++k)
      v[k] = s.from + (s.to - s.from) * static_cast<double>(k) / static_cast<double>(s.steps);
    v.back() = s.to;
    return SamplePath::uniform(s.horizon, std::move(v));
  }
  SamplePath operator()(const ConstantSpec& s) const {
    if (s.steps < 1) throw std::invalid_argument("constant path needs at least one step");
    return SamplePath::uniform(s.horizon, std::vector<double>(s.steps + 1, s.value));
  }
  SamplePath operator()(const ZigzagSpec& s) const {
    if (s.vertices.size() < 2) throw std::invalid_argument("zigzag needs at least two vertices");
    return SamplePath::uniform(s.horizon, s.vertices);
  }
  SamplePath operator()(const LatticeWalkSpec& s) const {
    if (s.steps < 1) throw std::invalid_argument("lattice walk needs at least one step");
    if (!(s.step_size > 0.0) || !(s.dt > 0.0)) throw std::invalid_argument("lattice walk needs positive step and dt");
    Xoshiro256 rng(s.seed);
    std::vector<double> v(s.steps + 1);
    v[0] = s.start;
    for (std::size_t k = 1; k <= s.steps; ++k) v[k] = v[k - 1] + ((rng() >> 63) ? s.step_size : -s.step_size);
    return SamplePath::uniform(s.dt * static_cast<double>(s.steps), std::move(v));
  }
  SamplePath operator()(const ConcatenationSpec& s) const {
    if (s.parts.empty()) throw std::invalid_argument("concatenation needs at least one part");
    std::vector<double> t, v;
    for (const auto& part : s.parts) {
      const SamplePath p = build_synthetic(part);
      const double dt = t.empty() ? -p.start_time() : t.back() - p.start_time();
      const double dv = v.empty() ? 0.0 : v.back() - p.values()[0];
      for (std::size_t i = t.empty() ? 0 : 1; i < p.size(); ++i) {
        t.push_back(p.times()[i] + dt);
        v.push_back(p.values()[i] + dv);
      }
    }
    return SamplePath(std::move(t), std::move(v));
  }
};

SyntheticPathSpec spec_from(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "ramp")
    return {RampSpec{j.value("from", 0.0), j.value("to", 1.0), j.value("horizon", 1.0),
                     j.value("steps", std::size_t{4})}};
  if (kind == "constant")
    return {ConstantSpec{j.at("value").get<double>(), j.value("horizon", 1.0), j.value("steps", std::size_t{2})}};
  if (kind == "zigzag")
    return {ZigzagSpec{j.at("vertices").get<std::vector<double>>(), j.value("horizon", 1.0)}};
  if (kind == "lattice-walk")
    return {LatticeWalkSpec{j.value("step", 1.0), j.at("steps").get<std::size_t>(), j.value("seed", std::uint64_t{0}),
                            j.value("start", 0.0), j.value("dt", 1.0)}};
  if (kind == "concatenation") {
    ConcatenationSpec c;
    for (const auto& part : j.at("parts")) c.parts.push_back(spec_from(part));
    return {std::move(c)};
  }
  throw std::invalid_argument("unknown synthetic path kind: " + kind);
}

}  // namespace

SamplePath build_synthetic(const SyntheticPathSpec& spec) { return std::visit(Builder{}, spec.kind); }

SyntheticPathSpec synthetic_spec_from_json(const std::string& text) {
  try {
    return spec_from(nlohmann::json::parse(text));
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed synthetic path spec: ") + e.what());
  }
}

// ------------------------------------------------------- piecewise calculus

double segment_time_in_band(double t0, double w0, double t1, double w1, double lo, double hi) {
  if (!(lo < hi)) throw std::invalid_argument("band needs lo < hi");
  const double dt = t1 - t0;
  if (w0 == w1) return (w0 >= lo && w0 <= hi) ? dt : 0.0;
  const double a = std::min(w0, w1), b = std::max(w0, w1);
  const double overlap = std::min(b, hi) - std::max(a, lo);
  if (overlap <= 0.0) return 0.0;
  return dt * overlap / (b - a);
}

double segment_integral_cos(double dt, double w0, double w1) {
  const double d = w1 - w0;
  if (std::abs(d) < 1e-8) {
    // Series of (sin w1 - sin w0)/d about the midpoint.
    const double m = 0.5 * (w0 + w1);
    return dt * std::cos(m) * (1.0 - d * d / 24.0);
  }
  return dt * (std::sin(w1) - std::sin(w0)) / d;
}

double segment_integral_square(double dt, double w0, double w1) {
  return dt * (w0 * w0 + w0 * w1 + w1 * w1) / 3.0;
}

double holder_seminorm(const SamplePath& w, double alpha, const HolderOptions& options) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("Holder exponent must lie in (0,1)");
  const auto t = w.times();
  const auto v = w.values();
  const std::size_t n = v.size();
  double best = 0.0;
  auto scan_lag = [&](std::size_t lag) {
    for (std::size_t i = 0; i + lag < n; ++i) {
      const double r = std::abs(v[i + lag] - v[i]) / std::pow(t[i + lag] - t[i], alpha);
      best = std::max(best, r);
    }
  };
  if (n <= options.exact_limit) {
    for (std::size_t lag = 1; lag < n; ++lag) scan_lag(lag);
    return best;
  }
  if (!options.allow_approximate)
    throw std::length_error("exact Holder seminorm limited to " + std::to_string(options.exact_limit) + " samples");
  for (std::size_t lag = 1; lag < n;) {
    scan_lag(lag);
    lag = std::max(lag + 1, static_cast<std::size_t>(static_cast<double>(lag) * 1.05));
  }
  scan_lag(n - 1);
  return best;
}

// -------------------------------------------------------------- file formats

namespace {

void put_u64(std::ostream& out, std::uint64_t x) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((x >> (8 * i)) & 0xFF);
  out.write(b, 8);
}

void put_u32(std::ostream& out, std::uint32_t x) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((x >> (8 * i)) & 0xFF);
  out.write(b, 4);
}

std::uint64_t get_u64(std::istream& in) {
  unsigned char b[8];
  if (!in.read(reinterpret_cast<char*>(b), 8)) throw std::runtime_error("truncated binary path file");
  std::uint64_t x = 0;
  for (int i = 7; i >= 0; --i) x = (x << 8) | b[i];
  return x;
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) throw std::runtime_error("truncated binary path file");
  std::uint32_t x = 0;
  for (int i = 3; i >= 0; --i) x = (x << 8) | b[i];
  return x;
}

void put_f64(std::ostream& out, double x) { put_u64(out, std::bit_cast<std::uint64_t>(x)); }
double get_f64(std::istream& in) { return std::bit_cast<double>(get_u64(in)); }

}  // namespace

void write_binary(std::ostream& out, const PathHeader& header, const SamplePath& w) {
  if (header.steps != w.steps()) throw std::invalid_argument("binary header step count does not match path");
  out.write(kBinaryMagic, sizeof kBinaryMagic);
  put_u32(out, kBinaryVersion);
  put_f64(out, header.hurst);
  put_f64(out, header.horizon);
  put_u64(out, header.steps);
  put_u64(out, header.seed);
  for (double x : w.values()) put_f64(out, x);
  if (!out) throw std::runtime_error("failed writing binary path");
}

std::pair<PathHeader, SamplePath> read_binary(std::istream& in) {
  char magic[8];
  if (!in.read(magic, 8) || !std::equal(magic, magic + 8, kBinaryMagic))
    throw std::runtime_error("not a binary path file (bad magic)");
  const std::uint32_t version = get_u32(in);
  if (version != kBinaryVersion) throw std::runtime_error("unsupported binary path version " + std::to_string(version));
  PathHeader h;
  h.hurst = get_f64(in);
  h.horizon = get_f64(in);
  h.steps = get_u64(in);
  h.seed = get_u64(in);
  if (h.steps < 1 || h.steps > (std::uint64_t{1} << 40)) throw std::runtime_error("implausible step count in binary path");
  std::vector<double> v(h.steps + 1);
  for (double& x : v) x = get_f64(in);
  return {h, SamplePath::uniform(h.horizon, std::move(v))};
}

std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\r' || text.back() == '\t')) text.remove_suffix(1);
  double x = 0.0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), x);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size())
    throw std::invalid_argument("not a number: '" + std::string(text) + "'");
  return x;
}

void write_csv(std::ostream& out, const SamplePath& w, const std::string& metadata_json) {
  if (!metadata_json.empty()) out << '#' << metadata_json << '\n';
  out << "t,w\n";
  const auto t = w.times();
  const auto v = w.values();
  for (std::size_t i = 0; i < v.size(); ++i) out << format_double(t[i]) << ',' << format_double(v[i]) << '\n';
  if (!out) throw std::runtime_error("failed writing CSV path");
}

SamplePath read_csv(std::istream& in, std::string* metadata_json) {
  std::vector<double> t, v;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      if (metadata_json && metadata_json->empty()) *metadata_json = line.substr(1);
      continue;
    }
    if (!header_seen) {
      header_seen = true;
      if (line == "t,w") continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw std::invalid_argument("CSV path row needs two columns: " + line);
    t.push_back(parse_double(std::string_view(line).substr(0, comma)));
    v.push_back(parse_double(std::string_view(line).substr(comma + 1)));
  }
  return SamplePath(std::move(t), std::move(v));
}

SamplePath load_path(const std::string& file, std::optional<PathHeader>* header) {
  const bool binary = file.size() >= 4 && file.substr(file.size() - 4) == ".bin";
  std::ifstream in(file, binary ? std::ios::binary : std::ios::in);
  if (!in) throw std::ios_base::failure("cannot open path file " + file);
  if (binary) {
    auto [h, p] = read_binary(in);
    if (header) *header = h;
    return std::move(p);
  }
  if (header) header->reset();
  return read_csv(in);
}

}  // namespace crossfbm
