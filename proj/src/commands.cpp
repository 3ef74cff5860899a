#include "crossfbm/commands.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "crossfbm/crossings.hpp"
#include "crossfbm/errors.hpp"
#include "crossfbm/experiments.hpp"
#include "crossfbm/gaussian.hpp"
#include "crossfbm/localtime.hpp"
#include "crossfbm/paths_io.hpp"
#include "crossfbm/rng.hpp"
#include "crossfbm/selftest.hpp"
#include "crossfbm/variation.hpp"

namespace crossfbm {

std::string config_hash(const nlohmann::json& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : config.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

nlohmann::json run_metadata(const std::string& command, const nlohmann::json& config) {
  nlohmann::json m;
  m["tool"] = "crossfbm";
  m["version"] = kToolVersion;
  m["command"] = command;
  m["config"] = config;
  m["config_hash"] = config_hash(config);
  m["seed"] = config.contains("seed") ? config["seed"] : nlohmann::json();
  return m;
}

namespace {

// Provenance tags shown in --help.
constexpr const char* kPublished = " [published value]";
constexpr const char* kArtifact = " [artifact default]";

struct ParallelFlags {
  unsigned threads = 0;
  bool strict_sequential = false;

  void add(CLI::App* app) {
    app->add_option("--threads", threads, std::string("worker cap, 0 = all cores") + kArtifact)
        ->capture_default_str();
    app->add_flag("--strict-sequential", strict_sequential, "single worker, bit-exact aggregation");
  }
  ParallelOptions options() const { return {threads, strict_sequential}; }
};

void emit(const std::string& path, const std::string& content, std::ostream& out) {
  if (path == "-") {
    out << content;
    out.flush();
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::ios_base::failure("cannot open output file " + path);
  f << content;
  if (!f) throw std::ios_base::failure("failed writing output file " + path);
}

std::string header_line(const nlohmann::json& meta) { return "#" + meta.dump() + "\n"; }

std::string json_document(const nlohmann::json& meta, nlohmann::json body) {
  body["metadata"] = meta;
  return body.dump(2) + "\n";
}

void require_format(const std::string& format, std::initializer_list<const char*> allowed) {
  for (const char* a : allowed)
    if (format == a) return;
  throw ConfigError("unsupported format '" + format + "'");
}

Window resolve_window(const SamplePath& w, std::optional<double> start, std::optional<double> end) {
  return {start.value_or(w.start_time()), end.value_or(w.end_time())};
}

// Strips timing so repeated runs produce identical files; timing goes to stderr.
nlohmann::json without_timing(nlohmann::json j, std::ostream& err) {
  if (j.contains("wall_seconds")) {
    err << "wall time: " << j["wall_seconds"].get<double>() << " s\n";
    j.erase("wall_seconds");
  }
  return j;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Level crossings, Lebesgue partitions and local times of fractional Brownian motion", "crossfbm"};
  app.require_subcommand(1);
  app.set_config("--config", "", "read flags from a TOML/INI file");
  app.set_version_flag("--version", kToolVersion);
  app.footer("Exit codes: 0 ok, 1 failed self test, 2 resolution guard (use --force), 64 usage, 74 I/O.");

  std::string output = "-";
  std::string format;
  // generate
  auto* gen = app.add_subcommand("generate", "sample an fBm path on a uniform grid");
  double g_hurst = 0.5, g_horizon = 1.0;
  std::size_t g_n = 1024;
  std::uint64_t g_seed = 0;
  std::string g_method = "auto";
  gen->add_option("--hurst", g_hurst, std::string("Hurst exponent in (0,1)") + kArtifact)->capture_default_str();
  gen->add_option("--horizon", g_horizon, std::string("time horizon T") + kArtifact)->capture_default_str();
  gen->add_option("--n", g_n, std::string("number of steps") + kArtifact)->capture_default_str();
  gen->add_option("--seed", g_seed, "master seed")->capture_default_str();
  gen->add_option("--method", g_method, "circulant | cholesky | auto")->capture_default_str();

  // crossings
  auto* cross = app.add_subcommand("crossings", "hitting sequence, K, U and D of a stored path");
  std::string c_input;
  double c_eps = 0.0, c_level = 0.0, c_shift = 0.0;
  std::optional<double> c_start, c_end, c_hurst;
  cross->add_option("-i,--input", c_input, "path file (.csv or .bin)")->required();
  cross->add_option("--eps", c_eps, "grid spacing")->required();
  cross->add_option("--start", c_start, "window start (default: path start)");
  cross->add_option("--end", c_end, "window end (default: path end)");
  cross->add_option("--level", c_level, "band level a for U and D")->capture_default_str();
  cross->add_option("--shift", c_shift, "grid shift rho for K")->capture_default_str();
  cross->add_option("--hurst", c_hurst, "enables the resolution warning");

  // variation
  auto* var = app.add_subcommand("variation", "truncated variation, Kbar and Lebesgue variation of a stored path");
  std::string v_input, v_kbar = "level-sweep";
  double v_eps = 0.0, v_hurst = 0.5;
  std::optional<double> v_start, v_end;
  var->add_option("-i,--input", v_input, "path file")->required();
  var->add_option("--eps", v_eps, "grid spacing / truncation level")->required();
  var->add_option("--hurst", v_hurst, std::string("variation order is 1/H") + kArtifact)->capture_default_str();
  var->add_option("--start", v_start, "window start");
  var->add_option("--end", v_end, "window end");
  var->add_option("--kbar-method", v_kbar, "level-sweep | quadrature")->capture_default_str();

  // localtime
  auto* lt = app.add_subcommand("localtime", "local time field of a stored path");
  std::string l_input, l_estimator = "occupation";
  double l_hurst = 0.5, l_width = 0.0, l_eps = 0.01;
  std::vector<double> l_times, l_levels;
  std::optional<double> l_chat;
  lt->add_option("-i,--input", l_input, "path file")->required();
  lt->add_option("--estimator", l_estimator, "occupation | upcrossing")->capture_default_str();
  lt->add_option("--hurst", l_hurst, std::string("Hurst exponent of the path") + kArtifact)->capture_default_str();
  lt->add_option("--bin-width", l_width, std::string("occupation bin width, 0 = range/512") + kArtifact)
      ->capture_default_str();
  lt->add_option("--eps", l_eps, std::string("upcrossing band width") + kArtifact)->capture_default_str();
  lt->add_option("--times", l_times, "evaluation times (default: path end)");
  lt->add_option("--levels", l_levels, "upcrossing levels (default: occupation bin centres)");
  lt->add_option("--chat", l_chat, "c_H estimate for H != 1/2");

  // estimate-ch
  auto* est = app.add_subcommand("estimate-ch", "Monte Carlo estimate of c_H");
  std::string e_estimator = "pathwise";
  double e_hurst = 0.5, e_eps = 0.01, e_ci = 0.95;
  std::optional<double> e_horizon;
  std::size_t e_n = 131072, e_paths = 200;
  std::uint64_t e_seed = 0;
  bool e_force = false;
  ParallelFlags e_par;
  est->add_option("--estimator", e_estimator, "pathwise | fekete")->capture_default_str();
  est->add_option("--hurst", e_hurst, std::string("Hurst exponent") + kArtifact)->capture_default_str();
  est->add_option("--eps", e_eps, std::string("grid spacing (pathwise)") + kArtifact)->capture_default_str();
  est->add_option("--horizon", e_horizon, std::string("T; default 1 (pathwise) or 64 (fekete)") + kArtifact);
  est->add_option("--n", e_n, std::string("steps per path") + kArtifact)->capture_default_str();
  est->add_option("--paths", e_paths, std::string("Monte Carlo paths M") + kArtifact)->capture_default_str();
  est->add_option("--seed", e_seed, "master seed")->capture_default_str();
  est->add_option("--ci-level", e_ci, "confidence level")->capture_default_str();
  est->add_flag("--force", e_force, "run below the resolution threshold 3 (T/n)^H");
  e_par.add(est);

  // conjecture
  auto* conj = app.add_subcommand("conjecture", "compare c_H with E|Z|^{1/H}");
  double k_hurst = 0.4, k_eps = 0.0, k_horizon = 1.0, k_ci = 0.95;
  std::size_t k_n = 16384, k_paths = 1000;
  std::uint64_t k_seed = 0;
  bool k_force = false;
  ParallelFlags k_par;
  conj->add_option("--hurst", k_hurst, std::string("Hurst exponent") + kArtifact)->capture_default_str();
  conj->add_option("--eps", k_eps, std::string("grid spacing, 0 = 4 (T/n)^H") + kArtifact)->capture_default_str();
  conj->add_option("--horizon", k_horizon, std::string("T") + kArtifact)->capture_default_str();
  conj->add_option("--n", k_n, std::string("steps per path") + kArtifact)->capture_default_str();
  conj->add_option("--paths", k_paths, std::string("Monte Carlo paths M") + kArtifact)->capture_default_str();
  conj->add_option("--seed", k_seed, "master seed")->capture_default_str();
  conj->add_option("--ci-level", k_ci, "confidence level")->capture_default_str();
  conj->add_flag("--force", k_force, "run below the resolution threshold");
  k_par.add(conj);

  // figures
  auto* fig = app.add_subcommand("figures", "cumulative deterministic and Lebesgue (1/H)-variation curves");
  double f_hurst = 0.5;
  std::optional<double> f_horizon, f_eps;
  std::optional<std::size_t> f_n;
  std::uint64_t f_seed = 0;
  fig->add_option("--hurst", f_hurst, "Hurst exponent (0.4, 0.5, 0.6 have published defaults)")->required();
  fig->add_option("--horizon", f_horizon, std::string("T; H=0.4: 0.1, H=0.5: 1, H=0.6: 2") + kPublished);
  fig->add_option("--n", f_n, std::string("steps; 30000") + kPublished);
  fig->add_option("--eps", f_eps, std::string("grid spacing; H=0.4: 0.015, H=0.5: 0.014, H=0.6: 0.013") + kPublished);
  fig->add_option("--seed", f_seed, "master seed")->capture_default_str();

  // selftest
  auto* self = app.add_subcommand("selftest", "exact pathwise invariants on synthetic paths");
  std::size_t s_paths = 500, s_vertices = 12;
  std::uint64_t s_seed = 20240607;
  self->add_option("--paths", s_paths, std::string("random paths per invariant") + kArtifact)->capture_default_str();
  self->add_option("--seed", s_seed, "master seed")->capture_default_str();
  self->add_option("--oracle-vertices", s_vertices, std::string("max vertices in the exhaustive TV oracle") + kArtifact)
      ->capture_default_str();

  gen->add_option("-o,--output", output, "output file, - for stdout")->capture_default_str();
  gen->add_option("--format", format, "output format: csv | bin")->capture_default_str();
  for (auto* sub : {cross, var, est, conj}) {
    sub->add_option("-o,--output", output, "output file, - for stdout")->capture_default_str();
    sub->add_option("--format", format, "output format: json | csv")->capture_default_str();
  }
  for (auto* sub : {lt, fig}) {
    sub->add_option("-o,--output", output, "output file, - for stdout")->capture_default_str();
    sub->add_option("--format", format, "output format: csv | json")->capture_default_str();
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen) {
      if (format.empty()) format = "csv";
      require_format(format, {"csv", "bin"});
      GeneratorConfig g;
      g.hurst = HurstExponent(g_hurst);
      g.horizon = g_horizon;
      g.steps = g_n;
      g.seed = g_seed;
      g.method = parse_generation_method(g_method);
      GenerationInfo info;
      const SamplePath w = generate_path(g, &info);
      const nlohmann::json cfg = {{"hurst", g_hurst}, {"horizon", g_horizon}, {"n", g_n},
                                  {"seed", g_seed},   {"method", g_method},   {"rng", kRngName}};
      nlohmann::json meta = run_metadata("generate", cfg);
      meta["generation"] = {{"used", to_string(info.used)},
                            {"min_relative_eigenvalue", info.min_relative_eigenvalue},
                            {"clamped", info.clamped}};
      std::ostringstream os;
      if (format == "bin") {
        if (output == "-") throw ConfigError("binary output needs --output FILE");
        write_binary(os, {g_hurst, g_horizon, g_n, g_seed}, w);
      } else {
        write_csv(os, w, meta.dump());
      }
      emit(output, os.str(), out);
      return kExitOk;
    }

    if (*cross) {
      if (format.empty()) format = "json";
      require_format(format, {"json", "csv"});
      const SamplePath w = load_path(c_input);
      const Window win = resolve_window(w, c_start, c_end);
      std::optional<HurstExponent> h;
      if (c_hurst) h = HurstExponent(*c_hurst);
      const CrossingReport r = crossing_report(w, c_eps, win, c_level, c_shift, h);
      nlohmann::json cfg = {{"input", c_input}, {"eps", c_eps},     {"start", win.start}, {"end", win.end},
                            {"level", c_level}, {"shift", c_shift}, {"hurst", c_hurst ? nlohmann::json(*c_hurst) : nlohmann::json()}};
      nlohmann::json meta = run_metadata("crossings", cfg);
      for (const auto& warning : r.warnings) err << "warning: " << warning << '\n';
      if (format == "json") {
        emit(output, json_document(meta, {{"report", nlohmann::json::parse(to_json(r))}}), out);
      } else {
        meta["results"] = {{"K", r.K}, {"U", r.U}, {"D", r.D}, {"warnings", r.warnings}};
        std::ostringstream os;
        os << header_line(meta) << "index,time,level\n";
        for (std::size_t i = 0; i < r.hitting.size(); ++i)
          os << i + 1 << ',' << format_double(r.hitting.times[i]) << ',' << format_double(r.hitting.levels[i]) << '\n';
        emit(output, os.str(), out);
      }
      return kExitOk;
    }

    if (*var) {
      if (format.empty()) format = "json";
      require_format(format, {"json", "csv"});
      const SamplePath w = load_path(v_input);
      const Window win = resolve_window(w, v_start, v_end);
      const HurstExponent h(v_hurst);
      KbarOptions ko;
      ko.method = parse_kbar_method(v_kbar);
      const double tv = truncated_variation(w, v_eps, win);
      const double band = band_crossing_integral(w, v_eps, win);
      const double kb = kbar(w, v_eps, win, ko);
      const SamplePath piece = w.restrict(win);
      const double det = deterministic_variation(piece, piece.times(), h.inverse());
      nlohmann::json results = {{"truncated_variation", tv},
                                {"band_crossing_integral", band},
                                {"kbar", kb},
                                {"K", count_K(w, v_eps, win)},
                                {"sample_grid_variation", det}};
      const double lo = piece.min_value(), hi = piece.max_value();
      if (std::isfinite(lo) && std::isfinite(hi)) {
        const LebesgueVariation lv = lebesgue_variation(SpacePartition::uniform(v_eps), w, win, h);
        results["lebesgue_variation"] = {{"band_sum", lv.band_sum},
                                         {"partition_sum", lv.partition_sum},
                                         {"boundary_term", lv.boundary_term},
                                         {"scaled_K", lv.scaled_K}};
      }
      const nlohmann::json cfg = {{"input", v_input}, {"eps", v_eps},   {"hurst", v_hurst},
                                  {"start", win.start}, {"end", win.end}, {"kbar_method", v_kbar}};
      const nlohmann::json meta = run_metadata("variation", cfg);
      if (format == "json") {
        emit(output, json_document(meta, {{"results", results}}), out);
      } else {
        std::ostringstream os;
        os << header_line(meta) << "quantity,value\n";
        for (const auto& [k, v] : results.items()) {
          if (v.is_object()) {
            for (const auto& [k2, v2] : v.items()) os << k << '.' << k2 << ',' << v2.dump() << '\n';
          } else {
            os << k << ',' << v.dump() << '\n';
          }
        }
        emit(output, os.str(), out);
      }
      return kExitOk;
    }

    if (*lt) {
      if (format.empty()) format = "csv";
      require_format(format, {"csv", "json"});
      const SamplePath w = load_path(l_input);
      const HurstExponent h(l_hurst);
      if (l_times.empty()) l_times.push_back(w.end_time());
      const double width = l_width > 0.0 ? l_width : default_bin_width(w);
      const LevelBins bins = LevelBins::covering(w.min_value(), w.max_value(), width);
      LocalTimeField field;
      if (l_estimator == "occupation") {
        field = occupation_local_time(w, l_times, bins);
      } else if (l_estimator == "upcrossing") {
        if (l_levels.empty())
          for (std::size_t i = 0; i < bins.count; ++i) l_levels.push_back(bins.center(i));
        field = upcrossing_local_time_field(w, h, l_times, l_eps, l_levels, l_chat);
      } else {
        throw ConfigError("unknown local time estimator: " + l_estimator);
      }
      const nlohmann::json cfg = {{"input", l_input},   {"estimator", l_estimator}, {"hurst", l_hurst},
                                  {"bin_width", width}, {"eps", l_eps},             {"times", l_times},
                                  {"chat", l_chat ? nlohmann::json(*l_chat) : nlohmann::json()}};
      nlohmann::json meta = run_metadata("localtime", cfg);
      meta["field"] = nlohmann::json::parse(local_time_sidecar_json(field));
      meta["field"].erase("levels");
      if (format == "csv") {
        emit(output, header_line(meta) + local_time_csv(field), out);
      } else {
        emit(output, json_document(meta, {{"levels", field.levels}, {"times", field.times}, {"values", field.values}}),
             out);
      }
      return kExitOk;
    }

    if (*est) {
      if (format.empty()) format = "json";
      require_format(format, {"json", "csv"});
      const HurstExponent h(e_hurst);
      GeneratorConfig g;
      g.hurst = h;
      g.steps = e_n;
      g.seed = e_seed;
      EstimatorOptions opts;
      opts.force = e_force;
      opts.ci_level = e_ci;
      opts.parallel = e_par.options();
      MonteCarloSummary s;
      double horizon = 0.0;
      if (e_estimator == "pathwise") {
        horizon = e_horizon.value_or(1.0);
        g.horizon = horizon;
        s = estimate_cH_pathwise(h, e_eps, e_paths, g, opts);
      } else if (e_estimator == "fekete") {
        horizon = e_horizon.value_or(64.0);
        s = estimate_cH_fekete(h, horizon, e_paths, g, opts);
      } else {
        throw ConfigError("unknown estimator: " + e_estimator);
      }
      const nlohmann::json cfg = {{"estimator", e_estimator}, {"hurst", e_hurst}, {"eps", e_eps},
                                  {"horizon", horizon},       {"n", e_n},         {"paths", e_paths},
                                  {"seed", e_seed},           {"ci_level", e_ci}, {"force", e_force}};
      const nlohmann::json meta = run_metadata("estimate-ch", cfg);
      const nlohmann::json summary = without_timing(to_json(s), err);
      if (format == "json") {
        emit(output, json_document(meta, {{"summary", summary}}), out);
      } else {
        std::ostringstream os;
        os << header_line(meta) << "estimand,estimate,std_error,ci_low,ci_high,paths\n"
           << '"' << s.estimand << "\"," << format_double(s.estimate) << ',' << format_double(s.std_error) << ','
           << format_double(s.ci.low) << ',' << format_double(s.ci.high) << ',' << s.paths << '\n';
        emit(output, os.str(), out);
      }
      return kExitOk;
    }

    if (*conj) {
      if (format.empty()) format = "json";
      require_format(format, {"json", "csv"});
      const HurstExponent h(k_hurst);
      ConjectureConfig c;
      c.generator.hurst = h;
      c.generator.horizon = k_horizon;
      c.generator.steps = k_n;
      c.generator.seed = k_seed;
      c.paths = k_paths;
      c.eps = k_eps;
      c.options.force = k_force;
      c.options.ci_level = k_ci;
      c.options.parallel = k_par.options();
      const ConjectureReport r = conjecture_report(h, c);
      const nlohmann::json cfg = {{"hurst", k_hurst}, {"eps", k_eps},     {"horizon", k_horizon}, {"n", k_n},
                                  {"paths", k_paths}, {"seed", k_seed},   {"ci_level", k_ci},     {"force", k_force}};
      const nlohmann::json meta = run_metadata("conjecture", cfg);
      nlohmann::json body = to_json(r);
      body["chat"] = without_timing(body["chat"], err);
      for (const auto& w : r.warnings) err << "warning: " << w << '\n';
      if (format == "json") {
        emit(output, json_document(meta, {{"report", body}}), out);
      } else {
        std::ostringstream os;
        os << header_line(meta) << "hurst,chat,moment,ratio,ratio_ci_low,ratio_ci_high,direction,expected\n"
           << format_double(r.hurst) << ',' << format_double(r.chat.estimate) << ',' << format_double(r.moment) << ','
           << format_double(r.ratio) << ',' << format_double(r.ratio_ci.low) << ',' << format_double(r.ratio_ci.high)
           << ',' << to_string(r.direction) << ',' << to_string(r.expected) << '\n';
        emit(output, os.str(), out);
      }
      return kExitOk;
    }

    if (*fig) {
      if (format.empty()) format = "csv";
      require_format(format, {"csv", "json"});
      const HurstExponent h(f_hurst);
      const FigureParams d = figure_defaults(h);
      const double horizon = f_horizon.value_or(d.horizon);
      const std::size_t steps = f_n.value_or(d.steps);
      const double eps = f_eps.value_or(d.eps);
      const FigureCurves fc = figure_variation_curves(h, horizon, steps, eps, f_seed);
      const nlohmann::json cfg = {{"hurst", f_hurst}, {"horizon", horizon}, {"n", steps},
                                  {"eps", eps},       {"seed", f_seed},     {"published_defaults", d.published}};
      nlohmann::json meta = run_metadata("figures", cfg);
      meta["fits"] = {{"deterministic", {{"slope", fc.slope_deterministic}, {"r2", fc.r2_deterministic}}},
                      {"lebesgue", {{"slope", fc.slope_lebesgue}, {"r2", fc.r2_lebesgue}}}};
      meta["lebesgue_cells"] = fc.stopping_times.size() - 1;
      meta["warnings"] = fc.warnings;
      for (const auto& w : fc.warnings) err << "warning: " << w << '\n';
      if (format == "csv") {
        std::ostringstream os;
        os << header_line(meta) << "t,V_deterministic,V_lebesgue\n";
        for (std::size_t i = 0; i < fc.t.size(); ++i)
          os << format_double(fc.t[i]) << ',' << format_double(fc.v_deterministic[i]) << ','
             << format_double(fc.v_lebesgue[i]) << '\n';
        emit(output, os.str(), out);
      } else {
        emit(output,
             json_document(meta, {{"t", fc.t},
                                  {"V_deterministic", fc.v_deterministic},
                                  {"V_lebesgue", fc.v_lebesgue},
                                  {"stopping_times", fc.stopping_times},
                                  {"V_at_stopping_times", fc.v_at_stopping_times}}),
             out);
      }
      return kExitOk;
    }

    if (*self) {
      auto results = run_invariant_suite(s_paths, s_seed);
      results.push_back(truncated_variation_oracle(s_vertices));
      bool ok = true;
      for (const auto& r : results) {
        out << (r.passed() ? "PASS " : "FAIL ") << r.name << " (" << r.cases << " cases";
        if (r.failures) out << ", " << r.failures << " failures; first: " << r.first_failure;
        out << ")\n";
        ok = ok && r.passed();
      }
      if (auto note = literal_reflection_counterexample())
        out << "INFO literal reflection form D(eps,w) = U(eps,-w-eps) fails: " << *note << '\n';
      return ok ? kExitOk : kExitFailure;
    }
  } catch (const GuardViolation& e) {
    err << "guard: " << e.what() << '\n';
    return kExitGuard;
  } catch (const std::ios_base::failure& e) {
    err << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    err << "usage: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace crossfbm
