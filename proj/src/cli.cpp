#include "patred/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "patred/error.hpp"
#include "patred/evalbench.hpp"
#include "patred/format.hpp"
#include "patred/json_io.hpp"
#include "patred/report.hpp"
#include "patred/search.hpp"
#include "patred/service.hpp"

namespace patred::cli {

namespace {

struct Common {
  std::uint64_t seed = 0;
  std::string out;
  std::string config;  // consumed before parsing; declared so --help lists it
};

struct RedundancyFlags {
  std::string kind;
  std::optional<int> n;
  std::optional<int> copies;
  std::optional<double> shift;
  std::optional<double> eta;
  std::optional<double> sd;

  RedundancyConfig resolve(std::uint64_t seed, RedundancyConfig fallback) const {
    RedundancyConfig cfg = fallback;
    if (!kind.empty()) cfg.kind = parse_redundancy_kind(kind);
    if (n) cfg.n_points = *n;
    if (copies) cfg.copies = *copies;
    if (shift) cfg.shift = *shift;
    if (eta) cfg.eta = *eta;
    if (sd) cfg.sd = *sd;
    cfg.seed = seed;
    cfg.validate();
    return cfg;
  }
};

struct SearchFlags {
  std::string pattern;
  std::string pattern_column;
  std::string data;
  std::string column;
  std::string metric = "nmi";
  std::string mode;
  int b = kDefaultBins;
  bool bins_per_segment = false;
  std::optional<std::size_t> window;
  std::size_t stride = 1;
  std::size_t top_k = 9;
  std::optional<std::size_t> exclusion;
  std::string normalization = "minmax";
  std::size_t smooth = 0;
  std::string svg;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--seed", c.seed, "Seed for every random draw");
  cmd->add_option("--out", c.out, "Output file (stdout when omitted)");
  cmd->add_option("--config", c.config, "JSON file whose keys are read as flags");
}

void add_redundancy(CLI::App* cmd, RedundancyFlags& r) {
  cmd->add_option("--redundancy", r.kind, "none | equidistant | areaLine | cloud | gaussCloud");
  cmd->add_option("--n", r.n, "Redundant points per segment");
  cmd->add_option("--copies", r.copies, "Area-line copies");
  cmd->add_option("--shift", r.shift, "Area-line vertical step");
  cmd->add_option("--eta", r.eta, "Cloud noise amplitude");
  cmd->add_option("--sd", r.sd, "Gauss-cloud standard deviation");
}

void add_search(CLI::App* cmd, SearchFlags& s) {
  cmd->add_option("--pattern", s.pattern, "Pattern CSV (x,y columns or one value column)")->required();
  cmd->add_option("--pattern-column", s.pattern_column, "Value column of the pattern CSV");
  cmd->add_option("--data", s.data, "Series CSV")->required();
  cmd->add_option("--column", s.column, "Value column of the series CSV (default: last)");
  cmd->add_option("--metric", s.metric, "Distance metric");
  cmd->add_option("--mode", s.mode, "sequence | raster (default: canonical for the metric)");
  cmd->add_option("--b", s.b, "Grid side");
  cmd->add_flag("--bins-per-segment", s.bins_per_segment, "Use 8 bins per line segment for the grid side");
  cmd->add_option("--window", s.window, "Window length (default: pattern points)");
  cmd->add_option("--stride", s.stride, "Window stride");
  cmd->add_option("--top-k", s.top_k, "Matches to return");
  cmd->add_option("--exclusion", s.exclusion, "Minimum start distance between matches (default: window)");
  cmd->add_option("--normalization", s.normalization, "minmax | zscore");
  cmd->add_option("--smooth", s.smooth, "Moving-average width applied to the series first (0 = off)");
  cmd->add_option("--svg", s.svg, "Also write an SVG figure here");
}

SearchRequest build_request(const SearchFlags& s, const RedundancyFlags& r, std::uint64_t seed) {
  TimeSeries series = load_csv(s.data, s.column);
  if (s.smooth > 1) series = smooth_moving_average(series, s.smooth);
  SearchRequest req{load_pattern_csv(s.pattern, s.pattern_column), std::move(series)};
  req.metric = parse_metric(s.metric);
  if (!s.mode.empty()) req.mode = parse_mode(s.mode);
  req.redundancy = r.resolve(seed, req.redundancy);
  req.b = s.b;
  req.bins_per_segment = s.bins_per_segment;
  req.window = s.window;
  req.stride = s.stride;
  req.top_k = s.top_k;
  req.exclusion = s.exclusion;
  if (s.normalization == "zscore") {
    req.normalization = WindowNormalization::kZScore;
  } else if (s.normalization != "minmax") {
    throw Error(ErrorCode::kInvalidArgument, "--normalization must be minmax or zscore");
  }
  req.validate();
  return req;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  f << text;
  if (!f) throw Error(ErrorCode::kIo, "cannot write " + path.string());
}

void emit(const Common& c, const std::string& text, std::ostream& out) {
  if (c.out.empty()) {
    out << text;
  } else {
    write_text(c.out, text);
  }
}

std::string flag_name(std::string key) {
  for (auto& ch : key) {
    if (ch == '_') ch = '-';
  }
  return "--" + key;
}

void append_value(std::vector<std::string>& out, const std::string& flag, const json& v) {
  if (v.is_boolean()) {
    if (v.get<bool>()) out.push_back(flag);
  } else if (v.is_array()) {
    for (const auto& e : v) append_value(out, flag, e);
  } else if (v.is_string()) {
    out.push_back(flag);
    out.push_back(v.get<std::string>());
  } else if (v.is_number_integer()) {
    out.push_back(flag);
    out.push_back(v.dump());
  } else if (v.is_number()) {
    out.push_back(flag);
    out.push_back(format_real(v.get<double>()));
  } else if (!v.is_null()) {
    throw Error(ErrorCode::kInvalidArgument, "config key for " + flag + " must be a scalar or an array");
  }
}

std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::vector<std::string> expanded;
  std::vector<std::string> rest;
  for (std::size_t i = 0; i < args.size(); ++i) {
    std::string path;
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
      continue;
    }
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorCode::kFileNotFound, "config file not found: " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    const auto flags = config_to_flags(ss.str());
    expanded.insert(expanded.end(), flags.begin(), flags.end());
  }
  // Subcommand first, then config-derived flags, then the explicit ones, which win.
  std::vector<std::string> out;
  if (!rest.empty()) out.push_back(rest.front());
  out.insert(out.end(), expanded.begin(), expanded.end());
  if (rest.size() > 1) out.insert(out.end(), rest.begin() + 1, rest.end());
  return out;
}

// ---- commands ----------------------------------------------------------------------

struct MetricsFlags {
  std::string pattern;
  std::string candidate;
  std::string column;
  std::string metric = "nmi";
  std::string mode;
  int b = kDefaultBins;
  bool dump_raster = false;
};

int cmd_metrics(const MetricsFlags& m, const RedundancyFlags& r, const Common& c, std::ostream& out) {
  const PointSet x = to_pointset(load_pattern_csv(m.pattern, m.column));
  const PointSet y = to_pointset(load_pattern_csv(m.candidate, m.column));
  const MetricId metric = parse_metric(m.metric);
  const RedundancyConfig cfg = r.resolve(c.seed, RedundancyConfig{});
  DistanceOptions opts;
  opts.b = m.b;
  if (!m.mode.empty()) opts.mode = parse_mode(m.mode);
  json body = to_json(distance(x, y, metric, cfg, opts));
  if (m.dump_raster) {
    body["redundancy"] = to_json(cfg);
    body["raster_pattern"] = to_json(rasterize(apply_redundancy(x, cfg), m.b));
    body["raster_candidate"] = to_json(rasterize(apply_redundancy(y, cfg), m.b));
  }
  emit(c, body.dump() + "\n", out);
  return kExitOk;
}

int cmd_search(const SearchFlags& s, const RedundancyFlags& r, const Common& c, std::ostream& out) {
  const SearchRequest req = build_request(s, r, c.seed);
  const auto matches = search(req);
  json body{{"request", to_json(req)}, {"matches", json::array()}};
  body["request"]["data"] = s.data;
  body["request"]["seed"] = c.seed;
  for (const auto& m : matches) body["matches"].push_back(to_json(m));
  emit(c, body.dump(2) + "\n", out);
  if (!s.svg.empty()) write_text(s.svg, match_strip_svg(search_reference(req), matches));
  return kExitOk;
}

int cmd_mid(const SearchFlags& s, const RedundancyFlags& r, const Common& c, std::ostream& out) {
  const SearchRequest req = build_request(s, r, c.seed);
  const auto matches = search(req);
  const auto points = match_mid_points(req, matches);
  json body{{"request", to_json(req)}, {"points", json::array()}};
  for (const auto& p : points) body["points"].push_back(to_json(p));
  emit(c, body.dump(2) + "\n", out);
  if (!s.svg.empty()) write_text(s.svg, mid_scatter_svg(points));
  return kExitOk;
}

struct PerturbFlags {
  std::string data;
  std::string column;
  std::string which;
  double noise_scale = 0.1;
  double outlier_sd = 3.0;
};

int cmd_perturb(const PerturbFlags& p, const Common& c, std::ostream& out) {
  const TimeSeries raw = load_csv(p.data, p.column);
  const TimeSeries normalized(normalize_minmax(raw.values()),
                              std::vector<std::string>(raw.labels().begin(), raw.labels().end()));
  PerturbOptions opts;
  opts.noise_scale = p.noise_scale;
  opts.outlier_sd = p.outlier_sd;
  const TimeSeries result = perturb(normalized, parse_perturbation(p.which), c.seed, opts);
  std::ostringstream os;
  const bool labels = raw.has_labels() && result.size() == raw.size();
  os << (labels ? "date,value\n" : "index,value\n");
  for (std::size_t i = 0; i < result.size(); ++i) {
    os << (labels ? raw.labels()[i] : std::to_string(i)) << ',' << format_real(result[i]) << '\n';
  }
  emit(c, os.str(), out);
  return kExitOk;
}

struct EvalFlags {
  std::string data;
  std::string column;
  std::string truth;
  std::string figures;
  std::vector<std::string> metrics;
  int b = kDefaultBins;
  double noise_scale = 0.1;
  double outlier_sd = 3.0;
  std::string candidates = "perturbations";
  std::size_t smooth = 0;
};

int cmd_eval(const EvalFlags& e, const Common& c, std::ostream& out, std::ostream& err) {
  TimeSeries source = load_csv(e.data, e.column);
  if (e.smooth > 1) source = smooth_moving_average(source, e.smooth);
  SweepConfig cfg;
  cfg.seed = c.seed;
  cfg.b = e.b;
  cfg.perturb.noise_scale = e.noise_scale;
  cfg.perturb.outlier_sd = e.outlier_sd;
  if (!e.metrics.empty()) {
    cfg.metrics.clear();
    for (const auto& m : e.metrics) cfg.metrics.push_back(parse_metric(m));
  }
  CandidateGenerator gen;
  CandidateNamer namer = perturbation_name;
  if (e.candidates == "perturbations") {
    gen = perturbation_candidates(cfg.perturb);
  } else if (e.candidates == "outlierMagnitude") {
    gen = outlier_magnitude_family();
    namer = [](std::size_t k) { return "outlierMiddle_" + std::to_string(k + 1) + "sd"; };
  } else {
    throw Error(ErrorCode::kInvalidArgument, "--candidates must be perturbations or outlierMagnitude");
  }
  std::optional<GroundTruth> truth;
  const auto grid = build_grid(source, cfg.lengths, cfg.selections, cfg.seed);
  if (!e.truth.empty()) truth = load_ground_truth(e.truth, grid.size());
  const SweepResult result = run_sweep(grid, cfg, gen, truth ? &*truth : nullptr);
  emit(c, sweep_csv(result, namer), out);
  const RedundancyConfig baseline{RedundancyKind::kEquidistant, 0};
  const auto* man = result.find(MetricId::kManhattan, baseline);
  const auto* euc = result.find(MetricId::kEuclidean, baseline);
  if (man && euc) {
    err << "note: manhattan/euclidean mean rank correlation at N=0: " << format_real(rank_agreement(*man, *euc)) << '\n';
  }

  if (!e.figures.empty()) {
    const std::filesystem::path dir(e.figures);
    std::filesystem::create_directories(dir);
    if (!truth) {
      err << "note: --figures needs --truth for agreement plots; none written\n";
      return kExitOk;
    }
    for (auto stat : {Statistic::kR2, Statistic::kF1, Statistic::kSeqNmi}) {
      const std::string name(to_string(stat));
      write_text(dir / (name + ".csv"), trajectory_table_csv(result, stat));
      write_text(dir / (name + ".svg"), trajectory_svg(result, stat));
    }
    write_text(dir / "r2_by_perturbation.csv", per_candidate_r2_csv(result, *truth, namer));
  }
  return kExitOk;
}

struct ServeFlags {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string data_dir;
  std::size_t size_cap = 10'000'000;
  std::string cors_origin = "*";
};

int cmd_serve(const ServeFlags& s, std::ostream& err) {
  std::optional<std::filesystem::path> dir;
  if (!s.data_dir.empty()) dir = s.data_dir;
  service::SessionStore store(dir);
  service::Options opts;
  opts.size_cap = s.size_cap;
  opts.cors_origin = s.cors_origin;
  service::Api api(store, opts);
  err << "listening on http://" << s.host << ':' << s.port << '\n';
  return service::serve(api, s.host, s.port);
}

}  // namespace

std::vector<std::string> config_to_flags(const std::string& json_text) {
  const json j = json::parse(json_text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw Error(ErrorCode::kParse, "config must be a JSON object");
  std::vector<std::string> out;
  for (const auto& [key, value] : j.items()) {
    if (key == "redundancy" && value.is_object()) {
      for (const auto& [k, v] : value.items()) {
        append_value(out, k == "kind" ? "--redundancy" : flag_name(k), v);
      }
    } else {
      append_value(out, flag_name(key), value);
    }
  }
  return out;
}

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  try {
    const auto args = expand_config(raw_args);

    CLI::App app{"Pattern search in time-series line charts with redundant points", "patred"};
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    Common common;
    RedundancyFlags red;
    SearchFlags sflags;
    MetricsFlags mflags;
    PerturbFlags pflags;
    EvalFlags eflags;
    ServeFlags vflags;

    auto* metrics = app.add_subcommand("metrics", "Distance between two charts");
    add_common(metrics, common);
    add_redundancy(metrics, red);
    metrics->add_option("--pattern", mflags.pattern, "First chart CSV")->required();
    metrics->add_option("--candidate", mflags.candidate, "Second chart CSV")->required();
    metrics->add_option("--column", mflags.column, "Value column");
    metrics->add_option("--metric", mflags.metric, "Distance metric");
    metrics->add_option("--mode", mflags.mode, "sequence | raster");
    metrics->add_option("--b", mflags.b, "Grid side");
    metrics->add_flag("--dump-raster", mflags.dump_raster, "Include both raster images in the output");

    auto* search_cmd = app.add_subcommand("search", "Rank windows of a series against a pattern");
    add_common(search_cmd, common);
    add_redundancy(search_cmd, red);
    add_search(search_cmd, sflags);

    auto* mid = app.add_subcommand("mid", "Mutual information diagram coordinates of the top matches");
    add_common(mid, common);
    add_redundancy(mid, red);
    add_search(mid, sflags);

    auto* perturb_cmd = app.add_subcommand("perturb", "Apply one perturbation to a normalized series");
    add_common(perturb_cmd, common);
    perturb_cmd->add_option("--data", pflags.data, "Series CSV")->required();
    perturb_cmd->add_option("--column", pflags.column, "Value column");
    perturb_cmd->add_option("--which", pflags.which, "Perturbation name or index 0..8")->required();
    perturb_cmd->add_option("--noise-scale", pflags.noise_scale, "Uniform noise multiplier");
    perturb_cmd->add_option("--outlier-sd", pflags.outlier_sd, "Outlier height in standard deviations");

    auto* eval = app.add_subcommand("eval", "Sweep metrics and redundancy configs over the perturbation grid");
    add_common(eval, common);
    eval->add_option("--data", eflags.data, "Source series CSV")->required();
    eval->add_option("--column", eflags.column, "Value column");
    eval->add_option("--truth", eflags.truth, "Ground-truth CSV (dataset_id,perturbation_id,mean_rank)");
    eval->add_option("--figures", eflags.figures, "Directory for trajectory tables and SVG plots");
    eval->add_option("--metrics", eflags.metrics, "Restrict to these metrics")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    eval->add_option("--b", eflags.b, "Grid side");
    eval->add_option("--noise-scale", eflags.noise_scale, "Uniform noise multiplier");
    eval->add_option("--outlier-sd", eflags.outlier_sd, "Outlier height in standard deviations");
    eval->add_option("--candidates", eflags.candidates, "perturbations | outlierMagnitude");
    eval->add_option("--smooth", eflags.smooth, "Moving-average width applied to the source first (0 = off)");

    auto* serve = app.add_subcommand("serve", "HTTP API");
    add_common(serve, common);
    serve->add_option("--host", vflags.host, "Bind address");
    serve->add_option("--port", vflags.port, "Port");
    serve->add_option("--data-dir", vflags.data_dir, "Persist the session store here");
    serve->add_option("--size-cap", vflags.size_cap, "Maximum windows x grid cells per search");
    serve->add_option("--cors-origin", vflags.cors_origin, "Allowed CORS origin");

    try {
      std::vector<std::string> reversed(args.rbegin(), args.rend());
      app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
      out << app.help();
      return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
      out << app.help("", CLI::AppFormatMode::All);
      return kExitOk;
    } catch (const CLI::ParseError& e) {
      err << "error: " << e.what() << '\n';
      return kExitValidation;
    }

    if (metrics->parsed()) return cmd_metrics(mflags, red, common, out);
    if (search_cmd->parsed()) return cmd_search(sflags, red, common, out);
    if (mid->parsed()) return cmd_mid(sflags, red, common, out);
    if (perturb_cmd->parsed()) return cmd_perturb(pflags, common, out);
    if (eval->parsed()) return cmd_eval(eflags, common, out, err);
    if (serve->parsed()) return cmd_serve(vflags, err);
    return kExitValidation;
  } catch (const Error& e) {
    err << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
    return e.is_validation() ? kExitValidation : kExitRuntime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace patred::cli
