#include "patred/json_io.hpp"

#include "patred/error.hpp"

namespace patred {

namespace {

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorCode::kInvalidArgument, std::string("field '") + key + "' has the wrong type");
  }
}

}  // namespace

json to_json(const RedundancyConfig& cfg) {
  return json{{"kind", to_string(cfg.kind)}, {"n", cfg.n_points}, {"copies", cfg.copies}, {"shift", cfg.shift},
              {"eta", cfg.eta},              {"sd", cfg.sd},      {"seed", cfg.seed}};
}

RedundancyConfig redundancy_from_json(const json& j) {
  if (j.is_string()) {
    RedundancyConfig cfg;
    cfg.kind = parse_redundancy_kind(j.get<std::string>());
    return cfg;
  }
  if (!j.is_object()) throw Error(ErrorCode::kInvalidArgument, "redundancy must be a JSON object");
  RedundancyConfig cfg;
  cfg.kind = parse_redundancy_kind(get_or<std::string>(j, "kind", "none"));
  cfg.n_points = get_or<int>(j, "n", cfg.n_points);
  cfg.copies = get_or<int>(j, "copies", cfg.copies);
  cfg.shift = get_or<double>(j, "shift", cfg.shift);
  cfg.eta = get_or<double>(j, "eta", cfg.eta);
  cfg.sd = get_or<double>(j, "sd", cfg.sd);
  cfg.seed = get_or<std::uint64_t>(j, "seed", cfg.seed);
  cfg.validate();
  return cfg;
}

json to_json(const DistanceValue& d) {
  return json{{"value", d.value}, {"metric", to_string(d.metric)}, {"mode", to_string(d.mode)},
              {"degenerate", d.degenerate}};
}

json to_json(const MatchResult& m) {
  return json{{"start_index", m.start_index}, {"distance", m.distance}, {"rank", m.rank},
              {"window", m.window},           {"degenerate", m.degenerate}};
}

json to_json(const MidPoint& p) {
  return json{{"label", p.label}, {"radius", p.radius}, {"angle", p.angle}, {"x", p.x},
              {"y", p.y},         {"nmi", p.nmi},       {"vi", p.vi},       {"distance", p.distance}};
}

json to_json(const RasterImage& img) {
  json rows = json::array();
  for (int r = 0; r < img.b(); ++r) {
    json row = json::array();
    for (int c = 0; c < img.b(); ++c) row.push_back(img.at(r, c));
    rows.push_back(std::move(row));
  }
  return json{{"b", img.b()}, {"total", img.total()}, {"rows", std::move(rows)}};
}

json to_json(const Pattern& p) {
  json pts = json::array();
  for (const auto& pt : p.points()) pts.push_back(json::array({pt.x, pt.y}));
  return json{{"name", p.name()}, {"points", std::move(pts)}};
}

Pattern pattern_from_json(const json& j) {
  if (!j.is_object() || !j.contains("points") || !j.at("points").is_array()) {
    throw Error(ErrorCode::kInvalidArgument, "pattern needs a 'points' array");
  }
  std::vector<Point> pts;
  for (const auto& e : j.at("points")) {
    if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
      pts.push_back({e[0].get<double>(), e[1].get<double>()});
    } else if (e.is_object() && e.contains("x") && e.contains("y") && e["x"].is_number() && e["y"].is_number()) {
      pts.push_back({e["x"].get<double>(), e["y"].get<double>()});
    } else {
      throw Error(ErrorCode::kInvalidArgument, "pattern points must be [x, y] pairs or {x, y} objects");
    }
  }
  return Pattern(std::move(pts), get_or<std::string>(j, "name", ""));
}

json to_json(const SearchRequest& req) {
  json j{{"pattern", to_json(req.pattern)},
         {"series_length", req.series.size()},
         {"metric", to_string(req.metric)},
         {"mode", to_string(req.resolved_mode())},
         {"redundancy", to_json(req.redundancy)},
         {"b", req.grid_side()},
         {"bins_per_segment", req.bins_per_segment},
         {"window", req.window_length()},
         {"stride", req.stride},
         {"top_k", req.top_k},
         {"exclusion", req.exclusion_gap()},
         {"normalization", req.normalization == WindowNormalization::kZScore ? "zscore" : "minmax"}};
  return j;
}

}  // namespace patred
