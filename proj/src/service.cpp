#include "patred/service.hpp"

#include <httplib.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>

#include "patred/error.hpp"

namespace patred::service {

namespace {

constexpr const char* kSnapshotName = "store.json";

json error_body(ErrorCode code, const std::string& message) {
  return json{{"error", {{"code", to_string(code)}, {"message", message}}}};
}

Response reply(int status, const json& body) { return {status, body.dump()}; }

Response fail(const Error& e) { return reply(http_status(e.code()), error_body(e.code(), e.what())); }

json parse_body(std::string_view body) {
  if (body.empty()) throw Error(ErrorCode::kInvalidArgument, "request body is empty");
  json j = json::parse(body.begin(), body.end(), nullptr, false);
  if (j.is_discarded()) throw Error(ErrorCode::kParse, "request body is not valid JSON");
  if (!j.is_object()) throw Error(ErrorCode::kInvalidArgument, "request body must be a JSON object");
  return j;
}

template <typename T>
std::optional<T> field(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorCode::kInvalidArgument, std::string("field '") + key + "' has the wrong type");
  }
}

std::size_t count_field(const json& j, const char* key, std::size_t fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  const auto& v = j.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw Error(ErrorCode::kInvalidArgument, std::string("field '") + key + "' must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

// 64-bit FNV-1a, rendered as 16 hex digits.
std::string digest(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::uint64_t id_number(const std::string& id) {
  try {
    return id.size() > 1 ? std::stoull(id.substr(1)) : 0;
  } catch (const std::exception&) {
    return 0;
  }
}

json series_json(const TimeSeries& s) {
  json j{{"values", std::vector<double>(s.values().begin(), s.values().end())}};
  if (s.has_labels()) j["labels"] = std::vector<std::string>(s.labels().begin(), s.labels().end());
  return j;
}

TimeSeries series_from(const json& j) {
  return TimeSeries(j.at("values").get<std::vector<double>>(),
                    j.value("labels", std::vector<std::string>{}));
}

MatchResult match_from(const json& j) {
  MatchResult m;
  m.start_index = j.at("start_index").get<std::size_t>();
  m.distance = j.at("distance").get<double>();
  m.rank = j.at("rank").get<std::size_t>();
  m.window = j.at("window").get<std::vector<double>>();
  m.degenerate = j.at("degenerate").get<bool>();
  return m;
}

MidPoint mid_from(const json& j) {
  MidPoint p;
  p.label = j.at("label").get<std::string>();
  p.radius = j.at("radius").get<double>();
  p.angle = j.at("angle").get<double>();
  p.x = j.at("x").get<double>();
  p.y = j.at("y").get<double>();
  p.nmi = j.at("nmi").get<double>();
  p.vi = j.at("vi").get<double>();
  p.distance = j.at("distance").get<double>();
  return p;
}

json array_of(const auto& items) {
  json a = json::array();
  for (const auto& i : items) a.push_back(to_json(i));
  return a;
}

}  // namespace

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNotFound: return 404;
    case ErrorCode::kCapability: return 422;
    case ErrorCode::kTooLarge: return 413;
    case ErrorCode::kIo:
    case ErrorCode::kDegenerate: return 500;
    default: return 400;
  }
}

// ---- store -----------------------------------------------------------------------

SessionStore::SessionStore(std::optional<std::filesystem::path> data_dir) : data_dir_(std::move(data_dir)) {
  if (data_dir_) load();
}

void SessionStore::load() {
  std::error_code ec;
  std::filesystem::create_directories(*data_dir_, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create data dir " + data_dir_->string() + ": " + ec.message());
  const auto path = *data_dir_ / kSnapshotName;
  if (!std::filesystem::exists(path)) return;
  std::ifstream in(path);
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw Error(ErrorCode::kIo, "corrupt snapshot " + path.string());
  try {
    for (const auto& [id, v] : j.at("datasets").items()) datasets_.emplace(id, series_from(v));
    for (const auto& [id, v] : j.at("patterns").items()) patterns_.emplace(id, pattern_from_json(v));
    for (const auto& [id, v] : j.at("results").items()) {
      StoredResult r;
      r.dataset_id = v.at("dataset_id").get<std::string>();
      r.pattern_id = v.at("pattern_id").get<std::string>();
      r.request = v.at("request");
      for (const auto& m : v.at("matches")) r.matches.push_back(match_from(m));
      for (const auto& p : v.at("mid")) r.mid.push_back(mid_from(p));
      results_.emplace(id, std::move(r));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kIo, "corrupt snapshot " + path.string() + ": " + e.what());
  }
  std::uint64_t d = 0;
  std::uint64_t p = 0;
  for (const auto& [id, _] : datasets_) d = std::max(d, id_number(id));
  for (const auto& [id, _] : patterns_) p = std::max(p, id_number(id));
  next_dataset_ = d + 1;
  next_pattern_ = p + 1;
}

void SessionStore::persist_locked() const {
  if (!data_dir_) return;
  json j;
  j["datasets"] = json::object();
  for (const auto& [id, s] : datasets_) j["datasets"][id] = series_json(s);
  j["patterns"] = json::object();
  for (const auto& [id, p] : patterns_) j["patterns"][id] = to_json(p);
  j["results"] = json::object();
  for (const auto& [id, r] : results_) {
    j["results"][id] = json{{"dataset_id", r.dataset_id}, {"pattern_id", r.pattern_id}, {"request", r.request},
                            {"matches", array_of(r.matches)},  {"mid", array_of(r.mid)}};
  }
  const auto path = *data_dir_ / kSnapshotName;
  const auto tmp = *data_dir_ / (std::string(kSnapshotName) + ".tmp");
  {
    std::ofstream out(tmp, std::ios::trunc);
    out << j.dump();
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot replace " + path.string() + ": " + ec.message());
}

std::string SessionStore::add_dataset(TimeSeries series) {
  const std::string id = "d" + std::to_string(next_dataset_++);
  std::unique_lock lock(mutex_);
  datasets_.emplace(id, std::move(series));
  persist_locked();
  return id;
}

std::string SessionStore::add_pattern(Pattern pattern) {
  const std::string id = "p" + std::to_string(next_pattern_++);
  std::unique_lock lock(mutex_);
  patterns_.emplace(id, std::move(pattern));
  persist_locked();
  return id;
}

void SessionStore::put_result(const std::string& id, StoredResult result) {
  std::unique_lock lock(mutex_);
  results_.insert_or_assign(id, std::move(result));
  persist_locked();
}

std::optional<TimeSeries> SessionStore::dataset(const std::string& id) const {
  std::shared_lock lock(mutex_);
  if (auto it = datasets_.find(id); it != datasets_.end()) return it->second;
  return std::nullopt;
}

std::optional<Pattern> SessionStore::pattern(const std::string& id) const {
  std::shared_lock lock(mutex_);
  if (auto it = patterns_.find(id); it != patterns_.end()) return it->second;
  return std::nullopt;
}

std::optional<StoredResult> SessionStore::result(const std::string& id) const {
  std::shared_lock lock(mutex_);
  if (auto it = results_.find(id); it != results_.end()) return it->second;
  return std::nullopt;
}

std::size_t SessionStore::dataset_count() const {
  std::shared_lock lock(mutex_);
  return datasets_.size();
}

std::size_t SessionStore::pattern_count() const {
  std::shared_lock lock(mutex_);
  return patterns_.size();
}

std::size_t SessionStore::result_count() const {
  std::shared_lock lock(mutex_);
  return results_.size();
}

// ---- endpoints -------------------------------------------------------------------

Api::Api(SessionStore& store, Options opts) : store_(store), opts_(std::move(opts)) {}

Response Api::post_dataset(std::string_view csv_body, std::string_view column) {
  try {
    if (csv_body.find_first_not_of(" \t\r\n") == std::string_view::npos) {
      throw Error(ErrorCode::kInvalidArgument, "request body is empty; expected CSV with a header row");
    }
    auto series = series_from_csv(parse_csv(csv_body), column);
    const std::size_t length = series.size();
    const auto values = series.values();
    std::vector<double> preview(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(std::min(opts_.preview, length)));
    const std::string id = store_.add_dataset(std::move(series));
    return reply(201, json{{"id", id}, {"length", length}, {"preview", preview}});
  } catch (const Error& e) {
    return fail(e);
  }
}

Response Api::post_pattern(std::string_view json_body) {
  try {
    const json j = parse_body(json_body);
    if (!j.contains("points") || !j.at("points").is_array()) {
      throw Error(ErrorCode::kInvalidArgument, "pattern needs a 'points' array");
    }
    if (j.at("points").size() < 2) throw Error(ErrorCode::kTooShort, "pattern needs at least 2 points");
    json sorted = j;
    auto& pts = sorted["points"];
    auto x_of = [](const json& p) {
      if (p.is_array() && p.size() == 2 && p[0].is_number()) return p[0].get<double>();
      if (p.is_object() && p.contains("x") && p["x"].is_number()) return p["x"].get<double>();
      throw Error(ErrorCode::kInvalidArgument, "pattern points must be [x, y] pairs or {x, y} objects");
    };
    bool reordered = false;
    for (std::size_t i = 1; i < pts.size(); ++i) reordered = reordered || x_of(pts[i]) < x_of(pts[i - 1]);
    if (reordered) {
      std::vector<json> v(pts.begin(), pts.end());
      std::stable_sort(v.begin(), v.end(), [&](const json& a, const json& b) { return x_of(a) < x_of(b); });
      pts = v;
    }
    const Pattern normalized = pattern_from_json(sorted).normalized();
    json body = to_json(normalized);
    const std::string id = store_.add_pattern(normalized);
    body["id"] = id;
    body["reordered"] = reordered;
    return reply(201, body);
  } catch (const Error& e) {
    return fail(e);
  }
}

Response Api::post_search(std::string_view json_body) {
  try {
    const json j = parse_body(json_body);
    const auto dataset_id = field<std::string>(j, "dataset_id");
    const auto pattern_id = field<std::string>(j, "pattern_id");
    if (!dataset_id) throw Error(ErrorCode::kInvalidArgument, "missing 'dataset_id'");
    if (!pattern_id) throw Error(ErrorCode::kInvalidArgument, "missing 'pattern_id'");
    auto series = store_.dataset(*dataset_id);
    if (!series) throw Error(ErrorCode::kNotFound, "unknown dataset id '" + *dataset_id + "'");
    auto pattern = store_.pattern(*pattern_id);
    if (!pattern) throw Error(ErrorCode::kNotFound, "unknown pattern id '" + *pattern_id + "'");

    SearchRequest req{*pattern, *series};
    if (auto m = field<std::string>(j, "metric")) req.metric = parse_metric(*m);
    if (auto m = field<std::string>(j, "mode")) req.mode = parse_mode(*m);
    if (j.contains("redundancy") && !j.at("redundancy").is_null()) req.redundancy = redundancy_from_json(j.at("redundancy"));
    if (auto b = field<int>(j, "b")) req.b = *b;
    if (auto bps = field<bool>(j, "bins_per_segment")) req.bins_per_segment = *bps;
    if (j.contains("window") && !j.at("window").is_null()) req.window = count_field(j, "window", 0);
    req.stride = count_field(j, "stride", req.stride);
    req.top_k = count_field(j, "top_k", req.top_k);
    if (j.contains("exclusion") && !j.at("exclusion").is_null()) req.exclusion = count_field(j, "exclusion", 0);
    if (auto n = field<std::string>(j, "normalization")) {
      if (*n == "zscore") {
        req.normalization = WindowNormalization::kZScore;
      } else if (*n != "minmax") {
        throw Error(ErrorCode::kInvalidArgument, "normalization must be 'minmax' or 'zscore'");
      }
    }
    req.validate();
    const std::size_t cost = search_cost(req);
    if (cost > opts_.size_cap) {
      throw Error(ErrorCode::kTooLarge, "search would score " + std::to_string(cost) +
                                            " window cells, above the cap of " + std::to_string(opts_.size_cap));
    }

    json echo = to_json(req);
    echo["dataset_id"] = *dataset_id;
    echo["pattern_id"] = *pattern_id;
    const std::string result_id = "r" + digest(echo.dump());

    StoredResult stored;
    stored.dataset_id = *dataset_id;
    stored.pattern_id = *pattern_id;
    stored.request = echo;
    stored.matches = search(req);
    stored.mid = match_mid_points(req, stored.matches);

    json body{{"result_id", result_id}, {"request", echo}, {"matches", array_of(stored.matches)}};
    store_.put_result(result_id, std::move(stored));
    return reply(200, body);
  } catch (const Error& e) {
    return fail(e);
  }
}

Response Api::get_mid(const std::string& result_id) {
  const auto r = store_.result(result_id);
  if (!r) return fail(Error(ErrorCode::kNotFound, "unknown result id '" + result_id + "'"));
  return reply(200, json{{"result_id", result_id}, {"points", array_of(r->mid)}});
}

void Api::mount(httplib::Server& server) {
  const std::string origin = opts_.cors_origin;
  server.set_default_headers({{"Access-Control-Allow-Origin", origin},
                              {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                              {"Access-Control-Allow-Headers", "Content-Type"}});
  auto send = [](httplib::Response& res, const Response& r) {
    res.status = r.status;
    res.set_content(r.body, "application/json");
  };
  server.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
  server.Post("/datasets", [this, send](const httplib::Request& req, httplib::Response& res) {
    send(res, post_dataset(req.body, req.get_param_value("column")));
  });
  server.Post("/patterns", [this, send](const httplib::Request& req, httplib::Response& res) {
    send(res, post_pattern(req.body));
  });
  server.Post("/search", [this, send](const httplib::Request& req, httplib::Response& res) {
    send(res, post_search(req.body));
  });
  server.Get(R"(/results/([^/]+)/mid)", [this, send](const httplib::Request& req, httplib::Response& res) {
    send(res, get_mid(req.matches[1]));
  });
  server.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    std::string msg = "internal error";
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      msg = e.what();
    } catch (...) {
    }
    res.status = 500;
    res.set_content(error_body(ErrorCode::kIo, msg).dump(), "application/json");
  });
}

int serve(Api& api, const std::string& host, int port) {
  httplib::Server server;
  api.mount(server);
  if (!server.listen(host, port)) throw Error(ErrorCode::kIo, "cannot listen on " + host + ":" + std::to_string(port));
  return 0;
}

}  // namespace patred::service
