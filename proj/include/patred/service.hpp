#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "patred/error.hpp"
#include "patred/json_io.hpp"
#include "patred/search.hpp"

namespace httplib {
class Server;
}

namespace patred::service {

struct StoredResult {
  std::string dataset_id;
  std::string pattern_id;
  json request;  // echo of the resolved request
  std::vector<MatchResult> matches;
  std::vector<MidPoint> mid;
};

/// In-memory datasets, patterns and search results. Mutations take an exclusive
/// lock, reads a shared one; ids come from atomic counters. With a data dir,
/// every mutation rewrites a JSON snapshot that the constructor reloads.
class SessionStore {
 public:
  explicit SessionStore(std::optional<std::filesystem::path> data_dir = std::nullopt);

  std::string add_dataset(TimeSeries series);
  std::string add_pattern(Pattern pattern);
  /// Results are keyed by a digest of their request, so replays reuse the id.
  void put_result(const std::string& id, StoredResult result);

  std::optional<TimeSeries> dataset(const std::string& id) const;
  std::optional<Pattern> pattern(const std::string& id) const;
  std::optional<StoredResult> result(const std::string& id) const;

  std::size_t dataset_count() const;
  std::size_t pattern_count() const;
  std::size_t result_count() const;

 private:
  void load();
  void persist_locked() const;

  std::optional<std::filesystem::path> data_dir_;
  mutable std::shared_mutex mutex_;
  std::atomic<std::uint64_t> next_dataset_{1};
  std::atomic<std::uint64_t> next_pattern_{1};
  std::map<std::string, TimeSeries> datasets_;
  std::map<std::string, Pattern> patterns_;
  std::map<std::string, StoredResult> results_;
};

struct Options {
  std::size_t size_cap = 10'000'000;  // windows x grid cells per search
  std::string cors_origin = "*";
  std::size_t preview = 10;           // values echoed back on upload
};

struct Response {
  int status = 200;
  std::string body;  // JSON
};

/// Endpoint logic, independent of the HTTP server so it can be driven directly.
class Api {
 public:
  Api(SessionStore& store, Options opts = {});

  /// `column` picks the value column; empty means the last one.
  Response post_dataset(std::string_view csv_body, std::string_view column = {});
  Response post_pattern(std::string_view json_body);
  Response post_search(std::string_view json_body);
  Response get_mid(const std::string& result_id);

  /// Registers routes (and CORS handling) on `server`.
  void mount(httplib::Server& server);

  const Options& options() const { return opts_; }

 private:
  SessionStore& store_;
  Options opts_;
};

/// HTTP status for a library error code.
int http_status(ErrorCode code);

/// Blocks serving on host:port until the server is stopped.
int serve(Api& api, const std::string& host, int port);

}  // namespace patred::service
