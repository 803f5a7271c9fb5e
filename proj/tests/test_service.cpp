#include <gtest/gtest.h>

#include <httplib.h>

#include <random>
#include <thread>

#include "patred/service.hpp"
#include "schema_check.hpp"
#include "support.hpp"

using namespace patred;
using namespace patred::service;

namespace {

const json& openapi() {
  static const json doc = json::parse(testing_support::read_file(PATRED_SOURCE_DIR "/docs/openapi.json"));
  return doc;
}

void expect_conforms(const std::string& path, const std::string& method, const Response& r) {
  const json body = json::parse(r.body);
  const auto& schema = schema_check::response_schema(openapi(), path, method, r.status);
  EXPECT_EQ(schema_check::check(openapi(), schema, body), "") << r.body;
}

std::string planted_csv(std::size_t& start) {
  const auto p = testing_support::plant_wedge(3);
  start = p.start;
  return testing_support::series_csv(p.series);
}

json wedge_request() {
  json pts = json::array();
  for (std::size_t i = 0; i < testing_support::kFallingWedge.size(); ++i) {
    pts.push_back({static_cast<double>(i), testing_support::kFallingWedge[i]});
  }
  return json{{"name", "falling wedge"}, {"points", pts}};
}

struct Fixture {
  SessionStore store;
  Api api{store};
  std::string dataset;
  std::string pattern;
  std::size_t planted = 0;

  Fixture() {
    dataset = json::parse(api.post_dataset(planted_csv(planted)).body)["id"];
    pattern = json::parse(api.post_pattern(wedge_request().dump()).body)["id"];
  }

  Response search(json extra = json::object()) {
    json req{{"dataset_id", dataset}, {"pattern_id", pattern}, {"metric", "nmi"},
             {"redundancy", {{"kind", "equidistant"}, {"n", 100}}}, {"top_k", 9}, {"stride", 1}};
    for (auto& [k, v] : extra.items()) req[k] = v;
    return api.post_search(req.dump());
  }
};

}  // namespace

TEST(Datasets, UploadAndErrors) {
  SessionStore store;
  Api api(store);
  const auto ok = api.post_dataset("date,value\n2020-01-01,1\n2020-01-02,3\n2020-01-03,2\n");
  EXPECT_EQ(ok.status, 201);
  expect_conforms("/datasets", "post", ok);
  const auto body = json::parse(ok.body);
  EXPECT_EQ(body["length"], 3);
  EXPECT_EQ(body["preview"], json::array({1.0, 3.0, 2.0}));

  const auto again = api.post_dataset("date,value\n2020-01-01,1\n2020-01-02,3\n2020-01-03,2\n");
  EXPECT_EQ(again.status, 201);
  EXPECT_NE(json::parse(again.body)["id"], body["id"]);

  const auto empty = api.post_dataset("");
  EXPECT_EQ(empty.status, 400);
  expect_conforms("/datasets", "post", empty);
  const auto bad = api.post_dataset("date,value\na,1\nb,x\n");
  EXPECT_EQ(bad.status, 400);
  EXPECT_NE(bad.body.find("line 3"), std::string::npos);
  EXPECT_EQ(api.post_dataset("a,b\n1,2\n3,4\n", "missing").status, 400);
}

TEST(Patterns, SevenPointWedgeAndErrors) {
  SessionStore store;
  Api api(store);
  const auto req = wedge_request();
  EXPECT_EQ(schema_check::check(openapi(), schema_check::request_schema(openapi(), "/patterns", "post"), req), "");
  const auto ok = api.post_pattern(req.dump());
  EXPECT_EQ(ok.status, 201);
  expect_conforms("/patterns", "post", ok);
  const auto body = json::parse(ok.body);
  EXPECT_EQ(body["points"].size(), 7u);
  EXPECT_FALSE(body["reordered"].get<bool>());

  const auto one = api.post_pattern(R"({"points": [[0, 1]]})");
  EXPECT_EQ(one.status, 400);
  expect_conforms("/patterns", "post", one);

  const auto unsorted = api.post_pattern(R"({"points": [[2, 0], [0, 1], {"x": 1, "y": 0.5}]})");
  EXPECT_EQ(unsorted.status, 201);
  const auto ub = json::parse(unsorted.body);
  EXPECT_TRUE(ub["reordered"].get<bool>());
  EXPECT_EQ(ub["points"][0], json::array({0.0, 1.0}));
  EXPECT_EQ(ub["points"][2], json::array({1.0, 0.0}));

  EXPECT_EQ(api.post_pattern(R"({"points": [[0, 1], [0, 2]]})").status, 400);
  EXPECT_EQ(api.post_pattern("not json").status, 400);
}

TEST(SearchEndpoint, ValidRequestReturnsSortedMatches) {
  Fixture f;
  const auto r = f.search();
  ASSERT_EQ(r.status, 200) << r.body;
  expect_conforms("/search", "post", r);
  const auto body = json::parse(r.body);
  const auto& m = body["matches"];
  ASSERT_GE(m.size(), 1u);
  EXPECT_LE(m.size(), 9u);
  for (std::size_t i = 1; i < m.size(); ++i) EXPECT_LE(m[i - 1]["distance"], m[i]["distance"]);
  const auto top = m[0]["start_index"].get<std::size_t>();
  EXPECT_LE(top > f.planted ? top - f.planted : f.planted - top, 1u);
}

TEST(SearchEndpoint, ReplaysAreByteIdentical) {
  Fixture f;
  const auto a = f.search();
  const auto b = f.search();
  EXPECT_EQ(a.status, 200);
  EXPECT_EQ(a.body, b.body);
  EXPECT_EQ(f.api.get_mid(json::parse(a.body)["result_id"]).body, f.api.get_mid(json::parse(b.body)["result_id"]).body);
}

TEST(SearchEndpoint, ErrorStatuses) {
  Fixture f;
  const auto cap = f.search({{"metric", "pearson"}, {"redundancy", {{"kind", "areaLine"}, {"n", 10}}}});
  EXPECT_EQ(cap.status, 422);
  expect_conforms("/search", "post", cap);
  EXPECT_NE(cap.body.find("same number of points"), std::string::npos);

  const auto missing = f.search({{"dataset_id", "d999"}});
  EXPECT_EQ(missing.status, 404);
  expect_conforms("/search", "post", missing);
  EXPECT_EQ(f.search({{"pattern_id", "p999"}}).status, 404);

  const auto bad = f.search({{"metric", "hamming"}});
  EXPECT_EQ(bad.status, 400);
  expect_conforms("/search", "post", bad);
  EXPECT_EQ(f.search({{"top_k", 0}}).status, 400);
  EXPECT_EQ(f.search({{"stride", -1}}).status, 400);
}

TEST(SearchEndpoint, SizeCapReturns413) {
  SessionStore store;
  Options opts;
  opts.size_cap = 1000;
  Api api(store, opts);
  std::size_t planted = 0;
  const std::string d = json::parse(api.post_dataset(planted_csv(planted)).body)["id"];
  const std::string p = json::parse(api.post_pattern(wedge_request().dump()).body)["id"];
  const auto r = api.post_search(json{{"dataset_id", d}, {"pattern_id", p}}.dump());
  EXPECT_EQ(r.status, 413);
  expect_conforms("/search", "post", r);
}

TEST(MidEndpoint, ReferenceFirstThenMatches) {
  Fixture f;
  const auto s = json::parse(f.search({{"top_k", 5}}).body);
  const auto r = f.api.get_mid(s["result_id"]);
  ASSERT_EQ(r.status, 200);
  expect_conforms("/results/{id}/mid", "get", r);
  const auto pts = json::parse(r.body)["points"];
  EXPECT_EQ(pts.size(), s["matches"].size() + 1);
  EXPECT_EQ(pts[0]["label"], "P_o");
  EXPECT_EQ(pts[0]["angle"], 0.0);

  const auto missing = f.api.get_mid("r0000");
  EXPECT_EQ(missing.status, 404);
  expect_conforms("/results/{id}/mid", "get", missing);
}

TEST(MidEndpoint, SelfMatchCoincidesWithReference) {
  SessionStore store;
  Api api(store);
  // The series is the pattern itself, so the only window is an exact match.
  const std::string d = json::parse(api.post_dataset(testing_support::series_csv(testing_support::kFallingWedge)).body)["id"];
  const std::string p = json::parse(api.post_pattern(wedge_request().dump()).body)["id"];
  const auto s = json::parse(api.post_search(json{{"dataset_id", d}, {"pattern_id", p}}.dump()).body);
  const auto pts = json::parse(api.get_mid(s["result_id"]).body)["points"];
  ASSERT_EQ(pts.size(), 2u);
  EXPECT_EQ(pts[1]["distance"], 0.0);
  EXPECT_EQ(pts[1]["x"], pts[0]["x"]);
  EXPECT_EQ(pts[1]["y"], 0.0);
}

TEST(Store, SnapshotPersistsAcrossRestarts) {
  const auto dir = testing_support::temp_dir("store");
  std::string d;
  std::string p;
  std::string result;
  {
    SessionStore store(dir);
    Api api(store);
    d = json::parse(api.post_dataset("v\n1\n2\n3\n4\n5\n6\n7\n8\n").body)["id"];
    p = json::parse(api.post_pattern(wedge_request().dump()).body)["id"];
    result = json::parse(api.post_search(json{{"dataset_id", d}, {"pattern_id", p}}.dump()).body)["result_id"];
  }
  SessionStore reloaded(dir);
  EXPECT_EQ(reloaded.dataset_count(), 1u);
  EXPECT_EQ(reloaded.pattern_count(), 1u);
  EXPECT_EQ(reloaded.result_count(), 1u);
  Api api(reloaded);
  EXPECT_EQ(api.get_mid(result).status, 200);
  const std::string d2 = json::parse(api.post_dataset("v\n1\n2\n").body)["id"];
  EXPECT_NE(d2, d);
}

TEST(Store, ConcurrentUploadsGetDistinctIds) {
  SessionStore store;
  std::vector<std::thread> threads;
  std::vector<std::string> ids(64);
  for (std::size_t t = 0; t < 8; ++t) {
    threads.emplace_back([&, t] {
      for (std::size_t i = 0; i < 8; ++i) ids[t * 8 + i] = store.add_dataset(TimeSeries({1.0, 2.0}));
    });
  }
  for (auto& th : threads) th.join();
  std::sort(ids.begin(), ids.end());
  EXPECT_EQ(std::unique(ids.begin(), ids.end()), ids.end());
  EXPECT_EQ(store.dataset_count(), 64u);
}

TEST(Http, RoundTripWithCors) {
  SessionStore store;
  Api api(store);
  httplib::Server server;
  api.mount(server);
  const int port = server.bind_to_any_port("127.0.0.1");
  ASSERT_GT(port, 0);
  std::thread th([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  httplib::Client cli("127.0.0.1", port);
  std::size_t planted = 0;
  auto r = cli.Post("/datasets", planted_csv(planted), "text/csv");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 201);
  EXPECT_EQ(r->get_header_value("Access-Control-Allow-Origin"), "*");
  const std::string d = json::parse(r->body)["id"];
  r = cli.Post("/patterns", wedge_request().dump(), "application/json");
  ASSERT_TRUE(r);
  const std::string p = json::parse(r->body)["id"];

  r = cli.Post("/search", json{{"dataset_id", d}, {"pattern_id", p}, {"metric", "pearson"}, {"redundancy", "areaLine"}}.dump(),
               "application/json");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 422);

  r = cli.Post("/search", json{{"dataset_id", d}, {"pattern_id", p}, {"top_k", 3}}.dump(), "application/json");
  ASSERT_TRUE(r);
  ASSERT_EQ(r->status, 200);
  const std::string id = json::parse(r->body)["result_id"];
  r = cli.Get("/results/" + id + "/mid");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 200);
  EXPECT_EQ(json::parse(r->body)["points"].size(), 4u);

  r = cli.Options("/search");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 204);
  EXPECT_FALSE(r->get_header_value("Access-Control-Allow-Methods").empty());

  server.stop();
  th.join();
}
