// Copyright 2026 The qwb Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qwb/api.hpp"

#include <gtest/gtest.h>

#include <filesystem>

#include <httplib.h>

#include "support.hpp"

using namespace qwb;
using nlohmann::json;

namespace {

struct Client {
    ApiService &service;
    ApiResponse get(const std::string &path, std::map<std::string, std::string> query = {}) {
        return service.handle("GET", path, query, "");
    }
    ApiResponse post(const std::string &path, const json &body) { return service.handle("POST", path, {}, body.dump()); }
    ApiResponse post_raw(const std::string &path, const std::string &body) { return service.handle("POST", path, {}, body); }
};

ServiceOptions sync_options(const std::string &dir) {
    ServiceOptions o;
    o.storage_dir = dir;
    o.workers = 2;
    o.synchronous = true;
    return o;
}

std::string storage_dir() {
    const auto dir = std::filesystem::temp_directory_path() / "qwb_api_test";
    std::filesystem::create_directories(dir);
    return dir.string();
}

void load_catalog(Client &c) {
    ASSERT_EQ(c.post_raw("/api/taxonomies", qwb_test::read_fixture("clothing.json")).status, 201);
    ASSERT_EQ(c.post_raw("/api/taxonomies", qwb_test::read_fixture("color.json")).status, 201);
    const auto r = c.post_raw("/api/entities", qwb_test::read_fixture("costumes.json"));
    ASSERT_EQ(r.status, 200);
    ASSERT_EQ(r.body["accepted"], 6);
}

json plan_json() { return json::parse(qwb_test::read_fixture("plan.json")); }

}  // namespace

TEST(api, status_mapping) {
    EXPECT_EQ(http_status(ErrorCode::NotFound), 404);
    EXPECT_EQ(http_status(ErrorCode::VersionMismatch), 409);
    EXPECT_EQ(http_status(ErrorCode::InvalidArgument), 400);
    EXPECT_EQ(http_status(ErrorCode::Precondition), 400);
    const auto body = error_body(Error(ErrorCode::NotFound, "unknown session 's9'", "s9"));
    EXPECT_EQ(body["code"], "not_found");
    EXPECT_EQ(body["context"], "s9");
    EXPECT_TRUE(body["message"].is_string());
}

TEST(api, catalog_routes) {
    ApiService service(sync_options(storage_dir()));
    Client c{service};
    EXPECT_EQ(c.get("/api/health").body, json({{"status", "ok"}}));
    load_catalog(c);
    const auto list = c.get("/api/taxonomies");
    EXPECT_EQ(list.body.size(), 2u);
    EXPECT_EQ(c.get("/api/taxonomies/color").body["name"], "color");
    EXPECT_EQ(c.get("/api/taxonomies/material").status, 404);
    EXPECT_EQ(c.post_raw("/api/taxonomies", qwb_test::read_fixture("color.json")).status, 400);
    EXPECT_EQ(c.post_raw("/api/taxonomies", "{\"name\": ").status, 400);
    const auto partial = c.post("/api/entities", {{"entities", json::array({{{"id", "x"}, {"attributes", {{"shade", {"red"}}}}}})},
                                                  {"bindings", {{"shade", "color"}}}});
    EXPECT_EQ(partial.body["accepted"], 1);
    const auto rejected = c.post("/api/entities", json::array({{{"id", "y"}, {"attributes", {{"color", {"mauve"}}}}}}));
    EXPECT_EQ(rejected.status, 200);
    EXPECT_EQ(rejected.body["rejected"].size(), 1u);
    EXPECT_EQ(c.get("/api/nothing").status, 404);
    EXPECT_EQ(service.handle("PUT", "/api/health", {}, "").status, 404);
}

TEST(api, session_workflow) {
    ApiService service(sync_options(storage_dir()));
    Client c{service};
    load_catalog(c);
    const auto created = c.post("/api/sessions", {{"name", "demo"}});
    ASSERT_EQ(created.status, 201);
    const std::string sid = created.body["id"];
    EXPECT_EQ(c.get("/api/sessions").body, json::array({sid}));

    const auto prep = c.post("/api/sessions/" + sid + "/steps", {{"kind", "prepare"}, {"params", {{"plan", plan_json()}}}});
    ASSERT_EQ(prep.status, 200) << prep.body.dump();
    EXPECT_EQ(prep.body["status"], "done");
    const std::string m = prep.body["artifact"];
    const auto job = c.get("/api/jobs/" + prep.body["id"].get<std::string>());
    EXPECT_EQ(job.body["artifact"], m);

    const auto art = c.get("/api/sessions/" + sid + "/artifacts/" + m);
    EXPECT_EQ(art.status, 200);
    EXPECT_EQ(art.body["kind"], "distanceMatrix");
    EXPECT_EQ(art.body["payload"]["distance"].size(), 6u);

    const auto emb = c.post("/api/sessions/" + sid + "/steps",
                            {{"kind", "embed"}, {"params", {{"input", m}, {"method", "mds"}}}});
    const std::string e = emb.body["artifact"];
    const auto bad = c.post("/api/sessions/" + sid + "/steps",
                            {{"kind", "cluster"}, {"params", {{"input", e}, {"method", "qaoa"}}}});
    EXPECT_EQ(bad.status, 400);
    EXPECT_EQ(bad.body["code"], "precondition");

    const auto cl = c.post("/api/sessions/" + sid + "/steps",
                           {{"kind", "cluster"}, {"params", {{"input", m}, {"method", "bruteforce"}}}});
    const std::string l = cl.body["artifact"];
    const auto replay = c.post("/api/sessions/" + sid + "/artifacts/" + l + "/replay", json::object());
    EXPECT_EQ(replay.body["identical"], true);

    const auto table = c.get("/api/sessions/" + sid + "/entity-table", {{"artifact", l}});
    EXPECT_EQ(table.status, 200);
    EXPECT_EQ(table.body["rows"].size(), 6u);
    EXPECT_EQ(c.get("/api/sessions/" + sid + "/entity-table").status, 400);

    const auto report = c.post("/api/sessions/" + sid + "/report", {{"artifacts", {l}}});
    EXPECT_NE(report.body["markdown"].get<std::string>().find("# Pattern candidate"), std::string::npos);
    EXPECT_EQ(c.post("/api/sessions/" + sid + "/report", {{"artifacts", json::array()}}).status, 400);

    ASSERT_EQ(c.post("/api/sessions/" + sid + "/save", {{"name", "api_demo"}}).status, 200);
    EXPECT_EQ(service.handle("DELETE", "/api/sessions/" + sid + "/artifacts/" + l, {}, "").status, 200);
    EXPECT_EQ(c.get("/api/sessions/" + sid + "/artifacts/" + l).status, 404);
    EXPECT_EQ(service.handle("DELETE", "/api/sessions/" + sid + "/artifacts/" + m, {}, "").status, 400);
    const auto loaded = c.post("/api/sessions/" + sid + "/load", {{"name", "api_demo"}});
    EXPECT_EQ(loaded.status, 200);
    EXPECT_EQ(c.get("/api/sessions/" + sid + "/artifacts/" + l).status, 200);

    EXPECT_EQ(c.post("/api/sessions/" + sid + "/save", {{"name", "../escape"}}).status, 400);
    EXPECT_EQ(c.post("/api/sessions/" + sid + "/load", {{"name", "missing_file"}}).status, 404);
    EXPECT_EQ(c.get("/api/sessions/s999").status, 404);
    EXPECT_EQ(c.get("/api/jobs/none").status, 404);
}

TEST(api, version_conflict_is_409) {
    const auto dir = storage_dir();
    ApiService service(sync_options(dir));
    Client c{service};
    const std::string sid = c.post("/api/sessions", json::object()).body["id"];
    c.post("/api/sessions/" + sid + "/save", {{"name", "future"}});
    const auto path = std::filesystem::path(dir) / "future.json";
    auto doc = json::parse(std::ifstream(path));
    doc["version"] = 7;
    std::ofstream(path) << doc.dump();
    const auto r = c.post("/api/sessions/" + sid + "/load", {{"name", "future"}});
    EXPECT_EQ(r.status, 409);
    EXPECT_EQ(r.body["code"], "version_mismatch");
}

TEST(api, asynchronous_steps) {
    ServiceOptions options;
    options.storage_dir = storage_dir();
    options.workers = 2;
    ApiService service(options);
    Client c{service};
    load_catalog(c);
    const std::string sid = c.post("/api/sessions", json::object()).body["id"];
    const auto accepted = c.post("/api/sessions/" + sid + "/steps", {{"kind", "prepare"}, {"params", {{"plan", plan_json()}}}});
    ASSERT_EQ(accepted.status, 202);
    const std::string job = accepted.body["jobId"];
    const auto done = service.jobs().wait(job);
    EXPECT_EQ(done.status, JobStatus::Done);
    EXPECT_EQ(c.get("/api/jobs/" + job).body["status"], "done");
}

TEST(api, http_transport) {
    ApiService service(sync_options(storage_dir()));
    HttpServer server(service);
    const int port = server.start("127.0.0.1", 0);
    ASSERT_GT(port, 0);
    httplib::Client client("127.0.0.1", port);
    auto health = client.Get("/api/health");
    ASSERT_TRUE(health);
    EXPECT_EQ(health->status, 200);
    EXPECT_EQ(json::parse(health->body)["status"], "ok");
    auto created = client.Post("/api/sessions", R"({"name":"web"})", "application/json");
    ASSERT_TRUE(created);
    EXPECT_EQ(created->status, 201);
    const std::string sid = json::parse(created->body)["id"];
    auto missing = client.Get("/api/sessions/" + sid + "/entity-table?artifact=a5");
    ASSERT_TRUE(missing);
    EXPECT_EQ(missing->status, 404);
    EXPECT_EQ(json::parse(missing->body)["context"], "a5");
    auto del = client.Delete("/api/sessions/" + sid + "/artifacts/a1");
    ASSERT_TRUE(del);
    EXPECT_EQ(del->status, 404);
    server.stop();
}
