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

#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <thread>

#include <nlohmann/json.hpp>

#include "qwb/error.hpp"
#include "qwb/jobs.hpp"
#include "qwb/session.hpp"

namespace qwb {

struct ApiResponse {
    int status = 200;
    nlohmann::json body;
};

/// 404 for NotFound, 409 for VersionMismatch, 400 otherwise.
int http_status(ErrorCode code);
nlohmann::json error_body(const Error &error);

struct ServiceOptions {
    /// Directory for session files named through save/load.
    std::string storage_dir = ".";
    unsigned workers = 0;
    std::uint64_t default_seed = 0;
    /// Steps complete before POST .../steps returns.
    bool synchronous = false;
};

/// Transport-independent HTTP API. Routes:
///   GET  /api/health
///   GET  /api/taxonomies, GET /api/taxonomies/{name}, POST /api/taxonomies
///   POST /api/entities
///   GET  /api/sessions, POST /api/sessions, GET /api/sessions/{id}
///   POST /api/sessions/{id}/steps            -> 202 {jobId}
///   GET  /api/jobs/{id}
///   GET  /api/sessions/{id}/artifacts/{aid}, DELETE likewise
///   POST /api/sessions/{id}/artifacts/{aid}/replay
///   GET  /api/sessions/{id}/entity-table?artifact={aid}
///   POST /api/sessions/{id}/report           {artifacts: [...]}
///   POST /api/sessions/{id}/save, /load      {name}
class ApiService {
  public:
    explicit ApiService(ServiceOptions options = {});

    ApiResponse handle(std::string_view method, std::string_view path,
                       const std::map<std::string, std::string> &query, std::string_view body);

    JobManager &jobs() { return jobs_; }

  private:
    ApiResponse route(std::string_view method, const std::vector<std::string> &parts,
                      const std::map<std::string, std::string> &query, std::string_view body);
    std::shared_ptr<SessionSlot> slot(const std::string &id);
    std::string session_file(const nlohmann::json &body, const std::string &fallback) const;

    ServiceOptions options_;
    std::mutex catalog_mutex_;
    Catalog catalog_;
    std::mutex sessions_mutex_;
    std::map<std::string, std::shared_ptr<SessionSlot>> sessions_;
    std::uint64_t next_session_ = 1;
    JobManager jobs_;
};

/// cpp-httplib front end for an ApiService.
class HttpServer {
  public:
    explicit HttpServer(ApiService &service);
    ~HttpServer();

    /// Binds (port 0 picks a free port), serves on a background thread and
    /// returns the bound port. Throws InvalidArgument if binding fails.
    int start(const std::string &host, int port);
    /// Serves on the calling thread until stop().
    bool listen(const std::string &host, int port);
    void stop();

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    std::thread thread_;
};

}  // namespace qwb
