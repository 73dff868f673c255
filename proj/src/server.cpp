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

// Eigen must precede httplib: <resolv.h> defines a `_res` macro.
#include "qwb/api.hpp"
#include "qwb/error.hpp"

#include <httplib.h>

namespace qwb {

struct HttpServer::Impl {
    explicit Impl(ApiService &s) : service(s) {
        const auto dispatch = [this](const httplib::Request &req, httplib::Response &res) {
            std::map<std::string, std::string> query;
            for (const auto &[k, v] : req.params) query.emplace(k, v);
            const auto out = service.handle(req.method, req.path, query, req.body);
            res.status = out.status;
            res.set_content(out.body.dump(), "application/json");
        };
        const char *pattern = "/.*";
        server.Get(pattern, dispatch);
        server.Post(pattern, dispatch);
        server.Delete(pattern, dispatch);
    }

    ApiService &service;
    httplib::Server server;
};

HttpServer::HttpServer(ApiService &service) : impl_(std::make_unique<Impl>(service)) {}

HttpServer::~HttpServer() { stop(); }

int HttpServer::start(const std::string &host, int port) {
    int bound = port;
    if (port == 0) {
        bound = impl_->server.bind_to_any_port(host);
    } else if (!impl_->server.bind_to_port(host, port)) {
        bound = -1;
    }
    if (bound < 0) throw Error(ErrorCode::InvalidArgument, "cannot bind " + host + ":" + std::to_string(port));
    thread_ = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
    return bound;
}

bool HttpServer::listen(const std::string &host, int port) { return impl_->server.listen(host, port); }

void HttpServer::stop() {
    impl_->server.stop();
    if (thread_.joinable()) thread_.join();
}

}  // namespace qwb
