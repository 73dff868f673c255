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

#include <filesystem>
#include <regex>

#include "qwb/error.hpp"

namespace qwb {

int http_status(ErrorCode code) {
    switch (code) {
        case ErrorCode::NotFound: return 404;
        case ErrorCode::VersionMismatch: return 409;
        default: return 400;
    }
}

nlohmann::json error_body(const Error &error) {
    return {{"code", error_code_name(error.code())}, {"message", error.what()}, {"context", error.context()}};
}

namespace {

std::vector<std::string> split_path(std::string_view path) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (start <= path.size()) {
        const auto end = path.find('/', start);
        const auto piece = path.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
        if (!piece.empty()) parts.emplace_back(piece);
        if (end == std::string_view::npos) break;
        start = end + 1;
    }
    return parts;
}

nlohmann::json body_json(std::string_view body) {
    if (body.find_first_not_of(" \t\r\n") == std::string_view::npos) return nlohmann::json::object();
    return parse_json_document(body);
}

[[noreturn]] void no_route(std::string_view method, const std::vector<std::string> &parts) {
    std::string path;
    for (const auto &p : parts) path += "/" + p;
    throw Error(ErrorCode::NotFound, "no route for " + std::string(method) + " " + path, path);
}

}  // namespace

ApiService::ApiService(ServiceOptions options) : options_(std::move(options)), jobs_(options_.workers) {}

std::shared_ptr<SessionSlot> ApiService::slot(const std::string &id) {
    std::lock_guard lock(sessions_mutex_);
    const auto it = sessions_.find(id);
    if (it == sessions_.end()) throw Error(ErrorCode::NotFound, "unknown session '" + id + "'", id);
    return it->second;
}

std::string ApiService::session_file(const nlohmann::json &body, const std::string &fallback) const {
    std::string name = fallback;
    if (body.contains("name")) {
        if (!body["name"].is_string()) throw Error(ErrorCode::InvalidArgument, "'name' must be a string", "name");
        name = body["name"].get<std::string>();
    }
    static const std::regex allowed("[A-Za-z0-9_][A-Za-z0-9_.-]*");
    if (!std::regex_match(name, allowed)) {
        throw Error(ErrorCode::InvalidArgument, "session file names use letters, digits, '_', '-' and '.'", name);
    }
    if (!name.ends_with(".json")) name += ".json";
    return (std::filesystem::path(options_.storage_dir) / name).string();
}

ApiResponse ApiService::handle(std::string_view method, std::string_view path,
                               const std::map<std::string, std::string> &query, std::string_view body) {
    try {
        return route(method, split_path(path), query, body);
    } catch (const Error &e) {
        return {http_status(e.code()), error_body(e)};
    } catch (const nlohmann::json::exception &e) {
        return {400, error_body(Error(ErrorCode::Malformed, e.what()))};
    } catch (const std::exception &e) {
        return {500, {{"code", "internal"}, {"message", e.what()}, {"context", ""}}};
    }
}

ApiResponse ApiService::route(std::string_view method, const std::vector<std::string> &parts,
                              const std::map<std::string, std::string> &query, std::string_view body) {
    const auto n = parts.size();
    if (n < 2 || parts[0] != "api") no_route(method, parts);
    const auto &head = parts[1];

    if (head == "health" && n == 2 && method == "GET") return {200, {{"status", "ok"}}};

    if (head == "taxonomies") {
        std::lock_guard lock(catalog_mutex_);
        if (n == 2 && method == "GET") {
            nlohmann::json list = nlohmann::json::array();
            for (const auto &[name, tax] : catalog_.taxonomies) {
                list.push_back({{"name", name}, {"root", tax.root()}, {"size", tax.size()}});
            }
            return {200, list};
        }
        if (n == 3 && method == "GET") {
            const auto it = catalog_.taxonomies.find(parts[2]);
            if (it == catalog_.taxonomies.end()) {
                throw Error(ErrorCode::NotFound, "unknown taxonomy '" + parts[2] + "'", parts[2]);
            }
            return {200, taxonomy_to_json(it->second)};
        }
        if (n == 2 && method == "POST") {
            auto tax = parse_taxonomy(body);
            nlohmann::json summary{{"name", tax.name()}, {"root", tax.root()}, {"size", tax.size()}};
            add_taxonomy(catalog_.taxonomies, std::move(tax));
            return {201, summary};
        }
        no_route(method, parts);
    }

    if (head == "entities" && n == 2 && method == "POST") {
        const auto doc = body_json(body);
        std::map<std::string, std::string> bindings;
        nlohmann::json entities = doc;
        if (doc.is_object()) {
            entities = doc.value("entities", nlohmann::json::array());
            if (doc.contains("bindings")) bindings = doc.at("bindings").get<std::map<std::string, std::string>>();
        }
        std::lock_guard lock(catalog_mutex_);
        auto store = catalog_.entities;
        const auto report = ingest_entities(entities.dump(), catalog_.taxonomies, store, bindings);
        catalog_.entities = std::move(store);
        return {200, report_to_json(report)};
    }

    if (head == "jobs" && n == 3 && method == "GET") return {200, job_to_json(jobs_.get(parts[2]))};

    if (head != "sessions") no_route(method, parts);

    if (n == 2 && method == "GET") {
        std::lock_guard lock(sessions_mutex_);
        nlohmann::json list = nlohmann::json::array();
        for (const auto &[id, s] : sessions_) list.push_back(id);
        return {200, list};
    }
    if (n == 2 && method == "POST") {
        const auto doc = body_json(body);
        const std::string name = doc.value("name", "");
        Catalog snapshot;
        {
            std::lock_guard lock(catalog_mutex_);
            snapshot = catalog_;
        }
        std::lock_guard lock(sessions_mutex_);
        const std::string id = "s" + std::to_string(next_session_++);
        Session session(id, name);
        session.set_catalog(std::move(snapshot));
        auto created = std::make_shared<SessionSlot>(std::move(session));
        sessions_.emplace(id, created);
        std::lock_guard slot_lock(created->mutex);
        return {201, session_summary(created->session)};
    }
    if (n < 3) no_route(method, parts);

    const auto s = slot(parts[2]);
    if (n == 3 && method == "GET") {
        std::lock_guard lock(s->mutex);
        return {200, session_summary(s->session)};
    }
    const auto &action = parts[3];
    if (action == "steps" && n == 4 && method == "POST") {
        const auto request = step_request_from_json(body_json(body));
        const auto job = jobs_.submit(s, request, options_.default_seed);
        if (options_.synchronous) return {200, job_to_json(jobs_.wait(job))};
        return {202, {{"jobId", job}}};
    }
    if (action == "artifacts" && n >= 5) {
        if (n == 5 && method == "GET") {
            std::shared_ptr<const Artifact> a;
            {
                std::lock_guard lock(s->mutex);
                a = s->session.artifact(parts[4]);
            }
            return {200, artifact_to_json(*a)};
        }
        if (n == 5 && method == "DELETE") {
            std::lock_guard lock(s->mutex);
            s->session.remove_artifact(parts[4]);
            return {200, {{"deleted", parts[4]}}};
        }
        if (n == 6 && parts[5] == "replay" && method == "POST") {
            std::unique_lock lock(s->mutex);
            const Session snapshot = s->session;
            lock.unlock();
            const auto outcome = replay_artifact(snapshot, parts[4]);
            return {200, {{"artifact", parts[4]}, {"identical", outcome.identical}}};
        }
    }
    if (action == "entity-table" && n == 4 && method == "GET") {
        const auto it = query.find("artifact");
        if (it == query.end() || it->second.empty()) {
            throw Error(ErrorCode::InvalidArgument, "query parameter 'artifact' is required", "artifact");
        }
        std::lock_guard lock(s->mutex);
        return {200, entity_table(s->session, it->second)};
    }
    if (action == "report" && n == 4 && method == "POST") {
        const auto doc = body_json(body);
        std::vector<std::string> ids;
        if (doc.contains("artifacts")) ids = doc.at("artifacts").get<std::vector<std::string>>();
        std::lock_guard lock(s->mutex);
        return {200, {{"markdown", export_report(s->session, ids)}}};
    }
    if (action == "save" && n == 4 && method == "POST") {
        const auto file = session_file(body_json(body), parts[2]);
        std::lock_guard lock(s->mutex);
        save_session(s->session, file);
        return {200, {{"file", file}}};
    }
    if (action == "load" && n == 4 && method == "POST") {
        const auto file = session_file(body_json(body), parts[2]);
        auto loaded = load_session(file);
        loaded.set_id(parts[2]);
        std::lock_guard lock(s->mutex);
        s->session = std::move(loaded);
        return {200, session_summary(s->session)};
    }
    no_route(method, parts);
}

}  // namespace qwb
