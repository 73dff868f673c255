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

#include "qwb/session.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qwb/error.hpp"

namespace qwb {

std::string_view to_string(ArtifactKind kind) {
    switch (kind) {
        case ArtifactKind::DistanceMatrix: return "distanceMatrix";
        case ArtifactKind::Vectors: return "vectors";
        case ArtifactKind::Embedding: return "embedding";
        case ArtifactKind::Labels: return "labels";
        case ArtifactKind::Model: return "model";
    }
    return "unknown";
}

ArtifactKind parse_artifact_kind(std::string_view s) {
    if (s == "distanceMatrix") return ArtifactKind::DistanceMatrix;
    if (s == "vectors") return ArtifactKind::Vectors;
    if (s == "embedding") return ArtifactKind::Embedding;
    if (s == "labels") return ArtifactKind::Labels;
    if (s == "model") return ArtifactKind::Model;
    throw Error(ErrorCode::InvalidArgument, "unknown artifact kind '" + std::string(s) + "'", std::string(s));
}

std::string_view to_string(JobStatus status) {
    switch (status) {
        case JobStatus::Pending: return "pending";
        case JobStatus::Running: return "running";
        case JobStatus::Done: return "done";
        case JobStatus::Failed: return "failed";
    }
    return "unknown";
}

JobStatus parse_job_status(std::string_view s) {
    if (s == "pending") return JobStatus::Pending;
    if (s == "running") return JobStatus::Running;
    if (s == "done") return JobStatus::Done;
    if (s == "failed") return JobStatus::Failed;
    throw Error(ErrorCode::InvalidArgument, "unknown job status '" + std::string(s) + "'", std::string(s));
}

nlohmann::json artifact_to_json(const Artifact &artifact) {
    return {{"id", artifact.id},
            {"kind", to_string(artifact.kind)},
            {"provenance",
             {{"operation", artifact.provenance.operation},
              {"parameters", artifact.provenance.parameters},
              {"inputs", artifact.provenance.inputs},
              {"created", artifact.provenance.created}}},
            {"payload", artifact.payload}};
}

nlohmann::json job_to_json(const JobRecord &job) {
    nlohmann::json out{{"id", job.id},
                       {"session", job.session},
                       {"kind", job.kind},
                       {"parameters", job.parameters},
                       {"status", to_string(job.status)}};
    if (!job.artifact.empty()) out["artifact"] = job.artifact;
    if (!job.error.empty()) out["error"] = job.error;
    return out;
}

namespace {

Artifact artifact_from_json(const nlohmann::json &doc) {
    Artifact a;
    a.id = doc.at("id").get<std::string>();
    a.kind = parse_artifact_kind(doc.at("kind").get<std::string>());
    const auto &p = doc.at("provenance");
    a.provenance.operation = p.at("operation").get<std::string>();
    a.provenance.parameters = p.at("parameters");
    a.provenance.inputs = p.at("inputs").get<std::vector<std::string>>();
    a.provenance.created = p.at("created").get<std::string>();
    a.payload = doc.at("payload");
    return a;
}

JobRecord job_from_json(const nlohmann::json &doc) {
    JobRecord j;
    j.id = doc.at("id").get<std::string>();
    j.session = doc.at("session").get<std::string>();
    j.kind = doc.at("kind").get<std::string>();
    j.parameters = doc.at("parameters");
    j.status = parse_job_status(doc.at("status").get<std::string>());
    j.artifact = doc.value("artifact", "");
    j.error = doc.value("error", "");
    return j;
}

std::uint64_t numeric_suffix(const std::string &id) {
    std::size_t pos = id.size();
    while (pos > 0 && std::isdigit(static_cast<unsigned char>(id[pos - 1]))) --pos;
    if (pos == id.size()) return 0;
    return std::stoull(id.substr(pos));
}

}  // namespace

Session::Session(std::string id, std::string name)
    : id_(std::move(id)), name_(std::move(name)), catalog_(std::make_shared<const Catalog>()) {}

void Session::add_taxonomy(Taxonomy taxonomy) {
    auto next = std::make_shared<Catalog>(*catalog_);
    qwb::add_taxonomy(next->taxonomies, std::move(taxonomy));
    catalog_ = std::move(next);
}

IngestReport Session::ingest(std::string_view entity_document, const std::map<std::string, std::string> &bindings) {
    auto next = std::make_shared<Catalog>(*catalog_);
    auto report = ingest_entities(entity_document, next->taxonomies, next->entities, bindings);
    catalog_ = std::move(next);
    return report;
}

void Session::set_catalog(Catalog catalog) { catalog_ = std::make_shared<const Catalog>(std::move(catalog)); }

std::shared_ptr<const Artifact> Session::artifact(std::string_view id) const {
    for (const auto &a : artifacts_) {
        if (a->id == id) return a;
    }
    throw Error(ErrorCode::NotFound, "unknown artifact '" + std::string(id) + "'", std::string(id));
}

bool Session::has_artifact(std::string_view id) const {
    return std::any_of(artifacts_.begin(), artifacts_.end(), [&](const auto &a) { return a->id == id; });
}

std::string Session::commit(ArtifactKind kind, Provenance provenance, nlohmann::json payload) {
    for (const auto &input : provenance.inputs) {
        if (!has_artifact(input)) {
            throw Error(ErrorCode::NotFound, "input artifact '" + input + "' no longer exists", input);
        }
    }
    if (const auto plan = provenance.parameters.find("plan"); plan != provenance.parameters.end()) {
        auto parsed = plan_from_json(*plan);
        plans_.emplace(plan_digest(parsed), std::move(parsed));
    }
    auto artifact = std::make_shared<Artifact>();
    artifact->id = "a" + std::to_string(next_artifact_++);
    artifact->kind = kind;
    artifact->provenance = std::move(provenance);
    artifact->payload = std::move(payload);
    artifacts_.push_back(artifact);
    return artifact->id;
}

void Session::remove_artifact(std::string_view id) {
    const auto target = artifact(id);
    for (const auto &a : artifacts_) {
        const auto &in = a->provenance.inputs;
        if (std::find(in.begin(), in.end(), id) != in.end()) {
            throw Error(ErrorCode::Precondition, "artifact '" + std::string(id) + "' is an input of '" + a->id + "'",
                        a->id);
        }
    }
    std::erase(artifacts_, target);
}

void Session::record_job(const JobRecord &job) {
    for (auto &existing : jobs_) {
        if (existing.id == job.id) {
            existing = job;
            return;
        }
    }
    jobs_.push_back(job);
}

std::string Session::next_job_id() { return id_ + "-j" + std::to_string(next_job_++); }

nlohmann::json Session::to_json() const {
    nlohmann::json taxonomies = nlohmann::json::array();
    for (const auto &[name, tax] : catalog_->taxonomies) taxonomies.push_back(taxonomy_to_json(tax));
    nlohmann::json entities = nlohmann::json::array();
    for (const auto &e : catalog_->entities.entities()) entities.push_back(entity_to_json(e));
    nlohmann::json plans = nlohmann::json::object();
    for (const auto &[digest, plan] : plans_) plans[digest] = plan_to_json(plan);
    nlohmann::json artifacts = nlohmann::json::array();
    for (const auto &a : artifacts_) artifacts.push_back(artifact_to_json(*a));
    nlohmann::json jobs = nlohmann::json::array();
    for (const auto &j : jobs_) jobs.push_back(job_to_json(j));
    return {{"id", id_},
            {"name", name_},
            {"taxonomies", std::move(taxonomies)},
            {"entities", std::move(entities)},
            {"plans", std::move(plans)},
            {"artifacts", std::move(artifacts)},
            {"jobs", std::move(jobs)},
            {"counters", {{"artifact", next_artifact_}, {"job", next_job_}}}};
}

Session Session::from_json(const nlohmann::json &doc) {
    Session s(doc.at("id").get<std::string>(), doc.at("name").get<std::string>());
    Catalog catalog;
    for (const auto &t : doc.at("taxonomies")) qwb::add_taxonomy(catalog.taxonomies, taxonomy_from_json(t));
    std::size_t index = 0;
    for (const auto &e : doc.at("entities")) {
        catalog.entities.add(entity_from_json(e, "entities[" + std::to_string(index++) + "]"));
    }
    s.set_catalog(std::move(catalog));
    for (const auto &[digest, plan] : doc.at("plans").items()) s.plans_.emplace(digest, plan_from_json(plan));
    for (const auto &a : doc.at("artifacts")) {
        auto artifact = std::make_shared<Artifact>(artifact_from_json(a));
        for (const auto &input : artifact->provenance.inputs) {
            if (!s.has_artifact(input)) {
                throw Error(ErrorCode::CorruptFile, "artifact '" + artifact->id + "' names missing input '" + input + "'",
                            artifact->id);
            }
        }
        if (s.has_artifact(artifact->id)) {
            throw Error(ErrorCode::CorruptFile, "duplicate artifact id '" + artifact->id + "'", artifact->id);
        }
        s.artifacts_.push_back(std::move(artifact));
    }
    for (const auto &j : doc.at("jobs")) s.jobs_.push_back(job_from_json(j));
    const auto &counters = doc.at("counters");
    s.next_artifact_ = counters.at("artifact").get<std::uint64_t>();
    s.next_job_ = counters.at("job").get<std::uint64_t>();
    for (const auto &a : s.artifacts_) {
        if (numeric_suffix(a->id) >= s.next_artifact_) {
            throw Error(ErrorCode::CorruptFile, "artifact counter is behind artifact '" + a->id + "'", a->id);
        }
    }
    return s;
}

nlohmann::json session_summary(const Session &session) {
    nlohmann::json taxonomies = nlohmann::json::array();
    for (const auto &[name, tax] : session.catalog().taxonomies) {
        taxonomies.push_back({{"name", name}, {"root", tax.root()}, {"size", tax.size()}});
    }
    nlohmann::json artifacts = nlohmann::json::array();
    for (const auto &a : session.artifacts()) {
        auto entry = artifact_to_json(*a);
        entry.erase("payload");
        artifacts.push_back(std::move(entry));
    }
    nlohmann::json jobs = nlohmann::json::array();
    for (const auto &j : session.jobs()) jobs.push_back(job_to_json(j));
    nlohmann::json plans = nlohmann::json::object();
    for (const auto &[digest, plan] : session.plans()) plans[digest] = plan_to_json(plan);
    return {{"id", session.id()},
            {"name", session.name()},
            {"taxonomies", std::move(taxonomies)},
            {"entityCount", session.catalog().entities.size()},
            {"plans", std::move(plans)},
            {"artifacts", std::move(artifacts)},
            {"jobs", std::move(jobs)}};
}

// ---------------------------------------------------------------------------

std::string serialize_session(const Session &session) {
    nlohmann::json envelope{{"version", kSessionFileVersion}, {"session", session.to_json()}};
    return envelope.dump(2) + "\n";
}

Session deserialize_session(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error &e) {
        throw Error(ErrorCode::CorruptFile, std::string("session file is not valid JSON: ") + e.what(),
                    "byte " + std::to_string(e.byte));
    }
    if (!doc.is_object() || !doc.contains("version") || !doc["version"].is_number_integer()) {
        throw Error(ErrorCode::CorruptFile, "session file has no integer 'version' field");
    }
    const auto version = doc["version"].get<std::int64_t>();
    if (version != kSessionFileVersion) {
        throw Error(ErrorCode::VersionMismatch,
                    "session file version " + std::to_string(version) + " is not supported (supported version " +
                        std::to_string(kSessionFileVersion) + ")",
                    "file version " + std::to_string(version) + ", supported version " +
                        std::to_string(kSessionFileVersion));
    }
    try {
        return Session::from_json(doc.at("session"));
    } catch (const nlohmann::json::exception &e) {
        throw Error(ErrorCode::CorruptFile, std::string("session file is structurally invalid: ") + e.what());
    } catch (const Error &e) {
        if (e.code() == ErrorCode::CorruptFile) throw;
        throw Error(ErrorCode::CorruptFile, std::string("session file content is invalid: ") + e.what(), e.context());
    }
}

void save_session(const Session &session, const std::string &path) {
    const std::string text = serialize_session(session);
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write session file", path);
        out << text;
        if (!out.flush()) throw Error(ErrorCode::InvalidArgument, "cannot write session file", path);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw Error(ErrorCode::InvalidArgument, "cannot replace session file: " + ec.message(), path);
}

Session load_session(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::NotFound, "session file does not exist", path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return deserialize_session(buffer.str());
}

}  // namespace qwb
