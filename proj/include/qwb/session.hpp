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

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "qwb/formats.hpp"
#include "qwb/similarity.hpp"

namespace qwb {

enum class ArtifactKind { DistanceMatrix, Vectors, Embedding, Labels, Model };
std::string_view to_string(ArtifactKind kind);
ArtifactKind parse_artifact_kind(std::string_view s);

struct Provenance {
    std::string operation;         // step kind that produced the artifact
    nlohmann::json parameters;     // every hyperparameter, defaults filled in
    std::vector<std::string> inputs;
    std::string created;           // UTC, ISO 8601
};

/// Immutable once committed; sessions share them through const pointers.
struct Artifact {
    std::string id;
    ArtifactKind kind = ArtifactKind::DistanceMatrix;
    Provenance provenance;
    nlohmann::json payload;
};

nlohmann::json artifact_to_json(const Artifact &artifact);

enum class JobStatus { Pending, Running, Done, Failed };
std::string_view to_string(JobStatus status);
JobStatus parse_job_status(std::string_view s);

struct JobRecord {
    std::string id;
    std::string session;
    std::string kind;
    nlohmann::json parameters;
    JobStatus status = JobStatus::Pending;
    std::string artifact;  // set when done
    std::string error;     // set when failed
};

nlohmann::json job_to_json(const JobRecord &job);

/// Taxonomies and entities of a session. Replaced wholesale on ingest so
/// running jobs keep reading the snapshot they started with.
struct Catalog {
    TaxonomySet taxonomies;
    EntityStore entities;
};

class Session {
  public:
    explicit Session(std::string id, std::string name = {});

    const std::string &id() const noexcept { return id_; }
    const std::string &name() const noexcept { return name_; }
    void set_id(std::string id) { id_ = std::move(id); }

    const Catalog &catalog() const noexcept { return *catalog_; }
    std::shared_ptr<const Catalog> catalog_snapshot() const { return catalog_; }
    void add_taxonomy(Taxonomy taxonomy);
    IngestReport ingest(std::string_view entity_document, const std::map<std::string, std::string> &bindings = {});
    /// Replaces the catalog; used when a service session snapshots the
    /// service-wide catalog.
    void set_catalog(Catalog catalog);

    const std::map<std::string, PreparationPlan> &plans() const noexcept { return plans_; }

    const std::vector<std::shared_ptr<const Artifact>> &artifacts() const noexcept { return artifacts_; }
    /// Throws NotFound.
    std::shared_ptr<const Artifact> artifact(std::string_view id) const;
    bool has_artifact(std::string_view id) const;
    /// Appends a new artifact and returns its id. Throws NotFound if an input
    /// no longer exists.
    std::string commit(ArtifactKind kind, Provenance provenance, nlohmann::json payload);
    /// Throws Precondition while another artifact names it as an input.
    void remove_artifact(std::string_view id);

    const std::vector<JobRecord> &jobs() const noexcept { return jobs_; }
    void record_job(const JobRecord &job);
    std::string next_job_id();

    nlohmann::json to_json() const;
    static Session from_json(const nlohmann::json &doc);

  private:
    std::string id_;
    std::string name_;
    std::shared_ptr<const Catalog> catalog_;
    std::map<std::string, PreparationPlan> plans_;
    std::vector<std::shared_ptr<const Artifact>> artifacts_;
    std::vector<JobRecord> jobs_;
    std::uint64_t next_artifact_ = 1;
    std::uint64_t next_job_ = 1;
};

/// Summary without payloads, for listings.
nlohmann::json session_summary(const Session &session);

// ---------------------------------------------------------------------------
// Steps

enum class StepKind { Prepare, Encode, Embed, Cluster, Train };
std::string_view to_string(StepKind kind);
StepKind parse_step_kind(std::string_view s);

struct StepRequest {
    StepKind kind = StepKind::Prepare;
    nlohmann::json params = nlohmann::json::object();
};

/// `{"kind": "...", "params": {...}}`.
StepRequest step_request_from_json(const nlohmann::json &doc);

/// A validated step: parameters normalized with every default filled in
/// and input artifacts resolved. Holds snapshots only, so it can execute
/// without the session lock.
struct PlannedStep {
    StepKind kind = StepKind::Prepare;
    nlohmann::json parameters;
    std::vector<std::shared_ptr<const Artifact>> inputs;
    std::shared_ptr<const Catalog> catalog;
};

/// Validates parameters and input kinds. `default_seed` applies when the
/// request carries no "seed".
PlannedStep plan_step(const Session &session, const StepRequest &request, std::uint64_t default_seed = 0);

struct StepOutput {
    ArtifactKind kind = ArtifactKind::DistanceMatrix;
    nlohmann::json payload;
};

/// Runs the kernels. Deterministic in the planned parameters and inputs.
StepOutput execute_step(const PlannedStep &step);

/// Provenance for a planned step, stamped with the current time.
Provenance provenance_for(const PlannedStep &step);

/// plan_step, execute_step and commit in one call; records a job entry.
std::string run_step(Session &session, const StepRequest &request, std::uint64_t default_seed = 0);

struct ReplayOutcome {
    bool identical = false;
    nlohmann::json payload;
};

/// Re-executes an artifact's provenance against the session and compares the
/// serialized payloads byte for byte.
ReplayOutcome replay_artifact(const Session &session, std::string_view artifact_id);

// ---------------------------------------------------------------------------
// Typed views of payloads

DistanceMatrix distance_matrix_from_payload(const Artifact &artifact);
Eigen::MatrixXd matrix_from_json(const nlohmann::json &rows);
nlohmann::json matrix_to_json(const Eigen::MatrixXd &m);

// ---------------------------------------------------------------------------
// Reports, entity table, persistence

/// Markdown pattern-candidate document. Throws InvalidArgument on an empty
/// list and NotFound on an unknown id.
std::string export_report(const Session &session, const std::vector<std::string> &artifact_ids);

/// One row per entity of the artifact: the plan's selected attribute values
/// with labels, reference links and, for label artifacts, the cluster.
nlohmann::json entity_table(const Session &session, std::string_view artifact_id);

inline constexpr int kSessionFileVersion = 1;

std::string serialize_session(const Session &session);
/// CorruptFile on unparsable or structurally invalid input, VersionMismatch
/// naming both versions when the envelope is not version 1.
Session deserialize_session(std::string_view text);

void save_session(const Session &session, const std::string &path);
Session load_session(const std::string &path);

}  // namespace qwb
