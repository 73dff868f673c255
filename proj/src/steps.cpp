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

#include <algorithm>
#include <chrono>
#include <climits>
#include <ctime>
#include <set>
#include <string>

#include "qwb/clustering.hpp"
#include "qwb/embedding.hpp"
#include "qwb/error.hpp"
#include "qwb/neural.hpp"
#include "qwb/session.hpp"

namespace qwb {

std::string_view to_string(StepKind kind) {
    switch (kind) {
        case StepKind::Prepare: return "prepare";
        case StepKind::Encode: return "encode";
        case StepKind::Embed: return "embed";
        case StepKind::Cluster: return "cluster";
        case StepKind::Train: return "train";
    }
    return "unknown";
}

StepKind parse_step_kind(std::string_view s) {
    if (s == "prepare") return StepKind::Prepare;
    if (s == "encode") return StepKind::Encode;
    if (s == "embed") return StepKind::Embed;
    if (s == "cluster") return StepKind::Cluster;
    if (s == "train") return StepKind::Train;
    throw Error(ErrorCode::InvalidArgument, "unknown step kind '" + std::string(s) + "'", std::string(s));
}

StepRequest step_request_from_json(const nlohmann::json &doc) {
    if (!doc.is_object() || !doc.contains("kind") || !doc["kind"].is_string()) {
        throw Error(ErrorCode::InvalidArgument, "step request needs a string 'kind'", "kind");
    }
    StepRequest r;
    r.kind = parse_step_kind(doc["kind"].get<std::string>());
    if (const auto it = doc.find("params"); it != doc.end()) {
        if (!it->is_object()) throw Error(ErrorCode::InvalidArgument, "'params' must be an object", "params");
        r.params = *it;
    }
    return r;
}

nlohmann::json matrix_to_json(const Eigen::MatrixXd &m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json &rows) {
    if (!rows.is_array()) throw Error(ErrorCode::InvalidArgument, "matrix must be an array of rows");
    const auto n = static_cast<Eigen::Index>(rows.size());
    const Eigen::Index cols = n == 0 ? 0 : static_cast<Eigen::Index>(rows[0].size());
    Eigen::MatrixXd m(n, cols);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto &row = rows[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
            throw Error(ErrorCode::InvalidArgument, "matrix rows differ in length", "row " + std::to_string(i));
        }
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = row[static_cast<std::size_t>(j)].get<double>();
    }
    return m;
}

DistanceMatrix distance_matrix_from_payload(const Artifact &artifact) {
    if (artifact.kind != ArtifactKind::DistanceMatrix) {
        throw Error(ErrorCode::Precondition, "artifact '" + artifact.id + "' is not a distance matrix", artifact.id);
    }
    DistanceMatrix d;
    d.ids = artifact.payload.at("ids").get<std::vector<std::string>>();
    d.values = matrix_from_json(artifact.payload.at("distance"));
    d.provenance.plan_digest = artifact.payload.value("planDigest", "");
    return d;
}

namespace {

// Reads step parameters with defaults and records the normalized value of
// every key it touches; leftover keys are rejected by finish().
class Params {
  public:
    Params(const nlohmann::json &in, std::string scope) : in_(in), scope_(std::move(scope)) {
        if (!in_.is_object()) throw Error(ErrorCode::InvalidArgument, scope_ + " parameters must be an object");
    }

    nlohmann::json out = nlohmann::json::object();

    const nlohmann::json *raw(const std::string &key) {
        used_.insert(key);
        const auto it = in_.find(key);
        return it == in_.end() || it->is_null() ? nullptr : &*it;
    }

    [[noreturn]] void fail(const std::string &key, const std::string &what) const {
        throw Error(ErrorCode::InvalidArgument, scope_ + ": '" + key + "' " + what, key);
    }

    int integer(const std::string &key, int fallback, int lo, int hi = INT_MAX) {
        int v = fallback;
        if (const auto *j = raw(key)) {
            if (!j->is_number_integer()) fail(key, "must be an integer");
            const auto wide = j->get<std::int64_t>();
            if (wide < lo || wide > hi) {
                fail(key, "must be in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
            }
            v = static_cast<int>(wide);
        }
        out[key] = v;
        return v;
    }

    double number(const std::string &key, double fallback, bool positive = false) {
        double v = fallback;
        if (const auto *j = raw(key)) {
            if (!j->is_number()) fail(key, "must be a number");
            v = j->get<double>();
        }
        if (!std::isfinite(v) || (positive && !(v > 0.0))) fail(key, positive ? "must be positive" : "must be finite");
        out[key] = v;
        return v;
    }

    std::optional<double> optional_number(const std::string &key) {
        const auto *j = raw(key);
        if (!j) return std::nullopt;
        if (!j->is_number() || !std::isfinite(j->get<double>())) fail(key, "must be a finite number");
        out[key] = j->get<double>();
        return j->get<double>();
    }

    std::string text(const std::string &key, std::string fallback) {
        std::string v = std::move(fallback);
        if (const auto *j = raw(key)) {
            if (!j->is_string()) fail(key, "must be a string");
            v = j->get<std::string>();
        }
        if (v.empty()) fail(key, "is required");
        out[key] = v;
        return v;
    }

    bool flag(const std::string &key, bool fallback) {
        bool v = fallback;
        if (const auto *j = raw(key)) {
            if (!j->is_boolean()) fail(key, "must be a boolean");
            v = j->get<bool>();
        }
        out[key] = v;
        return v;
    }

    std::uint64_t unsigned_value(const std::string &key, std::uint64_t fallback) {
        std::uint64_t v = fallback;
        if (const auto *j = raw(key)) {
            const bool non_negative = j->is_number_unsigned() || (j->is_number_integer() && j->get<std::int64_t>() >= 0);
            if (!non_negative) fail(key, "must be a non-negative integer");
            v = j->get<std::uint64_t>();
        }
        out[key] = v;
        return v;
    }

    void finish() const {
        for (const auto &[key, value] : in_.items()) {
            if (!used_.contains(key)) {
                throw Error(ErrorCode::InvalidArgument, scope_ + ": unknown parameter '" + key + "'", key);
            }
        }
    }

  private:
    const nlohmann::json &in_;
    std::string scope_;
    std::set<std::string> used_;
};

std::shared_ptr<const Artifact> input_artifact(const Session &session, Params &p, const std::string &key,
                                               std::initializer_list<ArtifactKind> allowed, const std::string &scope) {
    const std::string id = p.text(key, "");
    auto artifact = session.artifact(id);
    if (std::find(allowed.begin(), allowed.end(), artifact->kind) == allowed.end()) {
        std::string names;
        for (auto k : allowed) names += (names.empty() ? "" : " or ") + std::string(to_string(k));
        throw Error(ErrorCode::Precondition,
                    scope + " needs a " + names + " artifact; '" + id + "' is " + std::string(to_string(artifact->kind)),
                    id);
    }
    return artifact;
}

std::size_t row_count(const Artifact &a) { return a.payload.at("ids").size(); }

std::size_t column_count(const Artifact &a) {
    const auto &rows = a.kind == ArtifactKind::Vectors ? a.payload.at("rows") : a.payload.at("coordinates");
    return rows.empty() ? 0 : rows[0].size();
}

// Points of an embedding or vectors artifact.
Eigen::MatrixXd points_of(const Artifact &a) {
    return matrix_from_json(a.kind == ArtifactKind::Vectors ? a.payload.at("rows") : a.payload.at("coordinates"));
}

bool power_of_two(int v) { return v >= 1 && (v & (v - 1)) == 0; }

void plan_selection(const Session &session, Params &p, bool need_pairs) {
    const auto *plan_json = p.raw("plan");
    if (!plan_json) p.fail("plan", "is required");
    const auto plan = plan_from_json(*plan_json);
    const auto &cat = session.catalog();
    validate(plan, cat.taxonomies);
    p.out["plan"] = plan_to_json(plan);

    EntitySelection selection;
    if (const auto *ids = p.raw("entities")) {
        if (!ids->is_array()) p.fail("entities", "must be an array of entity ids");
        for (const auto &id : *ids) {
            if (!id.is_string()) p.fail("entities", "must be an array of entity ids");
            selection.ids.push_back(id.get<std::string>());
        }
    }
    if (const auto *count = p.raw("count")) {
        if (!count->is_number_unsigned()) p.fail("count", "must be a non-negative integer");
        selection.count = count->get<std::size_t>();
        p.out["count"] = *selection.count;
    }
    selection.seed = p.out.at("seed").get<std::uint64_t>();
    const auto ids = resolve_selection(selection, cat.entities);
    if (ids.size() < (need_pairs ? 2u : 1u)) {
        throw Error(ErrorCode::InvalidArgument,
                    "selection has " + std::to_string(ids.size()) + " entities; at least " +
                        std::to_string(need_pairs ? 2 : 1) + " required",
                    "entities");
    }
    for (const auto &id : ids) check_entity(cat.entities.get(id), plan, cat.taxonomies);
    p.out["entities"] = ids;
}

void plan_embed(const Session &session, Params &p, PlannedStep &step) {
    const auto method = p.text("method", "mds");
    const std::string scope = "embed/" + method;
    if (method == "mds" || method == "smacof") {
        auto input = input_artifact(session, p, "input", {ArtifactKind::DistanceMatrix}, scope);
        const int order = static_cast<int>(row_count(*input));
        const int dims = p.integer("dimensions", 2, 1);
        if (dims >= order) p.fail("dimensions", "must be below the matrix order " + std::to_string(order));
        if (method == "smacof") {
            p.integer("maxIterations", 300, 1);
            p.number("tolerance", 1e-9, true);
            const auto init = p.text("init", "random");
            if (init != "random" && init != "classical") p.fail("init", "must be 'random' or 'classical'");
            if (p.number("normExponent", 2.0, true) < 1.0) p.fail("normExponent", "must be >= 1");
        }
        step.inputs.push_back(std::move(input));
    } else if (method == "pca" || method == "autoencoder") {
        auto input = input_artifact(session, p, "input", {ArtifactKind::Vectors, ArtifactKind::Embedding}, scope);
        const int cols = static_cast<int>(column_count(*input));
        if (row_count(*input) < 2) throw Error(ErrorCode::Precondition, scope + " needs at least two points");
        if (method == "pca") {
            p.integer("dimensions", 2, 1, cols);
        } else {
            if (cols < 2) throw Error(ErrorCode::Precondition, scope + " needs at least two input columns");
            p.integer("dimensions", 1, 1, cols - 1);
            p.integer("epochs", 1000, 1);
            p.number("learningRate", 0.01, true);
            p.number("initScale", 0.5, true);
        }
        step.inputs.push_back(std::move(input));
    } else {
        p.fail("method", "must be one of mds, smacof, pca, autoencoder");
    }
}

void plan_cluster(const Session &session, Params &p, PlannedStep &step) {
    const auto method = p.text("method", "bruteforce");
    const std::string scope = "cluster/" + method;
    if (method == "kmeans") {
        auto input = input_artifact(session, p, "input", {ArtifactKind::Embedding, ArtifactKind::Vectors}, scope);
        p.integer("clusters", 2, 1, static_cast<int>(row_count(*input)));
        p.integer("maxIterations", 100, 1);
        step.inputs.push_back(std::move(input));
        return;
    }
    if (method != "bruteforce" && method != "localsearch" && method != "qaoa" && method != "vqe") {
        p.fail("method", "must be one of bruteforce, localsearch, qaoa, vqe, kmeans");
    }
    auto input = input_artifact(session, p, "input", {ArtifactKind::DistanceMatrix}, scope);
    const int order = static_cast<int>(row_count(*input));
    const int clusters = p.integer("clusters", 2, 1, order);
    if (!power_of_two(clusters)) p.fail("clusters", "must be a power of two");
    if (const auto t = p.optional_number("edgeThreshold"); t && *t < 0.0) p.fail("edgeThreshold", "must be >= 0");
    if (method == "bruteforce" && order > kBruteForceLimit) {
        throw Error(ErrorCode::Capacity, scope + " handles at most " + std::to_string(kBruteForceLimit) + " entities");
    }
    if ((method == "qaoa" || method == "vqe") && order > kDefaultQubitCap) {
        throw Error(ErrorCode::Capacity, scope + " simulates at most " + std::to_string(kDefaultQubitCap) + " qubits");
    }
    if (method == "localsearch") p.integer("restarts", 8, 1);
    if (method == "qaoa") {
        p.integer("reps", 1, 1);
        p.integer("maxTrials", 100, 1);
        parse_optimizer_kind(p.text("optimizer", "spsa"));
        p.flag("sampleReadout", false);
        p.unsigned_value("shots", 1024);
    }
    if (method == "vqe") {
        p.integer("reps", 1, 1);
        parse_entanglement(p.text("entanglement", "linear"));
        p.integer("maxTrials", 2000, 1);
        parse_optimizer_kind(p.text("optimizer", "nelderMead"));
        p.integer("starts", 4, 1);
    }
    step.inputs.push_back(std::move(input));
}

void plan_train(const Session &session, Params &p, PlannedStep &step) {
    const auto method = p.text("method", "perceptron");
    const std::string scope = "train/" + method;
    auto input = input_artifact(session, p, "input", {ArtifactKind::Embedding, ArtifactKind::Vectors}, scope);
    if (method == "perceptron") {
        auto labels = input_artifact(session, p, "labels", {ArtifactKind::Labels}, scope);
        const auto ids = input->payload.at("ids").get<std::vector<std::string>>();
        const auto label_ids = labels->payload.at("ids").get<std::vector<std::string>>();
        const auto values = labels->payload.at("labels").get<std::vector<int>>();
        std::set<std::string> known(label_ids.begin(), label_ids.end());
        for (const auto &id : ids) {
            if (!known.contains(id)) {
                throw Error(ErrorCode::Precondition, scope + ": entity '" + id + "' has no label", id);
            }
        }
        for (int v : values) {
            if (v != 0 && v != 1) throw Error(ErrorCode::Precondition, scope + " needs labels 0 and 1 only");
        }
        p.number("learningRate", 0.1, true);
        p.number("errorThreshold", 1e-6, true);
        p.integer("maxIterations", 10000, 1);
        step.inputs.push_back(std::move(input));
        step.inputs.push_back(std::move(labels));
    } else if (method == "autoencoder") {
        const int cols = static_cast<int>(column_count(*input));
        if (cols < 2) throw Error(ErrorCode::Precondition, scope + " needs at least two input columns");
        p.integer("codeSize", 1, 1, cols - 1);
        p.integer("epochs", 1000, 1);
        p.number("learningRate", 0.01, true);
        p.number("initScale", 0.5, true);
        step.inputs.push_back(std::move(input));
    } else {
        p.fail("method", "must be perceptron or autoencoder");
    }
}

std::string utc_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

nlohmann::json embedding_payload(const EmbeddedPoints &e, const std::string &method) {
    return {{"method", method},
            {"ids", e.ids},
            {"coordinates", matrix_to_json(e.coordinates)},
            {"dimensions", e.dimensions},
            {"normExponent", e.norm_exponent},
            {"stress", e.stress},
            {"clampedEigenvalues", e.clamped_eigenvalues}};
}

nlohmann::json network_json(const FeedforwardNetwork &net) {
    nlohmann::json weights = nlohmann::json::array(), biases = nlohmann::json::array();
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        weights.push_back(matrix_to_json(net.weights[l]));
        biases.push_back(std::vector<double>(net.biases[l].data(), net.biases[l].data() + net.biases[l].size()));
    }
    return {{"layerSizes", net.layer_sizes}, {"weights", std::move(weights)}, {"biases", std::move(biases)}};
}

std::vector<Eigen::VectorXd> rows_of(const Eigen::MatrixXd &m) {
    std::vector<Eigen::VectorXd> rows;
    for (Eigen::Index i = 0; i < m.rows(); ++i) rows.emplace_back(m.row(i).transpose());
    return rows;
}

StepOutput execute_prepare(const PlannedStep &step, bool encode) {
    const auto &p = step.parameters;
    const auto plan = plan_from_json(p.at("plan"));
    const auto ids = p.at("entities").get<std::vector<std::string>>();
    const auto &cat = *step.catalog;
    if (encode) {
        std::vector<Entity> entities;
        for (const auto &id : ids) entities.push_back(cat.entities.get(id));
        const auto enc = one_hot_encode(entities, plan, cat.taxonomies);
        return {ArtifactKind::Vectors,
                {{"ids", enc.ids}, {"columns", enc.columns}, {"rows", matrix_to_json(enc.rows)},
                 {"planDigest", plan_digest(plan)}}};
    }
    EntitySelection selection;
    selection.ids = ids;
    const auto m = build_matrices(plan, cat.taxonomies, selection, cat.entities);
    nlohmann::json empty = nlohmann::json::array();
    for (const auto &[a, b] : m.empty_pairs) empty.push_back({a, b});
    return {ArtifactKind::DistanceMatrix,
            {{"ids", m.distance.ids},
             {"similarity", matrix_to_json(m.similarity.values)},
             {"distance", matrix_to_json(m.distance.values)},
             {"planDigest", m.distance.provenance.plan_digest},
             {"transformer", to_string(plan.transformer)},
             {"emptyPairs", std::move(empty)}}};
}

StepOutput execute_embed(const PlannedStep &step) {
    const auto &p = step.parameters;
    const auto method = p.at("method").get<std::string>();
    const auto &input = *step.inputs.at(0);
    const int dims = p.at("dimensions").get<int>();
    if (method == "mds") {
        return {ArtifactKind::Embedding, embedding_payload(classical_mds(distance_matrix_from_payload(input), dims), method)};
    }
    if (method == "smacof") {
        SmacofOptions o;
        o.dimensions = dims;
        o.max_iterations = p.at("maxIterations").get<int>();
        o.tolerance = p.at("tolerance").get<double>();
        o.seed = p.at("seed").get<std::uint64_t>();
        o.init = p.at("init").get<std::string>() == "classical" ? SmacofInit::Classical : SmacofInit::Random;
        o.norm_exponent = p.at("normExponent").get<double>();
        const auto r = smacof(distance_matrix_from_payload(input), o);
        auto payload = embedding_payload(r.points, method);
        payload["stressTrace"] = r.stress_trace;
        payload["iterations"] = r.iterations;
        return {ArtifactKind::Embedding, std::move(payload)};
    }
    const auto ids = input.payload.at("ids").get<std::vector<std::string>>();
    const auto points = points_of(input);
    if (method == "pca") {
        auto payload = embedding_payload(pca(points, dims, ids), method);
        payload.erase("stress");
        return {ArtifactKind::Embedding, std::move(payload)};
    }
    AutoencoderOptions o;
    o.code_size = dims;
    o.epochs = p.at("epochs").get<int>();
    o.learning_rate = p.at("learningRate").get<double>();
    o.init_scale = p.at("initScale").get<double>();
    o.seed = p.at("seed").get<std::uint64_t>();
    const auto data = rows_of(points);
    const auto trained = train_autoencoder(data, o);
    EmbeddedPoints e;
    e.ids = ids;
    e.dimensions = dims;
    e.coordinates.resize(static_cast<Eigen::Index>(data.size()), dims);
    for (std::size_t i = 0; i < data.size(); ++i) {
        e.coordinates.row(static_cast<Eigen::Index>(i)) = encode(trained.model, data[i]).transpose();
    }
    auto payload = embedding_payload(e, method);
    payload.erase("stress");
    payload["lossTrace"] = trained.loss_trace;
    return {ArtifactKind::Embedding, std::move(payload)};
}

StepOutput execute_cluster(const PlannedStep &step) {
    const auto &p = step.parameters;
    const auto method = p.at("method").get<std::string>();
    const auto &input = *step.inputs.at(0);
    const auto seed = p.at("seed").get<std::uint64_t>();
    const int clusters = p.at("clusters").get<int>();
    if (method == "kmeans") {
        const auto r = kmeans(points_of(input), clusters, p.at("maxIterations").get<int>(), seed);
        return {ArtifactKind::Labels,
                {{"method", method},
                 {"clusters", clusters},
                 {"ids", input.payload.at("ids")},
                 {"labels", r.labels},
                 {"centroids", matrix_to_json(r.centroids)},
                 {"inertia", r.inertia},
                 {"inertiaTrace", r.inertia_trace},
                 {"iterations", r.iterations}}};
    }
    ClusterOptions o;
    o.method = parse_maxcut_method(method);
    o.clusters = clusters;
    o.seed = seed;
    if (p.contains("edgeThreshold")) o.edge_threshold = p.at("edgeThreshold").get<double>();
    if (method == "localsearch") o.restarts = p.at("restarts").get<int>();
    if (method == "qaoa") {
        o.qaoa.reps = p.at("reps").get<int>();
        o.qaoa.optimizer.kind = parse_optimizer_kind(p.at("optimizer").get<std::string>());
        o.qaoa.optimizer.max_iterations = p.at("maxTrials").get<int>();
        o.qaoa.sample_readout = p.at("sampleReadout").get<bool>();
        o.qaoa.shots = p.at("shots").get<std::uint64_t>();
    }
    if (method == "vqe") {
        o.vqe.reps = p.at("reps").get<int>();
        o.vqe.entanglement = parse_entanglement(p.at("entanglement").get<std::string>());
        o.vqe.optimizer.kind = parse_optimizer_kind(p.at("optimizer").get<std::string>());
        o.vqe.optimizer.max_iterations = p.at("maxTrials").get<int>();
        o.vqe.starts = p.at("starts").get<int>();
    }
    const auto r = maxcut_cluster(distance_matrix_from_payload(input), o);
    nlohmann::json splits = nlohmann::json::array();
    for (const auto &s : r.splits) {
        splits.push_back({{"members", s.members},
                          {"bits", std::vector<int>(s.cut.bits.begin(), s.cut.bits.end())},
                          {"cut", s.cut.value},
                          {"trace", s.trace}});
    }
    return {ArtifactKind::Labels,
            {{"method", method},
             {"clusters", clusters},
             {"ids", input.payload.at("ids")},
             {"labels", r.labels},
             {"splits", std::move(splits)},
             {"diagnostics", r.diagnostics}}};
}

StepOutput execute_train(const PlannedStep &step) {
    const auto &p = step.parameters;
    const auto method = p.at("method").get<std::string>();
    const auto &input = *step.inputs.at(0);
    const auto seed = p.at("seed").get<std::uint64_t>();
    const auto ids = input.payload.at("ids").get<std::vector<std::string>>();
    const auto points = points_of(input);
    if (method == "perceptron") {
        const auto &labels = *step.inputs.at(1);
        const auto label_ids = labels.payload.at("ids").get<std::vector<std::string>>();
        const auto values = labels.payload.at("labels").get<std::vector<int>>();
        std::map<std::string, int> by_id;
        for (std::size_t i = 0; i < label_ids.size(); ++i) by_id[label_ids[i]] = values.at(i);
        std::vector<LabeledPoint> data;
        for (std::size_t i = 0; i < ids.size(); ++i) {
            data.push_back({points.row(static_cast<Eigen::Index>(i)).transpose(), by_id.at(ids[i])});
        }
        PerceptronHyperparameters h;
        h.learning_rate = p.at("learningRate").get<double>();
        h.error_threshold = p.at("errorThreshold").get<double>();
        h.max_iterations = p.at("maxIterations").get<int>();
        const auto t = train_perceptron(data, h, seed);
        return {ArtifactKind::Model,
                {{"type", "perceptron"},
                 {"weights", std::vector<double>(t.model.weights.data(),
                                                 t.model.weights.data() + t.model.weights.size())},
                 {"bias", t.model.bias},
                 {"error", t.error},
                 {"iterations", t.iterations},
                 {"capped", t.capped},
                 {"trainingIds", ids}}};
    }
    AutoencoderOptions o;
    o.code_size = p.at("codeSize").get<int>();
    o.epochs = p.at("epochs").get<int>();
    o.learning_rate = p.at("learningRate").get<double>();
    o.init_scale = p.at("initScale").get<double>();
    o.seed = seed;
    const auto t = train_autoencoder(rows_of(points), o);
    auto payload = network_json(t.model.network);
    payload["type"] = "autoencoder";
    payload["activations"] = {"sigmoid", "identity"};
    payload["lossTrace"] = t.loss_trace;
    payload["trainingIds"] = ids;
    return {ArtifactKind::Model, std::move(payload)};
}

}  // namespace

PlannedStep plan_step(const Session &session, const StepRequest &request, std::uint64_t default_seed) {
    PlannedStep step;
    step.kind = request.kind;
    step.catalog = session.catalog_snapshot();
    const auto params = request.params.is_null() ? nlohmann::json::object() : request.params;
    Params p(params, std::string(to_string(request.kind)));
    p.unsigned_value("seed", default_seed);
    switch (request.kind) {
        case StepKind::Prepare: plan_selection(session, p, true); break;
        case StepKind::Encode: plan_selection(session, p, false); break;
        case StepKind::Embed: plan_embed(session, p, step); break;
        case StepKind::Cluster: plan_cluster(session, p, step); break;
        case StepKind::Train: plan_train(session, p, step); break;
    }
    p.finish();
    step.parameters = std::move(p.out);
    return step;
}

StepOutput execute_step(const PlannedStep &step) {
    try {
        switch (step.kind) {
            case StepKind::Prepare: return execute_prepare(step, false);
            case StepKind::Encode: return execute_prepare(step, true);
            case StepKind::Embed: return execute_embed(step);
            case StepKind::Cluster: return execute_cluster(step);
            case StepKind::Train: return execute_train(step);
        }
    } catch (const nlohmann::json::exception &e) {
        throw Error(ErrorCode::Malformed, std::string("artifact payload is malformed: ") + e.what());
    }
    throw Error(ErrorCode::InvalidArgument, "unknown step kind");
}

Provenance provenance_for(const PlannedStep &step) {
    Provenance p;
    p.operation = std::string(to_string(step.kind));
    p.parameters = step.parameters;
    for (const auto &in : step.inputs) p.inputs.push_back(in->id);
    p.created = utc_now();
    return p;
}

std::string run_step(Session &session, const StepRequest &request, std::uint64_t default_seed) {
    const auto step = plan_step(session, request, default_seed);
    JobRecord job;
    job.id = session.next_job_id();
    job.session = session.id();
    job.kind = std::string(to_string(step.kind));
    job.parameters = step.parameters;
    try {
        auto out = execute_step(step);
        job.artifact = session.commit(out.kind, provenance_for(step), std::move(out.payload));
        job.status = JobStatus::Done;
    } catch (const Error &e) {
        job.status = JobStatus::Failed;
        job.error = e.what();
        session.record_job(job);
        throw;
    }
    session.record_job(job);
    return job.artifact;
}

ReplayOutcome replay_artifact(const Session &session, std::string_view artifact_id) {
    const auto artifact = session.artifact(artifact_id);
    StepRequest request{parse_step_kind(artifact->provenance.operation), artifact->provenance.parameters};
    const auto step = plan_step(session, request);
    std::vector<std::string> inputs;
    for (const auto &in : step.inputs) inputs.push_back(in->id);
    if (inputs != artifact->provenance.inputs) {
        throw Error(ErrorCode::CorruptFile, "provenance inputs of '" + artifact->id + "' do not match its parameters",
                    artifact->id);
    }
    auto out = execute_step(step);
    ReplayOutcome outcome;
    outcome.identical = out.kind == artifact->kind && out.payload.dump() == artifact->payload.dump();
    outcome.payload = std::move(out.payload);
    return outcome;
}

}  // namespace qwb
