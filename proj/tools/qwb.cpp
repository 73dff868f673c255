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

#include <cstdint>
#include <filesystem>
#include <functional>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "qwb/api.hpp"
#include "qwb/error.hpp"
#include "qwb/jobs.hpp"
#include "qwb/session.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitJobFailed = 2;

std::string read_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw qwb::Error(qwb::ErrorCode::NotFound, "cannot read file", path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void print_error(const qwb::Error &e) { std::cerr << qwb::error_body(e).dump() << "\n"; }

qwb::Session open_session(const std::string &path, bool create) {
    if (std::filesystem::exists(path)) return qwb::load_session(path);
    if (!create) throw qwb::Error(qwb::ErrorCode::NotFound, "session file does not exist", path);
    return qwb::Session(std::filesystem::path(path).stem().string());
}

// Collects only the flags the user actually passed; everything else takes
// the step's documented default.
struct ParamSink {
    nlohmann::json params = nlohmann::json::object();
    std::vector<std::function<void()>> writers;

    template <typename T>
    void add(CLI::App *app, const std::string &flag, const std::string &key, T &storage, const std::string &help) {
        auto *opt = app->add_option(flag, storage, help);
        writers.push_back([this, opt, key, &storage] {
            if (opt->count() > 0) params[key] = storage;
        });
    }
    void add_flag(CLI::App *app, const std::string &flag, const std::string &key, bool &storage,
                  const std::string &help) {
        auto *opt = app->add_flag(flag, storage, help);
        writers.push_back([this, opt, key, &storage] {
            if (opt->count() > 0) params[key] = storage;
        });
    }
    nlohmann::json collect() {
        for (auto &w : writers) w();
        return params;
    }
};

struct StepCommand {
    CLI::App *app = nullptr;
    qwb::StepKind kind = qwb::StepKind::Prepare;
    ParamSink sink;
};

int run_step_command(const std::string &session_path, std::uint64_t seed, bool sync, qwb::StepRequest request) {
    auto session = open_session(session_path, false);
    std::string artifact;
    if (sync) {
        const auto step = qwb::plan_step(session, request, seed);
        qwb::JobRecord job;
        job.id = session.next_job_id();
        job.session = session.id();
        job.kind = std::string(qwb::to_string(step.kind));
        job.parameters = step.parameters;
        try {
            auto out = qwb::execute_step(step);
            job.artifact = session.commit(out.kind, qwb::provenance_for(step), std::move(out.payload));
            job.status = qwb::JobStatus::Done;
            session.record_job(job);
        } catch (const std::exception &e) {
            job.status = qwb::JobStatus::Failed;
            job.error = e.what();
            session.record_job(job);
            qwb::save_session(session, session_path);
            std::cerr << qwb::job_to_json(job).dump() << "\n";
            return kExitJobFailed;
        }
        artifact = job.artifact;
        qwb::save_session(session, session_path);
    } else {
        auto slot = std::make_shared<qwb::SessionSlot>(std::move(session));
        qwb::JobRecord job;
        {
            qwb::JobManager jobs(1);
            const auto id = jobs.submit(slot, request, seed);
            std::cerr << "submitted " << id << "\n";
            job = jobs.wait(id);
        }
        qwb::save_session(slot->session, session_path);
        if (job.status == qwb::JobStatus::Failed) {
            std::cerr << qwb::job_to_json(job).dump() << "\n";
            return kExitJobFailed;
        }
        artifact = job.artifact;
    }
    const auto a = qwb::load_session(session_path).artifact(artifact);
    std::cout << nlohmann::json{{"artifact", a->id}, {"kind", qwb::to_string(a->kind)}}.dump() << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"qwb: taxonomy data workbench with classical and simulated variational kernels"};
    app.require_subcommand(1);
    std::string session_path;
    std::uint64_t seed = 0;
    bool sync = false;
    app.add_option("--session", session_path, "Session file");
    app.add_option("--seed", seed, "Seed for steps that do not set one");
    app.add_flag("--sync", sync, "Run steps inline instead of through the job queue");

    // ingest
    auto *ingest = app.add_subcommand("ingest", "Load taxonomies and entities into a session file");
    std::vector<std::string> taxonomy_files;
    std::string entity_file;
    std::vector<std::string> bindings;
    ingest->add_option("--taxonomy", taxonomy_files, "Taxonomy file (repeatable)");
    ingest->add_option("--entities", entity_file, "Entity file");
    ingest->add_option("--bind", bindings, "attribute=taxonomy binding (repeatable)");

    // steps
    StepCommand prepare{app.add_subcommand("prepare", "Build a distance matrix (or one-hot vectors) from a plan"),
                        qwb::StepKind::Prepare};
    std::string plan_file, entity_ids;
    std::size_t count = 0;
    bool one_hot = false;
    auto *plan_opt = prepare.app->add_option("--plan", plan_file, "Plan file")->required();
    auto *ids_opt = prepare.app->add_option("--entities", entity_ids, "Comma-separated entity ids");
    auto *count_opt = prepare.app->add_option("--count", count, "Random subset size (uses --seed)");
    prepare.app->add_flag("--one-hot", one_hot, "Produce one-hot vectors instead of a distance matrix");
    (void)plan_opt;

    StepCommand embed{app.add_subcommand("embed", "Embed a distance matrix or vectors"), qwb::StepKind::Embed};
    std::string e_input, e_method, e_init;
    int e_dims = 0, e_max_iter = 0, e_epochs = 0;
    double e_tol = 0, e_norm = 0, e_lr = 0, e_scale = 0;
    embed.sink.add(embed.app, "--input", "input", e_input, "Input artifact id");
    embed.sink.add(embed.app, "--method", "method", e_method, "mds | smacof | pca | autoencoder");
    embed.sink.add(embed.app, "--dimensions", "dimensions", e_dims, "Target dimension n");
    embed.sink.add(embed.app, "--max-iterations", "maxIterations", e_max_iter, "SMACOF iteration cap");
    embed.sink.add(embed.app, "--tolerance", "tolerance", e_tol, "SMACOF stress tolerance");
    embed.sink.add(embed.app, "--init", "init", e_init, "SMACOF start: random | classical");
    embed.sink.add(embed.app, "--norm-exponent", "normExponent", e_norm, "Norm p for reported stress");
    embed.sink.add(embed.app, "--epochs", "epochs", e_epochs, "Autoencoder epochs");
    embed.sink.add(embed.app, "--learning-rate", "learningRate", e_lr, "Autoencoder learning rate");
    embed.sink.add(embed.app, "--init-scale", "initScale", e_scale, "Autoencoder initial weight scale");

    StepCommand cluster{app.add_subcommand("cluster", "Cluster a distance matrix, embedding or vectors"),
                        qwb::StepKind::Cluster};
    std::string c_input, c_method, c_optimizer, c_entanglement;
    int c_clusters = 0, c_reps = 0, c_trials = 0, c_restarts = 0, c_starts = 0, c_max_iter = 0;
    double c_threshold = 0;
    bool c_sample = false;
    std::uint64_t c_shots = 0;
    cluster.sink.add(cluster.app, "--input", "input", c_input, "Input artifact id");
    cluster.sink.add(cluster.app, "--method", "method", c_method, "bruteforce | localsearch | qaoa | vqe | kmeans");
    cluster.sink.add(cluster.app, "--clusters", "clusters", c_clusters, "Cluster count (power of two for max-cut)");
    cluster.sink.add(cluster.app, "--reps", "reps", c_reps, "QAOA / ansatz repetitions");
    cluster.sink.add(cluster.app, "--max-trials", "maxTrials", c_trials, "Optimizer iteration cap");
    cluster.sink.add(cluster.app, "--optimizer", "optimizer", c_optimizer, "spsa | nelderMead | gradientDescent");
    cluster.sink.add(cluster.app, "--entanglement", "entanglement", c_entanglement, "linear | full | circular");
    cluster.sink.add(cluster.app, "--restarts", "restarts", c_restarts, "Local search restarts");
    cluster.sink.add(cluster.app, "--starts", "starts", c_starts, "VQE optimizer starts");
    cluster.sink.add(cluster.app, "--max-iterations", "maxIterations", c_max_iter, "k-means iteration cap");
    cluster.sink.add(cluster.app, "--edge-threshold", "edgeThreshold", c_threshold, "Drop lighter edges");
    cluster.sink.add_flag(cluster.app, "--sample-readout", "sampleReadout", c_sample, "Read QAOA answer from shots");
    cluster.sink.add(cluster.app, "--shots", "shots", c_shots, "Shots for sampled readout");

    StepCommand train{app.add_subcommand("train", "Train a perceptron or autoencoder"), qwb::StepKind::Train};
    std::string t_input, t_method, t_labels;
    double t_lr = 0, t_gamma = 0, t_scale = 0;
    int t_max_iter = 0, t_code = 0, t_epochs = 0;
    train.sink.add(train.app, "--input", "input", t_input, "Embedding or vectors artifact id");
    train.sink.add(train.app, "--method", "method", t_method, "perceptron | autoencoder");
    train.sink.add(train.app, "--labels", "labels", t_labels, "Labels artifact id (perceptron)");
    train.sink.add(train.app, "--learning-rate", "learningRate", t_lr, "Learning rate r");
    train.sink.add(train.app, "--error-threshold", "errorThreshold", t_gamma, "Perceptron error threshold");
    train.sink.add(train.app, "--max-iterations", "maxIterations", t_max_iter, "Perceptron iteration cap N");
    train.sink.add(train.app, "--code-size", "codeSize", t_code, "Autoencoder code size k");
    train.sink.add(train.app, "--epochs", "epochs", t_epochs, "Autoencoder epochs");
    train.sink.add(train.app, "--init-scale", "initScale", t_scale, "Autoencoder initial weight scale");

    // report / replay / show / serve
    auto *report = app.add_subcommand("report", "Export a pattern-candidate document");
    std::vector<std::string> report_ids;
    std::string report_out;
    report->add_option("artifacts", report_ids, "Artifact ids")->delimiter(',');
    report->add_option("--output", report_out, "Write to file instead of stdout");

    auto *replay = app.add_subcommand("replay", "Re-run an artifact's provenance and compare");
    std::string replay_id;
    replay->add_option("artifact", replay_id, "Artifact id")->required();

    auto *show = app.add_subcommand("show", "Print a session summary or one artifact as JSON");
    std::string show_id;
    show->add_option("artifact", show_id, "Artifact id");

    auto *serve = app.add_subcommand("serve", "Serve the HTTP API");
    std::string host = "127.0.0.1", storage = ".";
    int port = 8080;
    unsigned workers = 0;
    serve->add_option("--host", host, "Bind address");
    serve->add_option("--port", port, "Port");
    serve->add_option("--storage", storage, "Directory for saved sessions");
    serve->add_option("--workers", workers, "Job worker threads (0 = hardware)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitValidation;
    }

    try {
        const auto need_session = [&] {
            if (session_path.empty()) throw qwb::Error(qwb::ErrorCode::InvalidArgument, "--session is required");
        };
        if (*ingest) {
            need_session();
            auto session = open_session(session_path, true);
            for (const auto &file : taxonomy_files) session.add_taxonomy(qwb::parse_taxonomy(read_file(file)));
            std::map<std::string, std::string> bind;
            for (const auto &b : bindings) {
                const auto eq = b.find('=');
                if (eq == std::string::npos || eq == 0 || eq + 1 == b.size()) {
                    throw qwb::Error(qwb::ErrorCode::InvalidArgument, "--bind expects attribute=taxonomy", b);
                }
                bind[b.substr(0, eq)] = b.substr(eq + 1);
            }
            qwb::IngestReport result;
            if (!entity_file.empty()) result = session.ingest(read_file(entity_file), bind);
            qwb::save_session(session, session_path);
            auto out = qwb::report_to_json(result);
            out["entities"] = session.catalog().entities.size();
            out["taxonomies"] = session.catalog().taxonomies.size();
            std::cout << out.dump() << "\n";
            return kExitOk;
        }
        for (auto *step : {&prepare, &embed, &cluster, &train}) {
            if (!*step->app) continue;
            need_session();
            qwb::StepRequest request;
            request.kind = step->kind;
            request.params = step->sink.collect();
            if (step == &prepare) {
                if (one_hot) request.kind = qwb::StepKind::Encode;
                request.params["plan"] = qwb::plan_to_json(qwb::parse_plan(read_file(plan_file)));
                if (ids_opt->count() > 0) {
                    std::vector<std::string> ids;
                    std::stringstream ss(entity_ids);
                    for (std::string id; std::getline(ss, id, ',');) {
                        if (!id.empty()) ids.push_back(id);
                    }
                    request.params["entities"] = ids;
                }
                if (count_opt->count() > 0) request.params["count"] = count;
            }
            return run_step_command(session_path, seed, sync, std::move(request));
        }
        if (*report) {
            need_session();
            const auto session = qwb::load_session(session_path);
            const auto text = qwb::export_report(session, report_ids);
            if (report_out.empty()) {
                std::cout << text;
            } else {
                std::ofstream out(report_out, std::ios::binary);
                if (!out) throw qwb::Error(qwb::ErrorCode::InvalidArgument, "cannot write report", report_out);
                out << text;
            }
            return kExitOk;
        }
        if (*replay) {
            need_session();
            const auto session = qwb::load_session(session_path);
            const auto outcome = qwb::replay_artifact(session, replay_id);
            std::cout << nlohmann::json{{"artifact", replay_id}, {"identical", outcome.identical}}.dump() << "\n";
            return outcome.identical ? kExitOk : kExitJobFailed;
        }
        if (*show) {
            need_session();
            const auto session = qwb::load_session(session_path);
            const auto out = show_id.empty() ? qwb::session_summary(session)
                                             : qwb::artifact_to_json(*session.artifact(show_id));
            std::cout << out.dump(2) << "\n";
            return kExitOk;
        }
        if (*serve) {
            qwb::ServiceOptions options;
            options.storage_dir = storage;
            options.workers = workers;
            options.default_seed = seed;
            options.synchronous = sync;
            qwb::ApiService service(options);
            qwb::HttpServer server(service);
            std::cerr << "listening on " << host << ":" << port << "\n";
            return server.listen(host, port) ? kExitOk : kExitValidation;
        }
    } catch (const qwb::Error &e) {
        print_error(e);
        return kExitValidation;
    } catch (const nlohmann::json::exception &e) {
        print_error(qwb::Error(qwb::ErrorCode::Malformed, e.what()));
        return kExitValidation;
    }
    return kExitValidation;
}
