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
#include <cstdio>
#include <deque>
#include <set>
#include <sstream>

#include "qwb/error.hpp"
#include "qwb/session.hpp"

namespace qwb {

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string percent(std::size_t part, std::size_t whole) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f%%", whole == 0 ? 0.0 : 100.0 * static_cast<double>(part) / whole);
    return buf;
}

std::string join(const std::vector<std::string> &items, const char *sep = ", ") {
    std::string out;
    for (const auto &s : items) out += (out.empty() ? "" : sep) + s;
    return out;
}

// Nearest ancestor-or-self produced by prepare or encode, which carries the plan.
std::shared_ptr<const Artifact> plan_source(const Session &session, const Artifact &start) {
    std::deque<std::string> queue{start.id};
    std::set<std::string> seen;
    while (!queue.empty()) {
        const auto id = queue.front();
        queue.pop_front();
        if (!seen.insert(id).second || !session.has_artifact(id)) continue;
        const auto a = session.artifact(id);
        if (a->provenance.parameters.contains("plan")) return a;
        for (const auto &in : a->provenance.inputs) queue.push_back(in);
    }
    return nullptr;
}

std::vector<std::string> ancestry(const Session &session, const std::vector<std::string> &ids) {
    // Inputs first, each artifact once, in commit order.
    std::set<std::string> wanted;
    std::deque<std::string> queue(ids.begin(), ids.end());
    while (!queue.empty()) {
        const auto id = queue.front();
        queue.pop_front();
        if (!wanted.insert(id).second) continue;
        for (const auto &in : session.artifact(id)->provenance.inputs) queue.push_back(in);
    }
    std::vector<std::string> ordered;
    for (const auto &a : session.artifacts()) {
        if (wanted.contains(a->id)) ordered.push_back(a->id);
    }
    return ordered;
}

std::string node_text(const Catalog &cat, const std::string &taxonomy, const std::string &node) {
    const auto it = cat.taxonomies.find(taxonomy);
    if (it == cat.taxonomies.end() || !it->second.contains(node)) return node;
    const auto &label = it->second.nodes()[it->second.index_of(node)].label;
    return label == node ? node : node + " (" + label + ")";
}

void plan_section(std::ostringstream &os, const PreparationPlan &plan) {
    os << "- Digest: `" << plan_digest(plan) << "`\n";
    os << "- Aggregator: " << to_string(plan.aggregator) << "\n";
    os << "- Transformer: " << to_string(plan.transformer) << "\n\n";
    os << "| Attribute | Taxonomy | Element comparer | Attribute comparer | Empty values |\n";
    os << "|---|---|---|---|---|\n";
    for (const auto &a : plan.attributes) {
        os << "| " << a.name << " | " << a.taxonomy << " | " << to_string(a.element_comparer) << " | "
           << to_string(a.attribute_comparer) << " | " << to_string(a.empty_action) << " |\n";
    }
    os << "\n";
}

void matrix_section(std::ostringstream &os, const Artifact &a) {
    const auto d = distance_matrix_from_payload(a);
    const auto n = d.values.rows();
    double lo = 0.0, hi = 0.0, sum = 0.0;
    std::size_t pairs = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double v = d.values(i, j);
            lo = pairs == 0 ? v : std::min(lo, v);
            hi = pairs == 0 ? v : std::max(hi, v);
            sum += v;
            ++pairs;
        }
    }
    os << "- Entities: " << n << " (" << join(d.ids) << ")\n";
    if (pairs > 0) {
        os << "- Distance min / mean / max: " << fmt(lo) << " / " << fmt(sum / static_cast<double>(pairs)) << " / "
           << fmt(hi) << "\n";
    }
    os << "- Transformer: " << a.payload.value("transformer", "") << "\n";
    os << "- Pairs without a comparable attribute: " << a.payload.at("emptyPairs").size() << "\n\n";
}

void labels_section(std::ostringstream &os, const Session &session, const Artifact &a) {
    const auto ids = a.payload.at("ids").get<std::vector<std::string>>();
    const auto labels = a.payload.at("labels").get<std::vector<int>>();
    const int clusters = a.payload.at("clusters").get<int>();
    os << "- Method: " << a.payload.at("method").get<std::string>() << "\n";
    os << "- Clusters: " << clusters << "\n";
    if (a.payload.contains("splits")) {
        std::vector<std::string> cuts;
        for (const auto &s : a.payload.at("splits")) cuts.push_back(fmt(s.at("cut").get<double>()));
        os << "- Cut value per split: " << join(cuts) << "\n";
    }
    if (a.payload.contains("inertia")) os << "- Inertia: " << fmt(a.payload.at("inertia").get<double>()) << "\n";
    for (const auto &d : a.payload.value("diagnostics", nlohmann::json::array())) {
        os << "- Note: " << d.get<std::string>() << "\n";
    }
    os << "\n";

    const auto source = plan_source(session, a);
    std::optional<PreparationPlan> plan;
    if (source) plan = plan_from_json(source->provenance.parameters.at("plan"));
    const auto &cat = session.catalog();
    for (int c = 0; c < clusters; ++c) {
        std::vector<std::string> members;
        for (std::size_t i = 0; i < ids.size(); ++i) {
            if (labels[i] == c) members.push_back(ids[i]);
        }
        os << "### Cluster " << c << " (" << members.size() << " entities)\n\n";
        os << "Members: " << (members.empty() ? "none" : join(members)) << "\n\n";
        if (!plan) {
            os << "No preparation plan in the provenance; attribute frequencies unavailable.\n\n";
            continue;
        }
        if (members.empty()) continue;
        os << "| Attribute | Value | Count | Share |\n|---|---|---|---|\n";
        for (const auto &sel : plan->attributes) {
            std::map<std::string, std::size_t> counts;
            for (const auto &id : members) {
                if (!cat.entities.contains(id)) continue;
                for (const auto &v : cat.entities.get(id).values(sel.name)) ++counts[v];
            }
            std::vector<std::pair<std::string, std::size_t>> rows(counts.begin(), counts.end());
            std::stable_sort(rows.begin(), rows.end(), [](const auto &x, const auto &y) { return x.second > y.second; });
            for (const auto &[value, count] : rows) {
                os << "| " << sel.name << " | " << node_text(cat, sel.taxonomy, value) << " | " << count << " | "
                   << percent(count, members.size()) << " |\n";
            }
        }
        os << "\n";
    }
}

void embedding_section(std::ostringstream &os, const Artifact &a) {
    os << "- Method: " << a.payload.at("method").get<std::string>() << "\n";
    os << "- Points: " << a.payload.at("ids").size() << "\n";
    os << "- Dimensions: " << a.payload.at("dimensions").get<int>() << "\n";
    if (a.payload.contains("stress")) os << "- Stress: " << fmt(a.payload.at("stress").get<double>()) << "\n";
    if (const int clamped = a.payload.value("clampedEigenvalues", 0); clamped > 0) {
        os << "- Negative eigenvalues clamped: " << clamped << "\n";
    }
    if (a.payload.contains("lossTrace") && !a.payload.at("lossTrace").empty()) {
        os << "- Final reconstruction loss: " << fmt(a.payload.at("lossTrace").back().get<double>()) << "\n";
    }
    os << "\n";
}

void model_section(std::ostringstream &os, const Artifact &a) {
    const auto type = a.payload.at("type").get<std::string>();
    os << "- Type: " << type << "\n";
    if (type == "perceptron") {
        os << "- Training error: " << fmt(a.payload.at("error").get<double>()) << "\n";
        os << "- Updates: " << a.payload.at("iterations").get<int>() << "\n";
        os << "- Stopped by iteration cap: " << (a.payload.at("capped").get<bool>() ? "yes" : "no") << "\n";
    } else {
        std::vector<std::string> sizes;
        for (const auto &s : a.payload.at("layerSizes")) sizes.push_back(std::to_string(s.get<int>()));
        os << "- Layers: " << join(sizes, " -> ") << "\n";
        os << "- Final reconstruction loss: " << fmt(a.payload.at("lossTrace").back().get<double>()) << "\n";
    }
    os << "\n";
}

}  // namespace

std::string export_report(const Session &session, const std::vector<std::string> &artifact_ids) {
    if (artifact_ids.empty()) throw Error(ErrorCode::InvalidArgument, "report needs at least one artifact");
    std::vector<std::shared_ptr<const Artifact>> artifacts;
    for (const auto &id : artifact_ids) artifacts.push_back(session.artifact(id));

    std::ostringstream os;
    os << "# Pattern candidate\n\n";
    os << "Session `" << session.id() << "`" << (session.name().empty() ? "" : " (" + session.name() + ")") << "\n\n";
    os << "Artifacts: " << join(artifact_ids) << "\n\n";

    std::map<std::string, PreparationPlan> plans;
    for (const auto &a : artifacts) {
        if (const auto source = plan_source(session, *a)) {
            auto plan = plan_from_json(source->provenance.parameters.at("plan"));
            plans.emplace(plan_digest(plan), std::move(plan));
        }
    }
    os << "## Preparation plan" << (plans.size() == 1 ? "" : "s") << "\n\n";
    if (plans.empty()) os << "None recorded.\n\n";
    for (const auto &[digest, plan] : plans) plan_section(os, plan);

    for (const auto &a : artifacts) {
        os << "## Artifact " << a->id << " (" << to_string(a->kind) << ")\n\n";
        switch (a->kind) {
            case ArtifactKind::DistanceMatrix: matrix_section(os, *a); break;
            case ArtifactKind::Vectors:
                os << "- Rows: " << a->payload.at("ids").size() << "\n- Columns: " << a->payload.at("columns").size()
                   << "\n\n";
                break;
            case ArtifactKind::Embedding: embedding_section(os, *a); break;
            case ArtifactKind::Labels: labels_section(os, session, *a); break;
            case ArtifactKind::Model: model_section(os, *a); break;
        }
    }

    os << "## Provenance\n\n";
    for (const auto &id : ancestry(session, artifact_ids)) {
        const auto a = session.artifact(id);
        const auto &p = a->provenance;
        os << "### " << a->id << "\n\n";
        os << "- Operation: " << p.operation << "\n";
        os << "- Inputs: " << (p.inputs.empty() ? "none" : join(p.inputs)) << "\n";
        os << "- Created: " << p.created << "\n";
        os << "- Parameters: `" << p.parameters.dump() << "`\n\n";
    }
    return os.str();
}

nlohmann::json entity_table(const Session &session, std::string_view artifact_id) {
    const auto a = session.artifact(artifact_id);
    const char *key = a->payload.contains("ids") ? "ids" : "trainingIds";
    if (!a->payload.contains(key)) {
        throw Error(ErrorCode::Precondition, "artifact '" + a->id + "' lists no entities", a->id);
    }
    const auto ids = a->payload.at(key).get<std::vector<std::string>>();
    std::vector<int> labels;
    if (a->kind == ArtifactKind::Labels) labels = a->payload.at("labels").get<std::vector<int>>();

    const auto source = plan_source(session, *a);
    std::optional<PreparationPlan> plan;
    if (source) plan = plan_from_json(source->provenance.parameters.at("plan"));
    const auto &cat = session.catalog();

    nlohmann::json attributes = nlohmann::json::array();
    if (plan) {
        for (const auto &sel : plan->attributes) attributes.push_back(sel.name);
    }
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < ids.size(); ++i) {
        const auto &entity = cat.entities.get(ids[i]);
        nlohmann::json values = nlohmann::json::object();
        const auto add = [&](const std::string &name, const std::string &taxonomy) {
            nlohmann::json list = nlohmann::json::array();
            const auto tax = cat.taxonomies.find(taxonomy);
            for (const auto &v : entity.values(name)) {
                std::string label = v;
                if (tax != cat.taxonomies.end() && tax->second.contains(v)) {
                    label = tax->second.nodes()[tax->second.index_of(v)].label;
                }
                list.push_back({{"id", v}, {"label", label}});
            }
            values[name] = std::move(list);
        };
        if (plan) {
            for (const auto &sel : plan->attributes) add(sel.name, sel.taxonomy);
        } else {
            for (const auto &[name, v] : entity.attributes) add(name, name);
        }
        nlohmann::json row{{"id", entity.id}, {"references", entity.references}, {"attributes", std::move(values)}};
        if (!labels.empty()) row["cluster"] = labels.at(i);
        rows.push_back(std::move(row));
    }
    return {{"artifact", a->id}, {"kind", to_string(a->kind)}, {"attributes", std::move(attributes)},
            {"rows", std::move(rows)}};
}

}  // namespace qwb
