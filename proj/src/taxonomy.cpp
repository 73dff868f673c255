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

#include "qwb/taxonomy.hpp"

#include <nlohmann/json.hpp>

#include "qwb/error.hpp"
#include "qwb/formats.hpp"

namespace qwb {

namespace {

Error taxonomy_error(const std::string &message, const std::string &node) {
    return Error(ErrorCode::InvalidArgument, message + " (node '" + node + "')", node);
}

}  // namespace

Taxonomy::Taxonomy(std::string name, std::vector<TaxonomyNode> nodes)
    : name_(std::move(name)), nodes_(std::move(nodes)) {
    if (nodes_.empty()) {
        throw Error(ErrorCode::Malformed, "taxonomy '" + name_ + "' has no nodes", name_);
    }
    index_.reserve(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const auto &id = nodes_[i].id;
        if (id.empty()) {
            throw Error(ErrorCode::InvalidArgument, "taxonomy node at position " + std::to_string(i) + " has an empty id",
                        std::to_string(i));
        }
        if (!index_.emplace(id, i).second) {
            throw taxonomy_error("duplicate node id", id);
        }
    }

    parent_.assign(nodes_.size(), npos);
    std::size_t roots = 0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const auto &parent = nodes_[i].parent;
        if (!parent) {
            if (++roots > 1) {
                throw taxonomy_error("multiple roots", nodes_[i].id);
            }
            root_ = i;
            continue;
        }
        auto it = index_.find(*parent);
        if (it == index_.end()) {
            throw taxonomy_error("dangling parent reference '" + *parent + "'", nodes_[i].id);
        }
        parent_[i] = it->second;
    }

    // Walk every chain up to an already-resolved node; a node seen twice on
    // the current walk closes a cycle.
    enum : unsigned char { kUnseen, kOnPath, kDone };
    std::vector<unsigned char> state(nodes_.size(), kUnseen);
    depth_.assign(nodes_.size(), 0);
    std::vector<std::size_t> path;
    for (std::size_t start = 0; start < nodes_.size(); ++start) {
        path.clear();
        std::size_t cur = start;
        while (cur != npos && state[cur] == kUnseen) {
            state[cur] = kOnPath;
            path.push_back(cur);
            cur = parent_[cur];
        }
        if (cur != npos && state[cur] == kOnPath) {
            throw taxonomy_error("cycle detected", nodes_[cur].id);
        }
        std::size_t base = cur == npos ? 0 : depth_[cur] + 1;
        for (auto it = path.rbegin(); it != path.rend(); ++it) {
            if (parent_[*it] == npos) {
                depth_[*it] = 0;
                base = 1;
            } else {
                depth_[*it] = base++;
            }
            state[*it] = kDone;
        }
    }
    if (roots == 0) {
        // Unreachable: a forest of parent links without a root must contain a cycle.
        throw Error(ErrorCode::InvalidArgument, "taxonomy '" + name_ + "' has no root", name_);
    }
}

bool Taxonomy::contains(std::string_view id) const {
    return index_.find(std::string(id)) != index_.end();
}

std::size_t Taxonomy::index_of(std::string_view id) const {
    auto it = index_.find(std::string(id));
    if (it == index_.end()) {
        throw Error(ErrorCode::NotFound, "unknown node '" + std::string(id) + "' in taxonomy '" + name_ + "'",
                    std::string(id));
    }
    return it->second;
}

std::size_t Taxonomy::depth(std::string_view id) const { return depth_[index_of(id)]; }

std::size_t Taxonomy::lca_at(std::size_t a, std::size_t b) const {
    while (depth_[a] > depth_[b]) a = parent_[a];
    while (depth_[b] > depth_[a]) b = parent_[b];
    while (a != b) {
        a = parent_[a];
        b = parent_[b];
    }
    return a;
}

const std::string &Taxonomy::lowest_common_ancestor(std::string_view a, std::string_view b) const {
    return nodes_[lca_at(index_of(a), index_of(b))].id;
}

double Taxonomy::wu_palmer_at(std::size_t a, std::size_t b) const {
    if (a == b) return 1.0;
    const std::size_t common = depth_[lca_at(a, b)];
    const std::size_t l1 = depth_[a] - common;
    const std::size_t l2 = depth_[b] - common;
    return static_cast<double>(2 * common) / static_cast<double>(l1 + l2 + 2 * common);
}

double Taxonomy::wu_palmer(std::string_view a, std::string_view b) const {
    return wu_palmer_at(index_of(a), index_of(b));
}

Taxonomy parse_taxonomy(std::string_view document) {
    const nlohmann::json doc = parse_json_document(document);
    if (!doc.is_object() || !doc.contains("name") || !doc["name"].is_string() || !doc.contains("nodes") ||
        !doc["nodes"].is_array()) {
        throw Error(ErrorCode::Malformed, "taxonomy document needs a string 'name' and a 'nodes' array");
    }
    std::vector<TaxonomyNode> nodes;
    nodes.reserve(doc["nodes"].size());
    std::size_t position = 0;
    for (const auto &entry : doc["nodes"]) {
        const std::string where = "nodes[" + std::to_string(position++) + "]";
        if (!entry.is_object() || !entry.contains("id") || !entry["id"].is_string()) {
            throw Error(ErrorCode::Malformed, where + " needs a string 'id'", where);
        }
        TaxonomyNode node;
        node.id = entry["id"].get<std::string>();
        if (auto it = entry.find("label"); it != entry.end()) {
            if (!it->is_string()) throw Error(ErrorCode::Malformed, where + ".label must be a string", node.id);
            node.label = it->get<std::string>();
        } else {
            node.label = node.id;
        }
        if (auto it = entry.find("parent"); it != entry.end() && !it->is_null()) {
            if (!it->is_string()) throw Error(ErrorCode::Malformed, where + ".parent must be a string or null", node.id);
            node.parent = it->get<std::string>();
        }
        nodes.push_back(std::move(node));
    }
    return Taxonomy(doc["name"].get<std::string>(), std::move(nodes));
}

std::string serialize_taxonomy(const Taxonomy &taxonomy) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto &node : taxonomy.nodes()) {
        nodes.push_back({{"id", node.id},
                         {"label", node.label},
                         {"parent", node.parent ? nlohmann::json(*node.parent) : nlohmann::json(nullptr)}});
    }
    return nlohmann::json{{"name", taxonomy.name()}, {"nodes", std::move(nodes)}}.dump();
}

}  // namespace qwb
