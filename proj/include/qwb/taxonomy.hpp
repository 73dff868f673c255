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

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace qwb {

struct TaxonomyNode {
    std::string id;
    std::string label;
    std::optional<std::string> parent;
};

/// A rooted, immutable tree of categorical values.
///
/// Node ids are matched case-sensitively; labels are for display only.
/// Construction validates the tree (single root, no cycles, unique ids, no
/// dangling parents) and precomputes parent indices and depths, so every
/// query below is a pure read and safe to share across threads.
class Taxonomy {
  public:
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    /// Throws qwb::Error naming the offending node id on any violation.
    Taxonomy(std::string name, std::vector<TaxonomyNode> nodes);

    const std::string &name() const noexcept { return name_; }
    const std::vector<TaxonomyNode> &nodes() const noexcept { return nodes_; }
    std::size_t size() const noexcept { return nodes_.size(); }
    const std::string &root() const { return nodes_[root_].id; }

    bool contains(std::string_view id) const;
    /// Position of `id` in file order; throws NotFound for unknown ids.
    std::size_t index_of(std::string_view id) const;

    /// Number of edges from the root; depth(root) == 0.
    std::size_t depth(std::string_view id) const;
    /// Deepest node that is an ancestor-or-self of both nodes.
    const std::string &lowest_common_ancestor(std::string_view a, std::string_view b) const;
    /// 2*L3 / (L1 + L2 + 2*L3) with L3 the depth of the lowest common
    /// ancestor and L1, L2 the remaining path lengths. Identical nodes
    /// (including root with root) have similarity exactly 1.
    double wu_palmer(std::string_view a, std::string_view b) const;

    // Index-based forms of the queries above, for hot loops.
    std::size_t depth_at(std::size_t index) const { return depth_[index]; }
    std::size_t parent_at(std::size_t index) const { return parent_[index]; }
    std::size_t lca_at(std::size_t a, std::size_t b) const;
    double wu_palmer_at(std::size_t a, std::size_t b) const;

  private:
    std::string name_;
    std::vector<TaxonomyNode> nodes_;
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<std::size_t> parent_;
    std::vector<std::size_t> depth_;
    std::size_t root_ = 0;
};

/// Parses the JSON taxonomy document
/// `{"name": ..., "nodes": [{"id", "label", "parent": id|null}, ...]}`.
Taxonomy parse_taxonomy(std::string_view document);
std::string serialize_taxonomy(const Taxonomy &taxonomy);

}  // namespace qwb
