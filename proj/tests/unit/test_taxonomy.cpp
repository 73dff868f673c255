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

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <vector>

#include "qwb/error.hpp"
#include "qwb/taxonomy.hpp"
#include "support.hpp"

using qwb::ErrorCode;
using qwb::Taxonomy;
using qwb::TaxonomyNode;

namespace {

ErrorCode code_of(const std::string &doc) {
    try {
        qwb::parse_taxonomy(doc);
    } catch (const qwb::Error &e) {
        return e.code();
    }
    ADD_FAILURE() << "no error for " << doc;
    return ErrorCode::Numerical;
}

std::string context_of(const std::string &doc) {
    try {
        qwb::parse_taxonomy(doc);
    } catch (const qwb::Error &e) {
        return e.context();
    }
    return "";
}

// Ancestor path root..node by walking parents.
std::vector<std::size_t> path_to_root(const Taxonomy &t, std::size_t i) {
    std::vector<std::size_t> path{i};
    while (t.depth_at(path.back()) > 0) path.push_back(t.parent_at(path.back()));
    std::reverse(path.begin(), path.end());
    return path;
}

std::size_t lca_by_paths(const Taxonomy &t, std::size_t a, std::size_t b) {
    const auto pa = path_to_root(t, a), pb = path_to_root(t, b);
    std::size_t k = 0;
    while (k + 1 < pa.size() && k + 1 < pb.size() && pa[k + 1] == pb[k + 1]) ++k;
    return pa[k];
}

Taxonomy random_tree(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<TaxonomyNode> nodes{{"n0", "n0", std::nullopt}};
    for (std::size_t i = 1; i < n; ++i) {
        std::uniform_int_distribution<std::size_t> pick(0, i - 1);
        nodes.push_back({"n" + std::to_string(i), "", "n" + std::to_string(pick(rng))});
    }
    std::shuffle(nodes.begin(), nodes.end(), rng);
    return Taxonomy("random", nodes);
}

}  // namespace

TEST(taxonomy, minimal_tree) {
    const auto t = qwb::parse_taxonomy(R"({"name":"t","nodes":[{"id":"root","parent":null},{"id":"A","parent":"root"}]})");
    EXPECT_EQ(t.size(), 2u);
    EXPECT_EQ(t.root(), "root");
    EXPECT_EQ(t.depth("A"), 1u);
    EXPECT_EQ(t.nodes()[0].label, "root");
}

TEST(taxonomy, two_cycle_names_a_member) {
    const std::string doc =
        R"({"name":"t","nodes":[{"id":"r","parent":null},{"id":"A","parent":"B"},{"id":"B","parent":"A"}]})";
    EXPECT_EQ(code_of(doc), ErrorCode::InvalidArgument);
    const auto ctx = context_of(doc);
    EXPECT_TRUE(ctx == "A" || ctx == "B") << ctx;
}

TEST(taxonomy, structural_errors_name_the_node) {
    EXPECT_EQ(context_of(R"({"name":"t","nodes":[{"id":"r","parent":null},{"id":"x","parent":null}]})"), "x");
    EXPECT_EQ(context_of(R"({"name":"t","nodes":[{"id":"r","parent":null},{"id":"r","parent":"r"}]})"), "r");
    EXPECT_EQ(context_of(R"({"name":"t","nodes":[{"id":"r","parent":null},{"id":"a","parent":"ghost"}]})"), "a");
    EXPECT_EQ(code_of(R"({"name":"t","nodes":[]})"), ErrorCode::Malformed);
    EXPECT_EQ(code_of(R"({"name":"t","nodes":[{"id":"","parent":null}]})"), ErrorCode::InvalidArgument);
    EXPECT_EQ(code_of(R"({"name":"t","nodes":[{"id":"a","parent":"b"},{"id":"b","parent":"a"}]})"),
              ErrorCode::InvalidArgument);
    EXPECT_EQ(code_of(R"({"name":"t","nodes":[)"), ErrorCode::Malformed);
    EXPECT_EQ(code_of(R"([1,2])"), ErrorCode::Malformed);
}

TEST(taxonomy, syntax_error_reports_line) {
    EXPECT_EQ(context_of("{\n  \"name\": \"t\",\n  \"nodes\": [,]\n}"), "line 3, column 13");
}

TEST(taxonomy, clothing_fixture_depths) {
    const auto t = qwb_test::clothing();
    EXPECT_EQ(t.root(), "clothing");
    EXPECT_EQ(t.depth("clothing"), 0u);
    EXPECT_EQ(t.depth("main_garment"), 1u);
    EXPECT_EQ(t.depth("short_pants"), 4u);
    EXPECT_EQ(t.depth("swimming_shorts"), 6u);
    EXPECT_EQ(t.depth("cycling_shorts"), 5u);
}

TEST(taxonomy, lowest_common_ancestor_examples) {
    const auto t = qwb_test::clothing();
    EXPECT_EQ(t.lowest_common_ancestor("swimming_shorts", "cycling_shorts"), "short_pants");
    EXPECT_EQ(t.lowest_common_ancestor("jacket", "jacket"), "jacket");
    for (const auto &n : t.nodes()) EXPECT_EQ(t.lowest_common_ancestor("clothing", n.id), "clothing");
    EXPECT_EQ(t.lowest_common_ancestor("shirt", "long_pants"), "main_garment");
}

TEST(taxonomy, wu_palmer_examples) {
    const auto t = qwb_test::clothing();
    EXPECT_NEAR(t.wu_palmer("swimming_shorts", "cycling_shorts"), 8.0 / 11.0, 1e-12);
    EXPECT_EQ(t.wu_palmer("clothing", "clothing"), 1.0);
    EXPECT_EQ(t.wu_palmer("jacket", "jacket"), 1.0);
    EXPECT_EQ(t.wu_palmer("clothing", "swimming_shorts"), 0.0);
}

TEST(taxonomy, unknown_nodes_are_not_found) {
    const auto t = qwb_test::clothing();
    try {
        t.wu_palmer("jacket", "kilt");
        FAIL();
    } catch (const qwb::Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::NotFound);
        EXPECT_EQ(e.context(), "kilt");
    }
    EXPECT_THROW(t.depth("Jacket"), qwb::Error);
}

TEST(taxonomy, lca_matches_path_intersection_oracle) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto t = random_tree(1 + seed * 2 + 11, seed);
        for (std::size_t a = 0; a < t.size(); ++a) {
            for (std::size_t b = 0; b < t.size(); ++b) {
                ASSERT_EQ(t.lca_at(a, b), lca_by_paths(t, a, b)) << "seed " << seed;
            }
        }
    }
}

TEST(taxonomy, wu_palmer_properties) {
    const auto t = random_tree(50, 99);
    const auto root = t.index_of(t.root());
    for (std::size_t a = 0; a < t.size(); ++a) {
        EXPECT_EQ(t.lca_at(a, root), root);
        for (std::size_t b = 0; b < t.size(); ++b) {
            const double w = t.wu_palmer_at(a, b);
            EXPECT_EQ(w, t.wu_palmer_at(b, a));
            EXPECT_GE(w, 0.0);
            EXPECT_LE(w, 1.0);
            EXPECT_EQ(w == 1.0, a == b);
            EXPECT_LE(t.depth_at(t.lca_at(a, b)), std::min(t.depth_at(a), t.depth_at(b)));
        }
    }
}

TEST(taxonomy, serialize_round_trip) {
    const auto t = qwb_test::clothing();
    const auto again = qwb::parse_taxonomy(qwb::serialize_taxonomy(t));
    EXPECT_EQ(qwb::serialize_taxonomy(again), qwb::serialize_taxonomy(t));
    EXPECT_EQ(again.size(), t.size());
}
