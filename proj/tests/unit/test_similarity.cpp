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

#include <cmath>

#include "qwb/error.hpp"
#include "qwb/similarity.hpp"
#include "support.hpp"

using namespace qwb;

namespace {

Entity entity(std::string id, std::vector<std::string> clothing, std::vector<std::string> color = {}) {
    Entity e;
    e.id = std::move(id);
    if (!clothing.empty()) e.attributes["clothing"] = std::move(clothing);
    if (!color.empty()) e.attributes["color"] = std::move(color);
    normalize(e);
    return e;
}

PreparationPlan plan(std::initializer_list<const char *> attributes,
                     EmptyAttributeAction action = EmptyAttributeAction::Ignore) {
    PreparationPlan p;
    for (const char *a : attributes) p.attributes.push_back({a, a, ElementComparer::WuPalmer,
                                                            AttributeComparer::SymMaxMean, action});
    return p;
}

// Direct evaluation of the symmetric max-mean over explicit pairs.
double sym_max_mean_oracle(const Taxonomy &t, const std::vector<std::string> &a, const std::vector<std::string> &b) {
    double left = 0.0, right = 0.0;
    for (const auto &x : a) {
        double best = 0.0;
        for (const auto &y : b) best = std::max(best, t.wu_palmer(x, y));
        left += best;
    }
    for (const auto &y : b) {
        double best = 0.0;
        for (const auto &x : a) best = std::max(best, t.wu_palmer(x, y));
        right += best;
    }
    return 0.5 * (left / a.size() + right / b.size());
}

}  // namespace

TEST(similarity, set_similarity_examples) {
    const auto t = qwb_test::clothing();
    const std::vector<std::string> a{"swimming_shorts"}, b{"cycling_shorts", "swimming_shorts"};
    EXPECT_NEAR(set_similarity_sym_max_mean(t, a, b), 41.0 / 44.0, 1e-12);
    EXPECT_EQ(set_similarity_sym_max_mean(t, b, b), 1.0);
    const std::vector<std::string> shirt{"shirt"}, jacket{"jacket"};
    EXPECT_DOUBLE_EQ(set_similarity_sym_max_mean(t, shirt, jacket), t.wu_palmer("shirt", "jacket"));
}

TEST(similarity, set_similarity_matches_oracle) {
    const auto t = qwb_test::clothing();
    std::vector<std::string> ids;
    for (const auto &n : t.nodes()) ids.push_back(n.id);
    std::sort(ids.begin(), ids.end());
    for (std::size_t i = 0; i < ids.size(); ++i) {
        for (std::size_t j = 0; j + 1 < ids.size(); ++j) {
            std::vector<std::string> a{ids[i]}, b{ids[j], ids[j + 1]};
            EXPECT_NEAR(set_similarity_sym_max_mean(t, a, b), sym_max_mean_oracle(t, a, b), 1e-15);
        }
    }
}

TEST(similarity, set_similarity_rejects_empty) {
    const auto t = qwb_test::clothing();
    const std::vector<std::string> none, one{"shirt"};
    EXPECT_THROW(set_similarity_sym_max_mean(t, none, one), Error);
    const std::vector<std::string> bad{"kilt"};
    EXPECT_THROW(set_similarity_sym_max_mean(t, bad, one), Error);
}

TEST(similarity, tuple_similarity_examples) {
    const auto tax = qwb_test::fixture_taxonomies();
    const auto x = entity("x", {"swimming_shorts"}, {"blue"});
    const auto y = entity("y", {"cycling_shorts"}, {"blue"});
    // sigma_clothing = 8/11, sigma_color = 1.
    EXPECT_NEAR(tuple_similarity(plan({"clothing", "color"}), tax, x, y).value, 19.0 / 22.0, 1e-12);
    EXPECT_NEAR(tuple_similarity(plan({"clothing"}), tax, x, y).value, 8.0 / 11.0, 1e-12);
    EXPECT_EQ(tuple_similarity(plan({"clothing", "color"}), tax, x, x).value, 1.0);
}

TEST(similarity, empty_attribute_actions) {
    const auto tax = qwb_test::fixture_taxonomies();
    const auto x = entity("x", {"shirt"});
    const auto y = entity("y", {"shirt"}, {"red"});
    const auto z = entity("z", {"jacket"});
    auto ignore = tuple_similarity(plan({"clothing", "color"}), tax, x, y);
    EXPECT_EQ(ignore.value, 1.0);
    EXPECT_EQ(ignore.attributes_used, 1u);
    auto strict = tuple_similarity(plan({"clothing", "color"}, EmptyAttributeAction::AsMaxDistance), tax, x, y);
    EXPECT_EQ(strict.value, 0.5);
    auto both_empty = tuple_similarity(plan({"color"}, EmptyAttributeAction::AsMaxDistance), tax, x, z);
    EXPECT_EQ(both_empty.value, 1.0);
    auto dropped = tuple_similarity(plan({"color"}), tax, x, z);
    EXPECT_EQ(dropped.value, 1.0);
    EXPECT_EQ(dropped.attributes_used, 0u);
}

TEST(similarity, tuple_similarity_is_monotone) {
    const auto tax = qwb_test::fixture_taxonomies();
    const auto base = entity("b", {"shirt"}, {"red"});
    const auto far = entity("f", {"swimming_shorts"}, {"red"});
    const auto near = entity("n", {"jacket"}, {"red"});
    const auto p = plan({"clothing", "color"});
    EXPECT_LE(tuple_similarity(p, tax, base, far).value, tuple_similarity(p, tax, base, near).value);
}

TEST(similarity, distance_transform_examples) {
    EXPECT_EQ(similarity_to_distance(1.0, Transformer::SquareInverse), 0.0);
    EXPECT_NEAR(similarity_to_distance(0.0, Transformer::SquareInverse), std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(similarity_to_distance(8.0 / 11.0, Transformer::SquareInverse), std::sqrt(6.0 / 11.0), 1e-12);
    EXPECT_NEAR(similarity_to_distance(0.25, Transformer::LinearInverse), 0.75, 1e-15);
    EXPECT_THROW(similarity_to_distance(1.5, Transformer::SquareInverse), Error);
    EXPECT_THROW(similarity_to_distance(-0.1, Transformer::LinearInverse), Error);
    double previous = similarity_to_distance(0.0, Transformer::SquareInverse);
    for (int k = 1; k <= 100; ++k) {
        const double d = similarity_to_distance(k / 100.0, Transformer::SquareInverse);
        EXPECT_LT(d, previous);
        previous = d;
    }
}

TEST(similarity, plan_validation) {
    const auto tax = qwb_test::fixture_taxonomies();
    EXPECT_NO_THROW(validate(plan({"clothing", "color"}), tax));
    EXPECT_THROW(validate(plan({}), tax), Error);
    EXPECT_THROW(validate(plan({"clothing", "clothing"}), tax), Error);
    try {
        validate(plan({"material"}), tax);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::NotFound);
    }
    EXPECT_EQ(plan_digest(plan({"clothing"})), plan_digest(plan({"clothing"})));
    EXPECT_NE(plan_digest(plan({"clothing"})), plan_digest(plan({"color"})));
    EXPECT_EQ(plan_digest(plan({"clothing"})).size(), 16u);
    EXPECT_EQ(parse_transformer("linearInverse"), Transformer::LinearInverse);
    EXPECT_THROW(parse_transformer("cubic"), Error);
}

TEST(similarity, build_matrices_examples) {
    const auto tax = qwb_test::fixture_taxonomies();
    EntityStore store;
    store.add(entity("a", {"shirt"}, {"red"}));
    store.add(entity("b", {"shirt"}, {"red"}));
    store.add(entity("c", {"swimming_shorts"}, {"blue"}));
    const auto p = plan({"clothing", "color"});

    const auto one = build_matrices(p, tax, {{"a"}}, store);
    EXPECT_EQ(one.similarity.values(0, 0), 1.0);
    EXPECT_EQ(one.distance.values(0, 0), 0.0);

    const auto m = build_matrices(p, tax, {{"a", "b", "c"}}, store);
    EXPECT_EQ(m.distance.values(0, 1), 0.0);
    // shirt/swimming_shorts meet at depth 1: omega = 2/9; colors share only the root.
    EXPECT_NEAR(m.distance.values(0, 2), 4.0 / 3.0, 1e-15);
    EXPECT_NEAR(m.distance.values(1, 2), 4.0 / 3.0, 1e-15);
    const auto colors = build_matrices(plan({"color"}), tax, {{"a", "c"}}, store);
    EXPECT_NEAR(colors.distance.values(0, 1), std::sqrt(2.0), 1e-15);
    EXPECT_NO_THROW(validate(m.distance));
    EXPECT_EQ(m.distance.ids, (std::vector<std::string>{"a", "b", "c"}));
    EXPECT_EQ(m.distance.provenance.plan_digest, plan_digest(p));
}

TEST(similarity, selection_rules) {
    EntityStore store;
    for (int i = 0; i < 10; ++i) store.add(entity("e" + std::to_string(i), {"shirt"}));
    EntitySelection random;
    random.count = 4;
    random.seed = 7;
    const auto first = resolve_selection(random, store);
    EXPECT_EQ(first.size(), 4u);
    EXPECT_EQ(first, resolve_selection(random, store));
    EXPECT_TRUE(std::is_sorted(first.begin(), first.end()));
    random.count = 11;
    EXPECT_THROW(resolve_selection(random, store), Error);
    EXPECT_THROW(resolve_selection({{"e1", "nobody"}}, store), Error);
    EXPECT_THROW(resolve_selection({{"e1", "e1"}}, store), Error);
    EXPECT_EQ(resolve_selection({{"e3", "e1"}}, store), (std::vector<std::string>{"e3", "e1"}));
    EXPECT_THROW(store.add(entity("e1", {"shirt"})), Error);
}

TEST(similarity, matrix_invariants_on_fixture) {
    const auto tax = qwb_test::fixture_taxonomies();
    EntityStore store;
    const std::vector<std::string> nodes{"shirt", "jacket", "swimming_shorts", "cycling_shorts", "long_pants"};
    const std::vector<std::string> colors{"red", "orange", "blue", "green"};
    for (std::size_t i = 0; i < 12; ++i) {
        store.add(entity("e" + std::to_string(i), {nodes[i % 5], nodes[(i * 3) % 5]}, {colors[i % 4]}));
    }
    for (auto kind : {Transformer::SquareInverse, Transformer::LinearInverse}) {
        auto p = plan({"clothing", "color"});
        p.transformer = kind;
        const auto m = build_matrices(p, tax, {}, store);
        const auto &d = m.distance.values;
        for (Eigen::Index i = 0; i < d.rows(); ++i) {
            EXPECT_EQ(d(i, i), 0.0);
            EXPECT_EQ(m.similarity.values(i, i), 1.0);
            for (Eigen::Index j = 0; j < d.cols(); ++j) {
                EXPECT_EQ(d(i, j), d(j, i));
                EXPECT_GE(d(i, j), 0.0);
                EXPECT_LE(d(i, j), max_distance(kind) + 1e-15);
            }
        }
    }
}

TEST(similarity, one_hot_examples) {
    const auto tax = qwb_test::fixture_taxonomies();
    const std::vector<Entity> es{entity("a", {"shirt"}), entity("b", {"jacket", "long_pants"}, {"red"})};
    const auto enc = one_hot_encode(es, plan({"clothing", "color"}), tax);
    EXPECT_EQ(enc.columns.size(), 12u + 7u);
    EXPECT_EQ(enc.columns.front(), "clothing/clothing");
    EXPECT_EQ(enc.columns.back(), "color/green");
    EXPECT_EQ(enc.rows.row(0).sum(), 1.0);
    EXPECT_EQ(enc.rows(0, 10), 1.0);  // shirt is the 11th clothing node
    EXPECT_EQ(enc.rows.row(1).head(12).sum(), 2.0);
    EXPECT_EQ(enc.rows.row(0).dot(enc.rows.row(1)), 0.0);
    EXPECT_EQ(enc.rows.row(0).tail(7).sum(), 0.0);
}

TEST(similarity, check_entity_names_unknown_node) {
    const auto tax = qwb_test::fixture_taxonomies();
    try {
        check_entity(entity("x", {"kilt"}), plan({"clothing"}), tax);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::NotFound);
        EXPECT_NE(std::string(e.what()).find("kilt"), std::string::npos);
    }
}
