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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "qwb/taxonomy.hpp"

namespace qwb {

using TaxonomySet = std::map<std::string, Taxonomy, std::less<>>;

/// One record of categorical data. Attribute values are stored sorted and
/// de-duplicated, which fixes the summation order of every similarity.
struct Entity {
    std::string id;
    std::map<std::string, std::string> references;
    std::map<std::string, std::vector<std::string>> attributes;

    /// Empty when the attribute is absent.
    std::span<const std::string> values(std::string_view attribute) const;
};

/// Sorts and de-duplicates every attribute value list in place.
void normalize(Entity &entity);

class EntityStore {
  public:
    /// Throws InvalidArgument on a duplicate id.
    void add(Entity entity);
    const Entity &get(std::string_view id) const;
    bool contains(std::string_view id) const;
    std::size_t size() const noexcept { return entities_.size(); }
    const std::vector<Entity> &entities() const noexcept { return entities_; }

  private:
    std::vector<Entity> entities_;
    std::unordered_map<std::string, std::size_t> index_;
};

enum class ElementComparer { WuPalmer };
enum class AttributeComparer { SymMaxMean };
enum class EmptyAttributeAction { Ignore, AsMaxDistance };
enum class Aggregator { Mean };
enum class Transformer { SquareInverse, LinearInverse };

std::string_view to_string(ElementComparer v);
std::string_view to_string(AttributeComparer v);
std::string_view to_string(EmptyAttributeAction v);
std::string_view to_string(Aggregator v);
std::string_view to_string(Transformer v);
// Parsers accept the wire spellings ("wuPalmer", "symMaxMean", "ignore",
// "asMaxDistance", "mean", "squareInverse", "linearInverse").
ElementComparer parse_element_comparer(std::string_view s);
AttributeComparer parse_attribute_comparer(std::string_view s);
EmptyAttributeAction parse_empty_action(std::string_view s);
Aggregator parse_aggregator(std::string_view s);
Transformer parse_transformer(std::string_view s);

struct AttributeSelection {
    std::string name;
    std::string taxonomy;
    ElementComparer element_comparer = ElementComparer::WuPalmer;
    AttributeComparer attribute_comparer = AttributeComparer::SymMaxMean;
    EmptyAttributeAction empty_action = EmptyAttributeAction::Ignore;
};

struct PreparationPlan {
    std::vector<AttributeSelection> attributes;
    Aggregator aggregator = Aggregator::Mean;
    Transformer transformer = Transformer::SquareInverse;
};

/// Throws NotFound if an attribute references a taxonomy that is not loaded,
/// InvalidArgument if the plan selects nothing or repeats an attribute.
void validate(const PreparationPlan &plan, const TaxonomySet &taxonomies);
/// Stable 16-hex-digit digest of the plan's canonical form.
std::string plan_digest(const PreparationPlan &plan);

/// Checks every selected attribute value of `entity` against the plan's
/// taxonomies; throws NotFound naming the first unknown node.
void check_entity(const Entity &entity, const PreparationPlan &plan, const TaxonomySet &taxonomies);

/// Symmetric mean of row maxima:
/// 1/2 * (mean_a max_b w(a,b) + mean_b max_a w(a,b)).
double set_similarity_sym_max_mean(const Taxonomy &taxonomy, std::span<const std::string> a,
                                   std::span<const std::string> b);

struct TupleSimilarity {
    double value = 1.0;
    /// Attributes that contributed to the mean. Zero means every attribute
    /// was dropped and `value` fell back to 1.
    std::size_t attributes_used = 0;
};

TupleSimilarity tuple_similarity(const PreparationPlan &plan, const TaxonomySet &taxonomies, const Entity &x,
                                 const Entity &y);

double similarity_to_distance(double similarity, Transformer kind);

/// Largest distance the transformer can produce (sqrt(2) or 1).
double max_distance(Transformer kind);

struct EntitySelection {
    /// Explicit ids win when non-empty.
    std::vector<std::string> ids;
    std::optional<std::size_t> count;
    std::uint64_t seed = 0;
};

struct MatrixProvenance {
    std::string plan_digest;
    std::optional<std::uint64_t> seed;
};

struct SimilarityMatrix {
    std::vector<std::string> ids;
    Eigen::MatrixXd values;
    MatrixProvenance provenance;
};

struct DistanceMatrix {
    std::vector<std::string> ids;
    Eigen::MatrixXd values;
    MatrixProvenance provenance;

    std::size_t order() const { return ids.size(); }
};

/// Symmetric, zero diagonal, finite and non-negative; throws InvalidArgument.
void validate(const DistanceMatrix &d);

struct PreparedMatrices {
    SimilarityMatrix similarity;
    DistanceMatrix distance;
    /// Entity pairs whose similarity fell back to 1 because no attribute survived.
    std::vector<std::pair<std::string, std::string>> empty_pairs;
};

/// Resolves a selection against the store in store order. Random selection
/// draws `count` distinct entities with the given seed.
std::vector<std::string> resolve_selection(const EntitySelection &selection, const EntityStore &store);

PreparedMatrices build_matrices(const PreparationPlan &plan, const TaxonomySet &taxonomies,
                                const EntitySelection &selection, const EntityStore &store);

struct OneHotEncoding {
    /// "attribute/node" for every column, in canonical order: plan attribute
    /// order, then taxonomy file order of the nodes.
    std::vector<std::string> columns;
    std::vector<std::string> ids;
    Eigen::MatrixXd rows;
};

OneHotEncoding one_hot_encode(std::span<const Entity> entities, const PreparationPlan &plan,
                              const TaxonomySet &taxonomies);

}  // namespace qwb
