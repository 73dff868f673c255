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

#include "qwb/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <set>

#include "qwb/error.hpp"

namespace qwb {

std::span<const std::string> Entity::values(std::string_view attribute) const {
    auto it = attributes.find(std::string(attribute));
    if (it == attributes.end()) return {};
    return it->second;
}

void normalize(Entity &entity) {
    for (auto &[name, values] : entity.attributes) {
        std::sort(values.begin(), values.end());
        values.erase(std::unique(values.begin(), values.end()), values.end());
    }
}

void EntityStore::add(Entity entity) {
    if (entity.id.empty()) throw Error(ErrorCode::InvalidArgument, "entity id must be non-empty");
    if (index_.count(entity.id) != 0) {
        throw Error(ErrorCode::InvalidArgument, "duplicate entity id '" + entity.id + "'", entity.id);
    }
    normalize(entity);
    index_.emplace(entity.id, entities_.size());
    entities_.push_back(std::move(entity));
}

const Entity &EntityStore::get(std::string_view id) const {
    auto it = index_.find(std::string(id));
    if (it == index_.end()) {
        throw Error(ErrorCode::NotFound, "unknown entity '" + std::string(id) + "'", std::string(id));
    }
    return entities_[it->second];
}

bool EntityStore::contains(std::string_view id) const { return index_.count(std::string(id)) != 0; }

std::string_view to_string(ElementComparer) { return "wuPalmer"; }
std::string_view to_string(AttributeComparer) { return "symMaxMean"; }
std::string_view to_string(EmptyAttributeAction v) {
    return v == EmptyAttributeAction::Ignore ? "ignore" : "asMaxDistance";
}
std::string_view to_string(Aggregator) { return "mean"; }
std::string_view to_string(Transformer v) {
    return v == Transformer::SquareInverse ? "squareInverse" : "linearInverse";
}

namespace {

Error unknown_kind(std::string_view what, std::string_view value) {
    return Error(ErrorCode::InvalidArgument, "unknown " + std::string(what) + " '" + std::string(value) + "'",
                 std::string(value));
}

}  // namespace

ElementComparer parse_element_comparer(std::string_view s) {
    if (s == "wuPalmer") return ElementComparer::WuPalmer;
    throw unknown_kind("element comparer", s);
}
AttributeComparer parse_attribute_comparer(std::string_view s) {
    if (s == "symMaxMean") return AttributeComparer::SymMaxMean;
    throw unknown_kind("attribute comparer", s);
}
EmptyAttributeAction parse_empty_action(std::string_view s) {
    if (s == "ignore") return EmptyAttributeAction::Ignore;
    if (s == "asMaxDistance") return EmptyAttributeAction::AsMaxDistance;
    throw unknown_kind("empty attribute action", s);
}
Aggregator parse_aggregator(std::string_view s) {
    if (s == "mean") return Aggregator::Mean;
    throw unknown_kind("aggregator", s);
}
Transformer parse_transformer(std::string_view s) {
    if (s == "squareInverse") return Transformer::SquareInverse;
    if (s == "linearInverse") return Transformer::LinearInverse;
    throw unknown_kind("transformer", s);
}

void validate(const PreparationPlan &plan, const TaxonomySet &taxonomies) {
    if (plan.attributes.empty()) {
        throw Error(ErrorCode::InvalidArgument, "preparation plan selects no attributes");
    }
    std::set<std::string> seen;
    for (const auto &attr : plan.attributes) {
        if (!seen.insert(attr.name).second) {
            throw Error(ErrorCode::InvalidArgument, "attribute '" + attr.name + "' selected twice", attr.name);
        }
        if (taxonomies.find(attr.taxonomy) == taxonomies.end()) {
            throw Error(ErrorCode::NotFound,
                        "attribute '" + attr.name + "' references unloaded taxonomy '" + attr.taxonomy + "'",
                        attr.taxonomy);
        }
    }
}

std::string plan_digest(const PreparationPlan &plan) {
    std::string canonical;
    canonical += to_string(plan.aggregator);
    canonical += '|';
    canonical += to_string(plan.transformer);
    for (const auto &attr : plan.attributes) {
        canonical += '|';
        canonical += attr.name;
        canonical += '\x1f';
        canonical += attr.taxonomy;
        canonical += '\x1f';
        canonical += to_string(attr.element_comparer);
        canonical += '\x1f';
        canonical += to_string(attr.attribute_comparer);
        canonical += '\x1f';
        canonical += to_string(attr.empty_action);
    }
    // FNV-1a, 64 bit.
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : canonical) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

void check_entity(const Entity &entity, const PreparationPlan &plan, const TaxonomySet &taxonomies) {
    for (const auto &attr : plan.attributes) {
        const auto &taxonomy = taxonomies.at(attr.taxonomy);
        for (const auto &value : entity.values(attr.name)) {
            if (!taxonomy.contains(value)) {
                throw Error(ErrorCode::NotFound,
                            "entity '" + entity.id + "' attribute '" + attr.name + "' references unknown node '" +
                                value + "' of taxonomy '" + taxonomy.name() + "'",
                            value);
            }
        }
    }
}

double set_similarity_sym_max_mean(const Taxonomy &taxonomy, std::span<const std::string> a,
                                   std::span<const std::string> b) {
    if (a.empty() || b.empty()) {
        throw Error(ErrorCode::InvalidArgument, "set similarity needs two non-empty value sets");
    }
    std::vector<std::size_t> ia(a.size()), ib(b.size());
    std::transform(a.begin(), a.end(), ia.begin(), [&](const auto &id) { return taxonomy.index_of(id); });
    std::transform(b.begin(), b.end(), ib.begin(), [&](const auto &id) { return taxonomy.index_of(id); });

    std::vector<double> col_max(ib.size(), 0.0);
    double row_sum = 0.0;
    for (std::size_t i : ia) {
        double row_max = 0.0;
        for (std::size_t k = 0; k < ib.size(); ++k) {
            const double w = taxonomy.wu_palmer_at(i, ib[k]);
            row_max = std::max(row_max, w);
            col_max[k] = std::max(col_max[k], w);
        }
        row_sum += row_max;
    }
    const double col_sum = std::accumulate(col_max.begin(), col_max.end(), 0.0);
    return 0.5 * (row_sum / static_cast<double>(ia.size()) + col_sum / static_cast<double>(ib.size()));
}

TupleSimilarity tuple_similarity(const PreparationPlan &plan, const TaxonomySet &taxonomies, const Entity &x,
                                 const Entity &y) {
    double sum = 0.0;
    std::size_t used = 0;
    for (const auto &attr : plan.attributes) {
        auto it = taxonomies.find(attr.taxonomy);
        if (it == taxonomies.end()) {
            throw Error(ErrorCode::NotFound, "attribute '" + attr.name + "' references unloaded taxonomy '" +
                                                 attr.taxonomy + "'",
                        attr.taxonomy);
        }
        const auto a = x.values(attr.name);
        const auto b = y.values(attr.name);
        if (a.empty() || b.empty()) {
            if (attr.empty_action == EmptyAttributeAction::Ignore) continue;
            sum += (a.empty() && b.empty()) ? 1.0 : 0.0;
            ++used;
            continue;
        }
        sum += set_similarity_sym_max_mean(it->second, a, b);
        ++used;
    }
    if (used == 0) return {1.0, 0};
    return {sum / static_cast<double>(used), used};
}

double similarity_to_distance(double similarity, Transformer kind) {
    if (!(similarity >= 0.0 && similarity <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "similarity " + std::to_string(similarity) + " outside [0, 1]");
    }
    switch (kind) {
        case Transformer::SquareInverse: return std::sqrt(2.0 - 2.0 * similarity);
        case Transformer::LinearInverse: return 1.0 - similarity;
    }
    return 0.0;
}

double max_distance(Transformer kind) { return kind == Transformer::SquareInverse ? std::sqrt(2.0) : 1.0; }

void validate(const DistanceMatrix &d) {
    const auto n = static_cast<Eigen::Index>(d.ids.size());
    if (d.values.rows() != n || d.values.cols() != n) {
        throw Error(ErrorCode::InvalidArgument, "distance matrix shape does not match its id list");
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        if (d.values(i, i) != 0.0) {
            throw Error(ErrorCode::InvalidArgument, "distance matrix diagonal must be zero", d.ids[i]);
        }
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double v = d.values(i, j);
            if (!std::isfinite(v) || v < 0.0) {
                throw Error(ErrorCode::InvalidArgument, "distance matrix entries must be finite and non-negative",
                            d.ids[i] + "," + d.ids[j]);
            }
            if (v != d.values(j, i)) {
                throw Error(ErrorCode::InvalidArgument, "distance matrix is not symmetric",
                            d.ids[i] + "," + d.ids[j]);
            }
        }
    }
}

std::vector<std::string> resolve_selection(const EntitySelection &selection, const EntityStore &store) {
    std::vector<std::string> ids;
    if (!selection.ids.empty()) {
        std::set<std::string> seen;
        for (const auto &id : selection.ids) {
            store.get(id);
            if (!seen.insert(id).second) {
                throw Error(ErrorCode::InvalidArgument, "entity '" + id + "' selected twice", id);
            }
            ids.push_back(id);
        }
        return ids;
    }
    const std::size_t total = store.size();
    const std::size_t count = selection.count.value_or(total);
    if (count > total) {
        throw Error(ErrorCode::InvalidArgument,
                    "selection of " + std::to_string(count) + " entities exceeds store size " + std::to_string(total));
    }
    std::vector<std::size_t> order(total);
    std::iota(order.begin(), order.end(), 0);
    if (selection.count) {
        std::mt19937_64 rng(selection.seed);
        for (std::size_t i = 0; i < count; ++i) {
            std::uniform_int_distribution<std::size_t> pick(i, total - 1);
            std::swap(order[i], order[pick(rng)]);
        }
        order.resize(count);
        std::sort(order.begin(), order.end());
    }
    for (std::size_t i : order) ids.push_back(store.entities()[i].id);
    return ids;
}

PreparedMatrices build_matrices(const PreparationPlan &plan, const TaxonomySet &taxonomies,
                                const EntitySelection &selection, const EntityStore &store) {
    validate(plan, taxonomies);
    PreparedMatrices out;
    auto ids = resolve_selection(selection, store);
    std::vector<const Entity *> entities;
    for (const auto &id : ids) {
        entities.push_back(&store.get(id));
        check_entity(*entities.back(), plan, taxonomies);
    }
    const auto n = static_cast<Eigen::Index>(ids.size());
    Eigen::MatrixXd sim = Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd dist = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const auto mu = tuple_similarity(plan, taxonomies, *entities[i], *entities[j]);
            if (mu.attributes_used == 0) out.empty_pairs.emplace_back(ids[i], ids[j]);
            sim(i, j) = sim(j, i) = mu.value;
            dist(i, j) = dist(j, i) = similarity_to_distance(mu.value, plan.transformer);
        }
    }
    MatrixProvenance provenance{plan_digest(plan),
                                selection.ids.empty() && selection.count ? std::optional(selection.seed) : std::nullopt};
    out.similarity = {ids, std::move(sim), provenance};
    out.distance = {std::move(ids), std::move(dist), std::move(provenance)};
    return out;
}

OneHotEncoding one_hot_encode(std::span<const Entity> entities, const PreparationPlan &plan,
                              const TaxonomySet &taxonomies) {
    validate(plan, taxonomies);
    OneHotEncoding out;
    std::vector<std::size_t> offsets;
    for (const auto &attr : plan.attributes) {
        offsets.push_back(out.columns.size());
        for (const auto &node : taxonomies.at(attr.taxonomy).nodes()) {
            out.columns.push_back(attr.name + "/" + node.id);
        }
    }
    out.rows = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(entities.size()),
                                     static_cast<Eigen::Index>(out.columns.size()));
    for (std::size_t r = 0; r < entities.size(); ++r) {
        const auto &entity = entities[r];
        out.ids.push_back(entity.id);
        for (std::size_t a = 0; a < plan.attributes.size(); ++a) {
            const auto &attr = plan.attributes[a];
            const auto &taxonomy = taxonomies.at(attr.taxonomy);
            for (const auto &value : entity.values(attr.name)) {
                out.rows(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(offsets[a] + taxonomy.index_of(value))) =
                    1.0;
            }
        }
    }
    return out;
}

}  // namespace qwb
