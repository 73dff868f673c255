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

#include "qwb/formats.hpp"

#include <algorithm>
#include <string>
#include <unordered_set>

#include "qwb/error.hpp"

namespace qwb {

namespace {

std::string line_column(std::string_view text, std::size_t byte) {
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
        if (text[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
    // nlohmann reports the byte after the offending character.
    if (column > 1) --column;
    return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

const nlohmann::json *member(const nlohmann::json &object, const char *key) {
    const auto it = object.find(key);
    return it == object.end() ? nullptr : &*it;
}

std::string optional_string(const nlohmann::json &object, const char *key, std::string fallback,
                            const std::string &where) {
    const auto *v = member(object, key);
    if (!v) return fallback;
    if (!v->is_string()) throw Error(ErrorCode::Malformed, where + "." + key + " must be a string", where + "." + key);
    return v->get<std::string>();
}

struct Reject {
    std::string field;
    std::string reason;
};

}  // namespace

nlohmann::json parse_json_document(std::string_view text) {
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error &e) {
        throw Error(ErrorCode::Malformed, std::string("document is not valid JSON: ") + e.what(),
                    line_column(text, e.byte));
    }
}

nlohmann::json taxonomy_to_json(const Taxonomy &taxonomy) { return nlohmann::json::parse(serialize_taxonomy(taxonomy)); }

Taxonomy taxonomy_from_json(const nlohmann::json &doc) { return parse_taxonomy(doc.dump()); }

nlohmann::json entity_to_json(const Entity &entity) {
    nlohmann::json attributes = nlohmann::json::object();
    for (const auto &[name, values] : entity.attributes) attributes[name] = values;
    nlohmann::json references = nlohmann::json::object();
    for (const auto &[name, url] : entity.references) references[name] = url;
    return {{"id", entity.id}, {"references", std::move(references)}, {"attributes", std::move(attributes)}};
}

Entity entity_from_json(const nlohmann::json &record, const std::string &where) {
    if (!record.is_object()) throw Error(ErrorCode::Malformed, where + " must be an object", where);
    Entity entity;
    const auto *id = member(record, "id");
    if (!id || !id->is_string() || id->get<std::string>().empty()) {
        throw Error(ErrorCode::Malformed, where + ".id must be a non-empty string", where + ".id");
    }
    entity.id = id->get<std::string>();
    if (const auto *refs = member(record, "references")) {
        if (!refs->is_object()) throw Error(ErrorCode::Malformed, "references must be an object", where + ".references");
        for (const auto &[name, url] : refs->items()) {
            if (!url.is_string()) {
                throw Error(ErrorCode::Malformed, "reference URLs must be strings", where + ".references." + name);
            }
            entity.references[name] = url.get<std::string>();
        }
    }
    if (const auto *attrs = member(record, "attributes")) {
        if (!attrs->is_object()) throw Error(ErrorCode::Malformed, "attributes must be an object", where + ".attributes");
        for (const auto &[name, values] : attrs->items()) {
            const std::string field = where + ".attributes." + name;
            if (!values.is_array()) throw Error(ErrorCode::Malformed, "attribute values must be an array", field);
            auto &out = entity.attributes[name];
            for (std::size_t i = 0; i < values.size(); ++i) {
                if (!values[i].is_string()) {
                    throw Error(ErrorCode::Malformed, "attribute values must be node ids",
                                field + "[" + std::to_string(i) + "]");
                }
                out.push_back(values[i].get<std::string>());
            }
        }
    }
    normalize(entity);
    return entity;
}

nlohmann::json plan_to_json(const PreparationPlan &plan) {
    nlohmann::json attributes = nlohmann::json::array();
    for (const auto &a : plan.attributes) {
        attributes.push_back({{"name", a.name},
                              {"taxonomy", a.taxonomy},
                              {"elementComparer", to_string(a.element_comparer)},
                              {"attributeComparer", to_string(a.attribute_comparer)},
                              {"emptyAction", to_string(a.empty_action)}});
    }
    return {{"aggregator", to_string(plan.aggregator)},
            {"transformer", to_string(plan.transformer)},
            {"attributes", std::move(attributes)}};
}

PreparationPlan plan_from_json(const nlohmann::json &doc) {
    if (!doc.is_object()) throw Error(ErrorCode::Malformed, "plan must be an object", "plan");
    PreparationPlan plan;
    plan.aggregator = parse_aggregator(optional_string(doc, "aggregator", "mean", "plan"));
    plan.transformer = parse_transformer(optional_string(doc, "transformer", "squareInverse", "plan"));
    const auto *attrs = member(doc, "attributes");
    if (!attrs || !attrs->is_array()) {
        throw Error(ErrorCode::Malformed, "plan needs an 'attributes' array", "plan.attributes");
    }
    for (std::size_t i = 0; i < attrs->size(); ++i) {
        const auto &entry = (*attrs)[i];
        const std::string where = "plan.attributes[" + std::to_string(i) + "]";
        if (!entry.is_object()) throw Error(ErrorCode::Malformed, where + " must be an object", where);
        AttributeSelection sel;
        sel.name = optional_string(entry, "name", "", where);
        if (sel.name.empty()) throw Error(ErrorCode::Malformed, where + " needs a 'name'", where + ".name");
        sel.taxonomy = optional_string(entry, "taxonomy", "", where);
        if (sel.taxonomy.empty()) throw Error(ErrorCode::Malformed, where + " needs a 'taxonomy'", where + ".taxonomy");
        sel.element_comparer = parse_element_comparer(optional_string(entry, "elementComparer", "wuPalmer", where));
        sel.attribute_comparer =
            parse_attribute_comparer(optional_string(entry, "attributeComparer", "symMaxMean", where));
        sel.empty_action = parse_empty_action(optional_string(entry, "emptyAction", "ignore", where));
        plan.attributes.push_back(std::move(sel));
    }
    return plan;
}

PreparationPlan parse_plan(std::string_view text) { return plan_from_json(parse_json_document(text)); }

nlohmann::json report_to_json(const IngestReport &report) {
    nlohmann::json rejected = nlohmann::json::array();
    for (const auto &r : report.rejected) {
        rejected.push_back({{"index", r.index}, {"id", r.id}, {"field", r.field}, {"reason", r.reason}});
    }
    return {{"accepted", report.accepted}, {"rejected", std::move(rejected)}};
}

IngestReport ingest_entities(std::string_view entity_document, const TaxonomySet &taxonomies, EntityStore &store,
                             const std::map<std::string, std::string> &bindings) {
    IngestReport report;
    if (std::all_of(entity_document.begin(), entity_document.end(),
                    [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; })) {
        return report;
    }
    const auto doc = parse_json_document(entity_document);
    if (!doc.is_array()) throw Error(ErrorCode::Malformed, "entity file must be a JSON array", "line 1, column 1");

    for (std::size_t index = 0; index < doc.size(); ++index) {
        const std::string where = "[" + std::to_string(index) + "]";
        const auto &record = doc[index];
        std::string id;
        if (record.is_object()) {
            if (const auto *v = member(record, "id"); v && v->is_string()) id = v->get<std::string>();
        }
        auto reject = [&](std::string field, std::string reason) {
            report.rejected.push_back({index, id, std::move(field), std::move(reason)});
        };

        Entity entity;
        try {
            entity = entity_from_json(record, where);
        } catch (const Error &e) {
            reject(e.context(), e.what());
            continue;
        }
        if (store.contains(entity.id)) {
            reject(where + ".id", "duplicate entity id '" + entity.id + "'");
            continue;
        }
        std::optional<Reject> problem;
        for (const auto &[name, values] : entity.attributes) {
            const auto bound = bindings.find(name);
            const std::string &taxonomy_name = bound == bindings.end() ? name : bound->second;
            const auto tax = taxonomies.find(taxonomy_name);
            if (tax == taxonomies.end()) {
                problem = Reject{where + ".attributes." + name,
                                 "attribute '" + name + "' has no loaded taxonomy '" + taxonomy_name + "'"};
                break;
            }
            for (const auto &value : values) {
                if (!tax->second.contains(value)) {
                    problem = Reject{where + ".attributes." + name,
                                     "unknown node '" + value + "' in taxonomy '" + taxonomy_name + "'"};
                    break;
                }
            }
            if (problem) break;
        }
        if (problem) {
            reject(problem->field, problem->reason);
            continue;
        }
        store.add(std::move(entity));
        ++report.accepted;
    }
    return report;
}

void add_taxonomy(TaxonomySet &set, Taxonomy taxonomy) {
    const std::string name = taxonomy.name();
    if (set.contains(name)) {
        throw Error(ErrorCode::InvalidArgument, "taxonomy '" + name + "' is already loaded", name);
    }
    set.emplace(name, std::move(taxonomy));
}

}  // namespace qwb
