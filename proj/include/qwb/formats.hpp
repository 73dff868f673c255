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

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "qwb/similarity.hpp"
#include "qwb/taxonomy.hpp"

namespace qwb {

/// Parses a JSON document; syntax errors become Malformed with a
/// "line L, column C" context.
nlohmann::json parse_json_document(std::string_view text);

nlohmann::json taxonomy_to_json(const Taxonomy &taxonomy);
Taxonomy taxonomy_from_json(const nlohmann::json &doc);

nlohmann::json entity_to_json(const Entity &entity);
/// Structural parse of one record; `where` prefixes the field path in errors.
Entity entity_from_json(const nlohmann::json &record, const std::string &where);

nlohmann::json plan_to_json(const PreparationPlan &plan);
PreparationPlan plan_from_json(const nlohmann::json &doc);
PreparationPlan parse_plan(std::string_view text);

struct RejectedRecord {
    std::size_t index = 0;  // position in the entity file
    std::string id;         // empty when the record has no readable id
    std::string field;      // path of the offending field
    std::string reason;
};

struct IngestReport {
    std::size_t accepted = 0;
    std::vector<RejectedRecord> rejected;
};

nlohmann::json report_to_json(const IngestReport &report);

/// Adds every valid record of an entity file to `store`. Attribute values are
/// checked against the taxonomy named by `bindings[attribute]`, or against
/// the taxonomy of the same name when no binding is given; a record with an
/// unresolvable attribute or unknown node is rejected and the rest are kept.
/// A document that is not a JSON array throws Malformed. Whitespace-only
/// input is an empty file.
IngestReport ingest_entities(std::string_view entity_document, const TaxonomySet &taxonomies, EntityStore &store,
                             const std::map<std::string, std::string> &bindings = {});

/// Adds a parsed taxonomy; throws InvalidArgument if the name is taken.
void add_taxonomy(TaxonomySet &set, Taxonomy taxonomy);

}  // namespace qwb
