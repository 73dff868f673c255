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

#include <fstream>
#include <sstream>
#include <string>

#include "qwb/similarity.hpp"
#include "qwb/taxonomy.hpp"

namespace qwb_test {

inline std::string fixture_path(const std::string &name) { return std::string(QWB_FIXTURE_DIR) + "/" + name; }

inline std::string read_fixture(const std::string &name) {
    std::ifstream in(fixture_path(name), std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

inline qwb::Taxonomy clothing() { return qwb::parse_taxonomy(read_fixture("clothing.json")); }
inline qwb::Taxonomy colors() { return qwb::parse_taxonomy(read_fixture("color.json")); }

inline qwb::TaxonomySet fixture_taxonomies() {
    qwb::TaxonomySet set;
    set.emplace("clothing", clothing());
    set.emplace("color", colors());
    return set;
}

}  // namespace qwb_test
