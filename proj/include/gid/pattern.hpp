// Copyright 2026 GID Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "gid/event.hpp"
#include "gid/graph.hpp"

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace gid {

/// One pattern slot: an entity-type wildcard or a concrete entity id.
struct PatternSlot {
    std::variant<EntityType, std::string> value;

    bool is_wildcard() const { return std::holds_alternative<EntityType>(value); }
    EntityType wildcard() const { return std::get<EntityType>(value); }
    const std::string& concrete_id() const { return std::get<std::string>(value); }

    /// Does a vertex with this type and id fill the slot?
    bool matches(EntityType t, const std::string& id) const;

    bool operator==(const PatternSlot&) const = default;
};

/// Ordered slot template candidate paths must fill one-to-one.
struct PathPattern {
    std::vector<PatternSlot> slots;

    std::size_t length() const { return slots.size(); }

    /// Structural well-formedness: length >= 2 and every adjacent slot
    /// pair admits at least one allowed interaction. Concrete slots are
    /// treated as their (unknown) entity's type being unconstrained only
    /// when paired with wildcards that allow some interaction.
    std::optional<std::string> check_well_formed() const;

    std::string to_string() const;

    bool operator==(const PathPattern&) const = default;
};

/// True iff the sequence fills the pattern slot-by-slot (same length,
/// every node matches its slot).
bool is_consistent(const EventSequence& p, const PathPattern& b,
                   const EntityRegistry& registry);

/// Pattern-file line: comma-separated slots, each `F|P|U|I` or
/// `id:<entity-id>`. Throws ParseError on malformed input.
PathPattern parse_pattern_line(std::string_view line, std::size_t line_number = 0);

/// Loads one pattern per non-empty, non-comment line.
std::vector<PathPattern> load_pattern_file(const std::string& path);

/// All type-wildcard patterns of length 2..max_len witnessed by at least
/// one time-ordered path in the graph, optionally restricted to a fixed
/// (first, last) slot type. Deterministic order: by length, then slot
/// codes.
std::vector<PathPattern> enumerate_valid_patterns(
    const CompactGraph& g, std::size_t max_len,
    std::optional<std::pair<EntityType, EntityType>> endpoint_constraint = std::nullopt);

} // namespace gid
