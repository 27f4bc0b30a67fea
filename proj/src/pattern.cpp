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

#include "gid/pattern.hpp"

#include "gid/errors.hpp"
#include "gid/search.hpp"

#include <array>
#include <fstream>

namespace gid {

namespace {

constexpr std::array<EntityType, kEntityTypeCount> kAllTypes = {
    EntityType::File, EntityType::Process, EntityType::UDSocket,
    EntityType::INETSocket};

/// Can a pair of slots be realized by any allowed interaction?
bool slots_admit_interaction(const PatternSlot& a, const PatternSlot& b) {
    for (EntityType ta : kAllTypes) {
        if (a.is_wildcard() && a.wildcard() != ta) continue;
        for (EntityType tb : kAllTypes) {
            if (b.is_wildcard() && b.wildcard() != tb) continue;
            if (allowed_interaction(ta, tb)) return true;
        }
    }
    return false;
}

} // namespace

bool PatternSlot::matches(EntityType t, const std::string& id) const {
    if (is_wildcard()) return wildcard() == t;
    return concrete_id() == id;
}

std::optional<std::string> PathPattern::check_well_formed() const {
    if (slots.size() < 2) return "pattern needs at least two slots";
    for (std::size_t i = 0; i + 1 < slots.size(); ++i) {
        if (!slots_admit_interaction(slots[i], slots[i + 1])) {
            return "slots " + std::to_string(i) + " and " + std::to_string(i + 1) +
                   " admit no allowed interaction";
        }
    }
    return std::nullopt;
}

std::string PathPattern::to_string() const {
    std::string out;
    for (std::size_t i = 0; i < slots.size(); ++i) {
        if (i > 0) out.push_back(',');
        if (slots[i].is_wildcard()) {
            out.push_back(entity_type_code(slots[i].wildcard()));
        } else {
            out.append("id:");
            out.append(slots[i].concrete_id());
        }
    }
    return out;
}

bool is_consistent(const EventSequence& p, const PathPattern& b,
                   const EntityRegistry& registry) {
    if (p.nodes.size() != b.slots.size()) return false;
    for (std::size_t i = 0; i < p.nodes.size(); ++i) {
        const Entity& e = registry.get(p.nodes[i]);
        if (!b.slots[i].matches(e.etype, e.id)) return false;
    }
    return true;
}

PathPattern parse_pattern_line(std::string_view line, std::size_t line_number) {
    PathPattern pattern;
    std::size_t pos = 0;
    while (pos <= line.size()) {
        std::size_t comma = line.find(',', pos);
        std::string_view tok = line.substr(pos, comma == std::string_view::npos
                                                    ? std::string_view::npos
                                                    : comma - pos);
        // trim spaces
        while (!tok.empty() && (tok.front() == ' ' || tok.front() == '\t'))
            tok.remove_prefix(1);
        while (!tok.empty() && (tok.back() == ' ' || tok.back() == '\t' ||
                                tok.back() == '\r'))
            tok.remove_suffix(1);
        if (tok.empty()) throw ParseError("empty pattern slot", line_number);
        if (tok.substr(0, 3) == "id:") {
            std::string_view id = tok.substr(3);
            if (id.empty()) throw ParseError("empty entity id in pattern", line_number);
            pattern.slots.push_back(PatternSlot{std::string(id)});
        } else if (tok.size() == 1) {
            auto t = entity_type_from_code(tok[0]);
            if (!t) {
                throw ParseError("unknown pattern slot '" + std::string(tok) + "'",
                                 line_number);
            }
            pattern.slots.push_back(PatternSlot{*t});
        } else {
            throw ParseError("unknown pattern slot '" + std::string(tok) + "'",
                             line_number);
        }
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    if (auto err = pattern.check_well_formed()) {
        throw ParseError("invalid pattern: " + *err, line_number);
    }
    return pattern;
}

std::vector<PathPattern> load_pattern_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open pattern file '" + path + "'");
    std::vector<PathPattern> patterns;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        std::string_view view(line);
        while (!view.empty() && (view.front() == ' ' || view.front() == '\t'))
            view.remove_prefix(1);
        if (view.empty() || view.front() == '#') continue;
        patterns.push_back(parse_pattern_line(view, line_number));
    }
    return patterns;
}

std::vector<PathPattern> enumerate_valid_patterns(
    const CompactGraph& g, std::size_t max_len,
    std::optional<std::pair<EntityType, EntityType>> endpoint_constraint) {
    if (max_len < 2) throw ConfigError("pattern length must be at least 2");

    SearchOptions options;
    options.max_len = max_len;

    std::vector<PathPattern> valid;
    std::vector<EntityType> stack;

    // depth-first over type strings, pruned by the type-adjacency relation
    auto recurse = [&](auto&& self, std::size_t target_len) -> void {
        if (stack.size() == target_len) {
            if (endpoint_constraint &&
                (stack.front() != endpoint_constraint->first ||
                 stack.back() != endpoint_constraint->second)) {
                return;
            }
            PathPattern pattern;
            pattern.slots.reserve(stack.size());
            for (EntityType t : stack) pattern.slots.push_back(PatternSlot{t});
            if (pattern_has_witness(g, pattern, options)) {
                valid.push_back(std::move(pattern));
            }
            return;
        }
        for (EntityType t : kAllTypes) {
            if (!stack.empty() && !allowed_interaction(stack.back(), t)) continue;
            stack.push_back(t);
            self(self, target_len);
            stack.pop_back();
        }
    };

    for (std::size_t len = 2; len <= max_len; ++len) {
        recurse(recurse, len);
    }
    return valid;
}

} // namespace gid
