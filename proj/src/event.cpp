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

#include "gid/event.hpp"

#include "gid/errors.hpp"

#include <json.hpp>

#include <array>
#include <mutex>

namespace gid {

namespace {

constexpr std::array<char, kEntityTypeCount> kTypeCodes = {'F', 'P', 'U', 'I'};

std::string registry_key(std::string_view host, std::string_view id) {
    std::string key;
    key.reserve(host.size() + id.size() + 1);
    key.append(host);
    key.push_back('\x1f');
    key.append(id);
    return key;
}

} // namespace

char entity_type_code(EntityType t) {
    return kTypeCodes[static_cast<std::size_t>(t)];
}

std::optional<EntityType> entity_type_from_code(char code) {
    switch (code) {
    case 'F': return EntityType::File;
    case 'P': return EntityType::Process;
    case 'U': return EntityType::UDSocket;
    case 'I': return EntityType::INETSocket;
    default: return std::nullopt;
    }
}

std::string_view entity_type_name(EntityType t) {
    switch (t) {
    case EntityType::File: return "file";
    case EntityType::Process: return "process";
    case EntityType::UDSocket: return "udsocket";
    case EntityType::INETSocket: return "inetsocket";
    }
    return "unknown";
}

bool allowed_interaction(EntityType src, EntityType dst) {
    using E = EntityType;
    switch (src) {
    case E::Process:
        return true; // P -> F, P -> P, P -> U, P -> I
    case E::File:
        return dst == E::Process;
    case E::UDSocket:
        return dst == E::Process || dst == E::UDSocket;
    case E::INETSocket:
        return dst == E::Process;
    }
    return false;
}

EntityId EntityRegistry::intern(std::string_view host, std::string_view id,
                                EntityType etype) {
    const std::string key = registry_key(host, id);
    {
        std::shared_lock lock(mutex_);
        auto it = index_.find(key);
        if (it != index_.end()) {
            if (entities_[it->second].etype != etype) {
                throw ValidationError(
                    "entity '" + std::string(id) + "' on host '" + std::string(host) +
                    "' seen with conflicting types");
            }
            return it->second;
        }
    }
    std::unique_lock lock(mutex_);
    auto [it, inserted] = index_.emplace(key, static_cast<EntityId>(entities_.size()));
    if (!inserted) {
        if (entities_[it->second].etype != etype) {
            throw ValidationError(
                "entity '" + std::string(id) + "' on host '" + std::string(host) +
                "' seen with conflicting types");
        }
        return it->second;
    }
    entities_.push_back(Entity{std::string(id), etype, std::string(host)});
    return it->second;
}

std::optional<EntityId> EntityRegistry::find(std::string_view host,
                                             std::string_view id) const {
    std::shared_lock lock(mutex_);
    auto it = index_.find(registry_key(host, id));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

const Entity& EntityRegistry::get(EntityId e) const {
    std::shared_lock lock(mutex_);
    return entities_.at(e);
}

std::size_t EntityRegistry::size() const {
    std::shared_lock lock(mutex_);
    return entities_.size();
}

TimeWindow assign_window(std::int64_t t, std::int64_t duration) {
    if (duration <= 0) throw ConfigError("window duration must be positive");
    std::int64_t q = t / duration;
    if (t < 0 && t % duration != 0) --q; // floor for negative timestamps
    return TimeWindow{q * duration, duration};
}

std::optional<std::string> EventSequence::validate(const EntityRegistry& registry) const {
    if (nodes.size() < 2) return "sequence needs at least two nodes";
    if (hop_times.size() != nodes.size() - 1)
        return "expected one timestamp per hop";
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        const Entity& a = registry.get(nodes[i]);
        const Entity& b = registry.get(nodes[i + 1]);
        if (nodes[i] == nodes[i + 1]) return "self-loop at hop " + std::to_string(i);
        if (!allowed_interaction(a.etype, b.etype)) {
            return std::string("disallowed interaction ") + entity_type_code(a.etype) +
                   "->" + entity_type_code(b.etype);
        }
        if (i > 0 && hop_times[i] < hop_times[i - 1])
            return "hop timestamps decrease at hop " + std::to_string(i);
    }
    return std::nullopt;
}

Event parse_event_record(std::string_view line, EntityRegistry& registry,
                         std::size_t line_number) {
    nlohmann::json rec;
    try {
        rec = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what(), line_number);
    }
    if (!rec.is_object()) throw ParseError("record is not a JSON object", line_number);

    auto field = [&](const char* name) -> const nlohmann::json& {
        auto it = rec.find(name);
        if (it == rec.end())
            throw ParseError(std::string("missing field '") + name + "'", line_number);
        return *it;
    };
    auto str_field = [&](const char* name) -> std::string {
        const auto& v = field(name);
        if (!v.is_string())
            throw ParseError(std::string("field '") + name + "' must be a string",
                             line_number);
        return v.get<std::string>();
    };
    auto type_field = [&](const char* name) -> EntityType {
        std::string code = str_field(name);
        if (code.size() == 1) {
            if (auto t = entity_type_from_code(code[0])) return *t;
        }
        throw ParseError(std::string("field '") + name + "' must be one of F,P,U,I",
                         line_number);
    };

    const std::string src_id = str_field("src");
    const EntityType src_type = type_field("stype");
    const std::string dst_id = str_field("dst");
    const EntityType dst_type = type_field("dtype");
    const std::string host = str_field("host");

    const auto& tval = field("t");
    if (!tval.is_number_integer())
        throw ParseError("field 't' must be an integer", line_number);
    const std::int64_t t = tval.get<std::int64_t>();

    if (src_id == dst_id)
        throw ValidationError("self-loop event on entity '" + src_id + "'");
    if (!allowed_interaction(src_type, dst_type)) {
        throw ValidationError(std::string("disallowed interaction ") +
                              entity_type_code(src_type) + "->" +
                              entity_type_code(dst_type));
    }

    Event e;
    e.src = registry.intern(host, src_id, src_type);
    e.dst = registry.intern(host, dst_id, dst_type);
    e.t = t;
    return e;
}

std::string serialize_event(const Event& e, const EntityRegistry& registry) {
    const Entity& src = registry.get(e.src);
    const Entity& dst = registry.get(e.dst);
    nlohmann::ordered_json rec;
    rec["src"] = src.id;
    rec["stype"] = std::string(1, entity_type_code(src.etype));
    rec["dst"] = dst.id;
    rec["dtype"] = std::string(1, entity_type_code(dst.etype));
    rec["t"] = e.t;
    rec["host"] = src.host;
    return rec.dump();
}

} // namespace gid
