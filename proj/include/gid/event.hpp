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

#include <cstdint>
#include <deque>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace gid {

/// The four kinds of system entities events can connect.
enum class EntityType : std::uint8_t {
    File = 0,
    Process = 1,
    UDSocket = 2,
    INETSocket = 3,
};

inline constexpr std::size_t kEntityTypeCount = 4;

/// Single-letter wire code: F, P, U or I.
char entity_type_code(EntityType t);
std::optional<EntityType> entity_type_from_code(char code);
std::string_view entity_type_name(EntityType t);

/// True for the eight interaction pairs a UNIX host can produce:
/// P<->F, P->P, P<->U, P<->I and U->U.
bool allowed_interaction(EntityType src, EntityType dst);

/// Dense handle into the EntityRegistry.
using EntityId = std::uint32_t;

struct Entity {
    std::string id;   // unique within a host
    EntityType etype;
    std::string host;
};

/// Interns entities keyed by (host, id). Insert-if-absent is safe to call
/// from multiple parser threads; handles stay valid for the registry's
/// lifetime.
class EntityRegistry {
public:
    /// Returns the handle for (host, id), creating the entity on first
    /// sight. Throws ValidationError if the same (host, id) was already
    /// registered with a different type.
    EntityId intern(std::string_view host, std::string_view id, EntityType etype);

    /// Lookup without insertion.
    std::optional<EntityId> find(std::string_view host, std::string_view id) const;

    const Entity& get(EntityId e) const;
    std::size_t size() const;

private:
    mutable std::shared_mutex mutex_;
    std::deque<Entity> entities_;
    std::unordered_map<std::string, EntityId> index_; // key = host + '\x1f' + id
};

/// One directed interaction between two entities at a whole-second
/// timestamp.
struct Event {
    EntityId src = 0;
    EntityId dst = 0;
    std::int64_t t = 0;

    bool operator==(const Event&) const = default;
};

/// Tumbling window [start, start + duration).
struct TimeWindow {
    std::int64_t start = 0;
    std::int64_t duration = 3600;

    bool contains(std::int64_t t) const { return t >= start && t < start + duration; }
    std::int64_t end() const { return start + duration; }
    bool operator==(const TimeWindow&) const = default;
};

/// Maps a timestamp to its tumbling window; the boundary instant belongs
/// to the later window. Throws ConfigError if duration <= 0.
TimeWindow assign_window(std::int64_t t, std::int64_t duration);

inline TimeWindow assign_window(const Event& e, std::int64_t duration) {
    return assign_window(e.t, duration);
}

/// A chain of events rendered as the visited entities plus one
/// representative timestamp per hop.
struct EventSequence {
    std::vector<EntityId> nodes;
    std::vector<std::int64_t> hop_times;

    std::size_t length() const { return nodes.size(); } // node count
    std::size_t hops() const { return hop_times.size(); }

    /// Checks the structural invariants: at least two nodes, one timestamp
    /// per hop, non-decreasing hop timestamps, and every hop an allowed
    /// interaction. Returns the first violation or nullopt.
    std::optional<std::string> validate(const EntityRegistry& registry) const;

    bool operator==(const EventSequence&) const = default;
};

/// Parses one newline-delimited JSON record; new entities are interned
/// into the registry. Throws ParseError for malformed records and
/// ValidationError for disallowed interactions or self-loops.
Event parse_event_record(std::string_view line, EntityRegistry& registry,
                         std::size_t line_number = 0);

/// Renders an event back to its JSON wire form.
std::string serialize_event(const Event& e, const EntityRegistry& registry);

} // namespace gid
