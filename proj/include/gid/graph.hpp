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

#include <json.hpp>

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gid {

/// Sorted, duplicate-free set of event timestamps on one edge.
class TimestampSet {
public:
    TimestampSet() = default;
    explicit TimestampSet(std::vector<std::int64_t> sorted_unique)
        : ts_(std::move(sorted_unique)) {}

    std::size_t size() const { return ts_.size(); }
    bool empty() const { return ts_.empty(); }
    std::int64_t min() const { return ts_.front(); }
    std::int64_t max() const { return ts_.back(); }
    std::span<const std::int64_t> values() const { return ts_; }

    /// Smallest timestamp >= t, or nullopt.
    std::optional<std::int64_t> first_at_or_after(std::int64_t t) const;

private:
    std::vector<std::int64_t> ts_;
};

struct GraphEdge {
    std::uint32_t to = 0;
    TimestampSet times;
};

/// Per-(host, window) directed graph with one edge per distinct entity
/// pair and a timestamp set per edge. Immutable once built; safe to share
/// across threads.
class CompactGraph {
public:
    /// Collapses an event list into the compact form. All events must lie
    /// inside the window and share one host; violations throw
    /// ValidationError.
    static CompactGraph build(std::span<const Event> events, const TimeWindow& window,
                              const EntityRegistry& registry);

    std::uint32_t vertex_count() const { return static_cast<std::uint32_t>(entities_.size()); }
    EntityId entity(std::uint32_t v) const { return entities_[v]; }
    EntityType type(std::uint32_t v) const { return types_[v]; }
    const std::string& label(std::uint32_t v) const { return labels_[v]; }
    std::optional<std::uint32_t> vertex_of(EntityId e) const;

    std::span<const GraphEdge> out(std::uint32_t v) const { return adjacency_[v]; }
    /// Timestamp set of edge (from, to); nullptr when absent.
    const TimestampSet* edge(std::uint32_t from, std::uint32_t to) const;

    std::size_t edge_count() const { return edge_count_; }
    std::size_t timestamp_count() const { return timestamp_count_; }
    const TimeWindow& window() const { return window_; }
    const std::string& host() const { return host_; }
    const EntityRegistry& registry() const { return *registry_; }

private:
    const EntityRegistry* registry_ = nullptr;
    TimeWindow window_;
    std::string host_;
    std::vector<EntityId> entities_;                // local vertex -> registry handle
    std::vector<EntityType> types_;
    std::vector<std::string> labels_;               // cached entity ids
    std::unordered_map<EntityId, std::uint32_t> local_; // registry handle -> local vertex
    std::vector<std::vector<GraphEdge>> adjacency_; // sorted by `to`
    std::size_t edge_count_ = 0;
    std::size_t timestamp_count_ = 0;
};

struct GraphStats {
    std::size_t processes = 0;
    std::size_t files = 0;
    std::size_t inet_sockets = 0;
    std::size_t ud_sockets = 0;
    std::size_t edges = 0;
};

GraphStats graph_stats(const CompactGraph& g);

/// Deterministic JSON dump (vertices + edges with timestamps), used by
/// golden-file tests and the debug CLI.
nlohmann::ordered_json graph_to_json(const CompactGraph& g);

} // namespace gid
