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

#include "gid/graph.hpp"

#include "gid/errors.hpp"

#include <algorithm>
#include <map>

namespace gid {

std::optional<std::int64_t> TimestampSet::first_at_or_after(std::int64_t t) const {
    auto it = std::lower_bound(ts_.begin(), ts_.end(), t);
    if (it == ts_.end()) return std::nullopt;
    return *it;
}

CompactGraph CompactGraph::build(std::span<const Event> events, const TimeWindow& window,
                                 const EntityRegistry& registry) {
    CompactGraph g;
    g.registry_ = &registry;
    g.window_ = window;

    auto local_id = [&g, &registry](EntityId e, EntityType t) -> std::uint32_t {
        auto it = g.local_.find(e);
        if (it != g.local_.end()) return it->second;
        const auto v = static_cast<std::uint32_t>(g.entities_.size());
        g.local_.emplace(e, v);
        g.entities_.push_back(e);
        g.types_.push_back(t);
        g.labels_.push_back(registry.get(e).id);
        return v;
    };

    // pair -> timestamps, keyed so adjacency comes out sorted
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::vector<std::int64_t>> pairs;

    for (const Event& e : events) {
        if (!window.contains(e.t)) {
            throw ValidationError("event at t=" + std::to_string(e.t) +
                                  " outside window [" + std::to_string(window.start) +
                                  ", " + std::to_string(window.end()) + ")");
        }
        const Entity& src = registry.get(e.src);
        const Entity& dst = registry.get(e.dst);
        if (g.host_.empty()) {
            g.host_ = src.host;
        }
        if (src.host != g.host_ || dst.host != g.host_) {
            throw ValidationError("events mix hosts '" + g.host_ + "' and '" +
                                  (src.host != g.host_ ? src.host : dst.host) + "'");
        }
        if (!allowed_interaction(src.etype, dst.etype)) {
            throw ValidationError(std::string("disallowed interaction ") +
                                  entity_type_code(src.etype) + "->" +
                                  entity_type_code(dst.etype));
        }
        const std::uint32_t u = local_id(e.src, src.etype);
        const std::uint32_t v = local_id(e.dst, dst.etype);
        pairs[{u, v}].push_back(e.t);
    }

    g.adjacency_.resize(g.entities_.size());
    for (auto& [key, ts] : pairs) {
        std::sort(ts.begin(), ts.end());
        ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
        g.timestamp_count_ += ts.size();
        g.adjacency_[key.first].push_back(GraphEdge{key.second, TimestampSet(std::move(ts))});
        ++g.edge_count_;
    }
    return g;
}

std::optional<std::uint32_t> CompactGraph::vertex_of(EntityId e) const {
    auto it = local_.find(e);
    if (it == local_.end()) return std::nullopt;
    return it->second;
}

const TimestampSet* CompactGraph::edge(std::uint32_t from, std::uint32_t to) const {
    const auto& row = adjacency_[from];
    auto it = std::lower_bound(row.begin(), row.end(), to,
                               [](const GraphEdge& e, std::uint32_t v) { return e.to < v; });
    if (it == row.end() || it->to != to) return nullptr;
    return &it->times;
}

GraphStats graph_stats(const CompactGraph& g) {
    GraphStats s;
    for (std::uint32_t v = 0; v < g.vertex_count(); ++v) {
        switch (g.type(v)) {
        case EntityType::Process: ++s.processes; break;
        case EntityType::File: ++s.files; break;
        case EntityType::INETSocket: ++s.inet_sockets; break;
        case EntityType::UDSocket: ++s.ud_sockets; break;
        }
    }
    s.edges = g.edge_count();
    return s;
}

nlohmann::ordered_json graph_to_json(const CompactGraph& g) {
    // sort by label for a stable dump independent of insertion order
    std::vector<std::uint32_t> order(g.vertex_count());
    for (std::uint32_t v = 0; v < g.vertex_count(); ++v) order[v] = v;
    std::sort(order.begin(), order.end(), [&g](std::uint32_t a, std::uint32_t b) {
        return g.label(a) < g.label(b);
    });

    nlohmann::ordered_json vertices = nlohmann::ordered_json::array();
    for (std::uint32_t v : order) {
        vertices.push_back({{"id", g.label(v)},
                            {"type", std::string(1, entity_type_code(g.type(v)))}});
    }

    nlohmann::ordered_json edges = nlohmann::ordered_json::array();
    for (std::uint32_t u : order) {
        for (const GraphEdge& e : g.out(u)) {
            nlohmann::ordered_json rec;
            rec["src"] = g.label(u);
            rec["dst"] = g.label(e.to);
            rec["timestamps"] = e.times.values();
            edges.push_back(std::move(rec));
        }
    }
    std::sort(edges.begin(), edges.end(),
              [](const nlohmann::ordered_json& a, const nlohmann::ordered_json& b) {
                  if (a["src"] != b["src"]) return a["src"] < b["src"];
                  return a["dst"] < b["dst"];
              });

    nlohmann::ordered_json out;
    out["host"] = g.host();
    out["window_start"] = g.window().start;
    out["window_secs"] = g.window().duration;
    out["vertices"] = std::move(vertices);
    out["edges"] = std::move(edges);
    return out;
}

} // namespace gid
