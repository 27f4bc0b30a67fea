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

#include "gid/detect.hpp"

#include "gid/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <unordered_map>

namespace gid {

bool path_key_less(const CompactGraph& g, const CandidatePath& a,
                   const CandidatePath& b) {
    const std::size_t n = std::min(a.verts.size(), b.verts.size());
    for (std::size_t i = 0; i < n; ++i) {
        const std::string& la = g.label(a.verts[i]);
        const std::string& lb = g.label(b.verts[i]);
        if (la != lb) return la < lb;
    }
    return a.verts.size() < b.verts.size();
}

namespace {

/// normalized descending, then path key ascending
bool ranked_before(const CompactGraph& g, const DetectedPath& a, const DetectedPath& b) {
    if (a.normalized != b.normalized) return a.normalized > b.normalized;
    return path_key_less(g, a.path, b.path);
}

} // namespace

ScoredCandidates score_and_normalize(const CandidateSet& candidates,
                                     const ScoreState& state,
                                     const TransitionMatrix& a, NormalizeOn mode) {
    ScoredCandidates out;
    out.all.reserve(candidates.size());

    std::map<std::size_t, std::vector<std::size_t>> groups; // length -> indices
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const CandidatePath& p = candidates.paths[i];
        const PathScore s = score_path(p.verts, state, a);
        DetectedPath d;
        d.candidate_index = i;
        d.path = p;
        d.log_normality = s.log_normality;
        d.normality = s.normality;
        d.anomaly = s.anomaly;
        out.all.push_back(std::move(d));
        groups[p.length()].push_back(i);
    }
    out.scored_count = candidates.size();

    for (const auto& [r, members] : groups) {
        std::vector<double> log_qs;
        log_qs.reserve(members.size());
        for (std::size_t i : members) {
            log_qs.push_back(log_q_from_log_normality(out.all[i].log_normality, mode));
        }
        GroupNormalization norm = normalize_group(log_qs, r);
        for (std::size_t j = 0; j < members.size(); ++j) {
            out.all[members[j]].normalized = norm.normalized[j];
        }
        out.stats[r] = norm.stats;
    }
    return out;
}

TopkResult topk_from_scored(const CandidateSet& candidates,
                            const ScoredCandidates& scored, std::size_t k) {
    if (k < 1) throw ConfigError("k must be at least 1");
    const CompactGraph& g = *candidates.graph;

    std::vector<std::size_t> order(scored.all.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        return ranked_before(g, scored.all[x], scored.all[y]);
    });

    TopkResult result;
    result.scored_count = scored.scored_count;
    result.stats = scored.stats;
    const std::size_t take = std::min(k, order.size());
    result.top.reserve(take);
    for (std::size_t i = 0; i < take; ++i) result.top.push_back(scored.all[order[i]]);
    return result;
}

TopkResult topk_exhaustive(const CandidateSet& candidates, const ScoreState& state,
                           const TransitionMatrix& a, const DetectParams& params) {
    const ScoredCandidates scored =
        score_and_normalize(candidates, state, a, params.normalize_on);
    return topk_from_scored(candidates, scored, params.k);
}

namespace {

/// Shared machinery for the cursor-based top-k variants.
struct CursorState {
    const CompactGraph& g;
    const CandidateSet& candidates;
    const ScoreState& state;
    const TransitionMatrix& a;
    NormalizeOn mode;

    struct EdgeRef {
        std::uint32_t from = 0;
        std::uint32_t to = 0;
        double prob = 0.0;
    };

    std::vector<EdgeRef> edges;
    std::vector<std::vector<std::size_t>> paths_by_vertex;
    std::vector<std::vector<std::size_t>> paths_by_edge;

    // ascending (or descending for the literal variant) value queues
    std::array<std::vector<std::uint32_t>, kEntityTypeCount> sender_queue;
    std::array<std::vector<std::uint32_t>, kEntityTypeCount> receiver_queue;
    std::vector<std::size_t> edge_queue; // indices into edges
    std::array<std::size_t, kEntityTypeCount> sender_cursor{};
    std::array<std::size_t, kEntityTypeCount> receiver_cursor{};
    std::size_t edge_cursor = 0;

    std::vector<char> vertex_seen;
    std::vector<char> scored;
    std::vector<DetectedPath> detail; // candidate index -> scored record
    std::vector<double> log_qs;
    std::size_t scored_count = 0;

    CursorState(const CompactGraph& graph, const CandidateSet& cands,
                const ScoreState& st, const TransitionMatrix& trans, NormalizeOn m,
                bool ascending)
        : g(graph), candidates(cands), state(st), a(trans), mode(m),
          ascending_(ascending) {
        const std::uint32_t n = g.vertex_count();
        paths_by_vertex.resize(n);
        vertex_seen.assign(n, 0);
        scored.assign(candidates.size(), 0);
        detail.resize(candidates.size());
        log_qs.assign(candidates.size(), 0.0);

        std::unordered_map<std::uint64_t, std::size_t> edge_index;
        for (std::uint32_t u = 0; u < n; ++u) {
            for (const GraphEdge& e : g.out(u)) {
                const std::uint64_t key =
                    (static_cast<std::uint64_t>(u) << 32) | e.to;
                edge_index.emplace(key, edges.size());
                edges.push_back(EdgeRef{u, e.to, a.prob(u, e.to)});
            }
        }
        paths_by_edge.resize(edges.size());

        for (std::size_t i = 0; i < candidates.size(); ++i) {
            const CandidatePath& p = candidates.paths[i];
            for (std::uint32_t v : p.verts) paths_by_vertex[v].push_back(i);
            for (std::size_t h = 0; h + 1 < p.verts.size(); ++h) {
                const std::uint64_t key =
                    (static_cast<std::uint64_t>(p.verts[h]) << 32) | p.verts[h + 1];
                paths_by_edge[edge_index.at(key)].push_back(i);
            }
        }

        // only vertices with out-edges can contribute a sender factor, and
        // only vertices with in-edges a receiver factor; everything else
        // stays out of the cursor queues so the bounds tighten sooner
        std::vector<char> has_in(n, 0);
        for (const EdgeRef& e : edges) has_in[e.to] = 1;
        for (std::uint32_t v = 0; v < n; ++v) {
            const auto t = static_cast<std::size_t>(g.type(v));
            if (!g.out(v).empty()) sender_queue[t].push_back(v);
            if (has_in[v]) receiver_queue[t].push_back(v);
        }
        auto by_value = [this, ascending](std::span<const double> values) {
            return [this, ascending, values](std::uint32_t x, std::uint32_t y) {
                if (values[x] != values[y])
                    return ascending ? values[x] < values[y] : values[x] > values[y];
                return g.label(x) < g.label(y);
            };
        };
        for (std::size_t t = 0; t < kEntityTypeCount; ++t) {
            std::sort(sender_queue[t].begin(), sender_queue[t].end(),
                      by_value(state.sender));
            std::sort(receiver_queue[t].begin(), receiver_queue[t].end(),
                      by_value(state.receiver));
        }
        edge_queue.resize(edges.size());
        for (std::size_t i = 0; i < edges.size(); ++i) edge_queue[i] = i;
        std::sort(edge_queue.begin(), edge_queue.end(),
                  [this, ascending](std::size_t x, std::size_t y) {
                      if (edges[x].prob != edges[y].prob)
                          return ascending ? edges[x].prob < edges[y].prob
                                           : edges[x].prob > edges[y].prob;
                      if (edges[x].from != edges[y].from)
                          return g.label(edges[x].from) < g.label(edges[y].from);
                      return g.label(edges[x].to) < g.label(edges[y].to);
                  });
    }

    template <typename OnScore>
    void score_candidate(std::size_t idx, OnScore&& on_score) {
        if (scored[idx]) return;
        scored[idx] = 1;
        const CandidatePath& p = candidates.paths[idx];
        const PathScore s = score_path(p.verts, state, a);
        DetectedPath d;
        d.candidate_index = idx;
        d.path = p;
        d.log_normality = s.log_normality;
        d.normality = s.normality;
        d.anomaly = s.anomaly;
        detail[idx] = std::move(d);
        log_qs[idx] = log_q_from_log_normality(s.log_normality, mode);
        ++scored_count;
        on_score(idx);
    }

    /// Pops one head from every non-exhausted queue and scores the paths
    /// touching the popped items. Returns false when all queues were
    /// already exhausted.
    template <typename OnScore>
    bool pop_batch(OnScore&& on_score) {
        bool popped = false;
        auto visit_vertex = [&](std::uint32_t v) {
            if (vertex_seen[v]) return;
            vertex_seen[v] = 1;
            for (std::size_t idx : paths_by_vertex[v]) score_candidate(idx, on_score);
        };
        for (std::size_t t = 0; t < kEntityTypeCount; ++t) {
            if (sender_cursor[t] < sender_queue[t].size()) {
                visit_vertex(sender_queue[t][sender_cursor[t]++]);
                popped = true;
            }
            if (receiver_cursor[t] < receiver_queue[t].size()) {
                visit_vertex(receiver_queue[t][receiver_cursor[t]++]);
                popped = true;
            }
        }
        if (edge_cursor < edge_queue.size()) {
            for (std::size_t idx : paths_by_edge[edge_queue[edge_cursor++]]) {
                score_candidate(idx, on_score);
            }
            popped = true;
        }
        return popped;
    }

    /// Extreme head value over the non-exhausted sender (or receiver)
    /// queues: with ascending queues this is the smallest score any
    /// unpopped vertex can carry. nullopt once everything has been
    /// popped.
    std::optional<double> head_value(bool sender) const {
        std::optional<double> best;
        for (std::size_t t = 0; t < kEntityTypeCount; ++t) {
            const auto& q = sender ? sender_queue[t] : receiver_queue[t];
            const std::size_t cur = sender ? sender_cursor[t] : receiver_cursor[t];
            if (cur < q.size()) {
                const double v =
                    sender ? state.sender[q[cur]] : state.receiver[q[cur]];
                if (!best || (ascending_ ? v < *best : v > *best)) best = v;
            }
        }
        return best;
    }

    std::optional<double> head_edge() const {
        if (edge_cursor >= edge_queue.size()) return std::nullopt;
        return edges[edge_queue[edge_cursor]].prob;
    }

    /// Lower bound on log NS over unseen paths with `hops` edges (valid
    /// with ascending queues: every factor of an unseen path is at least
    /// the corresponding head).
    std::optional<double> unseen_log_ns_bound(std::size_t hops) const {
        const auto x = head_value(true);
        const auto y = head_value(false);
        const auto e = head_edge();
        if (!x || !y || !e) return std::nullopt; // no unseen path remains
        return static_cast<double>(hops) * (std::log(*x) + std::log(*e) + std::log(*y));
    }

    bool ascending_ = true;
};

} // namespace

TopkResult topk_optimized(const CompactGraph& g,
                          const std::vector<PathPattern>* patterns,
                          const ScoreState& state, const TransitionMatrix& a,
                          const DetectParams& params, const SearchOptions& search_options,
                          const CandidateSet* candidates, const GroupStatsMap* stats) {
    if (params.k < 1) throw ConfigError("k must be at least 1");

    CandidateSet local;
    if (candidates == nullptr) {
        local = find_candidates(g, patterns, search_options);
        candidates = &local;
    }

    TopkResult result;
    if (candidates->size() == 0) {
        if (stats != nullptr) result.stats = *stats;
        return result;
    }

    CursorState cs(g, *candidates, state, a, params.normalize_on, /*ascending=*/true);
    const bool exact = stats != nullptr;

    // per length group: candidate count, scored count, current top-k
    std::map<std::size_t, std::size_t> group_total;
    for (const CandidatePath& p : candidates->paths) ++group_total[p.length()];

    struct Group {
        std::vector<std::size_t> top; // candidate indices, best first
        std::size_t scored = 0;
        bool done = false;
    };
    std::map<std::size_t, Group> groups;
    for (const auto& [r, total] : group_total) groups[r]; // materialize keys

    // ranking key inside one group: by normalized score when the final
    // stats are known, otherwise by the (order-equivalent) clamped log q
    auto better_in_group = [&](std::size_t x, std::size_t y) {
        if (exact) {
            const double nx = apply_group_stats(cs.log_qs[x],
                                                stats->at(cs.detail[x].path.length()));
            const double ny = apply_group_stats(cs.log_qs[y],
                                                stats->at(cs.detail[y].path.length()));
            if (nx != ny) return nx > ny;
        } else if (cs.log_qs[x] != cs.log_qs[y]) {
            return cs.log_qs[x] > cs.log_qs[y];
        }
        return path_key_less(g, cs.detail[x].path, cs.detail[y].path);
    };

    auto on_score = [&](std::size_t idx) {
        Group& grp = groups[cs.detail[idx].path.length()];
        ++grp.scored;
        auto pos = std::lower_bound(grp.top.begin(), grp.top.end(), idx, better_in_group);
        grp.top.insert(pos, idx);
        if (grp.top.size() > params.k) grp.top.pop_back();
    };

    while (true) {
        if (!cs.pop_batch(on_score)) break;

        bool all_done = true;
        for (auto& [r, grp] : groups) {
            if (grp.done) continue;
            if (grp.scored == group_total[r]) {
                grp.done = true;
                continue;
            }
            if (grp.top.size() == params.k) {
                const auto bound_lns = cs.unseen_log_ns_bound(r - 1);
                if (!bound_lns) {
                    grp.done = true;
                    continue;
                }
                const double bound_log_q =
                    log_q_from_log_normality(*bound_lns, params.normalize_on);
                const std::size_t kth = grp.top.back();
                bool sealed;
                if (exact) {
                    sealed = apply_group_stats(bound_log_q, stats->at(r)) <
                             apply_group_stats(cs.log_qs[kth], stats->at(r));
                } else {
                    sealed = bound_log_q < cs.log_qs[kth];
                }
                if (sealed) {
                    grp.done = true;
                    continue;
                }
            }
            all_done = false;
        }
        if (all_done) break;
    }

    // final stats: supplied (full-candidate fit) or refit on the scored set
    GroupStatsMap used_stats;
    if (exact) {
        used_stats = *stats;
    } else {
        std::map<std::size_t, std::vector<double>> group_log_qs;
        for (std::size_t i = 0; i < cs.scored.size(); ++i) {
            if (cs.scored[i]) {
                group_log_qs[cs.detail[i].path.length()].push_back(cs.log_qs[i]);
            }
        }
        for (const auto& [r, lqs] : group_log_qs) {
            used_stats[r] = normalize_group(lqs, r).stats;
        }
    }

    std::vector<DetectedPath> pool;
    for (const auto& [r, grp] : groups) {
        for (std::size_t idx : grp.top) {
            DetectedPath d = cs.detail[idx];
            d.normalized = apply_group_stats(cs.log_qs[idx], used_stats.at(r));
            pool.push_back(std::move(d));
        }
    }
    std::sort(pool.begin(), pool.end(), [&](const DetectedPath& x, const DetectedPath& y) {
        return ranked_before(g, x, y);
    });
    if (pool.size() > params.k) pool.resize(params.k);

    result.top = std::move(pool);
    result.scored_count = cs.scored_count;
    result.stats = std::move(used_stats);
    for (std::size_t i = 0; i < cs.scored.size(); ++i) {
        if (cs.scored[i]) result.explored.push_back(i);
    }
    return result;
}

TopkResult topk_literal_descending(const CompactGraph& g,
                                   const std::vector<PathPattern>* patterns,
                                   const ScoreState& state, const TransitionMatrix& a,
                                   const DetectParams& params,
                                   const SearchOptions& search_options,
                                   const CandidateSet* candidates) {
    if (params.k < 1) throw ConfigError("k must be at least 1");

    CandidateSet local;
    if (candidates == nullptr) {
        local = find_candidates(g, patterns, search_options);
        candidates = &local;
    }
    TopkResult result;
    if (candidates->size() == 0) return result;

    CursorState cs(g, *candidates, state, a, params.normalize_on, /*ascending=*/false);

    // running top-k by raw anomaly, worst entry last
    std::vector<std::size_t> sp;
    auto better_raw = [&](std::size_t x, std::size_t y) {
        if (cs.detail[x].log_normality != cs.detail[y].log_normality)
            return cs.detail[x].log_normality < cs.detail[y].log_normality;
        return path_key_less(g, cs.detail[x].path, cs.detail[y].path);
    };
    auto on_score = [&](std::size_t idx) {
        auto pos = std::lower_bound(sp.begin(), sp.end(), idx, better_raw);
        sp.insert(pos, idx);
        if (sp.size() > params.k) sp.pop_back();
    };

    while (true) {
        if (!cs.pop_batch(on_score)) break;
        if (sp.size() < params.k) continue;
        // compose the hypothetical next path from the current heads; with
        // descending queues this underestimates unseen anomaly and stops
        // too early by design (compared in log space to avoid the anomaly
        // saturating at 1)
        const auto x = cs.head_value(true);
        const auto y = cs.head_value(false);
        const auto e = cs.head_edge();
        if (!x || !y || !e) break;
        double hypothetical_lns = std::numeric_limits<double>::infinity();
        for (std::size_t r = 2; r <= params.max_len; ++r) {
            const double lns = static_cast<double>(r - 1) *
                               (std::log(*x) + std::log(*e) + std::log(*y));
            hypothetical_lns = std::min(hypothetical_lns, lns);
        }
        if (hypothetical_lns >= cs.detail[sp.back()].log_normality) break;
    }

    GroupStatsMap used_stats;
    std::map<std::size_t, std::vector<double>> group_log_qs;
    for (std::size_t i = 0; i < cs.scored.size(); ++i) {
        if (cs.scored[i]) {
            group_log_qs[cs.detail[i].path.length()].push_back(cs.log_qs[i]);
        }
    }
    for (const auto& [r, lqs] : group_log_qs) {
        used_stats[r] = normalize_group(lqs, r).stats;
    }

    for (std::size_t idx : sp) {
        DetectedPath d = cs.detail[idx];
        d.normalized =
            apply_group_stats(cs.log_qs[idx], used_stats.at(d.path.length()));
        result.top.push_back(std::move(d));
    }
    result.scored_count = cs.scored_count;
    result.stats = std::move(used_stats);
    for (std::size_t i = 0; i < cs.scored.size(); ++i) {
        if (cs.scored[i]) result.explored.push_back(i);
    }
    return result;
}

ValidationResult validate_suspicious(std::span<const double> suspicious,
                                     std::span<const double> remaining,
                                     double p_threshold, double confidence_threshold) {
    ValidationResult v;
    if (suspicious.empty() || remaining.empty()) {
        v.degenerate = true;
        return v;
    }
    const WelchResult w = welch_one_sided(suspicious, remaining);
    v.degenerate = w.degenerate;
    v.t_statistic = w.t;
    v.p_value = w.p_one_sided;
    v.validated = !w.degenerate && v.p_value < p_threshold &&
                  (1.0 - v.p_value) > confidence_threshold;
    return v;
}

nlohmann::ordered_json alert_report_to_json(const AlertReport& report,
                                            const CompactGraph& g) {
    nlohmann::ordered_json out;
    out["host"] = report.host;
    out["window_start"] = report.window.start;
    out["window_secs"] = report.window.duration;
    out["validated"] = report.validation.validated;
    out["t_statistic"] = report.validation.t_statistic;
    out["p_value"] = report.validation.p_value;
    out["degenerate_validation"] = report.validation.degenerate;
    out["candidates"] = report.candidate_count;
    out["scored_count"] = report.scored_count;

    nlohmann::ordered_json alerts = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < report.suspicious.size(); ++i) {
        const DetectedPath& d = report.suspicious[i];
        nlohmann::ordered_json alert;
        alert["rank"] = i + 1;
        alert["score"] = d.normalized;
        alert["raw_score"] = d.anomaly;
        nlohmann::ordered_json path = nlohmann::ordered_json::array();
        for (std::uint32_t v : d.path.verts) {
            path.push_back({{"id", g.label(v)},
                            {"type", std::string(1, entity_type_code(g.type(v)))}});
        }
        alert["path"] = std::move(path);
        alert["hop_timestamps"] = d.path.hop_times;
        alerts.push_back(std::move(alert));
    }
    out["alerts"] = std::move(alerts);
    return out;
}

} // namespace gid
