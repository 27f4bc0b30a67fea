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

#include "gid/search.hpp"

#include "gid/errors.hpp"

#include <algorithm>
#include <limits>

namespace gid {

namespace {

/// Depth-first expansion shared by candidate search and witness probing.
/// The visitor receives each emitted path and returns false to stop the
/// whole search.
template <typename Visitor>
class PathSearcher {
public:
    PathSearcher(const CompactGraph& g, const std::vector<PathPattern>* patterns,
                 const SearchOptions& options, Visitor visit)
        : g_(g), patterns_(patterns), options_(options), visit_(visit) {
        if (options_.max_len < 2) throw ConfigError("max_len must be at least 2");
        if (patterns_ != nullptr && patterns_->empty()) patterns_ = nullptr;
        in_path_.assign(g_.vertex_count(), 0);
        alive_.resize(options_.max_len);
    }

    void run() {
        for (std::uint32_t s = 0; s < g_.vertex_count() && !stopped_; ++s) {
            start_from(s);
        }
    }

private:
    void start_from(std::uint32_t s) {
        if (patterns_ != nullptr) {
            auto& alive = alive_[0];
            alive.clear();
            for (std::size_t i = 0; i < patterns_->size(); ++i) {
                if (slot_matches(i, 0, s)) alive.push_back(i);
            }
            if (alive.empty()) return;
        }
        verts_.assign(1, s);
        witnesses_.clear();
        in_path_[s] = 1;
        expand(0); // no previous edge yet
        in_path_[s] = 0;
    }

    bool slot_matches(std::size_t pattern, std::size_t slot, std::uint32_t v) const {
        return (*patterns_)[pattern].slots[slot].matches(g_.type(v), g_.label(v));
    }

    /// prev_min: under the pairwise rule, the minimum timestamp of the
    /// last edge taken; under strict_chain, the witness chosen for it.
    /// Meaningless while the path has a single node.
    void expand(std::int64_t prev_min) {
        if (stopped_ || verts_.size() >= options_.max_len) return;
        const std::uint32_t u = verts_.back();
        const std::size_t depth = verts_.size(); // index of the slot being filled

        for (const GraphEdge& edge : g_.out(u)) {
            if (stopped_) return;
            const std::uint32_t v = edge.to;
            if (in_path_[v]) continue; // simple paths only

            // time-order feasibility for the new hop
            std::int64_t witness;
            std::int64_t next_state;
            if (depth == 1) {
                witness = edge.times.min();
                next_state = options_.strict_chain ? witness : edge.times.min();
            } else if (options_.strict_chain) {
                auto t = edge.times.first_at_or_after(prev_min);
                if (!t) continue;
                witness = *t;
                next_state = witness;
            } else {
                if (edge.times.max() < prev_min) continue;
                // prefer a non-decreasing witness; restart when impossible
                auto t = edge.times.first_at_or_after(witnesses_.back());
                witness = t ? *t : edge.times.min();
                next_state = edge.times.min();
            }

            // pattern prefix compatibility
            if (patterns_ != nullptr) {
                auto& alive = alive_[depth];
                alive.clear();
                for (std::size_t p : alive_[depth - 1]) {
                    if ((*patterns_)[p].slots.size() > depth && slot_matches(p, depth, v)) {
                        alive.push_back(p);
                    }
                }
                if (alive.empty()) continue;
            }

            verts_.push_back(v);
            witnesses_.push_back(witness);
            in_path_[v] = 1;

            if (emittable()) {
                CandidatePath path{verts_, witnesses_};
                if (!visit_(path)) stopped_ = true;
            }
            if (!stopped_) expand(next_state);

            in_path_[v] = 0;
            witnesses_.pop_back();
            verts_.pop_back();
        }
    }

    bool emittable() const {
        if (options_.max_span) {
            auto [lo, hi] = std::minmax_element(witnesses_.begin(), witnesses_.end());
            if (*hi - *lo > *options_.max_span) return false;
        }
        if (patterns_ == nullptr) return true;
        for (std::size_t p : alive_[verts_.size() - 1]) {
            if ((*patterns_)[p].slots.size() == verts_.size()) return true;
        }
        return false;
    }

    const CompactGraph& g_;
    const std::vector<PathPattern>* patterns_;
    SearchOptions options_;
    Visitor visit_;
    std::vector<std::uint32_t> verts_;
    std::vector<std::int64_t> witnesses_;
    std::vector<char> in_path_;
    std::vector<std::vector<std::size_t>> alive_; // surviving pattern ids per depth
    bool stopped_ = false;
};

} // namespace

EventSequence CandidateSet::to_sequence(std::size_t i) const {
    const CandidatePath& p = paths[i];
    EventSequence seq;
    seq.nodes.reserve(p.verts.size());
    for (std::uint32_t v : p.verts) seq.nodes.push_back(graph->entity(v));
    seq.hop_times = p.hop_times;
    return seq;
}

CandidateSet find_candidates(const CompactGraph& g,
                             const std::vector<PathPattern>* patterns,
                             const SearchOptions& options) {
    CandidateSet result;
    result.graph = &g;

    PathSearcher searcher(g, patterns, options, [&result](const CandidatePath& p) {
        result.paths.push_back(p);
        return true;
    });
    searcher.run();

    std::sort(result.paths.begin(), result.paths.end(),
              [&g](const CandidatePath& a, const CandidatePath& b) {
                  if (a.verts.size() != b.verts.size())
                      return a.verts.size() < b.verts.size();
                  for (std::size_t i = 0; i < a.verts.size(); ++i) {
                      const std::string& la = g.label(a.verts[i]);
                      const std::string& lb = g.label(b.verts[i]);
                      if (la != lb) return la < lb;
                  }
                  return false;
              });
    return result;
}

bool pattern_has_witness(const CompactGraph& g, const PathPattern& pattern,
                         const SearchOptions& options) {
    if (pattern.check_well_formed().has_value()) return false;
    bool found = false;
    std::vector<PathPattern> one{pattern};
    PathSearcher searcher(g, &one, options, [&found](const CandidatePath&) {
        found = true;
        return false; // stop at first witness
    });
    searcher.run();
    return found;
}

} // namespace gid
