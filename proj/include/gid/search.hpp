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

#include "gid/graph.hpp"
#include "gid/pattern.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace gid {

struct SearchOptions {
    std::size_t max_len = 5; // maximum nodes per path
    /// Default time-order rule is the adjacent-pairwise one: for every
    /// consecutive edge pair some t1 <= t2 exists. strict_chain instead
    /// demands a single non-decreasing timestamp chain across all hops.
    bool strict_chain = false;
    /// Optional cap on max(hop witness) - min(hop witness).
    std::optional<std::int64_t> max_span;
};

/// Simple path in graph-local vertex ids, with one witness timestamp per
/// hop. Under the pairwise rule the witness chain restarts where no
/// non-decreasing continuation exists; under strict_chain it is globally
/// non-decreasing.
struct CandidatePath {
    std::vector<std::uint32_t> verts;
    std::vector<std::int64_t> hop_times;

    std::size_t length() const { return verts.size(); }

    bool operator==(const CandidatePath&) const = default;
};

struct CandidateSet {
    const CompactGraph* graph = nullptr;
    std::vector<CandidatePath> paths;

    std::size_t size() const { return paths.size(); }
    EventSequence to_sequence(std::size_t i) const;
};

/// Finds every simple path of 2..max_len nodes that is consistent with
/// some pattern (or any path, when patterns is null/empty) and satisfies
/// the time-order rule. Emission order is deterministic: by length, then
/// entity ids. Throws ConfigError when max_len < 2.
CandidateSet find_candidates(const CompactGraph& g,
                             const std::vector<PathPattern>* patterns,
                             const SearchOptions& options);

/// Early-exit probe: does at least one candidate match this pattern?
bool pattern_has_witness(const CompactGraph& g, const PathPattern& pattern,
                         const SearchOptions& options);

} // namespace gid
