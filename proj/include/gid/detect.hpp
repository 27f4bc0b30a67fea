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

#include "gid/normalize.hpp"
#include "gid/scoring.hpp"
#include "gid/search.hpp"
#include "gid/stat_util.hpp"

#include <json.hpp>

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace gid {

struct DetectParams {
    std::size_t k = 10;
    std::size_t max_len = 5;
    /// NegLogNs by default: the anomaly scores of long paths saturate at
    /// 1 in double precision, which erases the within-group ordering the
    /// ranking depends on; -log NS carries the same order with full
    /// precision.
    NormalizeOn normalize_on = NormalizeOn::NegLogNs;
    double p_threshold = 0.05;
    double confidence_threshold = 0.9;
};

/// A candidate with its anomaly and normalized scores.
struct DetectedPath {
    std::size_t candidate_index = 0; // into the originating CandidateSet
    CandidatePath path;
    double log_normality = 0.0;
    double normality = 0.0;
    double anomaly = 1.0;     // 1 - normality, exactly
    double normalized = 0.0;  // per-length Box-Cox standardized score
};

using GroupStatsMap = std::map<std::size_t, LengthGroupStats>; // keyed by length

/// Every candidate scored and normalized per length group; the input the
/// validation gate and the exhaustive top-k both consume.
struct ScoredCandidates {
    std::vector<DetectedPath> all; // candidate order
    GroupStatsMap stats;
    std::size_t scored_count = 0;
};

ScoredCandidates score_and_normalize(const CandidateSet& candidates,
                                     const ScoreState& state,
                                     const TransitionMatrix& a, NormalizeOn mode);

struct TopkResult {
    std::vector<DetectedPath> top; // descending normalized score
    std::size_t scored_count = 0;
    GroupStatsMap stats;
    /// Candidate indices the cursor loop actually scored (filled by the
    /// optimized variants; exhaustive scores everything).
    std::vector<std::size_t> explored;
};

/// Scores every candidate and returns the k highest normalized scores,
/// ties broken by the lexicographic path key.
TopkResult topk_exhaustive(const CandidateSet& candidates, const ScoreState& state,
                           const TransitionMatrix& a, const DetectParams& params);

/// Selection from an already scored set (shared by the pipeline).
TopkResult topk_from_scored(const CandidateSet& candidates,
                            const ScoredCandidates& scored, std::size_t k);

/// Threshold-style top-k: ascending sender/receiver cursors per entity
/// type plus an ascending edge cursor by transition probability; paths
/// touching popped items are scored lazily and exploration stops once no
/// unseen path can beat the k-th best. When `stats` is supplied (the
/// pipeline computes it for the validation gate anyway) the returned set
/// and order equal topk_exhaustive exactly; otherwise the final ranking
/// is re-normalized over the scored subset.
///
/// `candidates` may be passed to reuse an existing search; otherwise the
/// search runs internally. scored_count counts path score evaluations
/// performed by the cursor loop.
TopkResult topk_optimized(const CompactGraph& g,
                          const std::vector<PathPattern>* patterns,
                          const ScoreState& state, const TransitionMatrix& a,
                          const DetectParams& params, const SearchOptions& search_options,
                          const CandidateSet* candidates = nullptr,
                          const GroupStatsMap* stats = nullptr);

/// Cursor loop with descending queues and the stopping rule composed from
/// the popped batch. Kept for comparison only; that ordering makes the
/// stopping rule unsound and it may miss paths.
TopkResult topk_literal_descending(const CompactGraph& g,
                                   const std::vector<PathPattern>* patterns,
                                   const ScoreState& state, const TransitionMatrix& a,
                                   const DetectParams& params,
                                   const SearchOptions& search_options,
                                   const CandidateSet* candidates = nullptr);

struct ValidationResult {
    bool validated = false;
    bool degenerate = false;
    double t_statistic = 0.0;
    double p_value = 1.0;
};

/// Welch one-sided t-test of the suspicious scores against the remaining
/// candidates; validated when p < p_threshold and 1 - p >
/// confidence_threshold.
ValidationResult validate_suspicious(std::span<const double> suspicious,
                                     std::span<const double> remaining,
                                     double p_threshold, double confidence_threshold);

/// Per-(host, window) detection outcome in report form.
struct AlertReport {
    std::string host;
    TimeWindow window;
    std::vector<DetectedPath> suspicious;
    ValidationResult validation;
    std::size_t candidate_count = 0;
    std::size_t scored_count = 0;
};

nlohmann::ordered_json alert_report_to_json(const AlertReport& report,
                                            const CompactGraph& g);

/// Stable tie-break key: entity id sequence compared elementwise.
bool path_key_less(const CompactGraph& g, const CandidatePath& a,
                   const CandidatePath& b);

} // namespace gid
