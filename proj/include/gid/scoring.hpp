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

#include <cstdint>
#include <span>
#include <vector>

namespace gid {

struct SparseEntry {
    std::uint32_t col = 0;
    double value = 0.0;
};

/// Row-stochastic transition matrix over the graph's vertices:
/// A[i][j] = |T(i,j)| / sum_k |T(i,k)|. Rows without out-edges are
/// flagged dangling and left empty.
class TransitionMatrix {
public:
    /// strict_blocks additionally zeroes process->process transitions and
    /// renormalizes those rows (rows emptied this way become dangling).
    static TransitionMatrix build(const CompactGraph& g, bool strict_blocks = false);

    std::uint32_t size() const { return n_; }
    std::span<const SparseEntry> row(std::uint32_t i) const;
    double prob(std::uint32_t i, std::uint32_t j) const; // 0 when absent
    bool dangling(std::uint32_t i) const { return dangling_[i] != 0; }
    std::size_t dangling_count() const { return dangling_count_; }

    /// out = A^T * v (accumulate along rows).
    void multiply_transposed(std::span<const double> v, std::span<double> out) const;
    /// out = A * v.
    void multiply(std::span<const double> v, std::span<double> out) const;

private:
    std::uint32_t n_ = 0;
    std::vector<std::size_t> row_start_; // size n+1
    std::vector<SparseEntry> entries_;
    std::vector<char> dangling_;
    std::size_t dangling_count_ = 0;
};

/// Restart-smoothed matrix kept implicit:
///   A_bar = (1 - c) * A' + c * R
/// where A' patches each dangling row with the uniform row and R is the
/// uniform matrix 1/N. Every entry is at least c/N, making the chain
/// irreducible and aperiodic.
class RestartedMatrix {
public:
    /// Throws ConfigError unless 0 < c < 1. Keeps a reference to the base
    /// matrix, which must outlive this view; temporaries are rejected.
    RestartedMatrix(const TransitionMatrix& a, double restart_ratio);
    RestartedMatrix(TransitionMatrix&& a, double restart_ratio) = delete;

    std::uint32_t size() const { return a_->size(); }
    double restart_ratio() const { return c_; }
    const TransitionMatrix& base() const { return *a_; }

    void multiply(std::span<const double> v, std::span<double> out) const;
    void multiply_transposed(std::span<const double> v, std::span<double> out) const;

    /// Materialized row, for invariant checks and small-N oracles.
    std::vector<double> dense_row(std::uint32_t i) const;

private:
    const TransitionMatrix* a_;
    double c_;
};

/// Converged sender/receiver importance vectors (both L1-normalized).
struct ScoreState {
    std::vector<double> sender;   // stationary importance as information source
    std::vector<double> receiver; // stationary importance as information sink
    int iterations_used = 0;
    double restart_ratio = 0.0;
    double residual = 0.0;
};

/// Coupled power iteration: alternate sender <- A_bar * receiver and
/// receiver <- A_bar^T * sender with L1 normalization after every
/// multiply, starting from uniform vectors (or the provided ones), until
/// the combined L1 change drops to tol. Throws ConvergenceError after
/// max_iter rounds.
ScoreState converge_scores(const RestartedMatrix& m, double tol = 1e-8,
                           int max_iter = 100,
                           const std::vector<double>* sender0 = nullptr,
                           const std::vector<double>* receiver0 = nullptr);

/// Path anomaly. The normality is the product over edges of
/// sender(v_i) * A(v_i, v_{i+1}) * receiver(v_{i+1}) using the raw
/// (un-restarted) transition matrix; anomaly = 1 - normality. The product
/// is accumulated in log space; log_normality is -inf when some factor is
/// zero.
struct PathScore {
    double normality = 0.0;     // NS in [0, 1]
    double log_normality = 0.0; // exact log of the product
    double anomaly = 1.0;       // 1 - normality
};

PathScore score_path(std::span<const std::uint32_t> verts, const ScoreState& state,
                     const TransitionMatrix& a);

} // namespace gid
