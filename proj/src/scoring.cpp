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

#include "gid/scoring.hpp"

#include "gid/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace gid {

TransitionMatrix TransitionMatrix::build(const CompactGraph& g, bool strict_blocks) {
    TransitionMatrix m;
    m.n_ = g.vertex_count();
    m.row_start_.assign(m.n_ + 1, 0);
    m.dangling_.assign(m.n_, 0);

    for (std::uint32_t i = 0; i < m.n_; ++i) {
        m.row_start_[i] = m.entries_.size();
        double total = 0.0;
        for (const GraphEdge& e : g.out(i)) {
            if (strict_blocks && g.type(i) == EntityType::Process &&
                g.type(e.to) == EntityType::Process) {
                continue;
            }
            total += static_cast<double>(e.times.size());
        }
        if (total == 0.0) {
            m.dangling_[i] = 1;
            ++m.dangling_count_;
            continue;
        }
        for (const GraphEdge& e : g.out(i)) {
            if (strict_blocks && g.type(i) == EntityType::Process &&
                g.type(e.to) == EntityType::Process) {
                continue;
            }
            m.entries_.push_back(
                SparseEntry{e.to, static_cast<double>(e.times.size()) / total});
        }
    }
    m.row_start_[m.n_] = m.entries_.size();
    return m;
}

std::span<const SparseEntry> TransitionMatrix::row(std::uint32_t i) const {
    return {entries_.data() + row_start_[i], row_start_[i + 1] - row_start_[i]};
}

double TransitionMatrix::prob(std::uint32_t i, std::uint32_t j) const {
    for (const SparseEntry& e : row(i)) {
        if (e.col == j) return e.value;
    }
    return 0.0;
}

void TransitionMatrix::multiply_transposed(std::span<const double> v,
                                           std::span<double> out) const {
    std::fill(out.begin(), out.end(), 0.0);
    for (std::uint32_t i = 0; i < n_; ++i) {
        const double vi = v[i];
        if (vi == 0.0) continue;
        for (const SparseEntry& e : row(i)) out[e.col] += e.value * vi;
    }
}

void TransitionMatrix::multiply(std::span<const double> v, std::span<double> out) const {
    for (std::uint32_t i = 0; i < n_; ++i) {
        double acc = 0.0;
        for (const SparseEntry& e : row(i)) acc += e.value * v[e.col];
        out[i] = acc;
    }
}

RestartedMatrix::RestartedMatrix(const TransitionMatrix& a, double restart_ratio)
    : a_(&a), c_(restart_ratio) {
    if (!(restart_ratio > 0.0 && restart_ratio < 1.0)) {
        throw ConfigError("restart ratio must lie strictly between 0 and 1");
    }
}

void RestartedMatrix::multiply(std::span<const double> v, std::span<double> out) const {
    const std::uint32_t n = size();
    const double sum = std::accumulate(v.begin(), v.end(), 0.0);
    const double uniform = sum / static_cast<double>(n);
    a_->multiply(v, out);
    for (std::uint32_t i = 0; i < n; ++i) {
        // dangling rows act as the uniform row before restart mixing
        const double base = a_->dangling(i) ? uniform : out[i];
        out[i] = (1.0 - c_) * base + c_ * uniform;
    }
}

void RestartedMatrix::multiply_transposed(std::span<const double> v,
                                          std::span<double> out) const {
    const std::uint32_t n = size();
    const double sum = std::accumulate(v.begin(), v.end(), 0.0);
    double dangling_mass = 0.0;
    for (std::uint32_t i = 0; i < n; ++i) {
        if (a_->dangling(i)) dangling_mass += v[i];
    }
    a_->multiply_transposed(v, out);
    const double add = ((1.0 - c_) * dangling_mass + c_ * sum) / static_cast<double>(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        out[i] = (1.0 - c_) * out[i] + add;
    }
}

std::vector<double> RestartedMatrix::dense_row(std::uint32_t i) const {
    const std::uint32_t n = size();
    std::vector<double> row(n, 0.0);
    if (a_->dangling(i)) {
        std::fill(row.begin(), row.end(), 1.0 / static_cast<double>(n));
    } else {
        for (const SparseEntry& e : a_->row(i)) row[e.col] = e.value;
    }
    for (std::uint32_t j = 0; j < n; ++j) {
        row[j] = (1.0 - c_) * row[j] + c_ / static_cast<double>(n);
    }
    return row;
}

namespace {

double l1_normalize(std::span<double> v) {
    double sum = 0.0;
    for (double x : v) sum += std::abs(x);
    if (sum > 0.0) {
        for (double& x : v) x /= sum;
    }
    return sum;
}

double l1_distance(std::span<const double> a, std::span<const double> b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d += std::abs(a[i] - b[i]);
    return d;
}

} // namespace

ScoreState converge_scores(const RestartedMatrix& m, double tol, int max_iter,
                           const std::vector<double>* sender0,
                           const std::vector<double>* receiver0) {
    const std::uint32_t n = m.size();
    if (n == 0) throw ConfigError("cannot run random walk on an empty graph");

    ScoreState state;
    state.restart_ratio = m.restart_ratio();
    state.sender.assign(n, 1.0 / static_cast<double>(n));
    state.receiver.assign(n, 1.0 / static_cast<double>(n));
    if (sender0 != nullptr) {
        state.sender = *sender0;
        l1_normalize(state.sender);
    }
    if (receiver0 != nullptr) {
        state.receiver = *receiver0;
        l1_normalize(state.receiver);
    }

    std::vector<double> next(n, 0.0);
    std::vector<double> prev_sender(n), prev_receiver(n);

    for (int iter = 1; iter <= max_iter; ++iter) {
        prev_sender = state.sender;
        prev_receiver = state.receiver;

        m.multiply(state.receiver, next);
        l1_normalize(next);
        state.sender.swap(next);

        m.multiply_transposed(state.sender, next);
        l1_normalize(next);
        state.receiver.swap(next);

        state.iterations_used = iter;
        state.residual = l1_distance(state.sender, prev_sender) +
                         l1_distance(state.receiver, prev_receiver);
        if (state.residual <= tol) return state;
    }
    throw ConvergenceError("random walk did not converge within " +
                               std::to_string(max_iter) + " iterations (residual " +
                               std::to_string(state.residual) + ")",
                           state.residual);
}

PathScore score_path(std::span<const std::uint32_t> verts, const ScoreState& state,
                     const TransitionMatrix& a) {
    PathScore score;
    double log_ns = 0.0;
    for (std::size_t i = 0; i + 1 < verts.size(); ++i) {
        const double factor = state.sender[verts[i]] * a.prob(verts[i], verts[i + 1]) *
                              state.receiver[verts[i + 1]];
        if (factor <= 0.0) {
            log_ns = -std::numeric_limits<double>::infinity();
            break;
        }
        log_ns += std::log(factor);
    }
    score.log_normality = log_ns;
    score.normality = std::exp(log_ns);
    score.anomaly = 1.0 - score.normality;
    return score;
}

} // namespace gid
