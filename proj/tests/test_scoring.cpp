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

#include "gid/errors.hpp"
#include "gid/scoring.hpp"

#include "test_support.hpp"

#include <doctest.h>

using namespace gid;
using namespace gid::test;

TEST_CASE("single out-edge row has probability one") {
    auto fx = make_graph({EntityType::Process, EntityType::File}, {{0, 1, 10}});
    const TransitionMatrix a = TransitionMatrix::build(fx.graph);
    CHECK(a.prob(0, 1) == doctest::Approx(1.0));
    CHECK_FALSE(a.dangling(0));
    CHECK(a.dangling(1));
}

TEST_CASE("transition probabilities follow timestamp counts") {
    // out-edges with |T| = 2 and |T| = 3 give 0.4 and 0.6
    auto fx = make_graph({EntityType::Process, EntityType::File, EntityType::File},
                         {{0, 1, 1}, {0, 1, 2}, {0, 2, 3}, {0, 2, 4}, {0, 2, 5}});
    const TransitionMatrix a = TransitionMatrix::build(fx.graph);
    CHECK(a.prob(0, 1) == doctest::Approx(0.4));
    CHECK(a.prob(0, 2) == doctest::Approx(0.6));
}

TEST_CASE("non-dangling rows sum to one on random graphs") {
    std::mt19937_64 rng(61);
    for (int trial = 0; trial < 40; ++trial) {
        auto fx = make_random_graph(rng, 25, 0.2, 4);
        if (fx.graph.vertex_count() == 0) continue;
        const TransitionMatrix a = TransitionMatrix::build(fx.graph);
        for (std::uint32_t i = 0; i < a.size(); ++i) {
            double sum = 0.0;
            for (const SparseEntry& e : a.row(i)) {
                CHECK(e.value >= 0.0);
                sum += e.value;
            }
            if (a.dangling(i)) {
                CHECK(sum == 0.0);
            } else {
                CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("restart mixes the two-cycle to the known matrix") {
    auto fx = make_graph({EntityType::File, EntityType::Process},
                         {{0, 1, 1}, {1, 0, 2}});
    const TransitionMatrix a = TransitionMatrix::build(fx.graph);
    const RestartedMatrix abar(a, 0.6);
    const auto row0 = abar.dense_row(0);
    const auto row1 = abar.dense_row(1);
    CHECK(row0[0] == doctest::Approx(0.3));
    CHECK(row0[1] == doctest::Approx(0.7));
    CHECK(row1[0] == doctest::Approx(0.7));
    CHECK(row1[1] == doctest::Approx(0.3));
}

TEST_CASE("dangling rows become uniform under restart") {
    // N = 4, one vertex with no out-edges: its restarted row is uniform
    auto fx = make_graph(
        {EntityType::Process, EntityType::File, EntityType::File, EntityType::File},
        {{0, 1, 1}, {0, 2, 2}, {0, 3, 3}, {1, 0, 4}, {2, 0, 5}});
    const TransitionMatrix a = TransitionMatrix::build(fx.graph);
    REQUIRE(a.dangling(3));
    const RestartedMatrix abar(a, 0.6);
    const auto row = abar.dense_row(3);
    for (double v : row) CHECK(v == doctest::Approx(0.25));
}

TEST_CASE("restart ratio outside (0,1) is rejected") {
    auto fx = make_graph({EntityType::File, EntityType::Process}, {{0, 1, 1}});
    const TransitionMatrix a = TransitionMatrix::build(fx.graph);
    CHECK_THROWS_AS(RestartedMatrix(a, 0.0), ConfigError);
    CHECK_THROWS_AS(RestartedMatrix(a, 1.0), ConfigError);
    CHECK_THROWS_AS(RestartedMatrix(a, -0.2), ConfigError);
}

TEST_CASE("restarted rows are stochastic with floor c/N") {
    std::mt19937_64 rng(67);
    for (int trial = 0; trial < 30; ++trial) {
        auto fx = make_random_graph(rng, 18, 0.2, 3);
        if (fx.graph.vertex_count() == 0) continue;
        const TransitionMatrix a = TransitionMatrix::build(fx.graph);
        const RestartedMatrix abar(a, 0.6);
        const double n = fx.graph.vertex_count();
        for (std::uint32_t i = 0; i < abar.size(); ++i) {
            const auto row = abar.dense_row(i);
            double sum = 0.0;
            for (std::uint32_t j = 0; j < row.size(); ++j) {
                sum += row[j];
                CHECK(row[j] >= 0.6 / n - 1e-12);
                const double base = a.dangling(i) ? 1.0 / n : a.prob(i, j);
                if (base == 0.0) {
                    CHECK(row[j] == doctest::Approx(0.6 / n).epsilon(1e-12));
                }
            }
            CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
        }
    }
}

TEST_CASE("symmetric two-cycle converges to equal scores") {
    auto fx = make_graph({EntityType::File, EntityType::Process},
                         {{0, 1, 1}, {1, 0, 2}});
    const TransitionMatrix a = TransitionMatrix::build(fx.graph);
    const RestartedMatrix abar(a, 0.6);
    const ScoreState s = converge_scores(abar);
    CHECK(s.sender[0] == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(s.sender[1] == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(s.receiver[0] == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(s.receiver[1] == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("sender vector matches the dense eigen-oracle") {
    std::mt19937_64 rng(71);
    int tested = 0;
    while (tested < 15) {
        auto fx = make_random_graph(rng, 6 + static_cast<int>(rng() % 15), 0.3, 3);
        if (fx.graph.vertex_count() < 2) continue;
        const TransitionMatrix a = TransitionMatrix::build(fx.graph);
        const RestartedMatrix abar(a, 0.6);
        const ScoreState s = converge_scores(abar, 1e-12, 200);
        const auto oracle = oracle_dominant_eigenvector(abar, 5000);
        CHECK(cosine_similarity(s.sender, oracle) >= 1.0 - 1e-6);
        ++tested;
    }
}

TEST_CASE("convergence is fast at the default restart ratio") {
    std::mt19937_64 rng(73);
    for (int trial = 0; trial < 20; ++trial) {
        auto fx = make_random_graph(rng, 30, 0.15, 3);
        if (fx.graph.vertex_count() < 2) continue;
        const TransitionMatrix a = TransitionMatrix::build(fx.graph);
        const RestartedMatrix abar(a, 0.6);
        const ScoreState s = converge_scores(abar, 1e-8, 100);
        CHECK(s.iterations_used <= 20);
        // converged point satisfies the fixed-point property
        std::vector<double> next(abar.size());
        abar.multiply(s.receiver, next);
        double norm = 0.0;
        for (double v : next) norm += std::abs(v);
        double diff = 0.0;
        for (std::size_t i = 0; i < next.size(); ++i) {
            diff += std::abs(s.sender[i] - next[i] / norm);
        }
        CHECK(diff <= 1e-6);
    }
}

TEST_CASE("converged scores are independent of the start") {
    std::mt19937_64 rng(79);
    auto fx = make_random_graph(rng, 20, 0.25, 3);
    const TransitionMatrix a = TransitionMatrix::build(fx.graph);
    const RestartedMatrix abar(a, 0.6);

    std::uniform_real_distribution<double> u(0.1, 5.0);
    std::vector<double> x0(abar.size()), y0(abar.size());
    for (auto& v : x0) v = u(rng);
    for (auto& v : y0) v = u(rng);
    std::vector<double> x1(abar.size()), y1(abar.size());
    for (auto& v : x1) v = u(rng);
    for (auto& v : y1) v = u(rng);

    const ScoreState s1 = converge_scores(abar, 1e-12, 300, &x0, &y0);
    const ScoreState s2 = converge_scores(abar, 1e-12, 300, &x1, &y1);
    double dx = 0.0, dy = 0.0;
    for (std::size_t i = 0; i < s1.sender.size(); ++i) {
        dx += std::abs(s1.sender[i] - s2.sender[i]);
        dy += std::abs(s1.receiver[i] - s2.receiver[i]);
    }
    CHECK(dx <= 1e-6);
    CHECK(dy <= 1e-6);
}

TEST_CASE("score vectors stay L1-normalized") {
    std::mt19937_64 rng(83);
    for (int trial = 0; trial < 10; ++trial) {
        auto fx = make_random_graph(rng, 15, 0.3, 2);
        const TransitionMatrix a = TransitionMatrix::build(fx.graph);
        const ScoreState s = converge_scores(RestartedMatrix(a, 0.6));
        double sx = 0.0, sy = 0.0;
        for (double v : s.sender) {
            CHECK(v > 0.0);
            sx += v;
        }
        for (double v : s.receiver) {
            CHECK(v > 0.0);
            sy += v;
        }
        CHECK(sx == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(sy == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("non-convergence raises with the last residual") {
    std::mt19937_64 rng(89);
    auto fx = make_random_graph(rng, 20, 0.3, 3);
    const TransitionMatrix a = TransitionMatrix::build(fx.graph);
    const RestartedMatrix abar(a, 0.6);
    CHECK_THROWS_AS(converge_scores(abar, 1e-300, 2), ConvergenceError);
    try {
        converge_scores(abar, 1e-300, 2);
    } catch (const ConvergenceError& e) {
        CHECK(e.residual() > 0.0);
    }
}

TEST_CASE("a zero-probability edge makes the path maximally anomalous") {
    auto fx = make_graph({EntityType::File, EntityType::Process, EntityType::File},
                         {{0, 1, 1}, {1, 2, 2}});
    const TransitionMatrix a = TransitionMatrix::build(fx.graph);
    const ScoreState s = converge_scores(RestartedMatrix(a, 0.6));
    // vertex 2 -> 0 has no edge: A = 0
    const std::vector<std::uint32_t> path = {2, 0};
    const PathScore score = score_path(path, s, a);
    CHECK(score.normality == 0.0);
    CHECK(score.anomaly == 1.0);
    CHECK(std::isinf(score.log_normality));
}

TEST_CASE("path score matches an independent long-double product") {
    std::mt19937_64 rng(97);
    for (int trial = 0; trial < 20; ++trial) {
        auto fx = make_random_graph(rng, 15, 0.3, 3);
        const TransitionMatrix a = TransitionMatrix::build(fx.graph);
        const ScoreState s = converge_scores(RestartedMatrix(a, 0.6));
        SearchOptions opt;
        opt.max_len = 4;
        const CandidateSet c = find_candidates(fx.graph, nullptr, opt);
        for (std::size_t i = 0; i < std::min<std::size_t>(c.size(), 50); ++i) {
            const auto& verts = c.paths[i].verts;
            long double product = 1.0L;
            for (std::size_t h = 0; h + 1 < verts.size(); ++h) {
                product *= static_cast<long double>(s.sender[verts[h]]) *
                           a.prob(verts[h], verts[h + 1]) * s.receiver[verts[h + 1]];
            }
            const PathScore score = score_path(verts, s, a);
            CHECK(score.normality ==
                  doctest::Approx(static_cast<double>(product)).epsilon(1e-12));
            CHECK(score.anomaly == 1.0 - score.normality); // exact complement
            CHECK(score.normality >= 0.0);
            CHECK(score.normality <= 1.0);
        }
    }
}

TEST_CASE("higher edge probability lowers the anomaly score") {
    // identical paths except one edge probability
    auto fx = make_graph({EntityType::Process, EntityType::File, EntityType::File},
                         {{0, 1, 1}, {0, 2, 2}, {0, 2, 3}, {0, 2, 4}});
    const TransitionMatrix a = TransitionMatrix::build(fx.graph);
    const ScoreState s = converge_scores(RestartedMatrix(a, 0.6));
    const PathScore rare = score_path(std::vector<std::uint32_t>{0, 1}, s, a);
    const PathScore common = score_path(std::vector<std::uint32_t>{0, 2}, s, a);
    // same sender, receivers converge to the same score by symmetry of the
    // dangling files; the probability factor decides
    CHECK(a.prob(0, 1) < a.prob(0, 2));
    CHECK(rare.anomaly > common.anomaly);
}

TEST_CASE("monotone dominance of factors transfers to scores") {
    // random component-wise dominated factor sequences
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> u(1e-6, 1.0);
    std::uniform_int_distribution<int> len(1, 4);
    for (int trial = 0; trial < 500; ++trial) {
        const int hops = len(rng);
        long double ns_low = 1.0L, ns_high = 1.0L;
        for (int h = 0; h < hops; ++h) {
            const double x_hi = u(rng), e_hi = u(rng), y_hi = u(rng);
            const double x_lo = x_hi * u(rng), e_lo = e_hi * u(rng),
                         y_lo = y_hi * u(rng);
            ns_low *= static_cast<long double>(x_lo) * e_lo * y_lo;
            ns_high *= static_cast<long double>(x_hi) * e_hi * y_hi;
        }
        CHECK(ns_low <= ns_high);
        CHECK(1.0L - ns_low >= 1.0L - ns_high); // anomaly order flips
    }
}

TEST_CASE("transition matrix has the expected zero blocks") {
    // graph free of process->process events: information can only flow
    // along P<->F, P<->sockets and U->U
    std::mt19937_64 rng(103);
    auto fx = make_random_graph(rng, 30, 0.3, 2);
    const TransitionMatrix a = TransitionMatrix::build(fx.graph);
    for (std::uint32_t i = 0; i < a.size(); ++i) {
        for (const SparseEntry& e : a.row(i)) {
            const EntityType ti = fx.graph.type(i);
            const EntityType tj = fx.graph.type(e.col);
            const bool in_allowed_block =
                (ti == EntityType::Process &&
                 (tj == EntityType::File || tj == EntityType::UDSocket ||
                  tj == EntityType::INETSocket || tj == EntityType::Process)) ||
                ((ti == EntityType::File || ti == EntityType::INETSocket) &&
                 tj == EntityType::Process) ||
                (ti == EntityType::UDSocket &&
                 (tj == EntityType::Process || tj == EntityType::UDSocket));
            CHECK(in_allowed_block);
        }
    }
}

TEST_CASE("strict block mode removes process-to-process flow") {
    auto fx = make_graph({EntityType::Process, EntityType::Process, EntityType::File},
                         {{0, 1, 1}, {0, 2, 2}});
    const TransitionMatrix relaxed = TransitionMatrix::build(fx.graph, false);
    CHECK(relaxed.prob(0, 1) == doctest::Approx(0.5));
    const TransitionMatrix strict = TransitionMatrix::build(fx.graph, true);
    CHECK(strict.prob(0, 1) == 0.0);
    CHECK(strict.prob(0, 2) == doctest::Approx(1.0)); // renormalized

    // a row consisting only of P->P edges becomes dangling
    auto fx2 = make_graph({EntityType::Process, EntityType::Process}, {{0, 1, 1}});
    const TransitionMatrix strict2 = TransitionMatrix::build(fx2.graph, true);
    CHECK(strict2.dangling(0));
}
