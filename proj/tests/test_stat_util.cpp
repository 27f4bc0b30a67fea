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

#include "gid/stat_util.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <random>

using namespace gid;
using namespace gid::test;

TEST_CASE("t tail probabilities match quadrature") {
    for (double df : {1.0, 2.0, 5.0, 9.7, 30.0, 200.0}) {
        for (double t : {-4.0, -1.0, 0.0, 0.5, 2.0, 6.5}) {
            const double mine = student_t_sf(t, df);
            const double oracle = oracle_t_tail(t, df);
            CHECK(mine == doctest::Approx(oracle).epsilon(1e-9));
        }
    }
    CHECK(student_t_sf(0.0, 7.0) == doctest::Approx(0.5));
}

TEST_CASE("normal quantile inverts the normal cdf") {
    for (double p : {1e-6, 0.01, 0.1, 0.25, 0.5, 0.75, 0.9, 0.99, 1.0 - 1e-6}) {
        const double x = normal_quantile(p);
        const double back = 0.5 * std::erfc(-x / std::sqrt(2.0));
        CHECK(back == doctest::Approx(p).epsilon(1e-9));
    }
    CHECK(normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("skewness of symmetric and skewed samples") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> sym, skewed;
    for (int i = 0; i < 20000; ++i) {
        const double x = normal(rng);
        sym.push_back(x);
        skewed.push_back(std::exp(x));
    }
    CHECK(std::fabs(skewness(sym)) < 0.1);
    CHECK(skewness(skewed) > 2.0); // log-normal is heavily right-skewed
}

TEST_CASE("welch statistic matches the long-double oracle") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> base(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> a, b;
        const int na = 2 + static_cast<int>(rng() % 20);
        const int nb = 2 + static_cast<int>(rng() % 400);
        const double shift = (trial % 5) * 0.7;
        for (int i = 0; i < na; ++i) a.push_back(base(rng) + shift);
        for (int i = 0; i < nb; ++i) b.push_back(base(rng));
        const WelchResult mine = welch_one_sided(a, b);
        const OracleWelch oracle = oracle_welch(a, b);
        CHECK(mine.t ==
              doctest::Approx(static_cast<double>(oracle.t)).epsilon(1e-9));
        CHECK(mine.df ==
              doctest::Approx(static_cast<double>(oracle.df)).epsilon(1e-9));
        CHECK(mine.p_one_sided ==
              doctest::Approx(oracle.p_one_sided).epsilon(1e-7));
    }
}

TEST_CASE("degenerate welch inputs are flagged") {
    const std::vector<double> flat = {2.0, 2.0, 2.0};
    const std::vector<double> also_flat = {1.0, 1.0};
    const WelchResult w = welch_one_sided(flat, also_flat);
    CHECK(w.degenerate);
    CHECK(w.p_one_sided == 1.0);

    const WelchResult empty = welch_one_sided({}, flat);
    CHECK(empty.degenerate);
}

TEST_CASE("single suspicious sample against a large group") {
    std::mt19937_64 rng(13);
    std::normal_distribution<double> base(0.0, 1.0);
    std::vector<double> rest;
    for (int i = 0; i < 1000; ++i) rest.push_back(base(rng));
    const std::vector<double> one = {9.0}; // far in the tail

    const WelchResult mine = welch_one_sided(one, rest);
    const OracleWelch oracle = oracle_welch(one, rest);
    CHECK(mine.t == doctest::Approx(static_cast<double>(oracle.t)).epsilon(1e-9));
    CHECK(mine.p_one_sided < 0.05);
    // with one sample the variance comes entirely from the second group
    CHECK(mine.df == doctest::Approx(999.0));
}
