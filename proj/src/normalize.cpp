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

#include "gid/normalize.hpp"

#include "gid/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gid {

namespace {

constexpr double kLambdaLo = -5.0;
constexpr double kLambdaHi = 5.0;
constexpr double kLambdaStep = 0.1;   // coarse bracketing scan
constexpr double kLambdaTol = 1e-4;   // golden-section refinement
constexpr double kScoreFloor = 1e-12; // Box-Cox needs q > 0
constexpr double kNegLogCap = 1e12;

/// Profile log-likelihood of the transformed sample at a given lambda.
double profile_log_likelihood(std::span<const double> log_values, double lambda,
                              std::vector<double>& scratch) {
    const std::size_t n = log_values.size();
    scratch.resize(n);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        scratch[i] = boxcox_log_domain(log_values[i], lambda);
        sum += scratch[i];
    }
    const double m = sum / static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = scratch[i] - m;
        ss += d * d;
    }
    const double var = ss / static_cast<double>(n);
    if (var <= 0.0 || !std::isfinite(var)) {
        return -std::numeric_limits<double>::infinity();
    }
    double log_sum = 0.0;
    for (double l : log_values) log_sum += l;
    return -0.5 * static_cast<double>(n) * std::log(var) + (lambda - 1.0) * log_sum;
}

} // namespace

double boxcox(double q, double lambda) {
    if (q <= 0.0) throw ConfigError("Box-Cox input must be positive");
    return boxcox_log_domain(std::log(q), lambda);
}

double boxcox_log_domain(double log_q, double lambda) {
    if (lambda == 0.0) return log_q;
    return std::expm1(lambda * log_q) / lambda;
}

LambdaFit fit_lambda(std::span<const double> values) {
    std::vector<double> logs;
    logs.reserve(values.size());
    for (double q : values) {
        if (q <= 0.0) throw ConfigError("Box-Cox input must be positive");
        logs.push_back(std::log(q));
    }
    return fit_lambda_log_domain(logs);
}

LambdaFit fit_lambda_log_domain(std::span<const double> log_values) {
    if (log_values.size() < 3) {
        throw ConfigError("lambda fit needs at least 3 samples");
    }
    LambdaFit fit;
    const auto [lo, hi] = std::minmax_element(log_values.begin(), log_values.end());
    if (*lo == *hi) {
        fit.lambda = 1.0;
        fit.degenerate = true;
        fit.log_likelihood = -std::numeric_limits<double>::infinity();
        return fit;
    }

    std::vector<double> scratch;
    auto objective = [&](double lambda) {
        return profile_log_likelihood(log_values, lambda, scratch);
    };

    // coarse scan to bracket the maximum
    double best_lambda = kLambdaLo;
    double best_ll = -std::numeric_limits<double>::infinity();
    for (double l = kLambdaLo; l <= kLambdaHi + 1e-9; l += kLambdaStep) {
        const double ll = objective(l);
        if (ll > best_ll) {
            best_ll = ll;
            best_lambda = l;
        }
    }

    // golden-section refinement inside the bracketing interval
    constexpr double kInvPhi = 0.6180339887498949;
    double a = std::max(kLambdaLo, best_lambda - kLambdaStep);
    double b = std::min(kLambdaHi, best_lambda + kLambdaStep);
    double x1 = b - kInvPhi * (b - a);
    double x2 = a + kInvPhi * (b - a);
    double f1 = objective(x1);
    double f2 = objective(x2);
    while (b - a > kLambdaTol) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + kInvPhi * (b - a);
            f2 = objective(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - kInvPhi * (b - a);
            f1 = objective(x1);
        }
    }
    fit.lambda = 0.5 * (a + b);
    fit.log_likelihood = objective(fit.lambda);
    if (fit.log_likelihood < best_ll) {
        fit.lambda = best_lambda;
        fit.log_likelihood = best_ll;
    }
    return fit;
}

double apply_group_stats(double log_q, const LengthGroupStats& stats) {
    if (stats.low_sample) return std::exp(log_q);
    if (stats.degenerate) return 0.0;
    return (boxcox_log_domain(log_q, stats.lambda) - stats.mu) / stats.sigma;
}

GroupNormalization normalize_group(std::span<const double> log_values, std::size_t r) {
    GroupNormalization out;
    out.stats.r = r;
    out.stats.n = log_values.size();
    out.normalized.reserve(log_values.size());

    if (log_values.size() < 3) {
        out.stats.low_sample = true;
        for (double l : log_values) out.normalized.push_back(std::exp(l));
        return out;
    }

    const LambdaFit fit = fit_lambda_log_domain(log_values);
    out.stats.lambda = fit.lambda;
    out.stats.degenerate = fit.degenerate;

    std::vector<double> transformed;
    transformed.reserve(log_values.size());
    double sum = 0.0;
    for (double l : log_values) {
        const double t = boxcox_log_domain(l, fit.lambda);
        transformed.push_back(t);
        sum += t;
    }
    out.stats.mu = sum / static_cast<double>(transformed.size());
    double ss = 0.0;
    for (double t : transformed) {
        const double d = t - out.stats.mu;
        ss += d * d;
    }
    out.stats.sigma = std::sqrt(ss / static_cast<double>(transformed.size()));
    if (!(out.stats.sigma > 0.0) || !std::isfinite(out.stats.sigma)) {
        out.stats.degenerate = true;
    }

    for (double l : log_values) out.normalized.push_back(apply_group_stats(l, out.stats));
    return out;
}

double log_q_from_log_normality(double log_normality, NormalizeOn mode) {
    if (mode == NormalizeOn::Score) {
        const double ns = std::exp(log_normality);
        const double q = 1.0 - ns;
        if (q < kScoreFloor) return std::log(kScoreFloor);
        // log1p(-ns) keeps relative precision when ns underflows q toward 1
        return std::log1p(-ns);
    }
    double q = -log_normality;
    if (!(q > kScoreFloor)) q = kScoreFloor;
    if (q > kNegLogCap) q = kNegLogCap;
    return std::log(q);
}

} // namespace gid
