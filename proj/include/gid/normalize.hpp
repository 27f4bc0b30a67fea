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

#include <cstddef>
#include <span>
#include <vector>

namespace gid {

/// Which quantity feeds the per-length Box-Cox normalization: the anomaly
/// score 1 - NS (default) or -log NS, which spreads the near-1 scores far
/// better.
enum class NormalizeOn {
    Score,
    NegLogNs,
};

/// Box-Cox power transform: (q^lambda - 1) / lambda, or log q at
/// lambda = 0. Throws ConfigError for q <= 0.
double boxcox(double q, double lambda);

/// Same transform on log-domain input L = log q, evaluated as
/// expm1(lambda * L) / lambda. Keeps full relative precision for q
/// arbitrarily close to 0 or 1.
double boxcox_log_domain(double log_q, double lambda);

struct LambdaFit {
    double lambda = 1.0;
    double log_likelihood = 0.0;
    bool degenerate = false; // all inputs equal; lambda forced to 1
};

/// Maximum-profile-likelihood lambda over [-5, 5]: coarse grid scan
/// followed by golden-section refinement to |delta| <= 1e-4. Requires at
/// least 3 positive values; throws ConfigError otherwise.
LambdaFit fit_lambda(std::span<const double> values);

/// Log-domain variant taking L_i = log q_i.
LambdaFit fit_lambda_log_domain(std::span<const double> log_values);

/// Per-length-group fit + standardization parameters.
struct LengthGroupStats {
    std::size_t r = 0; // node count of the group
    double lambda = 1.0;
    double mu = 0.0;
    double sigma = 0.0;
    std::size_t n = 0;
    bool degenerate = false;  // zero post-transform variance
    bool low_sample = false;  // n < 3: identity pass-through
};

/// Maps one log-domain sample through a group's fitted transform:
/// low_sample -> q itself; degenerate -> 0; otherwise the standardized
/// Box-Cox value.
double apply_group_stats(double log_q, const LengthGroupStats& stats);

struct GroupNormalization {
    std::vector<double> normalized; // aligned with the input
    LengthGroupStats stats;
};

/// Fits lambda on one length group (inputs as L_i = log q_i), applies the
/// transform and standardizes to zero mean / unit variance. Groups with
/// n < 3 pass through unchanged (low_sample); zero-variance groups map to
/// all zeros (degenerate).
GroupNormalization normalize_group(std::span<const double> log_values, std::size_t r);

/// Clamped Box-Cox input for a path with the given log normality:
/// Score mode     q = 1 - NS, clamped to [1e-12, 1]
/// NegLogNs mode  q = -log NS, clamped to [1e-12, 1e12]
/// returned in log domain.
double log_q_from_log_normality(double log_normality, NormalizeOn mode);

} // namespace gid
