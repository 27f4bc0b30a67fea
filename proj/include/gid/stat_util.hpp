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

#include <span>

namespace gid {

/// Regularized incomplete beta function I_x(a, b), continued-fraction
/// evaluation.
double incomplete_beta(double a, double b, double x);

/// One-sided upper tail P(T > t) of Student's t with df degrees of
/// freedom.
double student_t_sf(double t, double df);

/// Inverse standard normal CDF (rational approximation, |error| < 1e-9).
double normal_quantile(double p);

double mean(std::span<const double> v);
/// Unbiased sample variance; 0 when fewer than two samples.
double sample_variance(std::span<const double> v);
/// Population (adjusted) sample skewness m3 / m2^1.5; 0 when degenerate.
double skewness(std::span<const double> v);

struct WelchResult {
    double t = 0.0;
    double df = 0.0;
    double p_one_sided = 1.0; // P(mean(a) > mean(b)) under H0
    bool degenerate = false;  // no usable variance in either group
};

/// Welch's unequal-variance t-test, one-sided with H1: mean(a) > mean(b).
/// Groups of size one contribute zero variance; when both groups carry no
/// variance information the result is flagged degenerate with p = 1.
WelchResult welch_one_sided(std::span<const double> a, std::span<const double> b);

} // namespace gid
