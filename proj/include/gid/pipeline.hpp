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

#include "gid/detect.hpp"
#include "gid/event.hpp"
#include "gid/search.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace gid {

enum class DetectMode { Exhaustive, Optimized };

struct RunConfig {
    std::string input_path;
    std::int64_t window_secs = 3600;
    DetectMode mode = DetectMode::Exhaustive;
    DetectParams detect;
    bool strict_chain = false;
    std::optional<std::int64_t> max_span;
    double restart_ratio = 0.6;
    bool strict_blocks = false;
    double tol = 1e-8;
    int max_iter = 100;
    std::string pattern_file;  // empty = pattern-free search
    std::string labels_path;   // optional ground truth, enables recall
    std::string output_dir = ".";
    int threads = 0; // 0: GID_THREADS env or hardware concurrency
    bool write_reports = true;
};

/// One processed (host, window) group.
struct WindowOutcome {
    std::string host;
    TimeWindow window;
    std::size_t events = 0;
    std::size_t candidates = 0;
    std::size_t scored_count = 0;
    bool validated = false;
    double elapsed_ms = 0.0;
    AlertReport report;
    std::vector<std::vector<std::string>> suspicious_id_paths; // for matching
};

struct RunSummary {
    std::size_t windows = 0;
    std::size_t events = 0;
    std::size_t candidates = 0;
    std::size_t scored_count = 0;
    std::size_t validated_windows = 0;
    double elapsed_ms = 0.0;
    double events_per_minute = 0.0;
    std::size_t attacks_total = 0;    // when labels supplied
    std::size_t attacks_detected = 0; // exact path match in a validated window
    std::optional<double> recall;
    int exit_code = 0; // 2 when any window validated an alert
};

/// Full pipeline: partition -> graph -> search -> walk -> score ->
/// normalize -> top-k -> validate, one alert report per (host, window)
/// plus summary.json in the output directory.
RunSummary run_detect(const RunConfig& config, std::vector<WindowOutcome>* outcomes = nullptr);

struct BenchmarkRow {
    std::string host;
    std::int64_t window_start = 0;
    std::size_t events = 0;
    std::size_t candidates = 0;
    double exhaustive_ms = 0.0;
    double optimized_ms = 0.0;
    std::size_t scored_exhaustive = 0;
    std::size_t scored_optimized = 0;
};

struct BenchmarkSummary {
    std::vector<BenchmarkRow> rows;
    double mean_scored_ratio = 0.0; // optimized / exhaustive
    double events_per_minute = 0.0;
    std::size_t events = 0;
};

/// Runs both modes per window, emits benchmark.json and per-length q-q
/// data files under the output directory.
BenchmarkSummary run_benchmark(const RunConfig& config);

/// Emits the normalization diagnostics alone: per-group stats CSV and q-q
/// plot data, plus optional sender/receiver vector dumps.
void run_qq(const RunConfig& config, bool dump_vectors);

} // namespace gid
