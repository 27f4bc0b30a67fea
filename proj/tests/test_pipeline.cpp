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
#include "gid/pipeline.hpp"
#include "gid/tracegen.hpp"

#include <doctest.h>

#include <json.hpp>

#include <filesystem>
#include <fstream>

using namespace gid;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

void write_file(const fs::path& p, const std::string& content) {
    std::ofstream out(p);
    out << content;
}

std::string make_small_trace(const fs::path& dir, int attacks, std::uint64_t seed) {
    TraceConfig cfg;
    cfg.hosts = 2;
    cfg.hours = 2;
    cfg.seed = seed;
    cfg.events_per_hour = 700.0;
    cfg.attacks = make_default_attacks(cfg, attacks);
    const TraceOutput out = generate(cfg);
    write_trace(out, (dir / "events.jsonl").string(), (dir / "labels.jsonl").string());
    return (dir / "events.jsonl").string();
}

nlohmann::json load_json(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    nlohmann::json j;
    in >> j;
    return j;
}

} // namespace

TEST_CASE("empty input produces an empty summary and exit code zero") {
    TempDir dir("gid_pipeline_empty");
    write_file(dir.path / "events.jsonl", "");
    RunConfig cfg;
    cfg.input_path = (dir.path / "events.jsonl").string();
    cfg.output_dir = (dir.path / "out").string();
    const RunSummary summary = run_detect(cfg);
    CHECK(summary.windows == 0);
    CHECK(summary.events == 0);
    CHECK(summary.exit_code == 0);
    CHECK(fs::exists(dir.path / "out" / "summary.json"));
}

TEST_CASE("malformed input aborts with an error") {
    TempDir dir("gid_pipeline_bad");
    write_file(dir.path / "events.jsonl", "this is not json\n");
    RunConfig cfg;
    cfg.input_path = (dir.path / "events.jsonl").string();
    cfg.output_dir = (dir.path / "out").string();
    CHECK_THROWS_AS(run_detect(cfg), ParseError);

    RunConfig missing;
    missing.input_path = (dir.path / "nope.jsonl").string();
    CHECK_THROWS_AS(run_detect(missing), ConfigError);
}

TEST_CASE("detection writes one report per window plus a summary") {
    TempDir dir("gid_pipeline_run");
    const std::string input = make_small_trace(dir.path, 2, 7);

    RunConfig cfg;
    cfg.input_path = input;
    cfg.output_dir = (dir.path / "out").string();
    cfg.labels_path = (dir.path / "labels.jsonl").string();
    std::vector<WindowOutcome> outcomes;
    const RunSummary summary = run_detect(cfg, &outcomes);

    CHECK(summary.windows == 4); // 2 hosts x 2 hours
    CHECK(outcomes.size() == 4);
    for (const WindowOutcome& w : outcomes) {
        const fs::path report =
            dir.path / "out" /
            ("alert_" + w.host + "_" + std::to_string(w.window.start) + ".json");
        REQUIRE(fs::exists(report));
        const auto j = load_json(report);
        CHECK(j["host"] == w.host);
        CHECK(j["window_start"] == w.window.start);
        CHECK(j["alerts"].size() <= cfg.detect.k);
    }
    const auto summary_json = load_json(dir.path / "out" / "summary.json");
    CHECK(summary_json["windows"] == 4);
    CHECK(summary_json.contains("recall"));
    CHECK(summary.attacks_total == 2);
}

TEST_CASE("exhaustive and optimized runs differ only in scored counts") {
    TempDir dir("gid_pipeline_modes");
    const std::string input = make_small_trace(dir.path, 3, 11);

    RunConfig ex;
    ex.input_path = input;
    ex.output_dir = (dir.path / "out_ex").string();
    ex.mode = DetectMode::Exhaustive;
    run_detect(ex);

    RunConfig op = ex;
    op.output_dir = (dir.path / "out_op").string();
    op.mode = DetectMode::Optimized;
    run_detect(op);

    int compared = 0;
    for (const auto& entry : fs::directory_iterator(dir.path / "out_ex")) {
        if (entry.path().filename() == "summary.json") continue;
        auto a = load_json(entry.path());
        auto b = load_json(dir.path / "out_op" / entry.path().filename());
        a.erase("scored_count");
        b.erase("scored_count");
        CHECK(a == b);
        ++compared;
    }
    CHECK(compared == 4);
}

TEST_CASE("results do not depend on the worker count") {
    TempDir dir("gid_pipeline_threads");
    const std::string input = make_small_trace(dir.path, 2, 13);

    RunConfig one;
    one.input_path = input;
    one.output_dir = (dir.path / "out1").string();
    one.threads = 1;
    run_detect(one);

    RunConfig four = one;
    four.output_dir = (dir.path / "out4").string();
    four.threads = 4;
    run_detect(four);

    for (const auto& entry : fs::directory_iterator(dir.path / "out1")) {
        if (entry.path().filename() == "summary.json") continue;
        CHECK(load_json(entry.path()) ==
              load_json(dir.path / "out4" / entry.path().filename()));
    }
}

TEST_CASE("benchmark reports ratios and emits diagnostics") {
    TempDir dir("gid_pipeline_bench");
    const std::string input = make_small_trace(dir.path, 2, 17);

    RunConfig cfg;
    cfg.input_path = input;
    cfg.output_dir = (dir.path / "bench").string();
    const BenchmarkSummary summary = run_benchmark(cfg);
    CHECK(summary.rows.size() == 4);
    CHECK(summary.mean_scored_ratio > 0.0);
    CHECK(std::isfinite(summary.mean_scored_ratio));
    CHECK(summary.events_per_minute > 0.0);

    const auto j = load_json(dir.path / "bench" / "benchmark.json");
    CHECK(j["windows"] == 4);
    CHECK(j["windows_detail"].size() == 4);
    for (const auto& row : j["windows_detail"]) {
        CHECK(row["scored_optimized"].get<std::size_t>() <=
              row["scored_exhaustive"].get<std::size_t>());
    }
    CHECK(fs::exists(dir.path / "bench" / "groups.csv"));
    CHECK(fs::exists(dir.path / "bench" / "qq_len2.csv"));
}

TEST_CASE("qq emission writes group stats and plot data") {
    TempDir dir("gid_pipeline_qq");
    const std::string input = make_small_trace(dir.path, 0, 19);

    RunConfig cfg;
    cfg.input_path = input;
    cfg.output_dir = (dir.path / "qq").string();
    run_qq(cfg, /*dump_vectors=*/true);

    REQUIRE(fs::exists(dir.path / "qq" / "groups.csv"));
    std::ifstream groups(dir.path / "qq" / "groups.csv");
    std::string header;
    std::getline(groups, header);
    CHECK(header ==
          "host,window_start,length,lambda,mu,sigma,n,degenerate,low_sample");
    int lines = 0;
    std::string line;
    while (std::getline(groups, line)) ++lines;
    CHECK(lines >= 4); // at least one group per window

    CHECK(fs::exists(dir.path / "qq" / "xy_h01_0.json"));
    const auto xy = load_json(dir.path / "qq" / "xy_h01_0.json");
    CHECK(xy["sender"].size() == xy["entities"].size());
    CHECK(xy["receiver"].size() == xy["entities"].size());
}

TEST_CASE("pattern files restrict the candidate search") {
    TempDir dir("gid_pipeline_patterns");
    const std::string input = make_small_trace(dir.path, 2, 23);
    write_file(dir.path / "patterns.txt", "# leak shapes\nF,P,I\nF,P,P,I\nF,P,U,P,I\n");

    RunConfig cfg;
    cfg.input_path = input;
    cfg.output_dir = (dir.path / "out").string();
    cfg.pattern_file = (dir.path / "patterns.txt").string();
    cfg.labels_path = (dir.path / "labels.jsonl").string();
    std::vector<WindowOutcome> outcomes;
    const RunSummary summary = run_detect(cfg, &outcomes);

    RunConfig free_cfg = cfg;
    free_cfg.pattern_file.clear();
    free_cfg.output_dir = (dir.path / "out_free").string();
    std::vector<WindowOutcome> free_outcomes;
    run_detect(free_cfg, &free_outcomes);

    std::size_t patterned = 0, unrestricted = 0;
    for (const auto& w : outcomes) patterned += w.candidates;
    for (const auto& w : free_outcomes) unrestricted += w.candidates;
    CHECK(patterned < unrestricted);
    CHECK(summary.windows == 4);
}
