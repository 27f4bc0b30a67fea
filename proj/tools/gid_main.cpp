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

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <string>

namespace {

void add_detection_flags(CLI::App* cmd, gid::RunConfig& config, std::string& mode,
                         std::string& normalize_on) {
    cmd->add_option("--input", config.input_path, "Event log (JSONL)")->required();
    cmd->add_option("--window-secs", config.window_secs, "Tumbling window size")
        ->default_val(3600);
    cmd->add_option("--k", config.detect.k, "Alerts per window")->default_val(10);
    cmd->add_option("--max-len", config.detect.max_len, "Maximum path length (nodes)")
        ->default_val(5);
    cmd->add_option("--restart", config.restart_ratio, "Restart ratio")
        ->default_val(0.6);
    cmd->add_option("--mode", mode, "exhaustive | optimized")
        ->default_val("exhaustive")
        ->check(CLI::IsMember({"exhaustive", "optimized"}));
    cmd->add_option("--patterns", config.pattern_file, "Path pattern file");
    cmd->add_option("--normalize-on", normalize_on, "neglogns | score")
        ->default_val("neglogns")
        ->check(CLI::IsMember({"score", "neglogns"}));
    cmd->add_option("--out", config.output_dir, "Output directory")->default_val(".");
    cmd->add_option("--p-threshold", config.detect.p_threshold,
                    "Validation p-value threshold")
        ->default_val(0.05);
    cmd->add_option("--confidence-threshold", config.detect.confidence_threshold,
                    "Validation confidence threshold")
        ->default_val(0.9);
    cmd->add_option("--max-span", [&config](const std::vector<std::string>& vals) {
            try {
                config.max_span = std::stoll(vals.at(0));
            } catch (const std::exception&) {
                return false;
            }
            return true;
        },
        "Maximum witness timestamp span per path");
    cmd->add_flag("--strict-blocks", config.strict_blocks,
                  "Zero process->process transitions");
    cmd->add_flag("--strict-chain", config.strict_chain,
                  "Require a single non-decreasing timestamp chain");
    cmd->add_option("--labels", config.labels_path,
                    "Ground-truth labels (JSONL); adds recall to the summary");
    cmd->add_option("--tol", config.tol, "Random-walk convergence tolerance")
        ->default_val(1e-8);
    cmd->add_option("--max-iter", config.max_iter, "Random-walk iteration cap")
        ->default_val(100);
}

void finish_config(gid::RunConfig& config, const std::string& mode,
                   const std::string& normalize_on) {
    config.mode = mode == "optimized" ? gid::DetectMode::Optimized
                                      : gid::DetectMode::Exhaustive;
    config.detect.normalize_on = normalize_on == "neglogns"
                                     ? gid::NormalizeOn::NegLogNs
                                     : gid::NormalizeOn::Score;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Graph-based detection of suspicious event sequences in system logs"};
    app.require_subcommand(1);

    // --- generate ---
    auto* gen = app.add_subcommand("generate", "Generate a synthetic labeled trace");
    gid::TraceConfig trace;
    int attack_count = 30;
    std::string gen_out = ".";
    gen->add_option("--hosts", trace.hosts)->default_val(10);
    gen->add_option("--hours", trace.hours)->default_val(6);
    gen->add_option("--seed", trace.seed)->default_val(42);
    gen->add_option("--rate", trace.events_per_hour, "Background events per host-hour")
        ->default_val(2400.0);
    gen->add_option("--processes", trace.processes)->default_val(110);
    gen->add_option("--files", trace.files)->default_val(180);
    gen->add_option("--ud-sockets", trace.ud_sockets)->default_val(36);
    gen->add_option("--attacks", attack_count, "Number of injected attacks")
        ->default_val(30);
    gen->add_option("--out", gen_out, "Output directory")->default_val(".");

    // --- detect ---
    auto* det = app.add_subcommand("detect", "Run detection over tumbling windows");
    gid::RunConfig det_config;
    std::string det_mode, det_normalize;
    add_detection_flags(det, det_config, det_mode, det_normalize);

    // --- benchmark ---
    auto* bench = app.add_subcommand(
        "benchmark", "Time exhaustive vs optimized detection per window");
    gid::RunConfig bench_config;
    std::string bench_mode, bench_normalize;
    add_detection_flags(bench, bench_config, bench_mode, bench_normalize);

    // --- qq ---
    auto* qq = app.add_subcommand("qq", "Emit normalization diagnostics (q-q data)");
    gid::RunConfig qq_config;
    std::string qq_mode, qq_normalize;
    bool dump_vectors = false;
    add_detection_flags(qq, qq_config, qq_mode, qq_normalize);
    qq->add_flag("--dump-xy", dump_vectors, "Write sender/receiver vectors per window");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            trace.attacks = gid::make_default_attacks(trace, attack_count);
            const gid::TraceOutput out = gid::generate(trace);
            std::filesystem::create_directories(gen_out);
            const std::string events_path = gen_out + "/events.jsonl";
            const std::string labels_path = gen_out + "/labels.jsonl";
            gid::write_trace(out, events_path, labels_path);
            std::printf("wrote %zu events (%zu background, %zu attack) to %s\n",
                        out.event_lines.size(), out.background_events,
                        out.attack_events, events_path.c_str());
            std::printf("wrote %zu labels to %s\n", out.label_lines.size(),
                        labels_path.c_str());
            return 0;
        }
        if (det->parsed()) {
            finish_config(det_config, det_mode, det_normalize);
            const gid::RunSummary summary = gid::run_detect(det_config);
            std::printf("windows=%zu events=%zu candidates=%zu validated=%zu "
                        "elapsed_ms=%.1f events_per_minute=%.0f\n",
                        summary.windows, summary.events, summary.candidates,
                        summary.validated_windows, summary.elapsed_ms,
                        summary.events_per_minute);
            if (summary.recall) {
                std::printf("attacks=%zu detected=%zu recall=%.3f\n",
                            summary.attacks_total, summary.attacks_detected,
                            *summary.recall);
            }
            return summary.exit_code;
        }
        if (bench->parsed()) {
            finish_config(bench_config, bench_mode, bench_normalize);
            const gid::BenchmarkSummary summary = gid::run_benchmark(bench_config);
            std::printf("windows=%zu events=%zu mean_scored_ratio=%.4f "
                        "events_per_minute=%.0f\n",
                        summary.rows.size(), summary.events, summary.mean_scored_ratio,
                        summary.events_per_minute);
            return 0;
        }
        if (qq->parsed()) {
            finish_config(qq_config, qq_mode, qq_normalize);
            gid::run_qq(qq_config, dump_vectors);
            std::printf("wrote q-q data to %s\n", qq_config.output_dir.c_str());
            return 0;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
