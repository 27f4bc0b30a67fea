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

#include "gid/pipeline.hpp"

#include "gid/errors.hpp"
#include "gid/graph.hpp"
#include "gid/normalize.hpp"
#include "gid/pattern.hpp"
#include "gid/scoring.hpp"
#include "gid/stat_util.hpp"
#include "gid/tracegen.hpp"

#include <json.hpp>

#include <atomic>
#include <cctype>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <thread>

namespace gid {

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

struct WindowKey {
    std::string host;
    std::int64_t start = 0;

    bool operator<(const WindowKey& o) const {
        if (host != o.host) return host < o.host;
        return start < o.start;
    }
};

struct LoadedInput {
    EntityRegistry registry;
    std::map<WindowKey, std::vector<Event>> groups;
    std::size_t events = 0;
};

void load_events(const std::string& path, std::int64_t window_secs, LoadedInput& input) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open input '" + path + "'");
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.empty()) continue;
        const Event e = parse_event_record(line, input.registry, line_number);
        const TimeWindow w = assign_window(e, window_secs);
        const std::string& host = input.registry.get(e.src).host;
        input.groups[WindowKey{host, w.start}].push_back(e);
        ++input.events;
    }
}

void write_text_atomic(const fs::path& path, const std::string& content) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw ConfigError("cannot write '" + path.string() + "'");
        out << content;
    }
    fs::rename(tmp, path);
}

int worker_count(const RunConfig& config, std::size_t jobs) {
    int n = config.threads;
    if (n <= 0) {
        if (const char* env = std::getenv("GID_THREADS")) {
            n = std::atoi(env);
        }
    }
    if (n <= 0) n = static_cast<int>(std::thread::hardware_concurrency());
    if (n <= 0) n = 1;
    return static_cast<int>(std::min<std::size_t>(n, std::max<std::size_t>(jobs, 1)));
}

struct WindowWork {
    WindowOutcome outcome;
    CompactGraph graph;
    ScoredCandidates scored; // full scoring, feeds validation and q-q
    ScoreState state;
};

WindowWork process_window(const WindowKey& key, std::span<const Event> events,
                          const RunConfig& config,
                          const std::vector<PathPattern>* patterns,
                          const EntityRegistry& registry, DetectMode mode) {
    const auto t0 = Clock::now();
    WindowWork work;
    WindowOutcome& out = work.outcome;
    out.host = key.host;
    out.window = TimeWindow{key.start, config.window_secs};
    out.events = events.size();

    work.graph = CompactGraph::build(events, out.window, registry);
    const CompactGraph& g = work.graph;

    SearchOptions sopt;
    sopt.max_len = config.detect.max_len;
    sopt.strict_chain = config.strict_chain;
    sopt.max_span = config.max_span;

    CandidateSet candidates = find_candidates(g, patterns, sopt);
    out.candidates = candidates.size();

    AlertReport& report = out.report;
    report.host = key.host;
    report.window = out.window;
    report.candidate_count = candidates.size();

    const TransitionMatrix a = TransitionMatrix::build(g, config.strict_blocks);
    const RestartedMatrix abar(a, config.restart_ratio);
    work.state = converge_scores(abar, config.tol, config.max_iter);

    work.scored = score_and_normalize(candidates, work.state, a,
                                      config.detect.normalize_on);

    TopkResult topk;
    if (mode == DetectMode::Exhaustive) {
        topk = topk_from_scored(candidates, work.scored, config.detect.k);
    } else {
        topk = topk_optimized(g, patterns, work.state, a, config.detect, sopt,
                              &candidates, &work.scored.stats);
    }
    out.scored_count = topk.scored_count;
    report.scored_count = topk.scored_count;

    std::vector<char> in_top(candidates.size(), 0);
    std::vector<double> suspicious_scores;
    suspicious_scores.reserve(topk.top.size());
    for (const DetectedPath& d : topk.top) {
        in_top[d.candidate_index] = 1;
        suspicious_scores.push_back(d.normalized);
    }
    std::vector<double> remaining_scores;
    remaining_scores.reserve(candidates.size() - topk.top.size());
    for (const DetectedPath& d : work.scored.all) {
        if (!in_top[d.candidate_index]) remaining_scores.push_back(d.normalized);
    }

    report.validation =
        validate_suspicious(suspicious_scores, remaining_scores,
                            config.detect.p_threshold, config.detect.confidence_threshold);
    report.suspicious = std::move(topk.top);
    out.validated = report.validation.validated;

    out.suspicious_id_paths.reserve(report.suspicious.size());
    for (const DetectedPath& d : report.suspicious) {
        std::vector<std::string> ids;
        ids.reserve(d.path.verts.size());
        for (std::uint32_t v : d.path.verts) ids.push_back(g.label(v));
        out.suspicious_id_paths.push_back(std::move(ids));
    }

    out.elapsed_ms = ms_since(t0);
    return work;
}

std::string report_file_name(const WindowKey& key) {
    std::string host = key.host;
    for (char& c : host) {
        if (!std::isalnum(static_cast<unsigned char>(c))) c = '_';
    }
    return "alert_" + host + "_" + std::to_string(key.start) + ".json";
}

struct LabelRecord {
    std::string host;
    std::int64_t t_start = 0;
    std::vector<std::string> path;
};

std::vector<LabelRecord> load_labels(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open labels '" + path + "'");
    std::vector<LabelRecord> labels;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.empty()) continue;
        nlohmann::json rec;
        try {
            rec = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("invalid label JSON: ") + e.what(), line_number);
        }
        LabelRecord label;
        label.host = rec.at("host").get<std::string>();
        label.t_start = rec.at("t_start").get<std::int64_t>();
        label.path = rec.at("path").get<std::vector<std::string>>();
        labels.push_back(std::move(label));
    }
    return labels;
}

/// Pooled q-q emission: per length group, sorted raw anomaly scores and
/// sorted normalized scores against normal plotting positions.
void write_qq_files(const fs::path& dir,
                    const std::map<std::size_t, std::vector<double>>& raw_by_len,
                    const std::map<std::size_t, std::vector<double>>& norm_by_len) {
    for (const auto& [r, raw] : raw_by_len) {
        std::vector<double> raw_sorted = raw;
        std::sort(raw_sorted.begin(), raw_sorted.end());
        std::vector<double> norm_sorted = norm_by_len.at(r);
        std::sort(norm_sorted.begin(), norm_sorted.end());

        std::string csv = "theoretical,raw_score,normalized\n";
        const std::size_t n = raw_sorted.size();
        for (std::size_t i = 0; i < n; ++i) {
            const double q = normal_quantile((static_cast<double>(i) + 0.5) /
                                             static_cast<double>(n));
            char buf[128];
            std::snprintf(buf, sizeof(buf), "%.9g,%.17g,%.17g\n", q, raw_sorted[i],
                          norm_sorted[i]);
            csv += buf;
        }
        write_text_atomic(dir / ("qq_len" + std::to_string(r) + ".csv"), csv);
    }
}

void append_group_stats_csv(std::string& csv, const std::string& host,
                            std::int64_t window_start, const GroupStatsMap& stats) {
    for (const auto& [r, s] : stats) {
        char buf[256];
        std::snprintf(buf, sizeof(buf), "%s,%lld,%zu,%.9g,%.17g,%.17g,%zu,%d,%d\n",
                      host.c_str(), static_cast<long long>(window_start), r, s.lambda,
                      s.mu, s.sigma, s.n, s.degenerate ? 1 : 0, s.low_sample ? 1 : 0);
        csv += buf;
    }
}

std::vector<PathPattern> load_patterns_if_any(const RunConfig& config) {
    if (config.pattern_file.empty()) return {};
    return load_pattern_file(config.pattern_file);
}

} // namespace

RunSummary run_detect(const RunConfig& config, std::vector<WindowOutcome>* outcomes) {
    const auto t0 = Clock::now();

    LoadedInput input;
    load_events(config.input_path, config.window_secs, input);

    const std::vector<PathPattern> patterns = load_patterns_if_any(config);
    const std::vector<PathPattern>* pattern_ptr = patterns.empty() ? nullptr : &patterns;

    const fs::path out_dir(config.output_dir);
    if (config.write_reports) fs::create_directories(out_dir);

    std::vector<const std::map<WindowKey, std::vector<Event>>::value_type*> keys;
    keys.reserve(input.groups.size());
    for (const auto& kv : input.groups) keys.push_back(&kv);

    std::vector<WindowOutcome> results(keys.size());
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::string failure;
    std::mutex failure_mutex;

    auto worker = [&]() {
        while (!failed.load()) {
            const std::size_t i = next.fetch_add(1);
            if (i >= keys.size()) break;
            try {
                WindowWork work =
                    process_window(keys[i]->first, keys[i]->second, config, pattern_ptr,
                                   input.registry, config.mode);
                if (config.write_reports) {
                    const auto json =
                        alert_report_to_json(work.outcome.report, work.graph);
                    write_text_atomic(out_dir / report_file_name(keys[i]->first),
                                      json.dump(2) + "\n");
                }
                results[i] = std::move(work.outcome);
            } catch (const std::exception& e) {
                std::scoped_lock lock(failure_mutex);
                failed = true;
                failure = e.what();
            }
        }
    };

    const int n_workers = worker_count(config, keys.size());
    std::vector<std::thread> threads;
    threads.reserve(n_workers);
    for (int i = 0; i < n_workers; ++i) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
    if (failed) throw Error("window processing failed: " + failure);

    RunSummary summary;
    summary.windows = results.size();
    summary.events = input.events;
    for (const WindowOutcome& r : results) {
        summary.candidates += r.candidates;
        summary.scored_count += r.scored_count;
        if (r.validated) ++summary.validated_windows;
    }

    if (!config.labels_path.empty()) {
        const auto labels = load_labels(config.labels_path);
        summary.attacks_total = labels.size();
        std::map<WindowKey, const WindowOutcome*> by_key;
        for (const WindowOutcome& r : results) {
            by_key[WindowKey{r.host, r.window.start}] = &r;
        }
        for (const LabelRecord& label : labels) {
            const TimeWindow w = assign_window(label.t_start, config.window_secs);
            auto it = by_key.find(WindowKey{label.host, w.start});
            if (it == by_key.end() || !it->second->validated) continue;
            const auto& paths = it->second->suspicious_id_paths;
            if (std::find(paths.begin(), paths.end(), label.path) != paths.end()) {
                ++summary.attacks_detected;
            }
        }
        if (summary.attacks_total > 0) {
            summary.recall = static_cast<double>(summary.attacks_detected) /
                             static_cast<double>(summary.attacks_total);
        }
    }

    summary.elapsed_ms = ms_since(t0);
    summary.events_per_minute =
        summary.elapsed_ms > 0.0
            ? static_cast<double>(summary.events) * 60000.0 / summary.elapsed_ms
            : 0.0;
    summary.exit_code = summary.validated_windows > 0 ? 2 : 0;

    if (config.write_reports) {
        nlohmann::ordered_json j;
        j["input"] = config.input_path;
        j["mode"] = config.mode == DetectMode::Exhaustive ? "exhaustive" : "optimized";
        j["windows"] = summary.windows;
        j["events"] = summary.events;
        j["candidates"] = summary.candidates;
        j["scored_count"] = summary.scored_count;
        j["validated_windows"] = summary.validated_windows;
        j["elapsed_ms"] = summary.elapsed_ms;
        j["events_per_minute"] = summary.events_per_minute;
        if (summary.recall) {
            j["attacks_total"] = summary.attacks_total;
            j["attacks_detected"] = summary.attacks_detected;
            j["recall"] = *summary.recall;
        }
        write_text_atomic(out_dir / "summary.json", j.dump(2) + "\n");
    }

    if (outcomes != nullptr) *outcomes = std::move(results);
    return summary;
}

BenchmarkSummary run_benchmark(const RunConfig& config) {
    const auto t0 = Clock::now();
    LoadedInput input;
    load_events(config.input_path, config.window_secs, input);
    const std::vector<PathPattern> patterns = load_patterns_if_any(config);
    const std::vector<PathPattern>* pattern_ptr = patterns.empty() ? nullptr : &patterns;

    const fs::path out_dir(config.output_dir);
    fs::create_directories(out_dir);

    BenchmarkSummary summary;
    summary.events = input.events;

    std::map<std::size_t, std::vector<double>> raw_by_len;
    std::map<std::size_t, std::vector<double>> norm_by_len;
    std::string stats_csv =
        "host,window_start,length,lambda,mu,sigma,n,degenerate,low_sample\n";

    double ratio_sum = 0.0;
    std::size_t ratio_count = 0;

    for (const auto& [key, events] : input.groups) {
        BenchmarkRow row;
        row.host = key.host;
        row.window_start = key.start;
        row.events = events.size();

        const auto te = Clock::now();
        WindowWork exhaustive = process_window(key, events, config, pattern_ptr,
                                               input.registry, DetectMode::Exhaustive);
        row.exhaustive_ms = ms_since(te);
        row.candidates = exhaustive.outcome.candidates;
        row.scored_exhaustive = exhaustive.outcome.scored_count;

        const auto to = Clock::now();
        WindowWork optimized = process_window(key, events, config, pattern_ptr,
                                              input.registry, DetectMode::Optimized);
        row.optimized_ms = ms_since(to);
        row.scored_optimized = optimized.outcome.scored_count;

        if (row.scored_exhaustive > 0) {
            ratio_sum += static_cast<double>(row.scored_optimized) /
                         static_cast<double>(row.scored_exhaustive);
            ++ratio_count;
        }

        append_group_stats_csv(stats_csv, key.host, key.start, exhaustive.scored.stats);
        for (const DetectedPath& d : exhaustive.scored.all) {
            raw_by_len[d.path.length()].push_back(d.anomaly);
            norm_by_len[d.path.length()].push_back(d.normalized);
        }
        summary.rows.push_back(row);
    }

    summary.mean_scored_ratio = ratio_count > 0 ? ratio_sum / ratio_count : 0.0;
    const double elapsed = ms_since(t0);
    summary.events_per_minute =
        elapsed > 0.0 ? static_cast<double>(input.events) * 60000.0 / elapsed : 0.0;

    write_qq_files(out_dir, raw_by_len, norm_by_len);
    write_text_atomic(out_dir / "groups.csv", stats_csv);

    nlohmann::ordered_json j;
    j["events"] = summary.events;
    j["windows"] = summary.rows.size();
    j["mean_scored_ratio"] = summary.mean_scored_ratio;
    j["events_per_minute"] = summary.events_per_minute;
    j["reference_events_per_minute"] = 2.0e6; // throughput yardstick, not a gate
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const BenchmarkRow& row : summary.rows) {
        rows.push_back({{"host", row.host},
                        {"window_start", row.window_start},
                        {"events", row.events},
                        {"candidates", row.candidates},
                        {"exhaustive_ms", row.exhaustive_ms},
                        {"optimized_ms", row.optimized_ms},
                        {"scored_exhaustive", row.scored_exhaustive},
                        {"scored_optimized", row.scored_optimized}});
    }
    j["windows_detail"] = std::move(rows);
    write_text_atomic(out_dir / "benchmark.json", j.dump(2) + "\n");
    return summary;
}

void run_qq(const RunConfig& config, bool dump_vectors) {
    LoadedInput input;
    load_events(config.input_path, config.window_secs, input);
    const std::vector<PathPattern> patterns = load_patterns_if_any(config);
    const std::vector<PathPattern>* pattern_ptr = patterns.empty() ? nullptr : &patterns;

    const fs::path out_dir(config.output_dir);
    fs::create_directories(out_dir);

    std::map<std::size_t, std::vector<double>> raw_by_len;
    std::map<std::size_t, std::vector<double>> norm_by_len;
    std::string stats_csv =
        "host,window_start,length,lambda,mu,sigma,n,degenerate,low_sample\n";

    for (const auto& [key, events] : input.groups) {
        WindowWork work = process_window(key, events, config, pattern_ptr,
                                         input.registry, DetectMode::Exhaustive);
        append_group_stats_csv(stats_csv, key.host, key.start, work.scored.stats);
        for (const DetectedPath& d : work.scored.all) {
            raw_by_len[d.path.length()].push_back(d.anomaly);
            norm_by_len[d.path.length()].push_back(d.normalized);
        }
        if (dump_vectors) {
            nlohmann::ordered_json j;
            j["host"] = key.host;
            j["window_start"] = key.start;
            nlohmann::ordered_json entities = nlohmann::ordered_json::array();
            for (std::uint32_t v = 0; v < work.graph.vertex_count(); ++v) {
                entities.push_back(work.graph.label(v));
            }
            j["entities"] = std::move(entities);
            j["sender"] = work.state.sender;
            j["receiver"] = work.state.receiver;
            std::string host = key.host;
            for (char& c : host) {
                if (!std::isalnum(static_cast<unsigned char>(c))) c = '_';
            }
            write_text_atomic(out_dir / ("xy_" + host + "_" +
                                         std::to_string(key.start) + ".json"),
                              j.dump(2) + "\n");
        }
    }

    write_qq_files(out_dir, raw_by_len, norm_by_len);
    write_text_atomic(out_dir / "groups.csv", stats_csv);
}

} // namespace gid
