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
#include "gid/graph.hpp"
#include "gid/search.hpp"
#include "gid/tracegen.hpp"

#include <doctest.h>

#include <json.hpp>

#include <map>
#include <set>

using namespace gid;

namespace {

TraceConfig small_config() {
    TraceConfig cfg;
    cfg.hosts = 2;
    cfg.hours = 2;
    cfg.seed = 99;
    cfg.events_per_hour = 900.0;
    return cfg;
}

} // namespace

TEST_CASE("fixed seed reproduces the trace byte for byte") {
    TraceConfig cfg = small_config();
    cfg.attacks = make_default_attacks(cfg, 4);
    const TraceOutput a = generate(cfg);
    const TraceOutput b = generate(cfg);
    CHECK(a.event_lines == b.event_lines);
    CHECK(a.label_lines == b.label_lines);

    TraceConfig other = cfg;
    other.seed = 100;
    const TraceOutput c = generate(other);
    CHECK(a.event_lines != c.event_lines);
}

TEST_CASE("background volume follows the configured rate") {
    TraceConfig cfg;
    cfg.hosts = 1;
    cfg.hours = 1;
    cfg.seed = 5;
    cfg.events_per_hour = 1000.0;
    const TraceOutput out = generate(cfg);
    CHECK(out.label_lines.empty());
    CHECK(out.attack_events == 0);
    // Poisson(1000) stays well inside +-20%
    CHECK(out.event_lines.size() > 800);
    CHECK(out.event_lines.size() < 1200);
}

TEST_CASE("every generated record parses and respects the type rules") {
    TraceConfig cfg = small_config();
    cfg.attacks = make_default_attacks(cfg, 6);
    const TraceOutput out = generate(cfg);
    EntityRegistry reg;
    std::int64_t prev_t = -1;
    for (const std::string& line : out.event_lines) {
        const Event e = parse_event_record(line, reg); // validates pairs
        CHECK(e.t >= prev_t); // merged stream is time sorted
        prev_t = e.t;
    }
}

TEST_CASE("injected attacks are found as candidate paths") {
    TraceConfig cfg = small_config();
    cfg.attacks = make_default_attacks(cfg, 9); // all three types, lengths 3..5
    const TraceOutput out = generate(cfg);

    EntityRegistry reg;
    std::map<std::pair<std::string, std::int64_t>, std::vector<Event>> groups;
    for (const std::string& line : out.event_lines) {
        const Event e = parse_event_record(line, reg);
        const TimeWindow w = assign_window(e, 3600);
        groups[{reg.get(e.src).host, w.start}].push_back(e);
    }

    REQUIRE(out.label_lines.size() == 9);
    for (const std::string& line : out.label_lines) {
        const auto label = nlohmann::json::parse(line);
        const std::string host = label.at("host");
        const std::int64_t t_start = label.at("t_start");
        const std::vector<std::string> ids = label.at("path");

        const TimeWindow w = assign_window(t_start, 3600);
        auto it = groups.find({host, w.start});
        REQUIRE(it != groups.end());
        const CompactGraph g = CompactGraph::build(it->second, w, reg);

        std::vector<std::uint32_t> expected;
        for (const std::string& id : ids) {
            const auto handle = reg.find(host, id);
            REQUIRE(handle.has_value());
            const auto local = g.vertex_of(*handle);
            REQUIRE(local.has_value());
            expected.push_back(*local);
        }

        SearchOptions opt;
        opt.max_len = 5;
        const CandidateSet candidates = find_candidates(g, nullptr, opt);
        bool found = false;
        for (const CandidatePath& p : candidates.paths) {
            if (p.verts == expected) {
                found = true;
                break;
            }
        }
        CHECK(found);
    }
}

TEST_CASE("attack edges stay out of the background traffic") {
    TraceConfig cfg = small_config();
    const TraceOutput clean = generate(cfg); // no attacks
    EntityRegistry reg;
    std::set<std::pair<std::string, std::string>> background_pairs;
    for (const std::string& line : clean.event_lines) {
        const Event e = parse_event_record(line, reg);
        background_pairs.insert({reg.get(e.src).id, reg.get(e.dst).id});
    }
    for (const AttackSpec& a : make_default_attacks(cfg, 9)) {
        for (std::size_t i = 0; i + 1 < a.path_ids.size(); ++i) {
            CHECK(background_pairs.count({a.path_ids[i], a.path_ids[i + 1]}) == 0);
        }
    }
    // while the attack entities themselves do occur in normal traffic
    std::set<std::string> background_entities;
    for (const auto& [s, d] : background_pairs) {
        background_entities.insert(s);
        background_entities.insert(d);
    }
    for (const AttackSpec& a : make_default_attacks(cfg, 3)) {
        for (const std::string& id : a.path_ids) {
            CHECK(background_entities.count(id) == 1);
        }
    }
}

TEST_CASE("per host-hour graph size lands near the reference profile") {
    // reference averages: ~117 processes, ~191 files, ~41 UD sockets,
    // ~1668 edges; the defaults must land within an order of magnitude
    TraceConfig cfg;
    cfg.hosts = 1;
    cfg.hours = 1;
    cfg.seed = 31;
    const TraceOutput out = generate(cfg);

    EntityRegistry reg;
    std::vector<Event> events;
    for (const std::string& line : out.event_lines) {
        events.push_back(parse_event_record(line, reg));
    }
    const CompactGraph g = CompactGraph::build(events, TimeWindow{0, 3600}, reg);
    const GraphStats s = graph_stats(g);
    CHECK(s.processes > 11);
    CHECK(s.processes < 1170);
    CHECK(s.files > 19);
    CHECK(s.files < 1910);
    CHECK(s.ud_sockets > 4);
    CHECK(s.ud_sockets < 420);
    CHECK(s.edges > 166);
    CHECK(s.edges < 16680);
}

TEST_CASE("invalid attack configurations are rejected") {
    TraceConfig cfg = small_config();
    AttackSpec bad;
    bad.attack_type = 1;
    bad.host = "h99";
    bad.start_time = 100;
    bad.path_ids = {"f:secret-mls", "p:sshd", "i:net00"};
    bad.path_types = {EntityType::File, EntityType::Process, EntityType::INETSocket};
    cfg.attacks = {bad};
    CHECK_THROWS_AS(generate(cfg), ConfigError);

    bad.host = "h01";
    bad.start_time = 100000000; // outside the trace
    cfg.attacks = {bad};
    CHECK_THROWS_AS(generate(cfg), ConfigError);

    bad.start_time = 100;
    bad.path_types = {EntityType::File, EntityType::File, EntityType::INETSocket};
    cfg.attacks = {bad};
    CHECK_THROWS_AS(generate(cfg), ConfigError); // F -> F not allowed
}
