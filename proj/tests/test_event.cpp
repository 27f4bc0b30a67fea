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
#include "gid/event.hpp"

#include <doctest.h>

#include <array>
#include <random>
#include <set>
#include <thread>

using namespace gid;

TEST_CASE("parse maps fields directly") {
    EntityRegistry reg;
    const Event e = parse_event_record(
        R"({"src":"p:vim","stype":"P","dst":"f:/etc/passwd","dtype":"F","t":100,"host":"h1"})",
        reg);
    CHECK(reg.get(e.src).id == "p:vim");
    CHECK(reg.get(e.src).etype == EntityType::Process);
    CHECK(reg.get(e.dst).id == "f:/etc/passwd");
    CHECK(reg.get(e.dst).etype == EntityType::File);
    CHECK(e.t == 100);
    CHECK(reg.get(e.src).host == "h1");
}

TEST_CASE("disallowed pair is rejected by name") {
    EntityRegistry reg;
    try {
        parse_event_record(
            R"({"src":"f:a","stype":"F","dst":"i:b","dtype":"I","t":1,"host":"h"})", reg);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("disallowed interaction F->I") !=
              std::string::npos);
    }
}

TEST_CASE("missing timestamp is a parse error") {
    EntityRegistry reg;
    CHECK_THROWS_AS(parse_event_record(
                        R"({"src":"f:a","stype":"F","dst":"p:b","dtype":"P","host":"h"})",
                        reg, 7),
                    ParseError);
}

TEST_CASE("malformed json carries the line number") {
    EntityRegistry reg;
    try {
        parse_event_record("{not json", reg, 42);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 42);
        CHECK(std::string(e.what()).find("line 42") != std::string::npos);
    }
}

TEST_CASE("unknown fields are ignored") {
    EntityRegistry reg;
    const Event e = parse_event_record(
        R"({"src":"f:a","stype":"F","dst":"p:b","dtype":"P","t":5,"host":"h","pid":123})",
        reg);
    CHECK(e.t == 5);
}

TEST_CASE("self-loop is rejected") {
    EntityRegistry reg;
    CHECK_THROWS_AS(parse_event_record(
                        R"({"src":"p:a","stype":"P","dst":"p:a","dtype":"P","t":1,"host":"h"})",
                        reg),
                    ValidationError);
}

TEST_CASE("allowed interactions are exactly the eight pairs") {
    using E = EntityType;
    const std::set<std::pair<E, E>> allowed = {
        {E::Process, E::File},     {E::File, E::Process},   {E::Process, E::Process},
        {E::Process, E::UDSocket}, {E::UDSocket, E::Process}, {E::Process, E::INETSocket},
        {E::INETSocket, E::Process}, {E::UDSocket, E::UDSocket},
    };
    const E all[] = {E::File, E::Process, E::UDSocket, E::INETSocket};
    int allowed_count = 0;
    for (E s : all) {
        for (E d : all) {
            const bool expect = allowed.count({s, d}) > 0;
            CHECK(allowed_interaction(s, d) == expect);
            if (allowed_interaction(s, d)) ++allowed_count;
        }
    }
    CHECK(allowed_count == 8);
}

TEST_CASE("window assignment") {
    CHECK(assign_window(3601, 3600).start == 3600);
    CHECK(assign_window(3600, 3600).start == 3600); // boundary -> later window
    CHECK(assign_window(0, 3600).start == 0);
    CHECK(assign_window(3599, 3600).start == 0);
    CHECK(assign_window(-1, 3600).start == -3600);
    CHECK_THROWS_AS(assign_window(5, 0), ConfigError);
}

TEST_CASE("windows partition any event stream") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<std::int64_t> t_dist(0, 100000);
    for (int i = 0; i < 2000; ++i) {
        const std::int64_t t = t_dist(rng);
        const TimeWindow w = assign_window(t, 3600);
        CHECK(w.contains(t));
        // adjacent windows are disjoint and contiguous
        CHECK_FALSE(TimeWindow{w.start - 3600, 3600}.contains(t));
        CHECK_FALSE(TimeWindow{w.start + 3600, 3600}.contains(t));
        CHECK(TimeWindow{w.start - 3600, 3600}.end() == w.start);
    }
}

TEST_CASE("events round-trip through serialization") {
    EntityRegistry reg;
    std::mt19937_64 rng(11);
    const char* codes = "FPUI";
    std::uniform_int_distribution<int> type_pick(0, 3);
    std::uniform_int_distribution<std::int64_t> t_dist(0, 1 << 20);
    int produced = 0;
    while (produced < 500) {
        const EntityType st = static_cast<EntityType>(type_pick(rng));
        const EntityType dt = static_cast<EntityType>(type_pick(rng));
        if (!allowed_interaction(st, dt)) continue;
        char src[16], dst[16];
        std::snprintf(src, sizeof(src), "%c:e%d", codes[static_cast<int>(st)],
                      produced);
        std::snprintf(dst, sizeof(dst), "%c:x%d", codes[static_cast<int>(dt)],
                      produced);
        char line[160];
        std::snprintf(line, sizeof(line),
                      R"({"src":"%s","stype":"%c","dst":"%s","dtype":"%c","t":%lld,"host":"hh"})",
                      src, entity_type_code(st), dst, entity_type_code(dt),
                      static_cast<long long>(t_dist(rng)));
        const Event a = parse_event_record(line, reg);
        const Event b = parse_event_record(serialize_event(a, reg), reg);
        CHECK(a == b);
        ++produced;
    }
}

TEST_CASE("registry interning is idempotent and type-checked") {
    EntityRegistry reg;
    const EntityId a = reg.intern("h", "p:x", EntityType::Process);
    const EntityId b = reg.intern("h", "p:x", EntityType::Process);
    CHECK(a == b);
    CHECK(reg.size() == 1);
    // same id on another host is a different entity
    const EntityId c = reg.intern("h2", "p:x", EntityType::Process);
    CHECK(c != a);
    CHECK_THROWS_AS(reg.intern("h", "p:x", EntityType::File), ValidationError);
    CHECK(reg.find("h", "p:x").has_value());
    CHECK_FALSE(reg.find("h", "p:y").has_value());
}

TEST_CASE("concurrent interning keeps one handle per entity") {
    EntityRegistry reg;
    std::vector<std::thread> threads;
    std::array<std::vector<EntityId>, 4> seen;
    for (int t = 0; t < 4; ++t) {
        threads.emplace_back([&reg, &seen, t] {
            for (int i = 0; i < 500; ++i) {
                char id[16];
                std::snprintf(id, sizeof(id), "p:e%d", i % 100);
                seen[t].push_back(reg.intern("h", id, EntityType::Process));
            }
        });
    }
    for (auto& th : threads) th.join();
    CHECK(reg.size() == 100);
    for (int t = 1; t < 4; ++t) CHECK(seen[t] == seen[0]);
}

TEST_CASE("sequence validation catches violations") {
    EntityRegistry reg;
    const EntityId f = reg.intern("h", "f:a", EntityType::File);
    const EntityId p = reg.intern("h", "p:b", EntityType::Process);
    const EntityId i = reg.intern("h", "i:c", EntityType::INETSocket);

    EventSequence ok{{f, p, i}, {10, 20}};
    CHECK_FALSE(ok.validate(reg).has_value());

    EventSequence short_seq{{f}, {}};
    CHECK(short_seq.validate(reg).has_value());

    EventSequence decreasing{{f, p, i}, {20, 10}};
    CHECK(decreasing.validate(reg).has_value());

    EventSequence bad_pair{{f, i}, {10}};
    CHECK(bad_pair.validate(reg).value().find("disallowed") != std::string::npos);
}
