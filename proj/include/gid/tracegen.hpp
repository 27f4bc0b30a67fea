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

#include "gid/event.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace gid {

/// One injected attack: a labeled leak path executed at start_time with
/// strictly increasing hop timestamps.
struct AttackSpec {
    int attack_type = 1; // 1, 2 or 3
    std::string host;
    std::int64_t start_time = 0;
    std::vector<std::string> path_ids;
    std::vector<EntityType> path_types;
};

struct TraceConfig {
    int hosts = 10;
    int hours = 6;
    std::uint64_t seed = 42;

    /// Poisson mean of background events per host-hour.
    double events_per_hour = 2400.0;

    // entity populations per host
    int processes = 110;
    int files = 180;
    int ud_sockets = 36;
    int inet_sockets = 4;

    /// Popularity skew for file/process selection; few hot entities carry
    /// most traffic.
    double zipf_exponent = 1.2;

    std::vector<AttackSpec> attacks;
};

/// Spread `count` attacks (types cycling 1,2,3; lengths cycling 3,4,5)
/// across the configured hosts and hours.
std::vector<AttackSpec> make_default_attacks(const TraceConfig& config, int count);

struct TraceOutput {
    std::vector<std::string> event_lines; // JSONL, sorted by (t, host)
    std::vector<std::string> label_lines; // JSONL ground truth
    std::size_t background_events = 0;
    std::size_t attack_events = 0;
};

/// Deterministic for a fixed config: the same seed yields byte-identical
/// output. Throws ConfigError for attacks referencing unknown hosts or
/// times outside the trace.
TraceOutput generate(const TraceConfig& config);

void write_trace(const TraceOutput& trace, const std::string& events_path,
                 const std::string& labels_path);

} // namespace gid
