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

#include "gid/tracegen.hpp"

#include "gid/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

namespace gid {

namespace {

struct Record {
    std::int64_t t = 0;
    int host = 0;
    std::uint32_t seq = 0; // per-host emission order, stable merge key
    std::string src;
    char stype = 'F';
    std::string dst;
    char dtype = 'P';
};

/// Rank sampler with P(rank) ~ 1 / rank^s.
class ZipfSampler {
public:
    ZipfSampler(std::size_t n, double s) {
        cdf_.reserve(n);
        double acc = 0.0;
        for (std::size_t i = 1; i <= n; ++i) {
            acc += 1.0 / std::pow(static_cast<double>(i), s);
            cdf_.push_back(acc);
        }
        for (double& v : cdf_) v /= acc;
    }

    std::size_t operator()(std::mt19937_64& rng) const {
        const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        return static_cast<std::size_t>(
            std::lower_bound(cdf_.begin(), cdf_.end(), u) - cdf_.begin());
    }

private:
    std::vector<double> cdf_;
};

std::string host_name(int index) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "h%02d", index + 1);
    return buf;
}

std::string numbered(const char* prefix, std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s%03zu", prefix, i);
    return buf;
}

// daemons present on every host; regular processes fill the rest. The
// popularity sampler ranks by position, so bash sits near the front and
// carries a fat interaction row.
const std::vector<std::string> kDaemons = {
    "p:sshd", "p:httpd", "p:bash",  "p:dbus-daemon",
    "p:backupd", "p:gvfsd", "p:crond", "p:netmon",
};

constexpr int kAttackUdSockets = 3; // u:ud000..002 carry no regular traffic
constexpr int kExfilInet = 3;       // i:net03: pinged by netmon, else idle

/// Per-host background structure: working sets fixed up front so hot
/// entities recur and sender/receiver scores polarize.
struct HostModel {
    std::vector<std::string> procs; // daemons first
    std::vector<std::string> readable_files;
    std::vector<std::string> writable_files;
    std::vector<std::string> ud_sockets;
    std::vector<std::string> inet_sockets;

    std::vector<std::vector<std::size_t>> read_set;  // per proc, into readable_files
    std::vector<std::vector<std::size_t>> write_set; // per proc, into writable_files
    std::vector<std::vector<std::size_t>> ud_set;    // per proc, into ud_sockets

    std::size_t bash_index = 0;
    std::size_t gvfsd_index = 0;
    std::size_t backupd_index = 0;
    std::size_t crond_index = 0;
    std::size_t dbus_index = 0;
    std::size_t netmon_index = 0;

    std::size_t passwd_file = 0;      // readable index of f:etc-passwd
    std::size_t user_files_begin = 0; // first cold user file
    std::size_t secret_mls = 0;       // readable index of f:secret-mls
    std::size_t user_secret = 0;      // readable index of f:user-secret

    // the sensitive files are popular: a fixed set of processes consults
    // them all day, so a fresh pairing on their busy rows stands out
    std::vector<std::size_t> mls_readers;
    std::vector<std::size_t> user_secret_readers;
};

HostModel build_host_model(const TraceConfig& cfg, std::mt19937_64& rng) {
    HostModel m;

    m.procs = kDaemons;
    for (int i = static_cast<int>(m.procs.size()); i < cfg.processes; ++i) {
        m.procs.push_back(numbered("p:proc", m.procs.size()));
    }
    m.bash_index = 2;
    m.gvfsd_index = 5;
    m.backupd_index = 4;
    m.dbus_index = 3;
    m.crond_index = 6;
    m.netmon_index = 7;

    // readable pool: shared libraries and configs are hot, user files cold
    m.readable_files.push_back("f:etc-passwd");
    m.passwd_file = 0;
    m.readable_files.push_back("f:etc-hosts");
    const int libs = std::max(10, cfg.files / 6);
    const int confs = std::max(8, cfg.files / 9);
    for (int i = 0; i < libs; ++i) m.readable_files.push_back(numbered("f:lib", i));
    for (int i = 0; i < confs; ++i) m.readable_files.push_back(numbered("f:conf", i));
    const int logs = std::max(10, cfg.files / 6);
    for (int i = 0; i < logs; ++i) m.writable_files.push_back(numbered("f:log", i));
    const int tmps = std::max(6, cfg.files / 12);
    for (int i = 0; i < tmps; ++i) m.writable_files.push_back(numbered("f:tmp", i));
    int remaining = cfg.files - static_cast<int>(m.readable_files.size()) -
                    static_cast<int>(m.writable_files.size()) - 2;
    m.user_files_begin = m.readable_files.size();
    for (int i = 0; i < std::max(remaining, 4); ++i) {
        m.readable_files.push_back(numbered("f:user", i));
    }
    m.secret_mls = m.readable_files.size();
    m.readable_files.push_back("f:secret-mls");
    m.user_secret = m.readable_files.size();
    m.readable_files.push_back("f:user-secret");

    for (int i = 0; i < cfg.ud_sockets; ++i) {
        m.ud_sockets.push_back(numbered("u:ud", i));
    }
    for (int i = 0; i < cfg.inet_sockets; ++i) {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "i:net%02d", i);
        m.inet_sockets.push_back(buf);
    }

    // secret files are swept by backupd only; keep them out of the pool
    // regular processes draw from
    const std::size_t drawable = m.secret_mls;
    ZipfSampler file_pick(drawable, cfg.zipf_exponent);
    std::uniform_int_distribution<std::size_t> write_pick(0, m.writable_files.size() - 1);
    std::uniform_int_distribution<std::size_t> ud_pick(
        kAttackUdSockets, std::max<std::size_t>(kAttackUdSockets,
                                                m.ud_sockets.size() - 1));
    std::uniform_int_distribution<int> read_count(3, 8);
    std::uniform_int_distribution<int> write_count(1, 3);
    std::uniform_int_distribution<int> ud_count(1, 2);

    m.read_set.resize(m.procs.size());
    m.write_set.resize(m.procs.size());
    m.ud_set.resize(m.procs.size());
    for (std::size_t p = 0; p < m.procs.size(); ++p) {
        const int nr = read_count(rng);
        for (int i = 0; i < nr; ++i) {
            std::size_t f = file_pick(rng);
            if (p == m.gvfsd_index && f == m.passwd_file) f = m.passwd_file + 1;
            m.read_set[p].push_back(f);
        }
        const int nw = write_count(rng);
        for (int i = 0; i < nw; ++i) m.write_set[p].push_back(write_pick(rng));
        const int nu = ud_count(rng);
        for (int i = 0; i < nu; ++i) m.ud_set[p].push_back(ud_pick(rng));
    }
    // gvfsd stays quiet: tiny benign working set, never touches passwd
    m.read_set[m.gvfsd_index] = {m.passwd_file + 1};
    m.write_set[m.gvfsd_index] = {0};

    // regular consumers of the sensitive files, skipping the daemons the
    // attack blueprints use as couriers
    const std::size_t first_regular = kDaemons.size();
    for (std::size_t i = 0; i < 12; ++i) {
        m.mls_readers.push_back(first_regular + (2 * i) % 40);
        m.user_secret_readers.push_back(first_regular + (2 * i + 1) % 40);
    }
    return m;
}

class HostGenerator {
public:
    HostGenerator(const TraceConfig& cfg, int host_index)
        : cfg_(cfg),
          host_(host_index),
          rng_(cfg.seed ^ (0x9e3779b97f4a7c15ULL * (host_index + 1))),
          model_(build_host_model(cfg, rng_)),
          proc_pick_(cfg.processes, cfg.zipf_exponent),
          inet_pick_(kExfilInet, 1.0) {} // daemons use the non-reserved sockets

    void run(std::vector<Record>& out) {
        for (int hour = 0; hour < cfg_.hours; ++hour) {
            generate_hour(hour, out);
        }
    }

private:
    void emit(std::vector<Record>& out, std::int64_t t, const std::string& src,
              char stype, const std::string& dst, char dtype) {
        out.push_back(Record{t, host_, seq_++, src, stype, dst, dtype});
    }

    /// One structured interaction bursts into repeated events at t, t+1,
    /// t+2 (system accesses repeat; a pairing seen exactly once is the
    /// exception). Bursts stay inside the hour. Returns the number of
    /// events emitted.
    std::size_t interact(std::vector<Record>& out, std::int64_t t, std::int64_t window_end,
                         const std::string& src, char stype, const std::string& dst,
                         char dtype, std::size_t budget) {
        std::size_t emitted = 0;
        std::int64_t at = t;
        while (emitted < budget && at < window_end) {
            emit(out, at, src, stype, dst, dtype);
            ++emitted;
            if (emitted >= 3) break;
            at += 1;
        }
        return emitted;
    }

    void generate_hour(int hour, std::vector<Record>& out) {
        const std::int64_t start = static_cast<std::int64_t>(hour) * 3600;
        const std::int64_t window_end = start + 3600;
        std::poisson_distribution<long> count_dist(cfg_.events_per_hour);
        long budget = count_dist(rng_);

        // hourly backup sweep keeps the secret files present in normal
        // traffic (several reads each, so a later singleton edge stands out)
        const std::string& backupd = model_.procs[model_.backupd_index];
        std::int64_t sweep_t = start + 120 + static_cast<std::int64_t>(
                                                 std::uniform_int_distribution<int>(
                                                     0, 600)(rng_));
        for (std::size_t f : {model_.secret_mls, model_.user_secret}) {
            for (int rep = 0; rep < 4 && budget > 0; ++rep) {
                emit(out, sweep_t + rep * 37, model_.readable_files[f], 'F', backupd,
                     'P');
                --budget;
            }
        }
        for (int i = 0; i < 6 && budget > 0; ++i) {
            const std::size_t f = std::uniform_int_distribution<std::size_t>(
                model_.user_files_begin, model_.readable_files.size() - 1)(rng_);
            emit(out, sweep_t + 300 + i * 13, model_.readable_files[f], 'F', backupd,
                 'P');
            --budget;
        }

        // the secret files are consulted by their regular reader set
        std::uniform_int_distribution<std::int64_t> reader_t(start, start + 3599);
        for (const auto* readers : {&model_.mls_readers, &model_.user_secret_readers}) {
            const std::size_t file = readers == &model_.mls_readers
                                         ? model_.secret_mls
                                         : model_.user_secret;
            for (std::size_t p : *readers) {
                for (int rep = 0; rep < 3; ++rep) {
                    if (budget <= 0) break;
                    budget -= static_cast<long>(
                        interact(out, reader_t(rng_), window_end,
                                 model_.readable_files[file], 'F', model_.procs[p],
                                 'P', static_cast<std::size_t>(budget)));
                }
            }
        }

        // light keep-alive traffic on the otherwise idle sockets: dbus
        // polls the reserved UD sockets, netmon pings the spare INET one
        const std::string& netmon = model_.procs[model_.netmon_index];
        for (int i = 0; i < kAttackUdSockets && budget > 0; ++i) {
            emit(out, start + 60 + i * 11, model_.procs[model_.dbus_index], 'P',
                 model_.ud_sockets[i], 'U');
            --budget;
        }
        for (int i = 0; i < 4 && budget > 0; ++i) {
            emit(out, start + 90 + i * 700, netmon, 'P', model_.inet_sockets[kExfilInet],
                 'I');
            --budget;
        }

        std::uniform_int_distribution<std::int64_t> t_dist(start, start + 3599);
        std::uniform_real_distribution<double> coin(0.0, 1.0);
        // regular socket traffic avoids the reserved sockets
        std::uniform_int_distribution<std::size_t> ud_any(
            kAttackUdSockets, model_.ud_sockets.size() - 1);

        while (budget > 0) {
            const std::int64_t t = t_dist(rng_);
            const double kind = coin(rng_);
            const std::size_t cap = static_cast<std::size_t>(budget);
            std::size_t used = 1;

            if (kind < 0.34) { // file read: file -> process
                const std::size_t p = proc_pick_(rng_);
                const auto& reads = model_.read_set[p];
                const std::size_t f = reads[std::uniform_int_distribution<std::size_t>(
                    0, reads.size() - 1)(rng_)];
                used = interact(out, t, window_end, model_.readable_files[f], 'F',
                                model_.procs[p], 'P', cap);
            } else if (kind < 0.56) { // file write: process -> file
                const std::size_t p = proc_pick_(rng_);
                const auto& writes = model_.write_set[p];
                const std::size_t f = writes[std::uniform_int_distribution<std::size_t>(
                    0, writes.size() - 1)(rng_)];
                used = interact(out, t, window_end, model_.procs[p], 'P',
                                model_.writable_files[f], 'F', cap);
            } else if (kind < 0.70) { // process -> UD socket
                const std::size_t p = proc_pick_(rng_);
                const auto& uds = model_.ud_set[p];
                const std::size_t u = uds[std::uniform_int_distribution<std::size_t>(
                    0, uds.size() - 1)(rng_)];
                used = interact(out, t, window_end, model_.procs[p], 'P',
                                model_.ud_sockets[u], 'U', cap);
            } else if (kind < 0.80) { // UD socket -> process (dbus fans in)
                const bool to_dbus = coin(rng_) < 0.5;
                const std::size_t u = ud_any(rng_);
                const std::size_t p = to_dbus ? model_.dbus_index : proc_pick_(rng_);
                used = interact(out, t, window_end, model_.ud_sockets[u], 'U',
                                model_.procs[p], 'P', cap);
            } else if (kind < 0.84) { // UD socket pair
                const std::size_t a = ud_any(rng_);
                std::size_t b = ud_any(rng_);
                if (a == b) b = kAttackUdSockets + (b + 1 - kAttackUdSockets) %
                                                      (model_.ud_sockets.size() -
                                                       kAttackUdSockets);
                used = interact(out, t, window_end, model_.ud_sockets[a], 'U',
                                model_.ud_sockets[b], 'U', cap);
            } else if (kind < 0.91) { // network daemon -> INET socket
                const std::size_t p = coin(rng_) < 0.7 ? 0 : 1; // sshd or httpd
                const std::size_t s = inet_pick_(rng_);
                used = interact(out, t, window_end, model_.procs[p], 'P',
                                model_.inet_sockets[s], 'I', cap);
            } else if (kind < 0.96) { // INET socket -> network daemon
                const std::size_t p = coin(rng_) < 0.7 ? 0 : 1;
                const std::size_t s = inet_pick_(rng_);
                used = interact(out, t, window_end, model_.inet_sockets[s], 'I',
                                model_.procs[p], 'P', cap);
            } else { // process spawn chatter: crond -> process
                std::size_t p = proc_pick_(rng_);
                if (p == model_.crond_index) p = (p + 1) % model_.procs.size();
                used = interact(out, t, window_end, model_.procs[model_.crond_index],
                                'P', model_.procs[p], 'P', cap);
            }
            budget -= static_cast<long>(used);
        }
    }

    const TraceConfig& cfg_;
    int host_;
    std::mt19937_64 rng_;
    HostModel model_;
    ZipfSampler proc_pick_;
    ZipfSampler inet_pick_;
    std::uint32_t seq_ = 0;
};

char type_code_of_id(const std::string& id) {
    return id.empty() ? 'F' : std::toupper(static_cast<unsigned char>(id[0]));
}

} // namespace

std::vector<AttackSpec> make_default_attacks(const TraceConfig& config, int count) {
    std::vector<AttackSpec> attacks;
    attacks.reserve(count);

    struct Blueprint {
        const char* secret;
        const char* courier; // busy or rarely-co-occurring process
        const char* accomplice;
        const char* relay; // ud socket
        const char* sink;  // inet socket
    };
    const Blueprint blueprints[3] = {
        {"f:secret-mls", "p:sshd", "p:proc008", "u:ud000", "i:net03"},
        {"f:etc-passwd", "p:gvfsd", "p:proc013", "u:ud001", "i:net03"},
        {"f:user-secret", "p:bash", "p:proc021", "u:ud002", "i:net03"},
    };

    for (int i = 0; i < count; ++i) {
        const Blueprint& b = blueprints[i % 3];
        AttackSpec spec;
        spec.attack_type = (i % 3) + 1;
        spec.host = host_name(i % config.hosts);
        const int hour = (i / config.hosts) % config.hours;
        spec.start_time = static_cast<std::int64_t>(hour) * 3600 + 600 +
                          ((i * 911) % 1800);
        const int len = 3 + ((i / 3) % 3);
        switch (len) {
        case 3:
            spec.path_ids = {b.secret, b.courier, b.sink};
            break;
        case 4:
            spec.path_ids = {b.secret, b.courier, b.accomplice, b.sink};
            break;
        default:
            spec.path_ids = {b.secret, b.courier, b.relay, b.accomplice, b.sink};
            break;
        }
        for (const std::string& id : spec.path_ids) {
            spec.path_types.push_back(*entity_type_from_code(type_code_of_id(id)));
        }
        attacks.push_back(std::move(spec));
    }
    return attacks;
}

TraceOutput generate(const TraceConfig& config) {
    if (config.hosts < 1 || config.hours < 1) {
        throw ConfigError("trace needs at least one host and one hour");
    }
    if (config.events_per_hour < 0) throw ConfigError("negative event rate");
    if (config.inet_sockets < kExfilInet + 1 ||
        config.ud_sockets < kAttackUdSockets + 2 ||
        config.processes < static_cast<int>(kDaemons.size()) + 22 ||
        config.files < 40) {
        throw ConfigError("entity populations too small for the background model");
    }

    const std::int64_t horizon = static_cast<std::int64_t>(config.hours) * 3600;
    std::vector<std::string> hosts;
    for (int h = 0; h < config.hosts; ++h) hosts.push_back(host_name(h));

    std::vector<Record> records;
    records.reserve(static_cast<std::size_t>(
        config.events_per_hour * config.hours * config.hosts * 1.1));
    for (int h = 0; h < config.hosts; ++h) {
        HostGenerator gen(config, h);
        gen.run(records);
    }
    const std::size_t background = records.size();

    TraceOutput out;
    for (const AttackSpec& attack : config.attacks) {
        auto host_it = std::find(hosts.begin(), hosts.end(), attack.host);
        if (host_it == hosts.end()) {
            throw ConfigError("attack references unknown host '" + attack.host + "'");
        }
        if (attack.start_time < 0 || attack.start_time >= horizon - 60) {
            throw ConfigError("attack at t=" + std::to_string(attack.start_time) +
                              " falls outside the trace");
        }
        if (attack.path_ids.size() < 2 ||
            attack.path_ids.size() != attack.path_types.size()) {
            throw ConfigError("attack path needs at least two typed entities");
        }
        const int host_index = static_cast<int>(host_it - hosts.begin());
        std::int64_t t = attack.start_time;
        for (std::size_t i = 0; i + 1 < attack.path_ids.size(); ++i) {
            if (!allowed_interaction(attack.path_types[i], attack.path_types[i + 1])) {
                throw ConfigError("attack hop " + std::to_string(i) +
                                  " is not an allowed interaction");
            }
            records.push_back(Record{t, host_index, 0xffffffffu, attack.path_ids[i],
                                     entity_type_code(attack.path_types[i]),
                                     attack.path_ids[i + 1],
                                     entity_type_code(attack.path_types[i + 1])});
            t += 2; // strictly increasing hop timestamps
        }

        nlohmann::ordered_json label;
        label["attack_type"] = attack.attack_type;
        label["host"] = attack.host;
        label["path"] = attack.path_ids;
        label["t_start"] = attack.start_time;
        label["t_end"] = t - 2;
        out.label_lines.push_back(label.dump());
    }
    out.attack_events = records.size() - background;
    out.background_events = background;

    std::sort(records.begin(), records.end(), [](const Record& a, const Record& b) {
        if (a.t != b.t) return a.t < b.t;
        if (a.host != b.host) return a.host < b.host;
        return a.seq < b.seq;
    });

    out.event_lines.reserve(records.size());
    for (const Record& r : records) {
        nlohmann::ordered_json rec;
        rec["src"] = r.src;
        rec["stype"] = std::string(1, r.stype);
        rec["dst"] = r.dst;
        rec["dtype"] = std::string(1, r.dtype);
        rec["t"] = r.t;
        rec["host"] = hosts[r.host];
        out.event_lines.push_back(rec.dump());
    }
    return out;
}

void write_trace(const TraceOutput& trace, const std::string& events_path,
                 const std::string& labels_path) {
    std::ofstream events(events_path);
    if (!events) throw ConfigError("cannot write '" + events_path + "'");
    for (const std::string& line : trace.event_lines) events << line << '\n';

    std::ofstream labels(labels_path);
    if (!labels) throw ConfigError("cannot write '" + labels_path + "'");
    for (const std::string& line : trace.label_lines) labels << line << '\n';
}

} // namespace gid
