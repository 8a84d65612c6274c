// Copyright 2026 The qtamper Authors
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

#include "qtamper/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include "qtamper/benchmarks.hpp"
#include "qtamper/error.hpp"
#include "qtamper/metrics.hpp"
#include "qtamper/qasm.hpp"

namespace qtamper {

using json = nlohmann::json;
namespace fs = std::filesystem;

std::string DefenseSpec::label() const {
    switch (mode) {
    case Mode::None:
        return "none";
    case Mode::Equal:
        return "equal";
    case Mode::Adaptive:
        return "adaptive";
    case Mode::QaoaSplit:
        return "qaoa_split";
    case Mode::QaoaAdaptive:
        return "qaoa_adaptive";
    }
    return "?";
}

// ------------------------------------------------------------ config

namespace {

std::string child(const std::string &ptr, const std::string &key) {
    // JSON pointer escaping
    std::string esc;
    for (char c : key) {
        if (c == '~') {
            esc += "~0";
        } else if (c == '/') {
            esc += "~1";
        } else {
            esc += c;
        }
    }
    return ptr + "/" + esc;
}

std::string child(const std::string &ptr, std::size_t index) {
    return ptr + "/" + std::to_string(index);
}

void check_object(const json &j, const std::string &ptr, std::initializer_list<const char *> keys) {
    if (!j.is_object()) {
        throw ConfigError(ptr.empty() ? "/" : ptr, "expected an object");
    }
    for (const auto &[k, v] : j.items()) {
        if (std::none_of(keys.begin(), keys.end(), [&](const char *a) { return k == a; })) {
            throw ConfigError(child(ptr, k), "unknown field");
        }
    }
}

const json &require(const json &obj, const std::string &ptr, const char *key) {
    const auto it = obj.find(key);
    if (it == obj.end()) {
        throw ConfigError(child(ptr, key), "missing required field");
    }
    return *it;
}

std::uint64_t as_uint(const json &j, const std::string &ptr) {
    if (!j.is_number_integer() || (!j.is_number_unsigned() && j.get<std::int64_t>() < 0)) {
        throw ConfigError(ptr, "expected a non-negative integer");
    }
    return j.get<std::uint64_t>();
}

std::uint64_t as_positive(const json &j, const std::string &ptr) {
    const auto v = as_uint(j, ptr);
    if (v == 0) {
        throw ConfigError(ptr, "expected a positive integer");
    }
    return v;
}

double as_number(const json &j, const std::string &ptr, double lo, double hi) {
    if (!j.is_number()) {
        throw ConfigError(ptr, "expected a number");
    }
    const double v = j.get<double>();
    if (!(v >= lo && v <= hi)) {
        std::ostringstream msg;
        msg << "expected a value in [" << lo << ", " << hi << "]";
        throw ConfigError(ptr, msg.str());
    }
    return v;
}

std::string as_string(const json &j, const std::string &ptr) {
    if (!j.is_string()) {
        throw ConfigError(ptr, "expected a string");
    }
    return j.get<std::string>();
}

ReadoutError parse_readout_entry(const json &j, const std::string &ptr) {
    if (j.is_number()) {
        const double p = as_number(j, ptr, 0.0, 0.5);
        return ReadoutError{p, p};
    }
    check_object(j, ptr, {"p01", "p10"});
    return ReadoutError{as_number(require(j, ptr, "p01"), child(ptr, "p01"), 0.0, 0.5),
                        as_number(require(j, ptr, "p10"), child(ptr, "p10"), 0.0, 0.5)};
}

TamperSpec parse_tamper(const json &j, const std::string &ptr) {
    check_object(j, ptr, {"mode", "t", "k", "lines"});
    TamperSpec spec;
    const auto mode_ptr = child(ptr, "mode");
    try {
        spec.mode = tamper_mode_from_name(as_string(require(j, ptr, "mode"), mode_ptr));
    } catch (const InvalidArgument &e) {
        throw ConfigError(mode_ptr, e.what());
    }
    spec.t = j.contains("t") ? as_number(j["t"], child(ptr, "t"), 0.0, 1.0) : 0.0;
    if (j.contains("k")) {
        spec.k = as_positive(j["k"], child(ptr, "k"));
    }
    if (j.contains("lines")) {
        const auto lp = child(ptr, "lines");
        if (!j["lines"].is_array()) {
            throw ConfigError(lp, "expected an array of line indices");
        }
        std::vector<std::size_t> lines;
        for (std::size_t i = 0; i < j["lines"].size(); ++i) {
            lines.push_back(as_uint(j["lines"][i], child(lp, i)));
        }
        spec.lines = std::move(lines);
    }
    return spec;
}

BackendModel parse_backend(const json &j, const std::string &ptr) {
    check_object(j, ptr, {"name", "readout", "drift", "gate_depolarizing", "tamper"});
    BackendModel b;
    b.name = as_string(require(j, ptr, "name"), child(ptr, "name"));
    if (b.name.empty()) {
        throw ConfigError(child(ptr, "name"), "backend name must not be empty");
    }
    b.noise.readout = {ReadoutError{kDefaultReadoutError, kDefaultReadoutError}};
    if (j.contains("readout")) {
        const auto rp = child(ptr, "readout");
        const auto &r = j["readout"];
        if (r.is_array()) {
            b.noise.readout.clear();
            for (std::size_t i = 0; i < r.size(); ++i) {
                b.noise.readout.push_back(parse_readout_entry(r[i], child(rp, i)));
            }
        } else {
            b.noise.readout = {parse_readout_entry(r, rp)};
        }
    }
    b.drift = j.contains("drift") ? as_number(j["drift"], child(ptr, "drift"), 0.0, 0.5)
                                  : kDefaultDrift;
    if (j.contains("gate_depolarizing")) {
        b.noise.gate_depolarizing =
            as_number(j["gate_depolarizing"], child(ptr, "gate_depolarizing"), 0.0, 0.5);
    }
    if (j.contains("tamper") && !j["tamper"].is_null()) {
        b.tamper = parse_tamper(j["tamper"], child(ptr, "tamper"));
    }
    return b;
}

Graph parse_graph(const json &j, const std::string &ptr, std::string &label) {
    if (j.contains("regular")) {
        check_object(j, ptr, {"regular"});
        const auto rp = child(ptr, "regular");
        const auto &r = j["regular"];
        check_object(r, rp, {"n", "d", "seed"});
        const auto n = as_positive(require(r, rp, "n"), child(rp, "n"));
        const auto d = as_positive(require(r, rp, "d"), child(rp, "d"));
        const auto seed = r.contains("seed") ? as_uint(r["seed"], child(rp, "seed")) : 0;
        try {
            auto g = random_regular_graph(n, d, seed);
            label = "u" + std::to_string(d) + "r_n" + std::to_string(n);
            return g;
        } catch (const InfeasibleDegree &e) {
            throw ConfigError(rp, e.what());
        }
    }
    check_object(j, ptr, {"n", "edges"});
    const auto n = as_positive(require(j, ptr, "n"), child(ptr, "n"));
    const auto ep = child(ptr, "edges");
    const auto &edges = require(j, ptr, "edges");
    if (!edges.is_array()) {
        throw ConfigError(ep, "expected an array of [u, v] pairs");
    }
    std::vector<std::pair<std::size_t, std::size_t>> list;
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const auto &e = edges[i];
        if (!e.is_array() || e.size() != 2) {
            throw ConfigError(child(ep, i), "expected an [u, v] pair");
        }
        list.emplace_back(as_uint(e[0], child(child(ep, i), 0)),
                          as_uint(e[1], child(child(ep, i), 1)));
    }
    try {
        Graph g(n, std::move(list));
        label = "maxcut_n" + std::to_string(n) + "_e" + std::to_string(g.edges().size());
        return g;
    } catch (const InvalidArgument &e) {
        throw ConfigError(ep, e.what());
    }
}

WorkloadSpec parse_workload(const json &j, const std::string &ptr, const fs::path &base) {
    check_object(j, ptr, {"builtin", "qasm", "qaoa", "name", "expected"});
    const int kinds = static_cast<int>(j.contains("builtin")) +
                      static_cast<int>(j.contains("qasm")) + static_cast<int>(j.contains("qaoa"));
    if (kinds != 1) {
        throw ConfigError(ptr, "exactly one of builtin, qasm or qaoa is required");
    }
    WorkloadSpec w;
    if (j.contains("builtin")) {
        w.kind = WorkloadSpec::Kind::Builtin;
        w.builtin = as_string(j["builtin"], child(ptr, "builtin"));
        try {
            (void)builtin(w.builtin);
        } catch (const UnknownBenchmark &e) {
            throw ConfigError(child(ptr, "builtin"), e.what());
        }
        w.label = w.builtin;
    } else if (j.contains("qasm")) {
        w.kind = WorkloadSpec::Kind::Qasm;
        w.qasm_path = as_string(j["qasm"], child(ptr, "qasm"));
        if (w.qasm_path.is_relative()) {
            w.qasm_path = base / w.qasm_path;
        }
        if (!fs::exists(w.qasm_path)) {
            throw ConfigError(child(ptr, "qasm"), "file not found: " + w.qasm_path.string());
        }
        w.label = w.qasm_path.stem().string();
        if (j.contains("expected")) {
            w.expected = as_string(j["expected"], child(ptr, "expected"));
        }
    } else {
        w.kind = WorkloadSpec::Kind::Qaoa;
        const auto qp = child(ptr, "qaoa");
        const auto &q = j["qaoa"];
        check_object(q, qp, {"graph", "p", "iterations", "shots_per_iter"});
        w.graph = parse_graph(require(q, qp, "graph"), child(qp, "graph"), w.label);
        if (w.graph.num_nodes() > 20) {
            throw ConfigError(child(qp, "graph"), "QAOA graphs are limited to 20 nodes");
        }
        if (q.contains("p")) {
            w.qaoa.p = as_positive(q["p"], child(qp, "p"));
        }
        if (q.contains("iterations")) {
            w.qaoa.iterations = as_positive(q["iterations"], child(qp, "iterations"));
        }
        if (q.contains("shots_per_iter")) {
            w.qaoa.shots_per_iter = as_positive(q["shots_per_iter"], child(qp, "shots_per_iter"));
        }
    }
    if (j.contains("name")) {
        w.label = as_string(j["name"], child(ptr, "name"));
    }
    if (j.contains("expected") && w.kind != WorkloadSpec::Kind::Qasm) {
        throw ConfigError(child(ptr, "expected"), "only QASM workloads take an expected output");
    }
    return w;
}

DefenseSpec parse_defense(const json &j, const std::string &ptr) {
    DefenseSpec d;
    std::string mode;
    if (j.is_string()) {
        mode = j.get<std::string>();
    } else {
        check_object(j, ptr, {"mode", "k", "r", "probe_iterations"});
        mode = as_string(require(j, ptr, "mode"), child(ptr, "mode"));
    }
    if (mode == "none") {
        d.mode = DefenseSpec::Mode::None;
    } else if (mode == "equal") {
        d.mode = DefenseSpec::Mode::Equal;
    } else if (mode == "adaptive") {
        d.mode = DefenseSpec::Mode::Adaptive;
    } else if (mode == "qaoa_split") {
        d.mode = DefenseSpec::Mode::QaoaSplit;
    } else if (mode == "qaoa_adaptive") {
        d.mode = DefenseSpec::Mode::QaoaAdaptive;
    } else {
        throw ConfigError(j.is_string() ? ptr : child(ptr, "mode"),
                          "unknown defense mode '" + mode + "'");
    }
    if (j.is_object()) {
        if (j.contains("k")) {
            d.k = as_uint(j["k"], child(ptr, "k"));
            if (d.k < 10) {
                throw ConfigError(child(ptr, "k"), "probe shots must be at least 10");
            }
        }
        if (j.contains("r")) {
            d.r = as_uint(j["r"], child(ptr, "r"));
            if (d.r < 2) {
                throw ConfigError(child(ptr, "r"), "probe runs must be at least 2");
            }
        }
        if (j.contains("probe_iterations")) {
            d.probe_iterations = as_positive(j["probe_iterations"], child(ptr, "probe_iterations"));
        }
    }
    return d;
}

template <typename F>
auto one_or_many(const json &doc, const std::string &ptr, const char *key, F parse) {
    using T = decltype(parse(doc, ptr));
    std::vector<T> out;
    const auto &j = doc[key];
    const auto p = child(ptr, key);
    if (j.is_array()) {
        if (j.empty()) {
            throw ConfigError(p, "must not be empty");
        }
        for (std::size_t i = 0; i < j.size(); ++i) {
            out.push_back(parse(j[i], child(p, i)));
        }
    } else {
        out.push_back(parse(j, p));
    }
    return out;
}

} // namespace

ExperimentConfig parse_config(const json &doc, const fs::path &base_dir) {
    const std::string root;
    check_object(doc, root,
                 {"schema_version", "experiment", "master_seed", "workload", "backends", "shots",
                  "t_sweep", "defense", "selection_order", "seeds", "output"});
    const auto version = as_uint(require(doc, root, "schema_version"), "/schema_version");
    if (version != kConfigSchemaVersion) {
        throw ConfigError("/schema_version",
                          "unsupported schema version " + std::to_string(version));
    }
    ExperimentConfig cfg;
    cfg.experiment = doc.contains("experiment") ? as_string(doc["experiment"], "/experiment")
                                                : std::string("experiment");
    cfg.master_seed = doc.contains("master_seed") ? as_uint(doc["master_seed"], "/master_seed") : 0;

    require(doc, root, "workload");
    cfg.workloads = one_or_many(doc, root, "workload", [&](const json &j, const std::string &p) {
        return parse_workload(j, p, base_dir);
    });

    const auto &backends = require(doc, root, "backends");
    if (!backends.is_array() || backends.empty()) {
        throw ConfigError("/backends", "expected a non-empty array");
    }
    std::set<std::string> names;
    for (std::size_t i = 0; i < backends.size(); ++i) {
        cfg.backends.push_back(parse_backend(backends[i], child("/backends", i)));
        if (!names.insert(cfg.backends.back().name).second) {
            throw ConfigError(child(child("/backends", i), "name"), "duplicate backend name");
        }
    }

    if (doc.contains("shots")) {
        cfg.shots = one_or_many(doc, root, "shots", [](const json &j, const std::string &p) {
            return as_positive(j, p);
        });
    } else {
        cfg.shots = {10000};
    }

    if (doc.contains("t_sweep")) {
        const auto &ts = doc["t_sweep"];
        if (!ts.is_array()) {
            throw ConfigError("/t_sweep", "expected an array");
        }
        for (std::size_t i = 0; i < ts.size(); ++i) {
            cfg.t_sweep.push_back(as_number(ts[i], child("/t_sweep", i), 0.0, 1.0));
        }
    }

    if (doc.contains("defense")) {
        cfg.defenses = one_or_many(doc, root, "defense", parse_defense);
    } else {
        cfg.defenses = {DefenseSpec{}};
    }
    for (std::size_t i = 0; i < cfg.defenses.size(); ++i) {
        const auto &d = cfg.defenses[i];
        const auto p = doc["defense"].is_array() ? child("/defense", i) : std::string("/defense");
        const bool qaoa_mode =
            d.mode == DefenseSpec::Mode::QaoaSplit || d.mode == DefenseSpec::Mode::QaoaAdaptive;
        for (const auto &w : cfg.workloads) {
            const bool qaoa_load = w.kind == WorkloadSpec::Kind::Qaoa;
            if (d.mode != DefenseSpec::Mode::None && qaoa_mode != qaoa_load) {
                throw ConfigError(p, "defense '" + d.label() + "' does not apply to workload '" +
                                         w.label + "'");
            }
            if (d.mode == DefenseSpec::Mode::QaoaSplit && w.qaoa.iterations % 2 != 0) {
                throw ConfigError(p, "qaoa_split needs an even iteration count");
            }
            if (d.mode == DefenseSpec::Mode::QaoaAdaptive &&
                w.qaoa.iterations <= 2 * d.probe_iterations * cfg.backends.size()) {
                throw ConfigError(p, "qaoa_adaptive needs more iterations than its probes use");
            }
        }
        if (d.mode == DefenseSpec::Mode::Equal && cfg.backends.size() < 2) {
            throw ConfigError(p, "equal split needs at least two backends");
        }
        if (d.mode == DefenseSpec::Mode::QaoaSplit && cfg.backends.size() != 2) {
            throw ConfigError(p, "qaoa_split needs exactly two backends");
        }
        if (d.mode == DefenseSpec::Mode::Adaptive) {
            for (auto s : cfg.shots) {
                if (s < cfg.backends.size() * d.r * d.k) {
                    throw ConfigError(p, "shot budget " + std::to_string(s) +
                                             " is below the probe budget");
                }
            }
        }
    }

    if (doc.contains("selection_order")) {
        const auto &so = doc["selection_order"];
        if (!so.is_array()) {
            throw ConfigError("/selection_order", "expected an array");
        }
        std::set<SelectionCriterion> seen;
        for (std::size_t i = 0; i < so.size(); ++i) {
            const auto p = child("/selection_order", i);
            try {
                const auto c = selection_criterion_from_name(as_string(so[i], p));
                if (!seen.insert(c).second) {
                    throw ConfigError(p, "duplicate criterion");
                }
                cfg.selection_order.push_back(c);
            } catch (const InvalidArgument &e) {
                throw ConfigError(p, e.what());
            }
        }
    } else {
        cfg.selection_order = default_selection_order();
    }

    if (doc.contains("seeds")) {
        const auto &s = doc["seeds"];
        if (s.is_array()) {
            for (std::size_t i = 0; i < s.size(); ++i) {
                cfg.seeds.push_back(as_uint(s[i], child("/seeds", i)));
            }
        } else {
            check_object(s, "/seeds", {"count", "start"});
            const auto count = as_positive(require(s, "/seeds", "count"), "/seeds/count");
            const auto start = s.contains("start") ? as_uint(s["start"], "/seeds/start") : 1;
            for (std::uint64_t i = 0; i < count; ++i) {
                cfg.seeds.push_back(start + i);
            }
        }
        if (cfg.seeds.empty()) {
            throw ConfigError("/seeds", "must not be empty");
        }
        std::set<std::uint64_t> uniq(cfg.seeds.begin(), cfg.seeds.end());
        if (uniq.size() != cfg.seeds.size()) {
            throw ConfigError("/seeds", "seeds must be distinct");
        }
    } else {
        cfg.seeds = {1};
    }

    cfg.output = doc.contains("output") ? fs::path(as_string(doc["output"], "/output"))
                                        : fs::path("results") / cfg.experiment;
    if (cfg.output.is_relative() && !base_dir.empty()) {
        cfg.output = base_dir / cfg.output;
    }
    return cfg;
}

ExperimentConfig load_config(const fs::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot read config " + path.string());
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error &e) {
        throw ConfigError("/", std::string("invalid JSON: ") + e.what());
    }
    return parse_config(doc, path.parent_path());
}

// ------------------------------------------------------------- cells

std::vector<Cell> enumerate_cells(const ExperimentConfig &config) {
    std::vector<Cell> cells;
    std::vector<std::optional<double>> ts;
    if (config.t_sweep.empty()) {
        ts.emplace_back(std::nullopt);
    } else {
        ts.assign(config.t_sweep.begin(), config.t_sweep.end());
    }
    for (std::size_t w = 0; w < config.workloads.size(); ++w) {
        const bool qaoa = config.workloads[w].kind == WorkloadSpec::Kind::Qaoa;
        const auto &q = config.workloads[w].qaoa;
        std::vector<std::uint64_t> shots = config.shots;
        if (qaoa) {
            shots = {q.iterations * q.shots_per_iter};
        }
        for (auto s : shots) {
            for (std::size_t d = 0; d < config.defenses.size(); ++d) {
                std::vector<std::vector<std::size_t>> sets;
                if (config.defenses[d].mode == DefenseSpec::Mode::None) {
                    for (std::size_t b = 0; b < config.backends.size(); ++b) {
                        sets.push_back({b});
                    }
                } else {
                    std::vector<std::size_t> all(config.backends.size());
                    std::iota(all.begin(), all.end(), 0);
                    sets.push_back(std::move(all));
                }
                for (const auto &t : ts) {
                    for (const auto &set : sets) {
                        for (auto seed : config.seeds) {
                            cells.push_back(Cell{w, d, s, t, seed, set});
                        }
                    }
                }
            }
        }
    }
    return cells;
}

namespace {

std::string backend_set_name(const ExperimentConfig &config, const Cell &cell) {
    std::string name;
    for (auto b : cell.backends) {
        if (!name.empty()) {
            name += '+';
        }
        name += config.backends[b].name;
    }
    return name;
}

} // namespace

std::uint64_t cell_seed(const ExperimentConfig &config, const Cell &cell) {
    const double t = cell.t.value_or(-1.0);
    return derive_seed(config.master_seed, config.workloads[cell.workload].label,
                       backend_set_name(config, cell), t, cell.seed);
}

// ----------------------------------------------------------- records

namespace {

json number_or_inf(double v) {
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    return v;
}

json pm_json(const PerformanceMetric &p) {
    if (p.is_unbounded()) {
        return "inf";
    }
    return p.value();
}

json counts_top(const Counts &counts, std::size_t k = 8) {
    json arr = json::array();
    const auto ranked = counts.ranked();
    for (std::size_t i = 0; i < std::min(k, ranked.size()); ++i) {
        arr.push_back(json::array({ranked[i].first, ranked[i].second}));
    }
    return arr;
}

json plan_json(const SplitPlan &plan) {
    json allocs = json::array();
    for (const auto &a : plan.allocations) {
        allocs.push_back({{"backend", a.backend}, {"shots", a.shots}});
    }
    return {{"allocations", allocs}, {"probe_shots", plan.probe_shots},
            {"probe_runs", plan.probe_runs}};
}

json report_json(const ProbeReport &report) {
    json backends = json::array();
    for (const auto &b : report.backends) {
        json pms = json::array();
        for (const auto &p : b.pm) {
            pms.push_back(pm_json(p));
        }
        backends.push_back({{"name", b.name},
                            {"tops", b.tops},
                            {"pm", pms},
                            {"confidence", b.confidence},
                            {"pairwise_tvd", b.pairwise_tvd},
                            {"mean_tvd", b.mean_tvd()},
                            {"mean_pm", number_or_inf(b.mean_pm())},
                            {"mean_confidence", b.mean_confidence()},
                            {"repeatable", b.repeatable},
                            {"matches_vote", b.matches_vote}});
    }
    return {{"voted", report.voted}, {"k", report.k}, {"r", report.r}, {"backends", backends}};
}

struct Prepared {
    Circuit circuit;
    std::string expected;
    Distribution ideal;
};

Prepared prepare(const WorkloadSpec &w) {
    Prepared p;
    if (w.kind == WorkloadSpec::Kind::Builtin) {
        auto b = builtin(w.builtin);
        p.circuit = std::move(b.circuit);
        p.expected = std::move(b.expected_output);
    } else {
        p.circuit = load_qasm(w.qasm_path);
    }
    p.ideal = run_statevector(p.circuit);
    if (w.kind == WorkloadSpec::Kind::Qasm) {
        p.expected = w.expected.value_or(p.ideal.top());
        if (p.expected.size() != p.ideal.width()) {
            throw KeyLengthMismatch("expected output '" + p.expected + "' does not have " +
                                    std::to_string(p.ideal.width()) + " bits");
        }
    }
    return p;
}

std::vector<BackendModel> cell_backends(const ExperimentConfig &config, const Cell &cell) {
    std::vector<BackendModel> out;
    for (auto i : cell.backends) {
        BackendModel b = config.backends[i];
        if (b.tamper && cell.t) {
            b.tamper->t = *cell.t;
        }
        out.push_back(std::move(b));
    }
    return out;
}

json circuit_record(const ExperimentConfig &config, const Cell &cell, const Prepared &w,
                    const std::vector<BackendModel> &backends, std::uint64_t seed, json rec) {
    const auto &defense = config.defenses[cell.defense];
    Counts counts;
    std::uint64_t executed = cell.shots;
    switch (defense.mode) {
    case DefenseSpec::Mode::None:
        counts = execute(backends.front(), w.circuit, cell.shots, seed);
        break;
    case DefenseSpec::Mode::Equal: {
        auto r = equal_split(backends, w.circuit, cell.shots, seed);
        counts = std::move(r.counts);
        executed = r.plan.total();
        rec["split_plan"] = plan_json(r.plan);
        break;
    }
    case DefenseSpec::Mode::Adaptive: {
        auto r = adaptive_split(backends, w.circuit, cell.shots, defense.k, defense.r, seed,
                                config.selection_order);
        counts = std::move(r.counts);
        executed = r.plan.total();
        rec["split_plan"] = plan_json(r.plan);
        rec["probe_report"] = report_json(r.report);
        rec["selected"] = r.selected;
        break;
    }
    default:
        throw InvalidArgument("defense '" + defense.label() + "' needs a QAOA workload");
    }
    const auto reference = apply_readout_channel(w.ideal, backends.front().noise.for_lines(w.circuit));
    const auto report = summarize(counts, w.expected, w.ideal);
    rec["expected"] = w.expected;
    rec["pm"] = pm_json(report.pm);
    rec["tvd_vs_ideal"] = report.tvd;
    rec["tvd_vs_clean"] = tvd(counts, reference);
    rec["top_outcome"] = report.top_outcome;
    rec["confidence"] = report.confidence;
    rec["counts_top"] = counts_top(counts);
    rec["distinct_outcomes"] = counts.distinct();
    rec["counts_total"] = counts.total_shots();
    rec["shots_executed"] = executed;
    return rec;
}

json qaoa_record(const ExperimentConfig &config, const Cell &cell, const WorkloadSpec &w,
                 const std::vector<BackendModel> &backends, std::uint64_t seed, json rec) {
    const auto &defense = config.defenses[cell.defense];
    QaoaRunRecord run;
    switch (defense.mode) {
    case DefenseSpec::Mode::None:
        run = optimize(backends.front(), w.graph, w.qaoa, seed);
        break;
    case DefenseSpec::Mode::QaoaSplit:
        run = qaoa_iteration_split(backends[0], backends[1], w.graph, w.qaoa, seed);
        break;
    case DefenseSpec::Mode::QaoaAdaptive: {
        auto r = qaoa_adaptive(backends, w.graph, w.qaoa, defense.probe_iterations, seed);
        json probes = json::array();
        for (const auto &p : r.probes) {
            probes.push_back({{"backend", p.backend}, {"ar", p.ar}, {"mean_ar", p.mean_ar()}});
        }
        rec["probes"] = probes;
        rec["selected"] = r.selected;
        run = std::move(r.record);
        break;
    }
    default:
        throw InvalidArgument("defense '" + defense.label() + "' needs a circuit workload");
    }
    json edges = json::array();
    for (auto [u, v] : w.graph.edges()) {
        edges.push_back(json::array({u, v}));
    }
    rec["graph"] = {{"n", w.graph.num_nodes()}, {"edges", edges}};
    rec["p"] = w.qaoa.p;
    rec["iterations"] = w.qaoa.iterations;
    rec["shots_per_iter"] = w.qaoa.shots_per_iter;
    rec["ar"] = run.ar;
    rec["cmax"] = run.cmax;
    rec["best_expectation"] = run.best_expectation;
    rec["best_params"] = {{"gamma", run.best_params.gamma}, {"beta", run.best_params.beta}};
    rec["trace"] = run.trace;
    rec["trace_backend"] = run.trace_backend;
    rec["top_outcome"] = run.final_counts.top();
    rec["counts_top"] = counts_top(run.final_counts);
    rec["counts_total"] = run.final_counts.total_shots();
    rec["shots_executed"] = run.shots_used;
    return rec;
}

json base_record(const ExperimentConfig &config, const Cell &cell,
                 const std::vector<BackendModel> &backends) {
    json names = json::array();
    json tampered = json::array();
    for (const auto &b : backends) {
        names.push_back(b.name);
        tampered.push_back(b.tampered());
    }
    json rec;
    rec["schema_version"] = kRecordSchemaVersion;
    rec["experiment"] = config.experiment;
    rec["workload"] = config.workloads[cell.workload].label;
    rec["backends"] = names;
    rec["backend_tampered"] = tampered;
    rec["defense"] = config.defenses[cell.defense].label();
    rec["t"] = cell.t ? json(*cell.t) : json(nullptr);
    rec["seed"] = cell.seed;
    rec["shots"] = cell.shots;
    return rec;
}

json run_cell_prepared(const ExperimentConfig &config, const Cell &cell, const Prepared *prepared) {
    const auto backends = cell_backends(config, cell);
    const auto seed = cell_seed(config, cell);
    json rec = base_record(config, cell, backends);
    const auto &w = config.workloads[cell.workload];
    if (w.kind == WorkloadSpec::Kind::Qaoa) {
        return qaoa_record(config, cell, w, backends, seed, std::move(rec));
    }
    return circuit_record(config, cell, *prepared, backends, seed, std::move(rec));
}

} // namespace

json run_cell(const ExperimentConfig &config, const Cell &cell) {
    const auto &w = config.workloads.at(cell.workload);
    if (w.kind == WorkloadSpec::Kind::Qaoa) {
        return run_cell_prepared(config, cell, nullptr);
    }
    const auto prepared = prepare(w);
    return run_cell_prepared(config, cell, &prepared);
}

json strip_timing(json record) {
    record.erase("wall_time_ms");
    return record;
}

RunSummary run_experiment(ExperimentConfig config, const RunOptions &options) {
    if (options.seed) {
        config.master_seed = *options.seed;
    }
    const fs::path out_dir = options.out.value_or(config.output);
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) {
        throw IoError("cannot create " + out_dir.string() + ": " + ec.message());
    }

    std::vector<std::optional<Prepared>> prepared(config.workloads.size());
    for (std::size_t i = 0; i < config.workloads.size(); ++i) {
        if (config.workloads[i].kind != WorkloadSpec::Kind::Qaoa) {
            prepared[i] = prepare(config.workloads[i]);
        }
    }

    const auto cells = enumerate_cells(config);
    std::vector<json> records(cells.size());
    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> failures{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < cells.size(); i = next++) {
            const auto start = std::chrono::steady_clock::now();
            const auto &cell = cells[i];
            const Prepared *p = prepared[cell.workload] ? &*prepared[cell.workload] : nullptr;
            try {
                records[i] = run_cell_prepared(config, cell, p);
            } catch (const std::exception &e) {
                records[i] = base_record(config, cell, cell_backends(config, cell));
                records[i]["error"] = e.what();
                ++failures;
            }
            const auto elapsed = std::chrono::steady_clock::now() - start;
            records[i]["wall_time_ms"] =
                std::chrono::duration<double, std::milli>(elapsed).count();
        }
    };
    const std::size_t jobs = std::max<std::size_t>(1, std::min(options.jobs, cells.size()));
    std::vector<std::thread> pool;
    for (std::size_t j = 1; j < jobs; ++j) {
        pool.emplace_back(worker);
    }
    worker();
    for (auto &t : pool) {
        t.join();
    }

    RunSummary summary;
    summary.cells = cells.size();
    summary.failures = failures;
    summary.jsonl = out_dir / "results.jsonl";
    summary.csv = out_dir / "summary.csv";
    std::ofstream jsonl(summary.jsonl, std::ios::binary);
    if (!jsonl) {
        throw IoError("cannot write " + summary.jsonl.string());
    }
    for (const auto &r : records) {
        jsonl << r.dump() << '\n';
    }
    std::ofstream csv(summary.csv, std::ios::binary);
    if (!csv) {
        throw IoError("cannot write " + summary.csv.string());
    }
    csv << summary_csv(records);
    return summary;
}

// ----------------------------------------------------------- summary

namespace {

std::string fmt(double v) {
    if (std::isnan(v)) {
        return ""; // statistic does not apply to this group
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double value_of(const json &j) {
    if (j.is_string()) {
        return j.get<std::string>() == "inf" ? std::numeric_limits<double>::infinity()
                                             : std::numeric_limits<double>::quiet_NaN();
    }
    if (j.is_number()) {
        return j.get<double>();
    }
    return std::numeric_limits<double>::quiet_NaN();
}

struct Stats {
    std::vector<double> xs;

    void add(double x) {
        if (!std::isnan(x)) {
            xs.push_back(x);
        }
    }
    [[nodiscard]] double mean() const {
        if (xs.empty()) {
            return std::numeric_limits<double>::quiet_NaN();
        }
        return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
    }
    [[nodiscard]] double stddev() const {
        if (xs.size() < 2) {
            return xs.empty() ? std::numeric_limits<double>::quiet_NaN() : 0.0;
        }
        const double m = mean();
        if (std::isinf(m)) {
            return std::numeric_limits<double>::quiet_NaN();
        }
        double acc = 0.0;
        for (double x : xs) {
            acc += (x - m) * (x - m);
        }
        return std::sqrt(acc / static_cast<double>(xs.size() - 1));
    }
    [[nodiscard]] double median() const {
        if (xs.empty()) {
            return std::numeric_limits<double>::quiet_NaN();
        }
        auto v = xs;
        std::sort(v.begin(), v.end());
        const auto n = v.size();
        return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
    }
};

std::string join(const json &arr, char sep = '+') {
    std::string out;
    for (const auto &v : arr) {
        if (!out.empty()) {
            out += sep;
        }
        out += v.is_string() ? v.get<std::string>() : v.dump();
    }
    return out;
}

std::string t_text(const json &rec) {
    return rec.contains("t") && !rec["t"].is_null() ? fmt(rec["t"].get<double>()) : "";
}

std::string csv_escape(const std::string &s) {
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char c : s) {
        out += c == '"' ? std::string("\"\"") : std::string(1, c);
    }
    return out + "\"";
}

/// Ordered grouping: groups appear in first-seen order.
template <typename Row> class Grouper {
  public:
    Row &at(const std::vector<std::string> &key) {
        const auto it = index_.find(key);
        if (it != index_.end()) {
            return rows_[it->second].second;
        }
        index_.emplace(key, rows_.size());
        rows_.emplace_back(key, Row{});
        return rows_.back().second;
    }
    std::vector<std::pair<std::vector<std::string>, Row>> &rows() { return rows_; }

  private:
    std::map<std::vector<std::string>, std::size_t> index_;
    std::vector<std::pair<std::vector<std::string>, Row>> rows_;
};

struct MetricRow {
    Stats pm, tvd_ideal, tvd_clean, confidence, ar, pm_below_1, clean_selected, clean_share;
    std::map<std::string, std::size_t> tops;
    std::size_t n{0};
};

double untampered_share(const json &rec) {
    const auto &tampered = rec["backend_tampered"];
    const auto &names = rec["backends"];
    if (!rec.contains("split_plan")) {
        return tampered.size() == 1 && !tampered[0].get<bool>() ? 1.0 : 0.0;
    }
    double clean = 0.0;
    double total = 0.0;
    for (const auto &a : rec["split_plan"]["allocations"]) {
        for (std::size_t i = 0; i < names.size(); ++i) {
            if (names[i] == a["backend"]) {
                const double s = a["shots"].get<double>();
                total += s;
                if (!tampered[i].get<bool>()) {
                    clean += s;
                }
            }
        }
    }
    return total > 0 ? clean / total : std::numeric_limits<double>::quiet_NaN();
}

void accumulate(MetricRow &row, const json &rec) {
    ++row.n;
    if (rec.contains("error")) {
        return;
    }
    if (rec.contains("pm")) {
        const double pm = value_of(rec["pm"]);
        row.pm.add(pm);
        row.pm_below_1.add(pm < 1.0 ? 1.0 : 0.0);
        row.tvd_ideal.add(value_of(rec["tvd_vs_ideal"]));
        row.tvd_clean.add(value_of(rec["tvd_vs_clean"]));
        row.confidence.add(value_of(rec["confidence"]));
        row.clean_share.add(untampered_share(rec));
        ++row.tops[rec["top_outcome"].get<std::string>()];
    }
    if (rec.contains("ar")) {
        row.ar.add(value_of(rec["ar"]));
    }
    if (rec.contains("selected")) {
        const auto &names = rec["backends"];
        for (std::size_t i = 0; i < names.size(); ++i) {
            if (names[i] == rec["selected"]) {
                row.clean_selected.add(rec["backend_tampered"][i].get<bool>() ? 0.0 : 1.0);
            }
        }
    }
}

std::string modal_top(const MetricRow &row) {
    std::string best;
    std::size_t n = 0;
    for (const auto &[k, c] : row.tops) {
        if (c > n) {
            best = k;
            n = c;
        }
    }
    return best;
}

} // namespace

std::string summary_csv(const std::vector<json> &records) {
    Grouper<MetricRow> groups;
    for (const auto &rec : records) {
        accumulate(groups.at({rec.value("experiment", ""), rec.value("workload", ""),
                              join(rec["backends"]), rec.value("defense", ""), t_text(rec),
                              std::to_string(rec.value("shots", std::uint64_t{0}))}),
                   rec);
    }
    std::ostringstream out;
    out << "experiment,workload,backends,defense,t,shots,n,pm_mean,pm_std,pm_median,"
           "pm_below_1,tvd_ideal_mean,tvd_ideal_std,tvd_clean_mean,tvd_clean_std,"
           "confidence_mean,modal_top,ar_mean,ar_std,clean_selected\n";
    for (auto &[key, row] : groups.rows()) {
        for (const auto &k : key) {
            out << csv_escape(k) << ',';
        }
        out << row.n << ',' << fmt(row.pm.mean()) << ',' << fmt(row.pm.stddev()) << ','
            << fmt(row.pm.median()) << ',' << fmt(row.pm_below_1.mean()) << ','
            << fmt(row.tvd_ideal.mean()) << ',' << fmt(row.tvd_ideal.stddev()) << ','
            << fmt(row.tvd_clean.mean()) << ',' << fmt(row.tvd_clean.stddev()) << ','
            << fmt(row.confidence.mean()) << ',' << modal_top(row) << ','
            << fmt(row.ar.mean()) << ',' << fmt(row.ar.stddev()) << ','
            << fmt(row.clean_selected.mean()) << '\n';
    }
    return out.str();
}

std::vector<json> read_jsonl(const fs::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot read " + path.string());
    }
    std::vector<json> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) {
            continue;
        }
        try {
            out.push_back(json::parse(line));
        } catch (const json::parse_error &e) {
            throw IoError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

namespace {

void write_file(const fs::path &path, const std::string &body, std::vector<fs::path> &written) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    out << body;
    written.push_back(path);
}

bool is_circuit(const json &rec) { return rec.contains("pm") && !rec.contains("error"); }
bool is_qaoa(const json &rec) { return rec.contains("ar") && !rec.contains("error"); }

/// PM / TVD grouped by the given key columns, rows sorted by key.
std::string pm_table(const std::vector<json> &records,
                     const std::function<bool(const json &)> &keep,
                     const std::function<std::vector<std::string>(const json &)> &key,
                     const std::string &header) {
    Grouper<MetricRow> groups;
    for (const auto &rec : records) {
        if (keep(rec)) {
            accumulate(groups.at(key(rec)), rec);
        }
    }
    auto rows = groups.rows();
    std::ostringstream out;
    out << header << ",n,pm_mean,pm_median,pm_std,tvd_ideal_mean,tvd_clean_mean,"
                     "confidence_mean,modal_top,clean_share\n";
    for (auto &[k, row] : rows) {
        for (const auto &c : k) {
            out << csv_escape(c) << ',';
        }
        out << row.n << ',' << fmt(row.pm.mean()) << ',' << fmt(row.pm.median()) << ','
            << fmt(row.pm.stddev()) << ',' << fmt(row.tvd_ideal.mean()) << ','
            << fmt(row.tvd_clean.mean()) << ',' << fmt(row.confidence.mean()) << ','
            << modal_top(row) << ',' << fmt(row.clean_share.mean()) << '\n';
    }
    return out.str();
}

double as_sortable(const std::string &s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    return res.ec == std::errc{} ? v : -1.0;
}

} // namespace

std::vector<fs::path> write_report(const fs::path &jsonl, const fs::path &out_dir) {
    auto records = read_jsonl(jsonl);
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) {
        throw IoError("cannot create " + out_dir.string() + ": " + ec.message());
    }
    std::vector<fs::path> written;
    auto single = [](const json &r) { return is_circuit(r) && r["defense"] == "none"; };

    // PM / TVD against t, then against shots.
    {
        auto sorted = records;
        std::stable_sort(sorted.begin(), sorted.end(), [](const json &a, const json &b) {
            return std::make_tuple(a.value("workload", ""), join(a["backends"]),
                                   a.value("shots", std::uint64_t{0}),
                                   as_sortable(t_text(a))) <
                   std::make_tuple(b.value("workload", ""), join(b["backends"]),
                                   b.value("shots", std::uint64_t{0}), as_sortable(t_text(b)));
        });
        write_file(out_dir / "fig6.csv",
                   pm_table(sorted, single,
                            [](const json &r) {
                                return std::vector<std::string>{
                                    r["workload"], join(r["backends"]),
                                    std::to_string(r["shots"].get<std::uint64_t>()), t_text(r)};
                            },
                            "workload,backend,shots,t"),
                   written);
        std::stable_sort(sorted.begin(), sorted.end(), [](const json &a, const json &b) {
            return std::make_tuple(a.value("workload", ""), join(a["backends"]),
                                   as_sortable(t_text(a)), a.value("shots", std::uint64_t{0})) <
                   std::make_tuple(b.value("workload", ""), join(b["backends"]),
                                   as_sortable(t_text(b)), b.value("shots", std::uint64_t{0}));
        });
        const auto by_shots = pm_table(
            sorted, single,
            [](const json &r) {
                return std::vector<std::string>{r["workload"], join(r["backends"]), t_text(r),
                                                std::to_string(r["shots"].get<std::uint64_t>())};
            },
            "workload,backend,t,shots");
        write_file(out_dir / "fig8.csv", by_shots, written);
        write_file(out_dir / "table2.csv", by_shots, written);
    }

    // Defense comparison per t: tampered-only, equal and adaptive.
    {
        struct Row {
            Stats pm_tampered, pm_equal, pm_adaptive, tvd_tampered, tvd_equal, tvd_adaptive;
        };
        Grouper<Row> groups;
        for (const auto &r : records) {
            if (!is_circuit(r)) {
                continue;
            }
            auto &row = groups.at({r["workload"], t_text(r),
                                   std::to_string(r["shots"].get<std::uint64_t>())});
            const double pm = value_of(r["pm"]);
            const double tv = value_of(r["tvd_vs_ideal"]);
            if (r["defense"] == "none" && r["backend_tampered"][0].get<bool>()) {
                row.pm_tampered.add(pm);
                row.tvd_tampered.add(tv);
            } else if (r["defense"] == "equal") {
                row.pm_equal.add(pm);
                row.tvd_equal.add(tv);
            } else if (r["defense"] == "adaptive") {
                row.pm_adaptive.add(pm);
                row.tvd_adaptive.add(tv);
            }
        }
        std::ostringstream out;
        out << "workload,t,shots,pm_tampered,pm_equal,pm_adaptive,pm_equal_gain_pct,"
               "tvd_tampered,tvd_equal,tvd_adaptive,tvd_equal_reduction_pct\n";
        for (auto &[k, row] : groups.rows()) {
            const double gain = (row.pm_equal.mean() - row.pm_tampered.mean()) /
                                row.pm_tampered.mean() * 100.0;
            const double red = (row.tvd_tampered.mean() - row.tvd_equal.mean()) /
                               row.tvd_tampered.mean() * 100.0;
            out << csv_escape(k[0]) << ',' << k[1] << ',' << k[2] << ','
                << fmt(row.pm_tampered.mean()) << ',' << fmt(row.pm_equal.mean()) << ','
                << fmt(row.pm_adaptive.mean()) << ',' << fmt(gain) << ','
                << fmt(row.tvd_tampered.mean()) << ',' << fmt(row.tvd_equal.mean()) << ','
                << fmt(row.tvd_adaptive.mean()) << ',' << fmt(red) << '\n';
        }
        write_file(out_dir / "fig11.csv", out.str(), written);
    }

    // PM against the share of shots that landed on untampered backends.
    write_file(out_dir / "fig12.csv",
               pm_table(records, is_circuit,
                        [](const json &r) {
                            return std::vector<std::string>{
                                r["workload"], t_text(r), r["defense"], join(r["backends"])};
                        },
                        "workload,t,defense,backends"),
               written);

    // Probe fingerprints, one row per backend and run.
    {
        std::ostringstream out;
        out << "workload,t,seed,backend,run,pm,top_outcome,confidence,mean_tvd,repeatable,"
               "matches_vote,voted,selected\n";
        for (const auto &r : records) {
            if (!r.contains("probe_report") || r.contains("error")) {
                continue;
            }
            const auto &rep = r["probe_report"];
            for (const auto &b : rep["backends"]) {
                for (std::size_t run = 0; run < b["tops"].size(); ++run) {
                    out << csv_escape(r["workload"]) << ',' << t_text(r) << ','
                        << r["seed"].get<std::uint64_t>() << ',' << csv_escape(b["name"])
                        << ',' << run + 1 << ',' << fmt(value_of(b["pm"][run])) << ','
                        << b["tops"][run].get<std::string>() << ','
                        << fmt(b["confidence"][run].get<double>()) << ','
                        << fmt(b["mean_tvd"].get<double>()) << ','
                        << (b["repeatable"].get<bool>() ? 1 : 0) << ','
                        << (b["matches_vote"].get<bool>() ? 1 : 0) << ','
                        << rep["voted"].get<std::string>() << ','
                        << (b["name"] == r["selected"] ? 1 : 0) << '\n';
                }
            }
        }
        write_file(out_dir / "table3.csv", out.str(), written);
    }

    // QAOA approximation ratios.
    {
        Grouper<MetricRow> groups;
        for (const auto &r : records) {
            if (is_qaoa(r)) {
                accumulate(groups.at({r["workload"], t_text(r), r["defense"], join(r["backends"])}),
                           r);
            }
        }
        std::ostringstream out;
        out << "workload,t,defense,backends,n,ar_mean,ar_std,clean_selected\n";
        for (auto &[k, row] : groups.rows()) {
            for (const auto &c : k) {
                out << csv_escape(c) << ',';
            }
            out << row.n << ',' << fmt(row.ar.mean()) << ',' << fmt(row.ar.stddev()) << ','
                << fmt(row.clean_selected.mean()) << '\n';
        }
        write_file(out_dir / "table5.csv", out.str(), written);
    }

    // QAOA probe runs.
    {
        std::ostringstream out;
        out << "workload,t,seed,backend,run,ar,selected\n";
        for (const auto &r : records) {
            if (!r.contains("probes") || r.contains("error")) {
                continue;
            }
            for (const auto &p : r["probes"]) {
                for (std::size_t run = 0; run < p["ar"].size(); ++run) {
                    out << csv_escape(r["workload"]) << ',' << t_text(r) << ','
                        << r["seed"].get<std::uint64_t>() << ',' << csv_escape(p["backend"])
                        << ',' << run + 1 << ',' << fmt(p["ar"][run].get<double>()) << ','
                        << (p["backend"] == r["selected"] ? 1 : 0) << '\n';
                }
            }
        }
        write_file(out_dir / "table6.csv", out.str(), written);
    }
    return written;
}

} // namespace qtamper
