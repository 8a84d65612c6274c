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

// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "../oracle.hpp"
#include "qtamper/adversary.hpp"
#include "qtamper/benchmarks.hpp"
#include "qtamper/defense.hpp"
#include "qtamper/harness.hpp"
#include "qtamper/metrics.hpp"
#include "qtamper/qaoa.hpp"
#include "qtamper/simulator.hpp"

using namespace qtamper;

namespace {

const std::vector<std::string> kRequired = {"grover_n2",  "grover_n3",     "fredkin_n3", "toffoli_n3",
                                            "adder_n4",   "inverseqft_n4", "hs4_n4"};

BackendModel clean_backend(const std::string &name = "hw") {
    return {name, NoiseModel::symmetric(kDefaultReadoutError), std::nullopt, kDefaultDrift};
}

BackendModel targeted_backend(double t, const std::string &name = "hw_t") {
    return {name, NoiseModel::symmetric(kDefaultReadoutError),
            TamperSpec{TamperMode::Targeted, t, 1, std::nullopt}, kDefaultDrift};
}

double mean(const std::vector<double> &v) {
    double s = 0;
    for (double x : v) {
        s += x;
    }
    return s / static_cast<double>(v.size());
}

std::string fmt(double x, int prec = 4) {
    if (std::isinf(x)) {
        return "inf";
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", prec, x);
    return buf;
}

struct Outcome {
    bool pass{false};
    std::string detail;
};

struct Criterion {
    int id;
    std::string name;
    double limit_s;
    std::function<Outcome()> run;
};

// Mean sampled PM (unbounded runs counted as +inf) over seeds.
double mean_pm(const BackendModel &b, const Benchmark &bm, std::uint64_t shots, std::size_t seeds,
               const std::string &tag, double t) {
    std::vector<double> v;
    for (std::size_t s = 0; s < seeds; ++s) {
        v.push_back(pm(execute(b, bm.circuit, shots, derive_seed(2026, tag, bm.name, t, shots, s)),
                       bm.expected_output)
                        .as_double());
    }
    return mean(v);
}

// Lines the targeted adversary would pick from the exact clean channel, and
// whether the runner-up differs from the correct answer on them.
bool runner_up_differs_on_lines(const Benchmark &bm) {
    const auto d =
        apply_readout_channel(run_statevector(bm.circuit), NoiseModel::symmetric(kDefaultReadoutError));
    std::vector<std::pair<double, std::string>> ranked;
    for (const auto &[bits, p] : d.to_map()) {
        ranked.emplace_back(-p, bits);
    }
    std::sort(ranked.begin(), ranked.end());
    const auto &a = ranked[0].second;
    const auto &b = ranked[1].second;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] != b[i] && bm.expected_output[i] != b[i]) {
            return true;
        }
    }
    return false;
}

Outcome c1_oracle() {
    double worst = 0;
    std::size_t n = 0;
    for (const auto &name : builtin_names()) {
        const auto bm = builtin(name);
        if (bm.circuit.num_qubits() > 3) {
            continue;
        }
        ++n;
        const auto ref = oracle::circuit_distribution(bm.circuit);
        const auto got = run_statevector(bm.circuit);
        for (std::size_t i = 0; i < ref.size(); ++i) {
            worst = std::max(worst, std::abs(got[i] - ref[i]));
        }
    }
    return {n >= 3 && worst < 1e-9,
            std::to_string(n) + " builtins, max |dp| = " + std::to_string(worst)};
}

Outcome c2_channels() {
    const auto bm = builtin("toffoli_n3");
    const auto ideal = oracle::circuit_distribution(bm.circuit);
    const std::vector<ReadoutError> ro(3, {kDefaultReadoutError, kDefaultReadoutError});
    const auto clean_counts = execute(clean_backend(), bm.circuit, 10000, 1);
    const auto lines = plan_targeted(clean_counts);
    std::set<std::size_t> line_set(lines.begin(), lines.end());
    double worst = 0;
    for (double t : {0.1, 0.3, 0.5}) {
        TamperSpec spec{TamperMode::Targeted, t, 1, lines};
        const auto analytic = tamper_channel(apply_readout_channel(run_statevector(bm.circuit), ro), spec);
        const auto mc = oracle::monte_carlo_flips(ideal, 3, kDefaultReadoutError, kDefaultReadoutError,
                                                  line_set, t, 1000000, derive_seed(7, "mc", t));
        worst = std::max(worst, oracle::tvd(analytic.probs(), mc));
    }
    return {worst < 0.005, "max TVD(analytic, 1e6-shot Monte Carlo) = " + fmt(worst, 5)};
}

Outcome c3_mixing() {
    double worst = 0;
    for (const auto &name : builtin_names()) {
        const auto bm = builtin(name);
        const auto resolved = resolve_backend(targeted_backend(0.5), bm.circuit, 10000, derive_seed(3, name));
        const auto counts = execute(resolved, bm.circuit, 100000, derive_seed(3, "mix", name));
        const std::size_t w = bm.circuit.num_clbits();
        for (auto line : *resolved.tamper->lines) {
            std::uint64_t ones = 0;
            for (const auto &[bits, c] : counts.entries()) {
                ones += bits[w - 1 - line] == '1' ? c : 0;
            }
            worst = std::max(worst, std::abs(static_cast<double>(ones) / 100000.0 - 0.5));
        }
    }
    return {worst <= 0.01, "max |marginal - 0.5| = " + fmt(worst, 5) + " over all builtins"};
}

Outcome c4_pm_vs_t() {
    bool monotone = true;
    bool below = true;
    std::ostringstream d;
    for (const auto &name : kRequired) {
        const auto bm = builtin(name);
        std::vector<double> m;
        for (double t : {0.0, 0.1, 0.3, 0.5}) {
            m.push_back(mean_pm(targeted_backend(t), bm, 10000, 20, "c4", t));
        }
        const bool mono = std::is_sorted(m.rbegin(), m.rend());
        const bool applies = runner_up_differs_on_lines(bm);
        const bool lt1 = !applies || m.back() < 1.0;
        monotone = monotone && mono;
        below = below && lt1;
        d << "\n    " << name << ": " << fmt(m[0], 2) << " " << fmt(m[1], 2) << " " << fmt(m[2], 3)
          << " " << fmt(m[3], 4) << (mono ? "" : " NOT-MONOTONE")
          << (applies ? (lt1 ? " (<1)" : " (>=1 at t=0.5)") : " (<1 n/a)");
    }
    return {monotone && below, std::string("monotone=") + (monotone ? "yes" : "no") +
                                   " pm<1@0.5=" + (below ? "yes" : "no") + d.str()};
}

Outcome c5_pm_vs_shots() {
    const auto bm = builtin("toffoli_n3");
    bool ok = true;
    std::ostringstream d;
    for (std::uint64_t shots : {500, 1000, 2000, 5000, 10000}) {
        const double m = mean_pm(targeted_backend(0.5), bm, shots, 20, "c5", 0.5);
        ok = ok && m < 1.0;
        d << " " << shots << ":" << fmt(m, 4);
    }
    return {ok, "mean PM at t=0.5 by shots:" + d.str()};
}

Outcome c6_equal_split() {
    const auto bm = builtin("toffoli_n3");
    // stitched 50-50 vs mean of the two exact backend channels; drift is
    // off so each backend has a single well-defined distribution
    auto steady = clean_backend();
    auto steady_t = targeted_backend(0.5);
    steady.drift = steady_t.drift = 0.0;
    const auto hw = resolve_backend(steady, bm.circuit, 100000, 1);
    const auto hwt = resolve_backend(steady_t, bm.circuit, 100000, 2);
    const auto ideal = run_statevector(bm.circuit);
    const auto da = apply_readout_channel(ideal, hw.noise.for_lines(bm.circuit));
    const auto db = tamper_channel(apply_readout_channel(ideal, hwt.noise.for_lines(bm.circuit)),
                                   *hwt.tamper);
    std::vector<double> mix(da.size());
    for (std::size_t i = 0; i < mix.size(); ++i) {
        mix[i] = 0.5 * (da[i] + db[i]);
    }
    const auto split = equal_split({hw, hwt}, bm.circuit, 100000, 3);
    const double d = tvd(split.counts, Distribution(3, mix));
    bool improves = true;
    std::ostringstream s;
    for (double t : {0.1, 0.2, 0.3, 0.4, 0.5}) {
        std::vector<double> gain;
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const auto sd = derive_seed(6, t, seed);
            const auto sp = equal_split({clean_backend(), targeted_backend(t)}, bm.circuit, 10000, sd);
            const auto tp = execute(targeted_backend(t), bm.circuit, 10000, sd);
            gain.push_back(std::min(pm(sp.counts, "111").as_double(), 1e6) -
                           std::min(pm(tp, "111").as_double(), 1e6));
        }
        improves = improves && mean(gain) > 0;
        s << " t=" << t << ":" << fmt(mean(gain), 2);
    }
    return {d < 0.01 && improves, "TVD(stitched, mean) = " + fmt(d, 5) + "; mean PM gain" + s.str()};
}

Outcome c7_detection() {
    const auto bm = builtin("toffoli_n3");
    bool ok = true;
    std::ostringstream s;
    for (double t : {0.1, 0.3, 0.4, 0.5}) {
        int two = 0;
        int three = 0;
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            two += adaptive_split({clean_backend(), targeted_backend(t)}, bm.circuit, 10000, 50, 2,
                                  derive_seed(77, "two", t, seed))
                       .selected == "hw";
            three += adaptive_split({targeted_backend(t, "hw_t1"), clean_backend(),
                                     targeted_backend(std::min(1.0, t + 0.1), "hw_t2")},
                                    bm.circuit, 10000, 50, 2, derive_seed(77, "three", t, seed))
                         .selected == "hw";
        }
        const int need = t >= 0.3 ? 90 : 70;
        ok = ok && two >= need && (t < 0.3 || three >= 90);
        s << " t=" << t << ": " << two << "%/" << three << "%";
    }
    return {ok, "clean selected (2 backends / 3 backends):" + s.str()};
}

Outcome c8_qaoa_sanity() {
    const double grid = oracle::single_edge_grid_max(200);
    const Graph edge(2, {{0, 1}});
    int hits = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        hits += optimize(clean_backend(), edge, QaoaConfig{}, derive_seed(88, seed)).ar >= 0.95;
    }
    return {hits >= 18 && grid > 0.999,
            std::to_string(hits) + "/20 seeds reach AR >= 0.95; grid oracle max = " + fmt(grid, 4)};
}

Outcome c9_qaoa_tamper() {
    const auto g = random_regular_graph(4, 2, 1);
    std::vector<double> ac;
    std::vector<double> at;
    std::vector<double> as;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto s = derive_seed(99, seed);
        ac.push_back(optimize(clean_backend(), g, QaoaConfig{}, s).ar);
        at.push_back(optimize(targeted_backend(0.5), g, QaoaConfig{}, s).ar);
        as.push_back(qaoa_iteration_split(clean_backend(), targeted_backend(0.5), g, QaoaConfig{}, s).ar);
    }
    const double c = mean(ac);
    const double t = mean(at);
    const double sp = mean(as);
    return {t <= 0.85 * c && sp > t && sp < c,
            "AR clean " + fmt(c) + ", tampered " + fmt(t) + " (ratio " + fmt(t / c, 3) + "), split " + fmt(sp)};
}

Outcome c10_metric_properties() {
    Rng rng(1010);
    double worst_sym = 0;
    double worst_tri = 0;
    double worst_dpi = 0;
    bool identity = true;
    auto draw = [&](std::size_t w) {
        std::vector<double> p(std::size_t{1} << w);
        double s = 0;
        for (auto &x : p) {
            x = rng.uniform() < 0.25 ? 0.0 : rng.uniform();
            s += x;
        }
        if (s == 0) {
            p[0] = s = 1;
        }
        for (auto &x : p) {
            x /= s;
        }
        return Distribution(w, p);
    };
    for (int i = 0; i < 1000; ++i) {
        const std::size_t w = 1 + rng.index(4);
        const auto a = draw(w);
        const auto b = draw(w);
        const auto c = draw(w);
        worst_sym = std::max(worst_sym, std::abs(tvd(a, b) - tvd(b, a)));
        identity = identity && tvd(a, a) == 0.0;
        worst_tri = std::max(worst_tri, tvd(a, c) - tvd(a, b) - tvd(b, c));
        std::vector<std::size_t> lines;
        for (std::size_t l = 0; l < w; ++l) {
            if (rng.bernoulli(0.5)) {
                lines.push_back(l);
            }
        }
        if (lines.empty()) {
            lines.push_back(0);
        }
        TamperSpec spec{TamperMode::Targeted, rng.uniform(), 1, lines};
        worst_dpi = std::max(worst_dpi, tvd(tamper_channel(a, spec), tamper_channel(b, spec)) - tvd(a, b));
    }
    return {worst_sym <= 1e-12 && identity && worst_tri <= 1e-12 && worst_dpi <= 1e-12,
            "max asymmetry " + std::to_string(worst_sym) + ", triangle excess " + std::to_string(worst_tri) +
                ", DPI excess " + std::to_string(worst_dpi)};
}

Outcome c11_determinism() {
    namespace fs = std::filesystem;
    const auto doc = nlohmann::json::parse(R"({
      "schema_version": 1,
      "experiment": "determinism",
      "master_seed": 11,
      "workload": [{"builtin": "toffoli_n3"}, {"builtin": "grover_n3"},
                   {"qaoa": {"graph": {"regular": {"n": 4, "d": 2, "seed": 1}}, "iterations": 30}}],
      "backends": [
        {"name": "hw", "readout": 0.02, "drift": 0.01},
        {"name": "hw_t", "readout": 0.02, "drift": 0.01, "tamper": {"mode": "targeted", "t": 0.3}},
        {"name": "hw_r", "readout": 0.02, "drift": 0.01, "tamper": {"mode": "random_subset", "t": 0.2, "k": 2}}
      ],
      "shots": 2000,
      "defense": ["none", "equal", "adaptive", "qaoa_split", "qaoa_adaptive"],
      "seeds": {"count": 3}
    })");
    // qaoa defenses only apply to the qaoa workload and vice versa; split the config
    auto circuits = doc;
    circuits["workload"] = nlohmann::json::array({doc["workload"][0], doc["workload"][1]});
    circuits["defense"] = nlohmann::json::array({"none", "equal", "adaptive"});
    auto qaoa = doc;
    qaoa["workload"] = nlohmann::json::array({doc["workload"][2]});
    qaoa["defense"] = nlohmann::json::array({"none", "qaoa_split", "qaoa_adaptive"});
    qaoa["backends"] = nlohmann::json::array({doc["backends"][0], doc["backends"][1]});

    std::size_t records = 0;
    bool same = true;
    const auto root = fs::temp_directory_path() / "qtamper_acceptance_c11";
    fs::remove_all(root);
    int idx = 0;
    for (const auto &cfg_json : {circuits, qaoa}) {
        const auto cfg = parse_config(cfg_json);
        std::vector<std::vector<nlohmann::json>> runs;
        for (std::size_t jobs : {1, 4, 4}) {
            const auto out = root / (std::to_string(idx) + "_" + std::to_string(runs.size()));
            const auto summary = run_experiment(cfg, RunOptions{jobs, std::nullopt, out});
            if (summary.failures != 0) {
                return {false, "a cell failed"};
            }
            runs.push_back(read_jsonl(summary.jsonl));
        }
        for (std::size_t r = 1; r < runs.size(); ++r) {
            same = same && runs[r].size() == runs[0].size();
            for (std::size_t i = 0; same && i < runs[0].size(); ++i) {
                same = strip_timing(runs[r][i]).dump() == strip_timing(runs[0][i]).dump();
            }
        }
        records += runs[0].size();
        ++idx;
    }
    std::size_t configs = 0;
    for (const auto &entry : fs::directory_iterator(fs::path(QTAMPER_SOURCE_DIR) / "configs")) {
        if (entry.path().extension() != ".json") {
            continue;
        }
        const auto cfg = load_config(entry.path());
        const auto a = run_experiment(cfg, RunOptions{1, std::nullopt, root / "cfg_a"});
        const auto b = run_experiment(cfg, RunOptions{4, std::nullopt, root / "cfg_b"});
        if (a.failures != 0 || b.failures != 0) {
            return {false, entry.path().filename().string() + ": a cell failed"};
        }
        const auto ra = read_jsonl(a.jsonl);
        const auto rb = read_jsonl(b.jsonl);
        same = same && ra.size() == rb.size();
        for (std::size_t i = 0; same && i < ra.size(); ++i) {
            same = strip_timing(ra[i]).dump() == strip_timing(rb[i]).dump();
        }
        records += ra.size();
        ++configs;
    }
    fs::remove_all(root);
    return {same && configs > 0,
            std::to_string(records) + " records identical across jobs=1 and jobs=4 (" +
                std::to_string(configs) + " shipped configs plus all defense modes)"};
}

} // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "oracle equivalence", 5, c1_oracle},
        {2, "channel exactness", 30, c2_channels},
        {3, "full-mixing invariant", 60, c3_mixing},
        {4, "PM vs t trend", 120, c4_pm_vs_t},
        {5, "PM vs shots at t=0.5", 60, c5_pm_vs_shots},
        {6, "equal split", 60, c6_equal_split},
        {7, "adaptive detection rate", 120, c7_detection},
        {8, "QAOA sanity", 60, c8_qaoa_sanity},
        {9, "QAOA tamper trend", 300, c9_qaoa_tamper},
        {10, "metric properties", 30, c10_metric_properties},
        {11, "determinism", 120, c11_determinism},
    };
    int failed = 0;
    for (const auto &c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception &e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool pass = o.pass && secs < c.limit_s;
        failed += !pass;
        std::cout << (pass ? "PASS" : "FAIL") << " criterion " << c.id << " (" << c.name << ") ["
                  << fmt(secs, 2) << " s / " << fmt(c.limit_s, 0) << " s]: " << o.detail << std::endl;
    }
    std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
    return failed == 0 ? 0 : 1;
}
