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

#include <doctest.h>

#include <numeric>

#include "qtamper/benchmarks.hpp"
#include "qtamper/defense.hpp"
#include "qtamper/error.hpp"
#include "qtamper/metrics.hpp"

using namespace qtamper;

namespace {

BackendModel clean(const std::string &name) {
    return {name, NoiseModel::symmetric(0.02), std::nullopt, 0.01};
}

BackendModel targeted(const std::string &name, double t) {
    return {name, NoiseModel::symmetric(0.02), TamperSpec{TamperMode::Targeted, t, 1, std::nullopt},
            0.01};
}

std::uint64_t sum(const SplitPlan &p) {
    std::uint64_t s = 0;
    for (const auto &a : p.allocations) {
        s += a.shots;
    }
    return s;
}

} // namespace

TEST_SUITE("defense") {

TEST_CASE("equal split arithmetic") {
    const auto two = plan_equal_split({clean("a"), clean("b")}, 10000);
    CHECK(two.allocations[0].shots == 5000);
    CHECK(two.allocations[1].shots == 5000);
    const auto three = plan_equal_split({clean("a"), clean("b"), clean("c")}, 10000);
    CHECK(three.allocations[0].shots == 3334);
    CHECK(three.allocations[1].shots == 3333);
    CHECK(three.allocations[2].shots == 3333);
    CHECK(three.total() == 10000);
    CHECK_THROWS_AS((void)plan_equal_split({clean("a"), clean("b"), clean("c")}, 2),
                    InsufficientShots);
    CHECK_THROWS_AS((void)plan_equal_split({clean("a")}, 100), InvalidArgument);
}

TEST_CASE("equal split improves PM over a fully tampered run") {
    const auto b = builtin("toffoli_n3");
    const auto split = equal_split({clean("hw"), targeted("hw_t", 0.5)}, b.circuit, 10000, 3);
    CHECK(split.counts.total_shots() == 10000);
    REQUIRE(split.parts.size() == 2);
    CHECK(split.parts[0].total_shots() == 5000);
    const auto tampered = execute(targeted("hw_t", 0.5), b.circuit, 10000, 3);
    CHECK(pm(split.counts, "111") > pm(tampered, "111"));
}

TEST_CASE("probe shape and clean repeatability") {
    const auto b = builtin("toffoli_n3");
    const auto r = probe({clean("hw"), targeted("hw_t", 0.5)}, b.circuit, 50, 2, 9);
    REQUIRE(r.backends.size() == 2);
    for (const auto &p : r.backends) {
        CHECK(p.runs.size() == 2);
        CHECK(p.pairwise_tvd.size() == 1);
        CHECK(p.pm.size() == 2);
        for (const auto &run : p.runs) {
            CHECK(run.total_shots() == 50);
        }
    }
    CHECK(r.backends[0].tops == std::vector<Bitstring>{"111", "111"});
    CHECK(r.backends[0].repeatable);
    CHECK(r.backends[0].mean_tvd() < 0.2);
    CHECK(r.voted == "111");
    CHECK_THROWS_AS((void)probe({clean("a")}, b.circuit, 5, 2, 1), InvalidArgument);
    CHECK_THROWS_AS((void)probe({clean("a")}, b.circuit, 50, 1, 1), InvalidArgument);
    const auto r4 = probe({clean("hw")}, b.circuit, 20, 4, 1);
    CHECK(r4.backends[0].pairwise_tvd.size() == 6);
}

TEST_CASE("selection picks clean over t=0.3 and breaks ties by name") {
    const auto b = builtin("toffoli_n3");
    int clean_wins = 0;
    for (std::uint64_t s = 0; s < 20; ++s) {
        const auto r = probe({targeted("hw_t", 0.3), clean("hw")}, b.circuit, 50, 2, s);
        clean_wins += select_backend(r) == "hw";
    }
    CHECK(clean_wins >= 18);
    ProbeReport same;
    BackendProbe p;
    p.repeatable = p.matches_vote = true;
    p.pairwise_tvd = {0.1};
    p.pm = {PerformanceMetric::finite(2.0)};
    p.confidence = {0.9};
    p.name = "zeta";
    same.backends.push_back(p);
    p.name = "alpha";
    same.backends.push_back(p);
    CHECK(select_backend(same) == "alpha");
    CHECK_THROWS_AS((void)select_backend(ProbeReport{}), InvalidArgument);
}

TEST_CASE("selection is deterministic when nobody is repeatable") {
    ProbeReport r;
    BackendProbe a;
    a.name = "a";
    a.pairwise_tvd = {0.3};
    a.pm = {PerformanceMetric::finite(0.8), PerformanceMetric::finite(1.1)};
    a.confidence = {0.2, 0.3};
    BackendProbe b = a;
    b.name = "b";
    b.pm = {PerformanceMetric::finite(1.2), PerformanceMetric::finite(1.1)};
    r.backends = {a, b};
    CHECK(select_backend(r) == "b");
    const std::vector<SelectionCriterion> tvd_first = {SelectionCriterion::LowerTvd,
                                                       SelectionCriterion::HigherConfidence};
    CHECK(select_backend(r, tvd_first) == "a");
    CHECK(select_backend(r) == select_backend(r));
}

TEST_CASE("criterion names round trip") {
    for (auto c : default_selection_order()) {
        CHECK(selection_criterion_from_name(selection_criterion_name(c)) == c);
    }
    CHECK_THROWS_AS((void)selection_criterion_from_name("speed"), InvalidArgument);
}

TEST_CASE("adaptive split budget and counts") {
    const auto b = builtin("toffoli_n3");
    const auto res = adaptive_split({clean("hw"), targeted("hw_t", 0.5)}, b.circuit, 10000, 50, 2, 4);
    CHECK(res.selected == "hw");
    CHECK(sum(res.plan) == 10000);
    CHECK(res.plan.probe_shots == 50);
    CHECK(res.plan.probe_runs == 2);
    // selected backend keeps its probes and gets the 9800-shot remainder
    CHECK(res.counts.total_shots() == 9900);
    CHECK(res.counts.top() == "111");
    CHECK_THROWS_AS(
        (void)adaptive_split({clean("hw"), clean("hw2")}, b.circuit, 199, 50, 2, 1),
        InsufficientShots);
}

TEST_CASE("adaptive beats equal beats tampered-only on median PM") {
    const auto b = builtin("toffoli_n3");
    std::vector<double> ad;
    std::vector<double> eq;
    std::vector<double> tp;
    for (std::uint64_t s = 0; s < 11; ++s) {
        const std::vector<BackendModel> bs = {clean("hw"), targeted("hw_t", 0.3)};
        ad.push_back(pm(adaptive_split(bs, b.circuit, 10000, 50, 2, s).counts, "111").as_double());
        eq.push_back(pm(equal_split(bs, b.circuit, 10000, s).counts, "111").as_double());
        tp.push_back(pm(execute(bs[1], b.circuit, 10000, s), "111").as_double());
    }
    auto median = [](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        return v[v.size() / 2];
    };
    CHECK(median(ad) >= median(eq));
    CHECK(median(eq) >= median(tp));
}

TEST_CASE("random-mode tampering on both backends still selects") {
    const auto b = builtin("grover_n3");
    int adaptive_ok = 0;
    for (std::uint64_t s = 0; s < 20; ++s) {
        const std::vector<BackendModel> bs = {
            {"r1", NoiseModel::symmetric(0.02), TamperSpec{TamperMode::RandomAll, 0.2, 1, std::nullopt}, 0.01},
            {"r2", NoiseModel::symmetric(0.02), TamperSpec{TamperMode::RandomSubset, 0.4, 2, std::nullopt}, 0.01}};
        const auto ad = adaptive_split(bs, b.circuit, 10000, 50, 2, s);
        const auto eq = equal_split(bs, b.circuit, 10000, s);
        adaptive_ok += pm(ad.counts, b.expected_output) >= pm(eq.counts, b.expected_output);
    }
    CHECK(adaptive_ok >= 10);
}

TEST_CASE("QAOA iteration split") {
    const Graph g(2, {{0, 1}});
    QaoaConfig cfg;
    cfg.iterations = 10;
    cfg.shots_per_iter = 50;
    const auto rec = qaoa_iteration_split(clean("a"), clean("b"), g, cfg, 3);
    CHECK(rec.trace.size() == 10);
    CHECK(rec.trace_backend[4] == "a");
    CHECK(rec.trace_backend[5] == "b");
    CHECK(rec.shots_used == 500);
    CHECK(rec.ar >= 0.0);
    CHECK(rec.ar <= 1.0);
    cfg.iterations = 9;
    CHECK_THROWS_AS((void)qaoa_iteration_split(clean("a"), clean("b"), g, cfg, 3), InvalidArgument);
}

TEST_CASE("QAOA adaptive with identical backends breaks the tie by name") {
    const Graph g(2, {{0, 1}});
    QaoaConfig cfg;
    cfg.iterations = 30;
    const auto res = qaoa_adaptive({clean("zz"), clean("aa")}, g, cfg, 5, 1);
    REQUIRE(res.probes.size() == 2);
    CHECK(res.probes[0].ar.size() == 2);
    CHECK(res.record.shots_used == 30 * cfg.shots_per_iter);
    cfg.iterations = 20;
    CHECK_THROWS_AS((void)qaoa_adaptive({clean("a"), clean("b")}, g, cfg, 5, 1), InvalidArgument);
}

}
