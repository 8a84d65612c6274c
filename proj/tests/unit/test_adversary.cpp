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

#include <cmath>
#include <set>

#include "../oracle.hpp"
#include "qtamper/adversary.hpp"
#include "qtamper/benchmarks.hpp"
#include "qtamper/error.hpp"
#include "qtamper/metrics.hpp"
#include "qtamper/simulator.hpp"

using namespace qtamper;

TEST_SUITE("adversary") {

TEST_CASE("targeted planning picks the differing lines") {
    CHECK(plan_targeted(Counts::from_map({{"111", 90}, {"101", 10}})) ==
          std::vector<std::size_t>{1});
    CHECK(plan_targeted(Counts::from_map({{"10", 60}, {"01", 40}})) ==
          std::vector<std::size_t>{0, 1});
    CHECK_THROWS_AS((void)plan_targeted(Counts::from_map({{"111", 100}})), DegenerateCounts);
}

TEST_CASE("runner-up ties go to the smallest bitstring") {
    const auto lines = plan_targeted(Counts::from_map({{"111", 50}, {"110", 5}, {"011", 5}}));
    CHECK(lines == std::vector<std::size_t>{2});
}

TEST_CASE("tamper channel examples") {
    const auto d = Distribution::from_map({{"111", 1.0}});
    TamperSpec s{TamperMode::Targeted, 0.3, 1, std::vector<std::size_t>{1}};
    const auto out = tamper_channel(d, s);
    CHECK(out.probability("111") == doctest::Approx(0.7));
    CHECK(out.probability("101") == doctest::Approx(0.3));

    s.t = 0.0;
    const auto same = tamper_channel(Distribution::from_map({{"110", 0.3}, {"001", 0.7}}), s);
    CHECK(same.probability("110") == doctest::Approx(0.3));
    CHECK(same.probability("001") == doctest::Approx(0.7));
}

TEST_CASE("t=0.5 fully mixes the targeted line for any input") {
    Rng rng(4);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> p(16);
        double sum = 0;
        for (auto &x : p) {
            x = rng.uniform();
            sum += x;
        }
        for (auto &x : p) {
            x /= sum;
        }
        const std::size_t line = rng.index(4);
        TamperSpec s{TamperMode::Targeted, 0.5, 1, std::vector<std::size_t>{line}};
        const auto out = tamper_channel(Distribution(4, p), s);
        CHECK(std::abs(out.marginal_one(line) - 0.5) < 1e-12);
        CHECK(std::abs(out.total() - 1.0) < 1e-12);
    }
}

TEST_CASE("unresolved or invalid specs are rejected") {
    TamperSpec s{TamperMode::Targeted, 0.3, 1, std::nullopt};
    CHECK_THROWS_AS((void)tamper_channel(Distribution::uniform(2), s), InvalidArgument);
    CHECK_THROWS_AS((TamperSpec{TamperMode::RandomAll, 1.5, 1, std::nullopt}.validate()),
                    InvalidArgument);
    s.lines = std::vector<std::size_t>{3};
    CHECK_THROWS_AS((void)tamper_channel(Distribution::uniform(2), s), IndexError);
}

TEST_CASE("line resolution per mode") {
    Rng rng(8);
    const auto all = resolve_lines({TamperMode::RandomAll, 0.2, 1, std::nullopt}, 4, nullptr, rng);
    CHECK(all.lines == std::vector<std::size_t>{0, 1, 2, 3});
    const auto sub =
        resolve_lines({TamperMode::RandomSubset, 0.2, 2, std::nullopt}, 4, nullptr, rng);
    REQUIRE(sub.lines.has_value());
    CHECK(sub.lines->size() == 2);
    CHECK(std::set<std::size_t>(sub.lines->begin(), sub.lines->end()).size() == 2);
    CHECK_THROWS_AS(
        (void)resolve_lines({TamperMode::RandomSubset, 0.2, 5, std::nullopt}, 4, nullptr, rng),
        InvalidArgument);
    CHECK_THROWS_AS(
        (void)resolve_lines({TamperMode::Targeted, 0.2, 1, std::nullopt}, 4, nullptr, rng),
        InvalidArgument);
    const auto counts = Counts::from_map({{"1111", 80}, {"1011", 20}});
    const auto tgt =
        resolve_lines({TamperMode::Targeted, 0.2, 1, std::nullopt}, 4, &counts, rng);
    CHECK(tgt.lines == std::vector<std::size_t>{2});
}

TEST_CASE("mode names") {
    for (auto m : {TamperMode::RandomAll, TamperMode::RandomSubset, TamperMode::Targeted}) {
        CHECK(tamper_mode_from_name(tamper_mode_name(m)) == m);
    }
    CHECK_THROWS_AS((void)tamper_mode_from_name("bogus"), InvalidArgument);
}

TEST_CASE("masked RAE arithmetic") {
    const auto r = masked_rae(0.02, 0.1, 5, 1);
    CHECK(r.n == 5);
    CHECK(r.delta_tampering == doctest::Approx(0.02));
    CHECK(r.net_rae == doctest::Approx(std::sqrt(0.02 * 0.02 + 0.02 * 0.02)));
    CHECK(std::round(r.net_rae * 1e4) / 1e4 == doctest::Approx(0.0283));
    CHECK(masked_rae(0.031, 0.0, 5, 2).net_rae == doctest::Approx(0.031));
    const auto edge = masked_rae(0.0, 0.5, 5, 5);
    CHECK(edge.n == 1);
    CHECK(edge.net_rae == doctest::Approx(0.5));
    CHECK_THROWS_AS((void)masked_rae(0.02, 0.1, 5, 0), InvalidLineCount);
    CHECK_THROWS_AS((void)masked_rae(0.02, 0.1, 5, 6), InvalidLineCount);
}

TEST_CASE("analytic channels agree with per-shot bit flips") {
    const auto b = builtin("toffoli_n3");
    const auto ideal = oracle::circuit_distribution(b.circuit);
    for (double t : {0.1, 0.3, 0.5}) {
        CAPTURE(t);
        const std::vector<ReadoutError> ro(3, {0.03, 0.05});
        TamperSpec s{TamperMode::Targeted, t, 1, std::vector<std::size_t>{0, 2}};
        const auto analytic =
            tamper_channel(apply_readout_channel(run_statevector(b.circuit), ro), s);
        const auto mc = oracle::monte_carlo_flips(ideal, 3, 0.03, 0.05, {0, 2}, t, 200000,
                                                  derive_seed(1, t));
        CHECK(oracle::tvd(analytic.probs(), mc) < 0.01);
    }
}

}
