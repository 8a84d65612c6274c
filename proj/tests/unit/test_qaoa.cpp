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

#include <algorithm>
#include <numbers>

#include "../oracle.hpp"
#include "qtamper/error.hpp"
#include "qtamper/qaoa.hpp"

using namespace qtamper;

namespace {

// Triangle 0-1-2 sharing node 0 and 2 with the 4-cycle 0-2-3-4.
Graph five_node() { return Graph(5, {{0, 1}, {1, 2}, {2, 0}, {2, 3}, {3, 4}, {4, 0}}); }

std::size_t brute_cmax(const Graph &g) {
    std::size_t best = 0;
    for (std::uint64_t a = 0; a < (std::uint64_t{1} << g.num_nodes()); ++a) {
        best = std::max(best, oracle::cut(to_bitstring(a, g.num_nodes()), g));
    }
    return best;
}

BackendModel clean() { return {"hw", NoiseModel::symmetric(0.02), std::nullopt, 0.01}; }

} // namespace

TEST_SUITE("qaoa") {

TEST_CASE("graph validation") {
    const Graph g(3, {{2, 0}, {1, 0}});
    CHECK(g.edges() == std::vector<std::pair<std::size_t, std::size_t>>{{0, 1}, {0, 2}});
    CHECK(g.degrees() == std::vector<std::size_t>{2, 1, 1});
    CHECK_THROWS_AS(Graph(3, {{1, 1}}), InvalidArgument);
    CHECK_THROWS_AS(Graph(3, {{0, 1}, {1, 0}}), InvalidArgument);
    CHECK_THROWS_AS(Graph(3, {{0, 3}}), InvalidArgument);
}

TEST_CASE("cut values") {
    const Graph edge(2, {{0, 1}});
    CHECK(cut_value("01", edge) == 1);
    CHECK(cut_value("00", edge) == 0);
    const auto g = five_node();
    CHECK(cut_value("00000", g) == 0);
    CHECK(cut_value("10101", g) == oracle::cut("10101", g));
    for (std::uint64_t a = 0; a < 32; ++a) {
        CHECK(cut_value(a, g) == oracle::cut(to_bitstring(a, 5), g));
    }
    CHECK_THROWS_AS((void)cut_value("0101", g), LengthMismatch);
}

TEST_CASE("cmax matches brute force") {
    CHECK(cmax(five_node()) == 5);
    CHECK(brute_cmax(five_node()) == 5);
    for (std::uint64_t s = 0; s < 5; ++s) {
        const auto g = random_regular_graph(8, 3, s);
        CHECK(cmax(g) == brute_cmax(g));
    }
}

TEST_CASE("expectation") {
    const auto g = five_node();
    std::string best;
    for (std::uint64_t a = 0; a < 32; ++a) {
        if (cut_value(a, g) == 5) {
            best = to_bitstring(a, 5);
            break;
        }
    }
    CHECK(expectation(Counts::from_map({{best, 7}}), g) == doctest::Approx(5.0));
    CHECK(expectation(Distribution::uniform(2), Graph(2, {{0, 1}})) == doctest::Approx(0.5));
    Rng rng(3);
    for (int i = 0; i < 20; ++i) {
        Counts c(5);
        for (int k = 0; k < 10; ++k) {
            c.add(to_bitstring(rng.index(32), 5), 1 + rng.index(5));
        }
        const double e = expectation(c, g);
        CHECK(e >= 0.0);
        CHECK(e <= 5.0);
    }
    CHECK_THROWS_AS((void)expectation(Counts::from_map({{"01", 1}}), g), LengthMismatch);
}

TEST_CASE("random regular graphs") {
    for (auto [n, d] : std::vector<std::pair<std::size_t, std::size_t>>{{4, 2}, {6, 3}, {10, 4}, {8, 5}}) {
        const auto g = random_regular_graph(n, d, 42);
        for (auto deg : g.degrees()) {
            CHECK(deg == d);
        }
        CHECK(g == random_regular_graph(n, d, 42));
    }
    CHECK_THROWS_AS((void)random_regular_graph(5, 3, 1), InfeasibleDegree);
    CHECK_THROWS_AS((void)random_regular_graph(4, 4, 1), InfeasibleDegree);
}

TEST_CASE("circuit shape") {
    const auto c = build_qaoa_circuit(Graph(2, {{0, 1}}), {{0.3}, {0.2}});
    std::vector<GateKind> kinds;
    for (const auto &i : c.instructions()) {
        kinds.push_back(i.kind);
    }
    CHECK(kinds == std::vector<GateKind>{GateKind::H, GateKind::H, GateKind::CX, GateKind::RZ,
                                         GateKind::CX, GateKind::RX, GateKind::RX,
                                         GateKind::MEASURE, GateKind::MEASURE});
    CHECK(c.instructions()[3].params[0] == doctest::Approx(0.6));
    CHECK(c.instructions()[5].params[0] == doctest::Approx(0.4));
    const auto zero = run_statevector(build_qaoa_circuit(five_node(), {{0.0}, {0.0}}));
    for (std::size_t i = 0; i < zero.size(); ++i) {
        CHECK(zero[i] == doctest::Approx(1.0 / 32));
    }
    CHECK_THROWS_AS((void)build_qaoa_circuit(Graph(2, {{0, 1}}), {{0.1, 0.2}, {0.1}}),
                    InvalidArgument);
    CHECK_THROWS_AS((void)build_qaoa_circuit(Graph(21, {}), {{0.1}, {0.1}}), CapacityExceeded);
}

TEST_CASE("params flatten round trip") {
    const QaoaParams p{{0.1, 0.2}, {0.3, 0.4}};
    CHECK(p.flatten() == std::vector<double>{0.1, 0.2, 0.3, 0.4});
    CHECK(QaoaParams::unflatten(p.flatten()) == p);
    const auto init = initial_params(3, 5);
    CHECK(init.depth() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(init.gamma[i] >= 0.0);
        CHECK(init.gamma[i] < std::numbers::pi);
        CHECK(init.beta[i] >= 0.0);
        CHECK(init.beta[i] < std::numbers::pi / 2);
    }
}

TEST_CASE("Nelder-Mead respects its budget and finds a smooth maximum") {
    std::size_t calls = 0;
    auto f = [&](const std::vector<double> &x) {
        ++calls;
        return -((x[0] - 1.0) * (x[0] - 1.0) + 2 * (x[1] + 0.5) * (x[1] + 0.5));
    };
    const auto evals = nelder_mead_maximize(f, {0.0, 0.0}, 120);
    CHECK(calls == 120);
    CHECK(evals.size() == 120);
    const auto best = *std::max_element(evals.begin(), evals.end(),
                                        [](const auto &a, const auto &b) { return a.value < b.value; });
    CHECK(best.x[0] == doctest::Approx(1.0).epsilon(0.05));
    CHECK(best.x[1] == doctest::Approx(-0.5).epsilon(0.05));
}

TEST_CASE("grid oracle: p=1 reaches expectation 1 on one edge") {
    CHECK(oracle::single_edge_grid_max(64) == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("optimizer record") {
    QaoaConfig cfg;
    const auto rec = optimize(clean(), Graph(2, {{0, 1}}), cfg, 7);
    CHECK(rec.trace.size() == 50);
    CHECK(rec.cmax == 1);
    CHECK(rec.shots_used == 2500);
    CHECK(rec.final_counts.total_shots() == 50);
    CHECK(rec.best_expectation == doctest::Approx(*std::max_element(rec.trace.begin(), rec.trace.end())));
    CHECK(rec.ar == doctest::Approx(rec.best_expectation));
    cfg.iterations = 0;
    CHECK_THROWS_AS((void)optimize(clean(), Graph(2, {{0, 1}}), cfg, 7), InvalidArgument);
}

}
