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

#include "../oracle.hpp"
#include "qtamper/benchmarks.hpp"
#include "qtamper/error.hpp"
#include "qtamper/simulator.hpp"

using namespace qtamper;

TEST_SUITE("benchmarks") {

TEST_CASE("expected outputs") {
    CHECK(builtin("toffoli_n3").expected_output == "111");
    CHECK(builtin("grover_n2").expected_output == "11");
    CHECK_THROWS_AS((void)builtin("nonexistent"), UnknownBenchmark);
}

TEST_CASE("small builtins agree with the dense-unitary oracle") {
    for (const auto &name : builtin_names()) {
        const auto b = builtin(name);
        if (b.circuit.num_qubits() > 5) {
            continue;
        }
        CAPTURE(name);
        const auto ref = oracle::circuit_distribution(b.circuit);
        const auto got = run_statevector(b.circuit);
        REQUIRE(got.size() == ref.size());
        for (std::size_t i = 0; i < ref.size(); ++i) {
            CHECK(std::abs(got[i] - ref[i]) < 1e-9);
        }
        CHECK(got.top() == b.expected_output);
    }
}

TEST_CASE("every builtin's ideal top outcome is its expected output") {
    for (const auto &name : builtin_names()) {
        CAPTURE(name);
        const auto b = builtin(name);
        CHECK(run_statevector(b.circuit).top() == b.expected_output);
        CHECK(b.expected_output.size() == b.circuit.num_clbits());
    }
}

TEST_CASE("grover_n2 marks 11 with high probability") {
    CHECK(run_statevector(builtin("grover_n2").circuit).probability("11") > 0.9);
}

TEST_CASE("append_mcx flips the target exactly when all controls are set") {
    for (std::size_t nc : {3U, 4U, 5U}) {
        const std::size_t n = 2 * nc; // controls, target, dirty ancillas
        for (std::uint64_t basis = 0; basis < (std::uint64_t{1} << n); ++basis) {
            Circuit c(n, n);
            for (std::size_t q = 0; q < n; ++q) {
                if ((basis >> q) & 1U) {
                    c.gate(GateKind::X, {q});
                }
            }
            std::vector<std::size_t> controls;
            for (std::size_t q = 0; q < nc; ++q) {
                controls.push_back(q);
            }
            std::vector<std::size_t> dirty;
            for (std::size_t q = nc + 1; q < n; ++q) {
                dirty.push_back(q);
            }
            append_mcx(c, controls, nc, dirty);
            c.measure_all();
            const std::uint64_t cmask = (std::uint64_t{1} << nc) - 1;
            const std::uint64_t want =
                (basis & cmask) == cmask ? basis ^ (std::uint64_t{1} << nc) : basis;
            CHECK(run_statevector(c)[want] == doctest::Approx(1.0));
        }
    }
}

}
