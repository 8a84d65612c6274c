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

#include <string>

#include "../oracle.hpp"
#include "qtamper/benchmarks.hpp"
#include "qtamper/error.hpp"
#include "qtamper/qasm.hpp"
#include "qtamper/simulator.hpp"

using namespace qtamper;

TEST_SUITE("qasm") {

TEST_CASE("one-gate program") {
    const auto c = parse_qasm("qreg q[1]; creg c[1]; x q[0]; measure q[0] -> c[0];");
    CHECK(c.num_qubits() == 1);
    CHECK(c.num_clbits() == 1);
    REQUIRE(c.instructions().size() == 2);
    CHECK(c.instructions()[0].kind == GateKind::X);
    CHECK(c.instructions()[1].kind == GateKind::MEASURE);
    CHECK(c.instructions()[1].clbit == 0);
}

TEST_CASE("toffoli source gives 111") {
    const char *src = R"(OPENQASM 2.0;
include "qelib1.inc";
qreg q[3];
creg c[3];
x q[0];
x q[1];
ccx q[0],q[1],q[2];
measure q -> c;
)";
    const auto c = parse_qasm(src);
    CHECK(c.num_qubits() == 3);
    CHECK(run_statevector(c).probability("111") == doctest::Approx(1.0));
}

TEST_CASE("expressions, aliases and macros") {
    const char *src = R"(OPENQASM 2.0;
qreg a[1]; qreg b[1]; creg c[2];
gate flip(theta) x { U(theta, 0, pi) x; }
gate pair p, q { CX p, q; }
flip(2*pi/2) a[0];   // pi rotation == X up to phase
pair a[0], b[0];
rz(-pi/4 + 0.25*pi) b[0];
u1(sqrt(4)^2 / 4 * ln(exp(0))) a[0];
measure a[0] -> c[0];
measure b[0] -> c[1];
)";
    const auto c = parse_qasm(src);
    CHECK(c.num_qubits() == 2);
    CHECK(run_statevector(c).probability("11") == doctest::Approx(1.0));
    CHECK(c.instructions()[0].kind == GateKind::U3);
    CHECK(c.instructions()[1].kind == GateKind::CX);
    CHECK(c.instructions()[2].params[0] == doctest::Approx(0.0));
}

TEST_CASE("register broadcast") {
    const auto c =
        parse_qasm("qreg q[3]; qreg r[3]; creg c[3]; h q; cx q, r; cx q[0], r; measure r -> c;");
    CHECK(c.gate_count() == 3 + 3 + 3);
    CHECK(c.instructions()[4].qubits == std::vector<std::size_t>{1, 4});
    CHECK(c.instructions()[7].qubits == std::vector<std::size_t>{0, 4});
}

TEST_CASE("rejections") {
    CHECK_THROWS_AS((void)parse_qasm("qreg q[3]; creg c[3]; x q[5];"), IndexError);
    CHECK_THROWS_AS((void)parse_qasm("qreg q[1]; creg c[1]; x q[0]"), SyntaxError);
    CHECK_THROWS_AS((void)parse_qasm("qreg q[1]; foo q[0];"), UnsupportedGate);
    CHECK_THROWS_AS((void)parse_qasm("qreg q[1]; creg c[1]; reset q[0];"), UnsupportedGate);
    CHECK_THROWS_AS((void)parse_qasm("qreg q[1]; creg c[1]; if(c==1) x q[0];"), UnsupportedGate);
    CHECK_THROWS_AS((void)parse_qasm("OPENQASM 3.0; qreg q[1];"), SyntaxError);
    CHECK_THROWS_AS((void)parse_qasm("qreg q[25];"), CapacityExceeded);
    CHECK_THROWS_AS((void)parse_qasm("qreg q[1]; rx(theta) q[0];"), SyntaxError);
    CHECK_THROWS_AS((void)parse_qasm("qreg q[2]; cx q[0];"), SyntaxError);
    CHECK_THROWS_AS((void)parse_qasm("qreg q[2]; cx q[0], q[0];"), SyntaxError);
    CHECK_THROWS_AS((void)parse_qasm("qreg q[1]; gate g a { g a; } g q[0];"), SyntaxError);
    CHECK_THROWS_AS((void)parse_qasm("qreg q[1]; gate g a { x a; } gate g a { y a; }"), SyntaxError);
    CHECK_THROWS_AS((void)parse_qasm("qreg q[1]; qreg q[2];"), SyntaxError);
    CHECK_THROWS_AS((void)parse_qasm("creg c[1];"), SyntaxError);
    CHECK_THROWS_AS((void)load_qasm("/nonexistent/file.qasm"), IoError);
}

TEST_CASE("syntax errors carry the line number") {
    try {
        (void)parse_qasm("qreg q[1];\n\nx q[0]\n");
        FAIL("expected SyntaxError");
    } catch (const SyntaxError &e) {
        CHECK(e.line() >= 3);
    }
}

TEST_CASE("every builtin round-trips through text") {
    for (const auto &name : builtin_names()) {
        CAPTURE(name);
        const auto b = builtin(name);
        const auto back = parse_qasm(to_qasm(b.circuit), b.circuit.name());
        CHECK(back.instructions() == b.circuit.instructions());
        CHECK(back.num_qubits() == b.circuit.num_qubits());
        CHECK(back.num_clbits() == b.circuit.num_clbits());
    }
}

TEST_CASE("mutating one token of a valid program is caught or changes the circuit") {
    const std::string src = to_qasm(builtin("toffoli_n3").circuit);
    const auto original = parse_qasm(src);
    std::size_t rejected = 0;
    std::size_t mutated = 0;
    for (std::size_t i = 0; i < src.size(); ++i) {
        if (src[i] != ';' && src[i] != '[' && src[i] != ']') {
            continue;
        }
        std::string bad = src;
        bad.erase(i, 1);
        ++mutated;
        try {
            (void)parse_qasm(bad);
        } catch (const Error &) {
            ++rejected;
        }
    }
    CHECK(mutated > 10);
    CHECK(rejected == mutated);
}

}
