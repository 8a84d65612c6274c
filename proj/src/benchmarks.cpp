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

#include "qtamper/benchmarks.hpp"

#include <numbers>

#include "qtamper/error.hpp"

namespace qtamper {

using G = GateKind;

namespace {

void h_all(Circuit &c, std::size_t n) {
    for (std::size_t q = 0; q < n; ++q) {
        c.gate(G::H, {q});
    }
}

void x_all(Circuit &c, std::size_t n) {
    for (std::size_t q = 0; q < n; ++q) {
        c.gate(G::X, {q});
    }
}

void ccz(Circuit &c, std::size_t a, std::size_t b, std::size_t t) {
    c.gate(G::H, {t});
    c.gate(G::CCX, {a, b, t});
    c.gate(G::H, {t});
}

/// Controlled phase diag(1, 1, 1, e^{i theta}) from u1 and cx.
void cphase(Circuit &c, double theta, std::size_t ctrl, std::size_t tgt) {
    c.gate(G::U1, {ctrl}, {theta / 2.0});
    c.gate(G::CX, {ctrl, tgt});
    c.gate(G::U1, {tgt}, {-theta / 2.0});
    c.gate(G::CX, {ctrl, tgt});
    c.gate(G::U1, {tgt}, {theta / 2.0});
}

void set_bits(Circuit &c, const std::vector<std::size_t> &reg, unsigned value) {
    for (std::size_t i = 0; i < reg.size(); ++i) {
        if ((value >> i) & 1U) {
            c.gate(G::X, {reg[i]});
        }
    }
}

Benchmark finish(Circuit c, std::string expected) {
    c.measure_all();
    std::string name = c.name();
    return Benchmark{std::move(c), std::move(expected), std::move(name)};
}

Benchmark toffoli_n3() {
    Circuit c(3, 3, "toffoli_n3");
    c.gate(G::X, {0}).gate(G::X, {1}).gate(G::CCX, {0, 1, 2});
    return finish(std::move(c), "111");
}

// Controlled swap of q1 and q2 on control q0, input |q2 q1 q0> = |0 1 1>.
Benchmark fredkin_n3() {
    Circuit c(3, 3, "fredkin_n3");
    c.gate(G::X, {0}).gate(G::X, {1});
    c.gate(G::CX, {2, 1}).gate(G::CCX, {0, 1, 2}).gate(G::CX, {2, 1});
    return finish(std::move(c), "101");
}

Benchmark grover_n2() {
    Circuit c(2, 2, "grover_n2");
    h_all(c, 2);
    c.gate(G::CZ, {0, 1});
    h_all(c, 2);
    x_all(c, 2);
    c.gate(G::CZ, {0, 1});
    x_all(c, 2);
    h_all(c, 2);
    return finish(std::move(c), "11");
}

Benchmark grover_n3() {
    Circuit c(3, 3, "grover_n3");
    h_all(c, 3);
    for (int iter = 0; iter < 2; ++iter) {
        ccz(c, 0, 1, 2);
        h_all(c, 3);
        x_all(c, 3);
        ccz(c, 0, 1, 2);
        x_all(c, 3);
        h_all(c, 3);
    }
    return finish(std::move(c), "111");
}

// One-bit full adder: q0 = carry in, q1 = a, q2 = b (becomes the sum),
// q3 = carry out. Operands a = b = 1.
Benchmark adder_n4() {
    Circuit c(4, 4, "adder_n4");
    c.gate(G::X, {1}).gate(G::X, {2});
    c.gate(G::CCX, {1, 2, 3});
    c.gate(G::CX, {1, 2});
    c.gate(G::CCX, {0, 2, 3});
    c.gate(G::CX, {0, 2});
    return finish(std::move(c), "1010");
}

// Fourier-basis preparation of x = 5 followed by the inverse QFT.
Benchmark inverseqft_n4() {
    using std::numbers::pi;
    constexpr std::size_t n = 4;
    constexpr unsigned x = 5;
    Circuit c(n, n, "inverseqft_n4");
    for (std::size_t j = 0; j < n; ++j) {
        c.gate(G::H, {j});
        c.gate(G::U1, {j}, {2.0 * pi * static_cast<double>(x << j) / 16.0});
    }
    for (std::size_t i = 0; i < n / 2; ++i) {
        c.gate(G::SWAP, {i, n - 1 - i});
    }
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k < j; ++k) {
            cphase(c, -pi / static_cast<double>(1U << (j - k)), k, j);
        }
        c.gate(G::H, {j});
    }
    return finish(std::move(c), "0101");
}

// Hidden shift for the bent function f(x) = x0 x1 ^ x2 x3 with shift 1011.
Benchmark hs4_n4() {
    Circuit c(4, 4, "hs4_n4");
    const std::vector<std::size_t> shifted = {0, 1, 3};
    h_all(c, 4);
    for (auto q : shifted) {
        c.gate(G::X, {q});
    }
    c.gate(G::CZ, {0, 1}).gate(G::CZ, {2, 3});
    for (auto q : shifted) {
        c.gate(G::X, {q});
    }
    h_all(c, 4);
    c.gate(G::CZ, {0, 1}).gate(G::CZ, {2, 3});
    h_all(c, 4);
    return finish(std::move(c), "1011");
}

#if defined(QTAMPER_LARGE_BENCHMARKS)

// Ripple-carry adder with majority / unmajority blocks. q0 = carry in,
// q1..q4 = a, q5..q8 = b (becomes a + b), q9 = carry out. 11 + 6 = 17.
Benchmark adder_n10() {
    Circuit c(10, 10, "adder_n10");
    const std::size_t cin = 0;
    const std::size_t cout = 9;
    const std::vector<std::size_t> a = {1, 2, 3, 4};
    const std::vector<std::size_t> b = {5, 6, 7, 8};
    set_bits(c, a, 11);
    set_bits(c, b, 6);
    auto maj = [&](std::size_t x, std::size_t y, std::size_t z) {
        c.gate(G::CX, {z, y}).gate(G::CX, {z, x}).gate(G::CCX, {x, y, z});
    };
    auto uma = [&](std::size_t x, std::size_t y, std::size_t z) {
        c.gate(G::CCX, {x, y, z}).gate(G::CX, {z, x}).gate(G::CX, {x, y});
    };
    maj(cin, b[0], a[0]);
    for (std::size_t i = 1; i < 4; ++i) {
        maj(a[i - 1], b[i], a[i]);
    }
    c.gate(G::CX, {a[3], cout});
    for (std::size_t i = 3; i >= 1; --i) {
        uma(a[i - 1], b[i], a[i]);
    }
    uma(cin, b[0], a[0]);
    // cout | b = 0001 | a = 1011 | cin
    return finish(std::move(c), "1000110110");
}

// Schoolbook 3x3-bit multiply: q0..q2 = a, q3..q5 = b, q6..q11 = product,
// q12 = partial-product scratch. Each partial product a_i b_j is computed
// into the scratch qubit, which then conditionally adds 2^(i+j) to the
// product register. 5 * 6 = 30.
Benchmark multiply_n13() {
    Circuit c(13, 13, "multiply_n13");
    const std::vector<std::size_t> a = {0, 1, 2};
    const std::vector<std::size_t> b = {3, 4, 5};
    const std::vector<std::size_t> p = {6, 7, 8, 9, 10, 11};
    const std::size_t scratch = 12;
    set_bits(c, a, 5);
    set_bits(c, b, 6);
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
            c.gate(G::CCX, {a[i], b[j], scratch});
            // Controlled increment of p[k..5], highest bit first.
            const std::size_t k = i + j;
            for (std::size_t m = p.size(); m-- > k;) {
                std::vector<std::size_t> controls = {scratch};
                for (std::size_t l = k; l < m; ++l) {
                    controls.push_back(p[l]);
                }
                std::vector<std::size_t> dirty(a.begin(), a.end());
                dirty.insert(dirty.end(), b.begin(), b.end());
                append_mcx(c, controls, p[m], dirty);
            }
            c.gate(G::CCX, {a[i], b[j], scratch});
        }
    }
    // scratch | p = 011110 | b = 110 | a = 101
    return finish(std::move(c), "0011110110101");
}

#endif

} // namespace

void append_mcx(Circuit &c, const std::vector<std::size_t> &ctl, std::size_t target,
                const std::vector<std::size_t> &dirty) {
    const std::size_t n = ctl.size();
    if (n == 0) {
        c.gate(G::X, {target});
        return;
    }
    if (n == 1) {
        c.gate(G::CX, {ctl[0], target});
        return;
    }
    if (n == 2) {
        c.gate(G::CCX, {ctl[0], ctl[1], target});
        return;
    }
    if (dirty.size() < n - 2) {
        throw InvalidArgument("multi-controlled X needs " + std::to_string(n - 2) +
                              " borrowed qubits");
    }
    const auto &anc = dirty;
    // Toggle the target, then repeat so every borrowed qubit is restored.
    auto ladder = [&] {
        for (std::size_t i = n - 2; i >= 2; --i) {
            c.gate(G::CCX, {ctl[i], anc[i - 2], anc[i - 1]});
        }
        c.gate(G::CCX, {ctl[0], ctl[1], anc[0]});
        for (std::size_t i = 2; i <= n - 2; ++i) {
            c.gate(G::CCX, {ctl[i], anc[i - 2], anc[i - 1]});
        }
    };
    for (int rep = 0; rep < 2; ++rep) {
        c.gate(G::CCX, {ctl[n - 1], anc[n - 3], target});
        ladder();
    }
}

Benchmark builtin(std::string_view name) {
    if (name == "toffoli_n3") return toffoli_n3();
    if (name == "fredkin_n3") return fredkin_n3();
    if (name == "grover_n2") return grover_n2();
    if (name == "grover_n3") return grover_n3();
    if (name == "adder_n4") return adder_n4();
    if (name == "inverseqft_n4") return inverseqft_n4();
    if (name == "hs4_n4") return hs4_n4();
#if defined(QTAMPER_LARGE_BENCHMARKS)
    if (name == "adder_n10") return adder_n10();
    if (name == "multiply_n13") return multiply_n13();
#endif
    throw UnknownBenchmark("unknown benchmark '" + std::string(name) + "'");
}

std::vector<std::string> builtin_names() {
    std::vector<std::string> names = {"grover_n2",  "grover_n3",     "fredkin_n3", "toffoli_n3",
                                      "adder_n4",   "inverseqft_n4", "hs4_n4"};
#if defined(QTAMPER_LARGE_BENCHMARKS)
    names.emplace_back("adder_n10");
    names.emplace_back("multiply_n13");
#endif
    return names;
}

} // namespace qtamper
