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

#include "qtamper/circuit.hpp"

#include <algorithm>
#include <array>
#include <utility>

#include "qtamper/error.hpp"

namespace qtamper {

namespace {

struct GateInfo {
    GateKind kind;
    std::string_view name;
    std::size_t arity;
    std::size_t params;
};

constexpr std::array<GateInfo, 20> kGateTable{{
    {GateKind::H, "h", 1, 0},
    {GateKind::X, "x", 1, 0},
    {GateKind::Y, "y", 1, 0},
    {GateKind::Z, "z", 1, 0},
    {GateKind::S, "s", 1, 0},
    {GateKind::SDG, "sdg", 1, 0},
    {GateKind::T, "t", 1, 0},
    {GateKind::TDG, "tdg", 1, 0},
    {GateKind::RX, "rx", 1, 1},
    {GateKind::RY, "ry", 1, 1},
    {GateKind::RZ, "rz", 1, 1},
    {GateKind::U1, "u1", 1, 1},
    {GateKind::U2, "u2", 1, 2},
    {GateKind::U3, "u3", 1, 3},
    {GateKind::CX, "cx", 2, 0},
    {GateKind::CZ, "cz", 2, 0},
    {GateKind::SWAP, "swap", 2, 0},
    {GateKind::CCX, "ccx", 3, 0},
    {GateKind::BARRIER, "barrier", 0, 0},
    {GateKind::MEASURE, "measure", 1, 0},
}};

const GateInfo &info(GateKind kind) noexcept {
    return kGateTable[static_cast<std::size_t>(kind)];
}

} // namespace

std::size_t gate_arity(GateKind kind) noexcept { return info(kind).arity; }
std::size_t gate_param_count(GateKind kind) noexcept { return info(kind).params; }
std::string_view gate_name(GateKind kind) noexcept { return info(kind).name; }

std::optional<GateKind> gate_from_name(std::string_view name) noexcept {
    for (const auto &g : kGateTable) {
        if (g.name == name) {
            return g.kind;
        }
    }
    return std::nullopt;
}

Circuit::Circuit(std::size_t num_qubits, std::size_t num_clbits, std::string name)
    : num_qubits_(num_qubits), num_clbits_(num_clbits), name_(std::move(name)) {
    if (num_qubits == 0) {
        throw InvalidArgument("circuit needs at least one qubit");
    }
    if (num_qubits > kMaxQubits) {
        throw CapacityExceeded("circuit has " + std::to_string(num_qubits) +
                               " qubits; limit is " + std::to_string(kMaxQubits));
    }
}

Circuit &Circuit::add(Instruction inst) {
    const auto kind = inst.kind;
    if (kind != GateKind::BARRIER && inst.qubits.size() != gate_arity(kind)) {
        throw InvalidArgument(std::string(gate_name(kind)) + " expects " +
                              std::to_string(gate_arity(kind)) + " qubit(s)");
    }
    if (inst.params.size() != gate_param_count(kind)) {
        throw InvalidArgument(std::string(gate_name(kind)) + " expects " +
                              std::to_string(gate_param_count(kind)) +
                              " parameter(s)");
    }
    for (std::size_t i = 0; i < inst.qubits.size(); ++i) {
        if (inst.qubits[i] >= num_qubits_) {
            throw IndexError("qubit index " + std::to_string(inst.qubits[i]) +
                             " out of range for " + std::to_string(num_qubits_) +
                             " qubits");
        }
        for (std::size_t j = 0; j < i; ++j) {
            if (inst.qubits[i] == inst.qubits[j]) {
                throw InvalidArgument("repeated qubit operand " +
                                      std::to_string(inst.qubits[i]) + " in " +
                                      std::string(gate_name(kind)));
            }
        }
    }
    if (kind == GateKind::MEASURE) {
        if (!inst.clbit) {
            throw InvalidArgument("measure requires a classical bit");
        }
        if (*inst.clbit >= num_clbits_) {
            throw IndexError("clbit index " + std::to_string(*inst.clbit) +
                             " out of range for " + std::to_string(num_clbits_) +
                             " clbits");
        }
        for (const auto &prev : instructions_) {
            if (prev.kind != GateKind::MEASURE) {
                continue;
            }
            if (prev.qubits[0] == inst.qubits[0] || prev.clbit == inst.clbit) {
                throw InvalidArgument("qubit and clbit may be measured only once");
            }
        }
    } else if (inst.clbit) {
        throw InvalidArgument("only measure carries a classical bit");
    } else if (kind != GateKind::BARRIER) {
        for (const auto &prev : instructions_) {
            if (prev.kind == GateKind::MEASURE &&
                std::find(inst.qubits.begin(), inst.qubits.end(), prev.qubits[0]) !=
                    inst.qubits.end()) {
                throw InvalidArgument("gate after measurement on qubit " +
                                      std::to_string(prev.qubits[0]) +
                                      " (mid-circuit measurement is unsupported)");
            }
        }
    }
    instructions_.push_back(std::move(inst));
    return *this;
}

Circuit &Circuit::gate(GateKind kind, std::vector<std::size_t> qubits,
                       std::vector<double> params) {
    return add(Instruction{kind, std::move(qubits), std::move(params), std::nullopt});
}

Circuit &Circuit::measure(std::size_t qubit, std::size_t clbit) {
    return add(Instruction{GateKind::MEASURE, {qubit}, {}, clbit});
}

Circuit &Circuit::measure_all() {
    for (std::size_t q = 0; q < num_qubits_; ++q) {
        measure(q, q);
    }
    return *this;
}

std::vector<std::optional<std::size_t>> Circuit::measurement_map() const {
    std::vector<std::optional<std::size_t>> map(num_clbits_);
    for (const auto &inst : instructions_) {
        if (inst.kind == GateKind::MEASURE) {
            map[*inst.clbit] = inst.qubits[0];
        }
    }
    return map;
}

std::size_t Circuit::gate_count() const noexcept {
    return static_cast<std::size_t>(
        std::count_if(instructions_.begin(), instructions_.end(), [](const auto &i) {
            return i.kind != GateKind::BARRIER && i.kind != GateKind::MEASURE;
        }));
}

std::size_t Circuit::depth() const {
    std::vector<std::size_t> level(num_qubits_, 0);
    for (const auto &inst : instructions_) {
        std::vector<std::size_t> operands = inst.qubits;
        if (inst.kind == GateKind::BARRIER && operands.empty()) {
            operands.resize(num_qubits_);
            for (std::size_t q = 0; q < num_qubits_; ++q) {
                operands[q] = q;
            }
        }
        std::size_t top = 0;
        for (auto q : operands) {
            top = std::max(top, level[q]);
        }
        const std::size_t next = inst.kind == GateKind::BARRIER ? top : top + 1;
        for (auto q : operands) {
            level[q] = next;
        }
    }
    return level.empty() ? 0 : *std::max_element(level.begin(), level.end());
}

} // namespace qtamper
