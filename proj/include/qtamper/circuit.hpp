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

/**
 * @file
 * Gate-level circuit intermediate representation.
 */

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qtamper {

/// Simulator capacity guard.
inline constexpr std::size_t kMaxQubits = 24;

enum class GateKind {
    H,
    X,
    Y,
    Z,
    S,
    SDG,
    T,
    TDG,
    RX,
    RY,
    RZ,
    U1,
    U2,
    U3,
    CX,
    CZ,
    SWAP,
    CCX,
    BARRIER,
    MEASURE,
};

/// Number of qubit operands. BARRIER is variadic and reports 0.
[[nodiscard]] std::size_t gate_arity(GateKind kind) noexcept;
[[nodiscard]] std::size_t gate_param_count(GateKind kind) noexcept;
/// Lower-case OpenQASM name ("h", "cx", "u3", ...).
[[nodiscard]] std::string_view gate_name(GateKind kind) noexcept;
[[nodiscard]] std::optional<GateKind> gate_from_name(std::string_view name) noexcept;

struct Instruction {
    GateKind kind{GateKind::BARRIER};
    std::vector<std::size_t> qubits;
    std::vector<double> params;
    std::optional<std::size_t> clbit;

    friend bool operator==(const Instruction &, const Instruction &) = default;
};

/// A quantum program. Construct through `add`, which validates operands;
/// the value is treated as immutable once built.
class Circuit {
  public:
    Circuit() = default;
    Circuit(std::size_t num_qubits, std::size_t num_clbits, std::string name = {});

    [[nodiscard]] std::size_t num_qubits() const noexcept { return num_qubits_; }
    [[nodiscard]] std::size_t num_clbits() const noexcept { return num_clbits_; }
    [[nodiscard]] const std::string &name() const noexcept { return name_; }
    [[nodiscard]] const std::vector<Instruction> &instructions() const noexcept {
        return instructions_;
    }

    /// Append after checking arity, parameter count, distinct in-range
    /// qubits and the one-measurement-per-qubit/clbit rule.
    /// Throws InvalidArgument or IndexError.
    Circuit &add(Instruction inst);

    Circuit &gate(GateKind kind, std::vector<std::size_t> qubits,
                  std::vector<double> params = {});
    Circuit &measure(std::size_t qubit, std::size_t clbit);
    /// Measure qubit i into clbit i for every qubit. Needs num_clbits >= num_qubits.
    Circuit &measure_all();

    /// clbit -> measured qubit; nullopt for clbits never written.
    [[nodiscard]] std::vector<std::optional<std::size_t>> measurement_map() const;

    /// Non-barrier, non-measure instruction count.
    [[nodiscard]] std::size_t gate_count() const noexcept;
    /// Critical-path length in gates; measurements count as a layer, barriers
    /// synchronize their operands without adding depth.
    [[nodiscard]] std::size_t depth() const;

    friend bool operator==(const Circuit &, const Circuit &) = default;

  private:
    std::size_t num_qubits_{0};
    std::size_t num_clbits_{0};
    std::vector<Instruction> instructions_;
    std::string name_;
};

} // namespace qtamper
