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
 * OpenQASM 2.0 subset reader and writer. The accepted grammar is listed in
 * docs/qasm_subset.md.
 */

#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "qtamper/circuit.hpp"

namespace qtamper {

/// Parse OpenQASM 2.0 source. Registers are flattened in declaration order;
/// `gate` definitions are inlined at each call site.
///
/// Throws SyntaxError (with line number), UnsupportedGate or IndexError.
[[nodiscard]] Circuit parse_qasm(std::string_view source, std::string name = {});

/// Read and parse a file; the circuit is named after the file stem.
/// Throws IoError when the file cannot be read.
[[nodiscard]] Circuit load_qasm(const std::filesystem::path &path);

/// Emit the circuit with a single `q`/`c` register pair. Angles are written
/// in shortest round-trip form, so parse_qasm(to_qasm(c)) reproduces c.
[[nodiscard]] std::string to_qasm(const Circuit &circuit);

} // namespace qtamper
