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

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "qtamper/circuit.hpp"

namespace qtamper {

struct Benchmark {
    Circuit circuit;
    /// Correct output, most significant classical bit first.
    std::string expected_output;
    std::string name;
};

/// Build a named benchmark. Throws UnknownBenchmark.
[[nodiscard]] Benchmark builtin(std::string_view name);

/// Names accepted by `builtin`, small benchmarks first.
[[nodiscard]] std::vector<std::string> builtin_names();

/// Multi-controlled X from Toffolis, borrowing `dirty` qubits in whatever
/// state they hold and restoring them. Needs controls.size() - 2 borrowed
/// qubits when there are more than two controls.
void append_mcx(Circuit &circuit, const std::vector<std::size_t> &controls,
                std::size_t target, const std::vector<std::size_t> &dirty);

} // namespace qtamper
