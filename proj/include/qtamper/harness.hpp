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
 * Config-driven experiment runner. The config and record schemas are
 * described in docs/config_schema.md.
 */

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qtamper/defense.hpp"
#include "qtamper/qaoa.hpp"
#include "qtamper/simulator.hpp"

namespace qtamper {

inline constexpr int kConfigSchemaVersion = 1;
inline constexpr int kRecordSchemaVersion = 1;

/// Artifact defaults for synthetic backends.
inline constexpr double kDefaultReadoutError = 0.02;
inline constexpr double kDefaultDrift = 0.01;

struct WorkloadSpec {
    enum class Kind { Builtin, Qasm, Qaoa };
    Kind kind{Kind::Builtin};
    /// Label used in records and seeds.
    std::string label;
    std::string builtin;
    std::filesystem::path qasm_path;
    /// Correct output for QASM workloads; defaults to the ideal top outcome.
    std::optional<std::string> expected;
    Graph graph;
    QaoaConfig qaoa;
};

struct DefenseSpec {
    enum class Mode { None, Equal, Adaptive, QaoaSplit, QaoaAdaptive };
    Mode mode{Mode::None};
    std::uint64_t k{50};
    std::size_t r{2};
    std::size_t probe_iterations{5};

    [[nodiscard]] std::string label() const;
};

struct ExperimentConfig {
    std::string experiment;
    std::uint64_t master_seed{0};
    std::vector<WorkloadSpec> workloads;
    std::vector<BackendModel> backends;
    std::vector<std::uint64_t> shots;
    /// Empty means every backend keeps its own t.
    std::vector<double> t_sweep;
    std::vector<DefenseSpec> defenses;
    std::vector<SelectionCriterion> selection_order;
    std::vector<std::uint64_t> seeds;
    std::filesystem::path output;
};

/// Validate and convert a parsed config. Relative QASM paths resolve
/// against `base_dir`. Throws ConfigError carrying a JSON pointer.
[[nodiscard]] ExperimentConfig parse_config(const nlohmann::json &doc,
                                            const std::filesystem::path &base_dir = {});
/// Throws IoError or ConfigError.
[[nodiscard]] ExperimentConfig load_config(const std::filesystem::path &path);

/// One unit of work: a workload on a backend set at one t, shot budget and seed.
struct Cell {
    std::size_t workload{0};
    std::size_t defense{0};
    std::uint64_t shots{0};
    std::optional<double> t;
    std::uint64_t seed{0};
    std::vector<std::size_t> backends;
};

/// Cells in output order: workload, shots, defense, t, backend set, seed.
[[nodiscard]] std::vector<Cell> enumerate_cells(const ExperimentConfig &config);

/// hash(master seed, workload label, backend names, t, seed)
[[nodiscard]] std::uint64_t cell_seed(const ExperimentConfig &config, const Cell &cell);

/// Execute one cell and build its result record. Simulation errors
/// propagate.
[[nodiscard]] nlohmann::json run_cell(const ExperimentConfig &config, const Cell &cell);

struct RunOptions {
    std::size_t jobs{1};
    std::optional<std::uint64_t> seed;
    /// Directory for results.jsonl and summary.csv; defaults to config.output.
    std::optional<std::filesystem::path> out;
};

struct RunSummary {
    std::size_t cells{0};
    std::size_t failures{0};
    std::filesystem::path jsonl;
    std::filesystem::path csv;
};

/// Run every cell on a pool of `jobs` threads. Records are written in cell
/// order regardless of scheduling. A failed cell is written as an error
/// record and counted in `failures`.
RunSummary run_experiment(ExperimentConfig config, const RunOptions &options);

/// Mean and sample standard deviation over seeds, grouped by everything
/// except the seed.
[[nodiscard]] std::string summary_csv(const std::vector<nlohmann::json> &records);

/// Read a JSONL results file. Throws IoError.
[[nodiscard]] std::vector<nlohmann::json> read_jsonl(const std::filesystem::path &path);

/// Write the grouped CSV tables (fig6, fig8, fig11, fig12, table2, table3,
/// table5, table6) to `out_dir`. Returns the files written.
std::vector<std::filesystem::path> write_report(const std::filesystem::path &jsonl,
                                                const std::filesystem::path &out_dir);

/// Drop timing fields so records can be compared byte for byte.
[[nodiscard]] nlohmann::json strip_timing(nlohmann::json record);

} // namespace qtamper
