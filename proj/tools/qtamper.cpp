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

// qtamper command line: parse | run | report

#include <algorithm>
#include <cstdint>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "qtamper/error.hpp"
#include "qtamper/harness.hpp"
#include "qtamper/qasm.hpp"
#include "qtamper/simulator.hpp"

namespace {

int cmd_parse(const std::string &path) {
    const auto circuit = qtamper::load_qasm(path);
    const auto dist = qtamper::run_statevector(circuit);
    std::cout << "name:       " << circuit.name() << '\n'
              << "qubits:     " << circuit.num_qubits() << '\n'
              << "clbits:     " << circuit.num_clbits() << '\n'
              << "gates:      " << circuit.gate_count() << '\n'
              << "depth:      " << circuit.depth() << '\n'
              << "ideal top-5:\n";
    std::vector<std::pair<double, std::string>> ranked;
    for (const auto &[bits, p] : dist.to_map()) {
        ranked.emplace_back(-p, bits);
    }
    std::sort(ranked.begin(), ranked.end());
    for (std::size_t i = 0; i < std::min<std::size_t>(5, ranked.size()); ++i) {
        std::cout << "  " << ranked[i].second << "  " << std::fixed << std::setprecision(6)
                  << -ranked[i].first << '\n';
    }
    return 0;
}

int cmd_run(const std::string &config_path, std::optional<std::uint64_t> seed,
            std::size_t jobs, const std::string &out) {
    auto config = qtamper::load_config(config_path);
    qtamper::RunOptions opts;
    opts.jobs = jobs;
    opts.seed = seed;
    if (!out.empty()) {
        opts.out = out;
    }
    const auto summary = qtamper::run_experiment(std::move(config), opts);
    std::cout << summary.cells << " cells, " << summary.failures << " failed\n"
              << "records: " << summary.jsonl.string() << '\n'
              << "summary: " << summary.csv.string() << '\n';
    return summary.failures == 0 ? 0 : 1;
}

int cmd_report(const std::string &results, const std::string &out) {
    for (const auto &p : qtamper::write_report(results, out)) {
        std::cout << p.string() << '\n';
    }
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Simulate result-tampering quantum backends and shot-splitting defenses"};
    app.require_subcommand(1);

    std::string qasm_path;
    auto *parse = app.add_subcommand("parse", "Summarise an OpenQASM 2.0 file");
    parse->add_option("qasm", qasm_path, "QASM file")->required()->check(CLI::ExistingFile);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::size_t jobs = std::max(1U, std::thread::hardware_concurrency());
    std::string out;
    auto *run = app.add_subcommand("run", "Run every cell of an experiment config");
    run->add_option("--config", config_path, "Experiment config (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    run->add_option("--seed", seed, "Override the config master seed");
    run->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
    run->add_option("--out", out, "Output directory (default: the config's output)");

    std::string results_path;
    std::string report_out = "report";
    auto *report = app.add_subcommand("report", "Write figure/table CSVs from a results file");
    report->add_option("results", results_path, "results.jsonl")->required();
    report->add_option("--out", report_out, "Output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*parse) {
            return cmd_parse(qasm_path);
        }
        if (*run) {
            return cmd_run(config_path, seed, jobs, out);
        }
        return cmd_report(results_path, report_out);
    } catch (const qtamper::ConfigError &e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const qtamper::Error &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
