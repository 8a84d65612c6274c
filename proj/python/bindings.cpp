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

// Python bindings. Counts and distributions cross the boundary as plain
// dicts keyed by bitstring.

#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "qtamper/adversary.hpp"
#include "qtamper/benchmarks.hpp"
#include "qtamper/defense.hpp"
#include "qtamper/error.hpp"
#include "qtamper/harness.hpp"
#include "qtamper/metrics.hpp"
#include "qtamper/qaoa.hpp"
#include "qtamper/qasm.hpp"
#include "qtamper/simulator.hpp"

namespace py = pybind11;
using namespace qtamper;

namespace {

using CountMap = std::map<std::string, std::uint64_t>;
using ProbMap = std::map<std::string, double>;
using Readout = std::variant<double, std::vector<std::pair<double, double>>>;

Counts to_counts(const CountMap &m) { return Counts::from_map(m); }

double pm_value(const PerformanceMetric &p) { return p.as_double(); }

BackendModel make_backend(const std::string &name, const Readout &readout, double drift,
                          double gate_depolarizing, std::optional<std::string> tamper, double t,
                          std::size_t k, std::optional<std::vector<std::size_t>> lines) {
    BackendModel b;
    b.name = name;
    if (std::holds_alternative<double>(readout)) {
        b.noise = NoiseModel::symmetric(std::get<double>(readout));
    } else {
        for (const auto &[p01, p10] : std::get<1>(readout)) {
            b.noise.readout.push_back({p01, p10});
        }
    }
    b.noise.gate_depolarizing = gate_depolarizing;
    b.noise.validate();
    b.drift = drift;
    if (tamper) {
        TamperSpec spec{tamper_mode_from_name(*tamper), t, k, std::move(lines)};
        spec.validate();
        b.tamper = spec;
    }
    return b;
}

py::dict split_plan(const SplitPlan &p) {
    py::dict d;
    py::list allocs;
    for (const auto &a : p.allocations) {
        allocs.append(py::make_tuple(a.backend, a.shots));
    }
    d["allocations"] = allocs;
    d["probe_shots"] = p.probe_shots;
    d["probe_runs"] = p.probe_runs;
    return d;
}

py::dict probe_report(const ProbeReport &r) {
    py::dict d;
    d["voted"] = r.voted;
    d["k"] = r.k;
    d["r"] = r.r;
    py::list backends;
    for (const auto &b : r.backends) {
        py::dict e;
        e["name"] = b.name;
        std::vector<CountMap> runs;
        std::vector<double> pms;
        for (std::size_t i = 0; i < b.runs.size(); ++i) {
            runs.push_back(b.runs[i].entries());
            pms.push_back(pm_value(b.pm[i]));
        }
        e["runs"] = runs;
        e["tops"] = b.tops;
        e["pm"] = pms;
        e["confidence"] = b.confidence;
        e["pairwise_tvd"] = b.pairwise_tvd;
        e["repeatable"] = b.repeatable;
        e["matches_vote"] = b.matches_vote;
        backends.append(e);
    }
    d["backends"] = backends;
    return d;
}

py::dict qaoa_record(const QaoaRunRecord &r) {
    py::dict d;
    d["gamma"] = r.best_params.gamma;
    d["beta"] = r.best_params.beta;
    d["trace"] = r.trace;
    d["trace_backend"] = r.trace_backend;
    d["final_counts"] = r.final_counts.entries();
    d["best_expectation"] = r.best_expectation;
    d["ar"] = r.ar;
    d["cmax"] = r.cmax;
    d["shots_used"] = r.shots_used;
    return d;
}

QaoaConfig qaoa_config(std::size_t p, std::size_t iterations, std::uint64_t shots_per_iter) {
    QaoaConfig c;
    c.p = p;
    c.iterations = iterations;
    c.shots_per_iter = shots_per_iter;
    return c;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Result-tampering quantum backend simulator and shot-splitting defenses";

    auto base = py::register_exception<Error>(m, "Error");
    py::register_exception<SyntaxError>(m, "QasmSyntaxError", base.ptr());
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<UnsupportedGate>(m, "UnsupportedGate", base.ptr());
    py::register_exception<IndexError>(m, "QubitIndexError", base.ptr());
    py::register_exception<UnknownBenchmark>(m, "UnknownBenchmark", base.ptr());
    py::register_exception<CapacityExceeded>(m, "CapacityExceeded", base.ptr());
    py::register_exception<DimensionMismatch>(m, "DimensionMismatch", base.ptr());
    py::register_exception<InvalidArgument>(m, "InvalidArgument", base.ptr());
    py::register_exception<DegenerateCounts>(m, "DegenerateCounts", base.ptr());
    py::register_exception<InvalidLineCount>(m, "InvalidLineCount", base.ptr());
    py::register_exception<KeyLengthMismatch>(m, "KeyLengthMismatch", base.ptr());
    py::register_exception<LengthMismatch>(m, "LengthMismatch", base.ptr());
    py::register_exception<InfeasibleDegree>(m, "InfeasibleDegree", base.ptr());
    py::register_exception<InsufficientShots>(m, "InsufficientShots", base.ptr());
    py::register_exception<IoError>(m, "IoError", base.ptr());

    py::class_<Circuit>(m, "Circuit")
        .def_property_readonly("name", &Circuit::name)
        .def_property_readonly("num_qubits", &Circuit::num_qubits)
        .def_property_readonly("num_clbits", &Circuit::num_clbits)
        .def_property_readonly("gate_count", &Circuit::gate_count)
        .def_property_readonly("depth", &Circuit::depth)
        .def("to_qasm", [](const Circuit &c) { return to_qasm(c); })
        .def("__eq__", [](const Circuit &a, const Circuit &b) { return a == b; })
        .def("__repr__", [](const Circuit &c) {
            return "<Circuit " + c.name() + " qubits=" + std::to_string(c.num_qubits()) +
                   " gates=" + std::to_string(c.gate_count()) + ">";
        });

    m.def("parse_qasm", &parse_qasm, py::arg("source"), py::arg("name") = "");
    m.def("load_qasm", &load_qasm, py::arg("path"));
    m.def("builtin_names", &builtin_names);
    m.def(
        "builtin",
        [](const std::string &name) {
            auto b = builtin(name);
            return py::make_tuple(b.circuit, b.expected_output);
        },
        py::arg("name"), "Returns (circuit, expected_output).");

    m.def(
        "run_statevector",
        [](const Circuit &c) { return run_statevector(c).to_map(); }, py::arg("circuit"),
        "Ideal outcome probabilities, nonzero entries only.");

    py::class_<BackendModel>(m, "Backend")
        .def(py::init(&make_backend), py::arg("name"), py::arg("readout") = kDefaultReadoutError,
             py::arg("drift") = kDefaultDrift, py::arg("gate_depolarizing") = 0.0,
             py::arg("tamper") = py::none(), py::arg("t") = 0.0, py::arg("k") = 1,
             py::arg("lines") = py::none())
        .def_readonly("name", &BackendModel::name)
        .def_readonly("drift", &BackendModel::drift)
        .def_property_readonly("tampered", &BackendModel::tampered)
        .def_property_readonly("t",
                               [](const BackendModel &b) { return b.tamper ? b.tamper->t : 0.0; })
        .def_property_readonly("lines", [](const BackendModel &b) {
            return b.tamper ? b.tamper->lines : std::nullopt;
        });

    m.def("resolve_backend", &resolve_backend, py::arg("backend"), py::arg("circuit"),
          py::arg("shots"), py::arg("seed"));
    m.def(
        "execute",
        [](const BackendModel &b, const Circuit &c, std::uint64_t shots, std::uint64_t seed) {
            return execute(b, c, shots, seed).entries();
        },
        py::arg("backend"), py::arg("circuit"), py::arg("shots"), py::arg("seed"));

    m.def(
        "plan_targeted", [](const CountMap &c) { return plan_targeted(to_counts(c)); },
        py::arg("counts"));
    m.def(
        "masked_rae",
        [](double base, double t, std::size_t total, std::size_t tampered) {
            const auto r = masked_rae(base, t, total, tampered);
            py::dict d;
            d["n"] = r.n;
            d["delta_tampering"] = r.delta_tampering;
            d["net_rae"] = r.net_rae;
            return d;
        },
        py::arg("base_rae"), py::arg("t"), py::arg("total_lines"), py::arg("tampered_lines"));

    m.def(
        "pm", [](const CountMap &c, const std::string &correct) {
            return pm_value(pm(to_counts(c), correct));
        },
        py::arg("counts"), py::arg("correct"), "Performance metric; inf when no wrong outcome.");
    m.def(
        "tvd",
        [](const ProbMap &a, const ProbMap &b) {
            return tvd(Distribution::from_map(a), Distribution::from_map(b));
        },
        py::arg("a"), py::arg("b"), "Total variation distance; counts are normalised first.");

    m.def(
        "equal_split",
        [](const std::vector<BackendModel> &bs, const Circuit &c, std::uint64_t shots,
           std::uint64_t seed) {
            const auto r = equal_split(bs, c, shots, seed);
            py::dict d;
            d["counts"] = r.counts.entries();
            d["plan"] = split_plan(r.plan);
            return d;
        },
        py::arg("backends"), py::arg("circuit"), py::arg("shots"), py::arg("seed"));
    m.def(
        "adaptive_split",
        [](const std::vector<BackendModel> &bs, const Circuit &c, std::uint64_t shots,
           std::uint64_t k, std::size_t r, std::uint64_t seed) {
            const auto res = adaptive_split(bs, c, shots, k, r, seed);
            py::dict d;
            d["counts"] = res.counts.entries();
            d["plan"] = split_plan(res.plan);
            d["report"] = probe_report(res.report);
            d["selected"] = res.selected;
            return d;
        },
        py::arg("backends"), py::arg("circuit"), py::arg("shots"), py::arg("k") = 50,
        py::arg("r") = 2, py::arg("seed") = 0);

    py::class_<Graph>(m, "Graph")
        .def(py::init<std::size_t, std::vector<std::pair<std::size_t, std::size_t>>>(),
             py::arg("n"), py::arg("edges"))
        .def_property_readonly("num_nodes", &Graph::num_nodes)
        .def_property_readonly("edges", &Graph::edges);
    m.def("random_regular_graph", &random_regular_graph, py::arg("n"), py::arg("d"),
          py::arg("seed"));
    m.def(
        "cut_value", [](const std::string &bits, const Graph &g) { return cut_value(bits, g); },
        py::arg("bits"), py::arg("graph"));
    m.def("cmax", &cmax, py::arg("graph"));
    m.def(
        "qaoa_optimize",
        [](const BackendModel &b, const Graph &g, std::size_t p, std::size_t iterations,
           std::uint64_t shots_per_iter, std::uint64_t seed) {
            return qaoa_record(optimize(b, g, qaoa_config(p, iterations, shots_per_iter), seed));
        },
        py::arg("backend"), py::arg("graph"), py::arg("p") = 1, py::arg("iterations") = 50,
        py::arg("shots_per_iter") = 50, py::arg("seed") = 0);
    m.def(
        "qaoa_iteration_split",
        [](const BackendModel &a, const BackendModel &b, const Graph &g, std::size_t p,
           std::size_t iterations, std::uint64_t shots_per_iter, std::uint64_t seed) {
            return qaoa_record(
                qaoa_iteration_split(a, b, g, qaoa_config(p, iterations, shots_per_iter), seed));
        },
        py::arg("a"), py::arg("b"), py::arg("graph"), py::arg("p") = 1,
        py::arg("iterations") = 50, py::arg("shots_per_iter") = 50, py::arg("seed") = 0);

    m.def(
        "run_config",
        [](const std::filesystem::path &config, std::size_t jobs, std::optional<std::uint64_t> seed,
           std::optional<std::filesystem::path> out) {
            RunSummary s;
            {
                py::gil_scoped_release release;
                s = run_experiment(load_config(config), RunOptions{jobs, seed, out});
            }
            py::dict d;
            d["cells"] = s.cells;
            d["failures"] = s.failures;
            d["jsonl"] = s.jsonl;
            d["csv"] = s.csv;
            return d;
        },
        py::arg("config"), py::arg("jobs") = 1, py::arg("seed") = py::none(),
        py::arg("out") = py::none(), "Run every cell of an experiment config.");
}
