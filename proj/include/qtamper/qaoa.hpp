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
 * MaxCut QAOA: graphs, circuit construction, objective evaluation from
 * shots and a Nelder-Mead outer loop.
 */

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qtamper/circuit.hpp"
#include "qtamper/distribution.hpp"
#include "qtamper/simulator.hpp"

namespace qtamper {

/// Unweighted simple graph. Edges are stored as (u, v) with u < v, sorted.
class Graph {
  public:
    Graph() = default;
    /// Throws InvalidArgument on self-loops, duplicates or out-of-range nodes.
    Graph(std::size_t n, std::vector<std::pair<std::size_t, std::size_t>> edges);

    [[nodiscard]] std::size_t num_nodes() const noexcept { return n_; }
    [[nodiscard]] const std::vector<std::pair<std::size_t, std::size_t>> &edges() const noexcept {
        return edges_;
    }
    [[nodiscard]] std::vector<std::size_t> degrees() const;

    friend bool operator==(const Graph &, const Graph &) = default;

  private:
    std::size_t n_{0};
    std::vector<std::pair<std::size_t, std::size_t>> edges_;
};

/// Pairing-model d-regular graph, retried until simple. Deterministic per
/// seed. Throws InfeasibleDegree unless n*d is even and d < n.
[[nodiscard]] Graph random_regular_graph(std::size_t n, std::size_t d, std::uint64_t seed);

/// Cut size of an assignment given as a bitstring (leftmost char = node n-1).
/// Throws LengthMismatch.
[[nodiscard]] std::size_t cut_value(std::string_view bits, const Graph &graph);
/// Same, with node i on bit i of `assignment`.
[[nodiscard]] std::size_t cut_value(std::uint64_t assignment, const Graph &graph);

/// Mean cut value over the shots. Throws LengthMismatch.
[[nodiscard]] double expectation(const Counts &counts, const Graph &graph);
[[nodiscard]] double expectation(const Distribution &dist, const Graph &graph);

/// Exhaustive maximum cut. Throws CapacityExceeded above kMaxQubits nodes.
[[nodiscard]] std::size_t cmax(const Graph &graph);

struct QaoaParams {
    std::vector<double> gamma;
    std::vector<double> beta;

    [[nodiscard]] std::size_t depth() const noexcept { return gamma.size(); }
    /// gamma_1..gamma_p, beta_1..beta_p
    [[nodiscard]] std::vector<double> flatten() const;
    static QaoaParams unflatten(const std::vector<double> &x);

    friend bool operator==(const QaoaParams &, const QaoaParams &) = default;
};

/// Hadamard layer, then per level a CX-RZ(2 gamma)-CX block per edge and an
/// RX(2 beta) mixer, then measurement of every qubit.
/// Throws InvalidArgument if gamma and beta differ in length, and
/// CapacityExceeded above 20 nodes.
[[nodiscard]] Circuit build_qaoa_circuit(const Graph &graph, const QaoaParams &params);

/// Nelder-Mead settings. Coefficients are reflection, expansion,
/// contraction and shrink.
struct NelderMeadOptions {
    double alpha{1.0};
    double gamma{2.0};
    double rho{0.5};
    double sigma{0.5};
    /// Edge length of the initial simplex, per coordinate.
    double initial_step{0.5};
    /// Restart around the incumbent when every vertex is within this
    /// distance of the best vertex. Shot noise makes a tightly collapsed
    /// simplex useless long before it reaches numerical precision.
    double collapse_tol{0.05};
};

/// Budgeted maximiser of a noisy objective. Each call to `f` consumes one
/// unit of budget; the loop stops when the budget is exhausted, even in
/// the middle of a simplex step. Returns every evaluated point in order.
struct Evaluation {
    std::vector<double> x;
    double value{0.0};
};
[[nodiscard]] std::vector<Evaluation>
nelder_mead_maximize(const std::function<double(const std::vector<double> &)> &f,
                     std::vector<double> x0, std::size_t budget,
                     const NelderMeadOptions &options = {});

struct QaoaConfig {
    std::size_t p{1};
    std::size_t iterations{50};
    std::uint64_t shots_per_iter{50};
    NelderMeadOptions optimizer{};
};

struct QaoaRunRecord {
    QaoaParams best_params;
    /// Expectation measured at each iteration.
    std::vector<double> trace;
    /// Backend that ran each iteration.
    std::vector<std::string> trace_backend;
    Counts final_counts;
    double best_expectation{0.0};
    double ar{0.0};
    std::size_t cmax{0};
    /// Total shots executed, including probes.
    std::uint64_t shots_used{0};
};

/// Uniform draw from [0, pi) for each gamma and [0, pi/2) for each beta.
[[nodiscard]] QaoaParams initial_params(std::size_t p, std::uint64_t seed);

/// Continue an optimisation on `backend` from `start` for `iterations`
/// evaluations, appending to `record`. Evaluation j uses a seed derived
/// from (seed, offset + j).
void optimize_into(QaoaRunRecord &record, const BackendModel &backend, const Graph &graph,
                   const QaoaConfig &config, const QaoaParams &start, std::size_t iterations,
                   std::uint64_t seed, std::size_t offset = 0);

/// Full run on one backend from a seeded initial point. AR is the best
/// observed expectation over Cmax; `final_counts` is the sample that
/// produced it. Throws InvalidArgument when iterations == 0.
[[nodiscard]] QaoaRunRecord optimize(const BackendModel &backend, const Graph &graph,
                                     const QaoaConfig &config, std::uint64_t seed);

} // namespace qtamper
