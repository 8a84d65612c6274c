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

#include "qtamper/qaoa.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <numeric>
#include <set>

#include "qtamper/error.hpp"
#include "qtamper/rng.hpp"

namespace qtamper {

Graph::Graph(std::size_t n, std::vector<std::pair<std::size_t, std::size_t>> edges) : n_(n) {
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (auto [u, v] : edges) {
        if (u >= n || v >= n) {
            throw InvalidArgument("edge (" + std::to_string(u) + ", " + std::to_string(v) +
                                  ") outside a graph of " + std::to_string(n) + " nodes");
        }
        if (u == v) {
            throw InvalidArgument("self-loop on node " + std::to_string(u));
        }
        if (u > v) {
            std::swap(u, v);
        }
        if (!seen.emplace(u, v).second) {
            throw InvalidArgument("duplicate edge (" + std::to_string(u) + ", " +
                                  std::to_string(v) + ")");
        }
    }
    edges_.assign(seen.begin(), seen.end());
}

std::vector<std::size_t> Graph::degrees() const {
    std::vector<std::size_t> deg(n_, 0);
    for (auto [u, v] : edges_) {
        ++deg[u];
        ++deg[v];
    }
    return deg;
}

Graph random_regular_graph(std::size_t n, std::size_t d, std::uint64_t seed) {
    if (d >= n || (n * d) % 2 != 0) {
        throw InfeasibleDegree("no simple " + std::to_string(d) + "-regular graph on " +
                               std::to_string(n) + " nodes");
    }
    Rng rng(derive_seed(seed, "regular-graph", n, d));
    std::vector<std::size_t> points(n * d);
    constexpr int kMaxAttempts = 100000;
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        for (std::size_t i = 0; i < points.size(); ++i) {
            points[i] = i / d;
        }
        shuffle(points.begin(), points.end(), rng);
        std::set<std::pair<std::size_t, std::size_t>> edges;
        bool ok = true;
        for (std::size_t i = 0; i + 1 < points.size() && ok; i += 2) {
            auto u = points[i];
            auto v = points[i + 1];
            if (u > v) {
                std::swap(u, v);
            }
            ok = u != v && edges.emplace(u, v).second;
        }
        if (ok) {
            return Graph(n, {edges.begin(), edges.end()});
        }
    }
    throw InfeasibleDegree("pairing model did not produce a simple graph");
}

std::size_t cut_value(std::uint64_t assignment, const Graph &graph) {
    std::size_t cut = 0;
    for (auto [u, v] : graph.edges()) {
        cut += ((assignment >> u) ^ (assignment >> v)) & 1U;
    }
    return cut;
}

std::size_t cut_value(std::string_view bits, const Graph &graph) {
    if (bits.size() != graph.num_nodes()) {
        throw LengthMismatch("assignment of length " + std::to_string(bits.size()) +
                             " for a graph of " + std::to_string(graph.num_nodes()) + " nodes");
    }
    return cut_value(from_bitstring(bits), graph);
}

double expectation(const Counts &counts, const Graph &graph) {
    if (counts.width() != graph.num_nodes()) {
        throw LengthMismatch("counts width " + std::to_string(counts.width()) +
                             " does not match " + std::to_string(graph.num_nodes()) + " nodes");
    }
    if (counts.total_shots() == 0) {
        throw InvalidArgument("expectation of empty counts");
    }
    double acc = 0.0;
    for (const auto &[k, n] : counts.entries()) {
        acc += static_cast<double>(n) * static_cast<double>(cut_value(from_bitstring(k), graph));
    }
    return acc / static_cast<double>(counts.total_shots());
}

double expectation(const Distribution &dist, const Graph &graph) {
    if (dist.width() != graph.num_nodes()) {
        throw LengthMismatch("distribution width " + std::to_string(dist.width()) +
                             " does not match " + std::to_string(graph.num_nodes()) + " nodes");
    }
    double acc = 0.0;
    for (std::uint64_t i = 0; i < dist.size(); ++i) {
        acc += dist[i] * static_cast<double>(cut_value(i, graph));
    }
    return acc;
}

std::size_t cmax(const Graph &graph) {
    const auto n = graph.num_nodes();
    if (n > kMaxQubits) {
        throw CapacityExceeded("cmax limited to " + std::to_string(kMaxQubits) + " nodes");
    }
    if (n < 2) {
        return 0;
    }
    // Node n-1 fixed on one side; the complement gives the same cut.
    std::size_t best = 0;
    for (std::uint64_t z = 0; z < (std::uint64_t{1} << (n - 1)); ++z) {
        best = std::max(best, cut_value(z, graph));
    }
    return best;
}

std::vector<double> QaoaParams::flatten() const {
    std::vector<double> x(gamma);
    x.insert(x.end(), beta.begin(), beta.end());
    return x;
}

QaoaParams QaoaParams::unflatten(const std::vector<double> &x) {
    const auto p = x.size() / 2;
    return QaoaParams{{x.begin(), x.begin() + static_cast<std::ptrdiff_t>(p)},
                      {x.begin() + static_cast<std::ptrdiff_t>(p), x.end()}};
}

Circuit build_qaoa_circuit(const Graph &graph, const QaoaParams &params) {
    constexpr std::size_t kMaxNodes = 20;
    const auto n = graph.num_nodes();
    if (n > kMaxNodes) {
        throw CapacityExceeded("QAOA circuits are limited to " + std::to_string(kMaxNodes) +
                               " nodes");
    }
    if (params.gamma.size() != params.beta.size()) {
        throw InvalidArgument("gamma and beta must have the same length");
    }
    Circuit c(n, n, "qaoa_maxcut_n" + std::to_string(n));
    for (std::size_t q = 0; q < n; ++q) {
        c.gate(GateKind::H, {q});
    }
    for (std::size_t l = 0; l < params.depth(); ++l) {
        for (auto [u, v] : graph.edges()) {
            c.gate(GateKind::CX, {u, v});
            c.gate(GateKind::RZ, {v}, {2.0 * params.gamma[l]});
            c.gate(GateKind::CX, {u, v});
        }
        for (std::size_t q = 0; q < n; ++q) {
            c.gate(GateKind::RX, {q}, {2.0 * params.beta[l]});
        }
    }
    c.measure_all();
    return c;
}

namespace {

struct Vertex {
    std::vector<double> x;
    double f{0.0};
};

std::vector<double> affine(const std::vector<double> &a, const std::vector<double> &b,
                           double coef) {
    // a + coef * (b - a)
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        out[i] = a[i] + coef * (b[i] - a[i]);
    }
    return out;
}

} // namespace

std::vector<Evaluation>
nelder_mead_maximize(const std::function<double(const std::vector<double> &)> &f,
                     std::vector<double> x0, std::size_t budget,
                     const NelderMeadOptions &opt) {
    std::vector<Evaluation> history;
    if (budget == 0) {
        return history;
    }
    const std::size_t dim = x0.size();
    auto eval = [&](const std::vector<double> &x) -> std::optional<double> {
        if (history.size() >= budget) {
            return std::nullopt;
        }
        const double v = f(x);
        history.push_back(Evaluation{x, v});
        return v;
    };

    auto build_simplex = [&](const Vertex &anchor, bool anchor_known) {
        std::vector<Vertex> s;
        Vertex a = anchor;
        if (!anchor_known) {
            const auto v = eval(a.x);
            if (!v) {
                return s;
            }
            a.f = *v;
        }
        s.push_back(a);
        for (std::size_t i = 0; i < dim; ++i) {
            Vertex vtx{a.x, 0.0};
            vtx.x[i] += opt.initial_step;
            const auto v = eval(vtx.x);
            if (!v) {
                return std::vector<Vertex>{};
            }
            vtx.f = *v;
            s.push_back(std::move(vtx));
        }
        return s;
    };

    auto simplex = build_simplex(Vertex{std::move(x0), 0.0}, false);
    while (simplex.size() == dim + 1) {
        std::stable_sort(simplex.begin(), simplex.end(),
                         [](const Vertex &a, const Vertex &b) { return a.f > b.f; });
        const Vertex &best = simplex.front();

        double spread = 0.0;
        for (const auto &v : simplex) {
            for (std::size_t i = 0; i < dim; ++i) {
                spread = std::max(spread, std::abs(v.x[i] - best.x[i]));
            }
        }
        if (spread < opt.collapse_tol) {
            simplex = build_simplex(best, true);
            continue;
        }

        std::vector<double> centroid(dim, 0.0);
        for (std::size_t j = 0; j < dim; ++j) {
            for (std::size_t i = 0; i < dim; ++i) {
                centroid[i] += simplex[j].x[i] / static_cast<double>(dim);
            }
        }
        Vertex &worst = simplex.back();
        const double second_worst = simplex[dim - 1].f;

        const auto xr = affine(centroid, worst.x, -opt.alpha);
        const auto fr = eval(xr);
        if (!fr) {
            break;
        }
        if (*fr > best.f) {
            const auto xe = affine(centroid, xr, opt.gamma);
            const auto fe = eval(xe);
            if (!fe) {
                break;
            }
            worst = *fe > *fr ? Vertex{xe, *fe} : Vertex{xr, *fr};
            continue;
        }
        if (*fr > second_worst) {
            worst = Vertex{xr, *fr};
            continue;
        }
        const bool outside = *fr > worst.f;
        const auto xc = outside ? affine(centroid, xr, opt.rho) : affine(centroid, worst.x, opt.rho);
        const auto fc = eval(xc);
        if (!fc) {
            break;
        }
        if (outside ? *fc >= *fr : *fc > worst.f) {
            worst = Vertex{xc, *fc};
            continue;
        }
        for (std::size_t j = 1; j <= dim; ++j) {
            simplex[j].x = affine(simplex[0].x, simplex[j].x, opt.sigma);
            const auto v = eval(simplex[j].x);
            if (!v) {
                return history;
            }
            simplex[j].f = *v;
        }
    }
    return history;
}

QaoaParams initial_params(std::size_t p, std::uint64_t seed) {
    Rng rng(derive_seed(seed, "qaoa-init", p));
    QaoaParams params;
    for (std::size_t l = 0; l < p; ++l) {
        params.gamma.push_back(rng.uniform(0.0, std::numbers::pi));
    }
    for (std::size_t l = 0; l < p; ++l) {
        params.beta.push_back(rng.uniform(0.0, std::numbers::pi / 2.0));
    }
    return params;
}

void optimize_into(QaoaRunRecord &record, const BackendModel &backend, const Graph &graph,
                   const QaoaConfig &config, const QaoaParams &start, std::size_t iterations,
                   std::uint64_t seed, std::size_t offset) {
    if (record.cmax == 0) {
        record.cmax = cmax(graph);
    }
    std::size_t j = 0;
    auto objective = [&](const std::vector<double> &x) {
        const auto params = QaoaParams::unflatten(x);
        const auto circuit = build_qaoa_circuit(graph, params);
        auto counts = execute(backend, circuit, config.shots_per_iter,
                              derive_seed(seed, "qaoa-eval", offset + j));
        ++j;
        const double e = expectation(counts, graph);
        record.trace.push_back(e);
        record.trace_backend.push_back(backend.name);
        record.shots_used += config.shots_per_iter;
        if (record.final_counts.total_shots() == 0 || e > record.best_expectation) {
            record.best_expectation = e;
            record.best_params = params;
            record.final_counts = std::move(counts);
        }
        return e;
    };
    (void)nelder_mead_maximize(objective, start.flatten(), iterations, config.optimizer);
    record.ar = record.cmax == 0 ? 0.0
                                 : record.best_expectation / static_cast<double>(record.cmax);
}

QaoaRunRecord optimize(const BackendModel &backend, const Graph &graph, const QaoaConfig &config,
                       std::uint64_t seed) {
    if (config.iterations == 0) {
        throw InvalidArgument("QAOA needs at least one iteration");
    }
    if (config.p == 0) {
        throw InvalidArgument("QAOA depth p must be positive");
    }
    QaoaRunRecord record;
    optimize_into(record, backend, graph, config, initial_params(config.p, seed),
                  config.iterations, seed);
    return record;
}

} // namespace qtamper
