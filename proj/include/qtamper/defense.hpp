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
 * Shot-distribution defenses against tampering backends: an even split,
 * and probe-then-allocate with majority voting. QAOA variants hand off
 * optimizer iterations instead of shots.
 */

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "qtamper/metrics.hpp"
#include "qtamper/qaoa.hpp"
#include "qtamper/simulator.hpp"

namespace qtamper {

struct Allocation {
    std::string backend;
    std::uint64_t shots{0};

    friend bool operator==(const Allocation &, const Allocation &) = default;
};

struct SplitPlan {
    std::vector<Allocation> allocations;
    std::uint64_t probe_shots{0};
    std::size_t probe_runs{0};

    [[nodiscard]] std::uint64_t total() const noexcept;
};

/// Probe fingerprint of one backend.
struct BackendProbe {
    std::string name;
    std::vector<Counts> runs;
    std::vector<Bitstring> tops;
    /// Per run, against the voted answer.
    std::vector<PerformanceMetric> pm;
    /// Top count / probe shots, per run.
    std::vector<double> confidence;
    /// One entry per unordered pair of runs.
    std::vector<double> pairwise_tvd;
    bool repeatable{false};
    bool matches_vote{false};

    [[nodiscard]] double mean_tvd() const;
    /// +infinity if any run has an unbounded PM.
    [[nodiscard]] double mean_pm() const;
    [[nodiscard]] double mean_confidence() const;
};

struct ProbeReport {
    std::vector<BackendProbe> backends;
    Bitstring voted;
    std::uint64_t k{0};
    std::size_t r{0};
};

enum class SelectionCriterion {
    RepeatableMatchesVote,
    LowerTvd,
    HigherPm,
    HigherConfidence,
};

[[nodiscard]] std::string_view selection_criterion_name(SelectionCriterion c) noexcept;
/// "repeatable", "tvd", "pm", "confidence". Throws InvalidArgument.
[[nodiscard]] SelectionCriterion selection_criterion_from_name(std::string_view name);

/// repeatable, pm, tvd, confidence. Inter-run TVD between two k-shot runs
/// is dominated by sampling noise at small k, so PM ranks ahead of it.
[[nodiscard]] const std::vector<SelectionCriterion> &default_selection_order();

/// Even split; the first shots % m backends get one extra shot.
/// Throws InvalidArgument for fewer than 2 backends and InsufficientShots
/// when shots < m.
[[nodiscard]] SplitPlan plan_equal_split(const std::vector<BackendModel> &backends,
                                         std::uint64_t shots);

struct SplitResult {
    Counts counts;
    SplitPlan plan;
    /// Counts each backend returned, in backend order.
    std::vector<Counts> parts;
};

[[nodiscard]] SplitResult equal_split(const std::vector<BackendModel> &backends,
                                      const Circuit &circuit, std::uint64_t shots,
                                      std::uint64_t seed);

/// r runs of k shots on every backend, drift re-drawn per run. The voted
/// answer is the most common per-run top outcome; ties go to the largest
/// summed count, then the smallest bitstring. Backends with unresolved
/// tamper lines are resolved once, with the adversary's private run
/// sized at k * r shots. Throws InvalidArgument unless k >= 10 and r >= 2.
[[nodiscard]] ProbeReport probe(const std::vector<BackendModel> &backends,
                                const Circuit &circuit, std::uint64_t k, std::size_t r,
                                std::uint64_t seed);

/// Lexicographic ranking over `order`, with the backend name as the final
/// tie-break. Throws InvalidArgument on an empty report.
[[nodiscard]] std::string
select_backend(const ProbeReport &report,
               const std::vector<SelectionCriterion> &order = default_selection_order());

struct AdaptiveResult {
    /// Selected backend's probe runs plus its remainder run.
    Counts counts;
    SplitPlan plan;
    ProbeReport report;
    std::string selected;
};

/// Probe, select, then spend total - m*r*k shots on the winner. Probe
/// counts of other backends are left out of the answer.
/// Throws InsufficientShots when total < m*r*k.
[[nodiscard]] AdaptiveResult
adaptive_split(const std::vector<BackendModel> &backends, const Circuit &circuit,
               std::uint64_t total, std::uint64_t k, std::size_t r, std::uint64_t seed,
               const std::vector<SelectionCriterion> &order = default_selection_order());

/// First half of the iterations on `a`, then the second half on `b` from
/// the incumbent parameters. AR is the incumbent over both halves.
/// Throws InvalidArgument for an odd iteration count.
[[nodiscard]] QaoaRunRecord qaoa_iteration_split(const BackendModel &a, const BackendModel &b,
                                                 const Graph &graph, const QaoaConfig &config,
                                                 std::uint64_t seed);

struct QaoaProbe {
    std::string backend;
    /// AR of each probe run.
    std::vector<double> ar;

    [[nodiscard]] double mean_ar() const;
};

struct QaoaAdaptiveResult {
    QaoaRunRecord record;
    std::vector<QaoaProbe> probes;
    std::string selected;
};

/// Two probe runs of `probe_iterations` on every backend from shared
/// starting points; the highest mean AR (then name) receives the remaining
/// iterations, continuing from its best probe parameters. The record
/// covers the winner's probes and continuation; shots_used counts every
/// probe. Throws InvalidArgument unless iterations > 2 * probe_iterations * m.
[[nodiscard]] QaoaAdaptiveResult qaoa_adaptive(const std::vector<BackendModel> &backends,
                                               const Graph &graph, const QaoaConfig &config,
                                               std::size_t probe_iterations, std::uint64_t seed);

} // namespace qtamper
