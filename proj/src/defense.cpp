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

#include "qtamper/defense.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>

#include "qtamper/error.hpp"
#include "qtamper/rng.hpp"

namespace qtamper {

std::uint64_t SplitPlan::total() const noexcept {
    std::uint64_t sum = 0;
    for (const auto &a : allocations) {
        sum += a.shots;
    }
    return sum;
}

namespace {

double mean(const std::vector<double> &v) {
    if (v.empty()) {
        return 0.0;
    }
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

} // namespace

double BackendProbe::mean_tvd() const { return mean(pairwise_tvd); }

double BackendProbe::mean_pm() const {
    std::vector<double> v;
    for (const auto &p : pm) {
        if (p.is_unbounded()) {
            return std::numeric_limits<double>::infinity();
        }
        v.push_back(p.value());
    }
    return mean(v);
}

double BackendProbe::mean_confidence() const { return mean(confidence); }

std::string_view selection_criterion_name(SelectionCriterion c) noexcept {
    switch (c) {
    case SelectionCriterion::RepeatableMatchesVote:
        return "repeatable";
    case SelectionCriterion::LowerTvd:
        return "tvd";
    case SelectionCriterion::HigherPm:
        return "pm";
    case SelectionCriterion::HigherConfidence:
        return "confidence";
    }
    return "?";
}

SelectionCriterion selection_criterion_from_name(std::string_view name) {
    for (auto c : {SelectionCriterion::RepeatableMatchesVote, SelectionCriterion::LowerTvd,
                   SelectionCriterion::HigherPm, SelectionCriterion::HigherConfidence}) {
        if (selection_criterion_name(c) == name) {
            return c;
        }
    }
    throw InvalidArgument("unknown selection criterion '" + std::string(name) + "'");
}

const std::vector<SelectionCriterion> &default_selection_order() {
    static const std::vector<SelectionCriterion> order = {
        SelectionCriterion::RepeatableMatchesVote, SelectionCriterion::HigherPm,
        SelectionCriterion::LowerTvd, SelectionCriterion::HigherConfidence};
    return order;
}

SplitPlan plan_equal_split(const std::vector<BackendModel> &backends, std::uint64_t shots) {
    const auto m = backends.size();
    if (m < 2) {
        throw InvalidArgument("equal split needs at least two backends");
    }
    if (shots < m) {
        throw InsufficientShots(std::to_string(shots) + " shots cannot cover " +
                                std::to_string(m) + " backends");
    }
    SplitPlan plan;
    for (std::size_t i = 0; i < m; ++i) {
        plan.allocations.push_back(
            Allocation{backends[i].name, shots / m + (i < shots % m ? 1 : 0)});
    }
    return plan;
}

SplitResult equal_split(const std::vector<BackendModel> &backends, const Circuit &circuit,
                        std::uint64_t shots, std::uint64_t seed) {
    SplitResult out;
    out.plan = plan_equal_split(backends, shots);
    for (std::size_t i = 0; i < backends.size(); ++i) {
        out.parts.push_back(execute(backends[i], circuit, out.plan.allocations[i].shots,
                                    derive_seed(seed, "equal", backends[i].name, i)));
    }
    out.counts = stitch(out.parts);
    return out;
}

namespace {

std::vector<BackendModel> resolve_all(const std::vector<BackendModel> &backends,
                                      const Circuit &circuit, std::uint64_t shots,
                                      std::uint64_t seed) {
    std::vector<BackendModel> out;
    for (std::size_t i = 0; i < backends.size(); ++i) {
        out.push_back(resolve_backend(backends[i], circuit, shots,
                                      derive_seed(seed, "plan", backends[i].name, i)));
    }
    return out;
}

Bitstring vote(const std::vector<BackendProbe> &probes) {
    std::map<Bitstring, std::pair<std::size_t, std::uint64_t>> tally; // (cells, summed count)
    for (const auto &b : probes) {
        for (std::size_t j = 0; j < b.runs.size(); ++j) {
            ++tally[b.tops[j]].first;
        }
    }
    for (auto &[bits, score] : tally) {
        for (const auto &b : probes) {
            for (const auto &run : b.runs) {
                score.second += run[bits];
            }
        }
    }
    // std::map iterates in ascending key order, so strict '>' keeps the
    // smallest bitstring among full ties.
    Bitstring best;
    std::pair<std::size_t, std::uint64_t> best_score{0, 0};
    for (const auto &[bits, score] : tally) {
        if (best.empty() || score > best_score) {
            best = bits;
            best_score = score;
        }
    }
    return best;
}

} // namespace

ProbeReport probe(const std::vector<BackendModel> &backends, const Circuit &circuit,
                  std::uint64_t k, std::size_t r, std::uint64_t seed) {
    if (k < 10 || r < 2) {
        throw InvalidArgument("probing needs k >= 10 shots and r >= 2 runs");
    }
    const auto resolved = resolve_all(backends, circuit, k * r, seed);
    ProbeReport report;
    report.k = k;
    report.r = r;
    for (std::size_t i = 0; i < resolved.size(); ++i) {
        BackendProbe b;
        b.name = resolved[i].name;
        for (std::size_t run = 0; run < r; ++run) {
            b.runs.push_back(
                execute(resolved[i], circuit, k, derive_seed(seed, "probe", b.name, i, run)));
            b.tops.push_back(b.runs.back().top());
            b.confidence.push_back(static_cast<double>(b.runs.back()[b.tops.back()]) /
                                   static_cast<double>(k));
        }
        for (std::size_t x = 0; x < r; ++x) {
            for (std::size_t y = x + 1; y < r; ++y) {
                b.pairwise_tvd.push_back(tvd(b.runs[x], b.runs[y]));
            }
        }
        b.repeatable = std::all_of(b.tops.begin(), b.tops.end(),
                                   [&](const Bitstring &t) { return t == b.tops.front(); });
        report.backends.push_back(std::move(b));
    }
    report.voted = vote(report.backends);
    for (auto &b : report.backends) {
        for (const auto &run : b.runs) {
            b.pm.push_back(pm(run, report.voted));
        }
        b.matches_vote = b.repeatable && b.tops.front() == report.voted;
    }
    return report;
}

std::string select_backend(const ProbeReport &report,
                           const std::vector<SelectionCriterion> &order) {
    if (report.backends.empty()) {
        throw InvalidArgument("cannot select from an empty probe report");
    }
    // true when a ranks strictly ahead of b
    auto ahead = [&](const BackendProbe &a, const BackendProbe &b) {
        for (auto c : order) {
            switch (c) {
            case SelectionCriterion::RepeatableMatchesVote:
                if (a.matches_vote != b.matches_vote) {
                    return a.matches_vote;
                }
                break;
            case SelectionCriterion::LowerTvd:
                if (a.mean_tvd() != b.mean_tvd()) {
                    return a.mean_tvd() < b.mean_tvd();
                }
                break;
            case SelectionCriterion::HigherPm:
                if (a.mean_pm() != b.mean_pm()) {
                    return a.mean_pm() > b.mean_pm();
                }
                break;
            case SelectionCriterion::HigherConfidence:
                if (a.mean_confidence() != b.mean_confidence()) {
                    return a.mean_confidence() > b.mean_confidence();
                }
                break;
            }
        }
        return a.name < b.name;
    };
    const auto it = std::min_element(report.backends.begin(), report.backends.end(), ahead);
    return it->name;
}

AdaptiveResult adaptive_split(const std::vector<BackendModel> &backends, const Circuit &circuit,
                              std::uint64_t total, std::uint64_t k, std::size_t r,
                              std::uint64_t seed, const std::vector<SelectionCriterion> &order) {
    const auto m = backends.size();
    if (m == 0) {
        throw InvalidArgument("adaptive split needs at least one backend");
    }
    const std::uint64_t probe_budget = m * r * k;
    if (total < probe_budget) {
        throw InsufficientShots(std::to_string(total) + " shots cannot cover a probe budget of " +
                                std::to_string(probe_budget));
    }
    const auto resolved = resolve_all(backends, circuit, total, seed);
    AdaptiveResult out;
    out.report = probe(resolved, circuit, k, r, seed);
    out.selected = select_backend(out.report, order);

    const std::uint64_t remainder = total - probe_budget;
    out.plan.probe_shots = k;
    out.plan.probe_runs = r;
    std::vector<Counts> parts;
    for (std::size_t i = 0; i < m; ++i) {
        const bool chosen = resolved[i].name == out.selected;
        out.plan.allocations.push_back(
            Allocation{resolved[i].name, r * k + (chosen ? remainder : 0)});
        if (chosen && parts.empty()) {
            parts = out.report.backends[i].runs;
            if (remainder > 0) {
                parts.push_back(execute(resolved[i], circuit, remainder,
                                        derive_seed(seed, "remainder", resolved[i].name)));
            }
        }
    }
    out.counts = stitch(parts);
    return out;
}

QaoaRunRecord qaoa_iteration_split(const BackendModel &a, const BackendModel &b,
                                   const Graph &graph, const QaoaConfig &config,
                                   std::uint64_t seed) {
    if (config.iterations == 0 || config.iterations % 2 != 0) {
        throw InvalidArgument("iteration split needs a positive even iteration count");
    }
    const auto half = config.iterations / 2;
    QaoaRunRecord record;
    optimize_into(record, a, graph, config, initial_params(config.p, seed), half, seed, 0);
    const QaoaParams handoff = record.best_params;
    optimize_into(record, b, graph, config, handoff, half, seed, half);
    return record;
}

double QaoaProbe::mean_ar() const { return mean(ar); }

QaoaAdaptiveResult qaoa_adaptive(const std::vector<BackendModel> &backends, const Graph &graph,
                                 const QaoaConfig &config, std::size_t probe_iterations,
                                 std::uint64_t seed) {
    const auto m = backends.size();
    constexpr std::size_t kProbeRuns = 2;
    if (m == 0 || probe_iterations == 0) {
        throw InvalidArgument("QAOA probing needs backends and a positive probe length");
    }
    if (config.iterations <= kProbeRuns * probe_iterations * m) {
        throw InvalidArgument("QAOA adaptive needs more than " +
                              std::to_string(kProbeRuns * probe_iterations * m) + " iterations");
    }
    QaoaAdaptiveResult out;
    std::vector<std::vector<QaoaRunRecord>> runs(m);
    std::uint64_t probe_shots = 0;
    for (std::size_t i = 0; i < m; ++i) {
        QaoaProbe p{backends[i].name, {}};
        for (std::size_t run = 0; run < kProbeRuns; ++run) {
            QaoaRunRecord rec;
            optimize_into(rec, backends[i], graph, config,
                          initial_params(config.p, derive_seed(seed, "probe-start", run)),
                          probe_iterations, derive_seed(seed, "qaoa-probe", backends[i].name, run));
            p.ar.push_back(rec.ar);
            probe_shots += rec.shots_used;
            runs[i].push_back(std::move(rec));
        }
        out.probes.push_back(std::move(p));
    }
    std::size_t win = 0;
    for (std::size_t i = 1; i < m; ++i) {
        const double a = out.probes[i].mean_ar();
        const double b = out.probes[win].mean_ar();
        if (a > b || (a == b && out.probes[i].backend < out.probes[win].backend)) {
            win = i;
        }
    }
    out.selected = backends[win].name;

    QaoaRunRecord &rec = out.record;
    for (const auto &pr : runs[win]) {
        rec.trace.insert(rec.trace.end(), pr.trace.begin(), pr.trace.end());
        rec.trace_backend.insert(rec.trace_backend.end(), pr.trace_backend.begin(),
                                 pr.trace_backend.end());
        if (rec.final_counts.total_shots() == 0 || pr.best_expectation > rec.best_expectation) {
            rec.best_expectation = pr.best_expectation;
            rec.best_params = pr.best_params;
            rec.final_counts = pr.final_counts;
            rec.cmax = pr.cmax;
        }
    }
    const auto remaining = config.iterations - kProbeRuns * probe_iterations * m;
    optimize_into(rec, backends[win], graph, config, rec.best_params, remaining,
                  derive_seed(seed, "qaoa-continue"));
    rec.shots_used = probe_shots + remaining * config.shots_per_iter;
    return out;
}

} // namespace qtamper
