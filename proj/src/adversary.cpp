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

#include "qtamper/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "qtamper/error.hpp"

namespace qtamper {

std::string_view tamper_mode_name(TamperMode mode) noexcept {
    switch (mode) {
    case TamperMode::RandomAll:
        return "random_all";
    case TamperMode::RandomSubset:
        return "random_subset";
    case TamperMode::Targeted:
        return "targeted";
    }
    return "targeted";
}

TamperMode tamper_mode_from_name(std::string_view name) {
    if (name == "random_all") {
        return TamperMode::RandomAll;
    }
    if (name == "random_subset") {
        return TamperMode::RandomSubset;
    }
    if (name == "targeted") {
        return TamperMode::Targeted;
    }
    throw InvalidArgument("unknown tamper mode '" + std::string(name) + "'");
}

void TamperSpec::validate() const {
    if (!(t >= 0.0 && t <= 1.0)) {
        throw InvalidArgument("tampering coefficient must lie in [0, 1]");
    }
    if (mode == TamperMode::RandomSubset && k == 0) {
        throw InvalidArgument("random_subset needs k >= 1");
    }
}

std::vector<std::size_t> plan_targeted(const Counts &untampered) {
    if (untampered.distinct() < 2) {
        throw DegenerateCounts("targeted planning needs at least two observed outcomes");
    }
    const auto ranked = untampered.ranked();
    const Bitstring &a = ranked[0].first;
    const Bitstring &b = ranked[1].first;
    const std::size_t width = a.size();
    std::vector<std::size_t> lines;
    // Line i is character width-1-i.
    for (std::size_t i = 0; i < width; ++i) {
        if (a[width - 1 - i] != b[width - 1 - i]) {
            lines.push_back(i);
        }
    }
    return lines;
}

TamperSpec resolve_lines(TamperSpec spec, std::size_t width, const Counts *untampered,
                         Rng &rng) {
    spec.validate();
    switch (spec.mode) {
    case TamperMode::RandomAll: {
        std::vector<std::size_t> all(width);
        std::iota(all.begin(), all.end(), std::size_t{0});
        spec.lines = std::move(all);
        break;
    }
    case TamperMode::RandomSubset: {
        if (spec.k > width) {
            throw InvalidArgument("random_subset k=" + std::to_string(spec.k) +
                                  " exceeds " + std::to_string(width) + " lines");
        }
        std::vector<std::size_t> all(width);
        std::iota(all.begin(), all.end(), std::size_t{0});
        shuffle(all.begin(), all.end(), rng);
        all.resize(spec.k);
        std::sort(all.begin(), all.end());
        spec.lines = std::move(all);
        break;
    }
    case TamperMode::Targeted:
        if (untampered == nullptr) {
            throw InvalidArgument("targeted tampering needs untampered counts to plan");
        }
        spec.lines = plan_targeted(*untampered);
        break;
    }
    return spec;
}

Distribution tamper_channel(Distribution dist, const TamperSpec &spec) {
    if (!spec.resolved()) {
        throw InvalidArgument("tamper spec has unresolved lines");
    }
    for (auto line : *spec.lines) {
        apply_line_channel(dist, line, spec.t, spec.t);
    }
    return dist;
}

MaskingReport masked_rae(double base_rae, double t, std::size_t total_lines,
                         std::size_t tampered_lines) {
    if (tampered_lines < 1 || tampered_lines > total_lines) {
        throw InvalidLineCount("tampered lines must be between 1 and " +
                               std::to_string(total_lines));
    }
    MaskingReport r;
    r.base_rae = base_rae;
    r.t = t;
    r.total_lines = total_lines;
    r.tampered_lines = tampered_lines;
    r.n = total_lines - tampered_lines + 1;
    r.delta_tampering = t / static_cast<double>(r.n);
    r.net_rae = std::hypot(base_rae, r.delta_tampering);
    return r;
}

} // namespace qtamper
