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
 * Result-tampering adversary: line selection, the bit-flip channel it
 * applies at measurement, and the readout-error masking arithmetic.
 */

#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "qtamper/distribution.hpp"
#include "qtamper/rng.hpp"

namespace qtamper {

enum class TamperMode {
    RandomAll,
    RandomSubset,
    Targeted,
};

[[nodiscard]] std::string_view tamper_mode_name(TamperMode mode) noexcept;
/// Accepts "random_all", "random_subset", "targeted". Throws InvalidArgument.
[[nodiscard]] TamperMode tamper_mode_from_name(std::string_view name);

/// Adversary configuration. `lines` stays empty until resolved against a
/// concrete output width; see `resolve_lines`.
struct TamperSpec {
    TamperMode mode{TamperMode::Targeted};
    double t{0.0};
    std::size_t k{1};
    std::optional<std::vector<std::size_t>> lines;

    [[nodiscard]] bool resolved() const noexcept { return lines.has_value(); }

    /// Throws InvalidArgument unless t is in [0, 1] and k >= 1.
    void validate() const;

    friend bool operator==(const TamperSpec &, const TamperSpec &) = default;
};

/// Algorithm-1 line selection: the lines where the most frequent outcome
/// and the most frequent remaining outcome disagree. Ties among equal
/// counts go to the smallest bitstring.
/// Throws DegenerateCounts when only one outcome was observed.
[[nodiscard]] std::vector<std::size_t> plan_targeted(const Counts &untampered);

/// Fill `spec.lines` for an output of `width` bits. RandomAll uses every
/// line, RandomSubset draws `k` distinct lines from `rng`, Targeted plans
/// from `untampered`, which must then be provided.
[[nodiscard]] TamperSpec resolve_lines(TamperSpec spec, std::size_t width,
                                       const Counts *untampered, Rng &rng);

/// Flip each resolved line independently with probability `spec.t`.
/// `spec` must be resolved (InvalidArgument otherwise); lines out of range
/// raise IndexError.
[[nodiscard]] Distribution tamper_channel(Distribution dist, const TamperSpec &spec);

struct MaskingReport {
    double base_rae{0.0};
    double t{0.0};
    std::size_t total_lines{0};
    std::size_t tampered_lines{0};
    /// total_lines - tampered_lines + 1
    std::size_t n{0};
    /// t / n
    double delta_tampering{0.0};
    /// sqrt(base_rae^2 + delta_tampering^2)
    double net_rae{0.0};
};

/// Net readout assignment error an adversary would report when its flips
/// are folded into the native error of one line.
/// Throws InvalidLineCount unless 1 <= tampered_lines <= total_lines.
[[nodiscard]] MaskingReport masked_rae(double base_rae, double t, std::size_t total_lines,
                                       std::size_t tampered_lines);

} // namespace qtamper
