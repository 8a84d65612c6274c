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

#include <compare>
#include <span>
#include <string>

#include "qtamper/distribution.hpp"

namespace qtamper {

/// Ratio P(correct) / P(most frequent incorrect outcome). When no incorrect
/// outcome was observed the ratio is unbounded; that case is a distinct
/// state rather than a floating-point infinity.
class PerformanceMetric {
  public:
    constexpr PerformanceMetric() = default;
    static constexpr PerformanceMetric finite(double v) { return PerformanceMetric(v, false); }
    static constexpr PerformanceMetric unbounded() { return PerformanceMetric(0.0, true); }

    [[nodiscard]] constexpr bool is_unbounded() const noexcept { return unbounded_; }
    /// Finite value; InvalidArgument when unbounded.
    [[nodiscard]] double value() const;
    /// Finite value, or +infinity for the unbounded state.
    [[nodiscard]] double as_double() const noexcept;
    /// "inf" or the shortest round-trip decimal.
    [[nodiscard]] std::string to_string() const;

    friend constexpr std::partial_ordering operator<=>(const PerformanceMetric &a,
                                                       const PerformanceMetric &b) {
        if (a.unbounded_ || b.unbounded_) {
            return a.unbounded_ == b.unbounded_ ? std::partial_ordering::equivalent
                   : a.unbounded_              ? std::partial_ordering::greater
                                               : std::partial_ordering::less;
        }
        return a.value_ <=> b.value_;
    }
    friend constexpr bool operator==(const PerformanceMetric &a, const PerformanceMetric &b) {
        return (a <=> b) == std::partial_ordering::equivalent;
    }

  private:
    constexpr PerformanceMetric(double v, bool unbounded) : value_(v), unbounded_(unbounded) {}
    double value_{0.0};
    bool unbounded_{false};
};

/// Throws KeyLengthMismatch if `correct` has the wrong width, InvalidArgument
/// on empty counts.
[[nodiscard]] PerformanceMetric pm(const Counts &counts, const std::string &correct);
[[nodiscard]] PerformanceMetric pm(const Distribution &dist, const std::string &correct);

/// Half the L1 distance between normalized histograms. Throws
/// KeyLengthMismatch when widths differ.
[[nodiscard]] double tvd(const Distribution &a, const Distribution &b);
[[nodiscard]] double tvd(const Counts &a, const Counts &b);
[[nodiscard]] double tvd(const Counts &a, const Distribution &b);
[[nodiscard]] double tvd(const Distribution &a, const Counts &b);

/// Key-wise sum. Throws KeyLengthMismatch when widths differ.
[[nodiscard]] Counts stitch(std::span<const Counts> parts);

struct MetricsReport {
    PerformanceMetric pm;
    double tvd{0.0};
    std::string top_outcome;
    /// top count / total shots
    double confidence{0.0};
};

[[nodiscard]] MetricsReport summarize(const Counts &counts, const std::string &correct,
                                      const Distribution &reference);

} // namespace qtamper
