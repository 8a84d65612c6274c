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
 * Outcome histograms and probability distributions over classical bits.
 *
 * Bitstrings are written most-significant line first: character 0 is
 * classical bit n-1 and the last character is classical bit 0, so the
 * string "101" has bit 0 set, bit 1 clear and bit 2 set. Integer outcome
 * indices use bit i for classical bit i.
 */

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace qtamper {

using Bitstring = std::string;

[[nodiscard]] Bitstring to_bitstring(std::uint64_t index, std::size_t width);
/// Throws InvalidArgument on characters other than '0'/'1'.
[[nodiscard]] std::uint64_t from_bitstring(std::string_view bits);

/// Dense probability vector over 2^width outcomes.
class Distribution {
  public:
    Distribution() = default;
    /// Point mass on outcome 0.
    explicit Distribution(std::size_t width);
    Distribution(std::size_t width, std::vector<double> probs);

    /// Build from a sparse map; every key must share one length.
    static Distribution from_map(const std::map<Bitstring, double> &probs);
    static Distribution uniform(std::size_t width);

    [[nodiscard]] std::size_t width() const noexcept { return width_; }
    [[nodiscard]] std::size_t size() const noexcept { return probs_.size(); }
    [[nodiscard]] double operator[](std::uint64_t index) const { return probs_[index]; }
    [[nodiscard]] double probability(std::string_view bits) const;
    [[nodiscard]] const std::vector<double> &probs() const noexcept { return probs_; }
    [[nodiscard]] std::vector<double> &mutable_probs() noexcept { return probs_; }

    /// Nonzero entries only.
    [[nodiscard]] std::map<Bitstring, double> to_map(double cutoff = 0.0) const;
    [[nodiscard]] double total() const;
    /// Marginal probability that classical bit `line` reads 1.
    [[nodiscard]] double marginal_one(std::size_t line) const;
    /// Modal outcome; ties go to the smallest bitstring.
    [[nodiscard]] Bitstring top() const;

  private:
    std::size_t width_{0};
    std::vector<double> probs_;
};

/// Shot histogram. Keys all have length `width()`; zero counts are not stored.
class Counts {
  public:
    Counts() = default;
    explicit Counts(std::size_t width) : width_(width) {}
    static Counts from_map(const std::map<Bitstring, std::uint64_t> &counts);

    [[nodiscard]] std::size_t width() const noexcept { return width_; }
    [[nodiscard]] std::uint64_t total_shots() const noexcept { return total_; }
    [[nodiscard]] bool empty() const noexcept { return counts_.empty(); }
    [[nodiscard]] std::size_t distinct() const noexcept { return counts_.size(); }
    [[nodiscard]] std::uint64_t operator[](std::string_view bits) const;
    [[nodiscard]] const std::map<Bitstring, std::uint64_t> &entries() const noexcept {
        return counts_;
    }

    /// Throws KeyLengthMismatch when `bits` has the wrong length.
    void add(const Bitstring &bits, std::uint64_t n);

    /// Outcomes ordered by count descending, then bitstring ascending.
    [[nodiscard]] std::vector<std::pair<Bitstring, std::uint64_t>> ranked() const;
    /// Most frequent outcome (smallest bitstring on ties). Empty if no shots.
    [[nodiscard]] Bitstring top() const;
    [[nodiscard]] Distribution normalized() const;

    friend bool operator==(const Counts &, const Counts &) = default;

  private:
    std::size_t width_{0};
    std::uint64_t total_{0};
    std::map<Bitstring, std::uint64_t> counts_;
};

/// Apply the column-stochastic matrix [[1-p01, p10], [p01, 1-p10]] to one
/// classical bit of `dist` in place.
void apply_line_channel(Distribution &dist, std::size_t line, double p01, double p10);

} // namespace qtamper
