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

#include "qtamper/distribution.hpp"

#include <algorithm>
#include <numeric>

#include "qtamper/circuit.hpp"
#include "qtamper/error.hpp"

namespace qtamper {

Bitstring to_bitstring(std::uint64_t index, std::size_t width) {
    Bitstring s(width, '0');
    for (std::size_t i = 0; i < width; ++i) {
        if ((index >> i) & 1U) {
            s[width - 1 - i] = '1';
        }
    }
    return s;
}

std::uint64_t from_bitstring(std::string_view bits) {
    if (bits.size() > 64) {
        throw InvalidArgument("bitstring longer than 64 bits");
    }
    std::uint64_t index = 0;
    for (char c : bits) {
        if (c != '0' && c != '1') {
            throw InvalidArgument("invalid bitstring '" + std::string(bits) + "'");
        }
        index = (index << 1) | static_cast<std::uint64_t>(c == '1');
    }
    return index;
}

namespace {
void check_width(std::size_t width) {
    if (width > kMaxQubits) {
        throw CapacityExceeded("distribution over " + std::to_string(width) +
                               " bits exceeds the dense limit");
    }
}
} // namespace

Distribution::Distribution(std::size_t width) : width_(width) {
    check_width(width);
    probs_.assign(std::size_t{1} << width, 0.0);
    probs_[0] = 1.0;
}

Distribution::Distribution(std::size_t width, std::vector<double> probs)
    : width_(width), probs_(std::move(probs)) {
    check_width(width);
    if (probs_.size() != (std::size_t{1} << width)) {
        throw DimensionMismatch("probability vector has " +
                                std::to_string(probs_.size()) + " entries for width " +
                                std::to_string(width));
    }
}

Distribution Distribution::from_map(const std::map<Bitstring, double> &probs) {
    if (probs.empty()) {
        throw InvalidArgument("empty distribution");
    }
    const std::size_t width = probs.begin()->first.size();
    check_width(width);
    std::vector<double> dense(std::size_t{1} << width, 0.0);
    for (const auto &[k, p] : probs) {
        if (k.size() != width) {
            throw KeyLengthMismatch("mixed key lengths in distribution");
        }
        dense[from_bitstring(k)] += p;
    }
    return Distribution(width, std::move(dense));
}

Distribution Distribution::uniform(std::size_t width) {
    check_width(width);
    const std::size_t n = std::size_t{1} << width;
    return Distribution(width, std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

double Distribution::probability(std::string_view bits) const {
    if (bits.size() != width_) {
        throw KeyLengthMismatch("key '" + std::string(bits) + "' does not have width " +
                                std::to_string(width_));
    }
    return probs_[from_bitstring(bits)];
}

std::map<Bitstring, double> Distribution::to_map(double cutoff) const {
    std::map<Bitstring, double> out;
    for (std::size_t i = 0; i < probs_.size(); ++i) {
        if (probs_[i] > cutoff) {
            out.emplace(to_bitstring(i, width_), probs_[i]);
        }
    }
    return out;
}

double Distribution::total() const {
    return std::accumulate(probs_.begin(), probs_.end(), 0.0);
}

double Distribution::marginal_one(std::size_t line) const {
    if (line >= width_) {
        throw IndexError("line " + std::to_string(line) + " out of range");
    }
    double p = 0.0;
    for (std::size_t i = 0; i < probs_.size(); ++i) {
        if ((i >> line) & 1U) {
            p += probs_[i];
        }
    }
    return p;
}

Bitstring Distribution::top() const {
    // Index order equals lexicographic bitstring order, so the first maximum
    // is the smallest string.
    const auto it = std::max_element(probs_.begin(), probs_.end());
    return to_bitstring(static_cast<std::uint64_t>(it - probs_.begin()), width_);
}

void apply_line_channel(Distribution &dist, std::size_t line, double p01, double p10) {
    if (line >= dist.width()) {
        throw IndexError("line " + std::to_string(line) + " out of range for width " +
                         std::to_string(dist.width()));
    }
    auto &p = dist.mutable_probs();
    const std::size_t bit = std::size_t{1} << line;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (i & bit) {
            continue;
        }
        const double zero = p[i];
        const double one = p[i | bit];
        p[i] = (1.0 - p01) * zero + p10 * one;
        p[i | bit] = p01 * zero + (1.0 - p10) * one;
    }
}

Counts Counts::from_map(const std::map<Bitstring, std::uint64_t> &counts) {
    if (counts.empty()) {
        return Counts{};
    }
    Counts out(counts.begin()->first.size());
    for (const auto &[k, n] : counts) {
        out.add(k, n);
    }
    return out;
}

std::uint64_t Counts::operator[](std::string_view bits) const {
    const auto it = counts_.find(std::string(bits));
    return it == counts_.end() ? 0 : it->second;
}

void Counts::add(const Bitstring &bits, std::uint64_t n) {
    if (bits.size() != width_) {
        throw KeyLengthMismatch("key '" + bits + "' does not have width " +
                                std::to_string(width_));
    }
    (void)from_bitstring(bits);
    if (n == 0) {
        return;
    }
    counts_[bits] += n;
    total_ += n;
}

std::vector<std::pair<Bitstring, std::uint64_t>> Counts::ranked() const {
    std::vector<std::pair<Bitstring, std::uint64_t>> out(counts_.begin(), counts_.end());
    std::stable_sort(out.begin(), out.end(),
                     [](const auto &a, const auto &b) { return a.second > b.second; });
    return out;
}

Bitstring Counts::top() const {
    Bitstring best;
    std::uint64_t best_n = 0;
    for (const auto &[k, n] : counts_) {
        if (n > best_n) {
            best = k;
            best_n = n;
        }
    }
    return best;
}

Distribution Counts::normalized() const {
    if (total_ == 0) {
        throw InvalidArgument("cannot normalize empty counts");
    }
    std::vector<double> dense(std::size_t{1} << width_, 0.0);
    const double inv = 1.0 / static_cast<double>(total_);
    for (const auto &[k, n] : counts_) {
        dense[from_bitstring(k)] = static_cast<double>(n) * inv;
    }
    return Distribution(width_, std::move(dense));
}

} // namespace qtamper
