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
 * Seed derivation and a small portable random stream.
 *
 * Every random decision in the library is drawn from an `Rng` whose seed is
 * derived by hashing a master seed together with the identity of the cell
 * (backend name, run index, purpose tag, ...). Streams are therefore
 * independent of execution order, and the draws themselves avoid the
 * implementation-defined `std::*_distribution` family so results are
 * reproducible across standard libraries.
 */

#pragma once

#include <bit>
#include <cstdint>
#include <random>
#include <string_view>
#include <type_traits>

namespace qtamper {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline constexpr std::uint64_t fnv1a64(std::string_view s) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

namespace detail {
inline constexpr std::uint64_t mix_in(std::uint64_t h, std::uint64_t v) {
    return splitmix64(h ^ splitmix64(v + 0x632be59bd9b4e019ULL));
}
inline constexpr std::uint64_t mix_in(std::uint64_t h, std::string_view s) {
    return mix_in(h, fnv1a64(s));
}
inline std::uint64_t mix_in(std::uint64_t h, double v) {
    return mix_in(h, std::bit_cast<std::uint64_t>(v));
}
template <typename T>
    requires std::is_integral_v<T>
constexpr std::uint64_t mix_in(std::uint64_t h, T v) {
    return mix_in(h, static_cast<std::uint64_t>(v));
}
} // namespace detail

/// Hash a master seed with any mix of integers, doubles and strings.
template <typename... Parts>
std::uint64_t derive_seed(std::uint64_t master, const Parts &...parts) {
    std::uint64_t h = splitmix64(master);
    ((h = detail::mix_in(h, parts)), ...);
    return h;
}

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Unbiased integer in [0, n). n must be positive.
    std::uint64_t index(std::uint64_t n) {
        const std::uint64_t limit = (~std::uint64_t{0}) - (~std::uint64_t{0}) % n;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % n;
    }

    bool bernoulli(double p) { return uniform() < p; }

    std::uint64_t next() { return engine_(); }

  private:
    std::mt19937_64 engine_;
};

/// Fisher-Yates shuffle on a random access range.
template <typename It> void shuffle(It first, It last, Rng &rng) {
    const auto n = static_cast<std::uint64_t>(last - first);
    for (std::uint64_t i = n; i > 1; --i) {
        const auto j = rng.index(i);
        using std::swap;
        swap(first[i - 1], first[j]);
    }
}

} // namespace qtamper
