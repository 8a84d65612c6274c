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

#include "qtamper/metrics.hpp"

#include <charconv>
#include <cmath>
#include <limits>

#include "qtamper/error.hpp"

namespace qtamper {

double PerformanceMetric::value() const {
    if (unbounded_) {
        throw InvalidArgument("performance metric is unbounded");
    }
    return value_;
}

double PerformanceMetric::as_double() const noexcept {
    return unbounded_ ? std::numeric_limits<double>::infinity() : value_;
}

std::string PerformanceMetric::to_string() const {
    if (unbounded_) {
        return "inf";
    }
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, value_);
    return std::string(buf, res.ptr);
}

namespace {

void require_width(std::size_t expected, std::size_t got) {
    if (expected != got) {
        throw KeyLengthMismatch("bitstring width " + std::to_string(got) +
                                " does not match " + std::to_string(expected));
    }
}

} // namespace

PerformanceMetric pm(const Counts &counts, const std::string &correct) {
    if (counts.total_shots() == 0) {
        throw InvalidArgument("pm of empty counts");
    }
    require_width(counts.width(), correct.size());
    const auto good = counts[correct];
    std::uint64_t worst = 0;
    for (const auto &[k, n] : counts.entries()) {
        if (k != correct && n > worst) {
            worst = n;
        }
    }
    if (worst == 0) {
        return PerformanceMetric::unbounded();
    }
    return PerformanceMetric::finite(static_cast<double>(good) / static_cast<double>(worst));
}

PerformanceMetric pm(const Distribution &dist, const std::string &correct) {
    require_width(dist.width(), correct.size());
    const auto target = from_bitstring(correct);
    double worst = 0.0;
    for (std::size_t i = 0; i < dist.size(); ++i) {
        if (i != target && dist[i] > worst) {
            worst = dist[i];
        }
    }
    if (worst <= 0.0) {
        return PerformanceMetric::unbounded();
    }
    return PerformanceMetric::finite(dist[target] / worst);
}

double tvd(const Distribution &a, const Distribution &b) {
    require_width(a.width(), b.width());
    const double ta = a.total();
    const double tb = b.total();
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        acc += std::abs(a[i] / ta - b[i] / tb);
    }
    return std::min(1.0, 0.5 * acc);
}

double tvd(const Counts &a, const Counts &b) {
    require_width(a.width(), b.width());
    const double ta = static_cast<double>(a.total_shots());
    const double tb = static_cast<double>(b.total_shots());
    double acc = 0.0;
    // Merge walk over the two sorted key sets.
    auto ia = a.entries().begin();
    auto ib = b.entries().begin();
    const auto ea = a.entries().end();
    const auto eb = b.entries().end();
    while (ia != ea || ib != eb) {
        if (ib == eb || (ia != ea && ia->first < ib->first)) {
            acc += static_cast<double>(ia->second) / ta;
            ++ia;
        } else if (ia == ea || ib->first < ia->first) {
            acc += static_cast<double>(ib->second) / tb;
            ++ib;
        } else {
            acc += std::abs(static_cast<double>(ia->second) / ta -
                            static_cast<double>(ib->second) / tb);
            ++ia;
            ++ib;
        }
    }
    return std::min(1.0, 0.5 * acc);
}

double tvd(const Counts &a, const Distribution &b) { return tvd(a.normalized(), b); }
double tvd(const Distribution &a, const Counts &b) { return tvd(a, b.normalized()); }

Counts stitch(std::span<const Counts> parts) {
    if (parts.empty()) {
        return Counts{};
    }
    Counts out(parts.front().width());
    for (const auto &part : parts) {
        require_width(out.width(), part.width());
        for (const auto &[k, n] : part.entries()) {
            out.add(k, n);
        }
    }
    return out;
}

MetricsReport summarize(const Counts &counts, const std::string &correct,
                        const Distribution &reference) {
    MetricsReport r;
    r.pm = pm(counts, correct);
    r.tvd = tvd(counts, reference);
    r.top_outcome = counts.top();
    r.confidence = static_cast<double>(counts[r.top_outcome]) /
                   static_cast<double>(counts.total_shots());
    return r;
}

} // namespace qtamper
