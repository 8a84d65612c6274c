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
 * Dense statevector execution, readout-noise channels and seeded sampling.
 *
 * `execute` is the single entry point used by the defenses and the
 * harness. For one backend run it performs, in order:
 *
 *   1. exact statevector evolution, marginalised onto the classical bits
 *      (or per-shot Pauli trajectories when gate depolarizing is enabled),
 *   2. a per-run uniform jitter of the readout error rates (drift),
 *   3. the readout channel,
 *   4. the backend's tamper channel, if any,
 *   5. a multinomial draw of `shots` outcomes.
 */

#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qtamper/adversary.hpp"
#include "qtamper/circuit.hpp"
#include "qtamper/distribution.hpp"

namespace qtamper {

using Complex = std::complex<double>;

class StateVector {
  public:
    /// |0...0> on `num_qubits` qubits. Throws CapacityExceeded above kMaxQubits.
    explicit StateVector(std::size_t num_qubits);

    [[nodiscard]] std::size_t num_qubits() const noexcept { return num_qubits_; }
    [[nodiscard]] std::span<const Complex> amplitudes() const noexcept { return amps_; }
    [[nodiscard]] double norm_squared() const;

    /// Apply a unitary instruction. BARRIER is a no-op; MEASURE is rejected.
    void apply(const Instruction &inst);
    /// Apply an arbitrary 2x2 matrix given row-major.
    void apply_single(std::size_t qubit, const std::array<Complex, 4> &m);

    /// Probability of each computational basis state (bit i = qubit i).
    [[nodiscard]] std::vector<double> probabilities() const;

  private:
    std::size_t num_qubits_;
    std::vector<Complex> amps_;
};

/// 2x2 unitary of a single-qubit gate, row-major.
[[nodiscard]] std::array<Complex, 4> single_qubit_matrix(GateKind kind,
                                                         std::span<const double> params);

struct ReadoutError {
    /// P(read 1 | state 0)
    double p01{0.0};
    /// P(read 0 | state 1)
    double p10{0.0};

    friend bool operator==(const ReadoutError &, const ReadoutError &) = default;
};

struct NoiseModel {
    /// Per qubit. A single entry applies to every qubit; empty means no
    /// readout error.
    std::vector<ReadoutError> readout;
    /// Probability that a random Pauli follows each gate operand.
    double gate_depolarizing{0.0};

    static NoiseModel symmetric(double p) { return NoiseModel{{ReadoutError{p, p}}, 0.0}; }

    /// Throws InvalidArgument unless every probability is in [0, 0.5].
    void validate() const;
    /// Readout error for each classical bit of `circuit` (unmeasured bits
    /// get none). Throws DimensionMismatch if a measured qubit has no entry.
    [[nodiscard]] std::vector<ReadoutError> for_lines(const Circuit &circuit) const;

    friend bool operator==(const NoiseModel &, const NoiseModel &) = default;
};

struct BackendModel {
    std::string name;
    NoiseModel noise;
    std::optional<TamperSpec> tamper;
    /// Uniform +/- jitter re-drawn on every readout probability per run.
    double drift{0.0};

    [[nodiscard]] bool tampered() const noexcept { return tamper && tamper->t > 0.0; }
};

/// Exact output distribution over the circuit's classical bits.
/// Throws CapacityExceeded.
[[nodiscard]] Distribution run_statevector(const Circuit &circuit);

/// Tensor product of per-line readout matrices. Throws DimensionMismatch
/// when `lines.size()` differs from the distribution width.
[[nodiscard]] Distribution apply_readout_channel(Distribution dist,
                                                 std::span<const ReadoutError> lines);
[[nodiscard]] Distribution apply_readout_channel(Distribution dist, const NoiseModel &noise);

/// Multinomial draw by inverse-CDF sampling. Deterministic in (dist, shots, seed).
[[nodiscard]] Counts sample_counts(const Distribution &dist, std::uint64_t shots,
                                   std::uint64_t seed);

/// Readout errors after one run's drift draw, clamped to [0, 0.5].
[[nodiscard]] std::vector<ReadoutError> jitter_readout(std::vector<ReadoutError> lines,
                                                       double drift, Rng &rng);

/// Resolve the tamper lines of `backend` for `circuit`. Targeted planning
/// runs the same circuit privately on the untampered backend for
/// max(shots, kMinPrivateShots) shots, doubling up to kMaxPrivateShots
/// while only one outcome has been seen; after that DegenerateCounts
/// propagates. Backends without a tamper spec are returned unchanged.
inline constexpr std::uint64_t kMinPrivateShots = 1000;
inline constexpr std::uint64_t kMaxPrivateShots = std::uint64_t{1} << 20;
[[nodiscard]] BackendModel resolve_backend(const BackendModel &backend,
                                           const Circuit &circuit, std::uint64_t shots,
                                           std::uint64_t seed);

/// The exact pre-sampling distribution of one run: drift draw (from
/// `seed`), readout channel and tamper channel. `ideal` is the noiseless
/// output of `circuit`. The backend tamper spec must be resolved.
[[nodiscard]] Distribution channel_distribution(const BackendModel &backend,
                                                const Circuit &circuit,
                                                const Distribution &ideal,
                                                std::uint64_t seed);

/// One job on a backend. Unresolved tamper lines are resolved first with a
/// seed derived from `seed`. Throws InvalidArgument when shots == 0.
[[nodiscard]] Counts execute(const BackendModel &backend, const Circuit &circuit,
                             std::uint64_t shots, std::uint64_t seed);

} // namespace qtamper
