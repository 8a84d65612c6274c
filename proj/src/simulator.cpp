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

#include "qtamper/simulator.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numbers>
#include <utility>

#include "qtamper/error.hpp"
#include "qtamper/rng.hpp"

namespace qtamper {

namespace {

constexpr Complex kI{0.0, 1.0};

std::array<Complex, 4> u3_matrix(double theta, double phi, double lambda) {
    const double c = std::cos(theta / 2.0);
    const double s = std::sin(theta / 2.0);
    return {c, -std::exp(kI * lambda) * s, std::exp(kI * phi) * s,
            std::exp(kI * (phi + lambda)) * c};
}

} // namespace

std::array<Complex, 4> single_qubit_matrix(GateKind kind, std::span<const double> params) {
    using std::numbers::pi;
    const double r = 1.0 / std::numbers::sqrt2;
    switch (kind) {
    case GateKind::H:
        return {r, r, r, -r};
    case GateKind::X:
        return {0.0, 1.0, 1.0, 0.0};
    case GateKind::Y:
        return {0.0, -kI, kI, 0.0};
    case GateKind::Z:
        return {1.0, 0.0, 0.0, -1.0};
    case GateKind::S:
        return {1.0, 0.0, 0.0, kI};
    case GateKind::SDG:
        return {1.0, 0.0, 0.0, -kI};
    case GateKind::T:
        return {1.0, 0.0, 0.0, std::exp(kI * (pi / 4.0))};
    case GateKind::TDG:
        return {1.0, 0.0, 0.0, std::exp(-kI * (pi / 4.0))};
    case GateKind::RX: {
        const double c = std::cos(params[0] / 2.0);
        const double s = std::sin(params[0] / 2.0);
        return {c, -kI * s, -kI * s, c};
    }
    case GateKind::RY: {
        const double c = std::cos(params[0] / 2.0);
        const double s = std::sin(params[0] / 2.0);
        return {c, -s, s, c};
    }
    case GateKind::RZ:
        return {std::exp(-kI * (params[0] / 2.0)), 0.0, 0.0,
                std::exp(kI * (params[0] / 2.0))};
    case GateKind::U1:
        return {1.0, 0.0, 0.0, std::exp(kI * params[0])};
    case GateKind::U2:
        return u3_matrix(pi / 2.0, params[0], params[1]);
    case GateKind::U3:
        return u3_matrix(params[0], params[1], params[2]);
    default:
        throw InvalidArgument(std::string(gate_name(kind)) + " is not a single-qubit gate");
    }
}

StateVector::StateVector(std::size_t num_qubits) : num_qubits_(num_qubits) {
    if (num_qubits > kMaxQubits) {
        throw CapacityExceeded(std::to_string(num_qubits) + " qubits exceed the limit of " +
                               std::to_string(kMaxQubits));
    }
    amps_.assign(std::size_t{1} << num_qubits, Complex{0.0, 0.0});
    amps_[0] = 1.0;
}

double StateVector::norm_squared() const {
    double n = 0.0;
    for (const auto &a : amps_) {
        n += std::norm(a);
    }
    return n;
}

void StateVector::apply_single(std::size_t qubit, const std::array<Complex, 4> &m) {
    const std::size_t bit = std::size_t{1} << qubit;
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        if (i & bit) {
            continue;
        }
        const Complex a0 = amps_[i];
        const Complex a1 = amps_[i | bit];
        amps_[i] = m[0] * a0 + m[1] * a1;
        amps_[i | bit] = m[2] * a0 + m[3] * a1;
    }
}

void StateVector::apply(const Instruction &inst) {
    const auto &q = inst.qubits;
    switch (inst.kind) {
    case GateKind::BARRIER:
        return;
    case GateKind::MEASURE:
        throw InvalidArgument("measure is not a unitary instruction");
    case GateKind::CX: {
        const std::size_t c = std::size_t{1} << q[0];
        const std::size_t t = std::size_t{1} << q[1];
        for (std::size_t i = 0; i < amps_.size(); ++i) {
            if ((i & c) && !(i & t)) {
                std::swap(amps_[i], amps_[i | t]);
            }
        }
        break;
    }
    case GateKind::CZ: {
        const std::size_t mask = (std::size_t{1} << q[0]) | (std::size_t{1} << q[1]);
        for (std::size_t i = 0; i < amps_.size(); ++i) {
            if ((i & mask) == mask) {
                amps_[i] = -amps_[i];
            }
        }
        break;
    }
    case GateKind::SWAP: {
        const std::size_t a = std::size_t{1} << q[0];
        const std::size_t b = std::size_t{1} << q[1];
        for (std::size_t i = 0; i < amps_.size(); ++i) {
            if ((i & a) && !(i & b)) {
                std::swap(amps_[i], amps_[(i & ~a) | b]);
            }
        }
        break;
    }
    case GateKind::CCX: {
        const std::size_t controls = (std::size_t{1} << q[0]) | (std::size_t{1} << q[1]);
        const std::size_t t = std::size_t{1} << q[2];
        for (std::size_t i = 0; i < amps_.size(); ++i) {
            if ((i & controls) == controls && !(i & t)) {
                std::swap(amps_[i], amps_[i | t]);
            }
        }
        break;
    }
    default:
        apply_single(q[0], single_qubit_matrix(inst.kind, inst.params));
        break;
    }
    assert(std::abs(norm_squared() - 1.0) < 1e-10);
}

std::vector<double> StateVector::probabilities() const {
    std::vector<double> p(amps_.size());
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        p[i] = std::norm(amps_[i]);
    }
    return p;
}

void NoiseModel::validate() const {
    for (const auto &r : readout) {
        if (!(r.p01 >= 0.0 && r.p01 <= 0.5 && r.p10 >= 0.0 && r.p10 <= 0.5)) {
            throw InvalidArgument("readout error probabilities must lie in [0, 0.5]");
        }
    }
    if (!(gate_depolarizing >= 0.0 && gate_depolarizing <= 0.5)) {
        throw InvalidArgument("gate depolarizing probability must lie in [0, 0.5]");
    }
}

std::vector<ReadoutError> NoiseModel::for_lines(const Circuit &circuit) const {
    const auto map = circuit.measurement_map();
    std::vector<ReadoutError> lines(map.size());
    if (readout.empty()) {
        return lines;
    }
    for (std::size_t c = 0; c < map.size(); ++c) {
        if (!map[c]) {
            continue;
        }
        if (readout.size() == 1) {
            lines[c] = readout[0];
        } else if (*map[c] < readout.size()) {
            lines[c] = readout[*map[c]];
        } else {
            throw DimensionMismatch("no readout error given for qubit " +
                                    std::to_string(*map[c]));
        }
    }
    return lines;
}

namespace {

/// Basis-state index -> classical outcome index.
std::vector<std::uint64_t> outcome_index_map(const Circuit &circuit) {
    const auto map = circuit.measurement_map();
    std::vector<std::uint64_t> out(std::size_t{1} << circuit.num_qubits(), 0);
    for (std::size_t i = 0; i < out.size(); ++i) {
        std::uint64_t o = 0;
        for (std::size_t c = 0; c < map.size(); ++c) {
            if (map[c] && ((i >> *map[c]) & 1U)) {
                o |= std::uint64_t{1} << c;
            }
        }
        out[i] = o;
    }
    return out;
}

Distribution marginalize(const Circuit &circuit, const std::vector<double> &basis_probs,
                         const std::vector<std::uint64_t> &index_map) {
    std::vector<double> out(std::size_t{1} << circuit.num_clbits(), 0.0);
    for (std::size_t i = 0; i < basis_probs.size(); ++i) {
        out[index_map[i]] += basis_probs[i];
    }
    return Distribution(circuit.num_clbits(), std::move(out));
}

StateVector evolve(const Circuit &circuit) {
    StateVector sv(circuit.num_qubits());
    for (const auto &inst : circuit.instructions()) {
        if (inst.kind != GateKind::MEASURE) {
            sv.apply(inst);
        }
    }
    return sv;
}

} // namespace

Distribution run_statevector(const Circuit &circuit) {
    if (circuit.num_qubits() > kMaxQubits || circuit.num_clbits() > kMaxQubits) {
        throw CapacityExceeded("circuit exceeds the simulator capacity of " +
                               std::to_string(kMaxQubits));
    }
    const auto sv = evolve(circuit);
    return marginalize(circuit, sv.probabilities(), outcome_index_map(circuit));
}

Distribution apply_readout_channel(Distribution dist, std::span<const ReadoutError> lines) {
    if (lines.size() != dist.width()) {
        throw DimensionMismatch("distribution has " + std::to_string(dist.width()) +
                                " bits but " + std::to_string(lines.size()) +
                                " readout channels were supplied");
    }
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (lines[i].p01 != 0.0 || lines[i].p10 != 0.0) {
            apply_line_channel(dist, i, lines[i].p01, lines[i].p10);
        }
    }
    return dist;
}

Distribution apply_readout_channel(Distribution dist, const NoiseModel &noise) {
    std::vector<ReadoutError> lines;
    if (noise.readout.size() == 1) {
        lines.assign(dist.width(), noise.readout[0]);
    } else if (noise.readout.empty()) {
        lines.assign(dist.width(), ReadoutError{});
    } else {
        lines = noise.readout;
    }
    return apply_readout_channel(std::move(dist), lines);
}

namespace {

class CdfSampler {
  public:
    explicit CdfSampler(const std::vector<double> &probs) : cdf_(probs.size()) {
        double acc = 0.0;
        for (std::size_t i = 0; i < probs.size(); ++i) {
            if (probs[i] > 0.0) {
                acc += probs[i];
                last_positive_ = i;
            }
            cdf_[i] = acc;
        }
        if (!(acc > 0.0)) {
            throw InvalidArgument("cannot sample from a distribution with zero mass");
        }
    }

    std::size_t draw(Rng &rng) const {
        const double u = rng.uniform() * cdf_.back();
        const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
        if (it == cdf_.end()) {
            return last_positive_;
        }
        return static_cast<std::size_t>(it - cdf_.begin());
    }

  private:
    std::vector<double> cdf_;
    std::size_t last_positive_{0};
};

Counts tally(std::size_t width, const std::vector<std::uint64_t> &hits) {
    Counts out(width);
    for (std::size_t i = 0; i < hits.size(); ++i) {
        if (hits[i] != 0) {
            out.add(to_bitstring(i, width), hits[i]);
        }
    }
    return out;
}

} // namespace

Counts sample_counts(const Distribution &dist, std::uint64_t shots, std::uint64_t seed) {
    if (shots == 0) {
        throw InvalidArgument("shots must be positive");
    }
    const CdfSampler sampler(dist.probs());
    Rng rng(seed);
    std::vector<std::uint64_t> hits(dist.size(), 0);
    for (std::uint64_t s = 0; s < shots; ++s) {
        ++hits[sampler.draw(rng)];
    }
    return tally(dist.width(), hits);
}

std::vector<ReadoutError> jitter_readout(std::vector<ReadoutError> lines, double drift,
                                         Rng &rng) {
    if (drift <= 0.0) {
        return lines;
    }
    const auto jitter = [&](double p) {
        return std::clamp(p + rng.uniform(-drift, drift), 0.0, 0.5);
    };
    for (auto &r : lines) {
        r.p01 = jitter(r.p01);
        r.p10 = jitter(r.p10);
    }
    return lines;
}

BackendModel resolve_backend(const BackendModel &backend, const Circuit &circuit,
                             std::uint64_t shots, std::uint64_t seed) {
    if (!backend.tamper || backend.tamper->resolved()) {
        return backend;
    }
    BackendModel out = backend;
    Rng rng(derive_seed(seed, "lines"));
    if (backend.tamper->mode == TamperMode::Targeted) {
        BackendModel clean = backend;
        clean.tamper.reset();
        std::uint64_t n = std::max(shots, kMinPrivateShots);
        Counts observed = execute(clean, circuit, n, derive_seed(seed, "private-run"));
        while (observed.distinct() < 2 && n < kMaxPrivateShots) {
            n = std::min(2 * n, kMaxPrivateShots);
            observed = execute(clean, circuit, n, derive_seed(seed, "private-run", n));
        }
        out.tamper = resolve_lines(*backend.tamper, circuit.num_clbits(), &observed, rng);
    } else {
        out.tamper = resolve_lines(*backend.tamper, circuit.num_clbits(), nullptr, rng);
    }
    return out;
}

namespace {

Distribution post_measurement_channels(const BackendModel &backend, Distribution dist,
                                       const std::vector<ReadoutError> &readout) {
    dist = apply_readout_channel(std::move(dist), readout);
    if (backend.tamper) {
        dist = tamper_channel(std::move(dist), *backend.tamper);
    }
    return dist;
}

std::vector<ReadoutError> drifted_readout(const BackendModel &backend,
                                          const Circuit &circuit, std::uint64_t seed) {
    Rng rng(seed);
    return jitter_readout(backend.noise.for_lines(circuit), backend.drift, rng);
}

/// Per-shot Pauli trajectories. Shots with no error event share the exact
/// noiseless distribution; every other shot is simulated individually.
Counts execute_trajectories(const BackendModel &backend, const Circuit &circuit,
                            const Distribution &ideal,
                            const std::vector<ReadoutError> &readout,
                            std::uint64_t shots, std::uint64_t seed) {
    const double p = backend.noise.gate_depolarizing;
    const auto index_map = outcome_index_map(circuit);
    Rng events(derive_seed(seed, "trajectory"));
    std::vector<std::uint64_t> hits(ideal.size(), 0);
    std::uint64_t clean_shots = 0;

    std::vector<std::pair<std::size_t, int>> faults; // (instruction, pauli) per operand
    std::vector<std::size_t> fault_qubits;
    for (std::uint64_t s = 0; s < shots; ++s) {
        faults.clear();
        fault_qubits.clear();
        const auto &insts = circuit.instructions();
        for (std::size_t k = 0; k < insts.size(); ++k) {
            if (insts[k].kind == GateKind::BARRIER || insts[k].kind == GateKind::MEASURE) {
                continue;
            }
            for (auto q : insts[k].qubits) {
                if (events.bernoulli(p)) {
                    faults.emplace_back(k, static_cast<int>(events.index(3)));
                    fault_qubits.push_back(q);
                }
            }
        }
        if (faults.empty()) {
            ++clean_shots;
            continue;
        }
        StateVector sv(circuit.num_qubits());
        std::size_t next = 0;
        for (std::size_t k = 0; k < insts.size(); ++k) {
            if (insts[k].kind == GateKind::MEASURE) {
                continue;
            }
            sv.apply(insts[k]);
            while (next < faults.size() && faults[next].first == k) {
                static constexpr GateKind kPaulis[] = {GateKind::X, GateKind::Y, GateKind::Z};
                sv.apply_single(fault_qubits[next],
                                single_qubit_matrix(kPaulis[faults[next].second], {}));
                ++next;
            }
        }
        const auto shot_dist = post_measurement_channels(
            backend, marginalize(circuit, sv.probabilities(), index_map), readout);
        ++hits[CdfSampler(shot_dist.probs()).draw(events)];
    }
    if (clean_shots > 0) {
        const auto clean = sample_counts(post_measurement_channels(backend, ideal, readout),
                                         clean_shots, derive_seed(seed, "sample"));
        for (const auto &[k, n] : clean.entries()) {
            hits[from_bitstring(k)] += n;
        }
    }
    return tally(ideal.width(), hits);
}

} // namespace

Distribution channel_distribution(const BackendModel &backend, const Circuit &circuit,
                                  const Distribution &ideal, std::uint64_t seed) {
    return post_measurement_channels(backend, ideal, drifted_readout(backend, circuit, seed));
}

Counts execute(const BackendModel &backend, const Circuit &circuit, std::uint64_t shots,
               std::uint64_t seed) {
    if (shots == 0) {
        throw InvalidArgument("shots must be positive");
    }
    backend.noise.validate();
    const BackendModel resolved =
        resolve_backend(backend, circuit, shots, derive_seed(seed, "plan"));
    const Distribution ideal = run_statevector(circuit);
    const std::uint64_t drift_seed = derive_seed(seed, "drift");
    if (resolved.noise.gate_depolarizing > 0.0) {
        return execute_trajectories(resolved, circuit, ideal,
                                    drifted_readout(resolved, circuit, drift_seed), shots,
                                    seed);
    }
    return sample_counts(channel_distribution(resolved, circuit, ideal, drift_seed), shots,
                         derive_seed(seed, "sample"));
}

} // namespace qtamper
