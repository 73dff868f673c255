// Copyright 2026 The qwb Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qwb/quantumsim.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "qwb/error.hpp"

namespace qwb {

namespace {

constexpr Amplitude kI{0.0, 1.0};

bool is_power_of_two(std::size_t v) { return v != 0 && (v & (v - 1)) == 0; }

void check_sizes(const StateVector &state, const DiagonalObservable &obs) {
    validate(obs);
    if (obs.qubits != state.qubits()) {
        throw Error(ErrorCode::InvalidArgument, "observable acts on " + std::to_string(obs.qubits) +
                                                    " qubits but the state has " + std::to_string(state.qubits()));
    }
}

}  // namespace

StateVector::StateVector(int qubits, int cap) : qubits_(qubits) {
    if (qubits < 1) throw Error(ErrorCode::InvalidArgument, "a register needs at least one qubit");
    if (qubits > cap) {
        throw Error(ErrorCode::Capacity,
                    std::to_string(qubits) + " qubits exceed the simulator cap of " + std::to_string(cap));
    }
    amplitudes_.assign(std::size_t{1} << qubits, Amplitude{0.0, 0.0});
    amplitudes_[0] = 1.0;
}

double StateVector::norm_squared() const {
    double s = 0.0;
    for (const auto &a : amplitudes_) s += std::norm(a);
    return s;
}

std::vector<double> StateVector::probabilities() const {
    std::vector<double> p(amplitudes_.size());
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::norm(amplitudes_[i]);
    return p;
}

void StateVector::check_qubit(int q) const {
    if (q < 0 || q >= qubits_) {
        throw Error(ErrorCode::InvalidArgument,
                    "qubit index " + std::to_string(q) + " out of range for " + std::to_string(qubits_) + " qubits");
    }
}

void StateVector::apply_1q(int q, Amplitude m00, Amplitude m01, Amplitude m10, Amplitude m11) {
    check_qubit(q);
    const std::size_t mask = std::size_t{1} << q;
    for (std::size_t i = 0; i < amplitudes_.size(); ++i) {
        if (i & mask) continue;
        const Amplitude a0 = amplitudes_[i];
        const Amplitude a1 = amplitudes_[i | mask];
        amplitudes_[i] = m00 * a0 + m01 * a1;
        amplitudes_[i | mask] = m10 * a0 + m11 * a1;
    }
}

void StateVector::h(int q) {
    const double r = 1.0 / std::sqrt(2.0);
    apply_1q(q, r, r, r, -r);
}

void StateVector::x(int q) {
    check_qubit(q);
    const std::size_t mask = std::size_t{1} << q;
    for (std::size_t i = 0; i < amplitudes_.size(); ++i) {
        if (!(i & mask)) std::swap(amplitudes_[i], amplitudes_[i | mask]);
    }
}

void StateVector::rx(int q, double theta) {
    const double c = std::cos(theta / 2), s = std::sin(theta / 2);
    apply_1q(q, c, -kI * s, -kI * s, c);
}

void StateVector::ry(int q, double theta) {
    const double c = std::cos(theta / 2), s = std::sin(theta / 2);
    apply_1q(q, c, -s, s, c);
}

void StateVector::rz(int q, double theta) {
    apply_1q(q, std::exp(-kI * (theta / 2)), 0.0, 0.0, std::exp(kI * (theta / 2)));
}

void StateVector::cnot(int control, int target) {
    check_qubit(control);
    check_qubit(target);
    if (control == target) {
        throw Error(ErrorCode::InvalidArgument, "CNOT control and target must differ", std::to_string(control));
    }
    const std::size_t cmask = std::size_t{1} << control;
    const std::size_t tmask = std::size_t{1} << target;
    for (std::size_t i = 0; i < amplitudes_.size(); ++i) {
        if ((i & cmask) && !(i & tmask)) std::swap(amplitudes_[i], amplitudes_[i | tmask]);
    }
}

void apply_gate(StateVector &state, const Gate &gate) {
    const std::size_t arity = gate.kind == GateKind::CNOT ? 2 : 1;
    if (gate.qubits.size() != arity) {
        throw Error(ErrorCode::InvalidArgument, "gate expects " + std::to_string(arity) + " qubit index(es), got " +
                                                    std::to_string(gate.qubits.size()));
    }
    const int q = gate.qubits[0];
    switch (gate.kind) {
        case GateKind::H: state.h(q); break;
        case GateKind::X: state.x(q); break;
        case GateKind::RX: state.rx(q, gate.angle); break;
        case GateKind::RY: state.ry(q, gate.angle); break;
        case GateKind::RZ: state.rz(q, gate.angle); break;
        case GateKind::CNOT: state.cnot(q, gate.qubits[1]); break;
    }
}

Gate inverse(const Gate &gate) {
    Gate out = gate;
    if (gate.kind == GateKind::RX || gate.kind == GateKind::RY || gate.kind == GateKind::RZ) out.angle = -gate.angle;
    return out;
}

double DiagonalObservable::min() const {
    double m = diagonal.empty() ? 0.0 : diagonal[0];
    for (double v : diagonal) m = std::min(m, v);
    return m;
}

void validate(const DiagonalObservable &obs) {
    if (obs.qubits < 1 || obs.qubits > 62 || obs.diagonal.size() != (std::size_t{1} << obs.qubits)) {
        throw Error(ErrorCode::InvalidArgument, "observable diagonal length " + std::to_string(obs.diagonal.size()) +
                                                    " does not equal 2^" + std::to_string(obs.qubits));
    }
}

void apply_diagonal_phase(StateVector &state, const DiagonalObservable &obs, double gamma) {
    check_sizes(state, obs);
    auto amps = state.amplitudes();
    for (std::size_t z = 0; z < amps.size(); ++z) {
        amps[z] *= std::exp(-kI * (gamma * obs.diagonal[z]));
    }
}

double expectation_diagonal(const StateVector &state, const DiagonalObservable &obs) {
    check_sizes(state, obs);
    const auto amps = state.amplitudes();
    double e = 0.0;
    for (std::size_t z = 0; z < amps.size(); ++z) e += std::norm(amps[z]) * obs.diagonal[z];
    // A convex combination of the entries; clamping removes round-off outside it.
    const auto [lo, hi] = std::minmax_element(obs.diagonal.begin(), obs.diagonal.end());
    return std::clamp(e, *lo, *hi);
}

namespace {

// In-place unnormalized fast Walsh-Hadamard transform.
void walsh_hadamard(std::vector<double> &v) {
    for (std::size_t len = 1; len < v.size(); len <<= 1) {
        for (std::size_t i = 0; i < v.size(); i += len << 1) {
            for (std::size_t j = i; j < i + len; ++j) {
                const double a = v[j], b = v[j + len];
                v[j] = a + b;
                v[j + len] = a - b;
            }
        }
    }
}

}  // namespace

PauliZDecomposition pauli_z_decompose(std::span<const double> diagonal) {
    if (!is_power_of_two(diagonal.size())) {
        throw Error(ErrorCode::InvalidArgument,
                    "diagonal length " + std::to_string(diagonal.size()) + " is not a power of two");
    }
    PauliZDecomposition out;
    while ((std::size_t{1} << out.qubits) < diagonal.size()) ++out.qubits;
    out.coefficients.assign(diagonal.begin(), diagonal.end());
    walsh_hadamard(out.coefficients);
    const double scale = 1.0 / static_cast<double>(diagonal.size());
    for (auto &c : out.coefficients) c *= scale;
    return out;
}

std::vector<double> PauliZDecomposition::reconstruct() const {
    std::vector<double> v = coefficients;
    walsh_hadamard(v);
    return v;
}

std::map<std::uint64_t, std::uint64_t> sample(const StateVector &state, std::uint64_t shots, std::uint64_t seed) {
    if (shots < 1) throw Error(ErrorCode::InvalidArgument, "shots must be >= 1");
    const auto probs = state.probabilities();
    std::discrete_distribution<std::uint64_t> dist(probs.begin(), probs.end());
    std::mt19937_64 rng(seed);
    std::map<std::uint64_t, std::uint64_t> counts;
    for (std::uint64_t s = 0; s < shots; ++s) ++counts[dist(rng)];
    return counts;
}

std::uint64_t most_probable_state(const StateVector &state) {
    const auto amps = state.amplitudes();
    std::uint64_t best = 0;
    double best_p = -1.0;
    for (std::size_t z = 0; z < amps.size(); ++z) {
        const double p = std::norm(amps[z]);
        // Round-off-level differences count as ties.
        if (p > best_p + 1e-12) {
            best_p = p;
            best = z;
        }
    }
    return best;
}

}  // namespace qwb
