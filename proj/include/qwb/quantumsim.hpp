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

#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

namespace qwb {

using Amplitude = std::complex<double>;

inline constexpr int kDefaultQubitCap = 20;

/// Dense n-qubit register. Qubit k is bit k of the basis index, i.e. qubit 0
/// is the least-significant bit: basis index 0b10 is |q1=1, q0=0>.
///
/// Gates mutate in place; one mutator at a time.
class StateVector {
  public:
    /// |0...0>. Throws Capacity when n exceeds `cap`, InvalidArgument when n < 1.
    explicit StateVector(int qubits, int cap = kDefaultQubitCap);

    int qubits() const noexcept { return qubits_; }
    std::size_t dimension() const noexcept { return amplitudes_.size(); }
    std::span<const Amplitude> amplitudes() const noexcept { return amplitudes_; }
    std::span<Amplitude> amplitudes() noexcept { return amplitudes_; }
    double norm_squared() const;
    /// |amplitude|^2 per basis state.
    std::vector<double> probabilities() const;

    void h(int q);
    void x(int q);
    void rx(int q, double theta);
    void ry(int q, double theta);
    void rz(int q, double theta);
    void cnot(int control, int target);

  private:
    void check_qubit(int q) const;
    void apply_1q(int q, Amplitude m00, Amplitude m01, Amplitude m10, Amplitude m11);

    int qubits_;
    std::vector<Amplitude> amplitudes_;
};

enum class GateKind { H, X, RX, RY, RZ, CNOT };

struct Gate {
    GateKind kind = GateKind::H;
    /// One target, or {control, target} for CNOT.
    std::vector<int> qubits;
    double angle = 0.0;
};

void apply_gate(StateVector &state, const Gate &gate);
/// The gate that undoes `gate`.
Gate inverse(const Gate &gate);

struct DiagonalObservable {
    int qubits = 0;
    std::vector<double> diagonal;  // size 2^qubits

    double min() const;
};

/// Checks diagonal.size() == 2^qubits.
void validate(const DiagonalObservable &obs);

/// amplitude_z *= exp(-i * gamma * diagonal_z)
void apply_diagonal_phase(StateVector &state, const DiagonalObservable &obs, double gamma);

/// sum_z |amplitude_z|^2 * diagonal_z, clamped to the range of the diagonal.
double expectation_diagonal(const StateVector &state, const DiagonalObservable &obs);

/// Coefficients of a diagonal operator in the Z-string basis. Bit k of the
/// coefficient index selects Z on qubit k; index 0 is the identity.
struct PauliZDecomposition {
    int qubits = 0;
    std::vector<double> coefficients;

    /// diagonal_z = sum_s c_s * prod_{k in s} (-1)^{z_k}
    std::vector<double> reconstruct() const;
};

/// Walsh-Hadamard transform of the diagonal scaled by 2^-n. Throws
/// InvalidArgument when the length is not a power of two.
PauliZDecomposition pauli_z_decompose(std::span<const double> diagonal);

/// Multinomial draw of `shots` measurements in the computational basis.
/// Keys are basis indices with non-zero counts.
std::map<std::uint64_t, std::uint64_t> sample(const StateVector &state, std::uint64_t shots, std::uint64_t seed);

/// Index of the largest probability; ties go to the smallest index.
std::uint64_t most_probable_state(const StateVector &state);

}  // namespace qwb
