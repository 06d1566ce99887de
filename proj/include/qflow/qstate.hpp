// Copyright 2026 The qflow Authors
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

// Dense statevector and unitary algebra for small registers.
//
// Basis convention: in the binary expansion of a basis index, qubit 0 is the
// most significant bit. For N qubits, qubit q is bit (N - 1 - q).

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qflow/distribution.hpp"
#include "qflow/gate.hpp"

namespace qflow {

using Complex = std::complex<double>;

inline constexpr int kMaxQubits = 12;

namespace detail {

inline void check_num_qubits(int num_qubits) {
    if (num_qubits < 1 || num_qubits > kMaxQubits) {
        throw std::invalid_argument(
            "number of qubits must be in [1, " + std::to_string(kMaxQubits) + "], got " + std::to_string(num_qubits));
    }
}

inline size_t qubit_mask(int num_qubits, int qubit) { return size_t{1} << (num_qubits - 1 - qubit); }

inline void apply_single(std::span<Complex> amps, size_t mask, Complex m00, Complex m01, Complex m10, Complex m11) {
    for (size_t i = 0; i < amps.size(); i++) {
        if (i & mask) {
            continue;
        }
        Complex a = amps[i];
        Complex b = amps[i | mask];
        amps[i] = m00 * a + m01 * b;
        amps[i | mask] = m10 * a + m11 * b;
    }
}

/// Multiplies every amplitude whose index has all `mask` bits set by `phase`.
inline void apply_phase(std::span<Complex> amps, size_t mask, Complex phase) {
    for (size_t i = 0; i < amps.size(); i++) {
        if ((i & mask) == mask) {
            amps[i] *= phase;
        }
    }
}

/// Swaps amplitude pairs (i, i ^ flip) for indices i matching `select`
/// under `care`. `care` must include the bits of `flip`.
inline void apply_swap(std::span<Complex> amps, size_t care, size_t select, size_t flip) {
    for (size_t i = 0; i < amps.size(); i++) {
        if ((i & care) == select) {
            std::swap(amps[i], amps[i ^ flip]);
        }
    }
}

}  // namespace detail

/// Applies `gate` in place to an amplitude vector of length 2^num_qubits.
/// Uses index arithmetic only; no matrices are built.
inline void apply_gate_inplace(std::span<Complex> amps, int num_qubits, const GateSpec &gate) {
    using namespace detail;
    const auto &q = gate.qubits;
    auto m = [&](size_t k) { return qubit_mask(num_qubits, q[k]); };
    static const double r = 1.0 / std::numbers::sqrt2;
    switch (gate.kind) {
        case GateKind::X:
            apply_swap(amps, m(0), 0, m(0));
            break;
        case GateKind::Y:
            apply_single(amps, m(0), 0, Complex(0, -1), Complex(0, 1), 0);
            break;
        case GateKind::Z:
            apply_phase(amps, m(0), -1.0);
            break;
        case GateKind::H:
            apply_single(amps, m(0), r, r, r, -r);
            break;
        case GateKind::T:
            apply_phase(amps, m(0), std::polar(1.0, std::numbers::pi / 4));
            break;
        case GateKind::P:
            apply_phase(amps, m(0), std::polar(1.0, gate.theta->radians()));
            break;
        case GateKind::CNOT:
            apply_swap(amps, m(0) | m(1), m(0), m(1));
            break;
        case GateKind::CZ:
            apply_phase(amps, m(0) | m(1), -1.0);
            break;
        case GateKind::CP:
            apply_phase(amps, m(0) | m(1), std::polar(1.0, gate.theta->radians()));
            break;
        case GateKind::SWAP:
            apply_swap(amps, m(0) | m(1), m(0), m(0) | m(1));
            break;
        case GateKind::CSWAP:
            apply_swap(amps, m(0) | m(1) | m(2), m(0) | m(1), m(1) | m(2));
            break;
        case GateKind::TOFFOLI:
            apply_swap(amps, m(0) | m(1) | m(2), m(0) | m(1), m(2));
            break;
    }
}

class QuantumState {
   public:
    static constexpr double kNormTolerance = 1e-9;

    /// Validates length 2^num_qubits and unit norm.
    QuantumState(int num_qubits, std::vector<Complex> amplitudes)
        : num_qubits_(num_qubits), amplitudes_(std::move(amplitudes)) {
        detail::check_num_qubits(num_qubits_);
        if (amplitudes_.size() != (size_t{1} << num_qubits_)) {
            throw std::invalid_argument(
                "state of " + std::to_string(num_qubits_) + " qubits needs " +
                std::to_string(size_t{1} << num_qubits_) + " amplitudes, got " + std::to_string(amplitudes_.size()));
        }
        double n = norm();
        if (std::abs(n - 1.0) > kNormTolerance) {
            throw std::invalid_argument("state is not normalized (norm " + std::to_string(n) + ")");
        }
    }

    static QuantumState basis(int num_qubits, size_t index) {
        detail::check_num_qubits(num_qubits);
        std::vector<Complex> amps(size_t{1} << num_qubits);
        if (index >= amps.size()) {
            throw std::out_of_range("basis index out of range");
        }
        amps[index] = 1;
        return QuantumState(num_qubits, std::move(amps));
    }

    /// Rescales `amplitudes` to unit norm before validating.
    static QuantumState normalized(int num_qubits, std::vector<Complex> amplitudes) {
        double sum = 0;
        for (const auto &a : amplitudes) {
            sum += std::norm(a);
        }
        if (sum <= 0) {
            throw std::invalid_argument("cannot normalize the zero vector");
        }
        double s = 1.0 / std::sqrt(sum);
        for (auto &a : amplitudes) {
            a *= s;
        }
        return QuantumState(num_qubits, std::move(amplitudes));
    }

    /// Real nonnegative amplitudes sqrt(p_k).
    static QuantumState from_distribution(const DiscreteDistribution &dist) {
        size_t dim = dist.size();
        int n = 0;
        while ((size_t{1} << n) < dim) {
            n++;
        }
        if ((size_t{1} << n) != dim) {
            throw std::invalid_argument("distribution length must be a power of two");
        }
        std::vector<Complex> amps(dim);
        for (size_t k = 0; k < dim; k++) {
            amps[k] = std::sqrt(dist[k]);
        }
        return QuantumState(n, std::move(amps));
    }

    int num_qubits() const { return num_qubits_; }
    size_t dim() const { return amplitudes_.size(); }
    std::span<const Complex> amplitudes() const { return amplitudes_; }
    const Complex &operator[](size_t k) const { return amplitudes_[k]; }

    double norm() const {
        double sum = 0;
        for (const auto &a : amplitudes_) {
            sum += std::norm(a);
        }
        return std::sqrt(sum);
    }

    friend bool operator==(const QuantumState &, const QuantumState &) = default;

   private:
    int num_qubits_;
    std::vector<Complex> amplitudes_;
};

/// Dense dim x dim complex matrix, column-major.
class UnitaryMatrix {
   public:
    UnitaryMatrix() = default;

    static UnitaryMatrix identity(int num_qubits) {
        detail::check_num_qubits(num_qubits);
        UnitaryMatrix u(num_qubits);
        for (size_t k = 0; k < u.dim_; k++) {
            u(k, k) = 1;
        }
        return u;
    }

    static UnitaryMatrix zeros(int num_qubits) {
        detail::check_num_qubits(num_qubits);
        return UnitaryMatrix(num_qubits);
    }

    int num_qubits() const { return num_qubits_; }
    size_t dim() const { return dim_; }

    Complex &operator()(size_t row, size_t col) { return data_[col * dim_ + row]; }
    const Complex &operator()(size_t row, size_t col) const { return data_[col * dim_ + row]; }

    std::span<Complex> column(size_t col) { return {data_.data() + col * dim_, dim_}; }
    std::span<const Complex> column(size_t col) const { return {data_.data() + col * dim_, dim_}; }
    std::span<const Complex> data() const { return data_; }

    /// this <- gate * this, column by column.
    void left_apply(const GateSpec &gate) {
        for (size_t c = 0; c < dim_; c++) {
            apply_gate_inplace(column(c), num_qubits_, gate);
        }
    }

    UnitaryMatrix operator*(const UnitaryMatrix &rhs) const {
        if (rhs.dim_ != dim_) {
            throw std::invalid_argument("matrix dimension mismatch");
        }
        UnitaryMatrix out(num_qubits_);
        for (size_t j = 0; j < dim_; j++) {
            for (size_t k = 0; k < dim_; k++) {
                Complex b = rhs(k, j);
                if (b == Complex(0)) {
                    continue;
                }
                const Complex *a = data_.data() + k * dim_;
                Complex *o = out.data_.data() + j * dim_;
                for (size_t i = 0; i < dim_; i++) {
                    o[i] += a[i] * b;
                }
            }
        }
        return out;
    }

    std::vector<Complex> apply(std::span<const Complex> v) const {
        if (v.size() != dim_) {
            throw std::invalid_argument("vector dimension mismatch");
        }
        std::vector<Complex> out(dim_);
        for (size_t k = 0; k < dim_; k++) {
            if (v[k] == Complex(0)) {
                continue;
            }
            const Complex *a = data_.data() + k * dim_;
            for (size_t i = 0; i < dim_; i++) {
                out[i] += a[i] * v[k];
            }
        }
        return out;
    }

    QuantumState operator*(const QuantumState &state) const {
        return QuantumState(num_qubits_, apply(state.amplitudes()));
    }

    UnitaryMatrix adjoint() const {
        UnitaryMatrix out(num_qubits_);
        for (size_t r = 0; r < dim_; r++) {
            for (size_t c = 0; c < dim_; c++) {
                out(c, r) = std::conj((*this)(r, c));
            }
        }
        return out;
    }

    UnitaryMatrix scaled(Complex s) const {
        UnitaryMatrix out = *this;
        for (auto &x : out.data_) {
            x *= s;
        }
        return out;
    }

    /// Largest elementwise deviation of U^dagger U from the identity.
    double unitarity_error() const {
        double worst = 0;
        for (size_t i = 0; i < dim_; i++) {
            for (size_t j = 0; j < dim_; j++) {
                Complex s = 0;
                for (size_t k = 0; k < dim_; k++) {
                    s += std::conj((*this)(k, i)) * (*this)(k, j);
                }
                worst = std::max(worst, std::abs(s - Complex(i == j ? 1.0 : 0.0)));
            }
        }
        return worst;
    }

    bool is_unitary(double tol = 1e-8) const { return unitarity_error() <= tol; }

    double max_abs_diff(const UnitaryMatrix &other) const {
        if (other.dim_ != dim_) {
            throw std::invalid_argument("matrix dimension mismatch");
        }
        double worst = 0;
        for (size_t k = 0; k < data_.size(); k++) {
            worst = std::max(worst, std::abs(data_[k] - other.data_[k]));
        }
        return worst;
    }

    friend bool operator==(const UnitaryMatrix &, const UnitaryMatrix &) = default;

   private:
    explicit UnitaryMatrix(int num_qubits)
        : num_qubits_(num_qubits), dim_(size_t{1} << num_qubits), data_(dim_ * dim_) {}

    int num_qubits_ = 0;
    size_t dim_ = 0;
    std::vector<Complex> data_;
};

/// Returns the state after `gate` acts on it. Norm is preserved.
inline QuantumState apply_gate(const QuantumState &state, const GateSpec &gate) {
    validate_gate(gate, state.num_qubits());
    std::vector<Complex> amps(state.amplitudes().begin(), state.amplitudes().end());
    apply_gate_inplace(amps, state.num_qubits(), gate);
    return QuantumState(state.num_qubits(), std::move(amps));
}

/// The 2^a x 2^a matrix of a gate on its own a qubits, row-major. The first
/// listed qubit is the most significant bit of the local index.
inline std::vector<Complex> local_gate_matrix(const GateSpec &gate) {
    const size_t n = size_t{1} << gate_arity(gate.kind);
    std::vector<Complex> m(n * n);
    auto at = [&](size_t r, size_t c) -> Complex & { return m[r * n + c]; };
    for (size_t k = 0; k < n; k++) {
        at(k, k) = 1;
    }
    const double r = 1.0 / std::numbers::sqrt2;
    auto swap_rows = [&](size_t a, size_t b) {
        at(a, a) = 0;
        at(b, b) = 0;
        at(a, b) = 1;
        at(b, a) = 1;
    };
    switch (gate.kind) {
        case GateKind::X: swap_rows(0, 1); break;
        case GateKind::Y:
            at(0, 0) = at(1, 1) = 0;
            at(0, 1) = Complex(0, -1);
            at(1, 0) = Complex(0, 1);
            break;
        case GateKind::Z: at(1, 1) = -1; break;
        case GateKind::H:
            at(0, 0) = at(0, 1) = at(1, 0) = r;
            at(1, 1) = -r;
            break;
        case GateKind::T: at(1, 1) = std::polar(1.0, std::numbers::pi / 4); break;
        case GateKind::P: at(1, 1) = std::polar(1.0, gate.theta->radians()); break;
        case GateKind::CNOT: swap_rows(2, 3); break;
        case GateKind::CZ: at(3, 3) = -1; break;
        case GateKind::CP: at(3, 3) = std::polar(1.0, gate.theta->radians()); break;
        case GateKind::SWAP: swap_rows(1, 2); break;
        case GateKind::CSWAP: swap_rows(5, 6); break;
        case GateKind::TOFFOLI: swap_rows(6, 7); break;
    }
    return m;
}

/// Full-register matrix of a gate, built by tensor embedding of its local
/// matrix (identity on the untouched qubits).
inline UnitaryMatrix gate_unitary(const GateSpec &gate, int num_qubits) {
    detail::check_num_qubits(num_qubits);
    validate_gate(gate, num_qubits);
    const auto local = local_gate_matrix(gate);
    const int arity = gate_arity(gate.kind);
    const size_t local_dim = size_t{1} << arity;
    size_t gate_bits = 0;
    for (int q : gate.qubits) {
        gate_bits |= detail::qubit_mask(num_qubits, q);
    }
    auto local_index = [&](size_t full) {
        size_t out = 0;
        for (int q : gate.qubits) {
            out = (out << 1) | ((full & detail::qubit_mask(num_qubits, q)) ? 1 : 0);
        }
        return out;
    };
    UnitaryMatrix u = UnitaryMatrix::zeros(num_qubits);
    for (size_t row = 0; row < u.dim(); row++) {
        for (size_t col = 0; col < u.dim(); col++) {
            if ((row & ~gate_bits) != (col & ~gate_bits)) {
                continue;
            }
            u(row, col) = local[local_index(row) * local_dim + local_index(col)];
        }
    }
    return u;
}

/// U = O(L) ... O(2) O(1) by dense matrix products; gates[0] acts first.
inline UnitaryMatrix compose(const Circuit &circuit) {
    circuit.validate();
    UnitaryMatrix u = UnitaryMatrix::identity(circuit.num_qubits);
    for (const auto &g : circuit.gates) {
        u = gate_unitary(g, circuit.num_qubits) * u;
    }
    return u;
}

inline DiscreteDistribution measurement_distribution(const QuantumState &state) {
    std::vector<double> probs(state.dim());
    for (size_t k = 0; k < state.dim(); k++) {
        probs[k] = std::norm(state[k]);
    }
    return DiscreteDistribution(std::move(probs));
}

}  // namespace qflow
