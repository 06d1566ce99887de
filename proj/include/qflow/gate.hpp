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

#pragma once

#include <array>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qflow {

enum class GateKind { X, Y, Z, H, T, P, CNOT, CZ, CP, SWAP, CSWAP, TOFFOLI };

inline constexpr std::array<GateKind, 12> kAllGateKinds = {
    GateKind::X,  GateKind::Y,  GateKind::Z,    GateKind::H,     GateKind::T,    GateKind::P,
    GateKind::CNOT, GateKind::CZ, GateKind::CP, GateKind::SWAP, GateKind::CSWAP, GateKind::TOFFOLI};

inline std::string_view gate_kind_name(GateKind kind) {
    switch (kind) {
        case GateKind::X: return "X";
        case GateKind::Y: return "Y";
        case GateKind::Z: return "Z";
        case GateKind::H: return "H";
        case GateKind::T: return "T";
        case GateKind::P: return "P";
        case GateKind::CNOT: return "CNOT";
        case GateKind::CZ: return "CZ";
        case GateKind::CP: return "CP";
        case GateKind::SWAP: return "SWAP";
        case GateKind::CSWAP: return "CSWAP";
        case GateKind::TOFFOLI: return "TOFFOLI";
    }
    throw std::logic_error("unreachable gate kind");
}

inline GateKind parse_gate_kind(std::string_view name) {
    for (GateKind kind : kAllGateKinds) {
        if (gate_kind_name(kind) == name) {
            return kind;
        }
    }
    throw std::invalid_argument("unknown gate kind '" + std::string(name) + "'");
}

/// Number of qubits the gate acts on.
inline constexpr int gate_arity(GateKind kind) {
    switch (kind) {
        case GateKind::X:
        case GateKind::Y:
        case GateKind::Z:
        case GateKind::H:
        case GateKind::T:
        case GateKind::P:
            return 1;
        case GateKind::CNOT:
        case GateKind::CZ:
        case GateKind::CP:
        case GateKind::SWAP:
            return 2;
        case GateKind::CSWAP:
        case GateKind::TOFFOLI:
            return 3;
    }
    return 0;
}

inline constexpr bool gate_has_angle(GateKind kind) {
    return kind == GateKind::P || kind == GateKind::CP;
}

/// An angle stored as an exact rational multiple of pi, kept in lowest terms
/// with a positive denominator.
class PhaseAngle {
   public:
    constexpr PhaseAngle() = default;
    PhaseAngle(std::int64_t num, std::int64_t den) : num_(num), den_(den) {
        if (den_ == 0) {
            throw std::invalid_argument("phase angle denominator must be nonzero");
        }
        if (den_ < 0) {
            num_ = -num_;
            den_ = -den_;
        }
        std::int64_t g = std::gcd(num_, den_);
        if (g > 1) {
            num_ /= g;
            den_ /= g;
        }
    }

    constexpr std::int64_t num() const { return num_; }
    constexpr std::int64_t den() const { return den_; }
    double radians() const { return std::numbers::pi * static_cast<double>(num_) / static_cast<double>(den_); }

    std::string str() const {
        if (den_ == 1) {
            return std::to_string(num_) + "pi";
        }
        return std::to_string(num_) + "pi/" + std::to_string(den_);
    }

    friend bool operator==(const PhaseAngle &, const PhaseAngle &) = default;

   private:
    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

/// One elementary gate instance. Qubit order per kind:
///   CNOT, CP  -> {control, target}
///   CZ, SWAP  -> {a, b}
///   CSWAP     -> {control, a, b}
///   TOFFOLI   -> {control, control, target}
struct GateSpec {
    GateKind kind = GateKind::X;
    std::vector<int> qubits;
    std::optional<PhaseAngle> theta;

    friend bool operator==(const GateSpec &, const GateSpec &) = default;

    std::string str() const {
        std::string out(gate_kind_name(kind));
        if (theta) {
            out += "(" + theta->str() + ")";
        }
        out += "[";
        for (size_t k = 0; k < qubits.size(); k++) {
            if (k) {
                out += ",";
            }
            out += std::to_string(qubits[k]);
        }
        out += "]";
        return out;
    }
};

inline GateSpec make_gate(GateKind kind, std::vector<int> qubits, std::optional<PhaseAngle> theta = std::nullopt) {
    return GateSpec{kind, std::move(qubits), theta};
}

/// Throws std::invalid_argument if the gate is malformed or does not fit a
/// register of `num_qubits` qubits.
inline void validate_gate(const GateSpec &gate, int num_qubits) {
    const int arity = gate_arity(gate.kind);
    if (static_cast<int>(gate.qubits.size()) != arity) {
        throw std::invalid_argument(
            "gate " + std::string(gate_kind_name(gate.kind)) + " expects " + std::to_string(arity) + " qubit(s), got " +
            std::to_string(gate.qubits.size()));
    }
    if (gate_has_angle(gate.kind) != gate.theta.has_value()) {
        throw std::invalid_argument(
            "gate " + std::string(gate_kind_name(gate.kind)) +
            (gate.theta ? " does not take an angle" : " requires an angle"));
    }
    for (size_t a = 0; a < gate.qubits.size(); a++) {
        int q = gate.qubits[a];
        if (q < 0 || q >= num_qubits) {
            throw std::out_of_range(
                "qubit index " + std::to_string(q) + " out of range for " + std::to_string(num_qubits) + " qubits");
        }
        for (size_t b = 0; b < a; b++) {
            if (gate.qubits[b] == q) {
                throw std::invalid_argument("repeated qubit index " + std::to_string(q) + " in " + gate.str());
            }
        }
    }
}

/// Ordered gate list; gates[0] is applied first.
struct Circuit {
    int num_qubits = 1;
    std::vector<GateSpec> gates;

    friend bool operator==(const Circuit &, const Circuit &) = default;

    void validate() const {
        if (num_qubits < 1) {
            throw std::invalid_argument("circuit needs at least one qubit");
        }
        for (const auto &g : gates) {
            validate_gate(g, num_qubits);
        }
    }
};

/// The gate sequence implementing the adjoint: reversed order with each gate
/// replaced by its inverse. Only T and the phase gates are not self-inverse.
inline GateSpec inverse_gate(const GateSpec &gate) {
    switch (gate.kind) {
        case GateKind::T:
            return GateSpec{GateKind::P, gate.qubits, PhaseAngle(-1, 4)};
        case GateKind::P:
        case GateKind::CP:
            return GateSpec{gate.kind, gate.qubits, PhaseAngle(-gate.theta->num(), gate.theta->den())};
        default:
            return gate;
    }
}

inline Circuit reverse_conjugate(const Circuit &circuit) {
    Circuit out{circuit.num_qubits, {}};
    out.gates.reserve(circuit.gates.size());
    for (auto it = circuit.gates.rbegin(); it != circuit.gates.rend(); ++it) {
        out.gates.push_back(inverse_gate(*it));
    }
    return out;
}

}  // namespace qflow
