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


// Shared generators for the property tests.

#pragma once

#include <cmath>
#include <complex>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "qflow/qflow.hpp"

#ifndef QFLOW_FIXTURE_DIR
#define QFLOW_FIXTURE_DIR "tests/fixtures"
#endif

namespace qflow::testing {

inline QuantumState random_state(int num_qubits, Rng &rng) {
    std::vector<Complex> amps(size_t{1} << num_qubits);
    for (auto &a : amps) {
        a = {rng.normal(), rng.normal()};
    }
    return QuantumState::normalized(num_qubits, std::move(amps));
}

inline DiscreteDistribution random_distribution(size_t n, Rng &rng, double zero_prob = 0.0) {
    std::vector<double> w(n);
    for (auto &x : w) {
        x = rng.uniform() < zero_prob ? 0.0 : rng.uniform() + 1e-3;
    }
    if (std::all_of(w.begin(), w.end(), [](double x) { return x == 0; })) {
        w[0] = 1;
    }
    return DiscreteDistribution::from_weights(std::move(w));
}

/// Any gate kind at random distinct qubits; angles k*pi/8.
inline GateSpec random_gate(int num_qubits, Rng &rng) {
    for (;;) {
        GateKind kind = kAllGateKinds[rng.below(kAllGateKinds.size())];
        int arity = gate_arity(kind);
        if (arity > num_qubits) {
            continue;
        }
        std::vector<int> qs(num_qubits);
        for (int i = 0; i < num_qubits; i++) {
            qs[i] = i;
        }
        rng.shuffle(std::span<int>(qs));
        qs.resize(arity);
        std::optional<PhaseAngle> theta;
        if (gate_has_angle(kind)) {
            theta = PhaseAngle(static_cast<std::int64_t>(rng.below(16)) - 8, 8);
        }
        return GateSpec{kind, qs, theta};
    }
}

inline Circuit random_circuit(int num_qubits, size_t length, Rng &rng) {
    Circuit c{num_qubits, {}};
    for (size_t i = 0; i < length; i++) {
        c.gates.push_back(random_gate(num_qubits, rng));
    }
    return c;
}

inline std::string read_fixture(const std::string &name) {
    std::ifstream in(std::string(QFLOW_FIXTURE_DIR) + "/" + name);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// min over alpha of max |a - e^{i alpha} b|, with alpha taken from the
/// largest entry of b.
inline double phase_aligned_diff(const UnitaryMatrix &a, const UnitaryMatrix &b) {
    size_t best = 0;
    auto bd = b.data();
    auto ad = a.data();
    for (size_t i = 1; i < bd.size(); i++) {
        if (std::abs(bd[i]) > std::abs(bd[best])) {
            best = i;
        }
    }
    Complex phase = ad[best] / bd[best];
    phase /= std::abs(phase);
    double m = 0;
    for (size_t i = 0; i < ad.size(); i++) {
        m = std::max(m, std::abs(ad[i] - phase * bd[i]));
    }
    return m;
}

}  // namespace qflow::testing
