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


// Swap-test scoring, simulated by sampling its ancilla outcome directly: the
// ancilla reads 1 with probability 1/2 - |<psi|phi>|^2 / 2.
//
// |<psi|phi>|^2 is the squared complex overlap. It matches the magnitude
// cosine of the COS loss only when psi is real and nonnegative.

#pragma once

#include <algorithm>
#include <complex>
#include <stdexcept>

#include "qflow/dataenc.hpp"
#include "qflow/lossdist.hpp"
#include "qflow/qstate.hpp"
#include "qflow/random.hpp"

namespace qflow {

inline double exact_overlap(const QuantumState &psi, const QuantumState &phi) {
    if (psi.dim() != phi.dim()) {
        throw std::invalid_argument("overlap of states with different dimensions");
    }
    Complex ip = 0;
    for (size_t k = 0; k < psi.dim(); k++) {
        ip += std::conj(psi[k]) * phi[k];
    }
    return std::clamp(std::norm(ip), 0.0, 1.0);
}

inline double swap_test_probability(double overlap) { return 0.5 - 0.5 * overlap; }

struct SwapTestEstimate {
    double p_hat;
    double overlap_hat;
};

inline SwapTestEstimate swap_test_estimate(const QuantumState &psi, const QuantumState &phi, size_t shots, Rng &rng) {
    if (shots < 1) {
        throw std::invalid_argument("swap test needs at least one shot");
    }
    const double p = swap_test_probability(exact_overlap(psi, phi));
    size_t ones = 0;
    for (size_t s = 0; s < shots; s++) {
        ones += rng.bernoulli(p) ? 1 : 0;
    }
    double p_hat = static_cast<double>(ones) / static_cast<double>(shots);
    return {p_hat, std::clamp(1 - 2 * p_hat, 0.0, 1.0)};
}

/// 1 - estimated overlap between U * encode(row) and sqrt(Y).
inline double swap_test_score(
    const UnitaryMatrix &u, const Encoder &enc, const Row &row, const DiscreteDistribution &target, size_t shots,
    Rng &rng) {
    QuantumState phi = QuantumState::from_distribution(target);
    QuantumState psi = u * encode_sample(enc, row);
    return 1 - swap_test_estimate(psi, phi, shots, rng).overlap_hat;
}

/// Noise-free limit of swap_test_score.
inline double exact_swap_score(
    const UnitaryMatrix &u, const Encoder &enc, const Row &row, const DiscreteDistribution &target) {
    return 1 - exact_overlap(u * encode_sample(enc, row), QuantumState::from_distribution(target));
}

}  // namespace qflow
