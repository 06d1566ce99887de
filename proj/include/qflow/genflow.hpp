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


// Generative use of a learned flow: draw a latent state shaped like the
// target, pull it back through U^dagger, decode it to bin centroids, and keep
// it only if the forward pass maps it close to the target again.

#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "qflow/anomaly.hpp"
#include "qflow/dataenc.hpp"
#include "qflow/lossdist.hpp"
#include "qflow/qstate.hpp"
#include "qflow/random.hpp"

namespace qflow {

/// Magnitudes sqrt(Y_k) with independent uniform phases. `zero_phase`
/// returns sqrt(Y) itself.
inline QuantumState sample_latent(const DiscreteDistribution &target, Rng &rng, bool zero_phase = false) {
    QuantumState base = QuantumState::from_distribution(target);
    if (zero_phase) {
        return base;
    }
    std::vector<Complex> amps(base.amplitudes().begin(), base.amplitudes().end());
    for (auto &a : amps) {
        a *= std::polar(1.0, 2 * std::numbers::pi * rng.uniform());
    }
    return QuantumState(base.num_qubits(), std::move(amps));
}

inline QuantumState invert_flow(const UnitaryMatrix &u, const QuantumState &latent) {
    if (u.dim() != latent.dim()) {
        throw std::invalid_argument("flow and state dimensions differ");
    }
    return u.adjoint() * latent;
}

/// Per feature, the bin holding the most probability mass (ties to the lower
/// bin) becomes that bin's centroid.
inline Row decode_sample(const Encoder &enc, const QuantumState &candidate) {
    if (candidate.dim() != enc.state_dim()) {
        throw std::invalid_argument("candidate dimension does not match the encoder");
    }
    const size_t k = static_cast<size_t>(enc.k);
    Row out(enc.num_features());
    for (size_t f = 0; f < enc.num_features(); f++) {
        size_t best = 0;
        double best_mass = -1, total = 0;
        for (size_t b = 0; b < k; b++) {
            double m = std::norm(candidate[f * k + b]);
            total += m;
            if (m > best_mass) {
                best_mass = m;
                best = b;
            }
        }
        if (!(total > 0)) {
            throw std::domain_error("feature " + std::to_string(f) + " carries no amplitude; candidate is undecodable");
        }
        out[f] = enc.centroids[f][best];
    }
    return out;
}

struct GenerateOptions {
    LossKind loss = LossKind::KL;
    /// 0 means max(1000, 100 * count).
    size_t max_attempts = 0;
    /// Acceptance rates under this raise `below_floor`.
    double acceptance_floor = 0.01;
};

struct GeneratedSample {
    Row values;
    double score;
};

struct GenerateResult {
    std::vector<GeneratedSample> samples;
    size_t attempts = 0;
    size_t undecodable = 0;
    double acceptance_rate = 0;
    bool below_floor = false;
    bool complete() const { return !below_floor; }
};

inline GenerateResult generate(
    const UnitaryMatrix &u, const Encoder &enc, const DiscreteDistribution &target, size_t count, double tau, Rng &rng,
    const GenerateOptions &opts = {}) {
    if (!(tau >= 0)) {
        throw std::invalid_argument("tau must be non-negative");
    }
    const size_t cap = opts.max_attempts ? opts.max_attempts : std::max<size_t>(1000, 100 * count);
    GenerateResult res;
    while (res.samples.size() < count && res.attempts < cap) {
        res.attempts++;
        QuantumState candidate = invert_flow(u, sample_latent(target, rng));
        Row row;
        try {
            row = decode_sample(enc, candidate);
        } catch (const std::domain_error &) {
            res.undecodable++;
            continue;
        }
        double score = flow_score(u, enc, row, target, opts.loss);
        if (score <= tau) {
            res.samples.push_back({std::move(row), score});
        }
    }
    res.acceptance_rate = res.attempts ? static_cast<double>(res.samples.size()) / static_cast<double>(res.attempts) : 1.0;
    res.below_floor = res.samples.size() < count || res.acceptance_rate < opts.acceptance_floor;
    return res;
}

/// Linear-interpolated quantile, q in [0, 1].
inline double quantile(std::vector<double> values, double q) {
    if (values.empty()) {
        throw std::invalid_argument("quantile of an empty set");
    }
    std::sort(values.begin(), values.end());
    double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(values.size() - 1);
    size_t lo = static_cast<size_t>(std::floor(pos));
    size_t hi = std::min(lo + 1, values.size() - 1);
    if (std::isinf(values[hi])) {
        return pos == static_cast<double>(lo) ? values[lo] : values[hi];
    }
    return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

/// Default acceptance threshold: the 90th percentile of training scores.
inline double default_tau(const UnitaryMatrix &u, const Encoder &enc, const std::vector<Row> &train,
                          const DiscreteDistribution &target, LossKind kind) {
    return quantile(flow_scores(u, enc, train, target, kind), 0.9);
}

}  // namespace qflow
