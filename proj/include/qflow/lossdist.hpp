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

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qflow/distribution.hpp"
#include "qflow/qstate.hpp"

namespace qflow {

/// Loss value used for a distribution that puts mass where the reference has
/// none. Compares above every finite loss.
inline constexpr double kInfiniteLoss = std::numeric_limits<double>::infinity();

enum class LossKind { KL, COS };

inline std::string_view loss_kind_name(LossKind kind) { return kind == LossKind::KL ? "kl" : "cos"; }

inline LossKind parse_loss_kind(std::string_view name) {
    if (name == "kl" || name == "KL") {
        return LossKind::KL;
    }
    if (name == "cos" || name == "COS") {
        return LossKind::COS;
    }
    throw std::invalid_argument("unknown loss kind '" + std::string(name) + "' (expected kl or cos)");
}

/// C(n, k) p^k (1-p)^(n-k) for k = 0..n with n = num_states - 1.
inline DiscreteDistribution binomial_target(size_t num_states, double p = 0.5) {
    if (num_states < 2) {
        throw std::invalid_argument("binomial target needs at least 2 states");
    }
    if (!(p > 0 && p < 1)) {
        throw std::invalid_argument("binomial probability must lie in (0, 1)");
    }
    const size_t n = num_states - 1;
    std::vector<double> probs(num_states);
    if (n <= 60) {
        // Coefficients are exact in 64-bit integers up to n = 60.
        std::uint64_t c = 1;
        for (size_t k = 0; k <= n; k++) {
            probs[k] = static_cast<double>(c) * std::pow(p, static_cast<double>(k)) *
                       std::pow(1 - p, static_cast<double>(n - k));
            if (k < n) {
                // c * (n - k) / (k + 1) stays exact: C(n, k+1) is integral and the
                // product fits in 128 bits.
                c = static_cast<std::uint64_t>(static_cast<unsigned __int128>(c) * (n - k) / (k + 1));
            }
        }
        return DiscreteDistribution(std::move(probs));
    }
    // Log domain, with coefficients mirrored so p = 0.5 stays exactly symmetric.
    std::vector<double> log_choose(num_states);
    const double lgn = std::lgamma(static_cast<double>(n) + 1);
    for (size_t k = 0; k <= n / 2; k++) {
        log_choose[k] = lgn - std::lgamma(static_cast<double>(k) + 1) - std::lgamma(static_cast<double>(n - k) + 1);
        log_choose[n - k] = log_choose[k];
    }
    const double lp = std::log(p);
    const double lq = std::log1p(-p);
    for (size_t k = 0; k <= n; k++) {
        probs[k] = std::exp(log_choose[k] + (static_cast<double>(k) * lp + static_cast<double>(n - k) * lq));
    }
    return DiscreteDistribution::from_weights(std::move(probs));
}

/// sum_x p(x) ln(p(x) / q(x)), natural log, with 0 ln(0/q) = 0. Returns
/// kInfiniteLoss when p has mass where q has none.
inline double kl_divergence(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size()) {
        throw std::invalid_argument("KL divergence needs equal-length distributions");
    }
    double sum = 0;
    for (size_t k = 0; k < p.size(); k++) {
        if (p[k] <= 0) {
            continue;
        }
        if (q[k] <= 0) {
            return kInfiniteLoss;
        }
        sum += p[k] * std::log(p[k] / q[k]);
    }
    return sum;
}

inline double kl_divergence(const DiscreteDistribution &p, const DiscreteDistribution &q) {
    return kl_divergence(p.probs(), q.probs());
}

/// 1 - a.b for unit vectors a and b.
inline double cosine_dissimilarity(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("cosine dissimilarity needs equal-length vectors");
    }
    double aa = 0, bb = 0, ab = 0;
    for (size_t k = 0; k < a.size(); k++) {
        aa += a[k] * a[k];
        bb += b[k] * b[k];
        ab += a[k] * b[k];
    }
    if (std::abs(std::sqrt(aa) - 1) > 1e-6 || std::abs(std::sqrt(bb) - 1) > 1e-6) {
        throw std::invalid_argument("cosine dissimilarity needs unit vectors");
    }
    return 1 - ab;
}

/// Loss of an already transformed state `psi` = U X against target Y.
///   KL:  D_KL(|psi|^2 || Y)
///   COS: 1 - sum_k |psi_k| sqrt(Y_k)
/// No validation; callers guarantee matching dimensions.
inline double loss_of_amplitudes(std::span<const Complex> psi, const DiscreteDistribution &target, LossKind kind) {
    double sum = 0;
    if (kind == LossKind::KL) {
        for (size_t k = 0; k < psi.size(); k++) {
            double p = std::norm(psi[k]);
            if (p <= 0) {
                continue;
            }
            if (target[k] <= 0) {
                return kInfiniteLoss;
            }
            sum += p * std::log(p / target[k]);
        }
        return sum;
    }
    for (size_t k = 0; k < psi.size(); k++) {
        sum += std::abs(psi[k]) * std::sqrt(target[k]);
    }
    return 1 - sum;
}

inline double flow_loss(const UnitaryMatrix &u, const QuantumState &x, const DiscreteDistribution &target, LossKind kind) {
    if (u.dim() != x.dim() || target.size() != x.dim()) {
        throw std::invalid_argument("flow loss dimension mismatch");
    }
    return loss_of_amplitudes(u.apply(x.amplitudes()), target, kind);
}

}  // namespace qflow
