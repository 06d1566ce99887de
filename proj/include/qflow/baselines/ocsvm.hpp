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

// One-class SVM with an RBF kernel. The dual
//
//     min 1/2 a^T K a   s.t.  sum a = 1,  0 <= a_i <= 1 / (nu l)
//
// is solved by SMO-style pairwise updates on the maximal violating pair.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "qflow/baselines/standardize.hpp"
#include "qflow/dataenc.hpp"

namespace qflow::baselines {

inline double rbf_kernel(const Row &a, const Row &b, double gamma) { return std::exp(-gamma * squared_distance(a, b)); }

struct OcSvmDualSolution {
    std::vector<double> alphas;
    double rho = 0;
    size_t iterations = 0;
    bool converged = false;
};

/// 1/2 a^T K a for a row-major l x l kernel matrix.
inline double ocsvm_dual_objective(const std::vector<double> &kernel, const std::vector<double> &alphas) {
    const size_t l = alphas.size();
    double s = 0;
    for (size_t i = 0; i < l; i++) {
        for (size_t j = 0; j < l; j++) {
            s += alphas[i] * alphas[j] * kernel[i * l + j];
        }
    }
    return s / 2;
}

inline OcSvmDualSolution ocsvm_solve_dual(
    const std::vector<double> &kernel, size_t l, double nu, double tolerance = 1e-6, size_t max_iterations = 1000000) {
    if (!(nu > 0 && nu <= 1)) {
        throw std::invalid_argument("nu must lie in (0, 1]");
    }
    if (l == 0 || kernel.size() != l * l) {
        throw std::invalid_argument("kernel matrix size mismatch");
    }
    const double upper = 1.0 / (nu * static_cast<double>(l));
    auto K = [&](size_t i, size_t j) { return kernel[i * l + j]; };

    OcSvmDualSolution sol;
    auto &a = sol.alphas;
    a.assign(l, 0);
    size_t full = std::min(l, static_cast<size_t>(std::floor(nu * static_cast<double>(l))));
    for (size_t i = 0; i < full; i++) {
        a[i] = upper;
    }
    if (full < l) {
        a[full] = std::max(0.0, 1.0 - static_cast<double>(full) * upper);
    }

    std::vector<double> grad(l, 0);
    for (size_t i = 0; i < l; i++) {
        for (size_t j = 0; j < l; j++) {
            grad[i] += K(i, j) * a[j];
        }
    }

    for (; sol.iterations < max_iterations; sol.iterations++) {
        // i gains mass (needs room below the bound), j gives it up.
        size_t up = l, down = l;
        for (size_t t = 0; t < l; t++) {
            if (a[t] < upper && (up == l || grad[t] < grad[up])) {
                up = t;
            }
            if (a[t] > 0 && (down == l || grad[t] > grad[down])) {
                down = t;
            }
        }
        if (up == l || down == l || grad[down] - grad[up] < tolerance) {
            sol.converged = true;
            break;
        }
        double eta = K(up, up) + K(down, down) - 2 * K(up, down);
        if (eta <= 0) {
            eta = 1e-12;
        }
        double delta = (grad[down] - grad[up]) / eta;
        bool hit_up = false, hit_down = false;
        if (delta >= upper - a[up]) {
            delta = upper - a[up];
            hit_up = true;
        }
        if (delta >= a[down]) {
            delta = a[down];
            hit_down = true;
            hit_up = hit_up && delta == upper - a[up];
        }
        a[up] = hit_up ? upper : a[up] + delta;
        a[down] = hit_down ? 0.0 : a[down] - delta;
        for (size_t t = 0; t < l; t++) {
            grad[t] += delta * (K(t, up) - K(t, down));
        }
    }

    // rho: the common gradient value on free vectors, or the middle of the
    // KKT interval when none are free.
    double sum = 0;
    size_t free = 0;
    double lower_bound = -std::numeric_limits<double>::infinity();
    double upper_bound = std::numeric_limits<double>::infinity();
    for (size_t t = 0; t < l; t++) {
        if (a[t] > 0 && a[t] < upper) {
            sum += grad[t];
            free++;
        } else if (a[t] >= upper) {
            lower_bound = std::max(lower_bound, grad[t]);
        } else {
            upper_bound = std::min(upper_bound, grad[t]);
        }
    }
    if (free > 0) {
        sol.rho = sum / static_cast<double>(free);
    } else if (std::isinf(lower_bound)) {
        sol.rho = upper_bound;
    } else if (std::isinf(upper_bound)) {
        sol.rho = lower_bound;
    } else {
        sol.rho = (lower_bound + upper_bound) / 2;
    }
    return sol;
}

struct OcSvmModel {
    std::vector<Row> support_vectors;
    std::vector<double> alphas;
    double rho = 0;
    double nu = 0;
    double gamma = 0;
    bool converged = false;
    size_t iterations = 0;
};

/// 1 / (num_features * variance of all entries), the usual "scale" width.
inline double default_rbf_gamma(const std::vector<Row> &rows) {
    double sum = 0, sq = 0;
    size_t count = 0;
    for (const auto &r : rows) {
        for (double v : r) {
            sum += v;
            sq += v * v;
            count++;
        }
    }
    const double nf = static_cast<double>(rows.front().size());
    const double mean = sum / static_cast<double>(count);
    const double var = sq / static_cast<double>(count) - mean * mean;
    return var > 0 ? 1.0 / (nf * var) : 1.0 / nf;
}

/// Fits the dual. When the iteration cap is hit the best iterate is kept and
/// `converged` is false.
inline OcSvmModel ocsvm_fit(const std::vector<Row> &rows, double nu, std::optional<double> gamma = std::nullopt) {
    if (rows.empty()) {
        throw std::invalid_argument("one-class SVM needs at least one row");
    }
    OcSvmModel m;
    m.nu = nu;
    m.gamma = gamma.value_or(default_rbf_gamma(rows));
    if (!(m.gamma > 0)) {
        throw std::invalid_argument("RBF gamma must be positive");
    }
    const size_t l = rows.size();
    std::vector<double> kernel(l * l);
    for (size_t i = 0; i < l; i++) {
        for (size_t j = 0; j <= i; j++) {
            kernel[i * l + j] = kernel[j * l + i] = rbf_kernel(rows[i], rows[j], m.gamma);
        }
    }
    auto sol = ocsvm_solve_dual(kernel, l, nu);
    m.rho = sol.rho;
    m.converged = sol.converged;
    m.iterations = sol.iterations;
    for (size_t i = 0; i < l; i++) {
        if (sol.alphas[i] > 0) {
            m.support_vectors.push_back(rows[i]);
            m.alphas.push_back(sol.alphas[i]);
        }
    }
    return m;
}

inline double ocsvm_decision(const OcSvmModel &model, const Row &row) {
    double s = 0;
    for (size_t i = 0; i < model.alphas.size(); i++) {
        s += model.alphas[i] * rbf_kernel(model.support_vectors[i], row, model.gamma);
    }
    return s - model.rho;
}

/// rho - sum_i a_i k(x_i, x): positive outside the learned region.
inline double ocsvm_score(const OcSvmModel &model, const Row &row) { return -ocsvm_decision(model, row); }

}  // namespace qflow::baselines
