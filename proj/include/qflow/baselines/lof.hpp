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

// Local outlier factor in novelty mode: neighbourhoods of a query are drawn
// from the training rows only.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

#include "qflow/baselines/standardize.hpp"
#include "qflow/dataenc.hpp"

namespace qflow::baselines {

struct LofModel {
    std::vector<Row> train;
    size_t k = 0;
    /// Distance from each training row to its k-th nearest other row.
    std::vector<double> k_distance;
    /// Local reachability density of each training row; may be +inf.
    std::vector<double> lrd;
};

namespace detail {

/// The k nearest training rows to `query` by (distance, index), skipping
/// index `exclude`.
inline std::vector<std::pair<double, size_t>> nearest(
    const std::vector<Row> &train, const Row &query, size_t k, size_t exclude) {
    std::vector<std::pair<double, size_t>> d;
    d.reserve(train.size());
    for (size_t i = 0; i < train.size(); i++) {
        if (i != exclude) {
            d.emplace_back(euclidean_distance(query, train[i]), i);
        }
    }
    std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k), d.end());
    d.resize(k);
    return d;
}

inline double lrd_from(const std::vector<std::pair<double, size_t>> &nbrs, const std::vector<double> &k_distance) {
    double sum = 0;
    for (const auto &[dist, o] : nbrs) {
        sum += std::max(k_distance[o], dist);
    }
    double mean = sum / static_cast<double>(nbrs.size());
    return mean > 0 ? 1 / mean : std::numeric_limits<double>::infinity();
}

/// lrd(o) / lrd(p) with infinite densities: inf/inf = 1, x/inf = 0.
inline double density_ratio(double lrd_o, double lrd_p) {
    bool inf_o = std::isinf(lrd_o);
    bool inf_p = std::isinf(lrd_p);
    if (inf_o && inf_p) {
        return 1;
    }
    if (inf_p) {
        return 0;
    }
    return lrd_o / lrd_p;
}

}  // namespace detail

/// k is capped at n - 1.
inline LofModel lof_fit(const std::vector<Row> &rows, size_t k) {
    if (rows.size() < 2) {
        throw std::invalid_argument("LOF needs at least two training rows");
    }
    if (k < 1) {
        throw std::invalid_argument("LOF needs k >= 1");
    }
    LofModel m;
    m.train = rows;
    m.k = std::min(k, rows.size() - 1);
    const size_t n = rows.size();
    std::vector<std::vector<std::pair<double, size_t>>> nbrs(n);
    m.k_distance.resize(n);
    for (size_t i = 0; i < n; i++) {
        nbrs[i] = detail::nearest(rows, rows[i], m.k, i);
        m.k_distance[i] = nbrs[i].back().first;
    }
    m.lrd.resize(n);
    for (size_t i = 0; i < n; i++) {
        m.lrd[i] = detail::lrd_from(nbrs[i], m.k_distance);
    }
    return m;
}

inline double lof_score(const LofModel &model, const Row &row) {
    auto nbrs = detail::nearest(model.train, row, model.k, model.train.size());
    double lrd_p = detail::lrd_from(nbrs, model.k_distance);
    double sum = 0;
    for (const auto &[dist, o] : nbrs) {
        sum += detail::density_ratio(model.lrd[o], lrd_p);
    }
    return sum / static_cast<double>(nbrs.size());
}

}  // namespace qflow::baselines
