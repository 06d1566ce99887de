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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "qflow/dataenc.hpp"
#include "qflow/random.hpp"

namespace qflow::baselines {

inline constexpr double kEulerGamma = 0.5772156649;

/// Average path length of an unsuccessful binary-search-tree lookup among m
/// points: c(m) = 2 H(m-1) - 2 (m-1) / m with H(i) ~ ln(i) + gamma.
inline double average_path_length(size_t m) {
    if (m <= 1) {
        return 0;
    }
    if (m == 2) {
        return 1;
    }
    double md = static_cast<double>(m);
    return 2 * (std::log(md - 1) + kEulerGamma) - 2 * (md - 1) / md;
}

/// s = 2^(-E[h] / c(psi)).
inline double isolation_score_from_path(double mean_path_length, size_t subsample_size) {
    return std::exp2(-mean_path_length / average_path_length(subsample_size));
}

struct IsoTreeNode {
    /// -1 marks an external node.
    int feature = -1;
    double split = 0;
    int left = -1;
    int right = -1;
    size_t size = 0;
    int depth = 0;
};

struct IsoTree {
    std::vector<IsoTreeNode> nodes;

    double path_length(const Row &row) const {
        int cur = 0;
        while (nodes[cur].feature >= 0) {
            const auto &n = nodes[cur];
            cur = row[n.feature] < n.split ? n.left : n.right;
        }
        return nodes[cur].depth + average_path_length(nodes[cur].size);
    }
};

struct IsoForestModel {
    std::vector<IsoTree> trees;
    size_t subsample_size = 0;
    size_t num_trees = 0;
    int height_limit = 0;
};

namespace detail {

inline int build_iso_node(
    IsoTree &tree, const std::vector<Row> &rows, std::vector<size_t> &idx, size_t begin, size_t end, int depth,
    int height_limit, Rng &rng) {
    int id = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back(IsoTreeNode{-1, 0, -1, -1, end - begin, depth});
    if (depth >= height_limit || end - begin <= 1) {
        return id;
    }
    const size_t nf = rows[idx[begin]].size();
    std::vector<int> splittable;
    std::vector<double> lo(nf), hi(nf);
    for (size_t f = 0; f < nf; f++) {
        lo[f] = hi[f] = rows[idx[begin]][f];
        for (size_t i = begin + 1; i < end; i++) {
            lo[f] = std::min(lo[f], rows[idx[i]][f]);
            hi[f] = std::max(hi[f], rows[idx[i]][f]);
        }
        if (hi[f] > lo[f]) {
            splittable.push_back(static_cast<int>(f));
        }
    }
    if (splittable.empty()) {
        return id;
    }
    int feature = splittable[rng.below(splittable.size())];
    double split = lo[feature] + rng.uniform() * (hi[feature] - lo[feature]);
    if (!(split > lo[feature])) {
        split = std::nextafter(lo[feature], hi[feature]);
    }
    auto mid = std::partition(idx.begin() + static_cast<std::ptrdiff_t>(begin), idx.begin() + static_cast<std::ptrdiff_t>(end),
                              [&](size_t i) { return rows[i][feature] < split; });
    size_t m = static_cast<size_t>(mid - idx.begin());
    tree.nodes[id].feature = feature;
    tree.nodes[id].split = split;
    int left = build_iso_node(tree, rows, idx, begin, m, depth + 1, height_limit, rng);
    int right = build_iso_node(tree, rows, idx, m, end, depth + 1, height_limit, rng);
    tree.nodes[id].left = left;
    tree.nodes[id].right = right;
    return id;
}

}  // namespace detail

/// Each tree is grown on psi rows drawn without replacement, with random
/// axis-aligned splits, down to depth ceil(log2 psi).
inline IsoForestModel isoforest_fit(const std::vector<Row> &rows, size_t num_trees, size_t subsample, std::uint64_t seed) {
    if (rows.size() < 2) {
        throw std::invalid_argument("isolation forest needs at least two rows");
    }
    if (num_trees < 1) {
        throw std::invalid_argument("isolation forest needs at least one tree");
    }
    IsoForestModel model;
    model.num_trees = num_trees;
    model.subsample_size = std::clamp<size_t>(subsample, 2, rows.size());
    model.height_limit = static_cast<int>(std::ceil(std::log2(static_cast<double>(model.subsample_size))));
    Rng rng(seed);
    std::vector<size_t> all(rows.size());
    std::iota(all.begin(), all.end(), 0);
    for (size_t t = 0; t < num_trees; t++) {
        // Partial Fisher-Yates: the first psi entries are the subsample.
        for (size_t i = 0; i < model.subsample_size; i++) {
            size_t j = i + static_cast<size_t>(rng.below(all.size() - i));
            std::swap(all[i], all[j]);
        }
        std::vector<size_t> idx(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(model.subsample_size));
        IsoTree tree;
        detail::build_iso_node(tree, rows, idx, 0, idx.size(), 0, model.height_limit, rng);
        model.trees.push_back(std::move(tree));
    }
    return model;
}

inline double isoforest_mean_path(const IsoForestModel &model, const Row &row) {
    double sum = 0;
    for (const auto &t : model.trees) {
        sum += t.path_length(row);
    }
    return sum / static_cast<double>(model.trees.size());
}

/// Anomaly score in (0, 1); higher = easier to isolate.
inline double isoforest_score(const IsoForestModel &model, const Row &row) {
    return isolation_score_from_path(isoforest_mean_path(model, row), model.subsample_size);
}

}  // namespace qflow::baselines
