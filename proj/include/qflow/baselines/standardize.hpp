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
#include <stdexcept>
#include <vector>

#include "qflow/dataenc.hpp"

namespace qflow::baselines {

/// Per-feature z-scoring with population statistics of the fitted rows.
/// Constant features keep unit scale.
struct Standardizer {
    std::vector<double> mean;
    std::vector<double> scale;

    static Standardizer fit(const std::vector<Row> &rows) {
        if (rows.empty()) {
            throw std::invalid_argument("standardizer needs at least one row");
        }
        const size_t nf = rows.front().size();
        Standardizer s{std::vector<double>(nf), std::vector<double>(nf)};
        for (const auto &r : rows) {
            for (size_t f = 0; f < nf; f++) {
                s.mean[f] += r[f];
            }
        }
        for (auto &m : s.mean) {
            m /= static_cast<double>(rows.size());
        }
        for (const auto &r : rows) {
            for (size_t f = 0; f < nf; f++) {
                double d = r[f] - s.mean[f];
                s.scale[f] += d * d;
            }
        }
        for (auto &v : s.scale) {
            v = std::sqrt(v / static_cast<double>(rows.size()));
            if (v <= 0) {
                v = 1;
            }
        }
        return s;
    }

    Row apply(const Row &row) const {
        if (row.size() != mean.size()) {
            throw std::invalid_argument("row width does not match standardizer");
        }
        Row out(row.size());
        for (size_t f = 0; f < row.size(); f++) {
            out[f] = (row[f] - mean[f]) / scale[f];
        }
        return out;
    }

    std::vector<Row> apply(const std::vector<Row> &rows) const {
        std::vector<Row> out;
        out.reserve(rows.size());
        for (const auto &r : rows) {
            out.push_back(apply(r));
        }
        return out;
    }
};

inline double squared_distance(const Row &a, const Row &b) {
    double s = 0;
    for (size_t f = 0; f < a.size(); f++) {
        double d = a[f] - b[f];
        s += d * d;
    }
    return s;
}

inline double euclidean_distance(const Row &a, const Row &b) { return std::sqrt(squared_distance(a, b)); }

}  // namespace qflow::baselines
