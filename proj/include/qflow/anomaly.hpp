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
#include <limits>
#include <stdexcept>
#include <vector>

#include "qflow/dataenc.hpp"
#include "qflow/lossdist.hpp"
#include "qflow/qstate.hpp"

namespace qflow {

/// Higher score = more anomalous.
struct ScoredSample {
    double score;
    bool is_anomaly;
};

struct RocPoint {
    double fpr;
    double tpr;
    /// Samples scoring >= threshold are flagged; +inf for the (0,0) point.
    double threshold;
};

struct RocCurve {
    std::vector<RocPoint> points;
    double auroc = 0;
};

/// Flow loss of a single encoded sample.
inline double flow_score(
    const UnitaryMatrix &u, const Encoder &enc, const Row &row, const DiscreteDistribution &target, LossKind kind) {
    return flow_loss(u, encode_sample(enc, row), target, kind);
}

inline std::vector<double> flow_scores(
    const UnitaryMatrix &u, const Encoder &enc, const std::vector<Row> &rows, const DiscreteDistribution &target,
    LossKind kind) {
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto &r : rows) {
        out.push_back(flow_score(u, enc, r, target, kind));
    }
    return out;
}

inline std::vector<ScoredSample> label_scores(const std::vector<double> &scores, const std::vector<bool> &is_anomaly) {
    if (scores.size() != is_anomaly.size()) {
        throw std::invalid_argument("score and label counts differ");
    }
    std::vector<ScoredSample> out(scores.size());
    for (size_t i = 0; i < scores.size(); i++) {
        out[i] = {scores[i], is_anomaly[i]};
    }
    return out;
}

/// ROC sweep over every distinct score, highest first. Tied scores enter the
/// curve together, so the trapezoidal area gives ties half credit (the
/// Mann-Whitney U statistic).
inline RocCurve auroc(std::vector<ScoredSample> samples) {
    size_t positives = 0;
    for (const auto &s : samples) {
        if (std::isnan(s.score)) {
            throw std::invalid_argument("NaN anomaly score");
        }
        positives += s.is_anomaly ? 1 : 0;
    }
    const size_t negatives = samples.size() - positives;
    if (positives == 0 || negatives == 0) {
        throw std::invalid_argument("ROC needs at least one anomalous and one normal sample");
    }
    std::sort(samples.begin(), samples.end(), [](const ScoredSample &a, const ScoredSample &b) { return a.score > b.score; });

    RocCurve roc;
    roc.points.push_back({0, 0, std::numeric_limits<double>::infinity()});
    size_t tp = 0, fp = 0;
    double area = 0;
    for (size_t i = 0; i < samples.size();) {
        size_t j = i;
        const double threshold = samples[i].score;
        while (j < samples.size() && samples[j].score == threshold) {
            (samples[j].is_anomaly ? tp : fp)++;
            j++;
        }
        RocPoint p{static_cast<double>(fp) / negatives, static_cast<double>(tp) / positives, threshold};
        const RocPoint &prev = roc.points.back();
        area += (p.fpr - prev.fpr) * (p.tpr + prev.tpr) / 2;
        roc.points.push_back(p);
        i = j;
    }
    roc.auroc = area;
    return roc;
}

}  // namespace qflow
