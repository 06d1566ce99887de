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

// Dataset ingestion and the per-feature one-hot binning that turns a sample
// into a quantum state.

#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "qflow/distribution.hpp"
#include "qflow/qstate.hpp"
#include "qflow/random.hpp"

namespace qflow {

using Row = std::vector<double>;

struct Dataset {
    std::string name;
    std::vector<Row> rows;
    std::vector<int> labels;

    size_t num_features() const { return rows.empty() ? 0 : rows.front().size(); }

    std::vector<size_t> indices_of_class(int label) const {
        std::vector<size_t> out;
        for (size_t i = 0; i < labels.size(); i++) {
            if (labels[i] == label) {
                out.push_back(i);
            }
        }
        return out;
    }

    std::vector<Row> select(const std::vector<size_t> &indices) const {
        std::vector<Row> out;
        out.reserve(indices.size());
        for (size_t i : indices) {
            out.push_back(rows.at(i));
        }
        return out;
    }
};

struct CsvOptions {
    /// Column holding the class; negative counts from the end (-1 = last).
    int class_column = -1;
    /// Appends a constant feature column to every row.
    bool append_constant_column = false;
    double constant_value = 1.0;
};

namespace detail {

inline std::string trim(const std::string &s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) {
        return "";
    }
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

inline bool parse_double(const std::string &s, double &out) {
    const char *begin = s.data();
    const char *end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end;
}

inline bool parse_int(const std::string &s, int &out) {
    const char *begin = s.data();
    const char *end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end;
}

inline std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ULL) {
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

}  // namespace detail

/// Parses UCI-style CSV text (no header). Numeric class tokens are used as
/// class ids directly; otherwise ids 1, 2, ... follow first appearance.
inline Dataset parse_uci_csv(const std::string &text, const std::string &name, const CsvOptions &opts = {}) {
    std::vector<std::vector<std::string>> records;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        line = detail::trim(line);
        if (line.empty() || line[0] == '#') {
            continue;
        }
        std::vector<std::string> fields;
        std::stringstream ls(line);
        std::string field;
        while (std::getline(ls, field, ',')) {
            fields.push_back(detail::trim(field));
        }
        if (!records.empty() && fields.size() != records.front().size()) {
            throw std::invalid_argument(
                name + ": ragged CSV row " + std::to_string(records.size() + 1) + " (" + std::to_string(fields.size()) +
                " fields, expected " + std::to_string(records.front().size()) + ")");
        }
        records.push_back(std::move(fields));
    }
    if (records.empty()) {
        throw std::invalid_argument(name + ": no data rows");
    }
    const int width = static_cast<int>(records.front().size());
    const int cls = opts.class_column < 0 ? width + opts.class_column : opts.class_column;
    if (cls < 0 || cls >= width || width < 2) {
        throw std::invalid_argument(name + ": class column out of range");
    }

    bool numeric_classes = true;
    for (const auto &r : records) {
        int v;
        numeric_classes = numeric_classes && detail::parse_int(r[cls], v);
    }
    std::map<std::string, int> class_ids;
    Dataset ds;
    ds.name = name;
    for (size_t i = 0; i < records.size(); i++) {
        const auto &r = records[i];
        Row row;
        for (int c = 0; c < width; c++) {
            if (c == cls) {
                continue;
            }
            double v;
            if (r[c].empty() || r[c] == "?" || !detail::parse_double(r[c], v)) {
                throw std::invalid_argument(
                    name + ": non-numeric or missing value '" + r[c] + "' in row " + std::to_string(i + 1));
            }
            row.push_back(v);
        }
        if (opts.append_constant_column) {
            row.push_back(opts.constant_value);
        }
        int label;
        if (numeric_classes) {
            detail::parse_int(r[cls], label);
        } else {
            auto [it, inserted] = class_ids.emplace(r[cls], static_cast<int>(class_ids.size()) + 1);
            label = it->second;
        }
        ds.rows.push_back(std::move(row));
        ds.labels.push_back(label);
    }
    return ds;
}

inline Dataset load_uci_csv(const std::string &path, const std::string &name, const CsvOptions &opts = {}) {
    std::ifstream f(path);
    if (!f) {
        throw std::runtime_error("cannot open dataset file '" + path + "'");
    }
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_uci_csv(ss.str(), name, opts);
}

/// Content hash of features and labels; identifies a dataset in manifests.
inline std::string dataset_hash(const Dataset &ds) {
    std::uint64_t h = detail::fnv1a(ds.name);
    char buf[32];
    for (size_t i = 0; i < ds.rows.size(); i++) {
        std::snprintf(buf, sizeof(buf), "%d:", ds.labels[i]);
        h = detail::fnv1a(buf, h);
        for (double v : ds.rows[i]) {
            std::snprintf(buf, sizeof(buf), "%.17g,", v);
            h = detail::fnv1a(buf, h);
        }
        h = detail::fnv1a("\n", h);
    }
    return detail::hex64(h);
}

namespace detail {

/// Centers of the SSE-optimal split of sorted distinct values (with
/// multiplicities) into k contiguous groups. O(k m^2) over m distinct values.
inline std::vector<double> optimal_1d_centers(const std::vector<double> &distinct, const std::vector<double> &weight, int k) {
    const size_t m = distinct.size();
    std::vector<double> w(m + 1), s(m + 1), q(m + 1);
    for (size_t i = 0; i < m; i++) {
        w[i + 1] = w[i] + weight[i];
        s[i + 1] = s[i] + weight[i] * distinct[i];
        q[i + 1] = q[i] + weight[i] * distinct[i] * distinct[i];
    }
    // Cost of group [i, j).
    auto sse = [&](size_t i, size_t j) {
        double sum = s[j] - s[i];
        return std::max(0.0, q[j] - q[i] - sum * sum / (w[j] - w[i]));
    };
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<std::vector<double>> cost(k + 1, std::vector<double>(m + 1, inf));
    std::vector<std::vector<size_t>> cut(k + 1, std::vector<size_t>(m + 1, 0));
    cost[0][0] = 0;
    for (int g = 1; g <= k; g++) {
        for (size_t j = static_cast<size_t>(g); j <= m; j++) {
            for (size_t i = static_cast<size_t>(g - 1); i < j; i++) {
                double c = cost[g - 1][i] + sse(i, j);
                if (c < cost[g][j]) {
                    cost[g][j] = c;
                    cut[g][j] = i;
                }
            }
        }
    }
    std::vector<double> centers(k);
    size_t j = m;
    for (int g = k; g >= 1; g--) {
        size_t i = cut[g][j];
        centers[g - 1] = (s[j] - s[i]) / (w[j] - w[i]);
        j = i;
    }
    return centers;
}

}  // namespace detail

/// One-dimensional k-means. The globally optimal partition is found by
/// dynamic programming over the sorted distinct values, then polished with
/// Lloyd iterations until no center moves more than 1e-10 (a no-op unless
/// rounding disagrees). Returns strictly increasing centers; throws if there
/// are fewer than k distinct values.
inline std::vector<double> kmeans_1d(std::vector<double> values, int k, int max_iterations = 10000) {
    if (k < 1) {
        throw std::invalid_argument("k-means needs k >= 1");
    }
    std::sort(values.begin(), values.end());
    std::vector<double> distinct, weight;
    for (double v : values) {
        if (distinct.empty() || v != distinct.back()) {
            distinct.push_back(v);
            weight.push_back(0);
        }
        weight.back() += 1;
    }
    if (static_cast<int>(distinct.size()) < k) {
        throw std::invalid_argument(
            "degenerate feature: " + std::to_string(distinct.size()) + " distinct value(s) for k=" + std::to_string(k));
    }
    std::vector<double> centers = detail::optimal_1d_centers(distinct, weight, k);

    std::vector<double> sums(k);
    std::vector<size_t> counts(k);
    for (int it = 0; it < max_iterations; it++) {
        std::fill(sums.begin(), sums.end(), 0.0);
        std::fill(counts.begin(), counts.end(), 0);
        for (double v : values) {
            int best = 0;
            for (int j = 1; j < k; j++) {
                if (std::abs(v - centers[j]) < std::abs(v - centers[best])) {
                    best = j;
                }
            }
            sums[best] += v;
            counts[best]++;
        }
        double moved = 0;
        for (int j = 0; j < k; j++) {
            if (counts[j] == 0) {
                continue;
            }
            double c = sums[j] / static_cast<double>(counts[j]);
            moved = std::max(moved, std::abs(c - centers[j]));
            centers[j] = c;
        }
        if (moved <= 1e-10) {
            break;
        }
    }
    std::sort(centers.begin(), centers.end());
    for (int j = 1; j < k; j++) {
        if (!(centers[j] > centers[j - 1])) {
            throw std::invalid_argument("degenerate feature: k-means produced coinciding centers");
        }
    }
    return centers;
}

/// Per-feature bin centers. Feature f, bin b maps to binary index f*k + b.
struct Encoder {
    int k = 0;
    std::vector<std::vector<double>> centroids;

    size_t num_features() const { return centroids.size(); }
    size_t binary_dim() const { return num_features() * static_cast<size_t>(k); }

    int num_qubits() const {
        int n = 1;
        while ((size_t{1} << n) < binary_dim()) {
            n++;
        }
        return n;
    }

    size_t state_dim() const { return size_t{1} << num_qubits(); }

    /// Nearest centroid; exact ties go to the lower bin.
    int bin_of(size_t feature, double value) const {
        const auto &c = centroids.at(feature);
        int best = 0;
        for (int j = 1; j < k; j++) {
            if (std::abs(value - c[j]) < std::abs(value - c[best])) {
                best = j;
            }
        }
        return best;
    }

    std::vector<size_t> active_indices(const Row &row) const {
        if (row.size() != num_features()) {
            throw std::invalid_argument(
                "row has " + std::to_string(row.size()) + " features, encoder expects " + std::to_string(num_features()));
        }
        std::vector<size_t> out(row.size());
        for (size_t f = 0; f < row.size(); f++) {
            out[f] = f * static_cast<size_t>(k) + static_cast<size_t>(bin_of(f, row[f]));
        }
        return out;
    }

    friend bool operator==(const Encoder &, const Encoder &) = default;
};

inline Encoder fit_encoder(const std::vector<Row> &rows, int k) {
    if (k < 2) {
        throw std::invalid_argument("encoder needs k >= 2 bins per feature");
    }
    if (rows.empty()) {
        throw std::invalid_argument("encoder needs at least one row");
    }
    const size_t nf = rows.front().size();
    Encoder enc;
    enc.k = k;
    for (size_t f = 0; f < nf; f++) {
        std::vector<double> column;
        column.reserve(rows.size());
        for (const auto &r : rows) {
            if (r.size() != nf) {
                throw std::invalid_argument("rows have inconsistent feature counts");
            }
            column.push_back(r[f]);
        }
        try {
            enc.centroids.push_back(kmeans_1d(std::move(column), k));
        } catch (const std::invalid_argument &e) {
            throw std::invalid_argument("feature " + std::to_string(f) + ": " + e.what());
        }
    }
    if (enc.num_qubits() > kMaxQubits) {
        throw std::invalid_argument("encoding needs more than " + std::to_string(kMaxQubits) + " qubits");
    }
    return enc;
}

/// One-hot bin per feature, zero-padded to 2^N, scaled to unit norm (each
/// active amplitude is 1/sqrt(F)).
inline QuantumState encode_sample(const Encoder &enc, const Row &row) {
    std::vector<Complex> amps(enc.state_dim());
    const double a = 1.0 / std::sqrt(static_cast<double>(enc.num_features()));
    for (size_t idx : enc.active_indices(row)) {
        amps[idx] = a;
    }
    return QuantumState(enc.num_qubits(), std::move(amps));
}

struct TrainingHistogram {
    DiscreteDistribution nhist;
    QuantumState state;
};

/// Normalized histogram of the encoded rows and its elementwise square root.
inline TrainingHistogram train_histogram(const Encoder &enc, const std::vector<Row> &rows) {
    if (rows.empty()) {
        throw std::invalid_argument("training histogram needs at least one row");
    }
    std::vector<double> counts(enc.state_dim());
    for (const auto &r : rows) {
        for (size_t idx : enc.active_indices(r)) {
            counts[idx] += 1;
        }
    }
    auto nhist = DiscreteDistribution::from_weights(std::move(counts));
    auto state = QuantumState::from_distribution(nhist);
    return {std::move(nhist), std::move(state)};
}

struct SplitSpec {
    int normal_class = 1;
    int anomaly_class = 2;
    double train_fraction = 0.5;
    std::uint64_t seed = 0;
};

/// Row indices into the dataset. Test rows list the held-out normal rows
/// first, then every anomaly-class row.
struct Split {
    std::vector<size_t> train;
    std::vector<size_t> test;
    std::vector<bool> test_is_anomaly;

    size_t num_test_normal() const { return std::count(test_is_anomaly.begin(), test_is_anomaly.end(), false); }
    size_t num_test_anomaly() const { return std::count(test_is_anomaly.begin(), test_is_anomaly.end(), true); }
};

/// Seeded shuffle of the normal class; the first floor(fraction * n) rows
/// (at least one) train.
inline Split make_split(const Dataset &ds, const SplitSpec &spec) {
    if (spec.normal_class == spec.anomaly_class) {
        throw std::invalid_argument("normal and anomaly class must differ");
    }
    if (!(spec.train_fraction > 0 && spec.train_fraction <= 1)) {
        throw std::invalid_argument("train fraction must lie in (0, 1]");
    }
    auto normal = ds.indices_of_class(spec.normal_class);
    auto anomaly = ds.indices_of_class(spec.anomaly_class);
    if (normal.empty()) {
        throw std::invalid_argument("class " + std::to_string(spec.normal_class) + " has no rows");
    }
    if (anomaly.empty()) {
        throw std::invalid_argument("class " + std::to_string(spec.anomaly_class) + " has no rows");
    }
    Rng rng(spec.seed);
    rng.shuffle(std::span<size_t>(normal));
    size_t n_train = static_cast<size_t>(std::floor(spec.train_fraction * static_cast<double>(normal.size())));
    n_train = std::clamp<size_t>(n_train, 1, normal.size());

    Split split;
    split.train.assign(normal.begin(), normal.begin() + static_cast<std::ptrdiff_t>(n_train));
    for (size_t i = n_train; i < normal.size(); i++) {
        split.test.push_back(normal[i]);
        split.test_is_anomaly.push_back(false);
    }
    for (size_t i : anomaly) {
        split.test.push_back(i);
        split.test_is_anomaly.push_back(true);
    }
    return split;
}

inline nlohmann::json encoder_to_json(const Encoder &enc) {
    return nlohmann::json{{"k", enc.k}, {"num_qubits", enc.num_qubits()}, {"centroids", enc.centroids}};
}

inline Encoder encoder_from_json(const nlohmann::json &j) {
    Encoder enc;
    try {
        enc.k = j.at("k").get<int>();
        enc.centroids = j.at("centroids").get<std::vector<std::vector<double>>>();
    } catch (const nlohmann::json::exception &e) {
        throw std::invalid_argument(std::string("malformed encoder document: ") + e.what());
    }
    if (enc.k < 2 || enc.centroids.empty()) {
        throw std::invalid_argument("malformed encoder document: need k >= 2 and at least one feature");
    }
    for (const auto &c : enc.centroids) {
        if (static_cast<int>(c.size()) != enc.k) {
            throw std::invalid_argument("malformed encoder document: feature with wrong number of centroids");
        }
        for (size_t j = 1; j < c.size(); j++) {
            if (!(c[j] > c[j - 1])) {
                throw std::invalid_argument("malformed encoder document: centroids must be strictly increasing");
            }
        }
    }
    return enc;
}

inline nlohmann::json split_to_json(const Split &split) {
    nlohmann::json labels = nlohmann::json::array();
    for (bool b : split.test_is_anomaly) {
        labels.push_back(b ? 1 : 0);
    }
    return nlohmann::json{{"train", split.train}, {"test", split.test}, {"test_is_anomaly", labels}};
}

inline Split split_from_json(const nlohmann::json &j) {
    Split split;
    try {
        split.train = j.at("train").get<std::vector<size_t>>();
        split.test = j.at("test").get<std::vector<size_t>>();
        for (const auto &v : j.at("test_is_anomaly")) {
            split.test_is_anomaly.push_back(v.get<int>() != 0);
        }
    } catch (const nlohmann::json::exception &e) {
        throw std::invalid_argument(std::string("malformed split manifest: ") + e.what());
    }
    if (split.test.size() != split.test_is_anomaly.size()) {
        throw std::invalid_argument("malformed split manifest: label count does not match test rows");
    }
    return split;
}

}  // namespace qflow
