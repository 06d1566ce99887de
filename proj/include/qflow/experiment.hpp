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


// End-to-end experiment plumbing shared by the command-line tool and the
// acceptance checks: configuration, dataset loading, split, encoding, search
// with restarts, and per-method test scoring.

#pragma once

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "qflow/anomaly.hpp"
#include "qflow/baselines/isolation_forest.hpp"
#include "qflow/baselines/lof.hpp"
#include "qflow/baselines/ocsvm.hpp"
#include "qflow/baselines/standardize.hpp"
#include "qflow/dataenc.hpp"
#include "qflow/gatepool.hpp"
#include "qflow/lossdist.hpp"
#include "qflow/mcgs.hpp"
#include "qflow/swaptest.hpp"

#ifndef QFLOW_DEFAULT_DATA_DIR
#define QFLOW_DEFAULT_DATA_DIR "data"
#endif

namespace qflow {

struct BaselineParams {
    size_t iso_trees = 100;
    size_t iso_subsample = 256;
    size_t lof_k = 20;
    double svm_nu = 0.1;
    std::optional<double> svm_gamma;
};

struct GenerateParams {
    size_t count = 10;
    /// Unset: 90th percentile of training scores.
    std::optional<double> tau;
    double acceptance_floor = 0.01;
    size_t max_attempts = 0;
};

inline SearchConfig default_search() {
    SearchConfig s;
    s.max_nodes = 10000;
    s.max_depth = 100;
    s.stall_window = 10000;
    return s;
}

struct ExperimentConfig {
    std::string dataset = "iris";
    int normal_class = 1;
    int anomaly_class = 2;
    double train_fraction = 0.5;
    std::uint64_t split_seed = 7;
    /// Bins per feature; 0 picks the dataset default.
    int k = 0;
    /// "dataset" fits bins on every row of the file (labels unused), "train"
    /// on the training rows only.
    std::string encoder_fit = "dataset";
    bool append_constant_column = false;
    PoolConfig pool;
    /// Per-restart search settings. `search.beta` is ignored in favour of the
    /// loss-specific values below, since KL and COS losses differ in scale.
    SearchConfig search = default_search();
    double beta_kl = 20;
    double beta_cos = 50;
    size_t restarts = 5;
    std::uint64_t seed = 7;
    size_t shots = 10000;
    BaselineParams baselines;
    GenerateParams generate;
};

inline const std::vector<std::string> &known_methods() {
    static const std::vector<std::string> m = {"qf-kl", "qf-cos", "swaptest", "isoforest", "lof", "ocsvm"};
    return m;
}

inline nlohmann::json config_to_json(const ExperimentConfig &c) {
    using nlohmann::json;
    json gates = json::array();
    for (GateKind k : kAllGateKinds) {
        if (c.pool.is_enabled(k)) {
            gates.push_back(std::string(gate_kind_name(k)));
        }
    }
    json thetas = json::array();
    for (const auto &t : c.pool.thetas) {
        thetas.push_back({{"num", t.num()}, {"den", t.den()}});
    }
    json j;
    j["dataset"] = c.dataset;
    j["normal"] = c.normal_class;
    j["anomaly"] = c.anomaly_class;
    j["train_fraction"] = c.train_fraction;
    j["split_seed"] = c.split_seed;
    j["k"] = c.k;
    j["encoder_fit"] = c.encoder_fit;
    j["append_constant_column"] = c.append_constant_column;
    j["loss"] = std::string(loss_kind_name(c.search.loss));
    j["pool"] = {{"gates", gates}, {"thetas", thetas}};
    j["search"] = {
        {"max_nodes", c.search.max_nodes},
        {"max_depth", c.search.max_depth},
        {"beta", {{"kl", c.beta_kl}, {"cos", c.beta_cos}}},
        {"lambda", c.search.lambda},             {"stall_window", c.search.stall_window},
        {"target_loss", c.search.target_loss},
    };
    j["restarts"] = c.restarts;
    j["seed"] = c.seed;
    j["shots"] = c.shots;
    j["baselines"] = {
        {"iso_trees", c.baselines.iso_trees},
        {"iso_subsample", c.baselines.iso_subsample},
        {"lof_k", c.baselines.lof_k},
        {"svm_nu", c.baselines.svm_nu},
        {"svm_gamma", c.baselines.svm_gamma ? json(*c.baselines.svm_gamma) : json(nullptr)},
    };
    j["generate"] = {
        {"count", c.generate.count},
        {"tau", c.generate.tau ? json(*c.generate.tau) : json(nullptr)},
        {"acceptance_floor", c.generate.acceptance_floor},
        {"max_attempts", c.generate.max_attempts},
    };
    return j;
}

namespace detail {

inline void reject_unknown_keys(const nlohmann::json &j, const std::set<std::string> &allowed, const std::string &where) {
    if (!j.is_object()) {
        throw std::invalid_argument(where + " must be a JSON object");
    }
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!allowed.count(it.key())) {
            throw std::invalid_argument("unknown config key '" + where + it.key() + "'");
        }
    }
}

template <typename T>
void read_field(const nlohmann::json &j, const char *key, T &out) {
    if (j.contains(key)) {
        try {
            out = j.at(key).get<T>();
        } catch (const nlohmann::json::exception &) {
            throw std::invalid_argument(std::string("config field '") + key + "' has the wrong type");
        }
    }
}

template <typename T>
void read_optional(const nlohmann::json &j, const char *key, std::optional<T> &out) {
    if (j.contains(key)) {
        if (j.at(key).is_null()) {
            out.reset();
        } else {
            T v{};
            read_field(j, key, v);
            out = v;
        }
    }
}

}  // namespace detail

/// Fields present in `j` override `base`; unknown keys are errors.
inline ExperimentConfig config_from_json(const nlohmann::json &j, ExperimentConfig c = {}) {
    detail::reject_unknown_keys(
        j,
        {"dataset", "normal", "anomaly", "train_fraction", "split_seed", "k", "encoder_fit", "append_constant_column",
         "loss", "pool", "search", "restarts", "seed", "shots", "baselines", "generate"},
        "");
    detail::read_field(j, "dataset", c.dataset);
    detail::read_field(j, "normal", c.normal_class);
    detail::read_field(j, "anomaly", c.anomaly_class);
    detail::read_field(j, "train_fraction", c.train_fraction);
    detail::read_field(j, "split_seed", c.split_seed);
    detail::read_field(j, "k", c.k);
    detail::read_field(j, "encoder_fit", c.encoder_fit);
    detail::read_field(j, "append_constant_column", c.append_constant_column);
    if (j.contains("loss")) {
        std::string name;
        detail::read_field(j, "loss", name);
        c.search.loss = parse_loss_kind(name);
    }
    if (j.contains("pool")) {
        const auto &p = j["pool"];
        detail::reject_unknown_keys(p, {"gates", "thetas"}, "pool.");
        if (p.contains("gates")) {
            std::vector<std::string> names;
            detail::read_field(p, "gates", names);
            c.pool.enabled.fill(false);
            for (const auto &n : names) {
                c.pool.set(parse_gate_kind(n), true);
            }
        }
        if (p.contains("thetas")) {
            c.pool.thetas.clear();
            for (const auto &t : p["thetas"]) {
                if (!t.is_object() || !t.contains("num") || !t.contains("den") || !t["num"].is_number_integer() ||
                    !t["den"].is_number_integer() || t["den"].get<std::int64_t>() == 0) {
                    throw std::invalid_argument("pool.thetas entries must be {\"num\": int, \"den\": nonzero int}");
                }
                c.pool.thetas.emplace_back(t["num"].get<std::int64_t>(), t["den"].get<std::int64_t>());
            }
        }
    }
    if (j.contains("search")) {
        const auto &s = j["search"];
        detail::reject_unknown_keys(s, {"max_nodes", "max_depth", "beta", "lambda", "stall_window", "target_loss"},
                                    "search.");
        detail::read_field(s, "max_nodes", c.search.max_nodes);
        detail::read_field(s, "max_depth", c.search.max_depth);
        if (s.contains("beta")) {
            const auto &b = s["beta"];
            if (b.is_number()) {
                c.beta_kl = c.beta_cos = b.get<double>();
            } else {
                detail::reject_unknown_keys(b, {"kl", "cos"}, "search.beta.");
                detail::read_field(b, "kl", c.beta_kl);
                detail::read_field(b, "cos", c.beta_cos);
            }
        }
        detail::read_field(s, "lambda", c.search.lambda);
        detail::read_field(s, "stall_window", c.search.stall_window);
        detail::read_field(s, "target_loss", c.search.target_loss);
    }
    detail::read_field(j, "restarts", c.restarts);
    detail::read_field(j, "seed", c.seed);
    detail::read_field(j, "shots", c.shots);
    if (j.contains("baselines")) {
        const auto &b = j["baselines"];
        detail::reject_unknown_keys(b, {"iso_trees", "iso_subsample", "lof_k", "svm_nu", "svm_gamma"}, "baselines.");
        detail::read_field(b, "iso_trees", c.baselines.iso_trees);
        detail::read_field(b, "iso_subsample", c.baselines.iso_subsample);
        detail::read_field(b, "lof_k", c.baselines.lof_k);
        detail::read_field(b, "svm_nu", c.baselines.svm_nu);
        detail::read_optional(b, "svm_gamma", c.baselines.svm_gamma);
    }
    if (j.contains("generate")) {
        const auto &g = j["generate"];
        detail::reject_unknown_keys(g, {"count", "tau", "acceptance_floor", "max_attempts"}, "generate.");
        detail::read_field(g, "count", c.generate.count);
        detail::read_optional(g, "tau", c.generate.tau);
        detail::read_field(g, "acceptance_floor", c.generate.acceptance_floor);
        detail::read_field(g, "max_attempts", c.generate.max_attempts);
    }
    return c;
}

inline void validate_config(const ExperimentConfig &c) {
    if (c.dataset != "iris" && c.dataset != "wine") {
        throw std::invalid_argument("dataset must be 'iris' or 'wine', got '" + c.dataset + "'");
    }
    if (c.encoder_fit != "dataset" && c.encoder_fit != "train") {
        throw std::invalid_argument("encoder_fit must be 'dataset' or 'train'");
    }
    if (c.restarts < 1) {
        throw std::invalid_argument("restarts must be >= 1");
    }
    if (c.shots < 1) {
        throw std::invalid_argument("shots must be >= 1");
    }
    c.search.validate();
    if (!(c.beta_kl > 0) || !(c.beta_cos > 0)) {
        throw std::invalid_argument("beta must be positive");
    }
}

/// The search settings actually run: `search` with the loss-specific beta.
inline SearchConfig effective_search(const ExperimentConfig &c) {
    SearchConfig s = c.search;
    s.beta = c.search.loss == LossKind::KL ? c.beta_kl : c.beta_cos;
    return s;
}

/// Fixed (non-pretty) serialization hashed with FNV-1a.
inline std::string config_hash(const ExperimentConfig &c) {
    return detail::hex64(detail::fnv1a(config_to_json(c).dump()));
}

inline std::string data_dir() {
    if (const char *env = std::getenv("QFLOW_DATA_DIR"); env && *env) {
        return env;
    }
    return QFLOW_DEFAULT_DATA_DIR;
}

inline int default_bins(const std::string &dataset) { return dataset == "wine" ? 2 : 3; }

inline Dataset load_dataset(const std::string &name, bool append_constant_column = false) {
    CsvOptions opts;
    opts.append_constant_column = append_constant_column;
    if (name == "iris") {
        opts.class_column = -1;
    } else if (name == "wine") {
        opts.class_column = 0;
    } else {
        throw std::invalid_argument("unknown dataset '" + name + "'");
    }
    return load_uci_csv(data_dir() + "/" + name + ".data", name, opts);
}

/// Everything fixed before the search runs.
struct PreparedExperiment {
    ExperimentConfig config;
    Dataset dataset;
    std::string dataset_hash;
    Split split;
    Encoder encoder;
    DiscreteDistribution nhist;
    QuantumState input;
    DiscreteDistribution target;
    std::vector<GateSpec> pool;

    std::vector<Row> train_rows() const { return dataset.select(split.train); }
    std::vector<Row> test_rows() const { return dataset.select(split.test); }
};

inline PreparedExperiment prepare_from(const ExperimentConfig &cfg, Dataset ds, const std::optional<Split> &fixed_split = {},
                                       const std::optional<Encoder> &fixed_encoder = {}) {
    validate_config(cfg);
    Split split = fixed_split ? *fixed_split
                              : make_split(ds, SplitSpec{cfg.normal_class, cfg.anomaly_class, cfg.train_fraction,
                                                         cfg.split_seed});
    for (size_t i : split.train) {
        if (i >= ds.rows.size()) {
            throw std::invalid_argument("split references a row outside the dataset");
        }
    }
    for (size_t i : split.test) {
        if (i >= ds.rows.size()) {
            throw std::invalid_argument("split references a row outside the dataset");
        }
    }
    const int k = cfg.k > 0 ? cfg.k : default_bins(cfg.dataset);
    Encoder enc = fixed_encoder ? *fixed_encoder
                                : fit_encoder(cfg.encoder_fit == "train" ? ds.select(split.train) : ds.rows, k);
    auto hist = train_histogram(enc, ds.select(split.train));
    auto target = binomial_target(enc.state_dim());
    auto pool = enumerate_pool(enc.num_qubits(), cfg.pool);
    std::string hash = dataset_hash(ds);
    return PreparedExperiment{cfg,  std::move(ds),         std::move(hash),   std::move(split), std::move(enc),
                              std::move(hist.nhist), std::move(hist.state), std::move(target), std::move(pool)};
}

inline PreparedExperiment prepare(const ExperimentConfig &cfg) {
    validate_config(cfg);
    return prepare_from(cfg, load_dataset(cfg.dataset, cfg.append_constant_column));
}

inline std::uint64_t restart_seed(std::uint64_t seed, size_t restart) {
    return restart == 0 ? seed : mix_seed(seed, restart);
}

struct SearchRun {
    SearchResult result;
    size_t restart = 0;
    std::uint64_t seed = 0;
    size_t total_nodes = 0;
    size_t restarts_used = 0;
    double seconds = 0;
};

/// Independent searches with derived seeds; keeps the lowest training loss
/// and stops early once the target loss is reached.
inline SearchRun run_search(const PreparedExperiment &ex) {
    auto start = std::chrono::steady_clock::now();
    SearchRun best;
    bool have = false;
    for (size_t r = 0; r < ex.config.restarts; r++) {
        SearchConfig sc = effective_search(ex.config);
        sc.seed = restart_seed(ex.config.seed, r);
        auto res = search(ex.input, ex.target, ex.pool, sc);
        best.total_nodes += res.nodes;
        best.restarts_used = r + 1;
        if (!have || res.loss < best.result.loss) {
            best.result = std::move(res);
            best.restart = r;
            best.seed = sc.seed;
            have = true;
        }
        if (best.result.loss <= sc.target_loss) {
            break;
        }
    }
    best.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return best;
}

/// Test-set scores for `method`; higher = more anomalous. `unitary` is only
/// read by the flow-based methods.
inline std::vector<double> score_test_rows(
    const PreparedExperiment &ex, const UnitaryMatrix &unitary, const std::string &method, std::uint64_t seed) {
    const auto test = ex.test_rows();
    if (method == "qf-kl") {
        return flow_scores(unitary, ex.encoder, test, ex.target, LossKind::KL);
    }
    if (method == "qf-cos") {
        return flow_scores(unitary, ex.encoder, test, ex.target, LossKind::COS);
    }
    if (method == "swaptest") {
        Rng rng(seed);
        std::vector<double> out;
        for (const auto &r : test) {
            out.push_back(swap_test_score(unitary, ex.encoder, r, ex.target, ex.config.shots, rng));
        }
        return out;
    }
    const auto train = ex.train_rows();
    auto scaler = baselines::Standardizer::fit(train);
    auto ztrain = scaler.apply(train);
    auto ztest = scaler.apply(test);
    std::vector<double> out;
    const auto &bp = ex.config.baselines;
    if (method == "isoforest") {
        auto model = baselines::isoforest_fit(ztrain, bp.iso_trees, std::min(bp.iso_subsample, ztrain.size()), seed);
        for (const auto &r : ztest) {
            out.push_back(baselines::isoforest_score(model, r));
        }
    } else if (method == "lof") {
        auto model = baselines::lof_fit(ztrain, bp.lof_k);
        for (const auto &r : ztest) {
            out.push_back(baselines::lof_score(model, r));
        }
    } else if (method == "ocsvm") {
        auto model = baselines::ocsvm_fit(ztrain, bp.svm_nu, bp.svm_gamma);
        for (const auto &r : ztest) {
            out.push_back(baselines::ocsvm_score(model, r));
        }
    } else {
        throw std::invalid_argument("unknown method '" + method + "'");
    }
    return out;
}

inline bool is_flow_method(const std::string &method) {
    return method == "qf-kl" || method == "qf-cos" || method == "swaptest";
}

inline nlohmann::json provenance(const PreparedExperiment &ex, std::uint64_t seed) {
    return {{"dataset_hash", ex.dataset_hash}, {"config_hash", config_hash(ex.config)}, {"seed", seed}};
}

/// One-line CSV comment carrying the provenance fields.
inline std::string provenance_line(const PreparedExperiment &ex, std::uint64_t seed) {
    return "# dataset_hash=" + ex.dataset_hash + " config_hash=" + config_hash(ex.config) + " seed=" + std::to_string(seed) + "\n";
}

}  // namespace qflow
