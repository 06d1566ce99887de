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

// qflow: search, evaluate and sample quantum normalizing flows.
//
// Settings are layered: built-in defaults, then the --config file, then
// individual flags. eval/baseline/generate start from the config stored in
// the split manifest of the artifact directory.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "qflow/qflow.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitError = 1;
constexpr int kExitMismatch = 2;
constexpr int kExitPartial = 3;

struct ArtifactMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CommonFlags {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> dataset;
    std::optional<int> normal;
    std::optional<int> anomaly;
    std::optional<std::string> loss;
    std::optional<long long> budget;
    std::optional<size_t> shots;
    std::string out = "out";
};

void add_common(CLI::App *cmd, CommonFlags &f) {
    cmd->add_option("--config", f.config_path, "JSON experiment config")->check(CLI::ExistingFile);
    cmd->add_option("--seed", f.seed, "Random seed");
    cmd->add_option("--dataset", f.dataset, "Dataset")->check(CLI::IsMember({"iris", "wine"}));
    cmd->add_option("--normal", f.normal, "Normal class id");
    cmd->add_option("--anomaly", f.anomaly, "Anomaly class id");
    cmd->add_option("--loss", f.loss, "Search loss")->check(CLI::IsMember({"kl", "cos"}));
    cmd->add_option("--budget", f.budget, "Node budget per restart");
    cmd->add_option("--shots", f.shots, "Swap-test shots");
    cmd->add_option("--out", f.out, "Artifact directory")->capture_default_str();
}

std::string read_file(const fs::path &p) {
    std::ifstream in(p);
    if (!in) {
        throw std::runtime_error("cannot read " + p.string());
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json read_json(const fs::path &p) {
    try {
        return json::parse(read_file(p));
    } catch (const json::parse_error &e) {
        throw std::invalid_argument(p.string() + ": " + e.what());
    }
}

void write_file(const fs::path &p, const std::string &text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + p.string());
    }
    out << text;
}

qflow::ExperimentConfig layered_config(qflow::ExperimentConfig base, const CommonFlags &f) {
    if (!f.config_path.empty()) {
        base = qflow::config_from_json(read_json(f.config_path), base);
    }
    if (f.seed) {
        base.seed = *f.seed;
    }
    if (f.dataset) {
        base.dataset = *f.dataset;
    }
    if (f.normal) {
        base.normal_class = *f.normal;
    }
    if (f.anomaly) {
        base.anomaly_class = *f.anomaly;
    }
    if (f.loss) {
        base.search.loss = qflow::parse_loss_kind(*f.loss);
    }
    if (f.budget) {
        if (*f.budget < 1) {
            throw std::invalid_argument("--budget must be at least 1 node");
        }
        base.search.max_nodes = static_cast<size_t>(*f.budget);
    }
    if (f.shots) {
        base.shots = *f.shots;
    }
    qflow::validate_config(base);
    return base;
}

std::string fmt(double v) {
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Timings go here and nowhere else, so the other artifacts stay
/// byte-reproducible.
void log_run(const fs::path &dir, const std::string &line) {
    std::ofstream log(dir / "run.log", std::ios::app);
    std::time_t now = std::time(nullptr);
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%S", std::localtime(&now));
    log << stamp << " " << line << "\n";
}

struct Artifacts {
    qflow::PreparedExperiment ex;
    json manifest;
};

/// Rebuilds the experiment from DIR/split.json and DIR/encoder.json and
/// checks that the dataset on disk is the one they were made from.
Artifacts load_artifacts(const CommonFlags &f) {
    fs::path dir(f.out);
    json manifest = read_json(dir / "split.json");
    if (!manifest.contains("config") || !manifest.contains("provenance")) {
        throw std::invalid_argument("split manifest lacks config or provenance");
    }
    auto cfg = layered_config(qflow::config_from_json(manifest["config"]), f);
    auto ds = qflow::load_dataset(cfg.dataset, cfg.append_constant_column);
    std::string expected = manifest["provenance"].at("dataset_hash").get<std::string>();
    if (qflow::dataset_hash(ds) != expected) {
        throw ArtifactMismatch(
            "dataset hash mismatch: artifacts were built from " + expected + ", dataset '" + cfg.dataset + "' hashes to " +
            qflow::dataset_hash(ds));
    }
    auto split = qflow::split_from_json(manifest);
    auto enc = qflow::encoder_from_json(read_json(dir / "encoder.json"));
    return {qflow::prepare_from(cfg, std::move(ds), split, enc), std::move(manifest)};
}

qflow::Circuit load_circuit(const Artifacts &a, const std::string &path) {
    json doc = read_json(path);
    if (doc.contains("provenance") && doc["provenance"].value("dataset_hash", "") != a.ex.dataset_hash) {
        throw ArtifactMismatch("dataset hash mismatch between circuit file and split manifest");
    }
    auto circuit = qflow::circuit_from_json(doc);
    if (circuit.num_qubits != a.ex.encoder.num_qubits()) {
        throw std::invalid_argument(
            "circuit acts on " + std::to_string(circuit.num_qubits) + " qubits, encoding needs " +
            std::to_string(a.ex.encoder.num_qubits()));
    }
    return circuit;
}

int cmd_encode(const CommonFlags &f) {
    auto cfg = layered_config({}, f);
    auto ex = qflow::prepare(cfg);
    fs::create_directories(f.out);
    fs::path dir(f.out);
    json enc = qflow::encoder_to_json(ex.encoder);
    enc["provenance"] = qflow::provenance(ex, cfg.seed);
    write_file(dir / "encoder.json", enc.dump(2) + "\n");
    json split = qflow::split_to_json(ex.split);
    split["config"] = qflow::config_to_json(cfg);
    split["provenance"] = qflow::provenance(ex, cfg.seed);
    write_file(dir / "split.json", split.dump(2) + "\n");
    std::cout << "dataset " << cfg.dataset << ": " << ex.dataset.rows.size() << " rows, " << ex.encoder.num_features()
              << " features, binary dim " << ex.encoder.binary_dim() << ", " << ex.encoder.num_qubits() << " qubits\n"
              << "split: " << ex.split.train.size() << " train, " << ex.split.num_test_normal() << " test normal, "
              << ex.split.num_test_anomaly() << " test anomaly\n";
    return 0;
}

int cmd_search(const CommonFlags &f) {
    auto cfg = layered_config({}, f);
    auto ex = qflow::prepare(cfg);
    if (cmd_encode(f) != 0) {
        return kExitError;
    }
    auto run = qflow::run_search(ex);
    fs::path dir(f.out);

    json extra;
    extra["loss_kind"] = std::string(qflow::loss_kind_name(cfg.search.loss));
    extra["loss"] = run.result.loss;
    extra["nodes"] = run.total_nodes;
    extra["restart"] = run.restart;
    extra["restarts_used"] = run.restarts_used;
    extra["restart_seed"] = run.seed;
    extra["stop_reason"] = std::string(qflow::stop_reason_name(run.result.reason));
    extra["provenance"] = qflow::provenance(ex, cfg.seed);
    write_file(dir / "circuit.json", qflow::serialize(run.result.circuit, extra));

    std::string trace = qflow::provenance_line(ex, cfg.seed) + "step,nodes,best_loss\n";
    for (const auto &p : run.result.trace) {
        trace += std::to_string(p.step) + "," + std::to_string(p.nodes) + "," + fmt(p.best_loss) + "\n";
    }
    write_file(dir / "trace.csv", trace);
    log_run(dir, "search " + cfg.dataset + " " + std::to_string(cfg.normal_class) + "-" +
                     std::to_string(cfg.anomaly_class) + " seconds=" + std::to_string(run.seconds));

    std::cout << "gates " << run.result.circuit.gates.size() << ", nodes " << run.total_nodes << ", stop "
              << qflow::stop_reason_name(run.result.reason) << "\n"
              << "final " << qflow::loss_kind_name(cfg.search.loss) << " loss " << fmt(run.result.loss) << "\n";
    return 0;
}

int cmd_eval(const CommonFlags &f, const std::string &method, const std::string &circuit_path) {
    auto art = load_artifacts(f);
    const auto &ex = art.ex;
    fs::path dir(f.out);
    auto u = qflow::UnitaryMatrix::identity(ex.encoder.num_qubits());
    if (qflow::is_flow_method(method)) {
        u = qflow::compose(load_circuit(art, circuit_path.empty() ? (dir / "circuit.json").string() : circuit_path));
    }
    auto scores = qflow::score_test_rows(ex, u, method, ex.config.seed);
    auto roc = qflow::auroc(qflow::label_scores(scores, ex.split.test_is_anomaly));

    const std::string header = qflow::provenance_line(ex, ex.config.seed);
    std::string s = header + "sample_id,score,is_anomaly\n";
    for (size_t i = 0; i < scores.size(); i++) {
        s += std::to_string(ex.split.test[i]) + "," + fmt(scores[i]) + "," + (ex.split.test_is_anomaly[i] ? "1" : "0") + "\n";
    }
    write_file(dir / ("scores_" + method + ".csv"), s);
    std::string r = header + "fpr,tpr\n";
    for (const auto &p : roc.points) {
        r += fmt(p.fpr) + "," + fmt(p.tpr) + "\n";
    }
    r += "# auroc=" + fmt(roc.auroc) + "\n";
    write_file(dir / ("roc_" + method + ".csv"), r);

    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", roc.auroc);
    std::cout << method << " AUROC " << buf << "\n";
    return 0;
}

int cmd_generate(const CommonFlags &f, std::optional<size_t> count, std::optional<double> tau,
                 const std::string &circuit_path) {
    auto art = load_artifacts(f);
    const auto &ex = art.ex;
    fs::path dir(f.out);
    auto u = qflow::compose(load_circuit(art, circuit_path.empty() ? (dir / "circuit.json").string() : circuit_path));
    const auto kind = ex.config.search.loss;
    const double t = tau ? *tau
                         : ex.config.generate.tau.value_or(
                               qflow::default_tau(u, ex.encoder, ex.train_rows(), ex.target, kind));
    const size_t n = count.value_or(ex.config.generate.count);
    qflow::Rng rng(ex.config.seed);
    qflow::GenerateOptions opts{kind, ex.config.generate.max_attempts, ex.config.generate.acceptance_floor};
    auto res = qflow::generate(u, ex.encoder, ex.target, n, t, rng, opts);

    std::string s = qflow::provenance_line(ex, ex.config.seed);
    s += "# tau=" + fmt(t) + " attempts=" + std::to_string(res.attempts) + " accepted=" + std::to_string(res.samples.size()) +
         " acceptance_rate=" + fmt(res.acceptance_rate) + "\n";
    for (size_t j = 0; j < ex.encoder.num_features(); j++) {
        s += "f" + std::to_string(j) + ",";
    }
    s += "score\n";
    for (const auto &g : res.samples) {
        for (double v : g.values) {
            s += fmt(v) + ",";
        }
        s += fmt(g.score) + "\n";
    }
    write_file(dir / "samples.csv", s);
    std::cout << "accepted " << res.samples.size() << " of " << res.attempts << " attempts (rate "
              << fmt(res.acceptance_rate) << ", tau " << fmt(t) << ")\n";
    if (res.below_floor) {
        std::cerr << "warning: fewer samples than requested or acceptance rate below "
                  << fmt(ex.config.generate.acceptance_floor) << "\n";
        return kExitPartial;
    }
    return 0;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Quantum normalizing flows for anomaly detection"};
    app.require_subcommand(1);

    CommonFlags encode_f, search_f, eval_f, baseline_f, gen_f;
    auto *encode = app.add_subcommand("encode", "Fit the encoder and write encoder.json + split.json");
    add_common(encode, encode_f);
    auto *search = app.add_subcommand("search", "Search a flow circuit and write all training artifacts");
    add_common(search, search_f);

    std::string eval_method, eval_circuit, baseline_method, gen_circuit;
    auto *eval = app.add_subcommand("eval", "Score the test split and write scores/ROC CSVs");
    add_common(eval, eval_f);
    eval->add_option("--method", eval_method, "Scoring method")
        ->required()
        ->check(CLI::IsMember(qflow::known_methods()));
    eval->add_option("--circuit", eval_circuit, "Circuit file (default DIR/circuit.json)");
    auto *baseline = app.add_subcommand("baseline", "Alias of eval");
    add_common(baseline, baseline_f);
    baseline->add_option("--method", baseline_method, "Scoring method")
        ->required()
        ->check(CLI::IsMember(qflow::known_methods()));

    std::optional<size_t> gen_count;
    std::optional<double> gen_tau;
    auto *gen = app.add_subcommand("generate", "Sample from the inverse flow");
    add_common(gen, gen_f);
    gen->add_option("--count", gen_count, "Samples to accept");
    gen->add_option("--tau", gen_tau, "Acceptance threshold on the forward score (inf allowed)");
    gen->add_option("--circuit", gen_circuit, "Circuit file (default DIR/circuit.json)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitError;
    }

    try {
        if (*encode) {
            return cmd_encode(encode_f);
        }
        if (*search) {
            return cmd_search(search_f);
        }
        if (*eval) {
            return cmd_eval(eval_f, eval_method, eval_circuit);
        }
        if (*baseline) {
            return cmd_eval(baseline_f, baseline_method, "");
        }
        if (*gen) {
            return cmd_generate(gen_f, gen_count, gen_tau, gen_circuit);
        }
    } catch (const ArtifactMismatch &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitMismatch;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
