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

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "qflow/gate.hpp"

namespace qflow {

struct PoolConfig {
    std::array<bool, kAllGateKinds.size()> enabled;
    /// Angles used for P and CP, as multiples of pi.
    std::vector<PhaseAngle> thetas = {PhaseAngle(1, 4), PhaseAngle(1, 2), PhaseAngle(1, 1)};

    PoolConfig() { enabled.fill(true); }

    static PoolConfig only(std::initializer_list<GateKind> kinds) {
        PoolConfig cfg;
        cfg.enabled.fill(false);
        for (GateKind k : kinds) {
            cfg.set(k, true);
        }
        return cfg;
    }

    bool is_enabled(GateKind kind) const { return enabled[static_cast<size_t>(kind)]; }
    void set(GateKind kind, bool on) { enabled[static_cast<size_t>(kind)] = on; }
};

/// Every enabled gate kind at every valid qubit combination (and angle).
/// Gates that are symmetric in their qubits (CZ, CP, SWAP, the swapped pair
/// of CSWAP, the control pair of TOFFOLI) are emitted once per unordered set.
/// Order is fixed: kinds in declaration order, qubit tuples lexicographic,
/// then angles in config order.
inline std::vector<GateSpec> enumerate_pool(int num_qubits, const PoolConfig &config = {}) {
    if (num_qubits < 1) {
        throw std::invalid_argument("pool needs at least one qubit");
    }
    const int n = num_qubits;
    std::vector<GateSpec> pool;
    auto add = [&](GateKind kind, std::vector<int> qubits) {
        if (gate_has_angle(kind)) {
            for (const auto &theta : config.thetas) {
                pool.push_back(GateSpec{kind, qubits, theta});
            }
        } else {
            pool.push_back(GateSpec{kind, std::move(qubits), std::nullopt});
        }
    };
    for (GateKind kind : kAllGateKinds) {
        if (!config.is_enabled(kind)) {
            continue;
        }
        switch (gate_arity(kind)) {
            case 1:
                for (int a = 0; a < n; a++) {
                    add(kind, {a});
                }
                break;
            case 2:
                for (int a = 0; a < n; a++) {
                    for (int b = 0; b < n; b++) {
                        if (a == b) {
                            continue;
                        }
                        if (kind != GateKind::CNOT && b < a) {
                            continue;
                        }
                        add(kind, {a, b});
                    }
                }
                break;
            case 3:
                for (int a = 0; a < n; a++) {
                    for (int b = 0; b < n; b++) {
                        for (int c = 0; c < n; c++) {
                            if (a == b || a == c || b == c) {
                                continue;
                            }
                            if (kind == GateKind::CSWAP && c < b) {
                                continue;
                            }
                            if (kind == GateKind::TOFFOLI && b < a) {
                                continue;
                            }
                            add(kind, {a, b, c});
                        }
                    }
                }
                break;
        }
    }
    if (pool.empty()) {
        throw std::invalid_argument("gate pool is empty; enable at least one gate kind");
    }
    return pool;
}

inline nlohmann::json gate_to_json(const GateSpec &gate) {
    nlohmann::json j;
    j["kind"] = std::string(gate_kind_name(gate.kind));
    j["qubits"] = gate.qubits;
    if (gate.theta) {
        j["theta"] = {{"num", gate.theta->num()}, {"den", gate.theta->den()}};
    }
    return j;
}

inline nlohmann::json circuit_to_json(const Circuit &circuit) {
    nlohmann::json j;
    j["num_qubits"] = circuit.num_qubits;
    j["gates"] = nlohmann::json::array();
    for (const auto &g : circuit.gates) {
        j["gates"].push_back(gate_to_json(g));
    }
    return j;
}

/// Circuit document. `extra` fields (e.g. provenance) are merged at top level.
inline std::string serialize(const Circuit &circuit, const nlohmann::json &extra = nlohmann::json::object()) {
    nlohmann::json j = circuit_to_json(circuit);
    for (auto it = extra.begin(); it != extra.end(); ++it) {
        j[it.key()] = it.value();
    }
    return j.dump(2) + "\n";
}

inline GateSpec gate_from_json(const nlohmann::json &j) {
    if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
        throw std::invalid_argument("gate entry needs a string 'kind'");
    }
    GateSpec g;
    g.kind = parse_gate_kind(j["kind"].get<std::string>());
    if (!j.contains("qubits") || !j["qubits"].is_array()) {
        throw std::invalid_argument("gate entry needs a 'qubits' array");
    }
    for (const auto &q : j["qubits"]) {
        if (!q.is_number_integer()) {
            throw std::invalid_argument("qubit indices must be integers");
        }
        g.qubits.push_back(q.get<int>());
    }
    if (j.contains("theta")) {
        const auto &t = j["theta"];
        if (!t.is_object() || !t.contains("num") || !t.contains("den") || !t["num"].is_number_integer() ||
            !t["den"].is_number_integer() || t["den"].get<std::int64_t>() == 0) {
            throw std::invalid_argument("theta must be a rational multiple of pi: {\"num\": int, \"den\": nonzero int}");
        }
        g.theta = PhaseAngle(t["num"].get<std::int64_t>(), t["den"].get<std::int64_t>());
    }
    return g;
}

inline Circuit circuit_from_json(const nlohmann::json &j) {
    if (!j.is_object() || !j.contains("num_qubits") || !j["num_qubits"].is_number_integer()) {
        throw std::invalid_argument("circuit document needs an integer 'num_qubits'");
    }
    if (!j.contains("gates") || !j["gates"].is_array()) {
        throw std::invalid_argument("circuit document needs a 'gates' array");
    }
    Circuit c{j["num_qubits"].get<int>(), {}};
    for (const auto &gj : j["gates"]) {
        c.gates.push_back(gate_from_json(gj));
    }
    c.validate();
    return c;
}

inline Circuit deserialize(const std::string &text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error &e) {
        throw std::invalid_argument(std::string("malformed circuit document: ") + e.what());
    }
    return circuit_from_json(j);
}

}  // namespace qflow
