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


#include <gtest/gtest.h>

#include <cmath>

#include "test_util.hpp"

namespace qflow {
namespace {

SearchGraph one_qubit_graph(std::vector<GateSpec> pool, double beta = 5) {
    return SearchGraph(QuantumState::basis(1, 0), binomial_target(2), std::move(pool), LossKind::KL, 10, beta);
}

TEST(Search, RootAlreadyOptimal) {
    auto y = binomial_target(8);
    SearchConfig cfg;
    auto r = search(QuantumState::from_distribution(y), y, enumerate_pool(3), cfg);
    EXPECT_TRUE(r.circuit.gates.empty());
    EXPECT_NEAR(r.loss, 0, 1e-15);
    EXPECT_EQ(r.reason, StopReason::TargetReached);
}

TEST(Search, SingleHadamardSolution) {
    SearchConfig cfg;
    cfg.seed = 3;
    auto pool = std::vector<GateSpec>{make_gate(GateKind::H, {0}), make_gate(GateKind::X, {0})};
    auto r = search(QuantumState::basis(1, 0), binomial_target(2), pool, cfg);
    ASSERT_EQ(r.circuit.gates.size(), 1u);
    EXPECT_EQ(r.circuit.gates[0], make_gate(GateKind::H, {0}));
    EXPECT_NEAR(r.loss, 0, 1e-12);
}

TEST(Search, Errors) {
    SearchConfig cfg;
    auto x = QuantumState::basis(1, 0);
    auto y = binomial_target(2);
    EXPECT_THROW(search(x, y, {}, cfg), std::invalid_argument);
    cfg.max_nodes = 0;
    EXPECT_THROW(search(x, y, enumerate_pool(1), cfg), std::invalid_argument);
    SearchConfig wrong_dim;
    EXPECT_THROW(search(x, binomial_target(4), enumerate_pool(1), wrong_dim), std::invalid_argument);
}

/// Lowest KL loss over every circuit of length <= depth, by exhaustive
/// enumeration of gate sequences applied to the state.
double exhaustive_best(const QuantumState &x, const DiscreteDistribution &y, const std::vector<GateSpec> &pool, int depth) {
    double best = loss_of_amplitudes(x.amplitudes(), y, LossKind::KL);
    std::vector<std::vector<Complex>> stack(depth + 1);
    stack[0].assign(x.amplitudes().begin(), x.amplitudes().end());
    auto rec = [&](auto &&self, int level) -> void {
        if (level == depth) {
            return;
        }
        for (const auto &g : pool) {
            stack[level + 1] = stack[level];
            apply_gate_inplace(stack[level + 1], x.num_qubits(), g);
            best = std::min(best, loss_of_amplitudes(stack[level + 1], y, LossKind::KL));
            self(self, level + 1);
        }
    };
    rec(rec, 0);
    return best;
}

TEST(Search, IrisBeatsExhaustiveDepthThree) {
    ExperimentConfig ec;
    auto ex = prepare(ec);
    double identity = loss_of_amplitudes(ex.input.amplitudes(), ex.target, LossKind::KL);
    double bfs = exhaustive_best(ex.input, ex.target, ex.pool, 3);
    SearchConfig cfg;
    cfg.max_nodes = 20000;
    cfg.seed = 7;
    auto r = search(ex.input, ex.target, ex.pool, cfg);
    std::cout << "identity " << identity << ", depth-3 optimum " << bfs << ", search " << r.loss << "\n";
    EXPECT_LT(r.loss, identity);
    EXPECT_LT(r.loss, 0.25);
    EXPECT_LE(r.loss, bfs + 1e-12);
}

TEST(Expand, DedupAndInvolution) {
    auto x0 = make_gate(GateKind::X, {0});
    auto g = one_qubit_graph({x0, make_gate(GateKind::H, {0})});
    auto first = g.expand(SearchGraph::kRoot, x0);
    EXPECT_TRUE(first.inserted);
    auto second = g.expand(SearchGraph::kRoot, x0);
    EXPECT_FALSE(second.inserted);
    EXPECT_EQ(first.node, second.node);
    EXPECT_EQ(g.size(), 2u);
    auto back = g.expand(first.node, x0);
    EXPECT_EQ(back.node, SearchGraph::kRoot);
    EXPECT_EQ(g.node(SearchGraph::kRoot).depth, 0);
    EXPECT_FALSE(g.node(SearchGraph::kRoot).best_parent);
}

TEST(Expand, GlobalPhaseDuplicatesShareANode) {
    // XZ = -ZX.
    auto x0 = make_gate(GateKind::X, {0});
    auto z0 = make_gate(GateKind::Z, {0});
    auto g = one_qubit_graph({x0, z0});
    auto xz = g.expand(g.expand(SearchGraph::kRoot, z0).node, x0);
    auto zx = g.expand(g.expand(SearchGraph::kRoot, x0).node, z0);
    EXPECT_TRUE(xz.inserted);
    EXPECT_FALSE(zx.inserted);
    EXPECT_EQ(xz.node, zx.node);
    UnitaryMatrix xz_m = gate_unitary(z0, 1);
    xz_m.left_apply(x0);
    UnitaryMatrix zx_m = gate_unitary(x0, 1);
    zx_m.left_apply(z0);
    EXPECT_LT(testing::phase_aligned_diff(xz_m, zx_m), 1e-12);
    EXPECT_GT(xz_m.max_abs_diff(zx_m), 1);
}

TEST(Expand, ShorterPathRelaxesDepth) {
    // T^4 = Z reached first by four T gates, then directly.
    auto t0 = make_gate(GateKind::T, {0});
    auto z0 = make_gate(GateKind::Z, {0});
    auto g = one_qubit_graph({t0, z0});
    size_t cur = SearchGraph::kRoot;
    for (int i = 0; i < 4; i++) {
        cur = g.expand(cur, t0).node;
    }
    EXPECT_EQ(g.node(cur).depth, 4);
    auto direct = g.expand(SearchGraph::kRoot, z0);
    EXPECT_EQ(direct.node, cur);
    EXPECT_EQ(g.node(cur).depth, 1);
    EXPECT_EQ(g.circuit(cur).gates, std::vector<GateSpec>{z0});
    for (size_t id = 0; id < g.size(); id++) {
        for (const auto &e : g.node(id).edges) {
            EXPECT_LE(g.node(e.target).depth, g.node(id).depth + 1);
        }
    }
}

TEST(SelectNodes, SingleNodeGraph) {
    auto g = one_qubit_graph(enumerate_pool(1));
    SearchConfig cfg;
    Rng rng(5);
    size_t total = 0;
    for (int t = 0; t < 200; t++) {
        for (size_t id : select_nodes(g, cfg, rng)) {
            EXPECT_EQ(id, SearchGraph::kRoot);
            total++;
        }
    }
    EXPECT_GT(total, 0u);
}

TEST(SelectNodes, EqualLossesEqualFrequencies) {
    // X|0> and Y|0> have identical measurement distributions.
    auto g = one_qubit_graph({make_gate(GateKind::X, {0}), make_gate(GateKind::Y, {0})});
    auto a = g.expand(SearchGraph::kRoot, size_t{0}).node;
    auto b = g.expand(SearchGraph::kRoot, size_t{1}).node;
    ASSERT_EQ(g.node(a).loss, g.node(b).loss);
    const double wa = g.selection_weight(a), wb = g.selection_weight(b), wr = g.selection_weight(SearchGraph::kRoot);
    ASSERT_EQ(wa, wb);
    const double p = wa / (wa + wb + wr);
    Rng rng(11);
    const int draws = 100000;
    int ca = 0, cb = 0;
    for (int t = 0; t < draws; t++) {
        size_t id = g.sample_node(rng);
        ca += id == a;
        cb += id == b;
    }
    const double sigma = std::sqrt(draws * p * (1 - p));
    EXPECT_NEAR(ca, draws * p, 3 * sigma);
    EXPECT_NEAR(cb, draws * p, 3 * sigma);
    // Difference of two cells of a multinomial.
    EXPECT_LT(std::abs(ca - cb), 3 * std::sqrt(2.0 * draws * p));
}

TEST(SelectNodes, LargeBetaPicksTheBestNode) {
    auto g = one_qubit_graph({make_gate(GateKind::H, {0}), make_gate(GateKind::X, {0})}, 1000);
    auto h = g.expand(SearchGraph::kRoot, size_t{0}).node;
    g.expand(SearchGraph::kRoot, size_t{1});
    ASSERT_EQ(g.best(), h);
    SearchConfig cfg;
    Rng rng(13);
    size_t hits = 0, total = 0;
    for (int t = 0; t < 1000; t++) {
        for (size_t id : select_nodes(g, cfg, rng)) {
            hits += id == h;
            total++;
        }
    }
    EXPECT_EQ(hits, total);
}

TEST(McgsProperty, DedupSoundness) {
    Rng rng(17);
    for (int seq = 0; seq < 500; seq++) {
        int n = 1 + static_cast<int>(rng.below(3));
        auto pool = enumerate_pool(n);
        SearchGraph g(QuantumState::basis(n, 0), binomial_target(size_t{1} << n), pool, LossKind::KL, 50, 5);
        // Independent record of every path's product, per node id.
        std::vector<UnitaryMatrix> seen{UnitaryMatrix::identity(n)};
        std::vector<size_t> ids{SearchGraph::kRoot};
        std::vector<UnitaryMatrix> mats{UnitaryMatrix::identity(n)};
        for (int step = 0; step < 12; step++) {
            size_t pick = rng.below(ids.size());
            if (g.node(ids[pick]).depth >= 50) {
                continue;
            }
            size_t gate = rng.below(pool.size());
            auto r = g.expand(ids[pick], gate);
            UnitaryMatrix m = mats[pick];
            m.left_apply(pool[gate]);
            if (r.node < seen.size()) {
                ASSERT_LT(testing::phase_aligned_diff(seen[r.node], m), 1e-7);
            } else {
                ASSERT_EQ(r.node, seen.size());
                seen.push_back(m);
            }
            ids.push_back(r.node);
            mats.push_back(std::move(m));
        }
    }
}

TEST(McgsProperty, ExtractedCircuitReplaysNodeUnitary) {
    Rng rng(19);
    for (int t = 0; t < 20; t++) {
        int n = 2 + static_cast<int>(rng.below(2));
        SearchConfig cfg;
        cfg.max_nodes = 500;
        cfg.seed = rng.next_u64();
        auto x = testing::random_state(n, rng);
        auto y = binomial_target(size_t{1} << n);
        auto pool = enumerate_pool(n);
        SearchGraph g(x, y, pool, LossKind::KL, 30, 5);
        for (int step = 0; step < 300; step++) {
            size_t id = g.sample_node(rng);
            g.expand(id, static_cast<size_t>(rng.below(pool.size())));
        }
        for (size_t id = 0; id < g.size(); id += 7) {
            auto c = g.circuit(id);
            EXPECT_EQ(static_cast<int>(c.gates.size()), g.node(id).depth);
            EXPECT_LT(testing::phase_aligned_diff(compose(c), g.unitary(id)), 1e-8);
        }
        auto r = search(x, y, pool, cfg);
        EXPECT_LE(static_cast<int>(r.circuit.gates.size()), cfg.max_depth);
        EXPECT_NEAR(flow_loss(compose(r.circuit), x, y, LossKind::KL), r.loss, 1e-9);
    }
}

TEST(McgsProperty, BestLossTraceIsMonotone) {
    ExperimentConfig ec;
    auto ex = prepare(ec);
    SearchConfig cfg;
    cfg.max_nodes = 3000;
    cfg.loss = LossKind::COS;
    auto r = search(ex.input, ex.target, ex.pool, cfg);
    ASSERT_GT(r.trace.size(), 1u);
    for (size_t i = 1; i < r.trace.size(); i++) {
        EXPECT_LE(r.trace[i].best_loss, r.trace[i - 1].best_loss);
        EXPECT_GE(r.trace[i].nodes, r.trace[i - 1].nodes);
    }
    EXPECT_EQ(r.trace.back().best_loss, r.loss);
}

TEST(McgsProperty, SeedDeterminism) {
    ExperimentConfig ec;
    ec.dataset = "wine";
    ec.k = 2;
    auto ex = prepare(ec);
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        SearchConfig cfg;
        cfg.max_nodes = 2000;
        cfg.seed = seed;
        auto a = search(ex.input, ex.target, ex.pool, cfg);
        auto b = search(ex.input, ex.target, ex.pool, cfg);
        EXPECT_EQ(a.circuit.gates, b.circuit.gates);
        EXPECT_EQ(a.loss, b.loss);
        EXPECT_EQ(a.nodes, b.nodes);
    }
}

}  // namespace
}  // namespace qflow
