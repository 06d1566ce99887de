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

// Monte Carlo graph search over gate sequences.
//
// The graph starts from the identity. Expanding a node multiplies one pool
// gate onto its unitary; children that equal an existing node up to global
// phase are merged into it, so the graph has cycles and every node keeps the
// shortest known gate path back to the root. Expansion slots are drawn as a
// Poisson count each step and assigned to nodes with probability
// proportional to exp(-beta * loss).
//
// Nodes do not retain their unitaries: a node's matrix is rebuilt by
// replaying its best-parent path, with a bounded cache of recent matrices.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <deque>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "qflow/gate.hpp"
#include "qflow/lossdist.hpp"
#include "qflow/qstate.hpp"
#include "qflow/random.hpp"

namespace qflow {

struct SearchConfig {
    int max_depth = 30;
    size_t max_nodes = 20000;
    LossKind loss = LossKind::KL;
    double target_loss = 1e-12;
    double beta = 5.0;
    /// Mean number of expansion slots per step.
    double lambda = 4.0;
    /// Stop after this many consecutive node insertions without improvement.
    size_t stall_window = 2000;
    std::uint64_t seed = 0;

    void validate() const {
        if (max_depth < 1) {
            throw std::invalid_argument("max_depth must be >= 1");
        }
        if (max_nodes < 1) {
            throw std::invalid_argument("node budget must be >= 1");
        }
        if (!(beta > 0) || !(lambda > 0)) {
            throw std::invalid_argument("beta and lambda must be positive");
        }
        if (stall_window < 1) {
            throw std::invalid_argument("stall_window must be >= 1");
        }
    }
};

struct Fingerprint {
    std::uint64_t lo = 0;
    std::uint64_t hi = 0;
    friend bool operator==(const Fingerprint &, const Fingerprint &) = default;
};

struct FingerprintHash {
    size_t operator()(const Fingerprint &f) const { return static_cast<size_t>(f.lo ^ (f.hi * 0x9E3779B97F4A7C15ULL)); }
};

/// Hash of the unitary after dividing out the phase of its first entry with
/// magnitude > 1e-6 and rounding every component to 8 decimals.
inline Fingerprint fingerprint(const UnitaryMatrix &u) {
    auto data = u.data();
    Complex phase = 1;
    for (const auto &z : data) {
        double a = std::abs(z);
        if (a > 1e-6) {
            phase = std::conj(z) / a;
            break;
        }
    }
    Fingerprint f{0xcbf29ce484222325ULL, 0x84222325cbf29ce4ULL};
    auto feed = [&](double x) {
        std::int64_t r = std::llround(x * 1e8);
        std::uint64_t v;
        std::memcpy(&v, &r, sizeof(v));
        for (int b = 0; b < 8; b++) {
            f.lo ^= (v >> (8 * b)) & 0xff;
            f.lo *= 0x100000001b3ULL;
        }
        f.hi = mix_seed(f.hi ^ v, 0);
    };
    for (const auto &z : data) {
        Complex w = z * phase;
        feed(w.real());
        feed(w.imag());
    }
    return f;
}

struct Edge {
    size_t target;
    size_t gate;
};

struct ParentLink {
    size_t node;
    size_t gate;
};

struct SearchNode {
    Fingerprint fingerprint;
    double loss = 0;
    /// Shortest known gate count from the root.
    int depth = 0;
    std::optional<ParentLink> best_parent;
    std::vector<Edge> edges;
};

namespace detail {

/// Fenwick tree over nonnegative weights supporting append, point update and
/// sampling proportional to weight.
class WeightTree {
   public:
    size_t size() const { return weights_.size(); }
    double weight(size_t i) const { return weights_[i]; }
    double total() const { return total_; }

    void push_back(double w) {
        weights_.push_back(0);
        tree_.push_back(0);
        size_t i = weights_.size();
        // A new Fenwick slot covers (i - lowbit(i), i]; fill it from the prefix.
        size_t lowbit = i & (~i + 1);
        double s = 0;
        for (size_t j = i - 1; j > i - lowbit; j -= (j & (~j + 1))) {
            s += tree_[j - 1];
        }
        tree_[i - 1] = s;
        set(i - 1, w);
    }

    void set(size_t i, double w) {
        double delta = w - weights_[i];
        if (delta == 0) {
            return;
        }
        weights_[i] = w;
        total_ += delta;
        for (size_t j = i + 1; j <= tree_.size(); j += (j & (~j + 1))) {
            tree_[j - 1] += delta;
        }
    }

    void rebuild(const std::vector<double> &w) {
        weights_ = w;
        tree_.assign(w.size(), 0);
        total_ = 0;
        for (size_t i = 0; i < w.size(); i++) {
            total_ += w[i];
            tree_[i] += w[i];
            size_t parent = (i + 1) + ((i + 1) & (~(i + 1) + 1));
            if (parent <= tree_.size()) {
                tree_[parent - 1] += tree_[i];
            }
        }
    }

    /// Index drawn with probability weight(i) / total(). Requires total() > 0.
    size_t sample(double u01) const {
        double target = u01 * total_;
        size_t pos = 0;
        size_t step = 1;
        while (step * 2 <= tree_.size()) {
            step *= 2;
        }
        for (; step > 0; step /= 2) {
            if (pos + step <= tree_.size() && tree_[pos + step - 1] <= target) {
                pos += step;
                target -= tree_[pos - 1];
            }
        }
        size_t idx = std::min(pos, weights_.size() - 1);
        // Rounding can land on a zero-weight slot; step back to a live one.
        while (weights_[idx] == 0 && idx > 0) {
            idx--;
        }
        while (weights_[idx] == 0 && idx + 1 < weights_.size()) {
            idx++;
        }
        return idx;
    }

   private:
    std::vector<double> weights_;
    std::vector<double> tree_;
    double total_ = 0;
};

}  // namespace detail

class SearchGraph {
   public:
    static constexpr size_t kRoot = 0;

    struct ExpandResult {
        size_t node;
        bool inserted;
    };

    SearchGraph(
        QuantumState input,
        DiscreteDistribution target,
        std::vector<GateSpec> pool,
        LossKind loss_kind,
        int max_depth,
        double beta)
        : input_(std::move(input)),
          target_(std::move(target)),
          pool_(std::move(pool)),
          loss_kind_(loss_kind),
          max_depth_(max_depth),
          beta_(beta) {
        if (input_.dim() != target_.size()) {
            throw std::invalid_argument("input state and target distribution dimensions differ");
        }
        if (pool_.empty()) {
            throw std::invalid_argument("gate pool is empty");
        }
        if (max_depth_ < 1) {
            throw std::invalid_argument("max_depth must be >= 1");
        }
        for (const auto &g : pool_) {
            validate_gate(g, input_.num_qubits());
        }
        size_t bytes = input_.dim() * input_.dim() * sizeof(Complex);
        cache_capacity_ = std::max<size_t>(64, (size_t{64} << 20) / bytes);

        UnitaryMatrix id = UnitaryMatrix::identity(input_.num_qubits());
        SearchNode root;
        root.fingerprint = fingerprint(id);
        root.loss = loss_of_amplitudes(input_.amplitudes(), target_, loss_kind_);
        root.depth = 0;
        nodes_.push_back(root);
        index_.emplace(root.fingerprint, kRoot);
        best_ = kRoot;
        weights_.push_back(weight_of(nodes_[kRoot]));
        cache_.emplace(kRoot, std::move(id));
    }

    size_t size() const { return nodes_.size(); }
    const SearchNode &node(size_t id) const { return nodes_.at(id); }
    const std::vector<GateSpec> &pool() const { return pool_; }
    const QuantumState &input() const { return input_; }
    const DiscreteDistribution &target() const { return target_; }
    LossKind loss_kind() const { return loss_kind_; }
    int max_depth() const { return max_depth_; }
    size_t best() const { return best_; }
    double best_loss() const { return nodes_[best_].loss; }

    std::optional<size_t> find(const Fingerprint &f) const {
        auto it = index_.find(f);
        if (it == index_.end()) {
            return std::nullopt;
        }
        return it->second;
    }

    /// Unnormalized selection weight: exp(-beta * (loss - best loss)), or 0
    /// for nodes at max depth (they cannot be extended).
    double selection_weight(size_t id) const { return weights_.weight(id); }
    double total_weight() const { return weights_.total(); }
    size_t sample_node(Rng &rng) const { return weights_.sample(rng.uniform()); }

    size_t gate_index(const GateSpec &gate) const {
        for (size_t k = 0; k < pool_.size(); k++) {
            if (pool_[k] == gate) {
                return k;
            }
        }
        throw std::invalid_argument("gate " + gate.str() + " is not in the pool");
    }

    ExpandResult expand(size_t id, const GateSpec &gate) { return expand(id, gate_index(gate)); }

    /// Applies pool gate `gate` after node `id`'s unitary. Returns the existing
    /// node when the product is already in the graph (up to global phase),
    /// relaxing shortest paths; otherwise inserts and scores a new node.
    ExpandResult expand(size_t id, size_t gate) {
        if (id >= nodes_.size()) {
            throw std::out_of_range("node id out of range");
        }
        if (gate >= pool_.size()) {
            throw std::out_of_range("gate index out of range");
        }
        if (nodes_[id].depth >= max_depth_) {
            throw std::invalid_argument("node is at maximum depth");
        }
        UnitaryMatrix u = unitary(id);
        u.left_apply(pool_[gate]);
        Fingerprint fp = fingerprint(u);
        if (auto it = index_.find(fp); it != index_.end()) {
            size_t child = it->second;
            add_edge(id, child, gate);
            relax(id, child, gate);
            return {child, false};
        }

        SearchNode node;
        node.fingerprint = fp;
        node.loss = loss_of_amplitudes(u.apply(input_.amplitudes()), target_, loss_kind_);
        node.depth = nodes_[id].depth + 1;
        node.best_parent = ParentLink{id, gate};
        size_t child = nodes_.size();
        nodes_.push_back(std::move(node));
        index_.emplace(fp, child);
        add_edge(id, child, gate);
        remember(child, std::move(u));
        if (nodes_[child].loss < nodes_[best_].loss) {
            best_ = child;
            rebuild_weights();
        } else {
            weights_.push_back(weight_of(nodes_[child]));
        }
        return {child, true};
    }

    /// Gate path from the root along best-parent links.
    Circuit circuit(size_t id) const {
        Circuit c{input_.num_qubits(), {}};
        for (size_t cur = id; nodes_.at(cur).best_parent;) {
            const auto &link = *nodes_[cur].best_parent;
            c.gates.push_back(pool_[link.gate]);
            cur = link.node;
        }
        std::reverse(c.gates.begin(), c.gates.end());
        return c;
    }

    /// The node's unitary (up to global phase): cached, or replayed along its
    /// best-parent path from the nearest cached ancestor.
    UnitaryMatrix unitary(size_t id) const {
        if (auto it = cache_.find(id); it != cache_.end()) {
            return it->second;
        }
        std::vector<size_t> gates;
        size_t cur = id;
        while (true) {
            if (cache_.count(cur)) {
                break;
            }
            if (!nodes_.at(cur).best_parent) {
                break;
            }
            gates.push_back(nodes_[cur].best_parent->gate);
            cur = nodes_[cur].best_parent->node;
        }
        UnitaryMatrix u;
        if (auto it = cache_.find(cur); it != cache_.end()) {
            u = it->second;
        } else {
            u = UnitaryMatrix::identity(input_.num_qubits());
        }
        for (auto g = gates.rbegin(); g != gates.rend(); ++g) {
            u.left_apply(pool_[*g]);
        }
        remember(id, u);
        return u;
    }

   private:
    double weight_of(const SearchNode &n) const {
        if (n.depth >= max_depth_ || !std::isfinite(n.loss)) {
            return 0;
        }
        return std::exp(-beta_ * (n.loss - nodes_[best_].loss));
    }

    void rebuild_weights() {
        std::vector<double> w(nodes_.size());
        for (size_t i = 0; i < nodes_.size(); i++) {
            w[i] = weight_of(nodes_[i]);
        }
        weights_.rebuild(w);
    }

    void add_edge(size_t from, size_t to, size_t gate) {
        for (const auto &e : nodes_[from].edges) {
            if (e.target == to && e.gate == gate) {
                return;
            }
        }
        nodes_[from].edges.push_back(Edge{to, gate});
    }

    void relax(size_t parent, size_t child, size_t gate) {
        if (nodes_[parent].depth + 1 >= nodes_[child].depth) {
            return;
        }
        nodes_[child].depth = nodes_[parent].depth + 1;
        nodes_[child].best_parent = ParentLink{parent, gate};
        weights_.set(child, weight_of(nodes_[child]));
        std::deque<size_t> queue{child};
        while (!queue.empty()) {
            size_t cur = queue.front();
            queue.pop_front();
            for (const auto &e : nodes_[cur].edges) {
                if (nodes_[cur].depth + 1 < nodes_[e.target].depth) {
                    nodes_[e.target].depth = nodes_[cur].depth + 1;
                    nodes_[e.target].best_parent = ParentLink{cur, e.gate};
                    weights_.set(e.target, weight_of(nodes_[e.target]));
                    queue.push_back(e.target);
                }
            }
        }
    }

    void remember(size_t id, UnitaryMatrix u) const {
        if (cache_.size() >= cache_capacity_) {
            // Keep the root; everything else can be replayed.
            UnitaryMatrix root = cache_.at(kRoot);
            cache_.clear();
            cache_.emplace(kRoot, std::move(root));
        }
        cache_.insert_or_assign(id, std::move(u));
    }

    QuantumState input_;
    DiscreteDistribution target_;
    std::vector<GateSpec> pool_;
    LossKind loss_kind_;
    int max_depth_;
    double beta_;

    std::vector<SearchNode> nodes_;
    std::unordered_map<Fingerprint, size_t, FingerprintHash> index_;
    size_t best_ = kRoot;
    detail::WeightTree weights_;
    size_t cache_capacity_ = 64;
    mutable std::unordered_map<size_t, UnitaryMatrix> cache_;
};

/// Draws a Poisson(lambda) number of expansion slots and assigns each to a
/// node with probability proportional to its selection weight.
inline std::vector<size_t> select_nodes(const SearchGraph &graph, const SearchConfig &cfg, Rng &rng) {
    std::vector<size_t> out;
    if (graph.size() == 0 || !(graph.total_weight() > 0)) {
        return out;
    }
    std::uint64_t slots = rng.poisson(cfg.lambda);
    out.reserve(slots);
    for (std::uint64_t s = 0; s < slots; s++) {
        out.push_back(graph.sample_node(rng));
    }
    return out;
}

struct TracePoint {
    size_t step;
    size_t nodes;
    double best_loss;
};

enum class StopReason { TargetReached, NodeBudget, Stalled, Exhausted };

inline std::string_view stop_reason_name(StopReason r) {
    switch (r) {
        case StopReason::TargetReached: return "target_reached";
        case StopReason::NodeBudget: return "node_budget";
        case StopReason::Stalled: return "stalled";
        case StopReason::Exhausted: return "exhausted";
    }
    return "unknown";
}

struct SearchResult {
    Circuit circuit;
    double loss = 0;
    size_t best_node = 0;
    std::vector<TracePoint> trace;
    size_t nodes = 0;
    size_t expansions = 0;
    StopReason reason = StopReason::NodeBudget;
};

/// Grows the graph from the identity until the target loss is met, the node
/// budget is spent, `stall_window` insertions pass without improvement, or
/// expansion stops producing new nodes. Deterministic for a fixed seed.
inline SearchResult search(
    const QuantumState &input, const DiscreteDistribution &target, const std::vector<GateSpec> &pool,
    const SearchConfig &cfg) {
    cfg.validate();
    SearchGraph graph(input, target, pool, cfg.loss, cfg.max_depth, cfg.beta);
    Rng rng(cfg.seed);

    // Expansions in a row that only revisit known nodes before giving up.
    const size_t exhaust_limit = std::max<size_t>(10000, 50 * pool.size());

    SearchResult result;
    result.trace.push_back({0, graph.size(), graph.best_loss()});
    size_t step = 0;
    size_t since_improvement = 0;
    size_t since_insertion = 0;
    auto done = [&]() -> std::optional<StopReason> {
        if (graph.best_loss() <= cfg.target_loss) {
            return StopReason::TargetReached;
        }
        if (graph.size() >= cfg.max_nodes) {
            return StopReason::NodeBudget;
        }
        if (since_improvement >= cfg.stall_window) {
            return StopReason::Stalled;
        }
        if (since_insertion >= exhaust_limit || !(graph.total_weight() > 0)) {
            return StopReason::Exhausted;
        }
        return std::nullopt;
    };

    std::optional<StopReason> stop;
    while (!(stop = done())) {
        step++;
        for (size_t id : select_nodes(graph, cfg, rng)) {
            size_t gate = static_cast<size_t>(rng.below(pool.size()));
            double before = graph.best_loss();
            auto r = graph.expand(id, gate);
            result.expansions++;
            if (r.inserted) {
                since_insertion = 0;
                if (graph.best_loss() < before) {
                    since_improvement = 0;
                } else {
                    since_improvement++;
                }
            } else {
                since_insertion++;
            }
            if (done()) {
                break;
            }
        }
        result.trace.push_back({step, graph.size(), graph.best_loss()});
    }

    result.reason = *stop;
    result.best_node = graph.best();
    result.loss = graph.best_loss();
    result.circuit = graph.circuit(graph.best());
    result.nodes = graph.size();
    return result;
}

}  // namespace qflow
