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
#include <limits>
#include <numbers>

#include "test_util.hpp"

namespace qflow {
namespace {

struct IrisFlow {
    PreparedExperiment ex;
    UnitaryMatrix u;
};

const IrisFlow &iris_flow() {
    static const IrisFlow flow = [] {
        ExperimentConfig cfg;
        auto ex = prepare(cfg);
        auto u = compose(run_search(ex).result.circuit);
        return IrisFlow{std::move(ex), std::move(u)};
    }();
    return flow;
}

TEST(SampleLatent, ZeroPhaseIsSqrtTarget) {
    Rng rng(1);
    auto y = binomial_target(16);
    auto s = sample_latent(y, rng, true);
    for (size_t k = 0; k < 16; k++) {
        EXPECT_EQ(s[k], Complex(std::sqrt(y[k])));
    }
}

TEST(SampleLatent, MeasurementReproducesTarget) {
    Rng rng(2);
    auto y = binomial_target(32);
    for (int t = 0; t < 200; t++) {
        auto p = measurement_distribution(sample_latent(y, rng));
        for (size_t k = 0; k < 32; k++) {
            ASSERT_NEAR(p[k], y[k], 1e-12);
        }
    }
}

TEST(SampleLatent, PhasesAreUniform) {
    Rng rng(3);
    auto y = binomial_target(4);
    constexpr int kBins = 20;
    std::vector<int> counts(kBins);
    const int draws = 10000;
    for (int t = 0; t < draws; t++) {
        auto s = sample_latent(y, rng);
        double phase = std::arg(s[1]);
        if (phase < 0) {
            phase += 2 * std::numbers::pi;
        }
        counts[std::min(kBins - 1, static_cast<int>(phase / (2 * std::numbers::pi) * kBins))]++;
    }
    double chi2 = 0;
    const double expected = static_cast<double>(draws) / kBins;
    for (int c : counts) {
        chi2 += (c - expected) * (c - expected) / expected;
    }
    // Upper 1% point of chi-square with 19 degrees of freedom.
    EXPECT_LT(chi2, 36.191);
}

TEST(InvertFlow, IdentityAndDimensionCheck) {
    Rng rng(4);
    auto x = testing::random_state(3, rng);
    auto back = invert_flow(UnitaryMatrix::identity(3), x);
    for (size_t k = 0; k < x.dim(); k++) {
        EXPECT_EQ(back[k], x[k]);
    }
    EXPECT_THROW(invert_flow(UnitaryMatrix::identity(2), x), std::invalid_argument);
}

TEST(InvertFlow, LearnedIrisFlowMapsSqrtTargetToZeroLoss) {
    const auto &flow = iris_flow();
    Rng rng(5);
    auto candidate = invert_flow(flow.u, sample_latent(flow.ex.target, rng, true));
    EXPECT_NEAR(flow_loss(flow.u, candidate, flow.ex.target, LossKind::KL), 0, 1e-10);
}

TEST(DecodeSample, RoundTripThroughEncoding) {
    const auto &enc = iris_flow().ex.encoder;
    for (const auto &row : iris_flow().ex.dataset.rows) {
        auto decoded = decode_sample(enc, encode_sample(enc, row));
        for (size_t f = 0; f < row.size(); f++) {
            EXPECT_EQ(decoded[f], enc.centroids[f][enc.bin_of(f, row[f])]);
        }
        EXPECT_EQ(enc.active_indices(decoded), enc.active_indices(row));
    }
}

TEST(DecodeSample, UniformGroupPicksLowestCentroid) {
    Encoder enc{2, {{0, 1}, {5, 6}}};
    std::vector<Complex> amps = {0.5, 0.5, 0.5, 0.5};
    EXPECT_EQ(decode_sample(enc, QuantumState(2, amps)), (Row{0, 5}));
}

TEST(DecodeSample, ZeroMassFeatureIsUndecodable) {
    Encoder enc{2, {{0, 1}, {5, 6}}};
    std::vector<Complex> amps = {1, 0, 0, 0};
    EXPECT_THROW(decode_sample(enc, QuantumState(2, amps)), std::domain_error);
}

TEST(Generate, InfiniteTauAcceptsEverything) {
    const auto &flow = iris_flow();
    Rng rng(6);
    auto res = generate(flow.u, flow.ex.encoder, flow.ex.target, 10, std::numeric_limits<double>::infinity(), rng);
    EXPECT_EQ(res.samples.size(), 10u);
    EXPECT_EQ(res.attempts, 10u + res.undecodable);
    EXPECT_FALSE(res.below_floor);
}

TEST(Generate, ZeroTauAcceptsOnlyExactReproductions) {
    const auto &flow = iris_flow();
    Rng rng(7);
    GenerateOptions opts;
    opts.max_attempts = 500;
    auto res = generate(flow.u, flow.ex.encoder, flow.ex.target, 5, 0, rng, opts);
    for (const auto &s : res.samples) {
        EXPECT_EQ(s.score, 0);
    }
    EXPECT_TRUE(res.below_floor);
    EXPECT_EQ(res.attempts, 500u);
    EXPECT_THROW(generate(flow.u, flow.ex.encoder, flow.ex.target, 5, -1, rng), std::invalid_argument);
}

TEST(Generate, AcceptedScoresBoundRejectedScores) {
    const auto &flow = iris_flow();
    const auto &ex = flow.ex;
    double tau = default_tau(flow.u, ex.encoder, ex.train_rows(), ex.target, LossKind::KL);
    Rng rng(8), replay(8);
    const size_t count = 10;
    auto res = generate(flow.u, ex.encoder, ex.target, count, tau, rng);
    ASSERT_FALSE(res.samples.empty());

    // Redraw the same candidates and split them at tau.
    std::vector<double> accepted, rejected;
    for (size_t a = 0; a < res.attempts; a++) {
        auto candidate = invert_flow(flow.u, sample_latent(ex.target, replay));
        Row row;
        try {
            row = decode_sample(ex.encoder, candidate);
        } catch (const std::domain_error &) {
            continue;
        }
        // Decoded rows re-encode to the bins they were decoded from.
        auto again = encode_sample(ex.encoder, row);
        EXPECT_EQ(decode_sample(ex.encoder, again), row);
        double score = flow_score(flow.u, ex.encoder, row, ex.target, LossKind::KL);
        (score <= tau ? accepted : rejected).push_back(score);
    }
    ASSERT_EQ(accepted.size(), res.samples.size());
    for (size_t i = 0; i < accepted.size(); i++) {
        EXPECT_EQ(accepted[i], res.samples[i].score);
        EXPECT_LE(res.samples[i].score, tau);
    }
    for (double a : accepted) {
        for (double r : rejected) {
            EXPECT_LE(a, r);
        }
    }
}

TEST(Quantile, LinearInterpolation) {
    EXPECT_DOUBLE_EQ(quantile({4, 1, 3, 2}, 0.5), 2.5);
    EXPECT_DOUBLE_EQ(quantile({1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11}, 0.9), 10);
    EXPECT_DOUBLE_EQ(quantile({7}, 0.9), 7);
    EXPECT_THROW(quantile({}, 0.5), std::invalid_argument);
}

TEST(GenflowProperty, InverseUndoesForward) {
    Rng rng(9);
    for (int t = 0; t < 100; t++) {
        int n = 1 + static_cast<int>(rng.below(5));
        auto u = compose(testing::random_circuit(n, 30, rng));
        auto x = testing::random_state(n, rng);
        auto back = invert_flow(u, u * x);
        for (size_t k = 0; k < x.dim(); k++) {
            ASSERT_LT(std::abs(back[k] - x[k]), 1e-10);
        }
    }
}

TEST(GenflowProperty, EveryAcceptedScoreIsWithinTau) {
    const auto &flow = iris_flow();
    Rng rng(10);
    for (int t = 0; t < 10; t++) {
        double tau = 0.5 + 2 * rng.uniform();
        auto res = generate(flow.u, flow.ex.encoder, flow.ex.target, 5, tau, rng);
        for (const auto &s : res.samples) {
            EXPECT_LE(s.score, tau);
            EXPECT_EQ(s.score, flow_score(flow.u, flow.ex.encoder, s.values, flow.ex.target, LossKind::KL));
        }
    }
}

}  // namespace
}  // namespace qflow
