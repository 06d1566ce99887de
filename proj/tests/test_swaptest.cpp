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

TEST(ExactOverlap, Examples) {
    Rng rng(1);
    auto a = testing::random_state(3, rng);
    EXPECT_NEAR(exact_overlap(a, a), 1, 1e-12);
    EXPECT_EQ(exact_overlap(QuantumState::basis(2, 1), QuantumState::basis(2, 2)), 0);
    EXPECT_THROW(exact_overlap(QuantumState::basis(2, 1), QuantumState::basis(1, 0)), std::invalid_argument);
}

TEST(ExactOverlap, MatchesIndependentSum) {
    Rng rng(2);
    for (int t = 0; t < 50; t++) {
        auto a = testing::random_state(4, rng), b = testing::random_state(4, rng);
        double re = 0, im = 0;
        for (size_t k = 0; k < 16; k++) {
            // conj(a) b, component-wise.
            re += a[k].real() * b[k].real() + a[k].imag() * b[k].imag();
            im += a[k].real() * b[k].imag() - a[k].imag() * b[k].real();
        }
        EXPECT_NEAR(exact_overlap(a, b), re * re + im * im, 1e-12);
    }
}

TEST(SwapTestEstimate, IdenticalStates) {
    Rng rng(3);
    auto a = testing::random_state(2, rng);
    for (size_t shots : {1u, 10u, 1000u}) {
        auto e = swap_test_estimate(a, a, shots, rng);
        EXPECT_EQ(e.p_hat, 0);
        EXPECT_EQ(e.overlap_hat, 1);
    }
    EXPECT_THROW(swap_test_estimate(a, a, 0, rng), std::invalid_argument);
}

TEST(SwapTestEstimate, OrthogonalStatesApproachZeroOverlap) {
    Rng rng(4);
    auto a = QuantumState::basis(1, 0), b = QuantumState::basis(1, 1);
    EXPECT_EQ(swap_test_probability(exact_overlap(a, b)), 0.5);
    auto e = swap_test_estimate(a, b, 1000000, rng);
    EXPECT_NEAR(e.p_hat, 0.5, 0.005);
    EXPECT_LT(e.overlap_hat, 0.01);
}

TEST(SwapTestEstimate, HoeffdingFrequency) {
    const double eps = 0.05, delta = 0.05;
    const size_t shots = static_cast<size_t>(std::ceil(std::log(2 / delta) / (2 * eps * eps)));
    Rng rng(5);
    auto a = testing::random_state(3, rng), b = testing::random_state(3, rng);
    const double exact = exact_overlap(a, b);
    int within = 0;
    const int trials = 1000;
    for (int t = 0; t < trials; t++) {
        within += std::abs(swap_test_estimate(a, b, shots, rng).overlap_hat - exact) <= 2 * eps;
    }
    EXPECT_GE(within, static_cast<int>((1 - delta) * trials));
}

TEST(SwapTestEstimate, UnbiasedProbability) {
    Rng rng(6);
    auto a = testing::random_state(2, rng), b = testing::random_state(2, rng);
    const double p = swap_test_probability(exact_overlap(a, b));
    const int trials = 10000;
    const size_t shots = 10;
    double sum = 0;
    for (int t = 0; t < trials; t++) {
        sum += swap_test_estimate(a, b, shots, rng).p_hat;
    }
    const double sigma = std::sqrt(p * (1 - p) / (shots * static_cast<double>(trials)));
    EXPECT_NEAR(sum / trials, p, 3 * sigma);
}

TEST(SwapTestScore, DeterministicAndConvergesToExact) {
    Encoder enc{2, {{0, 1}, {0, 1}}};
    auto y = binomial_target(4);
    auto u = gate_unitary(make_gate(GateKind::H, {0}), 2);
    Row row = {0, 1};
    Rng r1(7), r2(7);
    EXPECT_EQ(swap_test_score(u, enc, row, y, 100, r1), swap_test_score(u, enc, row, y, 100, r2));
    Rng big(8);
    EXPECT_NEAR(swap_test_score(u, enc, row, y, 2000000, big), exact_swap_score(u, enc, row, y), 2e-3);
}

TEST(SwaptestProperty, Ranges) {
    Rng rng(9);
    for (int t = 0; t < 500; t++) {
        int n = 1 + static_cast<int>(rng.below(4));
        auto a = testing::random_state(n, rng), b = testing::random_state(n, rng);
        double o = exact_overlap(a, b);
        EXPECT_GE(o, 0);
        EXPECT_LE(o, 1);
        double p = swap_test_probability(o);
        EXPECT_GE(p, 0);
        EXPECT_LE(p, 0.5);
        auto e = swap_test_estimate(a, b, 1 + rng.below(50), rng);
        EXPECT_GE(e.overlap_hat, 0);
        EXPECT_LE(e.overlap_hat, 1);
    }
}

TEST(SwaptestProperty, AgreesWithCosineForRealNonNegativeStates) {
    Rng rng(10);
    auto y = binomial_target(8);
    auto phi = QuantumState::from_distribution(y);
    for (int t = 0; t < 50; t++) {
        auto p = testing::random_distribution(8, rng);
        auto psi = QuantumState::from_distribution(p);
        std::vector<double> a(8), b(8);
        for (size_t k = 0; k < 8; k++) {
            a[k] = std::sqrt(p[k]);
            b[k] = std::sqrt(y[k]);
        }
        double overlap = exact_overlap(psi, phi);
        EXPECT_NEAR(1 - cosine_dissimilarity(a, b), std::sqrt(overlap), 1e-12);
    }
}

}  // namespace
}  // namespace qflow
