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
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qflow {

/// Probability mass over basis indices 0..size()-1.
class DiscreteDistribution {
   public:
    static constexpr double kSumTolerance = 1e-9;

    DiscreteDistribution() = default;

    /// Takes ownership of `probs`; entries must be nonnegative and sum to 1.
    explicit DiscreteDistribution(std::vector<double> probs) : probs_(std::move(probs)) {
        double sum = 0;
        for (double p : probs_) {
            if (!(p >= 0) || !std::isfinite(p)) {
                throw std::invalid_argument("probability entries must be finite and nonnegative");
            }
            sum += p;
        }
        if (std::abs(sum - 1.0) > kSumTolerance) {
            throw std::invalid_argument("probabilities sum to " + std::to_string(sum) + ", expected 1");
        }
    }

    /// Normalizes nonnegative weights to a distribution.
    static DiscreteDistribution from_weights(std::vector<double> weights) {
        double sum = 0;
        for (double w : weights) {
            if (!(w >= 0) || !std::isfinite(w)) {
                throw std::invalid_argument("weights must be finite and nonnegative");
            }
            sum += w;
        }
        if (sum <= 0) {
            throw std::invalid_argument("weights have zero total mass");
        }
        for (double &w : weights) {
            w /= sum;
        }
        return DiscreteDistribution(std::move(weights));
    }

    size_t size() const { return probs_.size(); }
    double operator[](size_t k) const { return probs_[k]; }
    std::span<const double> probs() const { return probs_; }

    friend bool operator==(const DiscreteDistribution &, const DiscreteDistribution &) = default;

   private:
    std::vector<double> probs_;
};

}  // namespace qflow
