// Copyright 2026 The lhv Authors
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

#include "lhv/emission.h"

#include <gtest/gtest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>

#include "oracles.h"

namespace lhv {
namespace {

double chi_quantile(int categories, double p) {
    return boost::math::quantile(boost::math::chi_squared(categories - 1), p);
}

TEST(Trace, WaitsHaveMeanTheta) {
    RandomStream rng(1);
    const uint64_t k = 1000000;
    for (double theta : {1.0, 0.37}) {
        EmissionTrace t = generate_trace(theta, k, rng);
        double mean = 0.0;
        for (double w : t.waits) {
            mean += w;
        }
        mean /= k;
        EXPECT_NEAR(mean, theta, 3.29 * theta / std::sqrt(static_cast<double>(k)));
        EXPECT_DOUBLE_EQ(t.intensity(), 1.0 / theta);
    }
}

TEST(Trace, InvariantsHold) {
    RandomStream rng(2);
    EmissionTrace t = generate_trace(2.5, 100000, rng);
    ASSERT_EQ(t.size(), 100000u);
    for (size_t i = 0; i < t.size(); ++i) {
        EXPECT_GT(t.waits[i], 0.0);
        if (i > 0) {
            EXPECT_GT(t.cums[i], t.cums[i - 1]);
        }
        EXPECT_EQ(t.fracs[i], t.cums[i] - std::floor(t.cums[i]));
        EXPECT_GE(t.fracs[i], 0.0);
        EXPECT_LT(t.fracs[i], 1.0);
    }
}

TEST(Trace, ReplaysAndValidates) {
    RandomStream a(3), b(3);
    EXPECT_EQ(generate_trace(1.0, 1000, a).cums, generate_trace(1.0, 1000, b).cums);
    EXPECT_THROW(generate_trace(0.0, 10, a), std::domain_error);
    EXPECT_THROW(generate_trace(-1.0, 10, a), std::domain_error);
    EXPECT_THROW(generate_trace(1.0, 0, a), std::domain_error);
}

TEST(StarDiscrepancy, Examples) {
    std::vector<double> one = {0.5};
    EXPECT_DOUBLE_EQ(star_discrepancy(one), 0.5);
    std::vector<double> grid;
    for (int i = 1; i <= 10; ++i) {
        grid.push_back((2 * i - 1) / 20.0);
    }
    EXPECT_NEAR(star_discrepancy(grid), 0.05, 1e-15);
    std::vector<double> two = {0.75, 0.25};
    EXPECT_DOUBLE_EQ(star_discrepancy(two), 0.25);
    EXPECT_THROW(star_discrepancy(std::vector<double>{}), std::domain_error);
    EXPECT_THROW(star_discrepancy(std::vector<double>{1.0}), std::domain_error);
    EXPECT_THROW(star_discrepancy(std::vector<double>{-0.1}), std::domain_error);
}

TEST(ExtremeDiscrepancy, SinglePoint) {
    // [0.5, 0.5 + eps) holds the only point in a sliver of length eps.
    std::vector<double> one = {0.5};
    EXPECT_DOUBLE_EQ(oracle::extreme_discrepancy(one), 1.0);
    EXPECT_DOUBLE_EQ(extreme_discrepancy(one).lower, 1.0);
    EXPECT_TRUE(extreme_discrepancy(one).exact);
    EXPECT_THROW(extreme_discrepancy(std::vector<double>{}), std::domain_error);
}

TEST(ExtremeDiscrepancy, EquallySpaced) {
    for (int k : {1, 2, 5, 10, 64}) {
        std::vector<double> x;
        for (int i = 0; i < k; ++i) {
            x.push_back(static_cast<double>(i) / k);
        }
        double star = star_discrepancy(x);
        double ext = extreme_discrepancy(x).lower;
        EXPECT_NEAR(ext, oracle::extreme_discrepancy(x), 1e-14);
        EXPECT_LE(star, ext + 1e-15);
        EXPECT_LE(ext, 2 * star + 1e-15);
    }
}

TEST(ExtremeDiscrepancy, MatchesBruteForce) {
    RandomStream rng(4);
    for (int t = 0; t < 200; ++t) {
        int k = 1 + static_cast<int>(rng.below(60));
        std::vector<double> x(k);
        for (double &p : x) {
            // Coarse values so that ties and the endpoint 0 occur.
            p = rng.bernoulli(0.5) ? rng.below(8) / 8.0 : rng.uniform();
        }
        double ext = extreme_discrepancy(x).lower;
        double star = star_discrepancy(x);
        EXPECT_NEAR(ext, oracle::extreme_discrepancy(x), 1e-14);
        EXPECT_LE(star, ext + 1e-15);
        EXPECT_LE(ext, 2 * star + 1e-15);
        EXPECT_LE(ext, 1.0);
    }
}

TEST(DiscrepancyStats, Counts) {
    std::vector<double> x = {0.1, 0.2, 0.2, 0.7};
    DiscrepancyStats s = discrepancy_stats(x);
    EXPECT_EQ(s.k, 4u);
    EXPECT_EQ(s.count(0.0, 1.0), 4u);
    EXPECT_EQ(s.count(0.2, 0.7), 2u);
    EXPECT_EQ(s.count(0.15, 0.2), 0u);
    EXPECT_EQ(s.count(0.5, 0.5), 0u);
    EXPECT_DOUBLE_EQ(s.star, star_discrepancy(x));
    EXPECT_DOUBLE_EQ(s.extreme, oracle::extreme_discrepancy(x));
}

TEST(Labels, FromTime) {
    EXPECT_EQ(label_from_time(3.14, 10), 2);
    EXPECT_EQ(label_from_time(5.0, 10), 1);
    EXPECT_EQ(label_from_time(0.999999999, 10), 10);
    EXPECT_EQ(label_from_time(2.5, 1), 1);
    EXPECT_EQ(label_from_time(7.31, 4), label_from_time(7.31, 4));
    EXPECT_THROW(label_from_time(1.0, 0), std::domain_error);
}

TEST(Labels, PoissonLabelsAreUniform) {
    RandomStream rng(5);
    EmissionTrace t = generate_trace(1.0, 100000, rng);
    std::vector<uint64_t> counts(100, 0);
    for (double x : t.cums) {
        ++counts[label_from_time(x, 100) - 1];
    }
    EXPECT_LT(chi_square_uniform(counts), chi_quantile(100, 0.999));
}

TEST(Slope, FitsPowerLaw) {
    std::vector<double> x = {10, 100, 1000}, y = {2.0, 0.2, 0.02};
    SlopeFit f = fit_loglog_slope(x, y);
    EXPECT_NEAR(f.slope, -1.0, 1e-12);
    for (double r : f.residuals) {
        EXPECT_NEAR(r, 0.0, 1e-12);
    }
    EXPECT_THROW(fit_loglog_slope(std::vector<double>{1}, std::vector<double>{1}), std::invalid_argument);
    EXPECT_THROW(fit_loglog_slope(std::vector<double>{1, 2}, std::vector<double>{0, 1}), std::invalid_argument);
}

TEST(Robbins, PoissonSlope) {
    std::vector<uint64_t> ks = {1000, 10000, 100000};
    RobbinsCheck c = robbins_rate_check(1.0, ks, RandomStream(6));
    EXPECT_LE(c.fit.slope, -0.4);
    EXPECT_EQ(c.star.size(), 3u);
    EXPECT_THROW(robbins_rate_check(1.0, std::vector<uint64_t>{100, 1000}, RandomStream(1)), std::domain_error);
    EXPECT_THROW(robbins_rate_check(1.0, std::vector<uint64_t>{5000, 2000}, RandomStream(1)), std::domain_error);
}

TEST(Robbins, Controls) {
    // Independent uniforms decay like k^(-1/2); a constant point set does not decay.
    RandomStream rng(7);
    std::vector<double> ks = {1000, 10000, 100000};
    std::vector<double> uniform_d(3, 0.0), constant_d;
    for (int r = 0; r < 8; ++r) {
        std::vector<double> pts(100000);
        for (double &p : pts) {
            p = rng.uniform();
        }
        for (int j = 0; j < 3; ++j) {
            uniform_d[j] += star_discrepancy(std::span<const double>(pts.data(), static_cast<size_t>(ks[j]))) / 8;
        }
    }
    for (double k : ks) {
        constant_d.push_back(star_discrepancy(std::vector<double>(static_cast<size_t>(k), 0.3)));
    }
    EXPECT_NEAR(fit_loglog_slope(ks, uniform_d).slope, -0.5, 0.1);
    EXPECT_NEAR(fit_loglog_slope(ks, constant_d).slope, 0.0, 1e-9);
}

TEST(Gate, NoGatingKeepsEverything) {
    RandomStream rng(8);
    GateResult g = detector_gate(1.0, 1.0, 20, 50000, 1.0, rng);
    EXPECT_EQ(g.accepted, g.emitted);
    EXPECT_EQ(g.gated_counts, g.all_counts);
    EXPECT_EQ(g.tv_gated_vs_all(), 0.0);
}

TEST(Gate, HalfReadinessStaysUniform) {
    RandomStream rng(9);
    GateResult g = detector_gate(0.5, 0.5, 50, 1000000, 1.0, rng);
    EXPECT_LT(chi_square_uniform(g.gated_counts), chi_quantile(50, 0.999));
    EXPECT_LT(chi_square_uniform(g.all_counts), chi_quantile(50, 0.999));
    double sd = std::sqrt(0.25 * 0.75 / 1e6);
    EXPECT_NEAR(g.acceptance_rate(), 0.25, 3.29 * sd);
    // Each gated frequency has sd about sqrt(p / accepted) with p = 1/50.
    double se = std::sqrt((1.0 / 50) / g.accepted);
    EXPECT_LE(g.tv_gated_vs_all(), 0.5 * 50 * 4 * se);
}

TEST(Gate, AcceptanceRateIsProduct) {
    RandomStream rng(10);
    const uint64_t k = 1000000;
    GateResult g = detector_gate(0.9, 0.1, 10, k, 1.0, rng);
    double p = 0.09;
    EXPECT_NEAR(g.acceptance_rate(), p, 3.29 * std::sqrt(p * (1 - p) / k));
}

TEST(Gate, Validates) {
    RandomStream rng(11);
    EXPECT_THROW(detector_gate(0.0, 0.5, 10, 10, 1.0, rng), std::domain_error);
    EXPECT_THROW(detector_gate(0.5, 1.5, 10, 10, 1.0, rng), std::domain_error);
    EXPECT_THROW(detector_gate(0.5, 0.5, 0, 10, 1.0, rng), std::domain_error);
}

}  // namespace
}  // namespace lhv
