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

#include "lhv/analysis.h"

#include <gtest/gtest.h>

#include "lhv/random.h"
#include "oracles.h"

namespace lhv {
namespace {

LayerUniverse make_universe(int n, int L, int pairs, uint64_t seed, bool tie = false, bool balanced = false) {
    UniverseOptions opt;
    opt.n = n;
    opt.L = L;
    opt.pairs = pairs;
    opt.tie_weights = tie;
    opt.balanced = balanced;
    RandomStream rng(seed);
    return LayerUniverse::sample(opt, rng);
}

TEST(Analysis, PairExpectationIsExact) {
    LayerUniverse u = make_universe(4, 3, 20, 1);
    RandomStream rng(2);
    for (int t = 0; t < 50; ++t) {
        UnitVector3 a = oracle::random_setting(rng);
        UnitVector3 b = oracle::random_setting(rng);
        EXPECT_NEAR(pair_expectation(u, a, b), -dot(a, b), 1e-12);
    }
}

TEST(Analysis, ConditionalExpectationVanishes) {
    LayerUniverse u = make_universe(5, 4, 15, 3);
    RandomStream rng(4);
    for (int t = 0; t < 20; ++t) {
        FirstLayerMeasure mu(oracle::random_setting(rng), oracle::random_setting(rng), 5);
        EXPECT_LE(conditional_expectation_zero(u, mu), 1e-12);
        for (Station s : {Station::kA, Station::kB}) {
            auto ce = conditional_expectation(u, mu, s);
            EXPECT_LE(ce.given_local, 1e-12);
            EXPECT_LE(ce.given_source, 1e-12);
        }
        EXPECT_GT(conditional_expectation_zero(u, mu, true), 0.1);
    }
}

TEST(Analysis, BalancedWitnessClosedForm) {
    LayerUniverse u = make_universe(4, 2, 3, 21, false, true);
    RandomStream rng(22);
    for (int t = 0; t < 30; ++t) {
        FirstLayerMeasure mu(oracle::random_setting(rng), oracle::random_setting(rng), 4);
        EXPECT_NEAR(conditional_expectation_zero(u, mu, true), oracle::balanced_witness(mu), 1e-12);
        EXPECT_LE(conditional_expectation_zero(u, mu), 1e-12);
    }
}

TEST(Analysis, SettingShiftMatchesBruteForce) {
    LayerUniverse u = make_universe(4, 2, 6, 5);
    UnitVector3 a = UnitVector3::normalized(0.3, 0.4, -0.5);
    UnitVector3 b = UnitVector3::normalized(-0.7, 0.2, 0.1);
    UnitVector3 c = UnitVector3::normalized(0.2, 0.9, 0.6);
    FirstLayerMeasure mu_ab(a, b, 4), mu_ac(a, c, 4);
    double shift = 0.0;
    for (int label = 1; label <= u.label_count(); ++label) {
        auto p = oracle::column_law(u, mu_ab, label);
        auto q = oracle::column_law(u, mu_ac, label);
        double tv = 0.0;
        for (size_t k = 0; k < p.size(); ++k) {
            tv += std::abs(p[k] - q[k]);
        }
        shift = std::max(shift, 0.5 * tv);
    }
    DependenceReport d = dependence_report(u, mu_ab, mu_ac);
    EXPECT_GT(d.setting_shift, 0.0);
    EXPECT_NEAR(d.setting_shift, shift, 1e-12);
}

TEST(Analysis, TiedWeightsDecoupleLabelAndWeight) {
    UnitVector3 a = UnitVector3::normalized(0.3, 0.4, -0.5);
    UnitVector3 b = UnitVector3::normalized(-0.7, 0.2, 0.1);
    UnitVector3 c = UnitVector3::normalized(0.2, 0.9, 0.6);
    DependenceReport tied = dependence_report(make_universe(4, 3, 10, 6, true), a, b, c);
    EXPECT_LE(tied.r_lambda_dependence, 1e-12);
    EXPECT_LE(tied.ii_star_defect, 1e-12);
    DependenceReport generic = dependence_report(make_universe(4, 3, 10, 6, false), a, b, c);
    EXPECT_GT(generic.r_lambda_dependence, 1e-3);
}

TEST(Analysis, ConditionalIndependenceGivenLabel) {
    UnitVector3 a = UnitVector3::normalized(0.3, 0.4, -0.5);
    UnitVector3 b = UnitVector3::normalized(-0.7, 0.2, 0.1);
    UnitVector3 c = UnitVector3::normalized(0.2, 0.9, 0.6);
    DependenceReport d = dependence_report(make_universe(4, 3, 10, 9), a, b, c);
    EXPECT_LE(d.tv_cond_indep, 1e-12);
    // Given R the pair sits on one relocated diagonal: strongly dependent.
    EXPECT_GT(d.cond_pair_dependence, 0.5);
    EXPECT_GE(d.tv_joint_vs_product, 0.0);
    EXPECT_LE(d.tv_joint_vs_product, 1.0);
    EXPECT_NEAR(d.theta_hat, FirstLayerMeasure(a, b, 4).theta_hat(), 0.0);
}

TEST(Analysis, BalancedMarginalsAreUniform) {
    UnitVector3 a = UnitVector3::normalized(0.3, 0.4, -0.5);
    UnitVector3 b = UnitVector3::normalized(-0.7, 0.2, 0.1);
    UnitVector3 c = UnitVector3::normalized(0.2, 0.9, 0.6);
    DependenceReport d = dependence_report(make_universe(4, 2, 3, 10, false, true), a, b, c);
    EXPECT_LE(d.marginal_uniformity, 1e-12);
    EXPECT_LE(d.marginal_setting_shift, 1e-12);
    EXPECT_GT(d.setting_shift, 0.0);
    // With many independent pairs the plain universe is close to uniform.
    DependenceReport plain = dependence_report(make_universe(4, 2, 400, 10), a, b, c);
    EXPECT_LT(plain.marginal_uniformity, 0.2);
    EXPECT_GT(plain.marginal_uniformity, 0.0);
}

TEST(Analysis, RejectsMismatchedSettings) {
    LayerUniverse u = make_universe(4, 2, 2, 11);
    UnitVector3 a(1, 0, 0), b(0, 1, 0), c(0, 0, 1);
    EXPECT_THROW(dependence_report(u, a, b, b), std::invalid_argument);
    EXPECT_THROW(dependence_report(u, FirstLayerMeasure(a, b, 4), FirstLayerMeasure(c, b, 4)), std::invalid_argument);
    EXPECT_THROW(pair_expectation(u, FirstLayerMeasure(a, b, 5)), std::invalid_argument);
}

}  // namespace
}  // namespace lhv
