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

#ifndef LHV_ANALYSIS_H
#define LHV_ANALYSIS_H

#include "lhv/base_layer.h"
#include "lhv/layers.h"

namespace lhv {

// Exact laws over a LayerUniverse. Every variable is piecewise constant on
// (unit cell x weight interval x label) boxes of equal volume, so expectations
// and total-variation distances reduce to finite sums over those boxes.
// Each layer is normalized by the base measure's total mass.

/// (1 / N) sum_m (exact layer integral of A B rho); equals -a.b.
double pair_expectation(const LayerUniverse &universe, const FirstLayerMeasure &mu);
double pair_expectation(const LayerUniverse &universe, const UnitVector3 &a, const UnitVector3 &b);

enum class Station { kA, kB };

struct ConditionalExpectation {
    /// max |E{spin | Lambda, local parameter}| over (half-cell, weight interval) bins.
    double given_local;
    /// max |E{spin | Lambda}| over weight intervals.
    double given_source;
};

/// Conditional expectation of one station's outcome given the source
/// parameter and that station's parameter, averaged over R. Companion pairs
/// make it vanish. With `drop_companions`, only the original (odd) labels
/// enter, which shows the cancellation is what drives the result to zero.
ConditionalExpectation conditional_expectation(const LayerUniverse &universe, const FirstLayerMeasure &mu,
                                               Station station, bool drop_companions = false);

/// Max of the given-local value over both stations.
double conditional_expectation_zero(const LayerUniverse &universe, const FirstLayerMeasure &mu,
                                    bool drop_companions = false);

/// Stochastic-dependence diagnostics. All fields are total-variation
/// distances in [0, 1] except the two noted.
struct DependenceReport {
    /// (i): joint law of (Lambda*, Lambda**) vs the product of its marginals.
    double tv_joint_vs_product = 0.0;
    /// (ii): E_R of TV between the law of (Lambda*, Lambda**, Lambda) given R
    /// and the product of the pair law and the Lambda law given R.
    double tv_cond_indep = 0.0;
    /// (v): E_R of TV between the pair law given R and the product of its
    /// conditional marginals.
    double cond_pair_dependence = 0.0;
    /// (vii): max over labels of TV between the laws of Lambda* given R under
    /// settings (a, b) and (a, c).
    double setting_shift = 0.0;
    /// (iv): max TV of the Lambda* and Lambda** marginals from uniform.
    double marginal_uniformity = 0.0;
    /// (iv): TV between the Lambda* marginals under (a, b) and (a, c).
    double marginal_setting_shift = 0.0;
    /// (vi): joint law of (R, Lambda) vs the product of its marginals.
    double r_lambda_dependence = 0.0;
    /// (ii*): max over boxes of |P(Lambda*, Lambda**, Lambda) - P(Lambda*, Lambda**) P(Lambda)|.
    double ii_star_defect = 0.0;
    /// Analytic scale of the uniformity defect: (total mass - 1) / G^2.
    double uniform_defect_bound = 0.0;
    double theta_hat = 0.0;
};

DependenceReport dependence_report(const LayerUniverse &universe, const FirstLayerMeasure &mu_ab,
                                   const FirstLayerMeasure &mu_ac);
DependenceReport dependence_report(const LayerUniverse &universe, const UnitVector3 &a, const UnitVector3 &b,
                                   const UnitVector3 &c);

}  // namespace lhv

#endif
