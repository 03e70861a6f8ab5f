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

#ifndef LHV_EMISSION_H
#define LHV_EMISSION_H

#include <cstdint>
#include <span>
#include <vector>

#include "lhv/random.h"

namespace lhv {

/// Emission times of a Poisson process with intensity 1/theta, wrapped onto
/// a circle of circumference 1.
struct EmissionTrace {
    double theta = 1.0;
    std::vector<double> waits;
    std::vector<double> cums;
    std::vector<double> fracs;

    double intensity() const {
        return 1.0 / theta;
    }
    size_t size() const {
        return waits.size();
    }
};

/// k exponential waits with mean theta. Throws std::domain_error if
/// theta <= 0 or k < 1.
EmissionTrace generate_trace(double theta, uint64_t k, RandomStream &rng);

/// Exact sup over anchored intervals [0, t). Throws std::domain_error on
/// empty input or points outside [0, 1).
double star_discrepancy(std::span<const double> points);

/// Exact sup over half-open intervals [alpha, beta) in [0, 1), computed from
/// the sorted points in O(k log k). lower == upper == the exact value.
struct DiscrepancyBracket {
    double lower;
    double upper;
    bool exact;
};
DiscrepancyBracket extreme_discrepancy(std::span<const double> points);

struct DiscrepancyStats {
    uint64_t k = 0;
    double star = 0.0;
    double extreme = 0.0;
    /// Sorted copy of the points, kept for count queries.
    std::vector<double> sorted;

    /// Number of points in [alpha, beta).
    uint64_t count(double alpha, double beta) const;
};
DiscrepancyStats discrepancy_stats(std::span<const double> points);

/// floor({x} N) + 1, in 1..N. Throws std::domain_error if labels < 1.
int label_from_time(double x, int labels);

/// Pearson statistic of observed counts against equal expected counts.
double chi_square_uniform(std::span<const uint64_t> counts);

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    std::vector<double> residuals;
};

/// Least-squares line through (log x, log y). Throws std::invalid_argument
/// for fewer than two points or nonpositive values.
SlopeFit fit_loglog_slope(std::span<const double> x, std::span<const double> y);

struct RobbinsCheck {
    std::vector<uint64_t> ks;
    /// Star discrepancy at each k, averaged over replicates.
    std::vector<double> star;
    SlopeFit fit;
};

/// Star discrepancy of the first k fractional parts of Poisson emission
/// times, for each k in `ks`, averaged over `replicates` independent traces,
/// then a log-log slope fit. Throws std::domain_error unless ks is strictly
/// increasing with every entry >= 1000.
RobbinsCheck robbins_rate_check(double theta, std::span<const uint64_t> ks, const RandomStream &rng,
                                int replicates = 8);

struct GateResult {
    uint64_t emitted = 0;
    uint64_t accepted = 0;
    /// Label counts over all emissions and over accepted ones, index m-1.
    std::vector<uint64_t> all_counts;
    std::vector<uint64_t> gated_counts;

    double acceptance_rate() const {
        return emitted == 0 ? 0.0 : static_cast<double>(accepted) / static_cast<double>(emitted);
    }
    /// Empirical P(R = m | D1 = D2 = 1), index m-1.
    std::vector<double> conditional_frequencies() const;
    /// TV distance between the gated and ungated empirical label laws.
    double tv_gated_vs_all() const;
};

/// Labels k Poisson emissions and keeps those for which both independent
/// Bernoulli readiness indicators fire. Throws std::domain_error unless
/// p1, p2 are in (0, 1], labels >= 1, k >= 1 and theta > 0.
GateResult detector_gate(double p1, double p2, int labels, uint64_t k, double theta, RandomStream &rng);

}  // namespace lhv

#endif
