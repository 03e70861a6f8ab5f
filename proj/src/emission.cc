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

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace lhv {

namespace {

std::vector<double> sorted_points(std::span<const double> points, const char *what) {
    if (points.empty()) {
        throw std::domain_error(std::string(what) + " of an empty point set");
    }
    std::vector<double> sorted(points.begin(), points.end());
    for (double x : sorted) {
        if (!(x >= 0.0 && x < 1.0)) {
            throw std::domain_error(std::string(what) + ": point " + std::to_string(x) + " outside [0, 1)");
        }
    }
    std::sort(sorted.begin(), sorted.end());
    return sorted;
}

double star_of_sorted(const std::vector<double> &x) {
    const double k = static_cast<double>(x.size());
    double d = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        double hi = (i + 1) / k;
        double lo = i / k;
        d = std::max({d, hi - x[i], x[i] - lo});
    }
    return d;
}

double exponential_wait(double theta, RandomStream &rng) {
    for (;;) {
        double t = -theta * std::log1p(-rng.uniform());
        if (t > 0.0) {
            return t;
        }
    }
}

}  // namespace

EmissionTrace generate_trace(double theta, uint64_t k, RandomStream &rng) {
    if (!(theta > 0.0) || !std::isfinite(theta)) {
        throw std::domain_error("generate_trace requires theta > 0");
    }
    if (k < 1) {
        throw std::domain_error("generate_trace requires k >= 1");
    }
    EmissionTrace trace;
    trace.theta = theta;
    trace.waits.resize(k);
    trace.cums.resize(k);
    trace.fracs.resize(k);
    double x = 0.0;
    for (uint64_t i = 0; i < k; ++i) {
        double t = exponential_wait(theta, rng);
        x += t;
        trace.waits[i] = t;
        trace.cums[i] = x;
        trace.fracs[i] = x - std::floor(x);
    }
    return trace;
}

double star_discrepancy(std::span<const double> points) {
    return star_of_sorted(sorted_points(points, "star discrepancy"));
}

DiscrepancyBracket extreme_discrepancy(std::span<const double> points) {
    std::vector<double> x = sorted_points(points, "extreme discrepancy");
    const double k = static_cast<double>(x.size());
    double hi = -1.0;
    double lo = 2.0;
    for (size_t i = 0; i < x.size(); ++i) {
        double g = (i + 1) / k - x[i];
        hi = std::max(hi, g);
        lo = std::min(lo, g);
    }
    double d = std::min(1.0, 1.0 / k + hi - lo);
    return {d, d, true};
}

uint64_t DiscrepancyStats::count(double alpha, double beta) const {
    if (!(alpha < beta)) {
        return 0;
    }
    auto first = std::lower_bound(sorted.begin(), sorted.end(), alpha);
    auto last = std::lower_bound(sorted.begin(), sorted.end(), beta);
    return static_cast<uint64_t>(last - first);
}

DiscrepancyStats discrepancy_stats(std::span<const double> points) {
    DiscrepancyStats stats;
    stats.sorted = sorted_points(points, "discrepancy");
    stats.k = stats.sorted.size();
    stats.star = star_of_sorted(stats.sorted);
    stats.extreme = extreme_discrepancy(stats.sorted).lower;
    return stats;
}

int label_from_time(double x, int labels) {
    if (labels < 1) {
        throw std::domain_error("label_from_time requires at least one label");
    }
    double frac = x - std::floor(x);
    int m = static_cast<int>(std::floor(frac * labels)) + 1;
    return std::clamp(m, 1, labels);
}

double chi_square_uniform(std::span<const uint64_t> counts) {
    if (counts.empty()) {
        throw std::invalid_argument("chi-square of zero categories");
    }
    double total = 0.0;
    for (uint64_t c : counts) {
        total += static_cast<double>(c);
    }
    if (total == 0.0) {
        throw std::invalid_argument("chi-square of zero observations");
    }
    double expected = total / static_cast<double>(counts.size());
    double stat = 0.0;
    for (uint64_t c : counts) {
        double d = static_cast<double>(c) - expected;
        stat += d * d / expected;
    }
    return stat;
}

SlopeFit fit_loglog_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw std::invalid_argument("slope fit needs at least two (x, y) pairs");
    }
    const size_t n = x.size();
    std::vector<double> lx(n), ly(n);
    for (size_t i = 0; i < n; ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) {
            throw std::invalid_argument("log-log fit needs positive values");
        }
        lx[i] = std::log(x[i]);
        ly[i] = std::log(y[i]);
    }
    double mx = 0.0, my = 0.0;
    for (size_t i = 0; i < n; ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (size_t i = 0; i < n; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    if (sxx == 0.0) {
        throw std::invalid_argument("log-log fit needs distinct x values");
    }
    SlopeFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.residuals.resize(n);
    for (size_t i = 0; i < n; ++i) {
        fit.residuals[i] = ly[i] - (fit.intercept + fit.slope * lx[i]);
    }
    return fit;
}

RobbinsCheck robbins_rate_check(double theta, std::span<const uint64_t> ks, const RandomStream &rng,
                                int replicates) {
    if (ks.empty()) {
        throw std::domain_error("robbins_rate_check needs at least one size");
    }
    for (size_t i = 0; i < ks.size(); ++i) {
        if (ks[i] < 1000 || (i > 0 && ks[i] <= ks[i - 1])) {
            throw std::domain_error("robbins_rate_check sizes must be increasing and >= 1000");
        }
    }
    if (replicates < 1) {
        throw std::domain_error("robbins_rate_check needs at least one replicate");
    }
    RobbinsCheck check;
    check.ks.assign(ks.begin(), ks.end());
    check.star.assign(ks.size(), 0.0);
    for (int r = 0; r < replicates; ++r) {
        RandomStream stream = rng.split(static_cast<uint64_t>(r));
        EmissionTrace trace = generate_trace(theta, ks.back(), stream);
        for (size_t i = 0; i < ks.size(); ++i) {
            std::span<const double> prefix(trace.fracs.data(), ks[i]);
            check.star[i] += star_discrepancy(prefix) / replicates;
        }
    }
    std::vector<double> x(ks.begin(), ks.end());
    check.fit = fit_loglog_slope(x, check.star);
    return check;
}

std::vector<double> GateResult::conditional_frequencies() const {
    std::vector<double> f(gated_counts.size(), 0.0);
    if (accepted == 0) {
        return f;
    }
    for (size_t m = 0; m < f.size(); ++m) {
        f[m] = static_cast<double>(gated_counts[m]) / static_cast<double>(accepted);
    }
    return f;
}

double GateResult::tv_gated_vs_all() const {
    std::vector<double> gated = conditional_frequencies();
    double tv = 0.0;
    for (size_t m = 0; m < gated.size(); ++m) {
        double all = emitted == 0 ? 0.0 : static_cast<double>(all_counts[m]) / static_cast<double>(emitted);
        tv += std::abs(gated[m] - all);
    }
    return 0.5 * tv;
}

GateResult detector_gate(double p1, double p2, int labels, uint64_t k, double theta, RandomStream &rng) {
    if (!(p1 > 0.0 && p1 <= 1.0) || !(p2 > 0.0 && p2 <= 1.0)) {
        throw std::domain_error("readiness probabilities must lie in (0, 1]");
    }
    if (labels < 1) {
        throw std::domain_error("detector_gate requires at least one label");
    }
    if (!(theta > 0.0) || k < 1) {
        throw std::domain_error("detector_gate requires theta > 0 and k >= 1");
    }
    GateResult result;
    result.emitted = k;
    result.all_counts.assign(labels, 0);
    result.gated_counts.assign(labels, 0);
    double x = 0.0;
    for (uint64_t i = 0; i < k; ++i) {
        x += exponential_wait(theta, rng);
        int m = label_from_time(x, labels);
        bool ready1 = rng.bernoulli(p1);
        bool ready2 = rng.bernoulli(p2);
        ++result.all_counts[m - 1];
        if (ready1 && ready2) {
            ++result.gated_counts[m - 1];
            ++result.accepted;
        }
    }
    return result;
}

}  // namespace lhv
