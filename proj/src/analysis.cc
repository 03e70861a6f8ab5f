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

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace lhv {

namespace {

void check_compatible(const LayerUniverse &universe, const FirstLayerMeasure &mu) {
    if (universe.n() != mu.n()) {
        throw std::invalid_argument("universe and measure disagree on n");
    }
}

// Normalized base-cell probabilities mass_i / total, indexed by slot.
std::vector<double> cell_probabilities(const FirstLayerMeasure &mu) {
    double total = mu.total_mass();
    std::vector<double> p(mu.cell_masses().begin(), mu.cell_masses().end());
    for (double &x : p) {
        x /= total;
    }
    return p;
}

double half_tv(const std::vector<double> &p, const std::vector<double> &q) {
    double sum = 0.0;
    for (size_t k = 0; k < p.size(); ++k) {
        sum += std::abs(p[k] - q[k]);
    }
    return 0.5 * sum;
}

}  // namespace

double pair_expectation(const LayerUniverse &universe, const FirstLayerMeasure &mu) {
    check_compatible(universe, mu);
    double total = 0.0;
    for (const auto &layer : universe.layers()) {
        total += layer_pair_integral(layer, mu);
    }
    return total / universe.label_count();
}

double pair_expectation(const LayerUniverse &universe, const UnitVector3 &a, const UnitVector3 &b) {
    return pair_expectation(universe, FirstLayerMeasure(a, b, universe.n()));
}

ConditionalExpectation conditional_expectation(const LayerUniverse &universe, const FirstLayerMeasure &mu,
                                               Station station, bool drop_companions) {
    check_compatible(universe, mu);
    const int G = mu.cell_count();
    const int L = universe.L();
    const int lo = mu.min_cell();
    std::vector<double> p = cell_probabilities(mu);

    // Bins: (cell, half, weight interval). Both halves of a cell share the
    // same probability, so the denominator is kept per (cell, interval).
    std::vector<double> numerator(static_cast<size_t>(G) * 2 * L, 0.0);
    std::vector<double> denominator(static_cast<size_t>(G) * L, 0.0);

    for (int label = 1; label <= universe.label_count(); ++label) {
        if (drop_companions && label % 2 == 0) {
            continue;
        }
        const LayerDescriptor &layer = universe.layer(label);
        for (int i = lo; i <= mu.max_cell(); ++i) {
            double pi = p[i - lo];
            if (pi == 0.0) {
                continue;
            }
            int cell = station == Station::kA ? layer.column_of(i) : layer.row_of(i);
            for (int l = 1; l <= L; ++l) {
                double w = (l - 0.5) / L;
                double weight = pi * layer.weights()[l];
                denominator[(cell - lo) * L + (l - 1)] += weight;
                for (int h = 0; h < 2; ++h) {
                    double x = (cell - 1) + 0.25 + 0.5 * h;
                    Spin spin = station == Station::kA ? eval_layer_A(layer, mu.a(), x, w)
                                                       : eval_layer_B(layer, mu.b(), x, w);
                    numerator[((cell - lo) * 2 + h) * L + (l - 1)] += spin * weight;
                }
            }
        }
    }

    ConditionalExpectation result{0.0, 0.0};
    std::vector<double> source_num(L, 0.0);
    std::vector<double> source_den(L, 0.0);
    for (int s = 0; s < G; ++s) {
        for (int l = 0; l < L; ++l) {
            double den = denominator[s * L + l];
            if (den == 0.0) {
                continue;
            }
            // Each half-cell bin carries half of its cell's probability.
            for (int h = 0; h < 2; ++h) {
                double num = numerator[(s * 2 + h) * L + l];
                result.given_local = std::max(result.given_local, std::abs(num / den));
                source_num[l] += 0.5 * num;
            }
            source_den[l] += den;
        }
    }
    for (int l = 0; l < L; ++l) {
        if (source_den[l] > 0.0) {
            result.given_source = std::max(result.given_source, std::abs(source_num[l] / source_den[l]));
        }
    }
    return result;
}

double conditional_expectation_zero(const LayerUniverse &universe, const FirstLayerMeasure &mu,
                                    bool drop_companions) {
    return std::max(conditional_expectation(universe, mu, Station::kA, drop_companions).given_local,
                    conditional_expectation(universe, mu, Station::kB, drop_companions).given_local);
}

DependenceReport dependence_report(const LayerUniverse &universe, const FirstLayerMeasure &mu_ab,
                                   const FirstLayerMeasure &mu_ac) {
    check_compatible(universe, mu_ab);
    check_compatible(universe, mu_ac);
    if (!(mu_ab.a() == mu_ac.a())) {
        throw std::invalid_argument("dependence_report compares (a, b) with (a, c); station-1 settings differ");
    }
    if (mu_ab.b() == mu_ac.b()) {
        throw std::invalid_argument("dependence_report needs an alternate setting c != b");
    }
    const int G = mu_ab.cell_count();
    const int L = universe.L();
    const int lo = mu_ab.min_cell();
    const int labels = universe.label_count();
    const double p_label = 1.0 / labels;
    std::vector<double> p = cell_probabilities(mu_ab);
    std::vector<double> p_alt = cell_probabilities(mu_ac);

    DependenceReport report;
    report.theta_hat = mu_ab.theta_hat();
    report.uniform_defect_bound = (mu_ab.total_mass() - 1.0) / (static_cast<double>(G) * G);

    std::vector<double> joint_pair(static_cast<size_t>(G) * G, 0.0);
    std::vector<double> joint_triple(static_cast<size_t>(G) * G * L, 0.0);
    std::vector<double> marginal_c(G, 0.0);
    std::vector<double> marginal_r(G, 0.0);
    std::vector<double> marginal_c_alt(G, 0.0);
    std::vector<double> marginal_w(L, 0.0);
    std::vector<double> label_w(static_cast<size_t>(labels) * L, 0.0);

    std::vector<double> cond_c(G), cond_r(G), cond_c_alt(G);
    for (int label = 1; label <= labels; ++label) {
        const LayerDescriptor &layer = universe.layer(label);
        const auto &weights = layer.weights();

        // Conditional laws given R = label.
        double cond_w_total = 0.0;
        std::vector<double> cond_w(L, 0.0);
        for (int s = 0; s < G; ++s) {
            int i = lo + s;
            int c = layer.column_of(i) - lo;
            int r = layer.row_of(i) - lo;
            cond_c[c] = p[s];
            cond_r[r] = p[s];
            cond_c_alt[c] = p_alt[s];
            for (int l = 0; l < L; ++l) {
                double box = p[s] * weights[l + 1];
                cond_w[l] += box;
                cond_w_total += box;
                joint_triple[(static_cast<size_t>(c) * G + r) * L + l] += p_label * box;
                label_w[static_cast<size_t>(label - 1) * L + l] += p_label * box;
            }
            joint_pair[static_cast<size_t>(c) * G + r] += p_label * p[s];
            marginal_c[c] += p_label * p[s];
            marginal_r[r] += p_label * p[s];
            marginal_c_alt[c] += p_label * p_alt[s];
        }
        for (int l = 0; l < L; ++l) {
            marginal_w[l] += p_label * cond_w[l];
        }

        // (ii): boxes off the occupied cells are zero in both laws.
        double cond_indep = 0.0;
        for (int s = 0; s < G; ++s) {
            double cell = 0.0;
            for (int l = 0; l < L; ++l) {
                cell += p[s] * weights[l + 1];
            }
            for (int l = 0; l < L; ++l) {
                double box = p[s] * weights[l + 1];
                cond_indep += std::abs(box - cell * (cond_w[l] / cond_w_total));
            }
        }
        report.tv_cond_indep += p_label * 0.5 * cond_indep;

        // (v)
        double pair_dep = 0.0;
        for (int c = 0; c < G; ++c) {
            int i = layer.base_at_column(c + lo);
            int occupied_row = layer.row_of(i) - lo;
            for (int r = 0; r < G; ++r) {
                double joint = (r == occupied_row) ? p[i - lo] : 0.0;
                pair_dep += std::abs(joint - cond_c[c] * cond_r[r]);
            }
        }
        report.cond_pair_dependence += p_label * 0.5 * pair_dep;

        // (vii)
        report.setting_shift = std::max(report.setting_shift, half_tv(cond_c, cond_c_alt));
    }

    double tv = 0.0;
    for (int c = 0; c < G; ++c) {
        for (int r = 0; r < G; ++r) {
            tv += std::abs(joint_pair[static_cast<size_t>(c) * G + r] - marginal_c[c] * marginal_r[r]);
        }
    }
    report.tv_joint_vs_product = 0.5 * tv;

    std::vector<double> uniform(G, 1.0 / G);
    report.marginal_uniformity = std::max(half_tv(marginal_c, uniform), half_tv(marginal_r, uniform));
    report.marginal_setting_shift = half_tv(marginal_c, marginal_c_alt);

    double rl = 0.0;
    for (int label = 0; label < labels; ++label) {
        double p_m = 0.0;
        for (int l = 0; l < L; ++l) {
            p_m += label_w[static_cast<size_t>(label) * L + l];
        }
        for (int l = 0; l < L; ++l) {
            rl += std::abs(label_w[static_cast<size_t>(label) * L + l] - p_m * marginal_w[l]);
        }
    }
    report.r_lambda_dependence = 0.5 * rl;

    for (int c = 0; c < G; ++c) {
        for (int r = 0; r < G; ++r) {
            double pair = joint_pair[static_cast<size_t>(c) * G + r];
            for (int l = 0; l < L; ++l) {
                double box = joint_triple[(static_cast<size_t>(c) * G + r) * L + l];
                report.ii_star_defect = std::max(report.ii_star_defect, std::abs(box - pair * marginal_w[l]));
            }
        }
    }
    return report;
}

DependenceReport dependence_report(const LayerUniverse &universe, const UnitVector3 &a, const UnitVector3 &b,
                                   const UnitVector3 &c) {
    return dependence_report(universe, FirstLayerMeasure(a, b, universe.n()), FirstLayerMeasure(a, c, universe.n()));
}

}  // namespace lhv
