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

#include "lhv/base_layer.h"

#include <sstream>
#include <stdexcept>

namespace lhv {

UnitVector3::UnitVector3(double x, double y, double z) : c_{x, y, z} {
    double norm2 = x * x + y * y + z * z;
    if (!(std::abs(norm2 - 1.0) <= 1e-12)) {
        throw std::invalid_argument("not a unit vector: " + str());
    }
}

UnitVector3 UnitVector3::normalized(double x, double y, double z) {
    double norm = std::sqrt(x * x + y * y + z * z);
    if (!(norm > 0.0) || !std::isfinite(norm)) {
        throw std::invalid_argument("cannot normalize a zero or non-finite vector");
    }
    return UnitVector3(Unchecked{}, x / norm, y / norm, z / norm);
}

UnitVector3 UnitVector3::from_angle_degrees(double degrees) {
    double t = degrees * (M_PI / 180.0);
    return UnitVector3(Unchecked{}, std::cos(t), std::sin(t), 0.0);
}

std::string UnitVector3::str() const {
    std::ostringstream out;
    out.precision(17);
    out << "(" << c_[0] << ", " << c_[1] << ", " << c_[2] << ")";
    return out.str();
}

double dot(const UnitVector3 &a, const UnitVector3 &b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

Spin eval_A_in_cell(const UnitVector3 &a, int cell, double offset) {
    if (cell >= 1) {
        return offset < 0.5 ? -1 : 1;
    }
    if (cell >= -2) {
        return sign_of(a[-cell]);  // k = 1 - cell
    }
    return 1;
}

Spin eval_B_in_cell(const UnitVector3 &b, int cell, double offset) {
    return -eval_A_in_cell(b, cell, offset);
}

Spin eval_A(const UnitVector3 &a, double u) {
    return eval_A_in_cell(a, cell_of(u), u - std::floor(u));
}

Spin eval_B(const UnitVector3 &b, double v) {
    return eval_B_in_cell(b, cell_of(v), v - std::floor(v));
}

WeightVector::WeightVector(std::vector<double> p) : p_(std::move(p)) {
    if (p_.empty()) {
        throw std::invalid_argument("weight vector must have L >= 1 entries");
    }
    double sum = 0.0;
    for (double x : p_) {
        if (!(x >= 0.0)) {
            throw std::invalid_argument("weights must be nonnegative");
        }
        sum += x;
    }
    if (!(std::abs(sum - 1.0) <= 1e-12)) {
        throw std::invalid_argument("weights must sum to 1");
    }
}

WeightVector WeightVector::uniform(int L) {
    if (L < 1) {
        throw std::invalid_argument("L must be >= 1");
    }
    return WeightVector(std::vector<double>(L, 1.0 / L));
}

int weight_interval(double w, int L) {
    if (!(w >= 0.0 && w < 1.0)) {
        throw std::domain_error("w must lie in [0, 1)");
    }
    if (L < 1) {
        throw std::domain_error("L must be >= 1");
    }
    int l = static_cast<int>(std::floor(w * L)) + 1;
    // w * L can round up to L for w just below 1.
    return l > L ? L : l;
}

Spin eval_s(double w, int L) {
    return (weight_interval(w, L) % 2 == 0) ? 1 : -1;
}

double eval_q(double w, const WeightVector &weights) {
    return weights[weight_interval(w, weights.L())];
}

double weight_density(double w, const WeightVector &weights) {
    return weights.L() * eval_q(w, weights);
}

int eval_kappa(double u, double v, int n) {
    int i = cell_of(u);
    if (i != cell_of(v)) {
        return 0;
    }
    return (i >= FirstLayerMeasure::min_cell() && i <= FirstLayerMeasure::max_cell_for(n)) ? 1 : 0;
}

FirstLayerMeasure::FirstLayerMeasure(const UnitVector3 &a, const UnitVector3 &b, int n, Mode mode)
    : a_(a), b_(b), spline_(n), mode_(mode) {
    int count = cell_count();
    sigma_.assign(count, 0.0);
    tau_.assign(count, 0.0);
    mass_.assign(count, 0.0);

    for (int k = 1; k <= 3; ++k) {
        int i = 1 - k;
        sigma_[slot(i)] = std::abs(a_[k - 1]);
        tau_[slot(i)] = std::abs(b_[k - 1]);
    }

    if (mode_ == Mode::kSpline) {
        auto place = [&](int i, int component, int s) {
            sigma_[slot(i)] = spline_.basis(s, std::abs(a_[component]));
            tau_[slot(i)] = 0.5 * spline_.psi(s, std::abs(b_[component]));
        };
        for (int i = 1; i <= 3 * n; ++i) {
            int component = (i - 1) / n;
            place(i, component, i - component * n);
        }
        for (int j = 0; j < 9; ++j) {
            place(3 * n + 1 + j, j / 3, j % 3 - 2);
        }
    } else {
        // No a/b factorization here: sigma = 1 carries the whole mass in tau.
        for (int k = 1; k <= 3; ++k) {
            double d = std::abs(a_[k - 1]) - std::abs(b_[k - 1]);
            sigma_[slot(k)] = 1.0;
            tau_[slot(k)] = 0.5 * d * d;
        }
    }

    for (int s = 0; s < count; ++s) {
        mass_[s] = sigma_[s] * tau_[s];
    }
}

int FirstLayerMeasure::slot(int i) const {
    if (i < min_cell() || i > max_cell()) {
        throw std::domain_error("cell index " + std::to_string(i) + " outside the diagonal");
    }
    return i - min_cell();
}

double FirstLayerMeasure::cell_sigma(int i) const {
    return sigma_[slot(i)];
}

double FirstLayerMeasure::cell_tau(int i) const {
    return tau_[slot(i)];
}

double FirstLayerMeasure::cell_mass(int i) const {
    return mass_[slot(i)];
}

double FirstLayerMeasure::sigma(double u) const {
    int i = cell_of(u);
    if (i < min_cell() || i > max_cell()) {
        return 0.0;
    }
    return sigma_[slot(i)];
}

double FirstLayerMeasure::tau(double v) const {
    int i = cell_of(v);
    if (i < min_cell() || i > max_cell()) {
        return 0.0;
    }
    return tau_[slot(i)];
}

double FirstLayerMeasure::density(double u, double v) const {
    if (eval_kappa(u, v, n()) == 0) {
        return 0.0;
    }
    return sigma(u) * tau(v);
}

double FirstLayerMeasure::m1() const {
    double total = 0.0;
    for (int k = 1; k <= 3; ++k) {
        total += mass_[slot(1 - k)];
    }
    return total;
}

double FirstLayerMeasure::m2() const {
    double total = 0.0;
    for (int i = 1; i <= max_cell(); ++i) {
        total += mass_[slot(i)];
    }
    return total;
}

double FirstLayerMeasure::theta_hat() const {
    return (total_mass() - 1.0) * n() * n();
}

double FirstLayerMeasure::cell_integral_A(int i) const {
    double lo = i - 1;
    return 0.5 * (eval_A(a_, lo + 0.25) + eval_A(a_, lo + 0.75));
}

double FirstLayerMeasure::cell_integral_B(int i) const {
    double lo = i - 1;
    return 0.5 * (eval_B(b_, lo + 0.25) + eval_B(b_, lo + 0.75));
}

double FirstLayerMeasure::pair_integral() const {
    double total = 0.0;
    for (int i = min_cell(); i <= max_cell(); ++i) {
        double m = mass_[slot(i)];
        if (m != 0.0) {
            total += m * cell_integral_A(i) * cell_integral_B(i);
        }
    }
    return total;
}

GenuineVariantMass genuine_variant_mass(const UnitVector3 &a, const UnitVector3 &b) {
    GenuineVariantMass r{};
    for (int k = 0; k < 3; ++k) {
        double d = std::abs(a[k]) - std::abs(b[k]);
        r.m1 += std::abs(a[k]) * std::abs(b[k]);
        r.m2_literal += d * d;
    }
    r.m2_half = 0.5 * r.m2_literal;
    r.total_literal = r.m1 + r.m2_literal;
    r.total_half = r.m1 + r.m2_half;
    r.literal_is_normalized = std::abs(r.total_literal - 1.0) <= 1e-12;
    return r;
}

}  // namespace lhv
