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

#include "lhv/spline.h"

#include <stdexcept>
#include <string>

namespace lhv {

SplineSystem::SplineSystem(int n) : n_(n) {
    if (n < 4) {
        throw std::domain_error("spline system requires n >= 4, got n=" + std::to_string(n));
    }
}

void SplineSystem::check_index(int i) const {
    if (i < first_index() || i > last_index()) {
        throw std::domain_error(
            "spline index " + std::to_string(i) + " outside [-2, " + std::to_string(n_) + "]");
    }
}

double SplineSystem::cox_de_boor(int j, int order, double x) const {
    if (order == 1) {
        return (knot(j) <= x && x < knot(j + 1)) ? 1.0 : 0.0;
    }
    double left = 0.0;
    double right = 0.0;
    double b0 = cox_de_boor(j, order - 1, x);
    if (b0 != 0.0) {
        left = (x - knot(j)) / (knot(j + order - 1) - knot(j)) * b0;
    }
    double b1 = cox_de_boor(j + 1, order - 1, x);
    if (b1 != 0.0) {
        right = (knot(j + order) - x) / (knot(j + order) - knot(j + 1)) * b1;
    }
    return left + right;
}

double SplineSystem::basis(int i, double x) const {
    check_index(i);
    if (x < knot(i) || x >= knot(i + 3)) {
        return 0.0;
    }
    return cox_de_boor(i, 3, x);
}

double SplineSystem::phi(int i, double y) const {
    check_index(i);
    return (y - knot(i + 1)) * (y - knot(i + 2));
}

double SplineSystem::psi(int i, double y) const {
    check_index(i);
    if (!(y >= 0.0 && y <= 1.0)) {
        throw std::domain_error("psi requires 0 <= y <= 1, got y=" + std::to_string(y));
    }
    if (knot(i + 1) <= y && y <= knot(i + 2)) {
        return 0.0;
    }
    return phi(i, y);
}

double SplineSystem::approx_sq_diff(double x, double y) const {
    if (!(x >= 0.0 && x <= 1.0) || !(y >= 0.0 && y <= 1.0)) {
        throw std::domain_error("approx_sq_diff requires 0 <= x, y <= 1");
    }
    double total = 0.0;
    for (int i = first_index(); i <= last_index(); ++i) {
        double nx = basis(i, x);
        if (nx != 0.0) {
            total += psi(i, y) * nx;
        }
    }
    return total;
}

double SplineSystem::residual_bound() const {
    return 1.0 / (4.0 * n_ * n_);
}

}  // namespace lhv
