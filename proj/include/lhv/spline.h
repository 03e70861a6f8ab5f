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

#ifndef LHV_SPLINE_H
#define LHV_SPLINE_H

namespace lhv {

/// Order-3 (piecewise quadratic) B-splines on the uniform knots y_v = v/n.
///
/// Basis functions are indexed i = -2..n; N_i is supported on [y_i, y_{i+3}).
/// Together with the knot polynomials phi_i(y) = (y - y_{i+1})(y - y_{i+2})
/// they reproduce (y - x)^2 exactly on 0 <= x <= 1 (Marsden's identity).
/// psi_i is phi_i clipped to zero on [y_{i+1}, y_{i+2}], where phi_i is the
/// only negative term; the clipped sum over-estimates (y - x)^2 by at most
/// 1/(4 n^2).
///
/// Immutable; all members are pure and safe to call concurrently.
class SplineSystem {
   public:
    /// Throws std::domain_error unless n >= 4.
    explicit SplineSystem(int n);

    int n() const {
        return n_;
    }
    static constexpr int first_index() {
        return -2;
    }
    int last_index() const {
        return n_;
    }
    int basis_count() const {
        return n_ + 3;
    }

    double knot(int v) const {
        return static_cast<double>(v) / n_;
    }

    /// N_i(x), by the Cox-de Boor recursion with half-open supports.
    double basis(int i, double x) const;

    double phi(int i, double y) const;

    /// Requires 0 <= y <= 1.
    double psi(int i, double y) const;

    /// S(x, y) = sum_i psi_i(y) N_i(x). Requires 0 <= x, y <= 1.
    /// Guarantees 0 <= S(x, y) - (y - x)^2 <= 1 / (4 n^2).
    double approx_sq_diff(double x, double y) const;

    /// Upper bound 1 / (4 n^2) on approx_sq_diff(x, y) - (y - x)^2.
    double residual_bound() const;

   private:
    void check_index(int i) const;
    double cox_de_boor(int j, int order, double x) const;

    int n_;
};

inline SplineSystem build_spline_system(int n) {
    return SplineSystem(n);
}

}  // namespace lhv

#endif
