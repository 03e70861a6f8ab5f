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

#ifndef LHV_BASE_LAYER_H
#define LHV_BASE_LAYER_H

#include <array>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "lhv/spline.h"

namespace lhv {

/// Measurement outcome, always -1 or +1.
using Spin = int;

/// sign(x) with the convention sign(0) = +1.
inline Spin sign_of(double x) {
    return x >= 0.0 ? 1 : -1;
}

/// A measurement setting on the unit sphere.
class UnitVector3 {
   public:
    /// Throws std::invalid_argument if |x|^2 deviates from 1 by more than 1e-12.
    UnitVector3(double x, double y, double z);

    /// Scales (x, y, z) to unit length. Throws on the zero vector.
    static UnitVector3 normalized(double x, double y, double z);

    /// (cos t, sin t, 0) for t in degrees.
    static UnitVector3 from_angle_degrees(double degrees);

    double operator[](int k) const {
        return c_[k];
    }
    const std::array<double, 3> &components() const {
        return c_;
    }

    bool operator==(const UnitVector3 &other) const = default;

    std::string str() const;

   private:
    struct Unchecked {};
    UnitVector3(Unchecked, double x, double y, double z) : c_{x, y, z} {
    }

    std::array<double, 3> c_;
};

double dot(const UnitVector3 &a, const UnitVector3 &b);

/// Station-1 detector function. sign(a_k) on [-k, -k+1) for k = 1, 2, 3;
/// -1 on [j, j+1/2) and +1 on [j+1/2, j+1) for j >= 0; +1 below -3.
Spin eval_A(const UnitVector3 &a, double u);

/// Station-2 detector function; eval_B(c, x) == -eval_A(c, x) for all c, x.
Spin eval_B(const UnitVector3 &b, double v);

/// eval_A at the point with offset 0 <= t < 1 inside the unit cell [i-1, i).
Spin eval_A_in_cell(const UnitVector3 &a, int cell, double offset);
Spin eval_B_in_cell(const UnitVector3 &b, int cell, double offset);

/// Probabilities p_1..p_L attached to the L equal subintervals of [0, 1).
class WeightVector {
   public:
    /// Throws std::invalid_argument if empty, any p < 0, or |sum - 1| > 1e-12.
    explicit WeightVector(std::vector<double> p);

    static WeightVector uniform(int L);

    int L() const {
        return static_cast<int>(p_.size());
    }
    double operator[](int l) const {
        return p_[l - 1];
    }
    const std::vector<double> &values() const {
        return p_;
    }

    bool operator==(const WeightVector &other) const = default;

   private:
    std::vector<double> p_;
};

/// 1-based index l with (l-1)/L <= w < l/L. Throws std::domain_error unless 0 <= w < 1.
int weight_interval(double w, int L);

/// s(w) = (-1)^l on the l-th interval.
Spin eval_s(double w, int L);

/// q(w) = p_l on the l-th interval.
double eval_q(double w, const WeightVector &weights);

/// Lebesgue density of the w-factor: L * p_l, so the l-th interval has
/// probability p_l and the density integrates to 1.
double weight_density(double w, const WeightVector &weights);

/// Index of the unit cell [i-1, i) containing x.
inline int cell_of(double x) {
    return static_cast<int>(std::floor(x)) + 1;
}

/// Indicator of the diagonal unit squares [i-1, i)^2, i = -2 .. 3n+9.
int eval_kappa(double u, double v, int n);

/// The setting-dependent first-layer measure on Omega = [-3, 3n+9)^2.
///
/// Mass sits only on the diagonal unit squares [i-1, i)^2. Cells i = -2, -1, 0
/// hold |a_k| |b_k| (k = 1 - i); cells 1..3n hold N_s(|a_c|) psi_s(|b_c|) / 2
/// for spline indices s = 1..n of component c; cells 3n+1..3n+9 hold the
/// remaining indices s = -2, -1, 0 of each component. On every cell the
/// density is the product sigma_a(u) tau_b(v), constant over the cell.
///
/// Total mass is 1 + theta / n^2 with 0 <= theta < 9/32.
///
/// In genuine mode the spline cells are replaced by (|a_k| - |b_k|)^2 / 2 on
/// [k-1, k)^2, k = 1, 2, 3, and the total mass is exactly 1 (up to rounding).
class FirstLayerMeasure {
   public:
    enum class Mode { kSpline, kGenuine };

    FirstLayerMeasure(const UnitVector3 &a, const UnitVector3 &b, int n, Mode mode = Mode::kSpline);

    const UnitVector3 &a() const {
        return a_;
    }
    const UnitVector3 &b() const {
        return b_;
    }
    int n() const {
        return spline_.n();
    }
    Mode mode() const {
        return mode_;
    }
    const SplineSystem &spline() const {
        return spline_;
    }

    static constexpr int min_cell() {
        return -2;
    }
    int max_cell() const {
        return max_cell_for(n());
    }
    int cell_count() const {
        return cell_count_for(n());
    }
    static int max_cell_for(int n) {
        return 3 * n + 9;
    }
    static int cell_count_for(int n) {
        return 3 * n + 12;
    }
    double domain_lo() const {
        return -3.0;
    }
    double domain_hi() const {
        return static_cast<double>(max_cell());
    }

    double cell_sigma(int i) const;
    double cell_tau(int i) const;
    double cell_mass(int i) const;

    /// Cell masses indexed by i - min_cell().
    std::span<const double> cell_masses() const {
        return mass_;
    }

    double sigma(double u) const;
    double tau(double v) const;
    double density(double u, double v) const;

    /// Mass on [-3, 0)^2: sum_k |a_k| |b_k|.
    double m1() const;
    /// Mass on the positive diagonal cells.
    double m2() const;
    double total_mass() const {
        return m1() + m2();
    }
    /// (total_mass - 1) * n^2.
    double theta_hat() const;

    /// Exact value of the integral of A_a(u) B_b(v) rho(u, v) over Omega,
    /// summed cell by cell over half-cells where A and B are constant.
    double pair_integral() const;

    /// Integral of A_a over the cell [i-1, i).
    double cell_integral_A(int i) const;
    double cell_integral_B(int i) const;

   private:
    int slot(int i) const;

    UnitVector3 a_;
    UnitVector3 b_;
    SplineSystem spline_;
    Mode mode_;
    std::vector<double> sigma_;
    std::vector<double> tau_;
    std::vector<double> mass_;
};

inline double eval_sigma(const FirstLayerMeasure &mu, double u) {
    return mu.sigma(u);
}
inline double eval_tau(const FirstLayerMeasure &mu, double v) {
    return mu.tau(v);
}
inline double density(const FirstLayerMeasure &mu, double u, double v) {
    return mu.density(u, v);
}
inline double total_mass(const FirstLayerMeasure &mu) {
    return mu.total_mass();
}
inline double pair_integral(const FirstLayerMeasure &mu) {
    return mu.pair_integral();
}

/// Mass bookkeeping of the genuine-probability variant.
///
/// `total_literal` uses M_2' = sum_k (|a_k| - |b_k|)^2 as written, which equals
/// 2 - M_1 and so is 1 only when |a_k| = |b_k| for all k. `total_half` uses
/// half of that sum (the masses the genuine measure mode places) and is 1.
struct GenuineVariantMass {
    double m1;
    double m2_literal;
    double total_literal;
    double m2_half;
    double total_half;
    bool literal_is_normalized;
};

GenuineVariantMass genuine_variant_mass(const UnitVector3 &a, const UnitVector3 &b);

}  // namespace lhv

#endif
