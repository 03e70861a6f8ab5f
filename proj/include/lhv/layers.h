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

#ifndef LHV_LAYERS_H
#define LHV_LAYERS_H

#include <array>
#include <optional>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "lhv/base_layer.h"
#include "lhv/random.h"

namespace lhv {

using BigInt = boost::multiprecision::cpp_int;

/// Number of layers (half of the label count N):
/// 36 * C(3n+3, 3)^2 * C(9n^2, 3n) * (3n)!.
BigInt count_layers(int n);

/// One permuted arrangement of the first layer's unit ensembles.
///
/// The diagonal ensemble of base cell i moves to (column_of(i), row_of(i)),
/// carrying the A-strip of base column i and the B-strip of base row i.
/// Both maps are permutations of the diagonal index set -2 .. 3n+9, so every
/// column and every row holds exactly one mass-carrying ensemble and the
/// layer density keeps the product form sigma(u; m) tau(v; m) kappa(u, v; m).
///
/// `sign` is +1 on an original layer and -1 on its companion, which negates
/// both detector functions and leaves the density unchanged.
class LayerDescriptor {
   public:
    /// `column_of` and `row_of` list the target cell of base cells -2, -1, ...
    /// in order. Throws std::invalid_argument unless both are permutations
    /// of -2 .. 3n+9 and sign is +1 or -1.
    LayerDescriptor(int n, std::vector<int> column_of, std::vector<int> row_of, WeightVector weights,
                    int sign);

    static LayerDescriptor identity(int n, WeightVector weights);

    int n() const {
        return n_;
    }
    int sign() const {
        return sign_;
    }
    const WeightVector &weights() const {
        return weights_;
    }
    int cell_count() const {
        return static_cast<int>(column_of_.size());
    }
    int min_cell() const {
        return FirstLayerMeasure::min_cell();
    }
    int max_cell() const {
        return FirstLayerMeasure::max_cell_for(n_);
    }

    int column_of(int base_cell) const {
        return column_of_[base_cell - min_cell()];
    }
    int row_of(int base_cell) const {
        return row_of_[base_cell - min_cell()];
    }
    int base_at_column(int column) const {
        return base_at_column_[column - min_cell()];
    }
    int base_at_row(int row) const {
        return base_at_row_[row - min_cell()];
    }
    const std::vector<int> &column_map() const {
        return column_of_;
    }
    const std::vector<int> &row_map() const {
        return row_of_;
    }

    /// Columns and rows occupied by the three [-3, 0) ensembles (base cells -2, -1, 0).
    std::array<int, 3> negative_columns() const;
    std::array<int, 3> negative_rows() const;

    LayerDescriptor companion() const;

    /// Cyclic shift of both maps by `shift` positions within the index set.
    LayerDescriptor rotated(int shift) const;

    bool operator==(const LayerDescriptor &other) const;

   private:
    int n_;
    std::vector<int> column_of_;
    std::vector<int> row_of_;
    std::vector<int> base_at_column_;
    std::vector<int> base_at_row_;
    WeightVector weights_;
    int sign_;
};

/// Draws a layer uniformly (independent uniform column and row permutations)
/// and returns it with its sign-flipped companion. Weights are Dirichlet(1)
/// unless `tied` is given, in which case they are copied.
std::pair<LayerDescriptor, LayerDescriptor> sample_layer_pair(int n, int L, RandomStream &rng,
                                                              const std::optional<WeightVector> &tied = {});

WeightVector sample_dirichlet_weights(int L, RandomStream &rng);

/// Density of layer m at (u, v, w): the base density at the pre-image cell
/// times the w-density L * p_{ml}. Zero outside Omega x [0, 1).
double layer_density(const LayerDescriptor &layer, const FirstLayerMeasure &mu, double u, double v,
                     double w);
double layer_density(const LayerDescriptor &layer, const UnitVector3 &a, const UnitVector3 &b, double u,
                     double v, double w);

/// sign * A_a(relocated u) * s(w). Outside Omega the unrelocated A_a applies.
/// Throws std::domain_error unless 0 <= w < 1.
Spin eval_layer_A(const LayerDescriptor &layer, const UnitVector3 &a, double u, double w);
Spin eval_layer_B(const LayerDescriptor &layer, const UnitVector3 &b, double v, double w);

/// Exact integral of A B rho over Omega x [0, 1) for one layer, evaluated
/// through the relocated detector functions on half-cells.
double layer_pair_integral(const LayerDescriptor &layer, const FirstLayerMeasure &mu);

struct UniverseOptions {
    int n = 4;
    int L = 2;
    /// Number of sampled layer pairs. In balanced mode, the number of
    /// sampled pairs before rotation.
    int pairs = 100;
    /// p_{ml} = p_l for all layers.
    bool tie_weights = false;
    /// Expand each sampled pair into all cyclic column/row shifts, which makes
    /// both (Lambda*, Lambda**) marginals exactly uniform.
    bool balanced = false;
};

/// A finite family of companion layer pairs; labels 2m-1 (original) and 2m
/// (companion) for m = 1..pair_count(). R is uniform over the labels.
class LayerUniverse {
   public:
    LayerUniverse(int n, int L, bool tie_weights, bool balanced, std::vector<LayerDescriptor> originals);

    static LayerUniverse sample(const UniverseOptions &options, RandomStream &rng);

    int n() const {
        return n_;
    }
    int L() const {
        return L_;
    }
    bool tie_weights() const {
        return tie_weights_;
    }
    bool balanced() const {
        return balanced_;
    }
    int pair_count() const {
        return static_cast<int>(layers_.size() / 2);
    }
    int label_count() const {
        return static_cast<int>(layers_.size());
    }

    /// Layer with label 1..label_count(). Throws std::domain_error otherwise.
    const LayerDescriptor &layer(int label) const;

    const std::vector<LayerDescriptor> &layers() const {
        return layers_;
    }

    bool operator==(const LayerUniverse &other) const;

   private:
    int n_;
    int L_;
    bool tie_weights_;
    bool balanced_;
    std::vector<LayerDescriptor> layers_;
};

/// Joint density of (Lambda*, Lambda**, Lambda, R) at (u, v, w, m), with each
/// layer normalized by the total mass of the base measure.
double joint_density(const LayerUniverse &universe, const FirstLayerMeasure &mu, double u, double v, double w,
                     int label);

}  // namespace lhv

#endif
