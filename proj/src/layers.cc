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

#include "lhv/layers.h"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace lhv {

namespace {

BigInt binomial(int64_t n, int64_t k) {
    BigInt result = 1;
    for (int64_t j = 1; j <= k; ++j) {
        result *= n - k + j;
        result /= j;
    }
    return result;
}

BigInt factorial(int64_t n) {
    BigInt result = 1;
    for (int64_t j = 2; j <= n; ++j) {
        result *= j;
    }
    return result;
}

std::vector<int> inverse_of(const std::vector<int> &map, int min_cell, const char *what) {
    std::vector<int> inverse(map.size(), min_cell - 1);
    int count = static_cast<int>(map.size());
    for (int s = 0; s < count; ++s) {
        int target = map[s] - min_cell;
        if (target < 0 || target >= count || inverse[target] != min_cell - 1) {
            throw std::invalid_argument(std::string("layer ") + what + " map is not a permutation of the diagonal cells");
        }
        inverse[target] = s + min_cell;
    }
    return inverse;
}

std::vector<int> uniform_permutation(int min_cell, int count, RandomStream &rng) {
    std::vector<int> cells(count);
    std::iota(cells.begin(), cells.end(), min_cell);
    for (int j = count - 1; j > 0; --j) {
        int k = static_cast<int>(rng.below(static_cast<uint64_t>(j) + 1));
        std::swap(cells[j], cells[k]);
    }
    return cells;
}

}  // namespace

BigInt count_layers(int n) {
    if (n < 4) {
        throw std::domain_error("count_layers requires n >= 4");
    }
    BigInt c = binomial(3 * n + 3, 3);
    return 36 * c * c * binomial(9 * static_cast<int64_t>(n) * n, 3 * n) * factorial(3 * n);
}

LayerDescriptor::LayerDescriptor(int n, std::vector<int> column_of, std::vector<int> row_of, WeightVector weights,
                                 int sign)
    : n_(n),
      column_of_(std::move(column_of)),
      row_of_(std::move(row_of)),
      weights_(std::move(weights)),
      sign_(sign) {
    if (n < 4) {
        throw std::invalid_argument("layer requires n >= 4");
    }
    int expected = FirstLayerMeasure::cell_count_for(n);
    if (static_cast<int>(column_of_.size()) != expected || static_cast<int>(row_of_.size()) != expected) {
        throw std::invalid_argument("layer maps must have " + std::to_string(expected) + " entries for n=" +
                                    std::to_string(n));
    }
    if (sign != 1 && sign != -1) {
        throw std::invalid_argument("layer sign must be +1 or -1");
    }
    base_at_column_ = inverse_of(column_of_, min_cell(), "column");
    base_at_row_ = inverse_of(row_of_, min_cell(), "row");
}

LayerDescriptor LayerDescriptor::identity(int n, WeightVector weights) {
    std::vector<int> cells(FirstLayerMeasure::cell_count_for(n));
    std::iota(cells.begin(), cells.end(), FirstLayerMeasure::min_cell());
    return LayerDescriptor(n, cells, cells, std::move(weights), 1);
}

std::array<int, 3> LayerDescriptor::negative_columns() const {
    return {column_of(-2), column_of(-1), column_of(0)};
}

std::array<int, 3> LayerDescriptor::negative_rows() const {
    return {row_of(-2), row_of(-1), row_of(0)};
}

LayerDescriptor LayerDescriptor::companion() const {
    LayerDescriptor result = *this;
    result.sign_ = -sign_;
    return result;
}

LayerDescriptor LayerDescriptor::rotated(int shift) const {
    int count = cell_count();
    auto rotate = [&](const std::vector<int> &map) {
        std::vector<int> out(map.size());
        for (size_t s = 0; s < map.size(); ++s) {
            int slot = ((map[s] - min_cell() + shift) % count + count) % count;
            out[s] = slot + min_cell();
        }
        return out;
    };
    return LayerDescriptor(n_, rotate(column_of_), rotate(row_of_), weights_, sign_);
}

bool LayerDescriptor::operator==(const LayerDescriptor &other) const {
    return n_ == other.n_ && sign_ == other.sign_ && column_of_ == other.column_of_ && row_of_ == other.row_of_ &&
           weights_ == other.weights_;
}

WeightVector sample_dirichlet_weights(int L, RandomStream &rng) {
    if (L < 1) {
        throw std::invalid_argument("L must be >= 1");
    }
    std::vector<double> p(L);
    double sum = 0.0;
    for (double &x : p) {
        x = -std::log(rng.uniform_open());
        sum += x;
    }
    for (double &x : p) {
        x /= sum;
    }
    return WeightVector(std::move(p));
}

std::pair<LayerDescriptor, LayerDescriptor> sample_layer_pair(int n, int L, RandomStream &rng,
                                                              const std::optional<WeightVector> &tied) {
    if (n < 4) {
        throw std::domain_error("sample_layer_pair requires n >= 4");
    }
    if (L < 1) {
        throw std::domain_error("sample_layer_pair requires L >= 1");
    }
    int count = FirstLayerMeasure::cell_count_for(n);
    std::vector<int> columns = uniform_permutation(FirstLayerMeasure::min_cell(), count, rng);
    std::vector<int> rows = uniform_permutation(FirstLayerMeasure::min_cell(), count, rng);
    WeightVector weights = tied ? *tied : sample_dirichlet_weights(L, rng);
    if (weights.L() != L) {
        throw std::invalid_argument("tied weights must have L entries");
    }
    LayerDescriptor original(n, std::move(columns), std::move(rows), std::move(weights), 1);
    LayerDescriptor companion = original.companion();
    return {std::move(original), std::move(companion)};
}

double layer_density(const LayerDescriptor &layer, const FirstLayerMeasure &mu, double u, double v, double w) {
    if (!(w >= 0.0 && w < 1.0)) {
        return 0.0;
    }
    int c = cell_of(u);
    int r = cell_of(v);
    if (c < layer.min_cell() || c > layer.max_cell() || r < layer.min_cell() || r > layer.max_cell()) {
        return 0.0;
    }
    int i = layer.base_at_column(c);
    if (layer.base_at_row(r) != i) {
        return 0.0;
    }
    return mu.cell_sigma(i) * mu.cell_tau(i) * weight_density(w, layer.weights());
}

double layer_density(const LayerDescriptor &layer, const UnitVector3 &a, const UnitVector3 &b, double u, double v,
                     double w) {
    return layer_density(layer, FirstLayerMeasure(a, b, layer.n()), u, v, w);
}

Spin eval_layer_A(const LayerDescriptor &layer, const UnitVector3 &a, double u, double w) {
    Spin s = eval_s(w, layer.weights().L());
    int c = cell_of(u);
    Spin spin;
    if (c >= layer.min_cell() && c <= layer.max_cell()) {
        spin = eval_A_in_cell(a, layer.base_at_column(c), u - std::floor(u));
    } else {
        spin = eval_A(a, u);
    }
    return layer.sign() * spin * s;
}

Spin eval_layer_B(const LayerDescriptor &layer, const UnitVector3 &b, double v, double w) {
    Spin s = eval_s(w, layer.weights().L());
    int r = cell_of(v);
    Spin spin;
    if (r >= layer.min_cell() && r <= layer.max_cell()) {
        spin = eval_B_in_cell(b, layer.base_at_row(r), v - std::floor(v));
    } else {
        spin = eval_B(b, v);
    }
    return layer.sign() * spin * s;
}

double layer_pair_integral(const LayerDescriptor &layer, const FirstLayerMeasure &mu) {
    const int L = layer.weights().L();
    double total = 0.0;
    for (int i = layer.min_cell(); i <= layer.max_cell(); ++i) {
        double mass = mu.cell_mass(i);
        if (mass == 0.0) {
            continue;
        }
        double u0 = layer.column_of(i) - 1;
        double v0 = layer.row_of(i) - 1;
        for (int l = 1; l <= L; ++l) {
            double w = (l - 0.5) / L;
            int quarter_sum = 0;
            for (double du : {0.25, 0.75}) {
                for (double dv : {0.25, 0.75}) {
                    quarter_sum += eval_layer_A(layer, mu.a(), u0 + du, w) * eval_layer_B(layer, mu.b(), v0 + dv, w);
                }
            }
            total += mass * layer.weights()[l] * (0.25 * quarter_sum);
        }
    }
    return total;
}

LayerUniverse::LayerUniverse(int n, int L, bool tie_weights, bool balanced, std::vector<LayerDescriptor> originals)
    : n_(n), L_(L), tie_weights_(tie_weights), balanced_(balanced) {
    if (originals.empty()) {
        throw std::invalid_argument("a layer universe needs at least one layer pair");
    }
    layers_.reserve(2 * originals.size());
    const WeightVector first_weights = originals.front().weights();
    for (auto &layer : originals) {
        if (layer.n() != n || layer.weights().L() != L) {
            throw std::invalid_argument("layer does not match the universe's n and L");
        }
        if (layer.sign() != 1) {
            throw std::invalid_argument("original layers must carry sign +1");
        }
        if (tie_weights && !(layer.weights() == first_weights)) {
            throw std::invalid_argument("tie-weights universe has layers with different weights");
        }
        LayerDescriptor companion = layer.companion();
        layers_.push_back(std::move(layer));
        layers_.push_back(std::move(companion));
    }
}

LayerUniverse LayerUniverse::sample(const UniverseOptions &options, RandomStream &rng) {
    if (options.n < 4) {
        throw std::domain_error("universe requires n >= 4");
    }
    if (options.L < 1 || options.pairs < 1) {
        throw std::domain_error("universe requires L >= 1 and at least one layer pair");
    }
    std::optional<WeightVector> tied;
    if (options.tie_weights) {
        RandomStream weight_stream = rng.split(0);
        tied = sample_dirichlet_weights(options.L, weight_stream);
    }
    std::vector<LayerDescriptor> originals;
    int count = FirstLayerMeasure::cell_count_for(options.n);
    for (int m = 0; m < options.pairs; ++m) {
        RandomStream stream = rng.split(static_cast<uint64_t>(m) + 1);
        LayerDescriptor layer = sample_layer_pair(options.n, options.L, stream, tied).first;
        if (options.balanced) {
            for (int shift = 0; shift < count; ++shift) {
                originals.push_back(layer.rotated(shift));
            }
        } else {
            originals.push_back(std::move(layer));
        }
    }
    return LayerUniverse(options.n, options.L, options.tie_weights, options.balanced, std::move(originals));
}

const LayerDescriptor &LayerUniverse::layer(int label) const {
    if (label < 1 || label > label_count()) {
        throw std::domain_error("label " + std::to_string(label) + " outside 1.." + std::to_string(label_count()));
    }
    return layers_[label - 1];
}

bool LayerUniverse::operator==(const LayerUniverse &other) const {
    return n_ == other.n_ && L_ == other.L_ && tie_weights_ == other.tie_weights_ && balanced_ == other.balanced_ &&
           layers_ == other.layers_;
}

double joint_density(const LayerUniverse &universe, const FirstLayerMeasure &mu, double u, double v, double w,
                     int label) {
    const LayerDescriptor &layer = universe.layer(label);
    return layer_density(layer, mu, u, v, w) / (mu.total_mass() * universe.label_count());
}

}  // namespace lhv
