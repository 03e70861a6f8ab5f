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

#include <gmpxx.h>
#include <gtest/gtest.h>

#include <numeric>

#include "lhv/random.h"
#include "oracles.h"

namespace lhv {
namespace {

mpz_class gmp_binomial(unsigned long n, unsigned long k) {
    mpz_class r;
    mpz_bin_uiui(r.get_mpz_t(), n, k);
    return r;
}

mpz_class gmp_factorial(unsigned long n) {
    mpz_class r;
    mpz_fac_ui(r.get_mpz_t(), n);
    return r;
}

TEST(CountLayers, MatchesGmp) {
    for (unsigned long n : {4ul, 5ul, 7ul, 10ul}) {
        mpz_class c = gmp_binomial(3 * n + 3, 3);
        mpz_class expected = 36 * c * c * gmp_binomial(9 * n * n, 3 * n) * gmp_factorial(3 * n);
        EXPECT_EQ(count_layers(static_cast<int>(n)).str(), expected.get_str()) << "n=" << n;
    }
    EXPECT_THROW(count_layers(3), std::domain_error);
}

TEST(LayerDescriptor, ValidatesMaps) {
    const int n = 4;
    const int G = FirstLayerMeasure::cell_count_for(n);
    std::vector<int> ok(G);
    std::iota(ok.begin(), ok.end(), -2);
    WeightVector w = WeightVector::uniform(2);
    EXPECT_NO_THROW(LayerDescriptor(n, ok, ok, w, 1));
    auto dup = ok;
    dup[3] = dup[4];
    EXPECT_THROW(LayerDescriptor(n, dup, ok, w, 1), std::invalid_argument);
    EXPECT_THROW(LayerDescriptor(n, ok, dup, w, 1), std::invalid_argument);
    auto shortmap = ok;
    shortmap.pop_back();
    EXPECT_THROW(LayerDescriptor(n, shortmap, ok, w, 1), std::invalid_argument);
    auto out_of_range = ok;
    out_of_range[0] = 100;
    EXPECT_THROW(LayerDescriptor(n, out_of_range, ok, w, 1), std::invalid_argument);
    EXPECT_THROW(LayerDescriptor(n, ok, ok, w, 0), std::invalid_argument);
}

TEST(LayerDescriptor, IdentityLayerReproducesBaseDensity) {
    UnitVector3 a = UnitVector3::normalized(0.3, -0.4, 0.8);
    UnitVector3 b = UnitVector3::normalized(-0.1, 0.9, 0.2);
    FirstLayerMeasure mu(a, b, 4);
    WeightVector w({0.3, 0.7});
    LayerDescriptor id = LayerDescriptor::identity(4, w);
    RandomStream rng(5);
    for (int t = 0; t < 2000; ++t) {
        double u = -4.0 + 26.0 * rng.uniform();
        double v = rng.bernoulli(0.5) ? u - std::floor(u) + std::floor(u) : -4.0 + 26.0 * rng.uniform();
        double x = rng.uniform();
        EXPECT_DOUBLE_EQ(layer_density(id, mu, u, v, x), mu.density(u, v) * 2 * eval_q(x, w));
        EXPECT_EQ(eval_layer_A(id, a, u, x), eval_A(a, u) * eval_s(x, 2));
        EXPECT_EQ(eval_layer_B(id, b, v, x), eval_B(b, v) * eval_s(x, 2));
    }
}

TEST(LayerDescriptor, RelocationOracle) {
    RandomStream rng(17);
    const int n = 4;
    for (int t = 0; t < 20; ++t) {
        auto [layer, companion] = sample_layer_pair(n, 3, rng);
        UnitVector3 a = oracle::random_setting(rng);
        UnitVector3 b = oracle::random_setting(rng);
        FirstLayerMeasure mu(a, b, n);
        for (int i = layer.min_cell(); i <= layer.max_cell(); ++i) {
            double du = rng.uniform(), dv = rng.uniform(), w = rng.uniform();
            double u = layer.column_of(i) - 1 + du;
            double v = layer.row_of(i) - 1 + dv;
            double base = mu.density(i - 1 + du, i - 1 + dv);
            EXPECT_DOUBLE_EQ(layer_density(layer, mu, u, v, w), base * weight_density(w, layer.weights()));
            EXPECT_EQ(eval_layer_A(layer, a, u, w), eval_A(a, i - 1 + du) * eval_s(w, 3));
            EXPECT_EQ(eval_layer_B(layer, b, v, w), eval_B(b, i - 1 + dv) * eval_s(w, 3));
            // A row that belongs to a different base cell carries no mass.
            int other = i == layer.max_cell() ? layer.min_cell() : i + 1;
            double v_other = layer.row_of(other) - 1 + dv;
            EXPECT_EQ(layer_density(layer, mu, u, v_other, w), 0.0);
        }
        EXPECT_EQ(layer_density(layer, mu, -3.5, -3.5, 0.5), 0.0);
        EXPECT_EQ(layer_density(layer, mu, 0.5, 0.5, 1.0), 0.0);
    }
}

TEST(LayerDescriptor, CompanionCancels) {
    RandomStream rng(23);
    auto [layer, companion] = sample_layer_pair(5, 4, rng);
    EXPECT_EQ(layer.sign(), 1);
    EXPECT_EQ(companion.sign(), -1);
    EXPECT_EQ(layer.column_map(), companion.column_map());
    UnitVector3 a = oracle::random_setting(rng);
    for (int t = 0; t < 10000; ++t) {
        double u = -5.0 + 35.0 * rng.uniform();
        double w = rng.uniform();
        EXPECT_EQ(eval_layer_A(layer, a, u, w) + eval_layer_A(companion, a, u, w), 0);
        EXPECT_EQ(eval_layer_B(layer, a, u, w) + eval_layer_B(companion, a, u, w), 0);
    }
}

// Midpoint quadrature over the occupied relocated cells and weight intervals.
double quadrature_layer_integral(const LayerDescriptor &layer, const FirstLayerMeasure &mu) {
    const int L = layer.weights().L();
    double total = 0.0;
    for (int c = layer.min_cell(); c <= layer.max_cell(); ++c) {
        for (int r = layer.min_cell(); r <= layer.max_cell(); ++r) {
            if (layer.base_at_column(c) != layer.base_at_row(r)) {
                continue;
            }
            for (int l = 1; l <= L; ++l) {
                double w = (l - 0.5) / L;
                double cell = 0.0;
                for (int j = 0; j < 4; ++j) {
                    for (int k = 0; k < 4; ++k) {
                        double u = c - 1 + (2 * j + 1) / 8.0;
                        double v = r - 1 + (2 * k + 1) / 8.0;
                        cell += eval_layer_A(layer, mu.a(), u, w) * eval_layer_B(layer, mu.b(), v, w) *
                                layer_density(layer, mu, u, v, w);
                    }
                }
                total += cell / 16.0 / L;
            }
        }
    }
    return total;
}

TEST(LayerDescriptor, PerLayerCorrelation) {
    RandomStream rng(29);
    for (int t = 0; t < 30; ++t) {
        auto [layer, companion] = sample_layer_pair(4, 2, rng);
        UnitVector3 a = oracle::random_setting(rng);
        UnitVector3 b = oracle::random_setting(rng);
        FirstLayerMeasure mu(a, b, 4);
        EXPECT_NEAR(layer_pair_integral(layer, mu), -dot(a, b), 1e-13);
        EXPECT_NEAR(layer_pair_integral(companion, mu), -dot(a, b), 1e-13);
        EXPECT_NEAR(quadrature_layer_integral(layer, mu), -dot(a, b), 1e-13);
    }
}

TEST(LayerDescriptor, RotationKeepsPermutations) {
    RandomStream rng(31);
    auto layer = sample_layer_pair(4, 2, rng).first;
    const int G = layer.cell_count();
    EXPECT_EQ(layer.rotated(0), layer);
    EXPECT_EQ(layer.rotated(G), layer);
    auto r = layer.rotated(5);
    for (int i = r.min_cell(); i <= r.max_cell(); ++i) {
        int expected = (layer.column_of(i) - r.min_cell() + 5) % G + r.min_cell();
        EXPECT_EQ(r.column_of(i), expected);
    }
}

TEST(LayerSampling, ColumnsAreUniform) {
    // Column of base cell -2 across independent layers; G = 24 at n = 4.
    RandomStream rng(37);
    const int samples = 24000;
    std::vector<int> counts(24, 0);
    std::vector<int> row_counts(24, 0);
    for (int t = 0; t < samples; ++t) {
        auto layer = sample_layer_pair(4, 1, rng).first;
        ++counts[layer.column_of(-2) + 2];
        ++row_counts[layer.row_of(5) + 2];
    }
    for (const auto &cs : {counts, row_counts}) {
        double chi = 0.0;
        for (int c : cs) {
            chi += (c - 1000.0) * (c - 1000.0) / 1000.0;
        }
        // 99.9% quantile, 23 degrees of freedom.
        EXPECT_LT(chi, 49.728);
    }
}

TEST(LayerSampling, DirichletWeights) {
    RandomStream rng(41);
    double mean1 = 0.0;
    const int samples = 20000;
    for (int t = 0; t < samples; ++t) {
        WeightVector w = sample_dirichlet_weights(4, rng);
        double sum = 0.0;
        for (int l = 1; l <= 4; ++l) {
            ASSERT_GE(w[l], 0.0);
            sum += w[l];
        }
        EXPECT_NEAR(sum, 1.0, 1e-12);
        mean1 += w[1] / samples;
    }
    // Flat Dirichlet(1,1,1,1): E p_1 = 1/4, Var p_1 = 3/80.
    EXPECT_NEAR(mean1, 0.25, 3.29 * std::sqrt(3.0 / 80.0 / samples));
}

TEST(LayerUniverse, LabelsPairCompanions) {
    RandomStream rng(43);
    UniverseOptions opt;
    opt.n = 4;
    opt.L = 3;
    opt.pairs = 7;
    LayerUniverse u = LayerUniverse::sample(opt, rng);
    EXPECT_EQ(u.pair_count(), 7);
    EXPECT_EQ(u.label_count(), 14);
    for (int m = 1; m <= 7; ++m) {
        EXPECT_EQ(u.layer(2 * m - 1).sign(), 1);
        EXPECT_EQ(u.layer(2 * m), u.layer(2 * m - 1).companion());
    }
    EXPECT_THROW(u.layer(0), std::domain_error);
    EXPECT_THROW(u.layer(15), std::domain_error);
}

TEST(LayerUniverse, DeterministicAndPrefixStable) {
    UniverseOptions opt;
    opt.n = 5;
    opt.L = 2;
    opt.pairs = 3;
    RandomStream r1(99), r2(99);
    LayerUniverse a = LayerUniverse::sample(opt, r1);
    LayerUniverse b = LayerUniverse::sample(opt, r2);
    EXPECT_EQ(a, b);
    opt.pairs = 6;
    RandomStream r3(99);
    LayerUniverse c = LayerUniverse::sample(opt, r3);
    for (int label = 1; label <= 6; ++label) {
        EXPECT_EQ(a.layer(label), c.layer(label));
    }
}

TEST(LayerUniverse, TiedWeightsAreShared) {
    UniverseOptions opt;
    opt.n = 4;
    opt.L = 5;
    opt.pairs = 9;
    opt.tie_weights = true;
    RandomStream rng(7);
    LayerUniverse u = LayerUniverse::sample(opt, rng);
    for (const auto &layer : u.layers()) {
        EXPECT_EQ(layer.weights(), u.layer(1).weights());
    }
}

TEST(LayerUniverse, BalancedExpandsRotations) {
    UniverseOptions opt;
    opt.n = 4;
    opt.pairs = 2;
    opt.balanced = true;
    RandomStream rng(8);
    LayerUniverse u = LayerUniverse::sample(opt, rng);
    EXPECT_EQ(u.pair_count(), 2 * 24);
    // Every base cell visits every column exactly pairs times.
    std::vector<int> hits(24, 0);
    for (int m = 1; m <= u.pair_count(); ++m) {
        ++hits[u.layer(2 * m - 1).column_of(3) + 2];
    }
    for (int h : hits) {
        EXPECT_EQ(h, 2);
    }
}

TEST(LayerUniverse, JointDensityIntegratesToOne) {
    UniverseOptions opt;
    opt.n = 4;
    opt.L = 2;
    opt.pairs = 3;
    RandomStream rng(12);
    LayerUniverse u = LayerUniverse::sample(opt, rng);
    UnitVector3 a = UnitVector3::normalized(0.4, 0.5, -0.6);
    UnitVector3 b = UnitVector3::normalized(0.1, -0.7, 0.2);
    FirstLayerMeasure mu(a, b, 4);
    double total = 0.0;
    for (int label = 1; label <= u.label_count(); ++label) {
        const auto &layer = u.layer(label);
        for (int c = layer.min_cell(); c <= layer.max_cell(); ++c) {
            for (int r = layer.min_cell(); r <= layer.max_cell(); ++r) {
                for (int l = 1; l <= 2; ++l) {
                    total += joint_density(u, mu, c - 0.5, r - 0.5, (l - 0.5) / 2, label) / 2;
                }
            }
        }
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
}

}  // namespace
}  // namespace lhv
