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

#include "lhv/sampler.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace lhv {

namespace {

// Index of the first cdf entry strictly greater than x; entries with zero
// probability repeat the previous value and are never chosen.
int invert(const std::vector<double> &cdf, double x) {
    auto it = std::upper_bound(cdf.begin(), cdf.end(), x);
    if (it == cdf.end()) {
        --it;
        // x rounded onto the total: take the last entry with positive mass.
        while (it != cdf.begin() && *(it - 1) == *it) {
            --it;
        }
    }
    return static_cast<int>(it - cdf.begin());
}

std::vector<double> cumulative(const std::vector<double> &p) {
    std::vector<double> cdf(p.size());
    double total = 0.0;
    for (size_t k = 0; k < p.size(); ++k) {
        total += p[k];
        cdf[k] = total;
    }
    return cdf;
}

struct BatchStats {
    uint64_t count = 0;
    int64_t sum = 0;  // sum of A*B, each +-1
};

}  // namespace

Sampler::Sampler(const LayerUniverse &universe, const UnitVector3 &a, const UnitVector3 &b,
                 FirstLayerMeasure::Mode mode)
    : universe_(universe), mu_(a, b, universe.n(), mode) {
    std::vector<double> masses(mu_.cell_masses().begin(), mu_.cell_masses().end());
    cell_cdf_ = cumulative(masses);
    weight_cdf_.reserve(universe.label_count());
    for (const auto &layer : universe.layers()) {
        weight_cdf_.push_back(cumulative(layer.weights().values()));
    }
}

Draw Sampler::draw(RandomStream &rng) const {
    Draw d{};
    int label = static_cast<int>(rng.below(static_cast<uint64_t>(universe_.label_count()))) + 1;
    const LayerDescriptor &layer = universe_.layer(label);

    int slot = invert(cell_cdf_, rng.uniform() * cell_cdf_.back());
    int base = slot + mu_.min_cell();
    double u = (layer.column_of(base) - 1) + rng.uniform();
    double v = (layer.row_of(base) - 1) + rng.uniform();

    const auto &wcdf = weight_cdf_[label - 1];
    int l = invert(wcdf, rng.uniform() * wcdf.back()) + 1;
    const int L = layer.weights().L();
    double w = (l - 1 + rng.uniform()) / L;
    // Keep w inside its interval when the division rounds onto the boundary.
    if (weight_interval(w, L) != l) {
        w = (l - 1 + 0.5) / L;
    }

    d.sample = HiddenSample{label, u, v, w};
    d.base_cell = base;
    d.weight_interval = l;
    d.A = eval_layer_A(layer, mu_.a(), u, w);
    d.B = eval_layer_B(layer, mu_.b(), v, w);
    return d;
}

Draw draw(const Sampler &sampler, RandomStream &rng) {
    return sampler.draw(rng);
}

CorrelationEstimate run_experiment(const Sampler &sampler, uint64_t trials, const RandomStream &rng,
                                   unsigned threads) {
    if (trials < 1) {
        throw std::invalid_argument("run_experiment requires trials >= 1");
    }
    std::vector<BatchStats> batches(kBatches);
    std::atomic<int> next{0};
    auto worker = [&]() {
        for (int b = next++; b < kBatches; b = next++) {
            uint64_t count = trials / kBatches + (static_cast<uint64_t>(b) < trials % kBatches ? 1 : 0);
            RandomStream stream = rng.split(static_cast<uint64_t>(b));
            BatchStats stats;
            for (uint64_t t = 0; t < count; ++t) {
                Draw d = sampler.draw(stream);
                stats.sum += d.A * d.B;
            }
            stats.count = count;
            batches[b] = stats;
        }
    };
    if (threads == 0) {
        threads = std::max(1u, std::thread::hardware_concurrency());
    }
    threads = std::min<unsigned>(threads, kBatches);
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back(worker);
        }
        for (auto &th : pool) {
            th.join();
        }
    }

    CorrelationEstimate est;
    int64_t sum = 0;
    for (const auto &b : batches) {
        sum += b.sum;
        est.trials += b.count;
        if (b.count > 0) {
            est.batch_means.push_back(static_cast<double>(b.sum) / static_cast<double>(b.count));
        }
    }
    const double n = static_cast<double>(est.trials);
    est.mean = static_cast<double>(sum) / n;
    // Products are +-1, so sum of squares is the trial count.
    if (est.trials > 1) {
        double var = (n - n * est.mean * est.mean) / (n - 1.0);
        est.stderr = std::sqrt(std::max(var, 0.0) / n);
    }
    const auto &mu = sampler.measure();
    est.exact_target = -dot(mu.a(), mu.b());
    est.model_expectation = est.exact_target / mu.total_mass();
    return est;
}

ChshResult chsh(const LayerUniverse &universe, const UnitVector3 &a, const UnitVector3 &a_alt,
                const UnitVector3 &b, const UnitVector3 &b_alt, uint64_t trials, const RandomStream &rng,
                FirstLayerMeasure::Mode mode, unsigned threads) {
    const std::array<std::pair<const UnitVector3 *, const UnitVector3 *>, 4> pairs = {{
        {&a, &b},
        {&a, &b_alt},
        {&a_alt, &b},
        {&a_alt, &b_alt},
    }};
    ChshResult result;
    double var = 0.0;
    for (int k = 0; k < 4; ++k) {
        Sampler sampler(universe, *pairs[k].first, *pairs[k].second, mode);
        result.estimates[k] = run_experiment(sampler, trials, rng.split(static_cast<uint64_t>(k) + 1000), threads);
        var += result.estimates[k].stderr * result.estimates[k].stderr;
    }
    const auto &e = result.estimates;
    result.S = std::abs(e[0].mean - e[1].mean) + std::abs(e[2].mean + e[3].mean);
    result.stderr = std::sqrt(var);
    result.exact_target = std::abs(e[0].exact_target - e[1].exact_target) + std::abs(e[2].exact_target + e[3].exact_target);
    return result;
}

}  // namespace lhv
