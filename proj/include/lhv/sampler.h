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

#ifndef LHV_SAMPLER_H
#define LHV_SAMPLER_H

#include <array>
#include <cstdint>
#include <vector>

#include "lhv/base_layer.h"
#include "lhv/layers.h"
#include "lhv/random.h"

namespace lhv {

/// One realization (m, u, v, w) of (R, Lambda*, Lambda**, Lambda).
struct HiddenSample {
    int label;
    double u;
    double v;
    double w;
};

struct Draw {
    HiddenSample sample;
    /// Base cell whose ensemble the sample landed in.
    int base_cell;
    int weight_interval;
    Spin A;
    Spin B;
};

struct CorrelationEstimate {
    double mean = 0.0;
    double stderr = 0.0;
    uint64_t trials = 0;
    double exact_target = 0.0;
    /// Expectation under the normalized finite-n measure: -a.b / total_mass.
    double model_expectation = 0.0;
    /// Mean of A*B within each batch, in batch order.
    std::vector<double> batch_means;
};

/// Draws from the joint law of (R, Lambda*, Lambda**, Lambda) for fixed
/// settings by inverse transform: label, then base cell by mass, then
/// uniform offsets inside the relocated cell, then weight interval.
///
/// Holds references to the universe; it must outlive the sampler.
class Sampler {
   public:
    Sampler(const LayerUniverse &universe, const UnitVector3 &a, const UnitVector3 &b,
            FirstLayerMeasure::Mode mode = FirstLayerMeasure::Mode::kSpline);

    Draw draw(RandomStream &rng) const;

    const FirstLayerMeasure &measure() const {
        return mu_;
    }
    const LayerUniverse &universe() const {
        return universe_;
    }

   private:
    const LayerUniverse &universe_;
    FirstLayerMeasure mu_;
    std::vector<double> cell_cdf_;
    std::vector<std::vector<double>> weight_cdf_;
};

Draw draw(const Sampler &sampler, RandomStream &rng);

/// Number of independent batches a run is split into. Fixed so that results
/// do not depend on the number of worker threads.
inline constexpr int kBatches = 64;

/// Mean of A*B over `trials` draws. Batches use split streams of `rng` and
/// run on up to `threads` workers (0 = hardware concurrency); the result is
/// bit-identical for any thread count. Throws std::invalid_argument if
/// trials < 1.
CorrelationEstimate run_experiment(const Sampler &sampler, uint64_t trials, const RandomStream &rng,
                                   unsigned threads = 0);

struct ChshResult {
    /// E(a,b), E(a,b'), E(a',b), E(a',b').
    std::array<CorrelationEstimate, 4> estimates;
    double S = 0.0;
    /// sqrt of the summed squared standard errors.
    double stderr = 0.0;
    /// S computed from E = -cos of the settings.
    double exact_target = 0.0;
};

/// S = |E(a,b) - E(a,b')| + |E(a',b) + E(a',b')| from four independent runs.
ChshResult chsh(const LayerUniverse &universe, const UnitVector3 &a, const UnitVector3 &a_alt,
                const UnitVector3 &b, const UnitVector3 &b_alt, uint64_t trials, const RandomStream &rng,
                FirstLayerMeasure::Mode mode = FirstLayerMeasure::Mode::kSpline, unsigned threads = 0);

}  // namespace lhv

#endif
