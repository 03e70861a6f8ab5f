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

#ifndef LHV_RANDOM_H
#define LHV_RANDOM_H

#include <cstdint>
#include <random>

namespace lhv {

/// Seedable, splittable random stream.
///
/// Output is bit-reproducible across platforms: the engine is mt19937_64
/// (fully specified by the standard) and conversion to doubles is done here
/// rather than through the implementation-defined std distributions.
class RandomStream {
   public:
    explicit RandomStream(uint64_t seed);

    uint64_t seed() const {
        return seed_;
    }

    uint64_t next_u64() {
        return engine_();
    }

    /// Uniform on [0, 1) with 53 bits of resolution.
    double uniform();

    /// Uniform on (0, 1).
    double uniform_open();

    /// Uniform integer in [0, n). n must be positive.
    uint64_t below(uint64_t n);

    bool bernoulli(double p) {
        return uniform() < p;
    }

    /// Child stream determined only by this stream's seed and `index`, not by
    /// how many values have been drawn so far.
    RandomStream split(uint64_t index) const;

   private:
    uint64_t seed_;
    std::mt19937_64 engine_;
};

uint64_t splitmix64(uint64_t x);

}  // namespace lhv

#endif
