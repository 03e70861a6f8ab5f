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

#include "lhv/random.h"

#include <stdexcept>

namespace lhv {

uint64_t splitmix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

RandomStream::RandomStream(uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {
}

double RandomStream::uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RandomStream::uniform_open() {
    double u;
    do {
        u = uniform();
    } while (u == 0.0);
    return u;
}

uint64_t RandomStream::below(uint64_t n) {
    if (n == 0) {
        throw std::invalid_argument("RandomStream::below: n must be positive");
    }
    // Rejection on the top of the range keeps the result exactly uniform.
    uint64_t limit = UINT64_MAX - (UINT64_MAX % n + 1) % n;
    uint64_t x;
    do {
        x = engine_();
    } while (x > limit);
    return x % n;
}

RandomStream RandomStream::split(uint64_t index) const {
    return RandomStream(splitmix64(seed_ ^ splitmix64(index + 0x632BE59BD9B4E019ULL)));
}

}  // namespace lhv
