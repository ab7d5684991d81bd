// SPDX-License-Identifier: Apache-2.0
//
// flexarray: array configuration codebooks and training for flexible XL-MIMO
// Copyright (C) 2026 The flexarray authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef FLEXARRAY_RNG_HPP
#define FLEXARRAY_RNG_HPP

#include <complex>
#include <cstdint>
#include <random>
#include <string_view>

namespace flexarray
{
    // 64-bit FNV-1a hash of a stream label
    inline constexpr std::uint64_t label_hash(std::string_view label)
    {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (char c : label)
        {
            h ^= std::uint64_t(static_cast<unsigned char>(c));
            h *= 0x100000001b3ULL;
        }
        return h;
    }

    // Independent random substream derived from a master seed and a fixed label.
    // Streams with different labels do not share state, so adding a consumer never
    // perturbs the draws of an existing one.
    class RandomStream
    {
    public:
        RandomStream(std::uint64_t seed, std::string_view label)
        {
            const std::uint64_t h = label_hash(label);
            std::seed_seq seq{std::uint32_t(seed), std::uint32_t(seed >> 32), std::uint32_t(h), std::uint32_t(h >> 32)};
            engine_.seed(seq);
        }

        // Uniform in [0, 1)
        double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }

        double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

        double normal() { return normal_(engine_); }

        // Circularly-symmetric complex Gaussian with the given variance
        std::complex<double> complex_normal(double variance = 1.0)
        {
            const double s = std::sqrt(0.5 * variance);
            const double re = normal();
            const double im = normal();
            return {s * re, s * im};
        }

        std::mt19937_64 &engine() { return engine_; }

    private:
        std::mt19937_64 engine_;
        std::normal_distribution<double> normal_{0.0, 1.0};
    };
}

#endif
