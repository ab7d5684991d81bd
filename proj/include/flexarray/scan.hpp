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

#ifndef FLEXARRAY_SCAN_HPP
#define FLEXARRAY_SCAN_HPP

#include "codebook.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace flexarray
{
    // Relative tolerance under which two utilities count as tied
    inline constexpr double utility_tie_tolerance = 1e-12;

    // True if a beats b by more than the tie tolerance
    inline bool strictly_better(double a, double b)
    {
        if (std::isinf(b) && b < 0.0)
            return !(std::isinf(a) && a < 0.0);
        return a - b > utility_tie_tolerance * std::max(std::abs(a), std::abs(b));
    }

    struct Evaluation
    {
        std::size_t id = 0;   // position in the evaluated codebook
        Codeword codeword;
        double utility = -std::numeric_limits<double>::infinity();
    };

    struct TrainingResult
    {
        std::string scheme;
        Codeword best;
        double best_utility = -std::numeric_limits<double>::infinity();
        std::vector<Evaluation> evaluations;
        std::size_t overhead = 0;

        // Two-stage breakdown, zero for other schemes
        std::size_t stage1_overhead = 0;
        std::size_t stage2_overhead = 0;
        std::map<Arch, Evaluation> arch_winners;
    };

    namespace detail
    {
        // Index of the best evaluation; earliest wins within the tie tolerance
        inline std::size_t argmax(const std::vector<Evaluation> &ev, std::size_t begin, std::size_t end)
        {
            std::size_t best = begin;
            for (std::size_t i = begin + 1; i < end; ++i)
                if (strictly_better(ev[i].utility, ev[best].utility))
                    best = i;
            return best;
        }
    }

    // Evaluates every codeword and returns the best one
    template <typename Utility>
    TrainingResult exhaustive_scan(const Codebook &cb, Utility &&utility)
    {
        if (cb.empty())
            throw std::invalid_argument("exhaustive_scan: empty codebook");
        TrainingResult res;
        res.scheme = "exhaustive";
        res.evaluations.reserve(cb.size());
        for (std::size_t i = 0; i < cb.size(); ++i)
            res.evaluations.push_back({i, cb[i], double(utility(cb[i]))});

        for (Arch a : all_archs)
        {
            const auto r = cb.partition(a);
            if (r.size() > 0)
                res.arch_winners[a] = res.evaluations[detail::argmax(res.evaluations, r.begin, r.end)];
        }
        const auto &b = res.evaluations[detail::argmax(res.evaluations, 0, res.evaluations.size())];
        res.best = b.codeword;
        res.best_utility = b.utility;
        res.overhead = res.evaluations.size();
        return res;
    }

    // Array-level scan over non-overlapping tiles, then a pixel-level scan of the reference
    // point inside the winning tile, separately per architecture. The stage-1 winner stays a
    // candidate in stage 2 so the refinement never loses utility. Architectures without
    // feasible layouts are skipped.
    template <typename Utility>
    TrainingResult two_stage_scan(const AntennaGrid &grid, int activated, int modules, Utility &&utility,
                                  const std::vector<Arch> &archs = {all_archs.begin(), all_archs.end()})
    {
        TrainingResult res;
        res.scheme = "two-stage";
        std::optional<Evaluation> best;
        for (Arch a : archs)
        {
            const auto s1 = build_stage1_codebook(grid, a, activated, modules);
            if (s1.empty())
                continue;

            const std::size_t first = res.evaluations.size();
            for (const auto &cw : s1)
                res.evaluations.push_back({res.evaluations.size(), cw, double(utility(cw))});
            const std::size_t w1 = detail::argmax(res.evaluations, first, res.evaluations.size());
            res.stage1_overhead += s1.size();

            const Evaluation winner1 = res.evaluations[w1];
            const auto s2 = build_stage2_codebook(grid, winner1.codeword, activated, modules);
            Evaluation winner = winner1;
            for (const auto &cw : s2)
            {
                Evaluation e{res.evaluations.size(), cw, double(utility(cw))};
                res.evaluations.push_back(e);
                if (strictly_better(e.utility, winner.utility))
                    winner = e;
            }
            res.stage2_overhead += s2.size();
            res.arch_winners[a] = winner;
            if (!best || strictly_better(winner.utility, best->utility))
                best = winner;
        }
        if (!best)
            throw std::invalid_argument("two_stage_scan: no architecture has a feasible layout");
        res.best = best->codeword;
        res.best_utility = best->utility;
        res.overhead = res.stage1_overhead + res.stage2_overhead;
        return res;
    }
}

#endif
