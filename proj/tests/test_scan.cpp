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

#include <catch2/catch_amalgamated.hpp>

#include "flexarray/scan.hpp"

using namespace flexarray;

TEST_CASE("Scan - Tie breaking")
{
    CHECK(strictly_better(1.0, 0.5));
    CHECK(!strictly_better(1.0, 1.0));
    CHECK(!strictly_better(1.0 + 1e-14, 1.0));
    CHECK(strictly_better(0.0, -std::numeric_limits<double>::infinity()));

    AntennaGrid g(16, 0.5, 1.0);
    auto acc = build_acc(g, 4, 2);
    auto flat = exhaustive_scan(acc, [](const Codeword &) { return 3.0; });
    CHECK(flat.best == acc[0]);
    CHECK(flat.overhead == acc.size());

    // the best utility sits at the last CA codeword
    auto r = exhaustive_scan(acc, [](const Codeword &c) { return c.arch == Arch::CA ? double(c.ref_index) : 0.0; });
    CHECK(r.best.arch == Arch::CA);
    CHECK(r.best.ref_index == 13);
    CHECK(r.arch_winners.at(Arch::CA).codeword.ref_index == 13);
    CHECK(r.arch_winners.at(Arch::USA).id == acc.partition(Arch::USA).begin);
}

TEST_CASE("Scan - Single entry and empty codebooks")
{
    AntennaGrid g(16, 0.5, 1.0);
    auto one = Codebook(16, 4, 1, {codeword_ca(g, 4, 3)});
    auto r = exhaustive_scan(one, [](const Codeword &) { return -2.0; });
    CHECK(r.best == one[0]);
    CHECK(r.overhead == 1);
    CHECK_THROWS_AS(exhaustive_scan(Codebook(), [](const Codeword &) { return 0.0; }), std::invalid_argument);
}

TEST_CASE("Scan - Two-stage structure")
{
    AntennaGrid g(64, 0.5, 1.0);
    std::vector<Codeword> seen;
    auto util = [&](const Codeword &c)
    {
        seen.push_back(c);
        return -std::abs(double(c.ref_index) - 20.0) - 0.01 * c.phi;
    };
    auto r = two_stage_scan(g, 8, 4, util);
    CHECK(r.overhead == seen.size());

    std::size_t s1 = 0;
    for (Arch a : all_archs)
        s1 += build_stage1_codebook(g, a, 8, 4).size();
    CHECK(r.stage1_overhead == s1);

    // every stage-2 reference lies within the winning tile, after its first pixel
    for (const auto &[arch, win] : r.arch_winners)
    {
        const auto s1cb = build_stage1_codebook(g, arch, 8, 4);
        CHECK(win.codeword.arch == arch);
        (void)s1cb;
    }
    CHECK(r.best.arch == Arch::CA);
    CHECK(r.best.ref_index == 20);

    auto acc = build_acc(g, 8, 4);
    auto ex = exhaustive_scan(acc, util);
    CHECK(ex.best_utility >= r.best_utility);
    CHECK(acc.find(r.best.pixels) < acc.size());

    // reverse evaluation order cannot change the exhaustive winner beyond ties
    std::vector<Codeword> rev(acc.entries().rbegin(), acc.entries().rend());
    double best = -1e300;
    for (const auto &c : rev)
        best = std::max(best, util(c));
    CHECK(best == ex.best_utility);
}
