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

#include "flexarray/grid.hpp"

using namespace flexarray;

TEST_CASE("AntennaGrid - Pixel positions")
{
    auto g = AntennaGrid::half_wavelength(256, 3.5e9);
    const double lambda = speed_of_light / 3.5e9;
    CHECK(g.wavelength() == Catch::Approx(lambda));
    CHECK(g.pitch() == Catch::Approx(lambda / 2));

    // symmetric about the origin, offsets (2m - M - 1) / 2
    CHECK(g.offset(1) == -127.5);
    CHECK(g.offset(256) == 127.5);
    CHECK(g.offset(128) == -0.5);
    CHECK(g.position(1) == Catch::Approx(-g.position(256)));

    auto y = g.positions();
    REQUIRE(y.size() == 256);
    for (std::size_t i = 1; i < y.size(); ++i)
        CHECK(y[i] - y[i - 1] == Catch::Approx(g.pitch()));

    for (int m : {1, 17, 128, 129, 256})
        CHECK(g.index_at(g.position(m)) == m);
}

TEST_CASE("AntennaGrid - Invalid input")
{
    CHECK_THROWS_AS(AntennaGrid(1, 0.1, 0.2), std::invalid_argument);
    CHECK_THROWS_AS(AntennaGrid(8, 0.0, 0.2), std::invalid_argument);
    CHECK_THROWS_AS(AntennaGrid(8, 0.1, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(AntennaGrid::half_wavelength(8, 0.0), std::invalid_argument);

    AntennaGrid g(8, 0.5, 1.0);
    CHECK_THROWS_AS(g.offset(0), std::out_of_range);
    CHECK_THROWS_AS(g.position(9), std::out_of_range);
    CHECK_THROWS_AS(g.index_at(0.1), std::out_of_range);
    CHECK_THROWS_AS(g.index_at(100.0), std::out_of_range);
}

TEST_CASE("Arch - Names round trip")
{
    for (Arch a : all_archs)
        CHECK(parse_arch(arch_name(a)) == a);
    CHECK_THROWS_AS(parse_arch("ULA"), std::invalid_argument);
}
