// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 nrpos contributors

#include "nrpos/numerology.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>
#include <stdexcept>

using namespace nrpos;

TEST_CASE("numerology parameters at 4 MHz with comb 4", "[numerology]")
{
    const NumerologyConfig n0 = numerology_params(0, 4e6, 4);
    CHECK(n0.scs_hz == 15000.0);
    CHECK(n0.symbol_s == Catch::Approx(66.6666666667e-6).epsilon(1e-12));
    CHECK(n0.n_subcarriers == 264);
    CHECK(n0.n_active == 66);

    const NumerologyConfig n1 = numerology_params(1, 4e6, 4);
    CHECK(n1.scs_hz == 30000.0);
    CHECK(n1.n_subcarriers % 4 == 0);
    CHECK(n1.n_active * 4 == n1.n_subcarriers);
}

TEST_CASE("band smaller than one comb group is rejected", "[numerology]")
{
    REQUIRE_THROWS_AS(numerology_params(0, 10e3, 4), std::invalid_argument);
    REQUIRE_THROWS_AS(numerology_params(7, 4e6, 4), std::invalid_argument);
    REQUIRE_THROWS_AS(numerology_params(-1, 4e6, 4), std::invalid_argument);
}

TEST_CASE("comb symbol shifts follow the published pattern", "[numerology]")
{
    CHECK(comb_symbol_shift(0, 4) == 0);
    CHECK(comb_symbol_shift(1, 4) == 2);
    CHECK(comb_symbol_shift(2, 4) == 1);
    CHECK(comb_symbol_shift(3, 4) == 3);
    CHECK(band_centre_shift(0, 4e6) == 133);
    CHECK(comb_offset(0, 0, 0, 4e6, 4) == -133);
    for (int m = 0; m < 8; ++m)
        CHECK(comb_offset(m, 0, 0, 4e6, 1) == -133);
}

TEST_CASE("PRS subcarrier sets partition the grid", "[numerology]")
{
    const NumerologyConfig n0 = numerology_params(0, 4e6, 4);
    for (int m = 0; m < 4; ++m)
    {
        std::set<int> all;
        for (int i = 0; i < 4; ++i)
        {
            const auto s = prs_subcarriers(m, i, 0, 4e6, 4);
            REQUIRE(static_cast<int>(s.size()) == n0.n_active);
            REQUIRE(std::is_sorted(s.begin(), s.end()));
            for (int n : s)
                REQUIRE(all.insert(n).second);
        }
        REQUIRE(static_cast<int>(all.size()) == n0.n_subcarriers);
        REQUIRE(*all.begin() == -133);
        REQUIRE(*all.rbegin() == n0.n_subcarriers - 1 - 133);
    }
    for (int m = 0; m < 6; ++m)
    {
        const auto a = prs_subcarriers(m, 0, 0, 4e6, 2);
        const auto b = prs_subcarriers(m, 1, 0, 4e6, 2);
        std::vector<int> inter;
        std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(inter));
        REQUIRE(inter.empty());
    }
}

TEST_CASE("subcarrier frequencies", "[numerology]")
{
    CHECK(subcarrier_frequency(0, 0, 0, 0, 4e6, 4) == Catch::Approx(-1.995e6).epsilon(1e-15));
    double prev = -1e300;
    for (int n = 0; n < 66; ++n)
    {
        const double f = subcarrier_frequency(n, 1, 2, 0, 4e6, 4);
        REQUIRE(f > prev);
        prev = f;
    }
    // 15 kHz band holds one subcarrier, so kappa_bar = 0 and f = n * scs
    CHECK(band_centre_shift(0, 15e3) == 0);
    CHECK(subcarrier_frequency(0, 0, 0, 0, 15e3, 1) == 0.0);
    REQUIRE_THROWS_AS(subcarrier_frequency(66, 0, 0, 0, 4e6, 4), std::invalid_argument);
}
