// SPDX-License-Identifier: Apache-2.0
//
// mzisim - digital twin and control stack for cascaded-MZI modulator arrays
// Copyright (C) 2026 The mzisim authors
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

#include <catch_amalgamated.hpp>

#include <cmath>

#include "mzisim/beams.hpp"
#include "mzisim/crosstalk.hpp"
#include "mzisim/error.hpp"

using namespace mzisim;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace
{

double db(double p) { return 10.0 * std::log10(p); }
double lin(double d) { return std::pow(10.0, d / 10.0); }

Errc code_of(const std::function<void()> &f)
{
    try
    {
        f();
    }
    catch (const Error &e)
    {
        return e.code();
    }
    FAIL("expected an mzisim::Error");
    return Errc::invalid_argument;
}

} // namespace

TEST_CASE("scenario outputs match hand-built sums", "[crosstalk]")
{
    const auto g = CrosstalkGraph::nearest_neighbour(4, -45.3, -76.2, -95.0);
    const auto lv = ChannelLevels::uniform(4, 0.99, 1e-7);
    const DetectorModel none{};

    const auto a = crosstalk_matrix(g, Scenario::A, lv, none);
    const auto b = crosstalk_matrix(g, Scenario::B, lv, none);
    const auto c = crosstalk_matrix(g, Scenario::C, lv, none);
    // aggressor ON output is the reference: 0.99
    CHECK_THAT(a.at_linear(1, 2), WithinRel((lin(-45.3) * 1e-7 + lin(-76.2)) / 0.99, 1e-12));
    CHECK_THAT(b.at_linear(1, 2), WithinRel((lin(-45.3) * 0.99 + lin(-76.2)) / 0.99, 1e-12));
    CHECK_THAT(c.at_linear(1, 2), WithinRel((1e-7 + lin(-45.3) * 1e-7 + lin(-76.2)) / 0.99, 1e-12));
    CHECK_THAT(a.at_linear(0, 3), WithinRel((lin(-95.0) * 1e-7 + lin(-95.0)) / 0.99, 1e-12));
    for (std::size_t i = 0; i < 4; ++i)
        CHECK(a.at_db(i, i) == 0.0);
}

TEST_CASE("crosstalk is reciprocal for a symmetric graph", "[crosstalk][property]")
{
    const auto g = CrosstalkGraph::nearest_neighbour(8, -40.0, -70.0, -88.0);
    for (auto s : {Scenario::A, Scenario::B, Scenario::C})
    {
        const auto m = crosstalk_matrix(g, s, ChannelLevels::uniform(8, 0.98, 2e-7), DetectorModel{});
        for (std::size_t i = 0; i < 8; ++i)
            for (std::size_t j = 0; j < 8; ++j)
                REQUIRE(m.at_linear(i, j) == m.at_linear(j, i));
    }
}

TEST_CASE("nearest-neighbour scenario ordering B >= C >= A", "[crosstalk][property]")
{
    // B >= C needs the gated leak through an ON victim to beat the victim's own OFF output
    for (double before : {-60.0, -45.3, -30.0})
        for (double after : {-90.0, -76.2, -60.0})
            for (double t_off : {1e-9, 1e-7, 1e-5})
            {
                const auto g = CrosstalkGraph::nearest_neighbour(6, before, after, -100.0);
                const auto lv = ChannelLevels::uniform(6, 0.97, t_off);
                const auto a = crosstalk_matrix(g, Scenario::A, lv, DetectorModel{});
                const auto b = crosstalk_matrix(g, Scenario::B, lv, DetectorModel{});
                const auto c = crosstalk_matrix(g, Scenario::C, lv, DetectorModel{});
                const bool calibrated = lin(before) * 0.97 >= t_off * (1.0 + lin(before));
                for (std::size_t i = 0; i + 1 < 6; ++i)
                    for (auto [x, y] : {std::pair{i, i + 1}, std::pair{i + 1, i}})
                    {
                        REQUIRE(c.at_linear(x, y) >= a.at_linear(x, y));
                        if (calibrated)
                            REQUIRE(b.at_linear(x, y) >= c.at_linear(x, y));
                    }
                for (std::size_t k = 0; k < 36; ++k)
                    REQUIRE(c.linear[k] >= a.linear[k]);
            }
}

TEST_CASE("detector floor limits weak couplings and is idempotent", "[crosstalk]")
{
    const auto g = CrosstalkGraph::nearest_neighbour(5, -45.3, -76.2, -95.0);
    const auto lv = ChannelLevels::uniform(5, 1.0, 1e-7);
    const auto det = DetectorModel::from_floor_db(-80.0);
    const auto m = crosstalk_matrix(g, Scenario::A, lv, det);
    CHECK(m.floor_limited[0 * 5 + 2]);
    CHECK(m.at_db(0, 2) == -80.0);
    CHECK_FALSE(m.floor_limited[0 * 5 + 1]);
    CHECK_THAT(m.at_db(0, 1), WithinAbs(db(lin(-45.3) * 1e-7 + lin(-76.2)), 1e-9));
    for (std::size_t k = 0; k < 25; ++k)
        REQUIRE(std::max(m.db[k], -80.0) == m.db[k]);
}

TEST_CASE("zero-coupling graph isolates every channel", "[crosstalk]")
{
    CrosstalkGraph g(4);
    const auto m = crosstalk_matrix(g, Scenario::B, ChannelLevels::uniform(4, 1.0, 1e-6), DetectorModel{});
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j)
            if (i != j)
                REQUIRE(m.at_linear(i, j) == 0.0);
    CHECK(code_of([&] { g.set(1, 1, -10.0, -10.0); }) == Errc::invalid_argument);
    CHECK(code_of([&] { g.set(1, 5, -10.0, -10.0); }) == Errc::out_of_range);
    g.set(0, 1, 3.0, -10.0);
    CHECK_THROWS_AS(g.validate(), Error);
}

TEST_CASE("scenario C prediction", "[crosstalk]")
{
    CHECK_THAT(scenario_c_prediction_db(70.0, -76.2), WithinAbs(db(1e-7 + lin(-76.2)), 1e-12));
    CHECK_THAT(scenario_c_prediction_db(200.0, -76.2), WithinAbs(-76.2, 1e-9));
    CHECK_NOTHROW(check_scenario_c_consistency(-70.1, -68.0, 3.0));
    CHECK(code_of([] { check_scenario_c_consistency(-75.0, -68.0, 3.0); }) == Errc::unachievable_target);
}

TEST_CASE("gaussian tail is analytic far below double range", "[beams]")
{
    CHECK_THAT(gaussian_tail_db(4.33, 0.5), WithinAbs(-651.4, 0.1));
    CHECK_THAT(gaussian_tail_db(0.5, 0.5), WithinAbs(db(std::exp(-2.0)), 1e-12));
    CHECK(gaussian_tail_db(0.0, 0.5) == 0.0);
}

TEST_CASE("idle-site leakage is set by the evanescent copies", "[beams]")
{
    BeamArray arr;
    const auto active = parse_active_pattern("first:4", arr.n_beams);
    const auto rep = site_leakage_report(arr, active);
    REQUIRE(rep.size() == 4);
    const auto &nn = rep.front();
    CHECK(nn.site == 4);
    CHECK(nn.distance == 1);
    // own copy from site 3 plus the NNN copy from site 2, over the active peak
    const double a_nn = std::sqrt(lin(-50.8)), a_nnn = std::sqrt(lin(-90.0));
    const double peak = (1.0 + 2.0 * a_nn + a_nnn) * (1.0 + 2.0 * a_nn + a_nnn);
    CHECK_THAT(nn.intensity_db, WithinAbs(db((a_nn + a_nnn) * (a_nn + a_nnn) / peak), 1e-6));
    CHECK(nn.intensity_db > -51.0);
    CHECK(nn.intensity_db < -50.6);
    for (const auto &l : rep)
        if (l.distance >= 2)
        {
            CHECK(l.floor_limited);
            CHECK(l.reported_db == arr.measurement_floor_db);
        }

    // the Gaussian tail alone would be invisible
    arr.nn_leak_db = -INFINITY;
    arr.nnn_leak_db = -INFINITY;
    const auto bare = site_leakage_report(arr, active);
    CHECK(bare.front().intensity_db < -600.0);
}

TEST_CASE("summation modes bracket each other", "[beams][property]")
{
    BeamArray arr;
    arr.leak_phase = 2.0;
    const auto active = parse_active_pattern("evens", arr.n_beams);
    const auto co = site_leakage_report(arr, active, Summation::coherent);
    const auto wc = site_leakage_report(arr, active, Summation::worst_case);
    const auto in = site_leakage_report(arr, active, Summation::incoherent);
    REQUIRE(co.size() == 4);
    for (std::size_t i = 0; i < co.size(); ++i)
    {
        CHECK(wc[i].intensity_db >= co[i].intensity_db - 0.05);
        CHECK(wc[i].intensity_db >= in[i].intensity_db - 0.05);
    }
    CHECK(site_leakage_report(arr, parse_active_pattern("all", 8)).empty());
}

TEST_CASE("profile is normalised and floored", "[beams]")
{
    BeamArray arr;
    const auto x = profile_axis(arr, 2001);
    const auto p = target_plane_profile(arr, {0, 1, 2}, x);
    double mx = 0.0;
    for (std::size_t i = 0; i < p.intensity.size(); ++i)
    {
        mx = std::max(mx, p.intensity[i]);
        REQUIRE(p.intensity_db[i] >= arr.measurement_floor_db);
    }
    CHECK(mx == 1.0);
    CHECK(code_of([&] { (void)target_plane_profile(arr, {}, x); }) == Errc::empty_active_set);
    CHECK(code_of([&] { (void)target_plane_profile(arr, {0}, {1000.0}); }) == Errc::out_of_range);
}

TEST_CASE("active pattern grammar", "[beams]")
{
    using V = std::vector<std::size_t>;
    CHECK(parse_active_pattern("all", 4) == V{0, 1, 2, 3});
    CHECK(parse_active_pattern("evens", 5) == V{0, 2, 4});
    CHECK(parse_active_pattern("odds", 5) == V{1, 3});
    CHECK(parse_active_pattern("single:3", 8) == V{3});
    CHECK(parse_active_pattern("first:2", 8) == V{0, 1});
    CHECK(parse_active_pattern("list:5,1,1,3", 8) == V{1, 3, 5});
    CHECK(parse_active_pattern("mask:1001", 4) == V{0, 3});
    for (const char *bad : {"", "some", "all:1", "single:", "single:9", "first:9", "list:1,x", "list:1,,2", "mask:10",
                            "mask:1021", "single:-1"})
    {
        INFO(bad);
        CHECK(code_of([&] { (void)parse_active_pattern(bad, 8); }) == Errc::malformed_pattern);
    }
}
