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
#include <filesystem>
#include <numbers>

#include "mzisim/error.hpp"
#include "mzisim/io.hpp"
#include "mzisim/waveform_synth.hpp"

using namespace mzisim;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using std::numbers::pi;

TEST_CASE("pulse train layout", "[waveform]")
{
    PulseSpec s;
    s.on_level = 5.0;
    s.off_level = -1.0;
    s.on_duration = 300e-9;
    s.period = 1e-6;
    const auto w = make_pulse_train(s, 3, 1e-9);
    REQUIRE(w.size() == 3000);
    std::size_t on = 0;
    for (double v : w.samples)
        on += v == 5.0;
    CHECK(on == 900);
    CHECK(w.samples[299] == 5.0);
    CHECK(w.samples[300] == -1.0);
    CHECK(w.samples[1000] == 5.0);

    s.edge_shape = EdgeShape::raised_cosine;
    s.edge_time = 20e-9;
    const auto rc = make_pulse_train(s, 1, 1e-9);
    for (std::size_t i = 1; i < 20; ++i)
        REQUIRE(rc.samples[i] > rc.samples[i - 1]);
    CHECK(rc.samples[150] == 5.0);
    CHECK_THAT(rc.samples[289], WithinAbs(rc.samples[10], 1e-12));

    s.period = 1.00001e-6;
    CHECK_THROWS_AS(make_pulse_train(s, 2, 1e-9), Error);
    s.period = 1e-6;
    s.on_duration = 2e-6;
    CHECK_THROWS_AS(make_pulse_train(s, 2, 1e-9), Error);
}

TEST_CASE("phase_from_power inverts the static map", "[waveform][property]")
{
    const auto ch = ModulatorChannel::uniform(2, 0.507, 74.7);
    const double t0 = channel_null_transmission(ch);
    for (double p : {t0, 1e-6, 1e-3, 0.1, 0.5, 0.9, 0.999})
    {
        const double phi = phase_from_power(ch, p);
        REQUIRE(phi >= 0.0);
        REQUIRE(phi <= pi);
        CHECK_THAT(channel_transmission_normalized(ch, phi * 74.7 / pi), WithinAbs(p, 1e-12));
    }
    CHECK(phase_from_power(ch, t0) == 0.0);
    CHECK_THROWS_AS(phase_from_power(ch, 0.5 * t0), Error);
    CHECK_THROWS_AS(phase_from_power(ch, 1.5), Error);
}

TEST_CASE("dynamic extinction envelope", "[waveform]")
{
    OpticalTrace tr{1e-9, {1.0, 1.0, 0.5, 0.01, 0.2, 1e-4, 1e-7, 3e-7, 1e-8, 1e-8}};
    const auto d = dynamic_extinction(tr, 2e-9);
    REQUIRE(d.envelope.size() == 8);
    for (std::size_t i = 1; i < d.envelope.size(); ++i)
        REQUIRE(d.envelope[i] <= d.envelope[i - 1]);
    CHECK(d.envelope[0] == 0.5);
    CHECK(d.envelope[1] == 0.2);
    CHECK(d.envelope[4] == 3e-7);
    const auto c = d.time_to(1e-6);
    CHECK(c.reached);
    CHECK_THAT(c.time, WithinAbs(4e-9, 1e-18));
    CHECK_FALSE(d.time_to(1e-9).reached);
    CHECK(d.floor_at(100e-9) == 1e-8);
    CHECK_THROWS_AS(dynamic_extinction(tr, 0.0), Error);
}

TEST_CASE("identity actuator needs no pre-distortion", "[waveform]")
{
    const auto ch = ModulatorChannel::uniform(2, 0.5, 74.7);
    const auto id = ActuatorResponse::from_taps({1.0}, 1e-9);
    const auto off = make_off_switch(OffSwitchSpec{}, id, 74.7);
    PredistortionProblem pr;
    pr.target_phase = off.target_phase;
    pr.response = id;
    pr.channel = ch;
    pr.switch_index = off.switch_index;
    const auto sol = predistort(pr);
    CHECK(sol.iterations == 0);
    CHECK(sol.floor_reached);
    for (std::size_t i = 0; i < off.target_phase.size(); ++i)
        REQUIRE_THAT(sol.drive.samples[i], WithinAbs(off.target_phase[i] * 74.7 / pi, 1e-9));
}

TEST_CASE("pre-distortion flattens ringing on an underdamped actuator", "[waveform]")
{
    const auto ch = ModulatorChannel::uniform(2, 0.5083, 74.7);
    const auto resp = calibrate_optical_rise(ch, KernelKind::second_order, 26e-9, 0.3, 1e-9);
    const auto off = make_off_switch(OffSwitchSpec{}, resp, 74.7);

    const auto naive = evaluate_off_switch(ch, resp, off.naive_drive, off.switch_index, 1e-6, 1e-6);
    PredistortionProblem pr;
    pr.target_phase = off.target_phase;
    pr.response = resp;
    pr.channel = ch;
    pr.v_max = 2.0 * 74.7;
    pr.switch_index = off.switch_index;
    const auto sol = predistort(pr);
    CHECK(sol.floor_reached);
    CHECK(sol.achieved_floor <= 1e-6);
    CHECK(sol.time_to_floor < naive.time_to_floor);
    for (double v : sol.drive.samples)
        REQUIRE(std::abs(v) <= pr.v_max);
    for (std::size_t i = 1; i < sol.cost_history.size(); ++i)
        REQUIRE(sol.cost_history[i] < sol.cost_history[i - 1]);

    // reported metrics come from an independent forward pass
    const auto check = evaluate_off_switch(ch, resp, sol.drive, off.switch_index, 1e-6, 1e-6);
    CHECK(check.achieved_floor == sol.achieved_floor);

    pr.v_max = 0.5 * 74.7;
    CHECK_THROWS_MATCHES(predistort(pr), Error, Catch::Matchers::Predicate<Error>([](const Error &e) {
                             return e.code() == Errc::infeasible_v_max;
                         }));
}

TEST_CASE("pulse areas are normalised per period", "[waveform]")
{
    PulseSpec s;
    s.on_level = 1.0;
    s.on_duration = 100e-9;
    s.period = 200e-9;
    OpticalTrace tr{1e-9, {}};
    for (int p = 0; p < 4; ++p)
        for (int i = 0; i < 200; ++i)
            tr.power.push_back(i < 100 ? 1.0 + 0.1 * p : 0.0);
    const auto a = pulse_areas(tr, s);
    REQUIRE(a.size() == 4);
    CHECK_THAT((a[0] + a[1] + a[2] + a[3]) / 4.0, WithinAbs(1.0, 1e-12));
    CHECK_THAT(a[3] / a[0], WithinRel(1.3, 1e-9));
    tr.power.pop_back();
    CHECK_THROWS_AS(pulse_areas(tr, s), Error);
}

TEST_CASE("binary waveform round trip", "[waveform]")
{
    const auto dir = std::filesystem::temp_directory_path() / "mzisim_wave_test";
    std::filesystem::create_directories(dir);
    Waveform w{0.5e-9, {0.0, -1.25, 3.5e-300, 74.7, 1e300}};
    io::write_waveform_binary(dir / "w.bin", w);
    const auto r = io::read_waveform_binary(dir / "w.bin");
    CHECK(r.sample_period == w.sample_period);
    CHECK(r.samples == w.samples);
    io::write_text(dir / "bad.bin", "not a waveform");
    CHECK_THROWS_AS(io::read_waveform_binary(dir / "bad.bin"), Error);
    std::filesystem::remove_all(dir);
}
