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
#include <numeric>

#include "mzisim/dynamics.hpp"
#include "mzisim/error.hpp"

using namespace mzisim;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace
{

std::vector<double> step_of(const ActuatorResponse &r)
{
    std::vector<double> s(r.impulse_kernel.size());
    std::partial_sum(r.impulse_kernel.begin(), r.impulse_kernel.end(), s.begin());
    return s;
}

bool has_code(const Error &e, Errc c) { return e.code() == c; }

} // namespace

TEST_CASE("first-order kernel samples the exponential step", "[dynamics]")
{
    const auto r = synthesize_kernel(KernelKind::first_order, 100e-9, 1.0, 1e-9);
    CHECK_THAT(std::accumulate(r.impulse_kernel.begin(), r.impulse_kernel.end(), 0.0), WithinAbs(1.0, 1e-12));
    CHECK_THAT(r.rise_time_10_90, WithinRel(100e-9, 0.02));
    // continuous 10-90 rise of 1 - exp(-t / tau) is tau ln 9
    CHECK_THAT(r.time_constant * std::log(9.0), WithinRel(100e-9, 0.02));
    const auto s = step_of(r);
    for (std::size_t m = 0; m < 400; m += 37)
        CHECK_THAT(s[m], WithinAbs(-std::expm1(-static_cast<double>(m + 1) * 1e-9 / r.time_constant), 1e-11));
}

TEST_CASE("underdamped kernel overshoots by exp(-pi zeta / sqrt(1 - zeta^2))", "[dynamics]")
{
    const double zeta = 0.3;
    const auto r = synthesize_kernel(KernelKind::second_order, 40e-9, zeta, 0.1e-9);
    const auto s = step_of(r);
    const double peak = *std::max_element(s.begin(), s.end());
    CHECK_THAT(peak - 1.0, WithinRel(std::exp(-M_PI * zeta / std::sqrt(1.0 - zeta * zeta)), 0.01));
    CHECK_THAT(r.rise_time_10_90, WithinRel(40e-9, 0.02));
    CHECK_THAT(s.back(), WithinAbs(1.0, 1e-9));
}

TEST_CASE("rise time measurement on synthetic edges", "[dynamics]")
{
    std::vector<double> ramp(300, 0.0);
    for (std::size_t i = 100; i < 300; ++i)
        ramp[i] = std::min(1.0, (static_cast<double>(i) - 100.0) / 100.0);
    CHECK_THAT(measure_rise_time(ramp, 1e-9), WithinRel(80e-9, 1e-9));
    for (auto &v : ramp)
        v = 2.0 - 3.0 * v;
    CHECK_THAT(measure_rise_time(ramp, 1e-9), WithinRel(80e-9, 1e-9));
    const std::vector<double> flat(50, 1.0);
    CHECK_THROWS_MATCHES(measure_rise_time(flat, 1e-9), Error,
                         Catch::Matchers::Predicate<Error>([](const Error &e) { return has_code(e, Errc::no_transition); }));
}

TEST_CASE("kernel synthesis rejects unresolvable rise times", "[dynamics]")
{
    CHECK_THROWS_MATCHES(synthesize_kernel(KernelKind::first_order, 1.5e-9, 1.0, 1e-9), Error,
                         Catch::Matchers::Predicate<Error>(
                             [](const Error &e) { return has_code(e, Errc::unresolvable_rise_time); }));
    CHECK_THROWS_AS(ActuatorResponse::from_taps({0.5, 0.4}, 1e-9), Error);
    CHECK_NOTHROW(ActuatorResponse::from_taps({1.0}, 1e-9));
}

TEST_CASE("optical rise calibration hits the requested optical rise", "[dynamics]")
{
    const auto ch = ModulatorChannel::uniform(2, 0.5083, 74.7);
    for (auto [kind, zeta] : {std::pair{KernelKind::first_order, 1.0}, std::pair{KernelKind::second_order, 0.3},
                              std::pair{KernelKind::second_order, 1.0}})
    {
        const auto r = calibrate_optical_rise(ch, kind, 26e-9, zeta, 1e-9);
        CHECK_THAT(optical_step_rise(ch, r), WithinRel(26e-9, 0.02));
        // sin^4 compresses the edge, so the phase rise is slower than the optical one
        CHECK(r.rise_time_10_90 > 26e-9);
    }
}

TEST_CASE("prehistory handling of filter_drive", "[dynamics]")
{
    const auto r = synthesize_kernel(KernelKind::second_order, 30e-9, 0.5, 1e-9);
    Waveform w{1e-9, std::vector<double>(3000, 3.0)};
    const auto held = filter_drive(r, w, Prehistory::hold_first);
    for (double v : held)
        REQUIRE(v == 3.0);
    const auto cold = filter_drive(r, w, Prehistory::zero);
    CHECK(cold.front() < 1.0);
    CHECK_THAT(cold.back(), WithinAbs(3.0, 1e-9));
    Waveform bad{2e-9, w.samples};
    CHECK_THROWS_AS(filter_drive(r, bad), Error);
}

TEST_CASE("actuator is linear and the optical map is quasi-static", "[dynamics][property]")
{
    const auto r = synthesize_kernel(KernelKind::first_order, 20e-9, 1.0, 1e-9);
    Waveform a{1e-9, {}}, b{1e-9, {}}, ab{1e-9, {}};
    for (int i = 0; i < 400; ++i)
    {
        a.samples.push_back(std::sin(0.05 * i));
        b.samples.push_back(i % 50 < 25 ? 1.0 : -0.5);
        ab.samples.push_back(2.0 * a.samples.back() - 3.0 * b.samples.back());
    }
    const auto ya = filter_drive(r, a), yb = filter_drive(r, b), yab = filter_drive(r, ab);
    for (std::size_t i = 0; i < yab.size(); ++i)
        REQUIRE_THAT(yab[i], WithinAbs(2.0 * ya[i] - 3.0 * yb[i], 1e-12));

    const auto ch = ModulatorChannel::uniform(2, 0.508, 74.7);
    const auto tr = trace_optical(ch, r, a);
    for (std::size_t i = 0; i < tr.size(); i += 13)
        REQUIRE(tr.power[i] == channel_transmission_equal(ch, ya[i]));
}
