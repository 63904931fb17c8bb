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
#include <complex>
#include <numbers>
#include <random>

#include "mzisim/error.hpp"
#include "mzisim/photonic_core.hpp"
#include "mzisim/stochastics.hpp"

using namespace mzisim;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using std::numbers::pi;

namespace
{

// Element-wise stage product written out by hand; shares no code with the library.
std::complex<double> oracle_bar_field(double split_in, double split_out, double phi0, double phi1)
{
    using C = std::complex<double>;
    const double ti = std::sqrt(1.0 - split_in), ri = std::sqrt(split_in);
    const double to = std::sqrt(1.0 - split_out), ro = std::sqrt(split_out);
    const C a0 = ti * std::exp(C(0, phi0));      // arm 0 after the phase
    const C a1 = C(0, ri) * std::exp(C(0, phi1)); // arm 1 after the phase
    return to * a0 + C(0, ro) * a1;
}

double db(double x) { return 10.0 * std::log10(x); }

} // namespace

TEST_CASE("coupler matrix is unitary", "[photonic]")
{
    for (double s : {1e-6, 0.1, 0.5, 0.73, 1.0 - 1e-6})
    {
        const auto m = Coupler(s).matrix();
        // rows orthonormal
        CHECK_THAT(std::norm(m[0]) + std::norm(m[1]), WithinAbs(1.0, 1e-15));
        CHECK_THAT(std::norm(m[2]) + std::norm(m[3]), WithinAbs(1.0, 1e-15));
        CHECK(std::abs(m[0] * std::conj(m[2]) + m[1] * std::conj(m[3])) < 1e-15);
    }
    CHECK_THROWS_AS(Coupler(1.2), Error);
}

TEST_CASE("energy conservation over random stages", "[photonic][property]")
{
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> split(0.0, 1.0), volt(-300.0, 300.0), vpi(1.0, 300.0);
    for (int i = 0; i < 2000; ++i)
    {
        const MziStage st(Coupler(split(gen)), Coupler(split(gen)), PhaseShifter(vpi(gen), split(gen), ShifterRole::mod),
                          PhaseShifter(vpi(gen), split(gen), ShifterRole::bias));
        const auto p = stage_port_powers(st, volt(gen), split(gen));
        REQUIRE_THAT(p[0] + p[1], WithinAbs(1.0, 1e-12));
    }
}

TEST_CASE("stage transfer matrix matches the hand-written product", "[photonic]")
{
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 500; ++i)
    {
        const double si = u(gen), so = u(gen), vpi = 10.0 + 100.0 * u(gen), b0 = 6.0 * u(gen), b1 = 6.0 * u(gen);
        const double v = 200.0 * (u(gen) - 0.5), off = u(gen) - 0.5;
        const MziStage st(Coupler(si), Coupler(so), PhaseShifter(vpi, b0, ShifterRole::mod),
                          PhaseShifter(vpi, b1, ShifterRole::bias));
        const auto want = oracle_bar_field(si, so, pi * v / vpi + b0 + off, b1);
        const auto got = st.transfer_matrix(v, off)[0];
        REQUIRE(std::abs(got - want) < 1e-13);
    }
}

TEST_CASE("cascade transmission is the product of stage transmissions", "[photonic][property]")
{
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> eps(0.001, 0.05), volt(-74.7, 74.7);
    for (int i = 0; i < 200; ++i)
    {
        std::vector<MziStage> stages;
        const int n = 1 + static_cast<int>(i % 4);
        for (int k = 0; k < n; ++k)
            stages.push_back(MziStage::nulled(0.5 + eps(gen), 0.5 + eps(gen), 74.7));
        const ModulatorChannel ch(stages, 3.0);
        std::vector<double> v(static_cast<std::size_t>(n));
        double sum_db = -3.0;
        for (int k = 0; k < n; ++k)
        {
            v[static_cast<std::size_t>(k)] = volt(gen);
            sum_db += db(stage_transmission(stages[static_cast<std::size_t>(k)], v[static_cast<std::size_t>(k)]));
        }
        REQUIRE_THAT(db(channel_transmission(ch, v)), WithinAbs(sum_db, 0.1));
        REQUIRE_THAT(db(channel_transmission(ch, v)), WithinAbs(sum_db, 1e-9));
    }
}

TEST_CASE("insertion loss scales the output", "[photonic]")
{
    const auto ch = ModulatorChannel::uniform(2, 0.5, 74.7, 3.0);
    CHECK_THAT(channel_transmission_equal(ch, 74.7), WithinAbs(0.501187, 1e-6));
    CHECK_THAT(channel_transmission_normalized(ch, 74.7), WithinAbs(1.0, 1e-12));
}

TEST_CASE("null depth follows the coupler imbalance", "[photonic]")
{
    // bar-port null of one stage with equal splits 0.5 + e is (1 - 2 s)^2 = 4 e^2
    for (double e : {0.001, 0.008, 0.03})
    {
        const auto one = ModulatorChannel::uniform(1, 0.5 + e, 74.7);
        const auto two = ModulatorChannel::uniform(2, 0.5 + e, 74.7);
        CHECK_THAT(channel_null_transmission(one), WithinRel(4.0 * e * e, 1e-9));
        CHECK_THAT(channel_null_transmission(two), WithinRel(16.0 * e * e * e * e, 1e-9));
    }
    const auto ideal = ModulatorChannel::uniform(2, 0.5, 74.7);
    const auto sw = sweep_channel(ideal, -74.7, 74.7, 2001);
    CHECK(std::isinf(sw.er_db));
}

TEST_CASE("sweep grid is exact and puts 0 V on symmetric odd grids", "[photonic]")
{
    const auto ch = ModulatorChannel::uniform(2, 0.508, 74.7);
    const auto sw = sweep_channel(ch, -74.7, 74.7, 2001);
    REQUIRE(sw.voltages.size() == 2001);
    CHECK(sw.voltages.front() == -74.7);
    CHECK(sw.voltages.back() == 74.7);
    CHECK(sw.voltages[1000] == 0.0);
    CHECK_THAT(sw.transmissions[1000], WithinRel(channel_null_transmission(ch), 1e-9));
    CHECK_THROWS_AS(sweep_channel(ch, 1.0, -1.0, 11), Error);
}

TEST_CASE("serial and parallel sweeps agree bit for bit", "[photonic]")
{
    const auto ch = ModulatorChannel::uniform(2, 0.508, 74.7, 3.0);
    const auto a = sweep_channel(ch, -100.0, 100.0, 4001, nullptr, kernels::Exec::serial);
    const auto b = sweep_channel(ch, -100.0, 100.0, 4001, nullptr, kernels::Exec::parallel);
    CHECK(a.transmissions == b.transmissions);
}

TEST_CASE("detector floor clamps the reported ER", "[photonic]")
{
    const auto ch = ModulatorChannel::uniform(2, 0.5 + 0.0056, 74.7); // ~70 dB true ER
    const auto det = DetectorModel::from_floor_db(-42.4);
    const auto sw = sweep_channel(ch, -74.7, 74.7, 2001, &det);
    CHECK(sw.true_er_db > 60.0);
    CHECK_THAT(sw.er_db, WithinAbs(42.4, 1e-9));
    CHECK(sw.detector_limited);
}

TEST_CASE("fit_v_pi recovers v_pi from noiseless and noisy sweeps", "[photonic]")
{
    for (double v_pi : {74.7, 200.0, 44.4})
    {
        const auto ch = ModulatorChannel::uniform(2, 0.508, v_pi);
        const auto sw = sweep_channel(ch, -v_pi, v_pi, 2001);
        REQUIRE(sw.fit.has_value());
        CHECK_THAT(sw.fit->v_pi, WithinRel(v_pi, 0.01));

        Rng rng(7, Stream::fit_noise);
        auto t = sw.transmissions;
        for (auto &x : t)
            x *= 1.0 + 0.01 * rng.normal();
        const auto fit = fit_v_pi(sw.voltages, t, FitOptions{2, {}, {}});
        CHECK_THAT(fit.v_pi, WithinRel(v_pi, 0.02));
    }
}

TEST_CASE("fit_v_pi rejects flat and short data", "[photonic]")
{
    const std::vector<double> v{0, 1, 2, 3, 4, 5}, flat(6, 0.5);
    CHECK_THROWS_AS(fit_v_pi(v, flat), Error);
    CHECK_THROWS_AS(fit_v_pi(std::vector<double>{0, 1}, std::vector<double>{0, 1}), Error);
}

TEST_CASE("link budget adds coupling, propagation and insertion loss", "[photonic]")
{
    ChipConfig chip;
    chip.channels = {ModulatorChannel::uniform(2, 0.5, 74.7, 3.0)};
    chip.wavelength = Wavelength::nm795;
    chip.propagation_loss_db_per_cm = propagation_loss_db_per_cm(Wavelength::nm795);
    chip.path_length_cm = 2.0;
    chip.coupling_loss_db = 4.0;
    CHECK_THAT(link_budget(chip).at(0), WithinAbs(2 * 4.0 + 1.5 * 2.0 + 3.0, 1e-12));
    CHECK(propagation_loss_db_per_cm(Wavelength::nm1013) == 2.7);
    CHECK(propagation_loss_db_per_cm(Wavelength::nm420) == 5.6);
    CHECK_FALSE(wavelength_from_nm(532).has_value());
}
