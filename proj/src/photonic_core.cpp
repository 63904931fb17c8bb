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

#include "mzisim/photonic_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "mzisim/error.hpp"
#include "mzisim/stochastics.hpp"

namespace mzisim
{

using std::numbers::pi;

Mat2 matmul(const Mat2 &a, const Mat2 &b)
{
    return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3], a[2] * b[0] + a[3] * b[2],
            a[2] * b[1] + a[3] * b[3]};
}

Coupler::Coupler(double power_split) : split_(power_split)
{
    require(power_split > 0.0 && power_split < 1.0, Errc::invalid_argument, "coupler power split must lie in (0, 1)");
    t_ = std::sqrt(1.0 - power_split);
    r_ = std::sqrt(power_split);
}

Mat2 Coupler::matrix() const { return {cplx(t_, 0.0), cplx(0.0, r_), cplx(0.0, r_), cplx(t_, 0.0)}; }

PhaseShifter::PhaseShifter(double v_pi, double bias_phase, ShifterRole role)
    : v_pi_(v_pi), bias_phase_(bias_phase), role_(role)
{
    require(v_pi > 0.0 && std::isfinite(v_pi), Errc::invalid_argument, "v_pi must be > 0");
    require(std::isfinite(bias_phase), Errc::invalid_argument, "bias phase must be finite");
}

double PhaseShifter::phase(double volts) const { return pi * volts / v_pi_ + bias_phase_; }

MziStage::MziStage(Coupler input, Coupler output, PhaseShifter mod_arm, PhaseShifter bias_arm, Port monitored)
    : in_(input), out_(output), mod_(mod_arm), bias_(bias_arm), port_(monitored)
{
}

MziStage MziStage::nulled(double input_split, double output_split, double v_pi, Port monitored)
{
    // Bar port nulls at equal arm phases, cross port at a pi difference.
    const double bias = monitored == Port::bar ? 0.0 : pi;
    return MziStage(Coupler(input_split), Coupler(output_split), PhaseShifter(v_pi, bias, ShifterRole::mod),
                    PhaseShifter(v_pi, 0.0, ShifterRole::bias), monitored);
}

Mat2 MziStage::transfer_matrix(double drive_voltage, double bias_offset) const
{
    const double phi0 = mod_.phase(drive_voltage) + bias_offset;
    const double phi1 = bias_.phase(0.0);
    const Mat2 arms{std::polar(1.0, phi0), cplx(0.0, 0.0), cplx(0.0, 0.0), std::polar(1.0, phi1)};
    return matmul(out_.matrix(), matmul(arms, in_.matrix()));
}

std::array<double, 2> stage_port_powers(const MziStage &stage, double drive_voltage, double bias_offset)
{
    const Mat2 m = stage.transfer_matrix(drive_voltage, bias_offset);
    return {std::norm(m[0]), std::norm(m[2])};
}

double stage_transmission(const MziStage &stage, double drive_voltage, double bias_offset)
{
    const auto p = stage_port_powers(stage, drive_voltage, bias_offset);
    return stage.monitored_port() == Port::bar ? p[0] : p[1];
}

ModulatorChannel::ModulatorChannel(std::vector<MziStage> stages, double insertion_loss_db, int channel_index)
    : stages_(std::move(stages)), loss_db_(insertion_loss_db), index_(channel_index)
{
    require(!stages_.empty(), Errc::invalid_argument, "channel needs at least one stage");
    require(insertion_loss_db >= 0.0 && std::isfinite(insertion_loss_db), Errc::invalid_argument,
            "insertion loss must be >= 0 dB");
    loss_factor_ = std::pow(10.0, -insertion_loss_db / 10.0);
}

ModulatorChannel ModulatorChannel::uniform(std::size_t n_stages, double split, double v_pi, double insertion_loss_db,
                                           int channel_index)
{
    std::vector<MziStage> stages(n_stages, MziStage::nulled(split, split, v_pi));
    return ModulatorChannel(std::move(stages), insertion_loss_db, channel_index);
}

double channel_transmission(const ModulatorChannel &channel, std::span<const double> drive_voltages,
                            double bias_offset)
{
    require(drive_voltages.size() == channel.n_stages(), Errc::arity_mismatch,
            "expected one drive voltage per stage");
    double t = channel.loss_factor();
    for (std::size_t i = 0; i < channel.n_stages(); ++i)
        t *= stage_transmission(channel.stages()[i], drive_voltages[i], bias_offset);
    return t;
}

double channel_transmission_normalized(const ModulatorChannel &channel, double drive_voltage, double bias_offset)
{
    double t = 1.0;
    for (const auto &s : channel.stages())
        t *= stage_transmission(s, drive_voltage, bias_offset);
    return t;
}

double channel_transmission_equal(const ModulatorChannel &channel, double drive_voltage, double bias_offset)
{
    return channel.loss_factor() * channel_transmission_normalized(channel, drive_voltage, bias_offset);
}

double channel_null_transmission(const ModulatorChannel &channel)
{
    return channel_transmission_normalized(channel, 0.0);
}

std::optional<Wavelength> wavelength_from_nm(int nm)
{
    switch (nm)
    {
    case 420:
        return Wavelength::nm420;
    case 795:
        return Wavelength::nm795;
    case 1013:
        return Wavelength::nm1013;
    default:
        return std::nullopt;
    }
}

double propagation_loss_db_per_cm(Wavelength wl)
{
    switch (wl)
    {
    case Wavelength::nm420:
        return 5.6;
    case Wavelength::nm795:
        return 1.5;
    case Wavelength::nm1013:
        return 2.7;
    }
    return 0.0;
}

void ChipConfig::validate() const
{
    require(propagation_loss_db_per_cm >= 0.0, Errc::invalid_argument, "propagation loss must be >= 0");
    require(path_length_cm >= 0.0, Errc::invalid_argument, "path length must be >= 0");
    require(coupling_loss_db >= 0.0, Errc::invalid_argument, "coupling loss must be >= 0");
}

std::vector<double> link_budget(const ChipConfig &chip)
{
    chip.validate();
    std::vector<double> out;
    out.reserve(chip.channels.size());
    const double common = 2.0 * chip.coupling_loss_db + chip.propagation_loss_db_per_cm * chip.path_length_cm;
    for (const auto &ch : chip.channels)
        out.push_back(common + ch.insertion_loss_db());
    return out;
}

double er_db_from(std::span<const double> transmissions)
{
    require(!transmissions.empty(), Errc::invalid_argument, "empty transmission array");
    const auto [lo, hi] = std::minmax_element(transmissions.begin(), transmissions.end());
    if (*lo <= 0.0)
        return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(*hi / *lo);
}

namespace
{

std::vector<double> sweep_grid(double v_start, double v_stop, std::size_t n_points)
{
    require(n_points >= 3, Errc::invalid_argument, "sweep needs at least 3 points");
    require(v_start < v_stop, Errc::invalid_argument, "sweep needs v_start < v_stop");
    std::vector<double> v(n_points);
    // fractional form keeps the endpoints exact and puts an exact 0 V on symmetric odd grids
    const double span = v_stop - v_start;
    for (std::size_t i = 0; i < n_points; ++i)
        v[i] = v_start + span * (static_cast<double>(i) / static_cast<double>(n_points - 1));
    return v;
}

std::vector<double> sweep_raw(const ModulatorChannel &channel, const std::vector<double> &voltages,
                              kernels::Exec exec)
{
    std::vector<double> raw(voltages.size());
    kernels::map(voltages, raw, [&](double v) { return channel_transmission_equal(channel, v); }, exec);
    return raw;
}

} // namespace

double sweep_true_er_db(const ModulatorChannel &channel, double v_start, double v_stop, std::size_t n_points,
                        kernels::Exec exec)
{
    return er_db_from(sweep_raw(channel, sweep_grid(v_start, v_stop, n_points), exec));
}

SweepResult sweep_channel(const ModulatorChannel &channel, double v_start, double v_stop, std::size_t n_points,
                          const DetectorModel *detector, kernels::Exec exec)
{
    SweepResult res;
    res.voltages = sweep_grid(v_start, v_stop, n_points);
    const auto raw = sweep_raw(channel, res.voltages, exec);

    res.true_er_db = er_db_from(raw);
    const double peak = *std::max_element(raw.begin(), raw.end());
    require(peak > 0.0, Errc::invalid_argument, "channel transmits no light over the sweep");

    res.transmissions.resize(n_points);
    for (std::size_t i = 0; i < n_points; ++i)
        res.transmissions[i] = raw[i] / peak;

    if (detector != nullptr)
    {
        detector->validate();
        Rng rng(0, Stream::detector, static_cast<std::uint64_t>(channel.channel_index()));
        for (auto &t : res.transmissions)
            t = measure(*detector, t, &rng);
        const double mpeak = *std::max_element(res.transmissions.begin(), res.transmissions.end());
        if (mpeak > 0.0)
            for (auto &t : res.transmissions)
                t /= mpeak;
    }
    res.er_db = er_db_from(res.transmissions);
    res.detector_limited = detector != nullptr && res.er_db < res.true_er_db;

    FitOptions opts;
    opts.fringe_exponent = static_cast<int>(channel.n_stages());
    try
    {
        res.fit = fit_v_pi(res.voltages, res.transmissions, opts);
    }
    catch (const Error &e)
    {
        res.fit_error = e.what();
    }
    return res;
}

} // namespace mzisim
