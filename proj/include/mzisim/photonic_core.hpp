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

// Static transfer-matrix model of a cascaded Mach-Zehnder modulator channel.
//
// Conventions
//   - A coupler with power split s has field matrix [[t, i r], [i r, t]], t = sqrt(1-s), r = sqrt(s).
//   - A stage is  C_out * diag(exp(i phi_0), exp(i phi_1)) * C_in, light enters port 0.
//   - Arm 0 carries the MOD phase shifter and is driven single-ended; arm 1 holds the static bias.
//   - Stages are chained through their monitored port, so channel transmission is the
//     product of the stage transmissions, followed by one lumped insertion loss.

#pragma once

#include <array>
#include <complex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mzisim/kernels.hpp"

namespace mzisim
{

using cplx = std::complex<double>;

// Row-major 2x2 complex matrix.
using Mat2 = std::array<cplx, 4>;

Mat2 matmul(const Mat2 &a, const Mat2 &b);

class Coupler
{
public:
    explicit Coupler(double power_split = 0.5);

    double power_split() const { return split_; }
    double t() const { return t_; }
    double r() const { return r_; }
    Mat2 matrix() const;

private:
    double split_;
    double t_;
    double r_;
};

enum class ShifterRole
{
    bias,
    mod,
};

class PhaseShifter
{
public:
    PhaseShifter(double v_pi, double bias_phase, ShifterRole role);

    double v_pi() const { return v_pi_; }
    double bias_phase() const { return bias_phase_; }
    ShifterRole role() const { return role_; }

    // pi * V / v_pi + bias_phase
    double phase(double volts) const;

private:
    double v_pi_;
    double bias_phase_;
    ShifterRole role_;
};

enum class Port
{
    bar,
    cross,
};

class MziStage
{
public:
    MziStage(Coupler input, Coupler output, PhaseShifter mod_arm, PhaseShifter bias_arm, Port monitored = Port::bar);

    // Stage biased so that V = 0 sits on the transmission null of the monitored port.
    static MziStage nulled(double input_split, double output_split, double v_pi, Port monitored = Port::bar);

    const Coupler &input_coupler() const { return in_; }
    const Coupler &output_coupler() const { return out_; }
    const PhaseShifter &mod_arm() const { return mod_; }
    const PhaseShifter &bias_arm() const { return bias_; }
    Port monitored_port() const { return port_; }

    // Lossless 2x2 transfer matrix; bias_offset is an extra phase on the MOD arm (drift / lock correction).
    Mat2 transfer_matrix(double drive_voltage, double bias_offset = 0.0) const;

private:
    Coupler in_;
    Coupler out_;
    PhaseShifter mod_;
    PhaseShifter bias_;
    Port port_;
};

// Power on the monitored port for unit input power on port 0.
double stage_transmission(const MziStage &stage, double drive_voltage, double bias_offset = 0.0);

// Both output-port powers (bar, cross).
std::array<double, 2> stage_port_powers(const MziStage &stage, double drive_voltage, double bias_offset = 0.0);

class ModulatorChannel
{
public:
    ModulatorChannel(std::vector<MziStage> stages, double insertion_loss_db, int channel_index = 0);

    // `n_stages` identical nulled stages with symmetric coupler split `split`.
    static ModulatorChannel uniform(std::size_t n_stages, double split, double v_pi, double insertion_loss_db = 0.0,
                                    int channel_index = 0);

    const std::vector<MziStage> &stages() const { return stages_; }
    std::size_t n_stages() const { return stages_.size(); }
    double insertion_loss_db() const { return loss_db_; }
    double loss_factor() const { return loss_factor_; }
    int channel_index() const { return index_; }

private:
    std::vector<MziStage> stages_;
    double loss_db_;
    double loss_factor_;
    int index_;
};

// Product of stage transmissions times 10^(-loss/10). One voltage per stage.
double channel_transmission(const ModulatorChannel &channel, std::span<const double> drive_voltages,
                            double bias_offset = 0.0);

// Same voltage applied to every stage (equal drive), as used for sweeps and time traces.
double channel_transmission_equal(const ModulatorChannel &channel, double drive_voltage, double bias_offset = 0.0);

// Loss-free (normalised) transmission under equal drive.
double channel_transmission_normalized(const ModulatorChannel &channel, double drive_voltage,
                                       double bias_offset = 0.0);

// Minimum over equal-drive voltage at the null (V = 0), loss-free.
double channel_null_transmission(const ModulatorChannel &channel);

enum class Wavelength
{
    nm420 = 420,
    nm795 = 795,
    nm1013 = 1013,
};

std::optional<Wavelength> wavelength_from_nm(int nm);
double propagation_loss_db_per_cm(Wavelength wl);

struct ChipConfig
{
    std::vector<ModulatorChannel> channels;
    Wavelength wavelength = Wavelength::nm795;
    double propagation_loss_db_per_cm = 1.5;
    double path_length_cm = 1.0;
    double coupling_loss_db = 3.0;

    void validate() const;
};

// 2 * coupling + propagation * length + insertion loss, per channel.
std::vector<double> link_budget(const ChipConfig &chip);

struct DetectorModel;

struct VpiFit
{
    double v_pi = 0.0;
    double bias_phase = 0.0;
    double amplitude = 0.0;
    double floor = 0.0;
    double residual = 0.0;
};

struct FitOptions
{
    // Model exponent: T = A * sin^(2n)(pi V / (2 v_pi) + theta) + floor; n = stage count under equal drive.
    int fringe_exponent = 1;
    std::optional<double> v_pi_min;
    std::optional<double> v_pi_max;
};

// Bounded scalar search on v_pi, nested grid-refined theta, linear least squares on (A, floor).
VpiFit fit_v_pi(std::span<const double> voltages, std::span<const double> transmissions, const FitOptions &opts = {});

struct SweepResult
{
    std::vector<double> voltages;
    std::vector<double> transmissions; // normalised to the sweep maximum
    double er_db = 0.0;                // +inf when the minimum is exactly zero
    double true_er_db = 0.0;           // before detector clamping
    bool detector_limited = false;
    std::optional<VpiFit> fit;
    std::string fit_error;
    double fitted_v_pi() const { return fit ? fit->v_pi : 0.0; }
};

// Equal-drive sweep on a uniform grid. When a detector is given the reported transmissions
// and er_db are the measured values; true_er_db always carries the model value.
SweepResult sweep_channel(const ModulatorChannel &channel, double v_start, double v_stop, std::size_t n_points,
                          const DetectorModel *detector = nullptr,
                          kernels::Exec exec = kernels::Exec::parallel);

// true_er_db of the same sweep, without the detector or the fit.
double sweep_true_er_db(const ModulatorChannel &channel, double v_start, double v_stop, std::size_t n_points,
                        kernels::Exec exec = kernels::Exec::parallel);

double er_db_from(std::span<const double> transmissions);

} // namespace mzisim
