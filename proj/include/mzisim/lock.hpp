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

// Dither-and-demodulate bias lock and the long-run pulse-area experiment.

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mzisim/photonic_core.hpp"
#include "mzisim/stochastics.hpp"
#include "mzisim/waveform_synth.hpp"

namespace mzisim
{

struct LockController
{
    double update_rate = 5.0;         // Hz
    double dither_amplitude = 1e-3;   // radians on the MOD-arm bias
    double gain_p = 0.0;              // on the normalised error estimate
    double gain_i = 0.5;              // per update
    double integrator_limit = 3.0;    // radians, anti-windup clamp on the integrator
    double error_clamp = 0.5;         // radians, clamp on a single error estimate

    void validate() const;
};

struct LockRunOptions
{
    double duration = 72000.0;      // seconds of physical time
    double er_cadence = 60.0;       // seconds between ER samples
    double time_compression = 1.0;  // drift tau, update period and cadence divided by this factor
    bool lock_enabled = true;
};

struct LockRunResult
{
    std::vector<double> times; // seconds of simulated (compressed) time
    std::vector<double> er_db; // measured through the detector, at the dithered operating point
    std::vector<double> bias_error; // radians, drift minus correction at each ER sample
    double er_mean_db = 0.0;        // time average of the dB trace
    double er_std_db = 0.0;         // sample std of the dB trace
    double er_of_mean_power_db = 0.0; // ER of the time-averaged OFF power
    double locked_fraction = 0.0;     // fraction of samples with ER >= locked_threshold_db
    double time_compression = 1.0;

    static constexpr double locked_threshold_db = 60.0;
};

// Event-driven loop: at every update the bias is stepped to +dither and -dither, both powers are
// measured, the difference forms a gradient estimate, and the PI law updates the correction.
// The drift path (common to every stage) is sampled on the update grid and starts from zero.
LockRunResult run_lock(const ModulatorChannel &channel, const NoiseModel &noise, const LockController &controller,
                       const DetectorModel &detector, const LockRunOptions &options);

// Curvature of the loss-free transmission at the null, d^2 T / d phi^2 at phi = 0.
double null_curvature(const ModulatorChannel &channel);

// Time of first passage of the unlocked ER below `threshold_db`, per seed, for a standardised drift
// path scaled by sigma. Used by the drift calibration. Returns `horizon` when not crossed.
double unlocked_first_passage(const ModulatorChannel &channel, double sigma, double correlation_time,
                              double threshold_db, double horizon, double dt, std::uint64_t seed);

struct PulseExperimentOptions
{
    std::size_t n_pulses = 1000;   // consecutive pulses for the short-run statistic
    double run_duration = 500.0;   // seconds
    double block_duration = 5.0;   // seconds per block
    std::size_t pulses_per_block = 1000;
    bool lock_engaged = true;      // bias drift suppressed when engaged
    std::size_t histogram_bins = 41;
};

struct PulseStats
{
    std::vector<double> areas; // normalised, consecutive pulses
    double area_std = 0.0;     // sample std of `areas`
    std::vector<double> block_std;
    double mean_block_std = 0.0;
    std::vector<double> histogram_edges;
    std::vector<std::size_t> histogram_counts;
};

// Noiseless reference trace for one spec, reused across seeds.
// drive_scale multiplies the drive (relative v_pi drift); bias_offset is added to every MOD arm.
OpticalTrace pulse_reference_trace(const ModulatorChannel &channel, const ActuatorResponse &response,
                                   const PulseSpec &spec, std::size_t n_pulses, double bias_offset = 0.0,
                                   double drive_scale = 1.0);

// Per-pulse multiplicative amplitude (1 + white jitter) * (1 + slow OU), bias drift per block.
PulseStats noisy_pulse_experiment(const ModulatorChannel &channel, const ActuatorResponse &response,
                                  const PulseSpec &spec, const NoiseModel &noise, const DetectorModel &detector,
                                  const PulseExperimentOptions &options);

// Same experiment with the consecutive-pulse reference trace supplied by the caller.
PulseStats noisy_pulse_experiment(const ModulatorChannel &channel, const ActuatorResponse &response,
                                  const PulseSpec &spec, const NoiseModel &noise, const DetectorModel &detector,
                                  const PulseExperimentOptions &options, const OpticalTrace &reference);

double sample_std(std::span<const double> x);

} // namespace mzisim
