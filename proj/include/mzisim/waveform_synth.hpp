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

// Drive synthesis: pulse trains, static-map inversion, pre-distortion and switching metrics.

#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "mzisim/dynamics.hpp"

namespace mzisim
{

enum class EdgeShape
{
    square,
    raised_cosine,
};

std::string_view to_string(EdgeShape shape);
EdgeShape edge_shape_from_string(std::string_view s);

struct PulseSpec
{
    double on_level = 0.0;       // volts
    double off_level = 0.0;      // volts
    double on_duration = 500e-9; // seconds
    double period = 1e-6;        // seconds
    EdgeShape edge_shape = EdgeShape::square;
    double edge_time = 0.0; // seconds, raised-cosine edges only

    void validate() const;
};

// One pulse per period starting at the period boundary. Raised-cosine edges occupy
// [0, edge_time) and [on_duration - edge_time, on_duration) of each period.
Waveform make_pulse_train(const PulseSpec &spec, std::size_t n_pulses, double sample_period);

// Drive phase (pi V / v_pi, equal drive on every stage) whose loss-free transmission equals p.
// Principal branch [0, pi]; bisection to 1e-12 in transmission or machine resolution in phase.
double phase_from_power(const ModulatorChannel &channel, double p);
std::vector<double> target_phase_from_power(std::span<const double> target_power, const ModulatorChannel &channel);

// Reverse cumulative maximum of the post-switch power, normalised to the last pre-switch sample.
struct DynamicExtinction
{
    double sample_period = 1e-9;
    std::size_t switch_index = 0;
    double on_level = 0.0;
    std::vector<double> envelope; // envelope[i] covers t = i * sample_period after the switch

    struct Crossing
    {
        double time = 0.0; // seconds after the switch; window length if not reached
        bool reached = false;
    };

    // First time the envelope is <= threshold (it stays there by construction).
    Crossing time_to(double threshold) const;

    // Envelope value at `t` seconds after the switch (clamped to the window end).
    double floor_at(double t) const;

    double window() const { return sample_period * static_cast<double>(envelope.size()); }
};

DynamicExtinction dynamic_extinction(const OpticalTrace &trace, double switch_time);

struct PredistortionProblem
{
    std::vector<double> target_phase; // radians, MOD-arm drive phase per sample
    ActuatorResponse response;
    ModulatorChannel channel = ModulatorChannel::uniform(2, 0.5, 1.0);
    double v_max = 0.0;               // volts; 0 selects 2 v_pi
    double regularization = 1e-4;     // relative to the peak kernel spectral power
    double settle_window = 1e-6;      // seconds
    double extinction_target = 1e-6;  // linear, relative to the ON level
    std::size_t switch_index = 1;     // sample at which the OFF transition starts
    int max_iterations = 200;

    void validate() const;
    double v_pi() const;
    double effective_v_max() const;
};

struct PredistortionSolution
{
    Waveform drive;
    double achieved_floor = 1.0; // from an independent forward simulation of `drive`
    double time_to_floor = 0.0;  // seconds after the switch, window length if not reached
    bool floor_reached = false;
    int iterations = 0;
    bool converged = false;
    std::vector<double> cost_history; // verified weighted phase residual, one entry per accepted iterate
};

// Stage 1: Tikhonov deconvolution of the target phase increments. Stage 2: projected damped
// Gauss-Newton on the phase residual of clip(drive) through the actuator.
PredistortionSolution predistort(const PredistortionProblem &problem);

// Stage-1 drive only, in volts and unclipped (exposed for the deconvolution consistency check).
std::vector<double> deconvolve_drive(const PredistortionProblem &problem);

// Verified metrics of an arbitrary drive for an OFF switch starting at `switch_index`.
struct SwitchMetrics
{
    OpticalTrace trace;
    DynamicExtinction extinction;
    double achieved_floor = 1.0;
    double time_to_floor = 0.0;
    bool floor_reached = false;
};

SwitchMetrics evaluate_off_switch(const ModulatorChannel &channel, const ActuatorResponse &response,
                                  const Waveform &drive, std::size_t switch_index, double settle_window,
                                  double extinction_target);

// ON -> OFF switching experiment: steady ON lead-in, a raised-cosine target edge from pi to 0,
// the settle window, and a tail long enough for the kernel to flush.
struct OffSwitchSpec
{
    double sample_period = 1e-9;
    double lead_in = 200e-9;
    double edge_time = 60e-9;
    double settle_window = 1e-6;
    double tail = 0.0; // seconds after the window; 0 selects one kernel length
};

struct OffSwitch
{
    std::vector<double> target_phase;
    std::size_t switch_index = 0;
    Waveform naive_drive; // square v_pi -> 0 at switch_index
};

OffSwitch make_off_switch(const OffSwitchSpec &spec, const ActuatorResponse &response, double v_pi);

// Trapezoidal area of each period, divided by the ensemble mean.
std::vector<double> pulse_areas(const OpticalTrace &trace, const PulseSpec &spec);

} // namespace mzisim
