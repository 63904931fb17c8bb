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

// Discrete-time LTI actuator model (drive volts -> arm phase) and the quasi-static optical map.

#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "mzisim/kernels.hpp"
#include "mzisim/photonic_core.hpp"

namespace mzisim
{

struct Waveform
{
    double sample_period = 1e-9; // seconds
    std::vector<double> samples; // volts

    void validate() const;
    std::size_t size() const { return samples.size(); }
    double duration() const { return sample_period * static_cast<double>(samples.size()); }
};

struct OpticalTrace
{
    double sample_period = 1e-9;
    std::vector<double> power; // normalised power, [0, 1 + eps]

    std::size_t size() const { return power.size(); }
};

enum class KernelKind
{
    first_order,
    second_order,
    custom,
};

std::string_view to_string(KernelKind kind);
KernelKind kernel_kind_from_string(std::string_view s);

// Kernels are truncated once the remaining tail mass falls below this, then renormalised to unit sum.
inline constexpr double kernel_tail_mass = 1e-12;

struct ActuatorResponse
{
    KernelKind kind = KernelKind::first_order;
    double rise_time_10_90 = 0.0; // seconds, of the step response in the phase domain
    double damping_ratio = 1.0;   // second order only
    double sample_period = 1e-9;
    double time_constant = 0.0;     // first order: tau
    double natural_frequency = 0.0; // second order: omega_n (rad/s)
    std::vector<double> impulse_kernel;

    // Wrap explicit taps (e.g. a single-tap identity kernel).
    static ActuatorResponse from_taps(std::vector<double> taps, double sample_period);
};

// Kernel whose discrete step response has the requested 10-90 % rise time (within 2 %),
// found by bisection on tau / omega_n against the measured step response.
ActuatorResponse synthesize_kernel(KernelKind kind, double rise_time_10_90, double damping_ratio,
                                   double sample_period);

// How the drive is assumed to behave before the first sample.
enum class Prehistory
{
    zero,       // drive is 0 V for t < 0
    hold_first, // drive held at samples[0] for t < 0 (steady state)
};

// Filtered drive in volts: kernel * drive (truncated to the drive length).
std::vector<double> filter_drive(const ActuatorResponse &response, const Waveform &drive,
                                 Prehistory pre = Prehistory::zero, kernels::Exec exec = kernels::Exec::parallel);

// Phase trajectory of a phase shifter with half-wave voltage v_pi: pi / v_pi * (kernel * drive).
std::vector<double> apply_actuator(const ActuatorResponse &response, const Waveform &drive, double v_pi,
                                   Prehistory pre = Prehistory::zero,
                                   kernels::Exec exec = kernels::Exec::parallel);

// Quasi-static optical response: channel_transmission applied per sample to the filtered drive
// (equal drive on every stage). bias_offset adds a constant phase to every MOD arm.
OpticalTrace trace_optical(const ModulatorChannel &channel, const ActuatorResponse &response, const Waveform &drive,
                           Prehistory pre = Prehistory::zero, double bias_offset = 0.0,
                           kernels::Exec exec = kernels::Exec::parallel);

// 10-90 % transition time of the settled span (first sample to last sample), linear interpolation.
double measure_rise_time(std::span<const double> y, double sample_period);
double measure_rise_time(const OpticalTrace &trace);

// Actuator whose *optical* step response (0 -> v_pi on `channel`) has the requested rise time.
ActuatorResponse calibrate_optical_rise(const ModulatorChannel &channel, KernelKind kind,
                                        double optical_rise_time, double damping_ratio, double sample_period);

// Optical 10-90 % rise of a 0 -> v_pi step through `response` on `channel`.
double optical_step_rise(const ModulatorChannel &channel, const ActuatorResponse &response);

} // namespace mzisim
