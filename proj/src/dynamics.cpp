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

#include "mzisim/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <numeric>

#include "mzisim/error.hpp"

namespace mzisim
{

namespace
{

using std::numbers::pi;

// Continuous-time unit step responses.
double step_first_order(double t, double tau) { return t <= 0.0 ? 0.0 : -std::expm1(-t / tau); }

double step_second_order(double t, double zeta, double wn)
{
    if (t <= 0.0)
        return 0.0;
    if (zeta < 1.0)
    {
        const double root = std::sqrt(1.0 - zeta * zeta);
        return 1.0 - std::exp(-zeta * wn * t) / root * std::sin(wn * root * t + std::acos(zeta));
    }
    if (zeta == 1.0)
        return 1.0 - std::exp(-wn * t) * (1.0 + wn * t);
    const double root = std::sqrt(zeta * zeta - 1.0);
    const double s1 = -wn * (zeta - root);
    const double s2 = -wn * (zeta + root);
    return 1.0 - (s2 * std::exp(s1 * t) - s1 * std::exp(s2 * t)) / (s2 - s1);
}

// Upper bound on |1 - s(t)|, used to place the truncation point.
double tail_bound_second_order(double t, double zeta, double wn)
{
    if (zeta < 1.0)
        return std::exp(-zeta * wn * t) / std::sqrt(1.0 - zeta * zeta);
    return std::abs(1.0 - step_second_order(t, zeta, wn));
}

// Step-invariant taps k[m] = s((m+1)T) - s(mT), truncated and renormalised.
std::vector<double> taps_from_step(const std::function<double(double)> &step,
                                   const std::function<double(double)> &tail, double dt)
{
    constexpr std::size_t max_taps = 1u << 22;
    std::size_t n = 1;
    while (tail(static_cast<double>(n) * dt) > kernel_tail_mass)
    {
        ++n;
        require(n < max_taps, Errc::invalid_argument, "kernel too long for the sample period");
    }
    std::vector<double> k(n);
    double prev = 0.0;
    for (std::size_t m = 0; m < n; ++m)
    {
        const double cur = step(static_cast<double>(m + 1) * dt);
        k[m] = cur - prev;
        prev = cur;
    }
    const double sum = std::accumulate(k.begin(), k.end(), 0.0);
    for (auto &v : k)
        v /= sum;
    return k;
}

double kernel_step_rise(const std::vector<double> &k, double dt)
{
    std::vector<double> y(k.size() + 1, 0.0);
    std::partial_sum(k.begin(), k.end(), y.begin() + 1);
    return measure_rise_time(y, dt);
}

ActuatorResponse build(KernelKind kind, double param, double zeta, double dt)
{
    ActuatorResponse r;
    r.kind = kind;
    r.damping_ratio = zeta;
    r.sample_period = dt;
    if (kind == KernelKind::first_order)
    {
        r.time_constant = param;
        r.impulse_kernel = taps_from_step([param](double t) { return step_first_order(t, param); },
                                          [param](double t) { return std::exp(-t / param); }, dt);
    }
    else
    {
        r.natural_frequency = param;
        r.impulse_kernel = taps_from_step([=](double t) { return step_second_order(t, zeta, param); },
                                          [=](double t) { return tail_bound_second_order(t, zeta, param); }, dt);
    }
    r.rise_time_10_90 = kernel_step_rise(r.impulse_kernel, dt);
    return r;
}

// Bisection in log space on a monotone map param -> measured rise.
template <class F>
double bisect_log(F &&measured_minus_target, double lo, double hi, bool increasing)
{
    double a = std::log(lo), b = std::log(hi);
    for (int it = 0; it < 80 && b - a > 1e-12; ++it)
    {
        const double m = 0.5 * (a + b);
        const double f = measured_minus_target(std::exp(m));
        if ((f < 0.0) == increasing)
            a = m;
        else
            b = m;
    }
    return std::exp(0.5 * (a + b));
}

} // namespace

void Waveform::validate() const
{
    require(sample_period > 0.0 && std::isfinite(sample_period), Errc::invalid_argument, "sample period must be > 0");
    for (double v : samples)
        require(std::isfinite(v), Errc::invalid_argument, "waveform samples must be finite");
}

std::string_view to_string(KernelKind kind)
{
    switch (kind)
    {
    case KernelKind::first_order:
        return "first_order";
    case KernelKind::second_order:
        return "second_order";
    case KernelKind::custom:
        return "custom";
    }
    return "?";
}

KernelKind kernel_kind_from_string(std::string_view s)
{
    if (s == "first_order")
        return KernelKind::first_order;
    if (s == "second_order")
        return KernelKind::second_order;
    if (s == "custom")
        return KernelKind::custom;
    fail(Errc::invalid_argument, "unknown kernel kind '" + std::string(s) + "'");
}

ActuatorResponse ActuatorResponse::from_taps(std::vector<double> taps, double sample_period)
{
    require(!taps.empty(), Errc::invalid_argument, "kernel needs at least one tap");
    require(sample_period > 0.0, Errc::invalid_argument, "sample period must be > 0");
    const double sum = std::accumulate(taps.begin(), taps.end(), 0.0);
    require(std::abs(sum - 1.0) <= 1e-9, Errc::invalid_argument, "kernel must have unit DC gain");
    ActuatorResponse r;
    r.kind = KernelKind::custom;
    r.sample_period = sample_period;
    r.impulse_kernel = std::move(taps);
    r.rise_time_10_90 = r.impulse_kernel.size() > 1 ? kernel_step_rise(r.impulse_kernel, sample_period) : 0.0;
    return r;
}

ActuatorResponse synthesize_kernel(KernelKind kind, double rise_time_10_90, double damping_ratio,
                                   double sample_period)
{
    require(sample_period > 0.0, Errc::invalid_argument, "sample period must be > 0");
    require(rise_time_10_90 >= 2.0 * sample_period, Errc::unresolvable_rise_time,
            "rise time must span at least two samples");
    require(kind != KernelKind::custom, Errc::invalid_argument, "custom kernels are built with from_taps");
    if (kind == KernelKind::second_order)
        require(damping_ratio > 0.0 && std::isfinite(damping_ratio), Errc::invalid_argument,
                "damping ratio must be > 0");

    ActuatorResponse r;
    if (kind == KernelKind::first_order)
    {
        const double guess = rise_time_10_90 / std::log(9.0);
        const double tau = bisect_log(
            [&](double tau) { return build(kind, tau, 1.0, sample_period).rise_time_10_90 - rise_time_10_90; },
            0.25 * guess, 4.0 * guess, true);
        r = build(kind, tau, 1.0, sample_period);
    }
    else
    {
        const double wn = bisect_log(
            [&](double w) {
                return build(kind, w, damping_ratio, sample_period).rise_time_10_90 - rise_time_10_90;
            },
            0.05 / rise_time_10_90, 20.0 / rise_time_10_90, false);
        r = build(kind, wn, damping_ratio, sample_period);
    }
    require(std::abs(r.rise_time_10_90 - rise_time_10_90) <= 0.02 * rise_time_10_90, Errc::unresolvable_rise_time,
            "rise time not reachable at this sample period");
    return r;
}

std::vector<double> filter_drive(const ActuatorResponse &response, const Waveform &drive, Prehistory pre,
                                 kernels::Exec exec)
{
    drive.validate();
    require(std::abs(drive.sample_period - response.sample_period) <= 1e-12 * response.sample_period,
            Errc::grid_mismatch, "drive and kernel sample periods differ");
    if (drive.samples.empty())
        return {};
    if (pre == Prehistory::zero)
        return kernels::convolve(drive.samples, response.impulse_kernel, exec);

    const double x0 = drive.samples.front();
    std::vector<double> dev(drive.samples.size());
    for (std::size_t i = 0; i < dev.size(); ++i)
        dev[i] = drive.samples[i] - x0;
    auto y = kernels::convolve(dev, response.impulse_kernel, exec);
    for (auto &v : y)
        v += x0;
    return y;
}

std::vector<double> apply_actuator(const ActuatorResponse &response, const Waveform &drive, double v_pi,
                                   Prehistory pre, kernels::Exec exec)
{
    require(v_pi > 0.0, Errc::invalid_argument, "v_pi must be > 0");
    auto y = filter_drive(response, drive, pre, exec);
    const double scale = pi / v_pi;
    for (auto &v : y)
        v *= scale;
    return y;
}

OpticalTrace trace_optical(const ModulatorChannel &channel, const ActuatorResponse &response, const Waveform &drive,
                           Prehistory pre, double bias_offset, kernels::Exec exec)
{
    const auto filtered = filter_drive(response, drive, pre, exec);
    OpticalTrace out;
    out.sample_period = drive.sample_period;
    out.power.resize(filtered.size());
    kernels::map(filtered, out.power,
                 [&](double v) { return channel_transmission_equal(channel, v, bias_offset); }, exec);
    return out;
}

double measure_rise_time(std::span<const double> y, double sample_period)
{
    require(y.size() >= 2, Errc::no_transition, "trace too short");
    const double y0 = y.front();
    const double y1 = y.back();
    double scale = 0.0;
    for (double v : y)
        scale = std::max(scale, std::abs(v));
    const double span = y1 - y0;
    if (!(std::abs(span) > 1e-9 * scale) || scale == 0.0)
        fail(Errc::no_transition, "trace has no settled transition");

    const double sign = span > 0.0 ? 1.0 : -1.0;
    const double lo = 0.1 * std::abs(span);
    const double hi = 0.9 * std::abs(span);
    auto level = [&](std::size_t i) { return sign * (y[i] - y0); };

    auto crossing = [&](double thr, std::size_t from) -> std::pair<bool, double> {
        for (std::size_t i = std::max<std::size_t>(from, 1); i < y.size(); ++i)
        {
            if (level(i) >= thr)
            {
                const double a = level(i - 1);
                const double b = level(i);
                const double frac = b > a ? (thr - a) / (b - a) : 0.0;
                return {true, static_cast<double>(i - 1) + std::clamp(frac, 0.0, 1.0)};
            }
        }
        return {false, 0.0};
    };

    const auto [ok_lo, t_lo] = crossing(lo, 1);
    if (!ok_lo)
        fail(Errc::no_transition, "10 % level never crossed");
    const auto [ok_hi, t_hi] = crossing(hi, static_cast<std::size_t>(t_lo) + 1);
    if (!ok_hi)
        fail(Errc::no_transition, "90 % level never crossed");
    return (t_hi - t_lo) * sample_period;
}

double measure_rise_time(const OpticalTrace &trace) { return measure_rise_time(trace.power, trace.sample_period); }

double optical_step_rise(const ModulatorChannel &channel, const ActuatorResponse &response)
{
    const std::size_t lead = 16;
    Waveform step;
    step.sample_period = response.sample_period;
    step.samples.assign(lead + response.impulse_kernel.size() + 64, 0.0);
    const double v_on = channel.stages().front().mod_arm().v_pi();
    std::fill(step.samples.begin() + lead, step.samples.end(), v_on);
    return measure_rise_time(trace_optical(channel, response, step));
}

ActuatorResponse calibrate_optical_rise(const ModulatorChannel &channel, KernelKind kind, double optical_rise_time,
                                        double damping_ratio, double sample_period)
{
    require(optical_rise_time >= 2.0 * sample_period, Errc::unresolvable_rise_time,
            "optical rise must span at least two samples");
    const double phase_rise = bisect_log(
        [&](double r) {
            const auto resp = synthesize_kernel(kind, r, damping_ratio, sample_period);
            return optical_step_rise(channel, resp) - optical_rise_time;
        },
        std::max(0.5 * optical_rise_time, 2.0 * sample_period), 4.0 * optical_rise_time, true);
    auto resp = synthesize_kernel(kind, phase_rise, damping_ratio, sample_period);
    const double achieved = optical_step_rise(channel, resp);
    require(std::abs(achieved - optical_rise_time) <= 0.02 * optical_rise_time, Errc::unresolvable_rise_time,
            "optical rise time not reachable with this kernel family");
    return resp;
}

} // namespace mzisim
