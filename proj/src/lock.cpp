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

#include "mzisim/lock.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "mzisim/error.hpp"

namespace mzisim
{

namespace
{

using std::numbers::pi;

double off_power(const ModulatorChannel &channel, double bias_offset)
{
    return channel_transmission_normalized(channel, 0.0, bias_offset);
}

double to_er_db(double p)
{
    return p > 0.0 ? -10.0 * std::log10(p) : std::numeric_limits<double>::infinity();
}

} // namespace

void LockController::validate() const
{
    require(update_rate > 0.0 && std::isfinite(update_rate), Errc::invalid_argument, "update rate must be > 0");
    require(dither_amplitude > 0.0 && dither_amplitude < pi / 2.0, Errc::invalid_argument,
            "dither amplitude must lie in (0, pi/2)");
    require(std::isfinite(gain_p) && std::isfinite(gain_i), Errc::invalid_argument, "gains must be finite");
    require(integrator_limit > 0.0 && error_clamp > 0.0, Errc::invalid_argument, "limits must be > 0");
}

double null_curvature(const ModulatorChannel &channel)
{
    const double h = 1e-3;
    return (off_power(channel, h) + off_power(channel, -h) - 2.0 * off_power(channel, 0.0)) / (h * h);
}

double sample_std(std::span<const double> x)
{
    if (x.size() < 2)
        return 0.0;
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
    double s = 0.0;
    for (double v : x)
        s += (v - mean) * (v - mean);
    return std::sqrt(s / static_cast<double>(x.size() - 1));
}

LockRunResult run_lock(const ModulatorChannel &channel, const NoiseModel &noise, const LockController &controller,
                       const DetectorModel &detector, const LockRunOptions &options)
{
    noise.validate();
    controller.validate();
    detector.validate();
    require(options.duration > 0.0, Errc::invalid_argument, "lock duration must be > 0");
    require(options.time_compression > 0.0, Errc::invalid_argument, "time compression must be > 0");
    const double dt = 1.0 / controller.update_rate;
    require(options.er_cadence >= dt, Errc::invalid_argument, "ER cadence shorter than the update period");

    // The dynamics depend on dt / tau only, so the path is drawn on the physical grid and
    // compression only rescales the reported time axis.
    const auto n = static_cast<std::size_t>(std::floor(options.duration / dt + 1e-9));
    const auto every = static_cast<std::size_t>(std::llround(options.er_cadence / dt));
    Rng drift_rng(noise.seed, Stream::bias_drift);
    const auto path =
        sample_ou_path(noise.bias_drift.sigma, noise.bias_drift.correlation_time, n + 1, dt, drift_rng);
    Rng det_rng(noise.seed, Stream::detector, 1);

    const double h0 = null_curvature(channel);
    require(h0 > 0.0, Errc::invalid_argument, "channel has no curvature at the null");
    const double a = controller.dither_amplitude;

    LockRunResult res;
    res.time_compression = options.time_compression;
    double integ = 0.0;
    double corr = 0.0;
    double p_sum = 0.0;
    for (std::size_t k = 0; k < n; ++k)
    {
        const double drift = path[k] - path[0];
        const double err = drift - corr;
        double p_meas;
        if (options.lock_enabled)
        {
            if (std::abs(err) > pi)
                fail(Errc::lock_unstable, "bias excursion beyond pi at t = " + std::to_string(k * dt) + " s");
            const double pp = measure(detector, off_power(channel, err + a), &det_rng);
            const double pm = measure(detector, off_power(channel, err - a), &det_rng);
            const double grad = (pp - pm) / (2.0 * a);
            const double e_hat = std::clamp(grad / h0, -controller.error_clamp, controller.error_clamp);
            integ = std::clamp(integ + controller.gain_i * e_hat, -controller.integrator_limit,
                               controller.integrator_limit);
            corr = integ + controller.gain_p * e_hat;
            p_meas = 0.5 * (pp + pm);
        }
        else
        {
            p_meas = measure(detector, off_power(channel, err), &det_rng);
        }

        if (k % every == 0)
        {
            res.times.push_back(static_cast<double>(k) * dt / options.time_compression);
            res.er_db.push_back(to_er_db(p_meas));
            res.bias_error.push_back(err);
            p_sum += p_meas;
        }
    }

    const auto m = static_cast<double>(res.er_db.size());
    if (m > 0)
    {
        res.er_mean_db = std::accumulate(res.er_db.begin(), res.er_db.end(), 0.0) / m;
        res.er_std_db = sample_std(res.er_db);
        res.er_of_mean_power_db = to_er_db(p_sum / m);
        res.locked_fraction =
            static_cast<double>(std::count_if(res.er_db.begin(), res.er_db.end(),
                                              [](double v) { return v >= LockRunResult::locked_threshold_db; })) /
            m;
    }
    return res;
}

double unlocked_first_passage(const ModulatorChannel &channel, double sigma, double correlation_time,
                              double threshold_db, double horizon, double dt, std::uint64_t seed)
{
    require(sigma >= 0.0 && horizon > 0.0 && dt > 0.0, Errc::invalid_argument, "invalid first-passage inputs");
    const double p_thr = std::pow(10.0, -threshold_db / 10.0);
    if (off_power(channel, 0.0) >= p_thr)
        return 0.0;
    // ER is monotone in |offset| on (-pi, pi), so the crossing is a threshold on |drift|.
    const double delta_thr = phase_from_power(channel, std::min(p_thr, off_power(channel, pi)));
    if (sigma == 0.0)
        return horizon;
    const auto n = static_cast<std::size_t>(std::floor(horizon / dt + 1e-9)) + 1;
    Rng rng(seed, Stream::bias_drift);
    const auto z = sample_ou_path(1.0, correlation_time, n, dt, rng);
    const double lim = delta_thr / sigma;
    for (std::size_t k = 1; k < n; ++k)
        if (std::abs(z[k] - z[0]) >= lim)
            return static_cast<double>(k) * dt;
    return horizon;
}

OpticalTrace pulse_reference_trace(const ModulatorChannel &channel, const ActuatorResponse &response,
                                   const PulseSpec &spec, std::size_t n_pulses, double bias_offset,
                                   double drive_scale)
{
    auto drive = make_pulse_train(spec, n_pulses, response.sample_period);
    if (drive_scale != 1.0)
        for (auto &v : drive.samples)
            v *= drive_scale;
    return trace_optical(channel, response, drive, Prehistory::zero, bias_offset);
}

PulseStats noisy_pulse_experiment(const ModulatorChannel &channel, const ActuatorResponse &response,
                                  const PulseSpec &spec, const NoiseModel &noise, const DetectorModel &detector,
                                  const PulseExperimentOptions &options)
{
    const auto ref = pulse_reference_trace(channel, response, spec, options.n_pulses);
    return noisy_pulse_experiment(channel, response, spec, noise, detector, options, ref);
}

PulseStats noisy_pulse_experiment(const ModulatorChannel &channel, const ActuatorResponse &response,
                                  const PulseSpec &spec, const NoiseModel &noise, const DetectorModel &detector,
                                  const PulseExperimentOptions &options, const OpticalTrace &reference)
{
    noise.validate();
    detector.validate();
    spec.validate();
    require(options.n_pulses >= 1, Errc::invalid_argument, "need at least one pulse");
    const auto per = static_cast<std::size_t>(std::llround(spec.period / reference.sample_period));
    require(reference.size() == per * options.n_pulses, Errc::grid_mismatch,
            "reference trace does not match the pulse count");

    PulseStats st;

    // consecutive pulses: white jitter on top of the slow term sampled per period
    {
        Rng white(noise.seed, Stream::amplitude_jitter, 0);
        Rng slow_rng(noise.seed, Stream::amplitude_slow, 0);
        const auto slow = sample_ou_path(noise.amplitude_slow.sigma, noise.amplitude_slow.correlation_time,
                                         options.n_pulses, spec.period, slow_rng);
        Rng det_rng(noise.seed, Stream::detector, 2);
        OpticalTrace noisy = reference;
        for (std::size_t p = 0; p < options.n_pulses; ++p)
        {
            const double f = (1.0 + noise.amplitude_jitter_sigma * white.normal()) * (1.0 + slow[p]);
            for (std::size_t i = p * per; i < (p + 1) * per; ++i)
                noisy.power[i] = measure(detector, std::max(0.0, noisy.power[i] * f), &det_rng);
        }
        st.areas = pulse_areas(noisy, spec);
        st.area_std = sample_std(st.areas);
    }

    // long run in blocks: one base area per block from the drifted bias and v_pi, scaled per pulse
    if (options.run_duration > 0.0 && options.block_duration > 0.0)
    {
        const auto n_blocks = static_cast<std::size_t>(std::floor(options.run_duration / options.block_duration + 1e-9));
        const std::size_t ppb = options.pulses_per_block;
        require(ppb >= 2, Errc::invalid_argument, "need at least two pulses per block");
        const double pulse_dt = options.block_duration / static_cast<double>(ppb);

        Rng white(noise.seed, Stream::amplitude_jitter, 1);
        Rng slow_rng(noise.seed, Stream::amplitude_slow, 1);
        const auto slow = sample_ou_path(noise.amplitude_slow.sigma, noise.amplitude_slow.correlation_time,
                                         n_blocks * ppb, pulse_dt, slow_rng);
        Rng bias_rng(noise.seed, Stream::bias_drift, 1);
        Rng vpi_rng(noise.seed, Stream::v_pi_drift, 1);
        const auto bias = sample_ou_path(noise.bias_drift.sigma, noise.bias_drift.correlation_time, n_blocks,
                                         options.block_duration, bias_rng);
        const auto vpi = sample_ou_path(noise.v_pi_drift.sigma, noise.v_pi_drift.correlation_time, n_blocks,
                                        options.block_duration, vpi_rng);

        // pulses needed for the actuator to reach periodic steady state
        const std::size_t settle = 1 + (response.impulse_kernel.size() + per - 1) / per;
        auto base_area = [&](double offset, double scale) {
            const auto tr = pulse_reference_trace(channel, response, spec, settle, offset, scale);
            const double *x = tr.power.data() + (settle - 1) * per;
            double s = std::accumulate(x, x + per, 0.0);
            if (per > 1)
                s -= 0.5 * (x[0] + x[per - 1]);
            return s;
        };
        const bool drifting = !options.lock_engaged && (noise.bias_drift.sigma > 0.0 || noise.v_pi_drift.sigma > 0.0);
        const double nominal = base_area(0.0, 1.0);

        std::vector<double> areas(ppb);
        st.block_std.resize(n_blocks);
        for (std::size_t b = 0; b < n_blocks; ++b)
        {
            const double base =
                drifting ? base_area(bias[b] - bias[0], 1.0 / (1.0 + vpi[b])) : nominal;
            for (std::size_t j = 0; j < ppb; ++j)
            {
                const double f = (1.0 + noise.amplitude_jitter_sigma * white.normal()) * (1.0 + slow[b * ppb + j]);
                areas[j] = base * f;
            }
            const double mean = std::accumulate(areas.begin(), areas.end(), 0.0) / static_cast<double>(ppb);
            for (auto &v : areas)
                v /= mean;
            st.block_std[b] = sample_std(areas);
        }
        if (n_blocks > 0)
            st.mean_block_std =
                std::accumulate(st.block_std.begin(), st.block_std.end(), 0.0) / static_cast<double>(n_blocks);
    }

    // histogram of the consecutive areas
    const std::size_t bins = std::max<std::size_t>(1, options.histogram_bins);
    const double half = 5.0 * std::max(st.area_std, 1e-6);
    st.histogram_edges.resize(bins + 1);
    for (std::size_t i = 0; i <= bins; ++i)
        st.histogram_edges[i] = 1.0 - half + 2.0 * half * static_cast<double>(i) / static_cast<double>(bins);
    st.histogram_counts.assign(bins, 0);
    for (double a : st.areas)
    {
        const double x = (a - st.histogram_edges.front()) / (2.0 * half) * static_cast<double>(bins);
        if (x >= 0.0 && x < static_cast<double>(bins))
            ++st.histogram_counts[static_cast<std::size_t>(x)];
    }
    return st;
}

} // namespace mzisim
