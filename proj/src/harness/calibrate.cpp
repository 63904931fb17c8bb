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

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <numbers>

#include "mzisim/error.hpp"
#include "mzisim/harness/commands.hpp"
#include "mzisim/io.hpp"

namespace mzisim::harness
{

namespace
{

constexpr double imbalance_lo = 1e-4;
constexpr double imbalance_hi = 0.25;

double channel_er_db(const ExperimentConfig &cfg, double imbalance)
{
    const auto ch = ModulatorChannel::uniform(static_cast<std::size_t>(cfg.chip.n_stages), 0.5 + imbalance,
                                              cfg.chip.v_pi_volts, cfg.chip.insertion_loss_db);
    const double v = cfg.chip.v_pi_volts;
    return sweep_true_er_db(ch, cfg.sweep.v_start_over_v_pi * v, cfg.sweep.v_stop_over_v_pi * v,
                            static_cast<std::size_t>(cfg.sweep.n_points), kernels::Exec::serial);
}

double lower_median(std::vector<double> v)
{
    const auto mid = v.begin() + static_cast<std::ptrdiff_t>((v.size() - 1) / 2);
    std::nth_element(v.begin(), mid, v.end());
    return *mid;
}

double drift_threshold_phase(const ModulatorChannel &channel, double threshold_db)
{
    const double p = std::pow(10.0, -threshold_db / 10.0);
    require(p > channel_null_transmission(channel), Errc::unachievable_target,
            "unlocked threshold lies above the static extinction of the lock channel");
    return phase_from_power(channel, p);
}

} // namespace

double calibrate_imbalance(const ExperimentConfig &cfg, double target_er_db)
{
    const double er_max = channel_er_db(cfg, imbalance_lo);
    const double er_min = channel_er_db(cfg, imbalance_hi);
    require(target_er_db <= er_max && target_er_db >= er_min, Errc::unachievable_target,
            "target ER " + io::format_double(target_er_db) + " dB outside [" + io::format_double(er_min) + ", " +
                io::format_double(er_max) + "] dB for imbalance in [1e-4, 0.25]");
    // ER falls monotonically with imbalance
    double lo = std::log(imbalance_lo), hi = std::log(imbalance_hi);
    for (int it = 0; it < 100; ++it)
    {
        const double mid = 0.5 * (lo + hi);
        const double er = channel_er_db(cfg, std::exp(mid));
        if (std::abs(er - target_er_db) < 1e-9)
            return std::exp(mid);
        (er > target_er_db ? lo : hi) = mid;
    }
    return std::exp(0.5 * (lo + hi));
}

double static_dithered_er_db(const ModulatorChannel &channel, double dither_amplitude)
{
    const double p = 0.5 * (channel_transmission_normalized(channel, 0.0, dither_amplitude) +
                            channel_transmission_normalized(channel, 0.0, -dither_amplitude));
    return -10.0 * std::log10(p);
}

double calibrate_dither(const ModulatorChannel &channel, double target_er_db)
{
    double lo = 1e-6, hi = 0.5;
    require(static_dithered_er_db(channel, lo) >= target_er_db && static_dithered_er_db(channel, hi) <= target_er_db,
            Errc::unachievable_target, "locked ER target outside the range reachable by the dither amplitude");
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it)
    {
        const double mid = 0.5 * (lo + hi);
        (static_dithered_er_db(channel, mid) > target_er_db ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double median_first_passage(const ModulatorChannel &channel, double sigma, double correlation_time,
                            double threshold_db, double horizon, double dt, std::uint64_t seed, int n_seeds)
{
    require(n_seeds >= 1, Errc::invalid_argument, "need at least one seed");
    std::vector<double> t(static_cast<std::size_t>(n_seeds));
    for (int s = 0; s < n_seeds; ++s)
        t[static_cast<std::size_t>(s)] =
            unlocked_first_passage(channel, sigma, correlation_time, threshold_db, horizon, dt, seed + s);
    return lower_median(std::move(t));
}

double calibrate_drift_sigma(const ModulatorChannel &channel, double correlation_time, double threshold_db,
                             double median_passage, double dt, std::uint64_t seed, int n_seeds)
{
    require(median_passage > dt && n_seeds >= 1, Errc::invalid_argument, "invalid drift calibration inputs");
    const double delta = drift_threshold_phase(channel, threshold_db);
    // A seed crosses by T iff its running max of |z - z0| up to T reaches delta / sigma, so the
    // lower-median passage equals T when delta / sigma is the matching order statistic.
    const auto n = static_cast<std::size_t>(std::floor(median_passage / dt + 1e-9)) + 1;
    std::vector<double> peak(static_cast<std::size_t>(n_seeds));
    for (int s = 0; s < n_seeds; ++s)
    {
        Rng rng(seed + s, Stream::bias_drift);
        const auto z = sample_ou_path(1.0, correlation_time, n, dt, rng);
        double m = 0.0;
        for (std::size_t k = 1; k < n; ++k)
            m = std::max(m, std::abs(z[k] - z[0]));
        peak[static_cast<std::size_t>(s)] = m;
    }
    std::sort(peak.begin(), peak.end(), std::greater<>());
    const double level = peak[static_cast<std::size_t>((n_seeds - 1) / 2)];
    require(level > 0.0, Errc::unachievable_target, "drift paths never leave the start point");
    return delta / level;
}

std::vector<PulseStats> pulse_noise_runs(const ExperimentConfig &cfg, const ActuatorResponse &response, int n_seeds)
{
    require(n_seeds >= 1, Errc::invalid_argument, "need at least one seed");
    const auto channel = build_channels(cfg).front();
    const auto spec = build_pulse_spec(cfg);
    const auto detector = build_detector(cfg);
    PulseExperimentOptions opt;
    opt.n_pulses = static_cast<std::size_t>(cfg.pulse_train.n_pulses);
    opt.run_duration = cfg.stability.run_duration_s;
    opt.block_duration = cfg.stability.block_duration_s;
    opt.pulses_per_block = static_cast<std::size_t>(cfg.stability.pulses_per_block);
    opt.lock_engaged = cfg.stability.lock_engaged;
    opt.histogram_bins = static_cast<std::size_t>(cfg.stability.histogram_bins);
    const auto reference = pulse_reference_trace(channel, response, spec, opt.n_pulses);

    std::vector<PulseStats> stats(static_cast<std::size_t>(n_seeds));
    std::exception_ptr err;
#pragma omp parallel for schedule(static)
    for (int s = 0; s < n_seeds; ++s)
    {
        try
        {
            stats[static_cast<std::size_t>(s)] = noisy_pulse_experiment(
                channel, response, spec, build_noise(cfg, cfg.seed + s), detector, opt, reference);
        }
        catch (...)
        {
#pragma omp critical
            err = std::current_exception();
        }
    }
    if (err)
        std::rethrow_exception(err);
    return stats;
}

PulseNoiseSummary pulse_noise_summary(const ExperimentConfig &cfg, const ActuatorResponse &response, int n_seeds)
{
    const auto stats = pulse_noise_runs(cfg, response, n_seeds);
    PulseNoiseSummary out;
    for (const auto &st : stats)
    {
        out.area_std += st.area_std;
        out.block_std += st.mean_block_std;
    }
    out.area_std /= n_seeds;
    out.block_std /= n_seeds;
    return out;
}

CalibrationOutcome cmd_calibrate(const ExperimentConfig &input)
{
    const auto t0 = std::chrono::steady_clock::now();
    ExperimentConfig cfg = input;
    json cal = json::object();

    // coupler imbalance -> per-channel static ER
    if (!cfg.targets.er_db.empty())
    {
        std::vector<double> eps, achieved;
        for (double target : cfg.targets.er_db)
        {
            eps.push_back(calibrate_imbalance(cfg, target));
            achieved.push_back(channel_er_db(cfg, eps.back()));
        }
        cfg.chip.coupler_imbalance = eps;
        cal["er_db"] = achieved;
    }
    const auto channels = build_channels(cfg);

    // actuator: optical rise on channel 0
    const auto response = build_actuator(cfg);
    cal["optical_rise_time_s"] = optical_step_rise(channels.front(), response);
    cal["phase_rise_time_s"] = response.rise_time_10_90;

    const auto &lock_ch = channels.at(static_cast<std::size_t>(cfg.lock.channel));
    if (cfg.targets.locked_er_mean_db)
    {
        cfg.lock.dither_amplitude_rad = calibrate_dither(lock_ch, *cfg.targets.locked_er_mean_db);
        cal["dithered_static_er_db"] = static_dithered_er_db(lock_ch, cfg.lock.dither_amplitude_rad);
    }

    if (cfg.targets.unlocked_median_passage_s)
    {
        const double dt = 1.0 / cfg.lock.update_rate_hz;
        const double tau = cfg.noise.bias_drift_correlation_time_s;
        const double target = *cfg.targets.unlocked_median_passage_s;
        cfg.noise.bias_drift_sigma_rad = calibrate_drift_sigma(lock_ch, tau, cfg.targets.unlocked_threshold_db, target,
                                                               dt, cfg.seed, cfg.targets.drift_calibration_seeds);
        cal["unlocked_median_passage_s"] =
            median_first_passage(lock_ch, cfg.noise.bias_drift_sigma_rad, tau, cfg.targets.unlocked_threshold_db,
                                 4.0 * target, dt, cfg.seed, cfg.targets.drift_calibration_seeds);
    }

    // amplitude noise: white term sets the short-run std, the slow term tops up the block std
    if (cfg.targets.area_std)
    {
        const double at = *cfg.targets.area_std;
        const double bt = cfg.targets.block_std.value_or(at);
        require(at > 0.0 && bt >= at, Errc::unachievable_target, "block std target below the short-run std target");
        cfg.noise.amplitude_jitter_sigma = at;
        cfg.noise.amplitude_slow_sigma = std::sqrt(bt * bt - at * at);
        PulseNoiseSummary r;
        int it = 0;
        for (; it < 20; ++it)
        {
            r = pulse_noise_summary(cfg, response, cfg.targets.calibration_seeds);
            if (std::abs(r.area_std - at) <= 1e-4 * at && std::abs(r.block_std - bt) <= 1e-4 * bt)
                break;
            const double white_before = r.area_std;
            cfg.noise.amplitude_jitter_sigma *= at / r.area_std;
            const double want = bt * bt - at * at;
            const double have = r.block_std * r.block_std - white_before * white_before;
            if (want > 0.0 && have > 0.0)
                cfg.noise.amplitude_slow_sigma *= std::sqrt(want / have);
        }
        cal["area_std"] = r.area_std;
        cal["block_std"] = r.block_std;
        cal["noise_iterations"] = it;
    }

    if (cfg.targets.scenario_c_db)
    {
        double sum = 0.0;
        for (const auto &ch : channels)
            sum += scenario_c_prediction_db(-10.0 * std::log10(channel_null_transmission(ch)), cfg.crosstalk.nn_after_db);
        const double pred = sum / static_cast<double>(channels.size());
        check_scenario_c_consistency(pred, *cfg.targets.scenario_c_db, cfg.targets.scenario_c_tolerance_db);
        cal["scenario_c_predicted_db"] = pred;
    }

    cfg.calibration = cal;
    cfg.validate();

    RunReport report("calibrate", "calibrate", cfg);
    if (cal.contains("er_db"))
    {
        const auto er = cal["er_db"].get<std::vector<double>>();
        for (std::size_t i = 0; i < er.size(); ++i)
            report.add("er_db.ch" + std::to_string(i), er[i], "dB");
    }
    report.add("optical_rise_time_s", cal["optical_rise_time_s"].get<double>(), "s");
    if (cal.contains("dithered_static_er_db"))
    {
        report.add("dither_amplitude_rad", cfg.lock.dither_amplitude_rad, "rad");
        report.add("dithered_static_er_db", cal["dithered_static_er_db"].get<double>(), "dB");
    }
    if (cal.contains("unlocked_median_passage_s"))
    {
        report.add("bias_drift_sigma_rad", cfg.noise.bias_drift_sigma_rad, "rad");
        report.add("unlocked_median_passage_s", cal["unlocked_median_passage_s"].get<double>(), "s");
    }
    if (cal.contains("area_std"))
    {
        report.add("amplitude_jitter_sigma", cfg.noise.amplitude_jitter_sigma, "1");
        report.add("amplitude_slow_sigma", cfg.noise.amplitude_slow_sigma, "1");
        report.add("area_std", cal["area_std"].get<double>(), "1");
        report.add("block_std", cal["block_std"].get<double>(), "1");
    }
    if (cal.contains("scenario_c_predicted_db"))
        report.add("scenario_c_predicted_db", cal["scenario_c_predicted_db"].get<double>(), "dB");

    const std::filesystem::path dir = cfg.output_dir;
    io::write_text(dir / "config.calibrated.json", serialize(cfg));
    report.set_wall_time(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    report.write(dir);
    return {std::move(cfg), std::move(report)};
}

} // namespace mzisim::harness
