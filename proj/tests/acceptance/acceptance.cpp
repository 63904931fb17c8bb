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

// One PASS/FAIL line per acceptance criterion. Exit status 1 when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "mzisim/beams.hpp"
#include "mzisim/crosstalk.hpp"
#include "mzisim/error.hpp"
#include "mzisim/harness/commands.hpp"
#include "mzisim/harness/config.hpp"
#include "mzisim/io.hpp"
#include "mzisim/kernels.hpp"
#include "mzisim/lock.hpp"
#include "mzisim/stochastics.hpp"
#include "mzisim/waveform_synth.hpp"

namespace
{

using namespace mzisim;
using namespace mzisim::harness;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;
using std::numbers::pi;

struct Outcome
{
    bool pass = false;
    std::string detail;
};

struct Check
{
    bool ok = true;
    std::vector<std::string> notes;

    void expect(bool cond, std::string note)
    {
        ok = ok && cond;
        notes.push_back((cond ? "" : "!") + std::move(note));
    }
    Outcome done() const
    {
        std::string s;
        for (const auto &n : notes)
            s += (s.empty() ? "" : "; ") + n;
        return {ok, s};
    }
};

const fs::path source = MZISIM_SOURCE_DIR;

ExperimentConfig config(const std::string &name) { return load_config(source / "configs" / name); }

fs::path scratch(const std::string &name)
{
    const auto d = fs::temp_directory_path() / ("mzisim_acceptance_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

double metric(const RunReport &r, const std::string &name)
{
    for (const auto &m : r.metrics())
        if (m.name == name)
            return m.value;
    fail(Errc::invalid_argument, "report has no metric '" + name + "'");
}

double db(double p) { return 10.0 * std::log10(p); }

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// 1. static ER over eight calibrated channels
Outcome static_er()
{
    auto cfg = config("795nm.json");
    cfg.output_dir = scratch("c1").string();
    const auto t0 = Clock::now();
    const auto r = cmd_sweep(cfg, parse_channel_list("all", cfg.chip.n_channels));
    const double wall = seconds_since(t0);
    Check c;
    const double mean = metric(r, "er_mean_db"), lo = metric(r, "er_min_db");
    c.expect(cfg.chip.n_channels == 8, fmt::format("channels {}", cfg.chip.n_channels));
    c.expect(std::abs(mean - 71.4) <= 2.0, fmt::format("mean ER {:.2f} dB", mean));
    c.expect(lo > 70.0, fmt::format("min ER {:.2f} dB", lo));
    c.expect(wall < 1.0, fmt::format("sweep {:.3f} s", wall));
    return c.done();
}

// 2. v_pi recovery at three wavelengths
Outcome v_pi_recovery()
{
    Check c;
    for (const char *name : {"795nm.json", "1013nm.json", "420nm.json"})
    {
        const auto cfg = config(name);
        const double v_pi = cfg.chip.v_pi_volts;
        const auto ch = build_channels(cfg).front();
        const auto sw = sweep_channel(ch, -v_pi, v_pi, 2001);
        const FitOptions opt{static_cast<int>(ch.n_stages()), {}, {}};
        const auto clean = fit_v_pi(sw.voltages, sw.transmissions, opt);
        Rng rng(cfg.seed, Stream::fit_noise);
        auto noisy_t = sw.transmissions;
        for (auto &t : noisy_t)
            t *= 1.0 + 0.01 * rng.normal();
        const auto noisy = fit_v_pi(sw.voltages, noisy_t, opt);
        const double e0 = std::abs(clean.v_pi - v_pi) / v_pi, e1 = std::abs(noisy.v_pi - v_pi) / v_pi;
        c.expect(e0 <= 0.01 && e1 <= 0.02, fmt::format("{:g} V: {:.3f} / {:.3f} V", v_pi, clean.v_pi, noisy.v_pi));
    }
    return c.done();
}

// 3. detector-floor clamp
Outcome detector_floor()
{
    // two nulled stages: null = 16 e^4
    const double e = std::pow(1e-7 / 16.0, 0.25);
    const auto ch = ModulatorChannel::uniform(2, 0.5 + e, 44.4);
    const auto det = DetectorModel::from_floor_db(-42.4);
    const auto sw = sweep_channel(ch, -44.4, 44.4, 2001, &det);
    Check c;
    c.expect(std::abs(sw.true_er_db - 70.0) < 0.01, fmt::format("true ER {:.3f} dB", sw.true_er_db));
    c.expect(std::abs(sw.er_db - 42.4) < 1e-9, fmt::format("reported {:.10f} dB", sw.er_db));
    c.expect(sw.detector_limited, "flagged detector-limited");
    return c.done();
}

// 4. optical rise time per wavelength config
Outcome rise_time()
{
    Check c;
    for (const char *name : {"795nm.json", "1013nm.json", "420nm.json"})
    {
        const auto cfg = config(name);
        const double r = optical_step_rise(build_channels(cfg).front(), build_actuator(cfg));
        c.expect(std::abs(r - 26e-9) <= 2e-9, fmt::format("{} {:.2f} ns", name, r * 1e9));
    }
    return c.done();
}

// 5. dynamic extinction, naive against pre-distorted drive
Outcome dynamic_extinction_check()
{
    const auto t0 = Clock::now();
    const auto cfg = config("795nm.json");
    const auto ch = build_channels(cfg).front();
    const auto resp = build_actuator(cfg);
    const double v_pi = cfg.chip.v_pi_volts;
    OffSwitchSpec os;
    os.sample_period = cfg.actuator.sample_period_s;
    os.lead_in = cfg.switching.lead_in_s;
    os.edge_time = cfg.switching.edge_time_s;
    os.settle_window = 1e-6;
    os.tail = cfg.switching.tail_s;
    const auto off = make_off_switch(os, resp, v_pi);

    const auto naive = evaluate_off_switch(ch, resp, off.naive_drive, off.switch_index, 1e-6, 1e-6);
    PredistortionProblem pr;
    pr.target_phase = off.target_phase;
    pr.response = resp;
    pr.channel = ch;
    pr.v_max = cfg.switching.v_max_over_v_pi * v_pi;
    pr.regularization = cfg.switching.regularization;
    pr.settle_window = 1e-6;
    pr.extinction_target = 1e-6;
    pr.switch_index = off.switch_index;
    pr.max_iterations = cfg.switching.max_iterations;
    const auto sol = predistort(pr);
    const auto verified = evaluate_off_switch(ch, resp, sol.drive, off.switch_index, 1e-6, 1e-6);
    const double wall = seconds_since(t0);

    Check c;
    c.expect(resp.kind == KernelKind::second_order && std::abs(resp.damping_ratio - 0.3) < 1e-12,
             fmt::format("kernel {} zeta {}", to_string(resp.kind), resp.damping_ratio));
    c.expect(!naive.floor_reached, fmt::format("naive envelope {:.3g} at 1 us, 1e-6 reached at {:.0f} ns",
                                               naive.achieved_floor, naive.time_to_floor * 1e9));
    c.expect(verified.floor_reached && verified.achieved_floor <= 1e-6,
             fmt::format("pre-distorted {:.3g}, reached at {:.0f} ns", verified.achieved_floor,
                         verified.time_to_floor * 1e9));
    c.expect(wall < 30.0, fmt::format("{:.2f} s", wall));
    return c.done();
}

// 6. pulse-area stability over seeds
Outcome pulse_stability()
{
    const auto cfg = config("795nm.json");
    const int n = cfg.stability.n_seeds;
    const auto s = pulse_noise_summary(cfg, build_actuator(cfg), n);
    Check c;
    c.expect(n >= 20, fmt::format("{} seeds", n));
    c.expect(cfg.pulse_train.n_pulses == 1000, fmt::format("{} pulses", cfg.pulse_train.n_pulses));
    c.expect(std::abs(cfg.stability.run_duration_s - 500.0) < 1e-9,
             fmt::format("{:g} s run", cfg.stability.run_duration_s));
    c.expect(std::abs(s.area_std - 0.001) <= 0.0002, fmt::format("area std {:.4f} %", 100.0 * s.area_std));
    c.expect(std::abs(s.block_std - 0.0013) <= 0.0003, fmt::format("block std {:.4f} %", 100.0 * s.block_std));
    return c.done();
}

// 7. paired bias-lock run
Outcome bias_lock()
{
    const auto t0 = Clock::now();
    const auto cfg = config("795nm.json");
    const auto ch = build_channels(cfg).at(static_cast<std::size_t>(cfg.lock.channel));
    const auto noise = build_noise(cfg, cfg.seed);
    LockRunOptions o;
    o.duration = cfg.lock.duration_s;
    o.er_cadence = cfg.lock.er_cadence_s;
    o.time_compression = cfg.lock.time_compression;
    const auto on = run_lock(ch, noise, build_controller(cfg), build_lock_detector(cfg), o);
    o.lock_enabled = false;
    const auto off = run_lock(ch, noise, build_controller(cfg), build_lock_detector(cfg), o);
    const double wall = seconds_since(t0);

    Check c;
    c.expect(std::abs(cfg.lock.duration_s - 72000.0) < 1e-9, fmt::format("{:g} h", cfg.lock.duration_s / 3600.0));
    c.expect(on.er_mean_db >= 66.8 && on.er_mean_db <= 72.8, fmt::format("locked mean {:.2f} dB", on.er_mean_db));
    c.expect(on.er_std_db <= 3.0, fmt::format("locked std {:.3f} dB", on.er_std_db));
    c.expect(on.er_mean_db - off.er_mean_db >= 20.0,
             fmt::format("unlocked {:.2f} dB, degradation {:.2f} dB", off.er_mean_db, on.er_mean_db - off.er_mean_db));
    c.expect(wall < 60.0, fmt::format("{:.2f} s", wall));
    return c.done();
}

// 8. crosstalk scenarios
Outcome crosstalk_scenarios()
{
    const auto cfg = config("795nm.json");
    const auto channels = build_channels(cfg);
    const auto graph = build_crosstalk(cfg);
    const auto levels = ChannelLevels::from_channels(channels);
    const auto det = DetectorModel::from_floor_db(cfg.crosstalk.floor_db);
    const auto a = crosstalk_matrix(graph, Scenario::A, levels, det);
    const auto b = crosstalk_matrix(graph, Scenario::B, levels, det);
    const auto cm = crosstalk_matrix(graph, Scenario::C, levels, det);

    double pred = 0.0;
    for (const auto &ch : channels)
        pred += scenario_c_prediction_db(-db(channel_null_transmission(ch)), cfg.crosstalk.nn_after_db);
    pred /= static_cast<double>(channels.size());

    bool ordered = true;
    for (std::size_t i = 0; i < a.n; ++i)
        for (std::size_t j = 0; j < a.n; ++j)
            if (i + 1 == j || j + 1 == i)
                ordered = ordered && b.at_linear(i, j) >= cm.at_linear(i, j) && cm.at_linear(i, j) >= a.at_linear(i, j);

    Check c;
    c.expect(std::abs(a.mean_db_at(1) + 76.2) <= 0.5, fmt::format("A NN {:.2f} dB", a.mean_db_at(1)));
    c.expect(std::abs(b.mean_db_at(1) + 45.3) <= 0.5, fmt::format("B NN {:.2f} dB", b.mean_db_at(1)));
    c.expect(std::abs(pred + 68.0) <= 3.0, fmt::format("C NN predicted {:.2f} dB", pred));
    c.expect(ordered, "B >= C >= A on every NN pair");
    return c.done();
}

// 9. beam delivery leakage
Outcome beam_delivery()
{
    const auto cfg = config("795nm.json");
    const auto arr = build_beams(cfg);
    const auto rep = site_leakage_report(arr, parse_active_pattern("single:0", arr.n_beams), cfg.beams.summation);
    Check c;
    c.expect(std::abs(arr.pitch - 4.33) < 1e-12, fmt::format("pitch {:g} d0", arr.pitch));
    bool nnn_flagged = true;
    for (const auto &l : rep)
    {
        if (l.distance == 1)
            c.expect(std::abs(l.intensity_db + 50.8) <= 0.2, fmt::format("NN site {} {:.3f} dB", l.site, l.intensity_db));
        else
            nnn_flagged = nnn_flagged && l.floor_limited && l.reported_db == -65.0;
    }
    const double tail = gaussian_tail_db(arr.pitch, arr.waist_radius);
    c.expect(tail < -300.0, fmt::format("Gaussian tail {:.1f} dB", tail));
    c.expect(nnn_flagged, "farther sites floor-flagged at -65 dB");
    return c.done();
}

// 10. property suites on generic, uncalibrated parameters
Outcome properties()
{
    Check c;
    std::mt19937_64 gen(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);

    double energy = 0.0;
    for (int i = 0; i < 5000; ++i)
    {
        const MziStage st(Coupler(0.01 + 0.98 * u(gen)), Coupler(0.01 + 0.98 * u(gen)),
                          PhaseShifter(5.0 + 95.0 * u(gen), 6.0 * u(gen), ShifterRole::mod),
                          PhaseShifter(5.0 + 95.0 * u(gen), 6.0 * u(gen), ShifterRole::bias));
        const auto p = stage_port_powers(st, 200.0 * (u(gen) - 0.5), u(gen));
        energy = std::max(energy, std::abs(p[0] + p[1] - 1.0));
    }
    c.expect(energy <= 1e-12, fmt::format("energy {:.1e}", energy));

    double additivity = 0.0;
    for (int i = 0; i < 500; ++i)
    {
        const std::size_t n = 1 + static_cast<std::size_t>(i % 5);
        std::vector<MziStage> stages;
        std::vector<double> v(n);
        double sum_db = -1.5;
        for (std::size_t k = 0; k < n; ++k)
        {
            stages.push_back(MziStage::nulled(0.3 + 0.4 * u(gen), 0.3 + 0.4 * u(gen), 20.0 + 80.0 * u(gen)));
            v[k] = 30.0 * (u(gen) - 0.5);
            sum_db += db(stage_transmission(stages.back(), v[k]));
        }
        const ModulatorChannel ch(stages, 1.5);
        additivity = std::max(additivity, std::abs(db(channel_transmission(ch, v)) - sum_db));
    }
    c.expect(additivity <= 0.1, fmt::format("additivity {:.1e} dB", additivity));

    double conv = 0.0;
    for (std::size_t n : {1u, 17u, 300u, 2500u})
    {
        std::vector<double> x(n), k(1 + n / 3);
        for (auto &e : x)
            e = u(gen) - 0.5;
        for (auto &e : k)
            e = u(gen);
        for (auto exec : {kernels::Exec::serial, kernels::Exec::parallel})
        {
            const auto y = kernels::convolve(x, k, exec);
            for (std::size_t i = 0; i < n; ++i)
            {
                double ref = 0.0;
                for (std::size_t j = 0; j <= i && j < k.size(); ++j)
                    ref += k[j] * x[i - j];
                conv = std::max(conv, std::abs(y[i] - ref));
            }
        }
    }
    c.expect(conv <= 1e-10, fmt::format("convolution {:.1e}", conv));

    // ensemble autocovariance at lag tau against sigma^2 / e
    const double sigma = 0.02, tau = 300.0, dt = 5.0;
    const auto lag = static_cast<std::size_t>(tau / dt);
    double acov = 0.0;
    std::size_t pairs = 0;
    for (std::uint64_t s = 0; s < 50; ++s)
    {
        const auto x = sample_ou_path(sigma, tau, 60000.0, dt, 900 + s);
        for (std::size_t i = 0; i + lag < x.size(); ++i)
            acov += x[i] * x[i + lag];
        pairs += x.size() - lag;
    }
    acov /= static_cast<double>(pairs);
    const double ou_err = std::abs(acov / (sigma * sigma * std::exp(-1.0)) - 1.0);
    c.expect(ou_err <= 0.10, fmt::format("OU autocovariance within {:.1f} %", 100.0 * ou_err));

    // byte-identical reruns of a generic configuration
    ExperimentConfig g;
    g.seed = 31337;
    g.chip.n_channels = 4;
    g.chip.v_pi_volts = 100.0;
    g.chip.coupler_imbalance = {0.004, 0.006, 0.008, 0.01};
    g.noise.amplitude_jitter_sigma = 0.002;
    g.noise.bias_drift_sigma_rad = 0.05;
    g.noise.bias_drift_correlation_time_s = 3600.0;
    g.stability.n_seeds = 2;
    g.stability.run_duration_s = 20.0;
    g.lock.duration_s = 7200.0;
    g.validate();
    std::vector<std::string> texts[2];
    for (int run = 0; run < 2; ++run)
    {
        const auto dir = scratch("c10_" + std::to_string(run));
        g.output_dir = dir.string();
        (void)cmd_sweep(g, parse_channel_list("all", 4));
        (void)cmd_pulse(g, PulseMode::optimized);
        (void)cmd_stability(g);
        (void)cmd_crosstalk(g, std::nullopt);
        (void)cmd_beams(g, "evens");
        std::vector<fs::path> files;
        for (const auto &e : fs::directory_iterator(dir))
            files.push_back(e.path());
        std::sort(files.begin(), files.end());
        for (const auto &f : files)
        {
            auto t = io::read_text(f);
            if (f.string().ends_with(".report.json"))
            {
                auto j = json::parse(t);
                j.erase("wall_time_s");
                t = j.dump();
            }
            texts[run].push_back(f.filename().string() + "\n" + t);
        }
    }
    c.expect(!texts[0].empty() && texts[0] == texts[1], fmt::format("{} files identical", texts[0].size()));
    return c.done();
}

} // namespace

int main()
{
    const std::vector<std::pair<const char *, std::function<Outcome()>>> criteria = {
        {"static ER, 795 nm", static_er},
        {"v_pi recovery", v_pi_recovery},
        {"detector-floor clamp", detector_floor},
        {"optical rise time", rise_time},
        {"dynamic extinction", dynamic_extinction_check},
        {"pulse-area stability", pulse_stability},
        {"bias lock", bias_lock},
        {"crosstalk scenarios", crosstalk_scenarios},
        {"beam delivery", beam_delivery},
        {"property suites", properties},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i)
    {
        const auto t0 = Clock::now();
        Outcome o;
        try
        {
            o = criteria[i].second();
        }
        catch (const std::exception &e)
        {
            o = {false, std::string("error: ") + e.what()};
        }
        failed += o.pass ? 0 : 1;
        std::cout << fmt::format("{} criterion {:>2} {} [{:.2f} s]: {}\n", o.pass ? "PASS" : "FAIL", i + 1,
                                 criteria[i].first, seconds_since(t0), o.detail)
                  << std::flush;
    }
    std::cout << fmt::format("{}/{} criteria passed\n", criteria.size() - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
