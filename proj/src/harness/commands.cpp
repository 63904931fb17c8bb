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

#include "mzisim/harness/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "mzisim/error.hpp"
#include "mzisim/io.hpp"

namespace mzisim::harness
{

namespace fs = std::filesystem;

namespace
{

using Clock = std::chrono::steady_clock;

RunReport &finish(RunReport &report, Clock::time_point t0, const fs::path &dir)
{
    report.set_wall_time(std::chrono::duration<double>(Clock::now() - t0).count());
    report.write(dir);
    return report;
}

double mean(std::span<const double> x)
{
    return x.empty() ? 0.0 : std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

std::vector<double> time_axis(std::size_t n, double dt, double t0 = 0.0)
{
    std::vector<double> t(n);
    for (std::size_t i = 0; i < n; ++i)
        t[i] = t0 + dt * static_cast<double>(i);
    return t;
}

json finite_or_string(double v) { return std::isfinite(v) ? json(v) : json(io::format_double(v)); }

} // namespace

PulseMode pulse_mode_from_string(std::string_view s)
{
    if (s == "naive")
        return PulseMode::naive;
    if (s == "optimized")
        return PulseMode::optimized;
    fail(Errc::invalid_argument, "unknown pulse mode '" + std::string(s) + "'");
}

std::string_view to_string(PulseMode m) { return m == PulseMode::naive ? "naive" : "optimized"; }

std::vector<int> parse_channel_list(std::string_view list, int n_channels)
{
    std::vector<int> out;
    if (list == "all")
    {
        out.resize(static_cast<std::size_t>(n_channels));
        std::iota(out.begin(), out.end(), 0);
        return out;
    }
    std::size_t pos = 0;
    while (pos <= list.size())
    {
        const auto comma = std::min(list.find(',', pos), list.size());
        const std::string item(list.substr(pos, comma - pos));
        std::size_t used = 0;
        int v = -1;
        try
        {
            v = std::stoi(item, &used);
        }
        catch (const std::exception &)
        {
            used = 0;
        }
        require(!item.empty() && used == item.size(), Errc::invalid_argument,
                "malformed channel list '" + std::string(list) + "'");
        require(v >= 0 && v < n_channels, Errc::out_of_range, "channel " + item + " out of range");
        out.push_back(v);
        pos = comma + 1;
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

RunReport cmd_sweep(const ExperimentConfig &cfg, const std::vector<int> &channels)
{
    const auto t0 = Clock::now();
    const fs::path dir = cfg.output_dir;
    require(!channels.empty(), Errc::invalid_argument, "no channels selected");
    const auto all = build_channels(cfg);
    const auto detector = build_detector(cfg);
    const double v_pi = cfg.chip.v_pi_volts;

    RunReport report("sweep", "sweep", cfg);
    std::vector<double> er, rel_err;
    json per = json::array();
    for (int i : channels)
    {
        const auto &ch = all.at(static_cast<std::size_t>(i));
        const auto r = sweep_channel(ch, cfg.sweep.v_start_over_v_pi * v_pi, cfg.sweep.v_stop_over_v_pi * v_pi,
                                     static_cast<std::size_t>(cfg.sweep.n_points), &detector);
        const auto tag = "ch" + std::to_string(i);
        io::write_csv(dir / ("sweep_" + tag + ".csv"),
                      {{"voltage_V", r.voltages}, {"transmission_linear", r.transmissions}});
        er.push_back(r.er_db);
        report.add("er_db." + tag, r.er_db, "dB");
        json entry = {{"channel", i},
                      {"er_db", finite_or_string(r.er_db)},
                      {"true_er_db", finite_or_string(r.true_er_db)},
                      {"detector_limited", r.detector_limited}};
        if (r.fit)
        {
            rel_err.push_back(std::abs(r.fit->v_pi - v_pi) / v_pi);
            report.add("v_pi_fit_volts." + tag, r.fit->v_pi, "V");
            entry["fit"] = {{"v_pi_volts", r.fit->v_pi},
                            {"bias_phase_rad", r.fit->bias_phase},
                            {"amplitude", r.fit->amplitude},
                            {"floor", r.fit->floor},
                            {"residual", r.fit->residual}};
        }
        else
        {
            rel_err.push_back(INFINITY);
            entry["fit_error"] = r.fit_error;
        }
        per.push_back(entry);
    }

    report.add("er_mean_db", mean(er), "dB");
    report.add("er_std_db", sample_std(er), "dB");
    report.add("er_min_db", *std::min_element(er.begin(), er.end()), "dB");
    report.add("er_max_db", *std::max_element(er.begin(), er.end()), "dB");
    report.add("v_pi_rel_error_max", *std::max_element(rel_err.begin(), rel_err.end()), "1");

    report.details()["channels"] = per;
    report.details()["v_pi_volts"] = v_pi;
    report.details()["detector_floor_db"] = cfg.detector.floor_db ? json(*cfg.detector.floor_db) : json(nullptr);
    io::write_text(dir / "sweep_summary.json", json({{"config_hash", config_hash(cfg)},
                                                     {"channels", per},
                                                     {"er_mean_db", finite_or_string(mean(er))},
                                                     {"er_std_db", finite_or_string(sample_std(er))}})
                                                   .dump(2) +
                                               "\n");
    return finish(report, t0, dir);
}

RunReport cmd_pulse(const ExperimentConfig &cfg, PulseMode mode)
{
    const auto t0 = Clock::now();
    const fs::path dir = cfg.output_dir;
    const auto channel = build_channels(cfg).front();
    const auto response = build_actuator(cfg);
    const double v_pi = cfg.chip.v_pi_volts;

    OffSwitchSpec os;
    os.sample_period = cfg.actuator.sample_period_s;
    os.lead_in = cfg.switching.lead_in_s;
    os.edge_time = cfg.switching.edge_time_s;
    os.settle_window = cfg.switching.settle_window_s;
    os.tail = cfg.switching.tail_s;
    const auto off = make_off_switch(os, response, v_pi);

    const std::string name(to_string(mode));
    RunReport report("pulse", "pulse_" + name, cfg);
    report.add("optical_rise_time_s", optical_step_rise(channel, response), "s");

    Waveform drive;
    if (mode == PulseMode::naive)
    {
        drive = off.naive_drive;
    }
    else
    {
        PredistortionProblem pr;
        pr.target_phase = off.target_phase;
        pr.response = response;
        pr.channel = channel;
        pr.v_max = cfg.switching.v_max_over_v_pi * v_pi;
        pr.regularization = cfg.switching.regularization;
        pr.settle_window = cfg.switching.settle_window_s;
        pr.extinction_target = cfg.switching.extinction_target_linear;
        pr.switch_index = off.switch_index;
        pr.max_iterations = cfg.switching.max_iterations;
        const auto sol = predistort(pr);
        drive = sol.drive;
        report.add(name + ".iterations", sol.iterations, "1");
        report.add(name + ".converged", sol.converged ? 1.0 : 0.0, "1");
        report.details()["cost_history"] = sol.cost_history;
    }

    const auto m = evaluate_off_switch(channel, response, drive, off.switch_index, cfg.switching.settle_window_s,
                                       cfg.switching.extinction_target_linear);
    report.add(name + ".floor_at_window", m.achieved_floor, "1");
    report.add(name + ".time_to_target_s", m.time_to_floor, "s");
    report.add(name + ".floor_reached", m.floor_reached ? 1.0 : 0.0, "1");
    const auto [lo, hi] = std::minmax_element(drive.samples.begin(), drive.samples.end());
    report.add(name + ".drive_peak_over_v_pi", std::max(std::abs(*lo), std::abs(*hi)) / v_pi, "1");
    report.details()["kernel"] = {{"kind", std::string(to_string(response.kind))},
                                  {"damping_ratio", response.damping_ratio},
                                  {"phase_rise_time_s", response.rise_time_10_90},
                                  {"taps", response.impulse_kernel.size()}};
    report.details()["switch_time_s"] = static_cast<double>(off.switch_index) * os.sample_period;
    report.details()["static_floor"] = channel_null_transmission(channel);

    const auto stem = "pulse_" + name;
    io::write_series_csv(dir / (stem + "_drive.csv"), drive.sample_period, drive.samples, "drive_V");
    io::write_waveform_binary(dir / (stem + "_drive.bin"), drive);
    io::write_series_csv(dir / (stem + "_optical.csv"), m.trace.sample_period, m.trace.power, "power_linear");
    const auto te = time_axis(m.extinction.envelope.size(), m.extinction.sample_period);
    io::write_csv(dir / (stem + "_extinction.csv"),
                  {{"time_after_switch_s", te}, {"envelope_linear", m.extinction.envelope}});
    return finish(report, t0, dir);
}

RunReport cmd_stability(const ExperimentConfig &cfg)
{
    const auto t0 = Clock::now();
    const fs::path dir = cfg.output_dir;
    RunReport report("stability", "stability", cfg);

    const auto response = build_actuator(cfg);
    const auto runs = pulse_noise_runs(cfg, response, cfg.stability.n_seeds);
    std::vector<double> area_std, block_std;
    for (const auto &r : runs)
    {
        area_std.push_back(r.area_std);
        block_std.push_back(r.mean_block_std);
    }
    report.add("area_std", mean(area_std), "1");
    report.add("block_std", mean(block_std), "1");
    report.add("area_std_seed_spread", sample_std(area_std), "1");
    report.add("block_std_seed_spread", sample_std(block_std), "1");
    report.details()["n_seeds"] = cfg.stability.n_seeds;
    report.details()["area_std_per_seed"] = area_std;
    report.details()["block_std_per_seed"] = block_std;

    const auto &first = runs.front();
    std::vector<double> idx(first.areas.size());
    std::iota(idx.begin(), idx.end(), 0.0);
    io::write_csv(dir / "stability_areas.csv", {{"pulse", idx}, {"area_normalized", first.areas}});
    std::vector<double> lo(first.histogram_counts.size()), hi(lo.size()), cnt(lo.size());
    for (std::size_t i = 0; i < lo.size(); ++i)
    {
        lo[i] = first.histogram_edges[i];
        hi[i] = first.histogram_edges[i + 1];
        cnt[i] = static_cast<double>(first.histogram_counts[i]);
    }
    io::write_csv(dir / "stability_histogram.csv", {{"bin_low", lo}, {"bin_high", hi}, {"count", cnt}});
    io::write_csv(dir / "stability_blocks.csv",
                  {{"block_start_s", time_axis(first.block_std.size(), cfg.stability.block_duration_s)},
                   {"block_std", first.block_std}});

    // paired lock ON / OFF on the same drift path
    const auto channels = build_channels(cfg);
    const auto &ch = channels.at(static_cast<std::size_t>(cfg.lock.channel));
    const auto noise = build_noise(cfg, cfg.seed);
    const auto controller = build_controller(cfg);
    const auto detector = build_lock_detector(cfg);
    LockRunOptions lo_opt;
    lo_opt.duration = cfg.lock.duration_s;
    lo_opt.er_cadence = cfg.lock.er_cadence_s;
    lo_opt.time_compression = cfg.lock.time_compression;
    lo_opt.lock_enabled = true;
    const auto on = run_lock(ch, noise, controller, detector, lo_opt);
    lo_opt.lock_enabled = false;
    const auto offr = run_lock(ch, noise, controller, detector, lo_opt);

    report.add("lock.er_mean_db", on.er_mean_db, "dB");
    report.add("lock.er_std_db", on.er_std_db, "dB");
    report.add("lock.er_of_mean_power_db", on.er_of_mean_power_db, "dB");
    report.add("lock.locked_fraction", on.locked_fraction, "1");
    report.add("unlocked.er_mean_db", offr.er_mean_db, "dB");
    report.add("unlocked.er_std_db", offr.er_std_db, "dB");
    report.add("lock.degradation_db", on.er_mean_db - offr.er_mean_db, "dB");
    // the single paired run above is one realisation; the spread over further seeds is reported alongside
    std::vector<double> deg(static_cast<std::size_t>(cfg.stability.n_seeds));
    std::exception_ptr err;
#pragma omp parallel for schedule(static)
    for (int s = 0; s < cfg.stability.n_seeds; ++s)
    {
        try
        {
            const auto nz = build_noise(cfg, cfg.seed + 1 + static_cast<std::uint64_t>(s));
            LockRunOptions o = lo_opt;
            o.lock_enabled = true;
            const double a = run_lock(ch, nz, controller, detector, o).er_mean_db;
            o.lock_enabled = false;
            deg[static_cast<std::size_t>(s)] = a - run_lock(ch, nz, controller, detector, o).er_mean_db;
        }
        catch (...)
        {
#pragma omp critical
            err = std::current_exception();
        }
    }
    if (err)
        std::rethrow_exception(err);
    auto sorted = deg;
    std::sort(sorted.begin(), sorted.end());
    report.add("lock.degradation_db_seed_median", sorted[(sorted.size() - 1) / 2], "dB");
    report.add("lock.degradation_seed_pass_fraction",
               static_cast<double>(std::count_if(deg.begin(), deg.end(), [](double d) { return d >= 20.0; })) /
                   static_cast<double>(deg.size()),
               "1");
    report.details()["lock_degradation_db_per_seed"] = deg;
    report.details()["lock"] = {{"compressed_duration_s", cfg.lock.duration_s / cfg.lock.time_compression},
                                {"time_compression", cfg.lock.time_compression},
                                {"samples", on.er_db.size()}};

    io::write_csv(dir / "lock_on.csv", {{"time_s", on.times}, {"er_db", on.er_db}, {"bias_error_rad", on.bias_error}});
    io::write_csv(dir / "lock_off.csv",
                  {{"time_s", offr.times}, {"er_db", offr.er_db}, {"bias_error_rad", offr.bias_error}});
    return finish(report, t0, dir);
}

RunReport cmd_crosstalk(const ExperimentConfig &cfg, std::optional<Scenario> scenario)
{
    const auto t0 = Clock::now();
    const fs::path dir = cfg.output_dir;
    const auto channels = build_channels(cfg);
    const auto graph = build_crosstalk(cfg);
    const auto levels = ChannelLevels::from_channels(channels);
    const auto detector = DetectorModel::from_floor_db(cfg.crosstalk.floor_db);

    std::vector<Scenario> list = scenario ? std::vector<Scenario>{*scenario}
                                          : std::vector<Scenario>{Scenario::A, Scenario::B, Scenario::C};
    RunReport report("crosstalk", scenario ? "crosstalk_" + std::string(to_string(*scenario)) : "crosstalk", cfg);
    std::map<Scenario, double> nn_linear;
    const std::size_t n = channels.size();
    for (Scenario s : list)
    {
        const auto m = crosstalk_matrix(graph, s, levels, detector);
        const std::string sn(to_string(s));
        io::write_matrix_csv(dir / ("crosstalk_" + sn + "_db.csv"), n, m.db);
        io::write_matrix_csv(dir / ("crosstalk_" + sn + "_linear.csv"), n, m.linear);
        json rows = json::array();
        for (std::size_t a = 0; a < n; ++a)
        {
            json row = json::array();
            for (std::size_t v = 0; v < n; ++v)
                row.push_back(finite_or_string(m.at_db(a, v)));
            rows.push_back(row);
        }
        io::write_text(dir / ("crosstalk_" + sn + ".json"),
                       json({{"config_hash", config_hash(cfg)},
                             {"scenario", sn},
                             {"reference", "aggressor ON output"},
                             {"floor_db", cfg.crosstalk.floor_db},
                             {"db", rows}})
                               .dump(2) +
                           "\n");
        if (n >= 2)
        {
            report.add(sn + ".nn_db", m.mean_db_at(1), "dB");
            nn_linear[s] = m.mean_linear_at(1);
        }
        if (n >= 3)
        {
            std::size_t limited = 0, total = 0;
            for (std::size_t a = 0; a < n; ++a)
                for (std::size_t v = 0; v < n; ++v)
                    if ((a > v ? a - v : v - a) >= 2)
                    {
                        ++total;
                        limited += m.floor_limited[a * n + v] ? 1 : 0;
                    }
            report.add(sn + ".nnn_db", m.mean_db_at(2), "dB");
            report.add(sn + ".nnn_floor_limited_fraction", static_cast<double>(limited) / static_cast<double>(total),
                       "1");
        }
        if (s == Scenario::C)
        {
            double sum = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                sum += scenario_c_prediction_db(-10.0 * std::log10(levels.t_off[i] / levels.t_on[i]),
                                                cfg.crosstalk.nn_after_db);
            report.add("C.nn_db_predicted", sum / static_cast<double>(n), "dB");
        }
    }
    if (nn_linear.size() == 3)
    {
        const bool ordered =
            nn_linear[Scenario::B] >= nn_linear[Scenario::C] && nn_linear[Scenario::C] >= nn_linear[Scenario::A];
        report.add("ordering_holds", ordered ? 1.0 : 0.0, "1");
    }
    return finish(report, t0, dir);
}

RunReport cmd_beams(const ExperimentConfig &cfg, const std::string &active_pattern)
{
    const auto t0 = Clock::now();
    const fs::path dir = cfg.output_dir;
    const auto array = build_beams(cfg);
    const auto active = parse_active_pattern(active_pattern, array.n_beams);
    const auto mode = cfg.beams.summation;

    RunReport report("beams", "beams", cfg);
    report.details()["active"] = active;
    report.details()["pattern"] = active_pattern;
    report.details()["summation"] = std::string(to_string(mode));

    const auto x = profile_axis(array, static_cast<std::size_t>(cfg.beams.profile_samples));
    const auto prof = target_plane_profile(array, active, x, mode);
    io::write_csv(dir / "beams_profile.csv",
                  {{"x_over_d0", prof.x}, {"intensity_linear", prof.intensity}, {"intensity_db", prof.intensity_db}});

    const auto sites = site_leakage_report(array, active, mode);
    std::vector<double> site, dist, idb, rdb, fl;
    for (const auto &s : sites)
    {
        site.push_back(static_cast<double>(s.site));
        dist.push_back(static_cast<double>(s.distance));
        idb.push_back(s.intensity_db);
        rdb.push_back(s.reported_db);
        fl.push_back(s.floor_limited ? 1.0 : 0.0);
    }
    io::write_csv(dir / "beams_sites.csv", {{"site", site},
                                            {"distance", dist},
                                            {"intensity_db", idb},
                                            {"reported_db", rdb},
                                            {"floor_limited", fl}});

    report.add("idle_sites", static_cast<double>(sites.size()), "1");
    report.add("gaussian_tail_nn_db", gaussian_tail_db(array.pitch, array.waist_radius), "dB");

    auto nn_worst = [&](Summation m) {
        double worst = -INFINITY;
        for (const auto &s : site_leakage_report(array, active, m))
            if (s.distance == 1)
                worst = std::max(worst, s.intensity_db);
        return worst;
    };
    const bool has_nn = std::any_of(sites.begin(), sites.end(), [](const SiteLeakage &s) { return s.distance == 1; });
    if (has_nn)
    {
        report.add("nn_leak_db", nn_worst(mode), "dB");
        for (Summation m : {Summation::coherent, Summation::worst_case, Summation::incoherent})
            if (m != mode)
                report.add("nn_leak_db." + std::string(to_string(m)), nn_worst(m), "dB");
    }
    std::size_t far = 0, far_limited = 0;
    for (const auto &s : sites)
        if (s.distance >= 2)
        {
            ++far;
            far_limited += s.floor_limited ? 1 : 0;
        }
    if (far > 0)
        report.add("nnn_floor_limited", far_limited == far ? 1.0 : 0.0, "1");
    return finish(report, t0, dir);
}

} // namespace mzisim::harness
