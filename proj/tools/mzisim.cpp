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

// mzisim command-line front end. Exit status: 0 success, 1 acceptance failure, 2 usage or config error.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "mzisim/error.hpp"
#include "mzisim/harness/commands.hpp"
#include "mzisim/harness/config.hpp"
#include "mzisim/harness/report.hpp"

namespace
{

using namespace mzisim;
using namespace mzisim::harness;

constexpr int exit_ok = 0;
constexpr int exit_failed = 1;
constexpr int exit_usage = 2;

struct Args
{
    std::string config;
    std::optional<std::string> out;
    std::optional<std::uint64_t> seed;
    std::string channels = "all";
    std::optional<std::string> scenario;
    std::optional<std::string> mode;
    std::optional<std::string> active;
};

void common_flags(CLI::App *cmd, Args &a, bool needs_config = true)
{
    auto *c = cmd->add_option("--config", a.config, "experiment configuration (JSON)");
    if (needs_config)
        c->required()->check(CLI::ExistingFile);
    cmd->add_option("--out", a.out, "output directory (overrides output_dir)");
    cmd->add_option("--seed", a.seed, "run seed (overrides seed)");
}

ExperimentConfig load(const Args &a)
{
    auto cfg = load_config(a.config);
    if (a.out)
        cfg.output_dir = *a.out;
    if (a.seed)
        cfg.seed = *a.seed;
    cfg.validate();
    return cfg;
}

int print(const RunReport &r)
{
    for (const auto &m : r.metrics())
        std::cout << fmt::format("{:<6} {}.{} = {:.6g} {}\n", to_string(m.status), r.kind(), m.name, m.value, m.unit);
    return r.failed() ? exit_failed : exit_ok;
}

int exit_code_for(Errc code)
{
    switch (code)
    {
    case Errc::unachievable_target:
    case Errc::lock_unstable:
    case Errc::fit_non_convergence:
    case Errc::unresolvable_rise_time:
    case Errc::no_transition:
        return exit_failed;
    default:
        return exit_usage;
    }
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"mzisim: cascaded-MZI modulator array digital twin"};
    app.require_subcommand(1);
    Args a;

    auto *calibrate = app.add_subcommand("calibrate", "solve calibration targets, write config.calibrated.json");
    common_flags(calibrate, a);
    auto *sweep = app.add_subcommand("sweep", "static voltage sweep, ER and v_pi fit per channel");
    common_flags(sweep, a);
    sweep->add_option("--channels", a.channels, "'all' or a comma-separated list of channel indices");
    auto *pulse = app.add_subcommand("pulse", "OFF-switch dynamic extinction, naive and pre-distorted drive");
    common_flags(pulse, a);
    pulse->add_option("--mode", a.mode, "naive or optimized (default: both)")
        ->check(CLI::IsMember({"naive", "optimized"}));
    auto *stability = app.add_subcommand("stability", "pulse-area statistics and the paired bias-lock run");
    common_flags(stability, a);
    auto *crosstalk = app.add_subcommand("crosstalk", "on-chip crosstalk matrices");
    common_flags(crosstalk, a);
    crosstalk->add_option("--scenario", a.scenario, "A, B or C (default: all)")->check(CLI::IsMember({"A", "B", "C"}));
    auto *beams = app.add_subcommand("beams", "target-plane beam profile and site leakage");
    common_flags(beams, a);
    beams->add_option("--active", a.active,
                      "all | evens | odds | single:K | first:K | list:A,B,.. | mask:BITS (default: config)");
    auto *report = app.add_subcommand("report", "aggregate *.report.json files into one acceptance table");
    std::string report_dir;
    report->add_option("dir", report_dir, "directory holding run reports");
    report->add_option("--out", a.out, "directory holding run reports");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp &e)
    {
        return app.exit(e);
    }
    catch (const CLI::CallForAllHelp &e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError &e)
    {
        app.exit(e);
        return exit_usage;
    }

    try
    {
        if (*report)
        {
            const std::string dir = !report_dir.empty() ? report_dir : a.out.value_or("");
            if (dir.empty())
            {
                std::cerr << "report: a directory is required\n";
                return exit_usage;
            }
            const auto summary = summarize_reports(dir);
            std::cout << format_summary(summary);
            return summary.failed() ? exit_failed : exit_ok;
        }

        const auto cfg = load(a);
        if (*calibrate)
        {
            const auto outcome = cmd_calibrate(cfg);
            std::cout << "wrote " << (std::filesystem::path(cfg.output_dir) / "config.calibrated.json").string()
                      << "\n";
            return print(outcome.report);
        }
        if (*sweep)
            return print(cmd_sweep(cfg, parse_channel_list(a.channels, cfg.chip.n_channels)));
        if (*pulse)
        {
            int rc = exit_ok;
            for (auto m : {PulseMode::naive, PulseMode::optimized})
                if (!a.mode || pulse_mode_from_string(*a.mode) == m)
                    rc = std::max(rc, print(cmd_pulse(cfg, m)));
            return rc;
        }
        if (*stability)
            return print(cmd_stability(cfg));
        if (*crosstalk)
            return print(cmd_crosstalk(cfg, a.scenario ? std::optional(scenario_from_string(*a.scenario))
                                                       : std::nullopt));
        if (*beams)
            return print(cmd_beams(cfg, a.active.value_or(cfg.beams.active)));
    }
    catch (const Error &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e.code());
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return exit_failed;
    }
    return exit_usage;
}
