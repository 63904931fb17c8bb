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

// Experiment commands. Each writes its artefacts and a RunReport into cfg.output_dir
// and touches nothing outside it.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mzisim/harness/config.hpp"
#include "mzisim/harness/report.hpp"

namespace mzisim::harness
{

enum class PulseMode
{
    naive,
    optimized,
};

PulseMode pulse_mode_from_string(std::string_view s);
std::string_view to_string(PulseMode m);

// "all" or a comma-separated list of channel indices.
std::vector<int> parse_channel_list(std::string_view list, int n_channels);

RunReport cmd_sweep(const ExperimentConfig &cfg, const std::vector<int> &channels);
RunReport cmd_pulse(const ExperimentConfig &cfg, PulseMode mode);
RunReport cmd_stability(const ExperimentConfig &cfg);
RunReport cmd_crosstalk(const ExperimentConfig &cfg, std::optional<Scenario> scenario);
RunReport cmd_beams(const ExperimentConfig &cfg, const std::string &active_pattern);

struct CalibrationOutcome
{
    ExperimentConfig config; // calibrated values and the `calibration` section filled in
    RunReport report;
};

// Solves every calibration problem whose target is present and writes
// <output_dir>/config.calibrated.json.
CalibrationOutcome cmd_calibrate(const ExperimentConfig &cfg);

// Calibration building blocks, exposed for tests.
double calibrate_imbalance(const ExperimentConfig &cfg, double target_er_db);
double static_dithered_er_db(const ModulatorChannel &channel, double dither_amplitude);
double calibrate_dither(const ModulatorChannel &channel, double target_er_db);
double calibrate_drift_sigma(const ModulatorChannel &channel, double correlation_time, double threshold_db,
                             double median_passage, double dt, std::uint64_t seed, int n_seeds);
double median_first_passage(const ModulatorChannel &channel, double sigma, double correlation_time,
                            double threshold_db, double horizon, double dt, std::uint64_t seed, int n_seeds);

struct PulseNoiseSummary
{
    double area_std = 0.0;  // mean over seeds
    double block_std = 0.0; // mean over seeds of the mean block std
};

// Pulse-noise experiment for seeds cfg.seed .. cfg.seed + n_seeds - 1, in seed order.
std::vector<PulseStats> pulse_noise_runs(const ExperimentConfig &cfg, const ActuatorResponse &response, int n_seeds);
PulseNoiseSummary pulse_noise_summary(const ExperimentConfig &cfg, const ActuatorResponse &response, int n_seeds);

} // namespace mzisim::harness
