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

// Experiment configuration: a strict JSON schema with units in the key names.
// Unknown keys anywhere in the file are rejected with the offending key path.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mzisim/beams.hpp"
#include "mzisim/crosstalk.hpp"
#include "mzisim/dynamics.hpp"
#include "mzisim/lock.hpp"
#include "mzisim/photonic_core.hpp"
#include "mzisim/stochastics.hpp"
#include "mzisim/waveform_synth.hpp"

namespace mzisim::harness
{

using nlohmann::json;

// Acceptance band for one reported metric. expect_fail marks a baseline that should miss the band.
struct Threshold
{
    std::optional<double> min;
    std::optional<double> max;
    bool expect_fail = false;
};

struct ExperimentConfig
{
    int schema_version = 1;
    int wavelength_nm = 795;
    std::uint64_t seed = 1;
    std::string output_dir = "out";

    struct Chip
    {
        int n_channels = 8;
        int n_stages = 2;
        double v_pi_volts = 74.7;
        double insertion_loss_db = 3.0;
        double propagation_loss_db_per_cm = 1.5;
        double path_length_cm = 1.0;
        double coupling_loss_db = 3.0;
        std::vector<double> coupler_imbalance; // |split - 0.5| per channel; empty means ideal
    } chip;

    struct Sweep
    {
        double v_start_over_v_pi = -1.0;
        double v_stop_over_v_pi = 1.0;
        int n_points = 2001;
    } sweep;

    struct Detector
    {
        std::optional<double> floor_db = -80.0; // null: no floor
        double additive_noise_sigma_linear = 0.0;
    } detector;

    struct Actuator
    {
        KernelKind kind = KernelKind::first_order;
        double optical_rise_time_s = 26e-9;
        double damping_ratio = 1.0;
        double sample_period_s = 1e-9;
    } actuator;

    struct Switching
    {
        double lead_in_s = 200e-9;
        double edge_time_s = 60e-9;
        double settle_window_s = 1e-6;
        double tail_s = 0.0;
        double extinction_target_linear = 1e-6;
        double regularization = 1e-4;
        double v_max_over_v_pi = 2.0;
        int max_iterations = 200;
    } switching;

    struct PulseTrain
    {
        double on_duration_s = 500e-9;
        double period_s = 1e-6;
        EdgeShape edge_shape = EdgeShape::square;
        double edge_time_s = 0.0;
        int n_pulses = 1000;
    } pulse_train;

    struct Noise
    {
        double bias_drift_sigma_rad = 0.0;
        double bias_drift_correlation_time_s = 86400.0;
        double amplitude_jitter_sigma = 0.0;
        double amplitude_slow_sigma = 0.0;
        double amplitude_slow_correlation_time_s = 1.0;
        double v_pi_drift_sigma = 0.0;
        double v_pi_drift_correlation_time_s = 3600.0;
    } noise;

    struct Lock
    {
        double update_rate_hz = 5.0;
        double dither_amplitude_rad = 1e-3;
        double gain_p = 0.0;
        double gain_i = 0.5;
        double integrator_limit_rad = 3.0;
        double error_clamp_rad = 0.5;
        double duration_s = 72000.0;
        double er_cadence_s = 60.0;
        double time_compression = 3600.0;
        int channel = 0;
        std::optional<double> detector_floor_db = -80.0;
        double detector_noise_sigma_linear = 0.0;
    } lock;

    struct Stability
    {
        int n_seeds = 20;
        double run_duration_s = 500.0;
        double block_duration_s = 5.0;
        int pulses_per_block = 1000;
        bool lock_engaged = true;
        int histogram_bins = 41;
    } stability;

    struct Crosstalk
    {
        double nn_before_db = -45.3;
        double nn_after_db = -76.2;
        double nnn_db = -90.0;
        double floor_db = -80.0;
    } crosstalk;

    struct Beams
    {
        double pitch_d0 = 4.33;
        double waist_radius_d0 = 0.5;
        double nn_leak_db = -50.8;
        double nnn_leak_db = -90.0;
        double leak_phase_rad = 0.0;
        double floor_db = -65.0;
        int profile_samples = 2001;
        Summation summation = Summation::coherent;
        std::string active = "single:0";
    } beams;

    // Inputs to the calibration workflow.
    struct Targets
    {
        std::vector<double> er_db; // per channel, true (pre-detector) static ER
        std::optional<double> area_std;
        std::optional<double> block_std;
        std::optional<double> locked_er_mean_db;
        double unlocked_threshold_db = 50.0;
        std::optional<double> unlocked_median_passage_s;
        std::optional<double> scenario_c_db;
        double scenario_c_tolerance_db = 3.0;
        int calibration_seeds = 20;
        int drift_calibration_seeds = 64;
    } targets;

    // Achieved calibration metrics, written by the calibrate command.
    json calibration = json::object();

    std::map<std::string, Threshold> acceptance;

    void validate() const;
};

ExperimentConfig parse_config(const json &j);
ExperimentConfig load_config(const std::filesystem::path &path);
json to_json(const ExperimentConfig &cfg);
std::string serialize(const ExperimentConfig &cfg); // canonical text, sorted keys, trailing newline

// SHA-256 of the canonical serialisation with output_dir blanked, lower-case hex.
std::string config_hash(const ExperimentConfig &cfg);
std::string sha256_hex(const std::string &data);

// Model objects built from a validated config.
std::vector<ModulatorChannel> build_channels(const ExperimentConfig &cfg);
ChipConfig build_chip(const ExperimentConfig &cfg);
DetectorModel build_detector(const ExperimentConfig &cfg);
DetectorModel build_lock_detector(const ExperimentConfig &cfg);
NoiseModel build_noise(const ExperimentConfig &cfg, std::uint64_t seed);
LockController build_controller(const ExperimentConfig &cfg);
CrosstalkGraph build_crosstalk(const ExperimentConfig &cfg);
BeamArray build_beams(const ExperimentConfig &cfg);
PulseSpec build_pulse_spec(const ExperimentConfig &cfg);

// Actuator calibrated so the optical rise on channel 0 matches the configured value.
ActuatorResponse build_actuator(const ExperimentConfig &cfg, std::optional<KernelKind> kind = std::nullopt,
                                std::optional<double> damping = std::nullopt);

} // namespace mzisim::harness
