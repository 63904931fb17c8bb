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

#include "mzisim/harness/config.hpp"

#include <cmath>
#include <set>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "mzisim/error.hpp"
#include "mzisim/io.hpp"

namespace mzisim::harness
{

namespace
{

// Reads one JSON object, remembering which keys were consumed so leftovers can be rejected.
class Reader
{
public:
    Reader(const json &j, std::string path) : j_(j), path_(std::move(path))
    {
        if (!j_.is_object())
            fail(Errc::config, "'" + where() + "' must be an object");
    }

    bool has(const std::string &key) const { return j_.contains(key); }

    double number(const std::string &key, double def)
    {
        const json *v = take(key);
        if (v == nullptr)
            return def;
        if (!v->is_number())
            fail(Errc::config, "'" + at(key) + "' must be a number");
        return v->get<double>();
    }

    std::optional<double> optional_number(const std::string &key, std::optional<double> def)
    {
        const json *v = take(key);
        if (v == nullptr)
            return def;
        if (v->is_null())
            return std::nullopt;
        if (!v->is_number())
            fail(Errc::config, "'" + at(key) + "' must be a number or null");
        return v->get<double>();
    }

    int integer(const std::string &key, int def)
    {
        const json *v = take(key);
        if (v == nullptr)
            return def;
        if (!v->is_number_integer())
            fail(Errc::config, "'" + at(key) + "' must be an integer");
        return v->get<int>();
    }

    std::uint64_t unsigned_integer(const std::string &key, std::uint64_t def)
    {
        const json *v = take(key);
        if (v == nullptr)
            return def;
        if (!v->is_number_unsigned())
            fail(Errc::config, "'" + at(key) + "' must be a non-negative integer");
        return v->get<std::uint64_t>();
    }

    bool boolean(const std::string &key, bool def)
    {
        const json *v = take(key);
        if (v == nullptr)
            return def;
        if (!v->is_boolean())
            fail(Errc::config, "'" + at(key) + "' must be true or false");
        return v->get<bool>();
    }

    std::string string(const std::string &key, const std::string &def)
    {
        const json *v = take(key);
        if (v == nullptr)
            return def;
        if (!v->is_string())
            fail(Errc::config, "'" + at(key) + "' must be a string");
        return v->get<std::string>();
    }

    std::vector<double> numbers(const std::string &key)
    {
        const json *v = take(key);
        if (v == nullptr)
            return {};
        if (!v->is_array())
            fail(Errc::config, "'" + at(key) + "' must be an array of numbers");
        std::vector<double> out;
        for (const auto &e : *v)
        {
            if (!e.is_number())
                fail(Errc::config, "'" + at(key) + "' must be an array of numbers");
            out.push_back(e.get<double>());
        }
        return out;
    }

    Reader section(const std::string &key)
    {
        const json *v = take(key);
        return Reader(v == nullptr ? empty_ : *v, at(key));
    }

    const json *raw(const std::string &key) { return take(key); }

    void finish() const
    {
        for (const auto &[k, v] : j_.items())
            if (!used_.count(k))
                fail(Errc::config, "unknown key '" + at(k) + "'");
    }

    std::string at(const std::string &key) const { return path_.empty() ? key : path_ + "." + key; }

private:
    const json *take(const std::string &key)
    {
        used_.insert(key);
        auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    std::string where() const { return path_.empty() ? "<root>" : path_; }

    inline static const json empty_ = json::object();
    const json &j_;
    std::string path_;
    std::set<std::string> used_;
};

json opt(std::optional<double> v) { return v ? json(*v) : json(nullptr); }

template <class E, class F>
E enum_value(Reader &r, const std::string &key, E def, F &&from_string)
{
    const std::string s = r.string(key, "");
    if (s.empty())
        return def;
    try
    {
        return from_string(s);
    }
    catch (const Error &e)
    {
        fail(Errc::config, "'" + r.at(key) + "': " + e.what());
    }
}

} // namespace

void ExperimentConfig::validate() const
{
    auto check = [](bool ok, const std::string &msg) {
        if (!ok)
            fail(Errc::config, msg);
    };
    // component validators report their own codes; surface them as config errors
    auto nested = [](const std::string &where, const auto &fn) {
        try
        {
            fn();
        }
        catch (const Error &e)
        {
            fail(Errc::config, where + ": " + e.what());
        }
    };
    check(schema_version == 1, "unsupported schema_version");
    check(wavelength_from_nm(wavelength_nm).has_value(), "wavelength_nm must be 420, 795 or 1013");
    check(!output_dir.empty(), "output_dir must not be empty");
    check(chip.n_channels >= 1, "chip.n_channels must be >= 1");
    check(chip.n_stages >= 1, "chip.n_stages must be >= 1");
    check(chip.v_pi_volts > 0.0, "chip.v_pi_volts must be > 0");
    check(chip.insertion_loss_db >= 0.0, "chip.insertion_loss_db must be >= 0");
    check(chip.propagation_loss_db_per_cm >= 0.0 && chip.path_length_cm >= 0.0, "chip losses must be >= 0");
    check(chip.coupling_loss_db >= 0.0, "chip.coupling_loss_db must be >= 0");
    check(chip.coupler_imbalance.empty() ||
              chip.coupler_imbalance.size() == static_cast<std::size_t>(chip.n_channels),
          "chip.coupler_imbalance must be empty or hold one value per channel");
    for (double e : chip.coupler_imbalance)
        check(e >= 0.0 && e < 0.5, "chip.coupler_imbalance entries must lie in [0, 0.5)");
    check(sweep.n_points >= 3 && sweep.v_start_over_v_pi < sweep.v_stop_over_v_pi, "invalid sweep range");
    check(detector.additive_noise_sigma_linear >= 0.0, "detector noise must be >= 0");
    check(actuator.optical_rise_time_s > 0.0 && actuator.sample_period_s > 0.0, "actuator times must be > 0");
    check(actuator.damping_ratio > 0.0, "actuator.damping_ratio must be > 0");
    check(actuator.kind != KernelKind::custom, "actuator.kind must be first_order or second_order");
    check(switching.settle_window_s > 0.0, "switching.settle_window_s must be > 0");
    check(switching.lead_in_s > 0.0 && switching.edge_time_s >= 0.0 && switching.tail_s >= 0.0,
          "invalid switching timing");
    check(switching.extinction_target_linear > 0.0 && switching.extinction_target_linear < 1.0,
          "switching.extinction_target_linear must lie in (0, 1)");
    check(switching.regularization >= 0.0, "switching.regularization must be >= 0");
    check(switching.v_max_over_v_pi > 0.0, "switching.v_max_over_v_pi must be > 0");
    check(switching.max_iterations >= 0, "switching.max_iterations must be >= 0");
    check(pulse_train.n_pulses >= 0, "pulse_train.n_pulses must be >= 0");
    nested("pulse_train", [&] { build_pulse_spec(*this).validate(); });
    nested("noise", [&] { build_noise(*this, seed).validate(); });
    nested("lock", [&] { build_controller(*this).validate(); });
    check(lock.duration_s > 0.0 && lock.er_cadence_s > 0.0 && lock.time_compression > 0.0, "invalid lock timing");
    check(lock.channel >= 0 && lock.channel < chip.n_channels, "lock.channel out of range");
    check(stability.n_seeds >= 1 && stability.pulses_per_block >= 2 && stability.histogram_bins >= 1,
          "invalid stability settings");
    check(stability.run_duration_s >= 0.0 && stability.block_duration_s > 0.0, "invalid stability timing");
    check(crosstalk.nn_before_db <= 0.0 && crosstalk.nn_after_db <= 0.0 && crosstalk.nnn_db <= 0.0,
          "crosstalk couplings must be <= 0 dB");
    nested("beams", [&] { build_beams(*this).validate(); });
    nested("beams.active", [&] { (void)parse_active_pattern(beams.active, build_beams(*this).n_beams); });
    check(beams.profile_samples >= 2, "beams.profile_samples must be >= 2");
    check(targets.er_db.empty() || targets.er_db.size() == static_cast<std::size_t>(chip.n_channels),
          "targets.er_db must be empty or hold one value per channel");
    check(targets.calibration_seeds >= 1 && targets.drift_calibration_seeds >= 1, "calibration seed counts must be >= 1");
    for (const auto &[name, t] : acceptance)
        check(t.min.has_value() || t.max.has_value(), "acceptance." + name + " needs min or max");
}

ExperimentConfig parse_config(const json &j)
{
    ExperimentConfig c;
    Reader r(j, "");
    c.schema_version = r.integer("schema_version", c.schema_version);
    c.wavelength_nm = r.integer("wavelength_nm", c.wavelength_nm);
    c.seed = r.unsigned_integer("seed", c.seed);
    c.output_dir = r.string("output_dir", c.output_dir);

    if (const auto wl = wavelength_from_nm(c.wavelength_nm))
        c.chip.propagation_loss_db_per_cm = propagation_loss_db_per_cm(*wl);

    {
        auto s = r.section("chip");
        auto &x = c.chip;
        x.n_channels = s.integer("n_channels", x.n_channels);
        x.n_stages = s.integer("n_stages", x.n_stages);
        x.v_pi_volts = s.number("v_pi_volts", x.v_pi_volts);
        x.insertion_loss_db = s.number("insertion_loss_db", x.insertion_loss_db);
        x.propagation_loss_db_per_cm = s.number("propagation_loss_db_per_cm", x.propagation_loss_db_per_cm);
        x.path_length_cm = s.number("path_length_cm", x.path_length_cm);
        x.coupling_loss_db = s.number("coupling_loss_db", x.coupling_loss_db);
        x.coupler_imbalance = s.numbers("coupler_imbalance");
        s.finish();
    }
    {
        auto s = r.section("sweep");
        auto &x = c.sweep;
        x.v_start_over_v_pi = s.number("v_start_over_v_pi", x.v_start_over_v_pi);
        x.v_stop_over_v_pi = s.number("v_stop_over_v_pi", x.v_stop_over_v_pi);
        x.n_points = s.integer("n_points", x.n_points);
        s.finish();
    }
    {
        auto s = r.section("detector");
        auto &x = c.detector;
        x.floor_db = s.optional_number("floor_db", x.floor_db);
        x.additive_noise_sigma_linear = s.number("additive_noise_sigma_linear", x.additive_noise_sigma_linear);
        s.finish();
    }
    {
        auto s = r.section("actuator");
        auto &x = c.actuator;
        x.kind = enum_value(s, "kind", x.kind, kernel_kind_from_string);
        x.optical_rise_time_s = s.number("optical_rise_time_s", x.optical_rise_time_s);
        x.damping_ratio = s.number("damping_ratio", x.damping_ratio);
        x.sample_period_s = s.number("sample_period_s", x.sample_period_s);
        s.finish();
    }
    {
        auto s = r.section("switching");
        auto &x = c.switching;
        x.lead_in_s = s.number("lead_in_s", x.lead_in_s);
        x.edge_time_s = s.number("edge_time_s", x.edge_time_s);
        x.settle_window_s = s.number("settle_window_s", x.settle_window_s);
        x.tail_s = s.number("tail_s", x.tail_s);
        x.extinction_target_linear = s.number("extinction_target_linear", x.extinction_target_linear);
        x.regularization = s.number("regularization", x.regularization);
        x.v_max_over_v_pi = s.number("v_max_over_v_pi", x.v_max_over_v_pi);
        x.max_iterations = s.integer("max_iterations", x.max_iterations);
        s.finish();
    }
    {
        auto s = r.section("pulse_train");
        auto &x = c.pulse_train;
        x.on_duration_s = s.number("on_duration_s", x.on_duration_s);
        x.period_s = s.number("period_s", x.period_s);
        x.edge_shape = enum_value(s, "edge_shape", x.edge_shape, edge_shape_from_string);
        x.edge_time_s = s.number("edge_time_s", x.edge_time_s);
        x.n_pulses = s.integer("n_pulses", x.n_pulses);
        s.finish();
    }
    {
        auto s = r.section("noise");
        auto &x = c.noise;
        x.bias_drift_sigma_rad = s.number("bias_drift_sigma_rad", x.bias_drift_sigma_rad);
        x.bias_drift_correlation_time_s = s.number("bias_drift_correlation_time_s", x.bias_drift_correlation_time_s);
        x.amplitude_jitter_sigma = s.number("amplitude_jitter_sigma", x.amplitude_jitter_sigma);
        x.amplitude_slow_sigma = s.number("amplitude_slow_sigma", x.amplitude_slow_sigma);
        x.amplitude_slow_correlation_time_s =
            s.number("amplitude_slow_correlation_time_s", x.amplitude_slow_correlation_time_s);
        x.v_pi_drift_sigma = s.number("v_pi_drift_sigma", x.v_pi_drift_sigma);
        x.v_pi_drift_correlation_time_s = s.number("v_pi_drift_correlation_time_s", x.v_pi_drift_correlation_time_s);
        s.finish();
    }
    {
        auto s = r.section("lock");
        auto &x = c.lock;
        x.update_rate_hz = s.number("update_rate_hz", x.update_rate_hz);
        x.dither_amplitude_rad = s.number("dither_amplitude_rad", x.dither_amplitude_rad);
        x.gain_p = s.number("gain_p", x.gain_p);
        x.gain_i = s.number("gain_i", x.gain_i);
        x.integrator_limit_rad = s.number("integrator_limit_rad", x.integrator_limit_rad);
        x.error_clamp_rad = s.number("error_clamp_rad", x.error_clamp_rad);
        x.duration_s = s.number("duration_s", x.duration_s);
        x.er_cadence_s = s.number("er_cadence_s", x.er_cadence_s);
        x.time_compression = s.number("time_compression", x.time_compression);
        x.channel = s.integer("channel", x.channel);
        x.detector_floor_db = s.optional_number("detector_floor_db", x.detector_floor_db);
        x.detector_noise_sigma_linear = s.number("detector_noise_sigma_linear", x.detector_noise_sigma_linear);
        s.finish();
    }
    {
        auto s = r.section("stability");
        auto &x = c.stability;
        x.n_seeds = s.integer("n_seeds", x.n_seeds);
        x.run_duration_s = s.number("run_duration_s", x.run_duration_s);
        x.block_duration_s = s.number("block_duration_s", x.block_duration_s);
        x.pulses_per_block = s.integer("pulses_per_block", x.pulses_per_block);
        x.lock_engaged = s.boolean("lock_engaged", x.lock_engaged);
        x.histogram_bins = s.integer("histogram_bins", x.histogram_bins);
        s.finish();
    }
    {
        auto s = r.section("crosstalk");
        auto &x = c.crosstalk;
        x.nn_before_db = s.number("nn_before_db", x.nn_before_db);
        x.nn_after_db = s.number("nn_after_db", x.nn_after_db);
        x.nnn_db = s.number("nnn_db", x.nnn_db);
        x.floor_db = s.number("floor_db", x.floor_db);
        s.finish();
    }
    {
        auto s = r.section("beams");
        auto &x = c.beams;
        x.pitch_d0 = s.number("pitch_d0", x.pitch_d0);
        x.waist_radius_d0 = s.number("waist_radius_d0", x.waist_radius_d0);
        x.nn_leak_db = s.number("nn_leak_db", x.nn_leak_db);
        x.nnn_leak_db = s.number("nnn_leak_db", x.nnn_leak_db);
        x.leak_phase_rad = s.number("leak_phase_rad", x.leak_phase_rad);
        x.floor_db = s.number("floor_db", x.floor_db);
        x.profile_samples = s.integer("profile_samples", x.profile_samples);
        x.summation = enum_value(s, "summation", x.summation, summation_from_string);
        x.active = s.string("active", x.active);
        s.finish();
    }
    {
        auto s = r.section("targets");
        auto &x = c.targets;
        x.er_db = s.numbers("er_db");
        x.area_std = s.optional_number("area_std", x.area_std);
        x.block_std = s.optional_number("block_std", x.block_std);
        x.locked_er_mean_db = s.optional_number("locked_er_mean_db", x.locked_er_mean_db);
        x.unlocked_threshold_db = s.number("unlocked_threshold_db", x.unlocked_threshold_db);
        x.unlocked_median_passage_s = s.optional_number("unlocked_median_passage_s", x.unlocked_median_passage_s);
        x.scenario_c_db = s.optional_number("scenario_c_db", x.scenario_c_db);
        x.scenario_c_tolerance_db = s.number("scenario_c_tolerance_db", x.scenario_c_tolerance_db);
        x.calibration_seeds = s.integer("calibration_seeds", x.calibration_seeds);
        x.drift_calibration_seeds = s.integer("drift_calibration_seeds", x.drift_calibration_seeds);
        s.finish();
    }
    if (const json *cal = r.raw("calibration"))
    {
        if (!cal->is_object())
            fail(Errc::config, "'calibration' must be an object");
        c.calibration = *cal;
    }
    if (const json *acc = r.raw("acceptance"))
    {
        Reader a(*acc, "acceptance");
        for (const auto &[name, entry] : acc->items())
        {
            auto s = a.section(name);
            Threshold t;
            t.min = s.optional_number("min", std::nullopt);
            t.max = s.optional_number("max", std::nullopt);
            const std::string expect = s.string("expect", "pass");
            if (expect != "pass" && expect != "fail")
                fail(Errc::config, "'acceptance." + name + ".expect' must be \"pass\" or \"fail\"");
            t.expect_fail = expect == "fail";
            s.finish();
            c.acceptance[name] = t;
        }
        a.finish();
    }
    r.finish();
    c.validate();
    return c;
}

ExperimentConfig load_config(const std::filesystem::path &path)
{
    std::string text;
    try
    {
        text = io::read_text(path);
    }
    catch (const Error &e)
    {
        fail(Errc::config, e.what());
    }
    json j;
    try
    {
        j = json::parse(text);
    }
    catch (const json::parse_error &e)
    {
        fail(Errc::config, "'" + path.string() + "' is not valid JSON: " + e.what());
    }
    return parse_config(j);
}

json to_json(const ExperimentConfig &c)
{
    json j;
    j["schema_version"] = c.schema_version;
    j["wavelength_nm"] = c.wavelength_nm;
    j["seed"] = c.seed;
    j["output_dir"] = c.output_dir;
    j["chip"] = {
        {"n_channels", c.chip.n_channels},
        {"n_stages", c.chip.n_stages},
        {"v_pi_volts", c.chip.v_pi_volts},
        {"insertion_loss_db", c.chip.insertion_loss_db},
        {"propagation_loss_db_per_cm", c.chip.propagation_loss_db_per_cm},
        {"path_length_cm", c.chip.path_length_cm},
        {"coupling_loss_db", c.chip.coupling_loss_db},
        {"coupler_imbalance", c.chip.coupler_imbalance},
    };
    j["sweep"] = {
        {"v_start_over_v_pi", c.sweep.v_start_over_v_pi},
        {"v_stop_over_v_pi", c.sweep.v_stop_over_v_pi},
        {"n_points", c.sweep.n_points},
    };
    j["detector"] = {
        {"floor_db", opt(c.detector.floor_db)},
        {"additive_noise_sigma_linear", c.detector.additive_noise_sigma_linear},
    };
    j["actuator"] = {
        {"kind", std::string(to_string(c.actuator.kind))},
        {"optical_rise_time_s", c.actuator.optical_rise_time_s},
        {"damping_ratio", c.actuator.damping_ratio},
        {"sample_period_s", c.actuator.sample_period_s},
    };
    j["switching"] = {
        {"lead_in_s", c.switching.lead_in_s},
        {"edge_time_s", c.switching.edge_time_s},
        {"settle_window_s", c.switching.settle_window_s},
        {"tail_s", c.switching.tail_s},
        {"extinction_target_linear", c.switching.extinction_target_linear},
        {"regularization", c.switching.regularization},
        {"v_max_over_v_pi", c.switching.v_max_over_v_pi},
        {"max_iterations", c.switching.max_iterations},
    };
    j["pulse_train"] = {
        {"on_duration_s", c.pulse_train.on_duration_s},
        {"period_s", c.pulse_train.period_s},
        {"edge_shape", std::string(to_string(c.pulse_train.edge_shape))},
        {"edge_time_s", c.pulse_train.edge_time_s},
        {"n_pulses", c.pulse_train.n_pulses},
    };
    j["noise"] = {
        {"bias_drift_sigma_rad", c.noise.bias_drift_sigma_rad},
        {"bias_drift_correlation_time_s", c.noise.bias_drift_correlation_time_s},
        {"amplitude_jitter_sigma", c.noise.amplitude_jitter_sigma},
        {"amplitude_slow_sigma", c.noise.amplitude_slow_sigma},
        {"amplitude_slow_correlation_time_s", c.noise.amplitude_slow_correlation_time_s},
        {"v_pi_drift_sigma", c.noise.v_pi_drift_sigma},
        {"v_pi_drift_correlation_time_s", c.noise.v_pi_drift_correlation_time_s},
    };
    j["lock"] = {
        {"update_rate_hz", c.lock.update_rate_hz},
        {"dither_amplitude_rad", c.lock.dither_amplitude_rad},
        {"gain_p", c.lock.gain_p},
        {"gain_i", c.lock.gain_i},
        {"integrator_limit_rad", c.lock.integrator_limit_rad},
        {"error_clamp_rad", c.lock.error_clamp_rad},
        {"duration_s", c.lock.duration_s},
        {"er_cadence_s", c.lock.er_cadence_s},
        {"time_compression", c.lock.time_compression},
        {"channel", c.lock.channel},
        {"detector_floor_db", opt(c.lock.detector_floor_db)},
        {"detector_noise_sigma_linear", c.lock.detector_noise_sigma_linear},
    };
    j["stability"] = {
        {"n_seeds", c.stability.n_seeds},
        {"run_duration_s", c.stability.run_duration_s},
        {"block_duration_s", c.stability.block_duration_s},
        {"pulses_per_block", c.stability.pulses_per_block},
        {"lock_engaged", c.stability.lock_engaged},
        {"histogram_bins", c.stability.histogram_bins},
    };
    j["crosstalk"] = {
        {"nn_before_db", c.crosstalk.nn_before_db},
        {"nn_after_db", c.crosstalk.nn_after_db},
        {"nnn_db", c.crosstalk.nnn_db},
        {"floor_db", c.crosstalk.floor_db},
    };
    j["beams"] = {
        {"pitch_d0", c.beams.pitch_d0},
        {"waist_radius_d0", c.beams.waist_radius_d0},
        {"nn_leak_db", c.beams.nn_leak_db},
        {"nnn_leak_db", c.beams.nnn_leak_db},
        {"leak_phase_rad", c.beams.leak_phase_rad},
        {"floor_db", c.beams.floor_db},
        {"profile_samples", c.beams.profile_samples},
        {"summation", std::string(to_string(c.beams.summation))},
        {"active", c.beams.active},
    };
    j["targets"] = {
        {"er_db", c.targets.er_db},
        {"area_std", opt(c.targets.area_std)},
        {"block_std", opt(c.targets.block_std)},
        {"locked_er_mean_db", opt(c.targets.locked_er_mean_db)},
        {"unlocked_threshold_db", c.targets.unlocked_threshold_db},
        {"unlocked_median_passage_s", opt(c.targets.unlocked_median_passage_s)},
        {"scenario_c_db", opt(c.targets.scenario_c_db)},
        {"scenario_c_tolerance_db", c.targets.scenario_c_tolerance_db},
        {"calibration_seeds", c.targets.calibration_seeds},
        {"drift_calibration_seeds", c.targets.drift_calibration_seeds},
    };
    j["calibration"] = c.calibration;
    json acc = json::object();
    for (const auto &[name, t] : c.acceptance)
        acc[name] = {{"min", opt(t.min)}, {"max", opt(t.max)}, {"expect", t.expect_fail ? "fail" : "pass"}};
    j["acceptance"] = acc;
    return j;
}

std::string serialize(const ExperimentConfig &cfg) { return to_json(cfg).dump(2) + "\n"; }

std::string sha256_hex(const std::string &data)
{
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_MD_CTX *ctx = EVP_MD_CTX_new();
    require(ctx != nullptr, Errc::io, "cannot allocate digest context");
    const bool ok = EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) == 1 &&
                    EVP_DigestUpdate(ctx, data.data(), data.size()) == 1 && EVP_DigestFinal_ex(ctx, md, &len) == 1;
    EVP_MD_CTX_free(ctx);
    require(ok, Errc::io, "SHA-256 failed");
    std::string hex;
    for (unsigned int i = 0; i < len; ++i)
        hex += fmt::format("{:02x}", md[i]);
    return hex;
}

std::string config_hash(const ExperimentConfig &cfg)
{
    auto c = cfg;
    c.output_dir = "-";
    return sha256_hex(serialize(c));
}

std::vector<ModulatorChannel> build_channels(const ExperimentConfig &cfg)
{
    std::vector<ModulatorChannel> out;
    for (int i = 0; i < cfg.chip.n_channels; ++i)
    {
        const double eps = cfg.chip.coupler_imbalance.empty() ? 0.0 : cfg.chip.coupler_imbalance[i];
        out.push_back(ModulatorChannel::uniform(static_cast<std::size_t>(cfg.chip.n_stages), 0.5 + eps,
                                                cfg.chip.v_pi_volts, cfg.chip.insertion_loss_db, i));
    }
    return out;
}

ChipConfig build_chip(const ExperimentConfig &cfg)
{
    ChipConfig chip;
    chip.channels = build_channels(cfg);
    chip.wavelength = *wavelength_from_nm(cfg.wavelength_nm);
    chip.propagation_loss_db_per_cm = cfg.chip.propagation_loss_db_per_cm;
    chip.path_length_cm = cfg.chip.path_length_cm;
    chip.coupling_loss_db = cfg.chip.coupling_loss_db;
    return chip;
}

DetectorModel build_detector(const ExperimentConfig &cfg)
{
    return DetectorModel::from_floor_db(cfg.detector.floor_db.value_or(-INFINITY),
                                        cfg.detector.additive_noise_sigma_linear);
}

DetectorModel build_lock_detector(const ExperimentConfig &cfg)
{
    return DetectorModel::from_floor_db(cfg.lock.detector_floor_db.value_or(-INFINITY),
                                        cfg.lock.detector_noise_sigma_linear);
}

NoiseModel build_noise(const ExperimentConfig &cfg, std::uint64_t seed)
{
    NoiseModel n;
    n.bias_drift = {cfg.noise.bias_drift_sigma_rad, cfg.noise.bias_drift_correlation_time_s};
    n.amplitude_jitter_sigma = cfg.noise.amplitude_jitter_sigma;
    n.amplitude_slow = {cfg.noise.amplitude_slow_sigma, cfg.noise.amplitude_slow_correlation_time_s};
    n.v_pi_drift = {cfg.noise.v_pi_drift_sigma, cfg.noise.v_pi_drift_correlation_time_s};
    n.seed = seed;
    return n;
}

LockController build_controller(const ExperimentConfig &cfg)
{
    LockController c;
    c.update_rate = cfg.lock.update_rate_hz;
    c.dither_amplitude = cfg.lock.dither_amplitude_rad;
    c.gain_p = cfg.lock.gain_p;
    c.gain_i = cfg.lock.gain_i;
    c.integrator_limit = cfg.lock.integrator_limit_rad;
    c.error_clamp = cfg.lock.error_clamp_rad;
    return c;
}

CrosstalkGraph build_crosstalk(const ExperimentConfig &cfg)
{
    return CrosstalkGraph::nearest_neighbour(static_cast<std::size_t>(cfg.chip.n_channels), cfg.crosstalk.nn_before_db,
                                             cfg.crosstalk.nn_after_db, cfg.crosstalk.nnn_db);
}

BeamArray build_beams(const ExperimentConfig &cfg)
{
    BeamArray b;
    b.n_beams = static_cast<std::size_t>(std::max(cfg.chip.n_channels, 1));
    b.pitch = cfg.beams.pitch_d0;
    b.waist_radius = cfg.beams.waist_radius_d0;
    b.nn_leak_db = cfg.beams.nn_leak_db;
    b.nnn_leak_db = cfg.beams.nnn_leak_db;
    b.leak_phase = cfg.beams.leak_phase_rad;
    b.measurement_floor_db = cfg.beams.floor_db;
    return b;
}

PulseSpec build_pulse_spec(const ExperimentConfig &cfg)
{
    PulseSpec s;
    s.on_level = cfg.chip.v_pi_volts;
    s.off_level = 0.0;
    s.on_duration = cfg.pulse_train.on_duration_s;
    s.period = cfg.pulse_train.period_s;
    s.edge_shape = cfg.pulse_train.edge_shape;
    s.edge_time = cfg.pulse_train.edge_time_s;
    return s;
}

ActuatorResponse build_actuator(const ExperimentConfig &cfg, std::optional<KernelKind> kind,
                                std::optional<double> damping)
{
    const auto channels = build_channels(cfg);
    return calibrate_optical_rise(channels.front(), kind.value_or(cfg.actuator.kind),
                                  cfg.actuator.optical_rise_time_s, damping.value_or(cfg.actuator.damping_ratio),
                                  cfg.actuator.sample_period_s);
}

} // namespace mzisim::harness
