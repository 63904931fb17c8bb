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

#include "mzisim/waveform_synth.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>

#include "mzisim/error.hpp"

namespace mzisim
{

namespace
{

using std::numbers::pi;

std::size_t samples_in(double duration, double dt, const char *what)
{
    const double n = duration / dt;
    const double r = std::round(n);
    require(std::abs(n - r) <= 1e-6 * std::max(1.0, r), Errc::grid_violation,
            std::string(what) + " is not an integer number of samples");
    return static_cast<std::size_t>(r);
}

// Phase model with a steady prehistory: phi = p0 + k * (u - p0).
std::vector<double> forward_phase(const std::vector<double> &u, std::span<const double> k, double p0)
{
    std::vector<double> dev(u.size());
    for (std::size_t i = 0; i < u.size(); ++i)
        dev[i] = u[i] - p0;
    auto y = kernels::convolve(dev, k);
    for (auto &v : y)
        v += p0;
    return y;
}

// Stage 1 in phase units. Deconvolves the increments so the padded transform sees a
// compactly supported signal, then integrates.
std::vector<double> deconvolve_phase(std::span<const double> target, std::span<const double> k, double lambda)
{
    const std::size_t n = target.size();
    std::vector<double> u(n);
    if (n == 0)
        return u;
    const double p0 = target[0];

    std::vector<double> d(n, 0.0);
    for (std::size_t i = 1; i < n; ++i)
        d[i] = target[i] - target[i - 1];

    std::vector<double> du;
    if (k.size() == 1)
    {
        du.resize(n);
        for (std::size_t i = 0; i < n; ++i)
            du[i] = d[i] / k[0];
    }
    else
    {
        const std::size_t nfft = kernels::next_pow2(n + k.size());
        const auto dspec = kernels::fft_forward(d, nfft);
        const auto kspec = kernels::fft_forward(k, nfft);
        double kmax = 0.0, kmin = std::numeric_limits<double>::infinity();
        for (const auto &c : kspec)
        {
            kmax = std::max(kmax, std::norm(c));
            kmin = std::min(kmin, std::norm(c));
        }
        // A flat spectrum needs no regularisation; the weight vanishes with the spectral spread.
        const double lam = kmax > 0.0 ? lambda * kmax * (1.0 - kmin / kmax) : 0.0;
        std::vector<std::complex<double>> uspec(nfft);
        for (std::size_t i = 0; i < nfft; ++i)
        {
            const double den = std::norm(kspec[i]) + lam;
            uspec[i] = den > 0.0 ? std::conj(kspec[i]) * dspec[i] / den : 0.0;
        }
        du = kernels::fft_inverse_real(uspec);
        du.resize(n);
    }

    u[0] = p0;
    for (std::size_t i = 1; i < n; ++i)
        u[i] = u[i - 1] + du[i];
    return u;
}

double sq_norm(const std::vector<double> &x)
{
    double s = 0.0;
    for (double v : x)
        s += v * v;
    return s;
}

} // namespace

std::string_view to_string(EdgeShape shape) { return shape == EdgeShape::square ? "square" : "raised_cosine"; }

EdgeShape edge_shape_from_string(std::string_view s)
{
    if (s == "square")
        return EdgeShape::square;
    if (s == "raised_cosine")
        return EdgeShape::raised_cosine;
    fail(Errc::invalid_argument, "unknown edge shape '" + std::string(s) + "'");
}

void PulseSpec::validate() const
{
    require(std::isfinite(on_level) && std::isfinite(off_level), Errc::invalid_argument, "pulse levels must be finite");
    require(on_duration > 0.0 && on_duration < period, Errc::invalid_argument, "need 0 < on_duration < period");
    require(edge_time >= 0.0 && edge_time < on_duration / 2.0, Errc::invalid_argument,
            "need 0 <= edge_time < on_duration / 2");
}

Waveform make_pulse_train(const PulseSpec &spec, std::size_t n_pulses, double sample_period)
{
    spec.validate();
    require(sample_period > 0.0, Errc::invalid_argument, "sample period must be > 0");
    const std::size_t per = samples_in(spec.period, sample_period, "period");
    require(per >= 1, Errc::grid_violation, "period shorter than one sample");
    const auto n_on = static_cast<std::size_t>(std::llround(spec.on_duration / sample_period));
    const auto n_edge = spec.edge_shape == EdgeShape::raised_cosine
                            ? static_cast<std::size_t>(std::llround(spec.edge_time / sample_period))
                            : std::size_t{0};

    std::vector<double> one(per, spec.off_level);
    const double swing = spec.on_level - spec.off_level;
    for (std::size_t i = 0; i < std::min(n_on, per); ++i)
    {
        double w = 1.0;
        if (n_edge > 0)
        {
            if (i < n_edge)
                w = 0.5 * (1.0 - std::cos(pi * (static_cast<double>(i) + 0.5) / static_cast<double>(n_edge)));
            else if (i + n_edge >= n_on)
                w = 0.5 * (1.0 - std::cos(pi * (static_cast<double>(n_on - i) - 0.5) / static_cast<double>(n_edge)));
        }
        one[i] = spec.off_level + swing * w;
    }

    Waveform w;
    w.sample_period = sample_period;
    w.samples.reserve(per * n_pulses);
    for (std::size_t p = 0; p < n_pulses; ++p)
        w.samples.insert(w.samples.end(), one.begin(), one.end());
    return w;
}

double phase_from_power(const ModulatorChannel &channel, double p)
{
    require(std::isfinite(p), Errc::invalid_argument, "target power must be finite");
    const double v_pi = channel.stages().front().mod_arm().v_pi();
    auto t_of = [&](double phi) { return channel_transmission_normalized(channel, phi * v_pi / pi); };
    const double t_lo = t_of(0.0);
    const double t_hi = t_of(pi);
    require(p >= t_lo - 1e-15 && p <= t_hi + 1e-12, Errc::unachievable_target,
            "target power outside the achievable range of the channel");
    if (p <= t_lo)
        return 0.0;
    if (p >= t_hi)
        return pi;
    double a = 0.0, b = pi;
    for (int it = 0; it < 200 && b - a > 4.0 * std::numeric_limits<double>::epsilon(); ++it)
    {
        const double m = 0.5 * (a + b);
        if (m <= a || m >= b)
            break;
        if (t_of(m) < p)
            a = m;
        else
            b = m;
    }
    return 0.5 * (a + b);
}

std::vector<double> target_phase_from_power(std::span<const double> target_power, const ModulatorChannel &channel)
{
    std::vector<double> out(target_power.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = phase_from_power(channel, target_power[i]);
    return out;
}

DynamicExtinction::Crossing DynamicExtinction::time_to(double threshold) const
{
    for (std::size_t i = 0; i < envelope.size(); ++i)
        if (envelope[i] <= threshold)
            return {sample_period * static_cast<double>(i), true};
    return {window(), false};
}

double DynamicExtinction::floor_at(double t) const
{
    if (envelope.empty())
        return 0.0;
    const auto i = static_cast<std::size_t>(std::max(0.0, std::round(t / sample_period)));
    return envelope[std::min(i, envelope.size() - 1)];
}

DynamicExtinction dynamic_extinction(const OpticalTrace &trace, double switch_time)
{
    require(trace.sample_period > 0.0, Errc::invalid_argument, "sample period must be > 0");
    const double idx = std::round(switch_time / trace.sample_period);
    require(switch_time > 0.0 && idx >= 1.0 && idx < static_cast<double>(trace.size()), Errc::out_of_range,
            "switch time outside the trace");
    const auto s = static_cast<std::size_t>(idx);
    DynamicExtinction d;
    d.sample_period = trace.sample_period;
    d.switch_index = s;
    d.on_level = trace.power[s - 1];
    require(d.on_level > 0.0, Errc::invalid_argument, "no light before the switch");
    d.envelope.resize(trace.size() - s);
    double run = 0.0;
    for (std::size_t i = trace.size(); i-- > s;)
    {
        run = std::max(run, trace.power[i] / d.on_level);
        d.envelope[i - s] = run;
    }
    return d;
}

void PredistortionProblem::validate() const
{
    require(!target_phase.empty(), Errc::invalid_argument, "empty target phase");
    for (double v : target_phase)
        require(std::isfinite(v), Errc::invalid_argument, "target phase must be finite");
    require(!response.impulse_kernel.empty(), Errc::invalid_argument, "response has no kernel");
    require(regularization >= 0.0, Errc::invalid_argument, "regularization must be >= 0");
    require(settle_window > 0.0, Errc::invalid_argument, "settle window must be > 0");
    require(extinction_target > 0.0 && extinction_target < 1.0, Errc::invalid_argument,
            "extinction target must lie in (0, 1)");
    require(switch_index >= 1 && switch_index < target_phase.size(), Errc::out_of_range,
            "switch index outside the target");
    require(max_iterations >= 0, Errc::invalid_argument, "iteration cap must be >= 0");
    require(v_max >= 0.0, Errc::invalid_argument, "v_max must be >= 0");
    double peak = 0.0;
    for (double v : target_phase)
        peak = std::max(peak, std::abs(v));
    require(effective_v_max() >= peak * v_pi() / pi, Errc::infeasible_v_max,
            "v_max is below the steady drive required by the target");
}

double PredistortionProblem::v_pi() const { return channel.stages().front().mod_arm().v_pi(); }

double PredistortionProblem::effective_v_max() const { return v_max > 0.0 ? v_max : 2.0 * v_pi(); }

std::vector<double> deconvolve_drive(const PredistortionProblem &problem)
{
    problem.validate();
    auto u = deconvolve_phase(problem.target_phase, problem.response.impulse_kernel, problem.regularization);
    const double scale = problem.v_pi() / pi;
    for (auto &v : u)
        v *= scale;
    return u;
}

SwitchMetrics evaluate_off_switch(const ModulatorChannel &channel, const ActuatorResponse &response,
                                  const Waveform &drive, std::size_t switch_index, double settle_window,
                                  double extinction_target)
{
    SwitchMetrics m;
    m.trace = trace_optical(channel, response, drive, Prehistory::hold_first);
    m.extinction = dynamic_extinction(m.trace, static_cast<double>(switch_index) * drive.sample_period);
    m.achieved_floor = m.extinction.floor_at(settle_window);
    const auto c = m.extinction.time_to(extinction_target);
    m.time_to_floor = c.time;
    m.floor_reached = c.reached && c.time <= settle_window * (1.0 + 1e-12);
    return m;
}

PredistortionSolution predistort(const PredistortionProblem &problem)
{
    problem.validate();
    const auto &k = problem.response.impulse_kernel;
    const auto &p = problem.target_phase;
    const std::size_t n = p.size();
    const double v_pi = problem.v_pi();
    const double v_max = problem.effective_v_max();
    const double u_max = v_max * pi / v_pi;
    const double p0 = p[0];

    auto to_drive = [&](const std::vector<double> &u) {
        Waveform w;
        w.sample_period = problem.response.sample_period;
        w.samples.resize(u.size());
        for (std::size_t i = 0; i < u.size(); ++i)
            w.samples[i] = std::clamp(u[i] * v_pi / pi, -v_max, v_max);
        return w;
    };
    // Verified residual: independent forward pass of the drive actually returned.
    auto verified_cost = [&](const Waveform &w) {
        const auto phi = apply_actuator(problem.response, w, v_pi, Prehistory::hold_first);
        double c = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            c += (phi[i] - p[i]) * (phi[i] - p[i]);
        return 0.5 * c;
    };
    auto verify = [&](const Waveform &w) {
        return evaluate_off_switch(problem.channel, problem.response, w, problem.switch_index,
                                   problem.settle_window, problem.extinction_target);
    };

    std::vector<double> u = deconvolve_phase(p, k, problem.regularization);
    for (auto &v : u)
        v = std::clamp(v, -u_max, u_max);
    u[0] = p0;

    PredistortionSolution sol;
    Waveform drive = to_drive(u);
    double cost = verified_cost(drive);
    sol.cost_history.push_back(cost);
    SwitchMetrics met = verify(drive);

    double mu = 1e-3;
    int iter = 0;
    std::vector<bool> free_var(n);
    while (!met.floor_reached && iter < problem.max_iterations && mu < 1e8)
    {
        ++iter;
        // gradient g = J^T r
        const auto phi = forward_phase(u, k, p0);
        std::vector<double> r(n);
        for (std::size_t i = 0; i < n; ++i)
            r[i] = phi[i] - p[i];
        const auto g = kernels::correlate(r, k);
        for (std::size_t i = 0; i < n; ++i)
        {
            const bool at_hi = u[i] >= u_max && g[i] < 0.0;
            const bool at_lo = u[i] <= -u_max && g[i] > 0.0;
            free_var[i] = i > 0 && !at_hi && !at_lo;
        }
        auto project = [&](std::vector<double> &x) {
            for (std::size_t i = 0; i < n; ++i)
                if (!free_var[i])
                    x[i] = 0.0;
        };
        auto normal_op = [&](std::vector<double> x) {
            project(x);
            auto jx = kernels::convolve(x, k);
            auto y = kernels::correlate(jx, k);
            for (std::size_t i = 0; i < n; ++i)
                y[i] += mu * x[i];
            project(y);
            return y;
        };

        // CG on (J^T J + mu I) d = -g over the free set
        std::vector<double> b(g);
        for (auto &v : b)
            v = -v;
        project(b);
        std::vector<double> d(n, 0.0), res(b), dir(b);
        double rr = sq_norm(res);
        const double stop = 1e-20 * std::max(rr, 1e-300);
        for (int cg = 0; cg < 100 && rr > stop; ++cg)
        {
            const auto ad = normal_op(dir);
            double dad = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                dad += dir[i] * ad[i];
            if (dad <= 0.0)
                break;
            const double alpha = rr / dad;
            for (std::size_t i = 0; i < n; ++i)
            {
                d[i] += alpha * dir[i];
                res[i] -= alpha * ad[i];
            }
            const double rr_new = sq_norm(res);
            const double beta = rr_new / rr;
            rr = rr_new;
            for (std::size_t i = 0; i < n; ++i)
                dir[i] = res[i] + beta * dir[i];
        }

        std::vector<double> trial(u);
        for (std::size_t i = 1; i < n; ++i)
            trial[i] = std::clamp(u[i] + d[i], -u_max, u_max);
        const Waveform trial_drive = to_drive(trial);
        const double trial_cost = verified_cost(trial_drive);
        if (trial_cost < cost)
        {
            u = std::move(trial);
            drive = trial_drive;
            cost = trial_cost;
            sol.cost_history.push_back(cost);
            met = verify(drive);
            mu = std::max(mu / 3.0, 1e-12);
        }
        else
        {
            mu *= 4.0;
        }
    }

    sol.drive = std::move(drive);
    sol.achieved_floor = met.achieved_floor;
    sol.time_to_floor = met.time_to_floor;
    sol.floor_reached = met.floor_reached;
    sol.iterations = iter;
    sol.converged = met.floor_reached;
    return sol;
}

OffSwitch make_off_switch(const OffSwitchSpec &spec, const ActuatorResponse &response, double v_pi)
{
    require(spec.sample_period > 0.0, Errc::invalid_argument, "sample period must be > 0");
    require(std::abs(spec.sample_period - response.sample_period) <= 1e-12 * spec.sample_period,
            Errc::grid_mismatch, "switch grid and kernel sample periods differ");
    require(spec.settle_window > 0.0, Errc::invalid_argument, "settle window must be > 0");
    require(spec.lead_in > 0.0 && spec.edge_time >= 0.0 && spec.tail >= 0.0, Errc::invalid_argument,
            "invalid switch timing");
    const double dt = spec.sample_period;
    const auto n_lead = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(spec.lead_in / dt)));
    const auto n_edge = static_cast<std::size_t>(std::llround(spec.edge_time / dt));
    const auto n_win = static_cast<std::size_t>(std::llround(spec.settle_window / dt));
    const std::size_t n_tail =
        spec.tail > 0.0 ? static_cast<std::size_t>(std::llround(spec.tail / dt)) : response.impulse_kernel.size();
    require(n_win >= 1, Errc::invalid_argument, "settle window shorter than one sample");
    require(n_edge < n_win, Errc::invalid_argument, "edge longer than the settle window");

    OffSwitch sw;
    sw.switch_index = n_lead;
    const std::size_t n = n_lead + n_win + n_tail;
    sw.target_phase.assign(n, 0.0);
    for (std::size_t i = 0; i < n_lead; ++i)
        sw.target_phase[i] = pi;
    for (std::size_t j = 0; j < n_edge; ++j)
    {
        const double x = static_cast<double>(j + 1) / static_cast<double>(n_edge + 1);
        sw.target_phase[n_lead + j] = 0.5 * pi * (1.0 + std::cos(pi * x));
    }
    sw.naive_drive.sample_period = dt;
    sw.naive_drive.samples.assign(n, 0.0);
    std::fill(sw.naive_drive.samples.begin(), sw.naive_drive.samples.begin() + static_cast<long>(n_lead), v_pi);
    return sw;
}

std::vector<double> pulse_areas(const OpticalTrace &trace, const PulseSpec &spec)
{
    spec.validate();
    const std::size_t per = samples_in(spec.period, trace.sample_period, "period");
    require(per >= 1 && trace.size() % per == 0, Errc::grid_violation,
            "trace does not hold an integer number of periods");
    const std::size_t n = trace.size() / per;
    std::vector<double> areas(n);
    for (std::size_t b = 0; b < n; ++b)
    {
        const double *x = trace.power.data() + b * per;
        double s = std::accumulate(x, x + per, 0.0);
        if (per > 1)
            s -= 0.5 * (x[0] + x[per - 1]);
        areas[b] = s * trace.sample_period;
    }
    if (n == 0)
        return areas;
    const double mean = std::accumulate(areas.begin(), areas.end(), 0.0) / static_cast<double>(n);
    require(mean > 0.0, Errc::invalid_argument, "pulse train carries no light");
    for (auto &a : areas)
        a /= mean;
    return areas;
}

} // namespace mzisim
