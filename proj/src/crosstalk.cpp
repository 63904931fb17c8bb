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

#include "mzisim/crosstalk.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "mzisim/error.hpp"

namespace mzisim
{

namespace
{

double from_db(double db) { return std::isinf(db) && db < 0.0 ? 0.0 : std::pow(10.0, db / 10.0); }

double to_db(double p) { return p > 0.0 ? 10.0 * std::log10(p) : -std::numeric_limits<double>::infinity(); }

} // namespace

CrosstalkGraph::CrosstalkGraph(std::size_t n_channels)
    : n_(n_channels), before_(n_channels * n_channels, -std::numeric_limits<double>::infinity()),
      after_(n_channels * n_channels, -std::numeric_limits<double>::infinity())
{
    require(n_channels >= 1, Errc::invalid_argument, "need at least one channel");
}

CrosstalkGraph CrosstalkGraph::nearest_neighbour(std::size_t n_channels, double nn_before_db, double nn_after_db,
                                                 double nnn_db)
{
    CrosstalkGraph g(n_channels);
    for (std::size_t i = 0; i < n_channels; ++i)
        for (std::size_t j = 0; j < n_channels; ++j)
        {
            if (i == j)
                continue;
            const std::size_t sep = i > j ? i - j : j - i;
            if (sep == 1)
                g.set(i, j, nn_before_db, nn_after_db);
            else
                g.set(i, j, nnn_db, nnn_db);
        }
    g.validate();
    return g;
}

void CrosstalkGraph::set(std::size_t from, std::size_t to, double before_db, double after_db)
{
    require(from < n_ && to < n_, Errc::out_of_range, "channel index out of range");
    require(from != to, Errc::invalid_argument, "no self-coupling");
    before_[from * n_ + to] = before_db;
    after_[from * n_ + to] = after_db;
}

double CrosstalkGraph::before(std::size_t from, std::size_t to) const { return from_db(before_db(from, to)); }

double CrosstalkGraph::after(std::size_t from, std::size_t to) const { return from_db(after_db(from, to)); }

void CrosstalkGraph::validate() const
{
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j)
        {
            const double b = before_db(i, j);
            const double a = after_db(i, j);
            if (i == j)
                require(std::isinf(b) && b < 0.0 && std::isinf(a) && a < 0.0, Errc::invalid_argument,
                        "diagonal couplings must be -inf dB");
            else
                require(b <= 0.0 && a <= 0.0 && !std::isnan(a) && !std::isnan(b), Errc::invalid_argument,
                        "couplings must be <= 0 dB");
        }
}

double victim_output(const CrosstalkGraph &graph, const std::vector<ChannelState> &states, std::size_t victim)
{
    require(states.size() == graph.size(), Errc::arity_mismatch, "one state per channel required");
    require(victim < graph.size(), Errc::out_of_range, "victim index out of range");
    const auto &v = states[victim];
    double p = v.optical_input * v.modulator_transmission;
    for (std::size_t i = 0; i < states.size(); ++i)
    {
        if (i == victim || states[i].optical_input == 0.0)
            continue;
        p += states[i].optical_input * (graph.before(i, victim) * v.modulator_transmission + graph.after(i, victim));
    }
    return p;
}

Scenario scenario_from_string(std::string_view s)
{
    if (s == "A" || s == "a")
        return Scenario::A;
    if (s == "B" || s == "b")
        return Scenario::B;
    if (s == "C" || s == "c")
        return Scenario::C;
    fail(Errc::invalid_argument, "scenario must be A, B or C");
}

std::string_view to_string(Scenario s)
{
    switch (s)
    {
    case Scenario::A:
        return "A";
    case Scenario::B:
        return "B";
    case Scenario::C:
        return "C";
    }
    return "?";
}

ChannelLevels ChannelLevels::from_channels(const std::vector<ModulatorChannel> &channels)
{
    ChannelLevels lv;
    for (const auto &ch : channels)
    {
        const double v_pi = ch.stages().front().mod_arm().v_pi();
        lv.t_on.push_back(channel_transmission_normalized(ch, v_pi));
        lv.t_off.push_back(channel_null_transmission(ch));
    }
    return lv;
}

ChannelLevels ChannelLevels::uniform(std::size_t n, double t_on, double t_off)
{
    return {std::vector<double>(n, t_on), std::vector<double>(n, t_off)};
}

std::vector<ChannelState> scenario_states(Scenario scenario, const ChannelLevels &levels, std::size_t aggressor,
                                          std::size_t victim)
{
    const std::size_t n = levels.t_on.size();
    require(levels.t_off.size() == n, Errc::arity_mismatch, "on/off level arrays differ in length");
    require(aggressor < n && victim < n, Errc::out_of_range, "channel index out of range");
    std::vector<ChannelState> st(n);
    for (std::size_t i = 0; i < n; ++i)
        st[i] = {0.0, ModState::off, levels.t_off[i]};
    st[aggressor] = {1.0, ModState::on, levels.t_on[aggressor]};
    if (victim != aggressor)
    {
        if (scenario == Scenario::B)
            st[victim] = {0.0, ModState::on, levels.t_on[victim]};
        else if (scenario == Scenario::C)
            st[victim] = {1.0, ModState::off, levels.t_off[victim]};
    }
    return st;
}

double CrosstalkMatrix::mean_db_at(std::size_t separation) const
{
    double s = 0.0;
    std::size_t c = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if ((i > j ? i - j : j - i) == separation)
            {
                s += db[i * n + j];
                ++c;
            }
    return c ? s / static_cast<double>(c) : std::numeric_limits<double>::quiet_NaN();
}

double CrosstalkMatrix::mean_linear_at(std::size_t separation) const
{
    double s = 0.0;
    std::size_t c = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if ((i > j ? i - j : j - i) == separation)
            {
                s += linear[i * n + j];
                ++c;
            }
    return c ? s / static_cast<double>(c) : std::numeric_limits<double>::quiet_NaN();
}

CrosstalkMatrix crosstalk_matrix(const CrosstalkGraph &graph, Scenario scenario, const ChannelLevels &levels,
                                 const DetectorModel &detector)
{
    graph.validate();
    detector.validate();
    const std::size_t n = graph.size();
    require(levels.t_on.size() == n, Errc::arity_mismatch, "levels do not match the graph size");
    CrosstalkMatrix m;
    m.n = n;
    m.linear.assign(n * n, 0.0);
    m.db.assign(n * n, 0.0);
    m.floor_limited.assign(n * n, false);

    const auto total = static_cast<long>(n * n);
#pragma omp parallel for schedule(static)
    for (long idx = 0; idx < total; ++idx)
    {
        const auto a = static_cast<std::size_t>(idx) / n;
        const auto v = static_cast<std::size_t>(idx) % n;
        const auto st = scenario_states(scenario, levels, a, v);
        const double ref = st[a].optical_input * st[a].modulator_transmission;
        m.linear[idx] = victim_output(graph, st, v) / ref;
    }
    for (std::size_t i = 0; i < n * n; ++i)
    {
        const double meas = measure(detector, m.linear[i]);
        m.floor_limited[i] = detector.clamp && m.linear[i] <= detector.relative_floor;
        m.db[i] = to_db(meas);
    }
    return m;
}

double scenario_c_prediction_db(double channel_er_db, double after_db)
{
    return to_db(from_db(-channel_er_db) + from_db(after_db));
}

void check_scenario_c_consistency(double predicted_db, double target_db, double tolerance_db)
{
    require(std::abs(predicted_db - target_db) <= tolerance_db, Errc::unachievable_target,
            "scenario C prediction " + std::to_string(predicted_db) + " dB misses the target " +
                std::to_string(target_db) + " dB by more than " + std::to_string(tolerance_db) + " dB");
}

} // namespace mzisim
