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

// On-chip leakage between channels. Each ordered pair (i -> j) couples at two points:
// upstream of j's modulator (gated by j's transmission) and downstream of it (not gated).
// Powers from different sources add incoherently.

#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "mzisim/photonic_core.hpp"
#include "mzisim/stochastics.hpp"

namespace mzisim
{

class CrosstalkGraph
{
public:
    explicit CrosstalkGraph(std::size_t n_channels = 8);

    // Nearest-neighbour couplings plus a next-nearest (and further) background, symmetric.
    static CrosstalkGraph nearest_neighbour(std::size_t n_channels, double nn_before_db, double nn_after_db,
                                            double nnn_db = -90.0);

    std::size_t size() const { return n_; }
    double before_db(std::size_t from, std::size_t to) const { return before_[from * n_ + to]; }
    double after_db(std::size_t from, std::size_t to) const { return after_[from * n_ + to]; }
    void set(std::size_t from, std::size_t to, double before_db, double after_db);

    // Linear power coupling; 0 for -inf dB.
    double before(std::size_t from, std::size_t to) const;
    double after(std::size_t from, std::size_t to) const;

    void validate() const;

private:
    std::size_t n_;
    std::vector<double> before_;
    std::vector<double> after_;
};

enum class ModState
{
    on,
    off,
};

struct ChannelState
{
    double optical_input = 0.0; // linear, 0 when dark
    ModState state = ModState::off;
    double modulator_transmission = 0.0; // linear
};

// own_input * own_T + sum_i input_i * (before(i, victim) * own_T + after(i, victim)).
double victim_output(const CrosstalkGraph &graph, const std::vector<ChannelState> &states, std::size_t victim);

enum class Scenario
{
    A, // victim dark and OFF
    B, // victim dark and ON
    C, // victim lit and OFF
};

Scenario scenario_from_string(std::string_view s);
std::string_view to_string(Scenario s);

// Per-channel static transmissions used for the state templates.
struct ChannelLevels
{
    std::vector<double> t_on;
    std::vector<double> t_off;

    static ChannelLevels from_channels(const std::vector<ModulatorChannel> &channels);
    static ChannelLevels uniform(std::size_t n, double t_on, double t_off);
};

// Aggressor lit and ON, victim per scenario, every other channel dark and OFF.
std::vector<ChannelState> scenario_states(Scenario scenario, const ChannelLevels &levels, std::size_t aggressor,
                                          std::size_t victim);

struct CrosstalkMatrix
{
    std::size_t n = 0;
    std::vector<double> linear; // [aggressor * n + victim], relative to the aggressor ON output
    std::vector<double> db;     // measured through the detector floor
    std::vector<bool> floor_limited;

    double at_db(std::size_t aggressor, std::size_t victim) const { return db[aggressor * n + victim]; }
    double at_linear(std::size_t aggressor, std::size_t victim) const { return linear[aggressor * n + victim]; }

    // Mean (in dB) over all pairs at the given separation.
    double mean_db_at(std::size_t separation) const;
    double mean_linear_at(std::size_t separation) const;
};

CrosstalkMatrix crosstalk_matrix(const CrosstalkGraph &graph, Scenario scenario, const ChannelLevels &levels,
                                 const DetectorModel &detector);

// Incoherent sum of the victim's own extinction and the downstream leak, in dB.
double scenario_c_prediction_db(double channel_er_db, double after_db);

// Throws unachievable_target when the prediction misses the target by more than tolerance_db.
void check_scenario_c_consistency(double predicted_db, double target_db, double tolerance_db = 3.0);

} // namespace mzisim
