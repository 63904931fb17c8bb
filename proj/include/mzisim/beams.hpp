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

// Free-space beam array in the target plane. Lengths are in units of d0, the 1/e^2 intensity
// diameter; each site carries a Gaussian field exp(-(x - x_i)^2 / w^2) with w = d0 / 2.

#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace mzisim
{

enum class Summation
{
    coherent,   // fields add with the configured leak phase
    worst_case, // all contributions in phase
    incoherent, // intensities add
};

Summation summation_from_string(std::string_view s);
std::string_view to_string(Summation s);

struct BeamArray
{
    std::size_t n_beams = 8;
    double pitch = 4.33;        // d0
    double waist_radius = 0.5;  // field radius w, d0
    double nn_leak_db = -50.8;  // intensity of the evanescent copy in each nearest neighbour
    double nnn_leak_db = -90.0; // next-nearest neighbour
    double leak_phase = 0.0;    // radians, relative to the source beam (coherent mode)
    double measurement_floor_db = -65.0;

    void validate() const;
    double position(std::size_t site) const { return pitch * static_cast<double>(site); }

    // Per-site field contributions: the site's own beam when active plus leaked copies.
    std::vector<std::vector<std::complex<double>>> site_contributions(const std::vector<std::size_t> &active) const;
};

// Sorted, de-duplicated site indices. Grammar:
//   all | evens | odds | single:K | first:K | list:A,B,C | mask:BITS (site 0 first)
std::vector<std::size_t> parse_active_pattern(std::string_view pattern, std::size_t n_sites);

struct BeamProfile
{
    std::vector<double> x;         // d0
    std::vector<double> intensity; // linear, normalised to the profile peak
    std::vector<double> intensity_db; // floored at the measurement floor
};

// 1-D cut through the site centres.
BeamProfile target_plane_profile(const BeamArray &array, const std::vector<std::size_t> &active,
                                 const std::vector<double> &x_samples, Summation mode = Summation::coherent);

// Uniform sampling over [-margin, last site + margin].
std::vector<double> profile_axis(const BeamArray &array, std::size_t n_samples, double margin = 4.0);

struct SiteLeakage
{
    std::size_t site = 0;
    std::size_t distance = 0; // sites to the nearest active one
    double intensity_db = 0.0; // relative to the brightest active site centre, before flooring
    double reported_db = 0.0;  // floored
    bool floor_limited = false;
};

// Idle sites only; empty when every site is active.
std::vector<SiteLeakage> site_leakage_report(const BeamArray &array, const std::vector<std::size_t> &active,
                                             Summation mode = Summation::coherent);

// Intensity of a single Gaussian beam at `distance` d0 from its centre, in dB (analytic, no underflow).
double gaussian_tail_db(double distance, double waist_radius);

} // namespace mzisim
