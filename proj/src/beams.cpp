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

#include "mzisim/beams.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>

#include "mzisim/error.hpp"

namespace mzisim
{

namespace
{

std::size_t parse_index(std::string_view s, std::string_view pattern)
{
    std::size_t v = 0;
    const auto *end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (s.empty() || ec != std::errc() || ptr != end)
        fail(Errc::malformed_pattern, "bad index '" + std::string(s) + "' in pattern '" + std::string(pattern) + "'");
    return v;
}

double field_at(double x, double centre, double w)
{
    const double d = (x - centre) / w;
    return std::exp(-d * d);
}

} // namespace

Summation summation_from_string(std::string_view s)
{
    if (s == "coherent")
        return Summation::coherent;
    if (s == "worst_case")
        return Summation::worst_case;
    if (s == "incoherent")
        return Summation::incoherent;
    fail(Errc::invalid_argument, "unknown summation '" + std::string(s) + "'");
}

std::string_view to_string(Summation s)
{
    switch (s)
    {
    case Summation::coherent:
        return "coherent";
    case Summation::worst_case:
        return "worst_case";
    case Summation::incoherent:
        return "incoherent";
    }
    return "?";
}

void BeamArray::validate() const
{
    require(n_beams >= 1, Errc::invalid_argument, "need at least one beam");
    require(pitch > 0.0 && waist_radius > 0.0, Errc::invalid_argument, "pitch and waist must be > 0");
    require(nn_leak_db <= 0.0 && nnn_leak_db <= 0.0, Errc::invalid_argument, "leak levels must be <= 0 dB");
}

std::vector<std::vector<std::complex<double>>> BeamArray::site_contributions(const std::vector<std::size_t> &active) const
{
    std::vector<std::vector<std::complex<double>>> c(n_beams);
    const auto leak = std::polar(1.0, leak_phase);
    const double a_nn = std::sqrt(std::pow(10.0, nn_leak_db / 10.0));
    const double a_nnn = std::sqrt(std::pow(10.0, nnn_leak_db / 10.0));
    for (std::size_t i : active)
    {
        require(i < n_beams, Errc::out_of_range, "active site out of range");
        c[i].emplace_back(1.0, 0.0);
        for (std::size_t j = 0; j < n_beams; ++j)
        {
            const std::size_t sep = i > j ? i - j : j - i;
            if (sep == 1)
                c[j].push_back(a_nn * leak);
            else if (sep == 2)
                c[j].push_back(a_nnn * leak);
        }
    }
    return c;
}

std::vector<std::size_t> parse_active_pattern(std::string_view pattern, std::size_t n_sites)
{
    std::vector<std::size_t> out;
    const auto colon = pattern.find(':');
    const auto head = pattern.substr(0, colon);
    const auto arg = colon == std::string_view::npos ? std::string_view{} : pattern.substr(colon + 1);
    auto need_arg = [&] {
        if (colon == std::string_view::npos || arg.empty())
            fail(Errc::malformed_pattern, "pattern '" + std::string(pattern) + "' needs an argument");
    };
    auto no_arg = [&] {
        if (colon != std::string_view::npos)
            fail(Errc::malformed_pattern, "pattern '" + std::string(head) + "' takes no argument");
    };

    if (head == "all")
    {
        no_arg();
        for (std::size_t i = 0; i < n_sites; ++i)
            out.push_back(i);
    }
    else if (head == "evens" || head == "odds")
    {
        no_arg();
        for (std::size_t i = head == "evens" ? 0 : 1; i < n_sites; i += 2)
            out.push_back(i);
    }
    else if (head == "single")
    {
        need_arg();
        out.push_back(parse_index(arg, pattern));
    }
    else if (head == "first")
    {
        need_arg();
        const auto k = parse_index(arg, pattern);
        require(k <= n_sites, Errc::malformed_pattern, "first:K exceeds the array size");
        for (std::size_t i = 0; i < k; ++i)
            out.push_back(i);
    }
    else if (head == "list")
    {
        need_arg();
        std::size_t pos = 0;
        while (pos <= arg.size())
        {
            const auto comma = arg.find(',', pos);
            const auto tok = arg.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
            out.push_back(parse_index(tok, pattern));
            if (comma == std::string_view::npos)
                break;
            pos = comma + 1;
        }
    }
    else if (head == "mask")
    {
        need_arg();
        require(arg.size() == n_sites, Errc::malformed_pattern, "mask length must equal the number of sites");
        for (std::size_t i = 0; i < arg.size(); ++i)
        {
            if (arg[i] == '1')
                out.push_back(i);
            else if (arg[i] != '0')
                fail(Errc::malformed_pattern, "mask may contain only 0 and 1");
        }
    }
    else
    {
        fail(Errc::malformed_pattern, "unknown pattern '" + std::string(pattern) + "'");
    }

    for (std::size_t i : out)
        require(i < n_sites, Errc::malformed_pattern, "site index " + std::to_string(i) + " out of range");
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

BeamProfile target_plane_profile(const BeamArray &array, const std::vector<std::size_t> &active,
                                 const std::vector<double> &x_samples, Summation mode)
{
    array.validate();
    require(!active.empty(), Errc::empty_active_set, "no active sites");
    const double lo = array.position(0) - 10.0 * array.pitch;
    const double hi = array.position(array.n_beams - 1) + 10.0 * array.pitch;
    for (double x : x_samples)
        require(x >= lo && x <= hi, Errc::out_of_range, "profile sample outside the array span");

    const auto contrib = array.site_contributions(active);
    BeamProfile p;
    p.x = x_samples;
    p.intensity.resize(x_samples.size());
    for (std::size_t k = 0; k < x_samples.size(); ++k)
    {
        std::complex<double> field = 0.0;
        double incoherent = 0.0;
        double magnitude = 0.0;
        for (std::size_t s = 0; s < array.n_beams; ++s)
        {
            const double g = field_at(x_samples[k], array.position(s), array.waist_radius);
            for (const auto &a : contrib[s])
            {
                field += a * g;
                magnitude += std::abs(a) * g;
                incoherent += std::norm(a) * g * g;
            }
        }
        switch (mode)
        {
        case Summation::coherent:
            p.intensity[k] = std::norm(field);
            break;
        case Summation::worst_case:
            p.intensity[k] = magnitude * magnitude;
            break;
        case Summation::incoherent:
            p.intensity[k] = incoherent;
            break;
        }
    }
    const double peak = p.intensity.empty() ? 0.0 : *std::max_element(p.intensity.begin(), p.intensity.end());
    p.intensity_db.resize(p.intensity.size());
    for (std::size_t k = 0; k < p.intensity.size(); ++k)
    {
        if (peak > 0.0)
            p.intensity[k] /= peak;
        const double db = p.intensity[k] > 0.0 ? 10.0 * std::log10(p.intensity[k]) : -INFINITY;
        p.intensity_db[k] = std::max(db, array.measurement_floor_db);
    }
    return p;
}

std::vector<double> profile_axis(const BeamArray &array, std::size_t n_samples, double margin)
{
    require(n_samples >= 2, Errc::invalid_argument, "need at least two samples");
    const double a = -margin;
    const double b = array.position(array.n_beams - 1) + margin;
    std::vector<double> x(n_samples);
    for (std::size_t i = 0; i < n_samples; ++i)
        x[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n_samples - 1);
    return x;
}

std::vector<SiteLeakage> site_leakage_report(const BeamArray &array, const std::vector<std::size_t> &active_in,
                                             Summation mode)
{
    auto active = active_in;
    std::sort(active.begin(), active.end());
    std::vector<double> centres(array.n_beams);
    for (std::size_t s = 0; s < array.n_beams; ++s)
        centres[s] = array.position(s);
    // unnormalised intensities via a profile evaluated only at the site centres
    const auto prof = target_plane_profile(array, active, centres, mode);
    double active_peak = 0.0;
    for (std::size_t i : active)
        active_peak = std::max(active_peak, prof.intensity[i]);

    std::vector<SiteLeakage> out;
    for (std::size_t s = 0; s < array.n_beams; ++s)
    {
        if (std::binary_search(active.begin(), active.end(), s))
            continue;
        SiteLeakage l;
        l.site = s;
        l.distance = array.n_beams;
        for (std::size_t i : active)
            l.distance = std::min(l.distance, i > s ? i - s : s - i);
        const double rel = prof.intensity[s] / active_peak;
        l.intensity_db = rel > 0.0 ? 10.0 * std::log10(rel) : -INFINITY;
        l.floor_limited = l.intensity_db < array.measurement_floor_db;
        l.reported_db = std::max(l.intensity_db, array.measurement_floor_db);
        out.push_back(l);
    }
    return out;
}

double gaussian_tail_db(double distance, double waist_radius)
{
    // I = exp(-2 d^2 / w^2)
    return -2.0 * distance * distance / (waist_radius * waist_radius) * 10.0 / std::numbers::ln10;
}

} // namespace mzisim
