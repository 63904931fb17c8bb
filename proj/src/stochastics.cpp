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

#include "mzisim/stochastics.hpp"

#include <algorithm>
#include <cmath>

#include "mzisim/error.hpp"

namespace mzisim
{

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t stream_seed(std::uint64_t run_seed, Stream stream, std::uint64_t sub)
{
    const auto id = static_cast<std::uint64_t>(stream);
    return splitmix64(splitmix64(run_seed + 0x9E3779B97F4A7C15ULL * (id + 1)) ^ sub);
}

void NoiseModel::validate() const
{
    for (const auto *p : {&bias_drift, &amplitude_slow, &v_pi_drift})
    {
        require(p->sigma >= 0.0 && std::isfinite(p->sigma), Errc::invalid_argument, "noise sigma must be >= 0");
        require(p->correlation_time > 0.0, Errc::invalid_argument, "correlation time must be > 0");
    }
    require(amplitude_jitter_sigma >= 0.0, Errc::invalid_argument, "amplitude jitter sigma must be >= 0");
}

std::vector<double> sample_ou_path(double sigma, double correlation_time, std::size_t n_samples, double dt, Rng &rng)
{
    require(sigma >= 0.0, Errc::invalid_argument, "sigma must be >= 0");
    require(correlation_time > 0.0 && dt > 0.0, Errc::invalid_argument, "correlation time and dt must be > 0");
    require(dt <= correlation_time / 10.0, Errc::dt_too_coarse, "dt must be <= correlation_time / 10");

    std::vector<double> x(n_samples, 0.0);
    if (n_samples == 0 || sigma == 0.0)
        return x;
    const double a = std::exp(-dt / correlation_time);
    const double b = sigma * std::sqrt(-std::expm1(-2.0 * dt / correlation_time));
    x[0] = sigma * rng.normal();
    for (std::size_t i = 1; i < n_samples; ++i)
        x[i] = a * x[i - 1] + b * rng.normal();
    return x;
}

std::vector<double> sample_ou_path(double sigma, double correlation_time, double duration, double dt,
                                   std::uint64_t seed, Stream stream)
{
    require(duration >= 0.0, Errc::invalid_argument, "duration must be >= 0");
    require(dt > 0.0, Errc::invalid_argument, "dt must be > 0");
    const auto n = static_cast<std::size_t>(std::floor(duration / dt + 1e-9)) + 1;
    Rng rng(seed, stream);
    return sample_ou_path(sigma, correlation_time, n, dt, rng);
}

DetectorModel DetectorModel::from_floor_db(double floor_db, double noise_sigma)
{
    DetectorModel d;
    d.relative_floor = std::isfinite(floor_db) ? std::pow(10.0, floor_db / 10.0) : 0.0;
    d.additive_noise_sigma = noise_sigma;
    d.clamp = true;
    return d;
}

void DetectorModel::validate() const
{
    require(relative_floor >= 0.0, Errc::invalid_argument, "detector floor must be >= 0");
    require(additive_noise_sigma >= 0.0, Errc::invalid_argument, "detector noise must be >= 0");
}

double measure(const DetectorModel &detector, double true_power, Rng *rng)
{
    require(true_power >= 0.0, Errc::invalid_argument, "true power must be >= 0");
    double v = detector.clamp ? std::max(true_power, detector.relative_floor) : true_power;
    if (detector.additive_noise_sigma > 0.0)
    {
        require(rng != nullptr, Errc::invalid_argument, "noisy detector needs a random stream");
        v += detector.additive_noise_sigma * rng->normal();
    }
    return std::max(v, 0.0);
}

double clamp_db(double value_db, double floor_db) { return std::max(value_db, floor_db); }

} // namespace mzisim
