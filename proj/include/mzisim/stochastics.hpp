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

#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace mzisim
{

/// Random number contract
///
/// Every stochastic process draws from its own std::mt19937_64 stream. The stream seed is
/// splitmix64(run_seed + 0x9E3779B97F4A7C15 * (stream + 1)), so adding a process or changing
/// the order in which processes are sampled never perturbs the other paths. Gaussian deviates
/// come from std::normal_distribution<double> (deterministic for a given standard library).
enum class Stream : std::uint64_t
{
    bias_drift = 1,
    v_pi_drift = 2,
    amplitude_jitter = 3,
    amplitude_slow = 4,
    detector = 5,
    fit_noise = 6,
    user = 100,
};

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t stream_seed(std::uint64_t run_seed, Stream stream, std::uint64_t sub = 0);

class Rng
{
public:
    Rng(std::uint64_t run_seed, Stream stream, std::uint64_t sub = 0) : gen_(stream_seed(run_seed, stream, sub)) {}

    double normal() { return normal_(gen_); }
    double uniform() { return uniform_(gen_); }

private:
    std::mt19937_64 gen_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

struct OuParams
{
    double sigma = 0.0;            // stationary standard deviation
    double correlation_time = 1.0; // seconds
};

struct NoiseModel
{
    OuParams bias_drift{0.0, 3600.0};   // radians
    double amplitude_jitter_sigma = 0.0; // per-pulse multiplicative, white
    OuParams amplitude_slow{0.0, 1.0};  // multiplicative, correlated
    OuParams v_pi_drift{0.0, 3600.0};   // relative
    std::uint64_t seed = 0;

    void validate() const;
};

// Exact discretisation, stationary start: x0 ~ N(0, sigma^2), x[n+1] = a x[n] + sigma sqrt(1-a^2) g.
// Requires dt <= correlation_time / 10. Returns floor(duration/dt) + 1 samples.
std::vector<double> sample_ou_path(double sigma, double correlation_time, double duration, double dt,
                                   std::uint64_t seed, Stream stream = Stream::user);

// Same process drawn from a caller-owned stream.
std::vector<double> sample_ou_path(double sigma, double correlation_time, std::size_t n_samples, double dt, Rng &rng);

struct DetectorModel
{
    double relative_floor = 0.0;       // linear, relative to the ON level
    double additive_noise_sigma = 0.0; // linear power per sample
    bool clamp = true;

    static DetectorModel from_floor_db(double floor_db, double noise_sigma = 0.0);
    void validate() const;
};

// max(true_power, floor) + N(0, sigma) when clamping, clipped at zero. rng may be null when sigma == 0.
double measure(const DetectorModel &detector, double true_power, Rng *rng = nullptr);

// dB floor clamp on an already-computed ratio: max(value_db, floor_db).
double clamp_db(double value_db, double floor_db);

} // namespace mzisim
