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

// Serial reference vs OpenMP kernels.

#include <cmath>
#include <vector>

#include <benchmark/benchmark.h>

#include "mzisim/dynamics.hpp"
#include "mzisim/kernels.hpp"
#include "mzisim/photonic_core.hpp"

namespace
{

using mzisim::kernels::Exec;

std::vector<double> ramp(std::size_t n)
{
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i)
        x[i] = std::sin(0.001 * static_cast<double>(i)) + 0.5;
    return x;
}

std::vector<double> decay(std::size_t n)
{
    std::vector<double> k(n);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        s += k[i] = std::exp(-static_cast<double>(i) / (0.2 * static_cast<double>(n)));
    for (auto &v : k)
        v /= s;
    return k;
}

template <Exec E>
void bm_convolve_direct(benchmark::State &st)
{
    const auto x = ramp(static_cast<std::size_t>(st.range(0)));
    const auto k = decay(256);
    for (auto _ : st)
        benchmark::DoNotOptimize(mzisim::kernels::convolve_direct(x, k, E));
    st.SetItemsProcessed(st.iterations() * st.range(0));
}

template <Exec E>
void bm_convolve_fft(benchmark::State &st)
{
    const auto x = ramp(static_cast<std::size_t>(st.range(0)));
    const auto k = decay(4096);
    for (auto _ : st)
        benchmark::DoNotOptimize(mzisim::kernels::convolve_fft(x, k, E));
    st.SetItemsProcessed(st.iterations() * st.range(0));
}

template <Exec E>
void bm_sweep(benchmark::State &st)
{
    const auto ch = mzisim::ModulatorChannel::uniform(2, 0.508, 74.7, 3.0);
    for (auto _ : st)
        benchmark::DoNotOptimize(
            mzisim::sweep_true_er_db(ch, -74.7, 74.7, static_cast<std::size_t>(st.range(0)), E));
    st.SetItemsProcessed(st.iterations() * st.range(0));
}

template <Exec E>
void bm_trace_optical(benchmark::State &st)
{
    const auto ch = mzisim::ModulatorChannel::uniform(2, 0.508, 74.7, 3.0);
    const auto resp = mzisim::synthesize_kernel(mzisim::KernelKind::second_order, 40e-9, 0.3, 1e-9);
    mzisim::Waveform w{1e-9, ramp(static_cast<std::size_t>(st.range(0)))};
    for (auto &v : w.samples)
        v *= 74.7;
    for (auto _ : st)
        benchmark::DoNotOptimize(mzisim::trace_optical(ch, resp, w, mzisim::Prehistory::zero, 0.0, E));
    st.SetItemsProcessed(st.iterations() * st.range(0));
}

} // namespace

BENCHMARK(bm_convolve_direct<Exec::serial>)->Arg(1 << 14)->Arg(1 << 18);
BENCHMARK(bm_convolve_direct<Exec::parallel>)->Arg(1 << 14)->Arg(1 << 18);
BENCHMARK(bm_convolve_fft<Exec::serial>)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(bm_convolve_fft<Exec::parallel>)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(bm_sweep<Exec::serial>)->Arg(2001)->Arg(1000001);
BENCHMARK(bm_sweep<Exec::parallel>)->Arg(2001)->Arg(1000001);
BENCHMARK(bm_trace_optical<Exec::serial>)->Arg(1 << 20);
BENCHMARK(bm_trace_optical<Exec::parallel>)->Arg(1 << 20);

BENCHMARK_MAIN();
