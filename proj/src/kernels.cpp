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

#include "mzisim/kernels.hpp"

#include <algorithm>
#include <cstdint>

#include <unsupported/Eigen/FFT>

namespace mzisim::kernels
{

namespace
{

Eigen::FFT<double> &engine()
{
    thread_local Eigen::FFT<double> fft;
    return fft;
}

double direct_at(std::span<const double> x, std::span<const double> k, std::size_t n)
{
    const std::size_t m_max = std::min(n + 1, k.size());
    double acc = 0.0;
    for (std::size_t m = 0; m < m_max; ++m)
        acc += k[m] * x[n - m];
    return acc;
}

} // namespace

std::size_t next_pow2(std::size_t n)
{
    std::size_t p = 1;
    while (p < n)
        p <<= 1;
    return p;
}

std::vector<double> convolve_direct(std::span<const double> x, std::span<const double> k, Exec exec)
{
    const std::size_t n = x.size();
    std::vector<double> y(n, 0.0);
    if (k.empty())
        return y;

    if (exec == Exec::serial)
    {
        for (std::size_t i = 0; i < n; ++i)
            y[i] = direct_at(x, k, i);
        return y;
    }

    const auto ni = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < ni; ++i)
        y[static_cast<std::size_t>(i)] = direct_at(x, k, static_cast<std::size_t>(i));
    return y;
}

std::vector<std::complex<double>> fft_forward(std::span<const double> x, std::size_t n)
{
    std::vector<double> buf(n, 0.0);
    std::copy_n(x.begin(), std::min(n, x.size()), buf.begin());
    std::vector<std::complex<double>> spec;
    engine().fwd(spec, buf);
    return spec;
}

std::vector<double> fft_inverse_real(std::span<const std::complex<double>> spectrum)
{
    std::vector<std::complex<double>> in(spectrum.begin(), spectrum.end());
    std::vector<double> out;
    engine().inv(out, in);
    return out;
}

std::vector<double> convolve_fft(std::span<const double> x, std::span<const double> k, Exec exec)
{
    const std::size_t n = x.size();
    std::vector<double> y(n, 0.0);
    if (k.empty() || n == 0)
        return y;

    const std::size_t taps = std::min(k.size(), n);
    const std::size_t fft_len = std::max<std::size_t>(1024, next_pow2(2 * taps));
    const std::size_t block = fft_len - taps + 1;
    const std::size_t n_blocks = (n + block - 1) / block;
    const auto kspec = fft_forward(k.first(taps), fft_len);

    std::vector<std::vector<double>> partial(n_blocks);
    auto run_block = [&](std::size_t b) {
        const std::size_t start = b * block;
        const std::size_t len = std::min(block, n - start);
        auto spec = fft_forward(x.subspan(start, len), fft_len);
        for (std::size_t i = 0; i < fft_len; ++i)
            spec[i] *= kspec[i];
        partial[b] = fft_inverse_real(spec);
    };

    if (exec == Exec::serial)
    {
        for (std::size_t b = 0; b < n_blocks; ++b)
            run_block(b);
    }
    else
    {
        const auto nb = static_cast<std::int64_t>(n_blocks);
#pragma omp parallel for schedule(static)
        for (std::int64_t b = 0; b < nb; ++b)
            run_block(static_cast<std::size_t>(b));
    }

    // ordered assembly
    for (std::size_t b = 0; b < n_blocks; ++b)
    {
        const std::size_t start = b * block;
        const std::size_t stop = std::min(n, start + fft_len);
        for (std::size_t i = start; i < stop; ++i)
            y[i] += partial[b][i - start];
    }
    return y;
}

std::vector<double> convolve(std::span<const double> x, std::span<const double> k, Exec exec)
{
    if (k.size() < fft_threshold_taps)
        return convolve_direct(x, k, exec);
    return convolve_fft(x, k, exec);
}

std::vector<double> correlate(std::span<const double> w, std::span<const double> k, Exec exec)
{
    std::vector<double> rev(w.rbegin(), w.rend());
    auto z = convolve(rev, k, exec);
    std::reverse(z.begin(), z.end());
    return z;
}

void map(std::span<const double> in, std::span<double> out, const std::function<double(double)> &f, Exec exec)
{
    const std::size_t n = std::min(in.size(), out.size());
    if (exec == Exec::serial)
    {
        for (std::size_t i = 0; i < n; ++i)
            out[i] = f(in[i]);
        return;
    }
    const auto ni = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < ni; ++i)
        out[static_cast<std::size_t>(i)] = f(in[static_cast<std::size_t>(i)]);
}

} // namespace mzisim::kernels
