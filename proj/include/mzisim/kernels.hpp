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

// Data-parallel inner loops. Every kernel has a serial reference and an OpenMP
// variant; the two must produce bit-identical output for any thread count.

#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace mzisim::kernels
{

enum class Exec
{
    serial,
    parallel,
};

// Kernels shorter than this use the direct sum, longer ones use block FFT convolution.
inline constexpr std::size_t fft_threshold_taps = 512;

// y[n] = sum_m k[m] x[n-m], x[j] = 0 for j < 0, output truncated to x.size().
std::vector<double> convolve_direct(std::span<const double> x, std::span<const double> k, Exec exec);

// Overlap-add with a fixed block size; per-block transforms are independent and are
// assembled in order, which makes the parallel path bit-identical to the serial one.
std::vector<double> convolve_fft(std::span<const double> x, std::span<const double> k, Exec exec);

// Dispatches on kernel length (direct below fft_threshold_taps).
std::vector<double> convolve(std::span<const double> x, std::span<const double> k, Exec exec = Exec::parallel);

// Transpose of convolve(): z[m] = sum_j k[j] w[m+j], truncated to w.size().
std::vector<double> correlate(std::span<const double> w, std::span<const double> k, Exec exec = Exec::parallel);

// out[n] = f(in[n]); f must be pure.
void map(std::span<const double> in, std::span<double> out, const std::function<double(double)> &f, Exec exec);

// Circular transforms on arbitrary lengths (thread-safe; one engine per thread).
std::vector<std::complex<double>> fft_forward(std::span<const double> x, std::size_t n);
std::vector<double> fft_inverse_real(std::span<const std::complex<double>> spectrum);

std::size_t next_pow2(std::size_t n);

} // namespace mzisim::kernels
