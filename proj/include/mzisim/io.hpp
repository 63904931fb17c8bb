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

// File output helpers: CSV tables and the binary waveform format.
//
// Binary waveform layout (little-endian, no padding):
//   u64  sample count N
//   f64  sample period in seconds
//   f64  samples[N]

#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "mzisim/dynamics.hpp"

namespace mzisim::io
{

// Shortest representation that round-trips; "inf", "-inf", "nan" for non-finite values.
std::string format_double(double v);

struct Column
{
    std::string name;
    std::span<const double> values;
};

// Columns must have equal length.
void write_csv(const std::filesystem::path &path, const std::vector<Column> &columns);

// Uniform time series: columns time_s and `value_name`.
void write_series_csv(const std::filesystem::path &path, double sample_period, std::span<const double> values,
                      const std::string &value_name = "value");

// Square matrix, rows and columns labelled by index.
void write_matrix_csv(const std::filesystem::path &path, std::size_t n, std::span<const double> row_major,
                      const std::string &corner = "aggressor\\victim");

void write_waveform_binary(const std::filesystem::path &path, const Waveform &w);
Waveform read_waveform_binary(const std::filesystem::path &path);

void write_text(const std::filesystem::path &path, const std::string &text);
std::string read_text(const std::filesystem::path &path);

} // namespace mzisim::io
