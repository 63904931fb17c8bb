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

#include "mzisim/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "mzisim/error.hpp"

namespace mzisim::io
{

namespace
{

template <class T>
void put_le(std::ostream &os, T v)
{
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big)
        std::reverse(b, b + sizeof(T));
    os.write(reinterpret_cast<const char *>(b), sizeof(T));
}

template <class T>
T get_le(std::istream &is)
{
    unsigned char b[sizeof(T)];
    is.read(reinterpret_cast<char *>(b), sizeof(T));
    require(static_cast<bool>(is), Errc::io, "truncated waveform file");
    if constexpr (std::endian::native == std::endian::big)
        std::reverse(b, b + sizeof(T));
    T v;
    std::memcpy(&v, b, sizeof(T));
    return v;
}

std::ofstream open_out(const std::filesystem::path &path, std::ios::openmode mode = std::ios::out)
{
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream os(path, mode | std::ios::trunc);
    require(static_cast<bool>(os), Errc::io, "cannot open '" + path.string() + "' for writing");
    return os;
}

} // namespace

std::string format_double(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    return fmt::format("{}", v);
}

void write_csv(const std::filesystem::path &path, const std::vector<Column> &columns)
{
    require(!columns.empty(), Errc::invalid_argument, "no columns");
    const std::size_t n = columns.front().values.size();
    for (const auto &c : columns)
        require(c.values.size() == n, Errc::arity_mismatch, "CSV columns differ in length");
    std::string out;
    for (std::size_t j = 0; j < columns.size(); ++j)
        out += (j ? "," : "") + columns[j].name;
    out += '\n';
    for (std::size_t i = 0; i < n; ++i)
    {
        for (std::size_t j = 0; j < columns.size(); ++j)
        {
            if (j)
                out += ',';
            out += format_double(columns[j].values[i]);
        }
        out += '\n';
    }
    write_text(path, out);
}

void write_series_csv(const std::filesystem::path &path, double sample_period, std::span<const double> values,
                      const std::string &value_name)
{
    std::vector<double> t(values.size());
    for (std::size_t i = 0; i < t.size(); ++i)
        t[i] = sample_period * static_cast<double>(i);
    write_csv(path, {{"time_s", t}, {value_name, values}});
}

void write_matrix_csv(const std::filesystem::path &path, std::size_t n, std::span<const double> row_major,
                      const std::string &corner)
{
    require(row_major.size() == n * n, Errc::arity_mismatch, "matrix is not n x n");
    std::string out = corner;
    for (std::size_t j = 0; j < n; ++j)
        out += "," + std::to_string(j);
    out += '\n';
    for (std::size_t i = 0; i < n; ++i)
    {
        out += std::to_string(i);
        for (std::size_t j = 0; j < n; ++j)
            out += "," + format_double(row_major[i * n + j]);
        out += '\n';
    }
    write_text(path, out);
}

void write_waveform_binary(const std::filesystem::path &path, const Waveform &w)
{
    auto os = open_out(path, std::ios::out | std::ios::binary);
    put_le<std::uint64_t>(os, w.samples.size());
    put_le<double>(os, w.sample_period);
    for (double v : w.samples)
        put_le<double>(os, v);
    require(static_cast<bool>(os), Errc::io, "write failed for '" + path.string() + "'");
}

Waveform read_waveform_binary(const std::filesystem::path &path)
{
    std::ifstream is(path, std::ios::binary);
    require(static_cast<bool>(is), Errc::io, "cannot open '" + path.string() + "'");
    Waveform w;
    const auto n = get_le<std::uint64_t>(is);
    w.sample_period = get_le<double>(is);
    const auto size = std::filesystem::file_size(path);
    require(size == 16 + 8 * n, Errc::io, "waveform file size does not match its header");
    w.samples.resize(n);
    for (auto &v : w.samples)
        v = get_le<double>(is);
    return w;
}

void write_text(const std::filesystem::path &path, const std::string &text)
{
    auto os = open_out(path, std::ios::out | std::ios::binary);
    os << text;
    require(static_cast<bool>(os), Errc::io, "write failed for '" + path.string() + "'");
}

std::string read_text(const std::filesystem::path &path)
{
    std::ifstream is(path, std::ios::binary);
    require(static_cast<bool>(is), Errc::io, "cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

} // namespace mzisim::io
