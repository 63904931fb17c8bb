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

// Run reports: judged metrics with units, and the directory-wide acceptance summary.

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mzisim/harness/config.hpp"

namespace mzisim::harness
{

// XFAIL: an expected-fail baseline missed its band. XPASS: it unexpectedly landed inside, a failure.
enum class Status
{
    pass,
    fail,
    xfail,
    xpass,
    info,
};

std::string_view to_string(Status s);
Status status_from_string(std::string_view s);
bool is_failure(Status s);

Status judge(double value, const std::optional<Threshold> &threshold);
std::string describe(const Threshold &t);

struct Metric
{
    std::string name;
    double value = 0.0;
    std::string unit;
    std::optional<Threshold> threshold;
    Status status = Status::info;
};

class RunReport
{
public:
    // kind names the experiment and prefixes acceptance keys; tag names the output file.
    RunReport(std::string kind, std::string tag, const ExperimentConfig &cfg);

    // Judged against cfg.acceptance["<kind>.<name>"] when that key exists.
    const Metric &add(const std::string &name, double value, const std::string &unit);

    const std::string &kind() const { return kind_; }
    const std::string &tag() const { return tag_; }
    const std::vector<Metric> &metrics() const { return metrics_; }
    json &details() { return details_; }
    bool failed() const;
    void set_wall_time(double seconds) { wall_time_s_ = seconds; }

    json to_json() const;
    std::filesystem::path write(const std::filesystem::path &dir) const; // <dir>/<tag>.report.json

private:
    std::string kind_;
    std::string tag_;
    std::string config_hash_;
    std::map<std::string, Threshold> acceptance_;
    std::vector<Metric> metrics_;
    json details_ = json::object();
    double wall_time_s_ = 0.0;
};

struct SummaryRow
{
    std::string file;
    std::string metric; // <kind>.<name>
    double value = 0.0;
    std::string unit;
    std::string threshold;
    Status status = Status::info;
};

struct Summary
{
    std::vector<SummaryRow> rows;
    std::vector<std::string> problems; // unreadable or malformed report files
    bool failed() const;
};

// Reads every *.report.json in `dir`; throws nothing_to_report when there are none.
Summary summarize_reports(const std::filesystem::path &dir);
std::string format_summary(const Summary &summary);

} // namespace mzisim::harness
