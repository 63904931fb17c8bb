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

#include "mzisim/harness/report.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "mzisim/error.hpp"
#include "mzisim/io.hpp"

namespace mzisim::harness
{

namespace
{

json number_json(double v) { return std::isfinite(v) ? json(v) : json(io::format_double(v)); }

double number_from(const json &j)
{
    if (j.is_number())
        return j.get<double>();
    const auto s = j.get<std::string>();
    if (s == "inf")
        return INFINITY;
    if (s == "-inf")
        return -INFINITY;
    if (s == "nan")
        return NAN;
    fail(Errc::config, "not a number: " + s);
}

json opt(std::optional<double> v) { return v ? json(*v) : json(nullptr); }

} // namespace

std::string_view to_string(Status s)
{
    switch (s)
    {
    case Status::pass:
        return "PASS";
    case Status::fail:
        return "FAIL";
    case Status::xfail:
        return "XFAIL";
    case Status::xpass:
        return "XPASS";
    case Status::info:
        return "INFO";
    }
    return "?";
}

Status status_from_string(std::string_view s)
{
    for (Status st : {Status::pass, Status::fail, Status::xfail, Status::xpass, Status::info})
        if (to_string(st) == s)
            return st;
    fail(Errc::config, "unknown status '" + std::string(s) + "'");
}

bool is_failure(Status s) { return s == Status::fail || s == Status::xpass; }

Status judge(double value, const std::optional<Threshold> &threshold)
{
    if (!threshold)
        return Status::info;
    const bool inside = !std::isnan(value) && (!threshold->min || value >= *threshold->min) &&
                        (!threshold->max || value <= *threshold->max);
    if (threshold->expect_fail)
        return inside ? Status::xpass : Status::xfail;
    return inside ? Status::pass : Status::fail;
}

std::string describe(const Threshold &t)
{
    std::string s;
    if (t.min && t.max)
        s = fmt::format("[{}, {}]", *t.min, *t.max);
    else if (t.min)
        s = fmt::format(">= {}", *t.min);
    else if (t.max)
        s = fmt::format("<= {}", *t.max);
    if (t.expect_fail)
        s += " (expected to miss)";
    return s;
}

RunReport::RunReport(std::string kind, std::string tag, const ExperimentConfig &cfg)
    : kind_(std::move(kind)), tag_(std::move(tag)), config_hash_(config_hash(cfg)), acceptance_(cfg.acceptance)
{
}

const Metric &RunReport::add(const std::string &name, double value, const std::string &unit)
{
    Metric m{name, value, unit, std::nullopt, Status::info};
    if (auto it = acceptance_.find(kind_ + "." + name); it != acceptance_.end())
        m.threshold = it->second;
    m.status = judge(value, m.threshold);
    metrics_.push_back(std::move(m));
    return metrics_.back();
}

bool RunReport::failed() const
{
    return std::any_of(metrics_.begin(), metrics_.end(), [](const Metric &m) { return is_failure(m.status); });
}

json RunReport::to_json() const
{
    json metrics = json::array();
    for (const auto &m : metrics_)
    {
        json t = nullptr;
        if (m.threshold)
            t = {{"min", opt(m.threshold->min)},
                 {"max", opt(m.threshold->max)},
                 {"expect", m.threshold->expect_fail ? "fail" : "pass"}};
        metrics.push_back({{"name", m.name},
                           {"value", number_json(m.value)},
                           {"unit", m.unit},
                           {"threshold", t},
                           {"status", std::string(to_string(m.status))}});
    }
    return {{"experiment", kind_},          {"tag", tag_},
            {"config_hash", config_hash_},  {"metrics", metrics},
            {"passed", !failed()},          {"details", details_},
            {"wall_time_s", wall_time_s_}};
}

std::filesystem::path RunReport::write(const std::filesystem::path &dir) const
{
    const auto path = dir / (tag_ + ".report.json");
    io::write_text(path, to_json().dump(2) + "\n");
    return path;
}

bool Summary::failed() const
{
    return !problems.empty() ||
           std::any_of(rows.begin(), rows.end(), [](const SummaryRow &r) { return is_failure(r.status); });
}

Summary summarize_reports(const std::filesystem::path &dir)
{
    namespace fs = std::filesystem;
    require(fs::is_directory(dir), Errc::nothing_to_report, "'" + dir.string() + "' is not a directory");
    std::vector<fs::path> files;
    for (const auto &e : fs::directory_iterator(dir))
    {
        const auto name = e.path().filename().string();
        if (e.is_regular_file() && name.size() > 12 && name.ends_with(".report.json"))
            files.push_back(e.path());
    }
    require(!files.empty(), Errc::nothing_to_report, "no *.report.json files in '" + dir.string() + "'");
    std::sort(files.begin(), files.end());

    Summary out;
    for (const auto &f : files)
    {
        const auto name = f.filename().string();
        try
        {
            const json j = json::parse(io::read_text(f));
            const auto kind = j.at("experiment").get<std::string>();
            const auto &metrics = j.at("metrics");
            if (!metrics.is_array() || metrics.empty())
                throw std::runtime_error("no metrics");
            for (const auto &m : metrics)
            {
                SummaryRow row;
                row.file = name;
                row.metric = kind + "." + m.at("name").get<std::string>();
                row.value = number_from(m.at("value"));
                row.unit = m.at("unit").get<std::string>();
                if (const auto &t = m.at("threshold"); !t.is_null())
                {
                    Threshold th;
                    if (!t.at("min").is_null())
                        th.min = t.at("min").get<double>();
                    if (!t.at("max").is_null())
                        th.max = t.at("max").get<double>();
                    th.expect_fail = t.at("expect").get<std::string>() == "fail";
                    row.threshold = describe(th);
                }
                row.status = status_from_string(m.at("status").get<std::string>());
                out.rows.push_back(std::move(row));
            }
        }
        catch (const std::exception &e)
        {
            out.problems.push_back(name + ": corrupt report (" + e.what() + ")");
        }
    }
    return out;
}

std::string format_summary(const Summary &summary)
{
    std::size_t wm = 6, wv = 5;
    std::vector<std::string> values;
    for (const auto &r : summary.rows)
    {
        values.push_back(fmt::format("{:.6g} {}", r.value, r.unit));
        wm = std::max(wm, r.metric.size());
        wv = std::max(wv, values.back().size());
    }
    std::string s = fmt::format("{:<6}  {:<{}}  {:<{}}  {}\n", "STATUS", "METRIC", wm, "VALUE", wv, "THRESHOLD");
    for (std::size_t i = 0; i < summary.rows.size(); ++i)
    {
        const auto &r = summary.rows[i];
        const std::string mark = is_failure(r.status) ? "  <<<" : "";
        s += fmt::format("{:<6}  {:<{}}  {:<{}}  {}{}\n", to_string(r.status), r.metric, wm, values[i], wv,
                         r.threshold.empty() ? "-" : r.threshold, mark);
    }
    for (const auto &p : summary.problems)
        s += "ERROR   " + p + "\n";
    s += summary.failed() ? "acceptance: FAIL\n" : "acceptance: PASS\n";
    return s;
}

} // namespace mzisim::harness
