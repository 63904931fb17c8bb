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

#include <stdexcept>
#include <string>
#include <string_view>

namespace mzisim
{

enum class Errc
{
    invalid_argument,
    arity_mismatch,
    fit_non_convergence,
    insufficient_fringe_coverage,
    unresolvable_rise_time,
    grid_mismatch,
    no_transition,
    grid_violation,
    unachievable_target,
    infeasible_v_max,
    out_of_range,
    dt_too_coarse,
    lock_unstable,
    empty_active_set,
    malformed_pattern,
    config,
    io,
    nothing_to_report,
};

std::string_view to_string(Errc code);

// All library failures are thrown as mzisim::Error; code() distinguishes the failure kind.
class Error : public std::runtime_error
{
public:
    Error(Errc code, const std::string &what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string &what) { throw Error(code, what); }

inline void require(bool cond, Errc code, const std::string &what)
{
    if (!cond)
        fail(code, what);
}

} // namespace mzisim
