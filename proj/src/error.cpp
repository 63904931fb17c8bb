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

#include "mzisim/error.hpp"

namespace mzisim
{

std::string_view to_string(Errc code)
{
    switch (code)
    {
    case Errc::invalid_argument:
        return "invalid argument";
    case Errc::arity_mismatch:
        return "arity mismatch";
    case Errc::fit_non_convergence:
        return "fit did not converge";
    case Errc::insufficient_fringe_coverage:
        return "insufficient fringe coverage";
    case Errc::unresolvable_rise_time:
        return "unresolvable rise time";
    case Errc::grid_mismatch:
        return "grid mismatch";
    case Errc::no_transition:
        return "no transition";
    case Errc::grid_violation:
        return "grid violation";
    case Errc::unachievable_target:
        return "unachievable target";
    case Errc::infeasible_v_max:
        return "infeasible v_max";
    case Errc::out_of_range:
        return "out of range";
    case Errc::dt_too_coarse:
        return "dt too coarse";
    case Errc::lock_unstable:
        return "lock unstable";
    case Errc::empty_active_set:
        return "empty active set";
    case Errc::malformed_pattern:
        return "malformed pattern";
    case Errc::config:
        return "config error";
    case Errc::io:
        return "i/o error";
    case Errc::nothing_to_report:
        return "nothing to report";
    }
    return "unknown error";
}

} // namespace mzisim
