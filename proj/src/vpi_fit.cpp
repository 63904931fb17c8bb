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

// Half-wave voltage fit.
//
//   T(V) = A * [sin^2(pi V / (2 v_pi) + theta)]^n + floor
//
// Outer: log-spaced grid over the v_pi bracket, then golden-section refinement around the best cell.
// Middle: theta on a uniform grid over one period (pi), then golden-section refinement.
// Inner: (A, floor) by closed-form linear least squares.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "mzisim/error.hpp"
#include "mzisim/photonic_core.hpp"

namespace mzisim
{

namespace
{

using std::numbers::pi;

constexpr double golden = 0.6180339887498949;
constexpr int v_pi_grid = 96;
constexpr int theta_grid = 24;
constexpr int golden_iters = 48;

struct Inner
{
    double cost;
    double amplitude;
    double floor;
};

class FitProblem
{
public:
    FitProblem(std::span<const double> v, std::span<const double> t, int exponent)
        : v_(v), t_(t), n_(exponent), sin_(v.size()), cos_(v.size()), basis_(v.size())
    {
    }

    void set_v_pi(double v_pi)
    {
        for (std::size_t i = 0; i < v_.size(); ++i)
        {
            const double a = pi * v_[i] / (2.0 * v_pi);
            sin_[i] = std::sin(a);
            cos_[i] = std::cos(a);
        }
    }

    Inner solve_linear(double theta)
    {
        const double ct = std::cos(theta);
        const double st = std::sin(theta);
        const auto m = static_cast<double>(v_.size());
        double sb = 0.0, st_ = 0.0;
        for (std::size_t i = 0; i < v_.size(); ++i)
        {
            const double u = sin_[i] * ct + cos_[i] * st;
            const double u2 = u * u;
            double b = u2;
            for (int k = 1; k < n_; ++k)
                b *= u2;
            basis_[i] = b;
            sb += b;
            st_ += t_[i];
        }
        const double mb = sb / m;
        const double mt = st_ / m;
        double sbb = 0.0, sbt = 0.0;
        for (std::size_t i = 0; i < v_.size(); ++i)
        {
            const double db = basis_[i] - mb;
            sbb += db * db;
            sbt += db * (t_[i] - mt);
        }
        const double amp = sbb > 0.0 ? sbt / sbb : 0.0;
        const double flo = mt - amp * mb;
        double sse = 0.0;
        for (std::size_t i = 0; i < v_.size(); ++i)
        {
            const double r = t_[i] - amp * basis_[i] - flo;
            sse += r * r;
        }
        return {sse, amp, flo};
    }

    // Best theta for the current v_pi.
    std::pair<double, Inner> solve_theta()
    {
        double best_theta = -pi / 2.0;
        Inner best = solve_linear(best_theta);
        const double step = pi / theta_grid;
        for (int i = 1; i < theta_grid; ++i)
        {
            const double th = -pi / 2.0 + step * i;
            const Inner r = solve_linear(th);
            if (r.cost < best.cost)
            {
                best = r;
                best_theta = th;
            }
        }
        double a = best_theta - step;
        double b = best_theta + step;
        double x1 = b - golden * (b - a);
        double x2 = a + golden * (b - a);
        Inner f1 = solve_linear(x1);
        Inner f2 = solve_linear(x2);
        for (int it = 0; it < golden_iters; ++it)
        {
            if (f1.cost < f2.cost)
            {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - golden * (b - a);
                f1 = solve_linear(x1);
            }
            else
            {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + golden * (b - a);
                f2 = solve_linear(x2);
            }
        }
        double th = 0.5 * (a + b);
        Inner r = solve_linear(th);
        if (best.cost < r.cost)
        {
            r = best;
            th = best_theta;
        }
        // wrap to [-pi/2, pi/2)
        th = std::remainder(th, pi);
        if (th >= pi / 2.0)
            th -= pi;
        return {th, r};
    }

    std::pair<double, Inner> evaluate(double v_pi)
    {
        set_v_pi(v_pi);
        return solve_theta();
    }

private:
    std::span<const double> v_;
    std::span<const double> t_;
    int n_;
    std::vector<double> sin_;
    std::vector<double> cos_;
    std::vector<double> basis_;
};

} // namespace

VpiFit fit_v_pi(std::span<const double> voltages, std::span<const double> transmissions, const FitOptions &opts)
{
    require(voltages.size() == transmissions.size(), Errc::arity_mismatch, "voltage/transmission length mismatch");
    require(voltages.size() >= 5, Errc::insufficient_fringe_coverage, "need at least 5 samples");
    require(opts.fringe_exponent >= 1, Errc::invalid_argument, "fringe exponent must be >= 1");
    for (std::size_t i = 0; i < voltages.size(); ++i)
        require(std::isfinite(voltages[i]) && std::isfinite(transmissions[i]), Errc::invalid_argument,
                "non-finite sample");

    const auto [tmin, tmax] = std::minmax_element(transmissions.begin(), transmissions.end());
    const double contrast = *tmax - *tmin;
    require(contrast > 1e-9 * std::max(std::abs(*tmax), 1e-300), Errc::insufficient_fringe_coverage,
            "transmission does not vary over the sweep");

    const auto [vmin, vmax] = std::minmax_element(voltages.begin(), voltages.end());
    const double span = *vmax - *vmin;
    require(span > 0.0, Errc::insufficient_fringe_coverage, "zero voltage span");

    const double lo = opts.v_pi_min.value_or(span / 20.0);
    const double hi = opts.v_pi_max.value_or(2.0 * span);
    require(lo > 0.0 && lo < hi, Errc::invalid_argument, "invalid v_pi bracket");

    FitProblem prob(voltages, transmissions, opts.fringe_exponent);

    // coarse log grid
    std::vector<double> grid(v_pi_grid);
    std::vector<double> cost(v_pi_grid);
    const double ratio = std::log(hi / lo);
    for (int i = 0; i < v_pi_grid; ++i)
    {
        grid[i] = lo * std::exp(ratio * i / (v_pi_grid - 1));
        cost[i] = prob.evaluate(grid[i]).second.cost;
    }
    const auto best_it = std::min_element(cost.begin(), cost.end());
    const auto best_i = static_cast<int>(best_it - cost.begin());

    // golden refinement in log(v_pi) across the neighbouring cells
    double a = std::log(grid[std::max(0, best_i - 1)]);
    double b = std::log(grid[std::min(v_pi_grid - 1, best_i + 1)]);
    double x1 = b - golden * (b - a);
    double x2 = a + golden * (b - a);
    double f1 = prob.evaluate(std::exp(x1)).second.cost;
    double f2 = prob.evaluate(std::exp(x2)).second.cost;
    for (int it = 0; it < golden_iters; ++it)
    {
        if (f1 < f2)
        {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - golden * (b - a);
            f1 = prob.evaluate(std::exp(x1)).second.cost;
        }
        else
        {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + golden * (b - a);
            f2 = prob.evaluate(std::exp(x2)).second.cost;
        }
    }
    const double v_pi = std::exp(0.5 * (a + b));
    const auto [theta, inner] = prob.evaluate(v_pi);

    const double edge_tol = 1e-6;
    if (!std::isfinite(inner.cost) || v_pi <= lo * (1.0 + edge_tol) || v_pi >= hi * (1.0 - edge_tol))
        fail(Errc::fit_non_convergence, "v_pi optimum on the search bracket edge");
    if (span < v_pi * (1.0 - 1e-9))
        fail(Errc::insufficient_fringe_coverage, "sweep spans less than half a fringe");

    VpiFit fit;
    fit.v_pi = v_pi;
    fit.bias_phase = theta;
    fit.amplitude = inner.amplitude;
    fit.floor = inner.floor;
    fit.residual = std::sqrt(inner.cost / static_cast<double>(voltages.size()));
    return fit;
}

} // namespace mzisim
