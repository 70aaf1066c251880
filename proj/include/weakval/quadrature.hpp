// Copyright 2026 The weakval developers.

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Globally adaptive Gauss-Kronrod (7, 15) integration on a finite interval.
// Node and weight values are the QUADPACK dqk15 constants.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <string>
#include <vector>

#include "weakval/errors.hpp"

namespace weakval::quadrature {

struct options {
    double rel_tol = 1e-13;
    double abs_tol = 0.0;
    int max_intervals = 4000;
    /// Extra abscissae at which the initial partition is split, so that
    /// features much narrower than the interval cannot hide between the
    /// nodes of the first few panels.
    std::vector<double> breakpoints{};
};

struct result {
    double value = 0.0;
    double error_estimate = 0.0;
    int intervals = 0;
};

namespace detail {

// Kronrod-15 abscissae on [-1, 1] (positive half; index 7 is the center).
inline constexpr double kronrod_nodes[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};

inline constexpr double kronrod_weights[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

// Gauss-7 weights; the Gauss nodes are kronrod_nodes[1], [3], [5] and 0.
inline constexpr double gauss_weights[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct panel {
    double err = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    double value = 0.0;
    double abs_value = 0.0;

    bool operator<(const panel &other) const { return err < other.err; }
};

template <class F>
panel evaluate_panel(F &f, double lo, double hi) {
    const double center = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);

    const double fc = f(center);
    double kronrod = kronrod_weights[7] * fc;
    double gauss = gauss_weights[3] * fc;
    double magnitude = kronrod_weights[7] * std::abs(fc);
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kronrod_nodes[j];
        const double f1 = f(center - dx);
        const double f2 = f(center + dx);
        kronrod += kronrod_weights[j] * (f1 + f2);
        magnitude += kronrod_weights[j] * (std::abs(f1) + std::abs(f2));
        if (j % 2 == 1) {
            gauss += gauss_weights[j / 2] * (f1 + f2);
        }
    }

    panel p;
    p.lo = lo;
    p.hi = hi;
    p.value = kronrod * half;
    p.abs_value = magnitude * half;
    p.err = std::abs((kronrod - gauss) * half);
    return p;
}

} // namespace detail

/// Integrates f over [lo, hi]. Refinement stops once the accumulated error
/// estimate drops below max(abs_tol, rel_tol * |integral|) or below the
/// roundoff floor of the accumulated |f| mass. Throws numerical_error when
/// the interval budget is exhausted first.
template <class F>
result integrate(F &&f, double lo, double hi, const options &opt = {}) {
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
        throw validation_error("quadrature: integration bounds must be finite with lo < hi");
    }

    std::vector<double> cuts{lo, hi};
    for (double b : opt.breakpoints) {
        if (b > lo && b < hi) {
            cuts.push_back(b);
        }
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    std::priority_queue<detail::panel> queue;
    double total = 0.0;
    double total_err = 0.0;
    double total_abs = 0.0;
    int n = 0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        auto p = detail::evaluate_panel(f, cuts[i], cuts[i + 1]);
        total += p.value;
        total_err += p.err;
        total_abs += p.abs_value;
        queue.push(p);
        ++n;
    }

    constexpr double eps = std::numeric_limits<double>::epsilon();
    while (true) {
        // The last term is the roundoff floor: once the error estimate falls
        // to a few ulps of the accumulated |f| mass, refinement cannot help.
        const double target = std::max({opt.abs_tol, opt.rel_tol * std::abs(total), 4.0 * eps * total_abs});
        if (total_err <= target) {
            break;
        }
        if (n >= opt.max_intervals) {
            throw numerical_error("quadrature: no convergence after " + std::to_string(n) +
                                  " intervals (error estimate " + weakval::detail::num_str(total_err) +
                                  ", target " + weakval::detail::num_str(target) + ")");
        }
        const auto worst = queue.top();
        queue.pop();
        const double mid = 0.5 * (worst.lo + worst.hi);
        const auto left = detail::evaluate_panel(f, worst.lo, mid);
        const auto right = detail::evaluate_panel(f, mid, worst.hi);
        total += left.value + right.value - worst.value;
        total_err += left.err + right.err - worst.err;
        total_abs += left.abs_value + right.abs_value - worst.abs_value;
        queue.push(left);
        queue.push(right);
        ++n;
    }

    // Re-sum the panels front to back; the incremental total above carries
    // the rounding of every intermediate update.
    std::vector<detail::panel> panels;
    panels.reserve(queue.size());
    while (!queue.empty()) {
        panels.push_back(queue.top());
        queue.pop();
    }
    std::sort(panels.begin(), panels.end(),
              [](const detail::panel &a, const detail::panel &b) { return a.lo < b.lo; });
    double value = 0.0;
    double compensation = 0.0;
    for (const auto &p : panels) {
        const double y = p.value - compensation;
        const double t = value + y;
        compensation = (t - value) - y;
        value = t;
    }

    return {value, total_err, n};
}

} // namespace weakval::quadrature
