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

// The Gaussian von Neumann meter. An impulsive coupling of strength g shifts
// the pointer on path i by g * B_i, so the conditioned pointer wavefunction
// is sum_i A_i G(f - g B_i) and every statistic reduces to pair overlaps of
// shifted profiles.
//
// Profile convention (everything in this module depends on it):
//
//     G(f) = (2 pi Df^2)^(-1/4) exp(-f^2 / (4 Df^2))
//
// so that G^2 integrates to one and the reading distribution G^2 has
// standard deviation Df. The pair overlaps then close as
//
//     K(a, b) = Int G(f-a) G(f-b) df          = exp(-(a-b)^2 / (8 Df^2))
//     M(a, b) = Int f G(f-a) G(f-b) df        = (a+b)/2 * K(a, b)
//
// and the conditioned mean shift is
//
//     <f> = sum_ij Re(A_i A_j*) M(g B_i, g B_j)
//           -------------------------------------
//           sum_ij Re(A_i A_j*) K(g B_i, g B_j)
//
// Small Df recovers the per-path probabilities (the cross overlaps die off
// as exp(-gap^2 / 8 Df^2)); large Df recovers Re of the eigenvalue-weighted
// relative amplitudes, with the error falling off as Df^-2.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "weakval/core.hpp"
#include "weakval/errors.hpp"
#include "weakval/quadrature.hpp"

namespace weakval {

/// Threshold on the post-selected norm below which conditioned pointer
/// statistics are undefined. Kept separate from the amplitude cutoff: a
/// finite-width meter keeps the norm positive even when the bare transition
/// amplitude sums to zero exactly.
inline constexpr double default_norm_cutoff = 1e-14;

/// Gaussian meter profile plus the eigenvalues it couples to.
class meter_config {
  public:
    meter_config(double width, double coupling, Eigen::VectorXd eigenvalues)
        : width_(width), coupling_(coupling), eigenvalues_(std::move(eigenvalues)) {
        if (!(width_ > 0.0) || !std::isfinite(width_)) {
            throw validation_error("meter_config: width must be positive and finite");
        }
        if (!std::isfinite(coupling_)) {
            throw validation_error("meter_config: coupling must be finite");
        }
        if (eigenvalues_.size() < 2 || !eigenvalues_.allFinite()) {
            throw validation_error("meter_config: need at least two finite eigenvalues");
        }
    }

    meter_config(double width, Eigen::VectorXd eigenvalues)
        : meter_config(width, 1.0, std::move(eigenvalues)) {}

    double width() const { return width_; }
    double coupling() const { return coupling_; }
    const Eigen::VectorXd &eigenvalues() const { return eigenvalues_; }
    Eigen::Index dim() const { return eigenvalues_.size(); }

    meter_config with_width(double width) const {
        return meter_config(width, coupling_, eigenvalues_);
    }
    meter_config with_coupling(double coupling) const {
        return meter_config(width_, coupling, eigenvalues_);
    }

    /// Branch shift g * B_i of path i.
    double shift(Eigen::Index i) const { return coupling_ * eigenvalues_[i]; }

  private:
    double width_;
    double coupling_;
    Eigen::VectorXd eigenvalues_;
};

/// A set of path amplitudes coupled to a meter.
class measurement_setup {
  public:
    measurement_setup(path_set paths, meter_config meter)
        : paths_(std::move(paths)), meter_(std::move(meter)) {
        if (paths_.dim() != meter_.dim()) {
            throw validation_error("measurement_setup: path count and eigenvalue count differ");
        }
    }

    const path_set &paths() const { return paths_; }
    const meter_config &meter() const { return meter_; }
    Eigen::Index dim() const { return paths_.dim(); }

    measurement_setup with_meter(meter_config meter) const {
        return measurement_setup(paths_, std::move(meter));
    }

  private:
    path_set paths_;
    meter_config meter_;
};

enum class shift_method { closed_form, quadrature };

struct pointer_stats {
    double norm = 0.0;       ///< post-selection weight <Phi|Phi>
    double mean_shift = 0.0; ///< conditioned mean reading <f>
    shift_method method = shift_method::closed_form;
};

/// Meter profile G(f - center).
inline double gaussian_amplitude(double f, double center, double width) {
    constexpr double two_pi = 6.28318530717958647692528676655900577;
    const double d = f - center;
    return std::pow(two_pi * width * width, -0.25) * std::exp(-d * d / (4.0 * width * width));
}

/// Overlap Int G(f-a) G(f-b) df.
inline double overlap_kernel(double a, double b, double width) {
    const double d = a - b;
    return std::exp(-d * d / (8.0 * width * width));
}

/// First moment Int f G(f-a) G(f-b) df.
inline double first_moment_kernel(double a, double b, double width) {
    return 0.5 * (a + b) * overlap_kernel(a, b, width);
}

namespace detail {

// The closed forms are evaluated at the reduced width Df/|g| against the
// bare eigenvalues, with the coupling restored as an overall factor on the
// first moment. Written this way, rescaling (g, Df) -> (gamma g, Df) and
// (g, Df/gamma) feed bit-near-identical inputs into the same code path,
// which keeps the gamma-equivalence identity tight in floating point.
inline double reduced_width(const meter_config &m) {
    const double g = std::abs(m.coupling());
    return g == 0.0 ? std::numeric_limits<double>::infinity() : m.width() / g;
}

struct reduced_moments {
    double norm = 0.0;  // sum_ij Re(A_i A_j*) K_ij at the reduced width
    double first = 0.0; // sum_ij Re(A_i A_j*) (B_i + B_j)/2 K_ij
};

inline reduced_moments pointer_moments(const path_set &paths, const Eigen::VectorXd &b,
                                       double reduced_width) {
    const auto &a = paths.amplitudes();
    reduced_moments m;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        const double w = std::norm(a[i]);
        m.norm += w;
        m.first += w * b[i];
    }
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        for (Eigen::Index j = i + 1; j < a.size(); ++j) {
            const double cross = 2.0 * (a[i] * std::conj(a[j])).real();
            if (cross == 0.0) {
                continue;
            }
            const double gap = (b[i] - b[j]) / reduced_width;
            const double k = std::exp(-gap * gap / 8.0);
            m.norm += cross * k;
            m.first += cross * 0.5 * (b[i] + b[j]) * k;
        }
    }
    // <Phi|Phi> is nonnegative; near-perfect cancellation can leave a tiny
    // negative rounding residue.
    m.norm = std::max(m.norm, 0.0);
    return m;
}

inline reduced_moments pointer_moments(const measurement_setup &s) {
    return pointer_moments(s.paths(), s.meter().eigenvalues(), reduced_width(s.meter()));
}

/// |sum_i A_i G(f - g B_i)|^2, not yet normalized.
inline double density_unnormalized(const measurement_setup &s, double f) {
    const auto &a = s.paths().amplitudes();
    cplx amp(0.0, 0.0);
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        amp += a[i] * gaussian_amplitude(f, s.meter().shift(i), s.meter().width());
    }
    return std::norm(amp);
}

struct pointer_support {
    double lo = 0.0;
    double hi = 0.0;
    std::vector<double> centers;
};

// Integration window: 10 widths plus 10 units beyond the extreme shifts,
// where the Gaussian tails are far below double-precision resolution.
inline pointer_support support_window(const measurement_setup &s) {
    pointer_support w;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (Eigen::Index i = 0; i < s.dim(); ++i) {
        const double shift = s.meter().shift(i);
        lo = std::min(lo, shift);
        hi = std::max(hi, shift);
        w.centers.push_back(shift);
    }
    const double pad = 10.0 * s.meter().width() + 10.0;
    w.lo = lo - pad;
    w.hi = hi + pad;
    return w;
}

} // namespace detail

/// Post-selection weight <Phi|Phi> = sum_ij Re(A_i A_j*) K(g B_i, g B_j).
inline double postselect_norm(const measurement_setup &setup) {
    return detail::pointer_moments(setup).norm;
}

/// Normalized reading density |sum_i A_i G(f - g B_i)|^2 / <Phi|Phi>.
inline double pointer_density(const measurement_setup &setup, double f,
                              double norm_cutoff = default_norm_cutoff) {
    const double norm = postselect_norm(setup);
    if (!(norm > norm_cutoff)) {
        throw forbidden_transition("pointer_density: post-selection weight " +
                                       detail::num_str(norm) + " is below the cutoff",
                                   norm);
    }
    return detail::density_unnormalized(setup, f) / norm;
}

/// Conditioned mean pointer shift, closed form.
inline pointer_stats mean_pointer_shift(const measurement_setup &setup,
                                        double norm_cutoff = default_norm_cutoff) {
    const auto m = detail::pointer_moments(setup);
    if (!(m.norm > norm_cutoff)) {
        throw forbidden_transition("mean_pointer_shift: post-selection weight " +
                                       detail::num_str(m.norm) + " is below the cutoff",
                                   m.norm);
    }
    return {m.norm, setup.meter().coupling() * (m.first / m.norm), shift_method::closed_form};
}

/// Conditioned mean pointer shift by adaptive quadrature of the reading
/// density; the independent cross-check of the closed form.
inline pointer_stats mean_pointer_shift_quadrature(const measurement_setup &setup,
                                                   double norm_cutoff = default_norm_cutoff) {
    const auto window = detail::support_window(setup);
    quadrature::options opt;
    opt.rel_tol = 5e-13;
    opt.max_intervals = 20000;
    // Seed the initial partition across each lobe out to +-8 widths: a lobe
    // tail that ends inside an otherwise empty panel is invisible to the
    // error estimator, and the mass beyond 8 widths is below 1e-15 of the
    // lobe. Interference structure lives between adjacent lobes and is
    // covered by the same cuts.
    for (double c : window.centers) {
        for (double k : {-8.0, -3.0, -1.0, 0.0, 1.0, 3.0, 8.0}) {
            opt.breakpoints.push_back(c + k * setup.meter().width());
        }
    }

    const auto den = quadrature::integrate(
        [&](double f) { return detail::density_unnormalized(setup, f); }, window.lo, window.hi,
        opt);
    if (!(den.value > norm_cutoff)) {
        throw forbidden_transition("mean_pointer_shift_quadrature: post-selection weight " +
                                       detail::num_str(den.value) + " is below the cutoff",
                                   den.value);
    }
    const auto num = quadrature::integrate(
        [&](double f) { return f * detail::density_unnormalized(setup, f); }, window.lo,
        window.hi, opt);
    return {den.value, num.value / den.value, shift_method::quadrature};
}

struct sweep_row {
    double width = 0.0;
    bool forbidden = false;
    double norm = 0.0;
    double mean_shift = std::numeric_limits<double>::quiet_NaN();
    /// |mean_shift - coupling * strong mean|; NaN when undefined.
    double err_strong = std::numeric_limits<double>::quiet_NaN();
    /// |mean_shift - coupling * Re(weak value)|; NaN when undefined.
    double err_weak = std::numeric_limits<double>::quiet_NaN();
};

struct sweep_result {
    std::vector<sweep_row> rows;
    /// coupling * sum_i omega_i B_i; NaN when every path is closed.
    double strong_reference = std::numeric_limits<double>::quiet_NaN();
    /// coupling * Re(sum_i B_i alpha_i); NaN when the transition is forbidden.
    double weak_reference = std::numeric_limits<double>::quiet_NaN();
};

/// Evaluates the mean shift across meter widths and attaches the distance to
/// the two limiting references. Widths must be strictly ascending.
inline sweep_result sweep_width(const measurement_setup &setup, const std::vector<double> &widths,
                                double norm_cutoff = default_norm_cutoff,
                                bool use_quadrature = false) {
    if (widths.empty()) {
        throw validation_error("sweep_width: need at least one width");
    }
    for (std::size_t i = 0; i < widths.size(); ++i) {
        if (!(widths[i] > 0.0) || !std::isfinite(widths[i])) {
            throw validation_error("sweep_width: widths must be positive and finite");
        }
        if (i > 0 && !(widths[i] > widths[i - 1])) {
            throw validation_error("sweep_width: widths must be strictly ascending");
        }
    }

    sweep_result out;
    const observable obs(setup.meter().eigenvalues());
    const double g = setup.meter().coupling();
    try {
        out.strong_reference = g * strong_mean(setup.paths(), obs);
    } catch (const no_open_path &) {
    }
    try {
        out.weak_reference = g * weak_value(setup.paths(), obs).real();
    } catch (const forbidden_transition &) {
    }

    for (double width : widths) {
        sweep_row row;
        row.width = width;
        const auto probe = setup.with_meter(setup.meter().with_width(width));
        try {
            const auto stats = use_quadrature ? mean_pointer_shift_quadrature(probe, norm_cutoff)
                                              : mean_pointer_shift(probe, norm_cutoff);
            row.norm = stats.norm;
            row.mean_shift = stats.mean_shift;
            row.err_strong = std::abs(stats.mean_shift - out.strong_reference);
            row.err_weak = std::abs(stats.mean_shift - out.weak_reference);
        } catch (const forbidden_transition &e) {
            row.forbidden = true;
            row.norm = e.magnitude();
        }
        out.rows.push_back(row);
    }
    return out;
}

/// Least-squares slope of log10(err_weak) against log10(width) over the last
/// `tail_rows` usable sweep rows: the convergence-rate diagnostic for the
/// inaccurate-meter limit. NaN when fewer than two usable rows exist.
inline double weak_convergence_slope(const sweep_result &sweep, std::size_t tail_rows = 3) {
    std::vector<std::pair<double, double>> pts;
    for (const auto &row : sweep.rows) {
        if (!row.forbidden && std::isfinite(row.err_weak) && row.err_weak > 0.0) {
            pts.emplace_back(std::log10(row.width), std::log10(row.err_weak));
        }
    }
    if (pts.size() > tail_rows) {
        pts.erase(pts.begin(), pts.end() - static_cast<std::ptrdiff_t>(tail_rows));
    }
    if (pts.size() < 2) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    double mx = 0.0, my = 0.0;
    for (const auto &[x, y] : pts) {
        mx += x;
        my += y;
    }
    mx /= static_cast<double>(pts.size());
    my /= static_cast<double>(pts.size());
    double sxy = 0.0, sxx = 0.0;
    for (const auto &[x, y] : pts) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    return sxy / sxx;
}

/// Checks the coupling/width trade-off: amplifying the coupling by gamma at
/// fixed width must equal gamma times the mean shift at width Df/gamma.
/// Returns the two sides of the identity.
inline std::pair<double, double> scaling_equivalence_check(const measurement_setup &setup,
                                                           double gamma,
                                                           double norm_cutoff = default_norm_cutoff) {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) {
        throw validation_error("scaling_equivalence_check: gamma must be positive and finite");
    }
    const auto &m = setup.meter();
    const auto boosted = setup.with_meter(m.with_coupling(gamma * m.coupling()));
    const auto narrowed = setup.with_meter(m.with_width(m.width() / gamma));
    const double lhs = mean_pointer_shift(boosted, norm_cutoff).mean_shift;
    const double rhs = gamma * mean_pointer_shift(narrowed, norm_cutoff).mean_shift;
    return {lhs, rhs};
}

} // namespace weakval
