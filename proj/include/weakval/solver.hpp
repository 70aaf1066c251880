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

// Constructive inversion of the two-path weak value: given the initial
// coefficients a_i, eigenvalues B_1 != B_2 and any complex target Z, choose
//
//     eta_1 = Z - B_2,   eta_2 = B_1 - Z
//
// so that (B_1 eta_1 + B_2 eta_2) / (eta_1 + eta_2) = Z with the denominator
// pinned to B_1 - B_2, and post-select on phi with b_i = (eta_i / a_i)*.
// The eta pair is one gauge of a one-complex-parameter family; any nonzero
// rescaling gives the same phi up to a global phase.
//
// A note on attainable accuracy: the weak value of the *stored* states
// differs from Z by roughly |eta_1 eta_2 / (eta_1 + eta_2)| units of
// rounding, because that factor multiplies any relative perturbation of the
// coefficients. The residual check therefore evaluates the weak value with
// error-free transformations (so it measures the stored states, not summation
// noise), and the constructor finishes with a few single-bit nudges of the
// coefficients to recover most of the final rounding.

#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>

#include "weakval/core.hpp"
#include "weakval/errors.hpp"

namespace weakval {

/// Two-path target problem: realize weak value Z of the observable with
/// eigenvalues (B_1, B_2) on the initial coefficients (a_1, a_2).
struct target_problem {
    Eigen::Vector2cd initial;
    Eigen::Vector2d eigenvalues;
    cplx target;
};

namespace detail {

// Error-free transformations and a minimal double-double layer; enough to
// evaluate sum_i c_i conj(phi_i) psi_i without summation rounding.
struct dd {
    double hi = 0.0;
    double lo = 0.0;
};

inline dd two_sum(double a, double b) {
    const double s = a + b;
    const double bb = s - a;
    return {s, (a - (s - bb)) + (b - bb)};
}

inline dd two_prod(double a, double b) {
    const double p = a * b;
    return {p, std::fma(a, b, -p)};
}

inline dd dd_renorm(double hi, double lo) {
    const dd s = two_sum(hi, lo);
    return s;
}

inline dd dd_add(dd a, dd b) {
    dd s = two_sum(a.hi, b.hi);
    return dd_renorm(s.hi, s.lo + a.lo + b.lo);
}

inline dd dd_sub(dd a, dd b) { return dd_add(a, {-b.hi, -b.lo}); }

inline dd dd_mul_double(dd a, double b) {
    dd p = two_prod(a.hi, b);
    return dd_renorm(p.hi, p.lo + a.lo * b);
}

inline double dd_value(dd a) { return a.hi + a.lo; }

struct cdd {
    dd re;
    dd im;
};

inline cdd cdd_add(cdd a, cdd b) { return {dd_add(a.re, b.re), dd_add(a.im, b.im)}; }

/// conj(a) * b with error-free real products.
inline cdd conj_prod(cplx a, cplx b) {
    // re = ar*br + ai*bi, im = ar*bi - ai*br
    const dd rr = two_prod(a.real(), b.real());
    const dd ii = two_prod(a.imag(), b.imag());
    const dd ri = two_prod(a.real(), b.imag());
    const dd ir = two_prod(a.imag(), b.real());
    return {dd_add(rr, ii), dd_sub(ri, ir)};
}

inline cdd cdd_scale(cdd a, double s) { return {dd_mul_double(a.re, s), dd_mul_double(a.im, s)}; }

/// a * z for complex double z.
inline cdd cdd_mul_cplx(cdd a, cplx z) {
    const dd re = dd_sub(dd_mul_double(a.re, z.real()), dd_mul_double(a.im, z.imag()));
    const dd im = dd_add(dd_mul_double(a.re, z.imag()), dd_mul_double(a.im, z.real()));
    return {re, im};
}

/// |<phi|B|psi>/<phi|psi> - z| and |<phi|psi>|, evaluated in compensated
/// arithmetic so the answer reflects the stored coefficients.
struct residual_eval {
    double residual = 0.0;
    double overlap = 0.0;
};

inline residual_eval weak_residual(const Eigen::VectorXcd &psi, const Eigen::VectorXcd &phi,
                                   const Eigen::VectorXd &b, cplx z) {
    cdd numerator{};
    cdd denominator{};
    for (Eigen::Index i = 0; i < psi.size(); ++i) {
        const cdd eta = conj_prod(phi[i], psi[i]);
        denominator = cdd_add(denominator, eta);
        numerator = cdd_add(numerator, cdd_scale(eta, b[i]));
    }
    const cdd defect = cdd_add(numerator, cdd_mul_cplx(denominator, cplx(-z.real(), -z.imag())));
    const double overlap = std::hypot(dd_value(denominator.re), dd_value(denominator.im));
    residual_eval out;
    out.overlap = overlap;
    out.residual = overlap > 0.0
                       ? std::hypot(dd_value(defect.re), dd_value(defect.im)) / overlap
                       : std::numeric_limits<double>::infinity();
    return out;
}

inline void fix_global_phase(Eigen::VectorXcd &coeffs) {
    for (Eigen::Index i = 0; i < coeffs.size(); ++i) {
        const double mag = std::abs(coeffs[i]);
        if (mag > 0.0) {
            const cplx rotation = std::conj(coeffs[i]) / mag;
            coeffs *= rotation;
            coeffs[i] = cplx(mag, 0.0); // exact after the rotation above
            return;
        }
    }
}

inline double nudge(double x, int ulps) {
    const double toward =
        ulps > 0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
    for (int k = 0; k < std::abs(ulps); ++k) {
        x = std::nextafter(x, toward);
    }
    return x;
}

// Greedy single-bit descent on the stored coefficients. The residual of an
// amplification target magnifies the final rounding of each coefficient by
// |eta_1 eta_2 / (eta_1 + eta_2)|; exploring +-2 ulps per real component
// typically recovers one to two orders of magnitude of it.
inline void polish_coefficients(Eigen::VectorXcd &phi, const Eigen::VectorXcd &psi,
                                const Eigen::VectorXd &b, cplx z) {
    double best = weak_residual(psi, phi, b, z).residual;
    constexpr int steps[4] = {1, -1, 2, -2};
    for (int sweep = 0; sweep < 3; ++sweep) {
        bool improved = false;
        for (Eigen::Index i = 0; i < phi.size(); ++i) {
            for (int part = 0; part < 2; ++part) {
                const double original = part == 0 ? phi[i].real() : phi[i].imag();
                if (part == 1 && original == 0.0) {
                    continue; // keep the phase-fixed component exactly real
                }
                double chosen = original;
                for (int step : steps) {
                    const double candidate = nudge(original, step);
                    if (part == 0) {
                        phi[i].real(candidate);
                    } else {
                        phi[i].imag(candidate);
                    }
                    const double r = weak_residual(psi, phi, b, z).residual;
                    if (r < best) {
                        best = r;
                        chosen = candidate;
                        improved = true;
                    }
                }
                if (part == 0) {
                    phi[i].real(chosen);
                } else {
                    phi[i].imag(chosen);
                }
            }
        }
        if (!improved) {
            break;
        }
    }
}

inline pure_state build_postselection(const Eigen::Vector2cd &initial,
                                      const Eigen::Vector2cd &eta, const Eigen::Vector2d &b,
                                      cplx target) {
    for (int i = 0; i < 2; ++i) {
        if (!(std::abs(initial[i]) > 0.0)) {
            throw validation_error("solve_postselection: initial coefficients must be nonzero");
        }
    }
    Eigen::VectorXcd coeffs(2);
    coeffs[0] = std::conj(eta[0] / initial[0]);
    coeffs[1] = std::conj(eta[1] / initial[1]);
    const double norm = coeffs.norm();
    if (!(norm > 0.0)) {
        throw validation_error("solve_postselection: degenerate construction");
    }
    coeffs /= norm;
    fix_global_phase(coeffs);

    const Eigen::VectorXcd psi_normalized = pure_state(initial).coeffs();
    polish_coefficients(coeffs, psi_normalized, b, target);
    return pure_state(std::move(coeffs));
}

} // namespace detail

/// Post-selection state phi realizing weak value Z, via the gauge
/// eta_1 = Z - B_2, eta_2 = B_1 - Z. Z equal to one eigenvalue is legal and
/// closes the other path. The global phase makes the first nonzero
/// coefficient real positive.
inline pure_state solve_postselection(const target_problem &problem) {
    if (!(std::isfinite(problem.target.real()) && std::isfinite(problem.target.imag()))) {
        throw validation_error("solve_postselection: target must be finite");
    }
    if (!problem.eigenvalues.allFinite() || problem.eigenvalues[0] == problem.eigenvalues[1]) {
        throw validation_error("solve_postselection: eigenvalues must be finite and distinct");
    }
    Eigen::Vector2cd eta;
    eta[0] = problem.target - problem.eigenvalues[1];
    eta[1] = problem.eigenvalues[0] - problem.target;
    return detail::build_postselection(problem.initial, eta, problem.eigenvalues, problem.target);
}

/// Plug-back residual |weak value(psi, phi; B) - target| at zero Hamiltonian.
/// Evaluated with compensated arithmetic, so the result measures how well
/// the stored states realize the target rather than summation rounding.
inline double verify_target(const pure_state &psi, const pure_state &phi, const observable &obs,
                            cplx target, double amplitude_cutoff = default_amplitude_cutoff) {
    if (psi.dim() != phi.dim() || psi.dim() != obs.dim()) {
        throw validation_error("verify_target: dimensions differ");
    }
    const auto eval = detail::weak_residual(psi.coeffs(), phi.coeffs(), obs.eigenvalues(), target);
    if (eval.overlap <= amplitude_cutoff) {
        throw forbidden_transition("verify_target: |<phi|psi>| = " + detail::num_str(eval.overlap) +
                                       " is below the cutoff",
                                   eval.overlap);
    }
    return eval.residual;
}

inline double verify_target(const target_problem &problem, const pure_state &phi,
                            double amplitude_cutoff = default_amplitude_cutoff) {
    return verify_target(pure_state(problem.initial), phi, observable(problem.eigenvalues),
                         problem.target, amplitude_cutoff);
}

/// Nearly orthogonal post-selection via eta = (1, -1 + epsilon): the weak
/// value (B_1 - B_2 + epsilon B_2) / epsilon grows like 1/epsilon while the
/// overlap |<phi|psi>| shrinks proportionally to epsilon. Returns the state
/// and the predicted weak value. Amplification needs epsilon << 1; the
/// endpoint epsilon = 1 closes path 2 and returns B_1.
inline std::pair<pure_state, cplx> near_orthogonal_amplification(const pure_state &psi,
                                                                 const observable &obs,
                                                                 double epsilon) {
    if (psi.dim() != 2 || obs.dim() != 2) {
        throw validation_error("near_orthogonal_amplification: two-path problem required");
    }
    if (!(epsilon > 0.0) || !(epsilon <= 1.0)) {
        throw validation_error("near_orthogonal_amplification: epsilon must lie in (0, 1]");
    }
    const Eigen::Vector2d b = obs.eigenvalues();
    Eigen::Vector2cd eta;
    eta[0] = cplx(1.0, 0.0);
    eta[1] = cplx(-1.0 + epsilon, 0.0);
    const cplx predicted = (b[0] - b[1] + epsilon * b[1]) / epsilon;
    Eigen::Vector2cd initial = psi.coeffs();
    pure_state phi = detail::build_postselection(initial, eta, b, predicted);
    return {std::move(phi), predicted};
}

} // namespace weakval
