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

// States, unitary evolution, virtual-path amplitudes and the quantities
// derived from them: path probabilities, strong means, and weak values.
//
// Conventions used throughout: hbar = 1, so Hamiltonian-times-time products
// are dimensionless phases; the computational basis |1>, ..., |d> indexes
// the virtual paths; all scalars are double-precision complex.

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <limits>
#include <string>

#include "weakval/errors.hpp"

namespace weakval {

using cplx = std::complex<double>;

/// Threshold on |sum of path amplitudes| below which a transition counts as
/// forbidden and relative amplitudes are undefined.
inline constexpr double default_amplitude_cutoff = 1e-12;

inline constexpr double hermiticity_tolerance = 1e-12;

/// Normalized pure state of a d-level system, d >= 2.
class pure_state {
  public:
    explicit pure_state(Eigen::VectorXcd coeffs) : coeffs_(std::move(coeffs)) {
        if (coeffs_.size() < 2) {
            throw validation_error("pure_state: dimension must be at least 2");
        }
        if (!coeffs_.allFinite()) {
            throw validation_error("pure_state: coefficients must be finite");
        }
        const double norm = coeffs_.norm();
        if (!(norm > 0.0)) {
            throw validation_error("pure_state: zero vector cannot be normalized");
        }
        // Rescaling a vector that is already unit length to machine precision
        // would only churn the low bits, so leave it untouched then.
        if (std::abs(norm - 1.0) > 64.0 * std::numeric_limits<double>::epsilon()) {
            coeffs_ /= norm;
        }
    }

    /// Computational basis state |index+1> of a d-level system.
    static pure_state basis(Eigen::Index dim, Eigen::Index index) {
        if (dim < 2 || index < 0 || index >= dim) {
            throw validation_error("pure_state::basis: index out of range");
        }
        Eigen::VectorXcd c = Eigen::VectorXcd::Zero(dim);
        c[index] = 1.0;
        return pure_state(std::move(c));
    }

    Eigen::Index dim() const { return coeffs_.size(); }
    const Eigen::VectorXcd &coeffs() const { return coeffs_; }
    cplx operator[](Eigen::Index i) const { return coeffs_[i]; }

  private:
    Eigen::VectorXcd coeffs_;
};

/// Hermitian d x d matrix; plays the role of a Hamiltonian or of an
/// observable given in matrix form.
class hermitian_op {
  public:
    explicit hermitian_op(Eigen::MatrixXcd matrix) : matrix_(std::move(matrix)) {
        if (matrix_.rows() < 2 || matrix_.rows() != matrix_.cols()) {
            throw validation_error("hermitian_op: matrix must be square with dimension >= 2");
        }
        if (!matrix_.allFinite()) {
            throw validation_error("hermitian_op: entries must be finite");
        }
        const double deviation = (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
        if (deviation > hermiticity_tolerance) {
            throw validation_error("hermitian_op: matrix differs from its adjoint by " +
                                   detail::num_str(deviation));
        }
    }

    static hermitian_op zero(Eigen::Index dim) {
        return hermitian_op(Eigen::MatrixXcd::Zero(dim, dim));
    }

    Eigen::Index dim() const { return matrix_.rows(); }
    const Eigen::MatrixXcd &matrix() const { return matrix_; }

  private:
    Eigen::MatrixXcd matrix_;
};

/// Observable diagonal in the computational (path) basis: B = sum_i |i> B_i <i|.
class observable {
  public:
    explicit observable(Eigen::VectorXd eigenvalues) : eigenvalues_(std::move(eigenvalues)) {
        if (eigenvalues_.size() < 2) {
            throw validation_error("observable: need at least two eigenvalues");
        }
        if (!eigenvalues_.allFinite()) {
            throw validation_error("observable: eigenvalues must be finite");
        }
    }

    /// Projector onto path `index`: eigenvalue 1 there, 0 elsewhere.
    static observable projector(Eigen::Index dim, Eigen::Index index) {
        if (dim < 2 || index < 0 || index >= dim) {
            throw validation_error("observable::projector: index out of range");
        }
        Eigen::VectorXd b = Eigen::VectorXd::Zero(dim);
        b[index] = 1.0;
        return observable(std::move(b));
    }

    /// Route number operator: eigenvalue i on path i (1-based).
    static observable route_number(Eigen::Index dim) {
        if (dim < 2) {
            throw validation_error("observable::route_number: dimension must be at least 2");
        }
        Eigen::VectorXd b(dim);
        for (Eigen::Index i = 0; i < dim; ++i) {
            b[i] = static_cast<double>(i + 1);
        }
        return observable(std::move(b));
    }

    static observable identity(Eigen::Index dim) {
        if (dim < 2) {
            throw validation_error("observable::identity: dimension must be at least 2");
        }
        return observable(Eigen::VectorXd::Ones(dim));
    }

    Eigen::Index dim() const { return eigenvalues_.size(); }
    const Eigen::VectorXd &eigenvalues() const { return eigenvalues_; }

  private:
    Eigen::VectorXd eigenvalues_;
};

/// Per-path complex amplitudes A_i together with their stored total, the
/// plain left-to-right sum of the entries.
class path_set {
  public:
    explicit path_set(Eigen::VectorXcd amplitudes)
        : amplitudes_(std::move(amplitudes)), total_(0.0, 0.0) {
        if (amplitudes_.size() < 2) {
            throw validation_error("path_set: need at least two paths");
        }
        if (!amplitudes_.allFinite()) {
            throw validation_error("path_set: amplitudes must be finite");
        }
        for (Eigen::Index i = 0; i < amplitudes_.size(); ++i) {
            total_ += amplitudes_[i];
        }
    }

    Eigen::Index dim() const { return amplitudes_.size(); }
    const Eigen::VectorXcd &amplitudes() const { return amplitudes_; }

    /// Total transition amplitude A = sum_i A_i.
    cplx total() const { return total_; }

    /// Incoherent weight sum_i |A_i|^2.
    double weight() const { return amplitudes_.squaredNorm(); }

  private:
    Eigen::VectorXcd amplitudes_;
    cplx total_;
};

namespace detail {

struct spectral {
    Eigen::MatrixXcd vectors;
    Eigen::VectorXd values;
};

inline spectral decompose(const hermitian_op &h) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h.matrix());
    if (solver.info() != Eigen::Success) {
        throw numerical_error("hermitian eigendecomposition failed");
    }
    return {solver.eigenvectors(), solver.eigenvalues()};
}

inline Eigen::MatrixXcd propagator_from(const spectral &s, double t) {
    Eigen::VectorXcd phases(s.values.size());
    for (Eigen::Index i = 0; i < s.values.size(); ++i) {
        phases[i] = std::polar(1.0, -s.values[i] * t);
    }
    return s.vectors * phases.asDiagonal() * s.vectors.adjoint();
}

inline void check_time(double t, const char *who) {
    if (!std::isfinite(t)) {
        throw validation_error(std::string(who) + ": time must be finite");
    }
}

} // namespace detail

/// Unitary exp(-i H t) computed by spectral decomposition of H.
inline Eigen::MatrixXcd propagator(const hermitian_op &h, double t) {
    detail::check_time(t, "propagator");
    return detail::propagator_from(detail::decompose(h), t);
}

/// Evolves `state` with exp(-i h t).
inline pure_state evolve(const pure_state &state, const hermitian_op &h, double t) {
    if (h.dim() != state.dim()) {
        throw validation_error("evolve: state and Hamiltonian dimensions differ");
    }
    return pure_state(propagator(h, t) * state.coeffs());
}

/// Transition amplitude <phi| exp(-i h t) |psi>.
inline cplx transition_amplitude(const pure_state &psi, const pure_state &phi,
                                 const hermitian_op &h, double t) {
    if (psi.dim() != phi.dim() || psi.dim() != h.dim()) {
        throw validation_error("transition_amplitude: dimensions differ");
    }
    detail::check_time(t, "transition_amplitude");
    return phi.coeffs().dot(detail::propagator_from(detail::decompose(h), t) * psi.coeffs());
}

/// Virtual-path amplitudes A_i = <phi|U(t - tau)|i><i|U(tau)|psi>, with the
/// basis insertion at time tau. Their sum equals the transition amplitude
/// for every tau; the conventional choice is the midpoint.
inline path_set path_amplitudes(const pure_state &psi, const pure_state &phi,
                                const hermitian_op &h, double t, double tau) {
    if (psi.dim() != phi.dim() || psi.dim() != h.dim()) {
        throw validation_error("path_amplitudes: dimensions differ");
    }
    detail::check_time(t, "path_amplitudes");
    detail::check_time(tau, "path_amplitudes");
    const auto spec = detail::decompose(h);
    const Eigen::VectorXcd reached = detail::propagator_from(spec, tau) * psi.coeffs();
    const Eigen::VectorXcd collected =
        (phi.coeffs().adjoint() * detail::propagator_from(spec, t - tau)).transpose();
    return path_set(collected.cwiseProduct(reached));
}

inline path_set path_amplitudes(const pure_state &psi, const pure_state &phi,
                                const hermitian_op &h, double t) {
    return path_amplitudes(psi, phi, h, t, 0.5 * t);
}

/// Relative amplitudes alpha_i = A_i / sum_j A_j; they sum to one whenever
/// the transition is allowed.
inline Eigen::VectorXcd relative_amplitudes(const path_set &paths,
                                            double amplitude_cutoff = default_amplitude_cutoff) {
    const cplx total = paths.total();
    const double magnitude = std::abs(total);
    if (magnitude <= amplitude_cutoff) {
        throw forbidden_transition("relative_amplitudes: total amplitude magnitude " +
                                       detail::num_str(magnitude) + " is below the cutoff",
                                   magnitude);
    }
    return paths.amplitudes() / total;
}

/// Path probabilities omega_i = |A_i|^2 / sum_j |A_j|^2, the frequencies an
/// accurate which-path measurement would record.
inline Eigen::VectorXd path_probabilities(const path_set &paths) {
    const double weight = paths.weight();
    if (!(weight > 0.0)) {
        throw no_open_path("path_probabilities: every path amplitude vanishes");
    }
    return paths.amplitudes().cwiseAbs2() / weight;
}

/// Mean value recorded by an accurate meter: sum_i omega_i B_i. Always lies
/// between the smallest and largest eigenvalue carried by an open path.
inline double strong_mean(const path_set &paths, const observable &obs) {
    if (obs.dim() != paths.dim()) {
        throw validation_error("strong_mean: observable dimension differs from path count");
    }
    return path_probabilities(paths).dot(obs.eigenvalues());
}

/// Weak value sum_i B_i alpha_i of a path-diagonal observable.
inline cplx weak_value(const path_set &paths, const observable &obs,
                       double amplitude_cutoff = default_amplitude_cutoff) {
    if (obs.dim() != paths.dim()) {
        throw validation_error("weak_value: observable dimension differs from path count");
    }
    const Eigen::VectorXcd alpha = relative_amplitudes(paths, amplitude_cutoff);
    return alpha.cwiseProduct(obs.eigenvalues().cast<cplx>()).sum();
}

/// Weak value for a pre- and post-selected pair with evolution, insertion at
/// t/2. For h = 0 this reduces to <phi|B|psi> / <phi|psi>.
inline cplx weak_value(const pure_state &psi, const pure_state &phi, const hermitian_op &h,
                       double t, const observable &obs,
                       double amplitude_cutoff = default_amplitude_cutoff) {
    return weak_value(path_amplitudes(psi, phi, h, t), obs, amplitude_cutoff);
}

} // namespace weakval
