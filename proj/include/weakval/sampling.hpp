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

// Monte Carlo simulation of single post-selected pointer readings.
//
// Readings are drawn from the conditioned density by rejection sampling.
// The proposal is an equal-weight mixture of the squared meter profiles
// centered on the open-path shifts; the envelope constant is estimated on a
// grid and padded, and a proposal that still pierces it aborts the run (it
// would mean the bound, not the sample, is wrong). Sample index i draws from
// its own counter substream, so batches are reproducible for a given
// (setup, n, seed) no matter how the work is scheduled.

#pragma once

#include <cmath>
#include <cstdint>
#include <exception>
#include <string>
#include <thread>
#include <vector>

#include "weakval/errors.hpp"
#include "weakval/pointer.hpp"
#include "weakval/rng.hpp"

namespace weakval {

struct sample_batch {
    std::vector<double> readings;
    std::uint64_t seed = 0;
    measurement_setup setup;
};

struct empirical_summary {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t count = 0;
    /// Per-eigenvalue counts; filled only by strong-regime classification.
    std::vector<std::size_t> outcome_counts;
};

namespace detail {

struct proposal_mixture {
    std::vector<double> centers; // open-path shifts
    double width = 0.0;
    double envelope = 0.0; // C with density <= C * proposal everywhere

    double pdf(double f) const {
        constexpr double inv_sqrt_two_pi = 0.39894228040143267793994605993438;
        double q = 0.0;
        for (double c : centers) {
            const double z = (f - c) / width;
            q += std::exp(-0.5 * z * z);
        }
        return q * inv_sqrt_two_pi / (width * static_cast<double>(centers.size()));
    }
};

inline proposal_mixture build_proposal(const measurement_setup &setup, double norm) {
    proposal_mixture mix;
    mix.width = setup.meter().width();
    for (Eigen::Index i = 0; i < setup.dim(); ++i) {
        if (std::abs(setup.paths().amplitudes()[i]) > 0.0) {
            mix.centers.push_back(setup.meter().shift(i));
        }
    }

    // Envelope from the density/proposal ratio on a 4096-point grid over the
    // padded support, with a 20% safety margin and one factor of the
    // dimension on top; the interference cross terms between lobes stay
    // within that headroom.
    const auto window = support_window(setup);
    constexpr int grid_points = 4096;
    double max_ratio = 0.0;
    for (int k = 0; k < grid_points; ++k) {
        const double f = window.lo + (window.hi - window.lo) * (static_cast<double>(k) + 0.5) /
                                         static_cast<double>(grid_points);
        const double q = mix.pdf(f);
        if (!(q > 0.0)) {
            continue; // both tails vanish below double precision here
        }
        const double p = density_unnormalized(setup, f) / norm;
        max_ratio = std::max(max_ratio, p / q);
    }
    mix.envelope = static_cast<double>(setup.dim()) * 1.2 * max_ratio;
    return mix;
}

inline double draw_reading(const measurement_setup &setup, double norm,
                           const proposal_mixture &mix, std::uint64_t stream_key,
                           std::uint64_t max_attempts) {
    const auto m = static_cast<std::uint64_t>(mix.centers.size());
    for (std::uint64_t attempt = 0; attempt < max_attempts; ++attempt) {
        const std::uint64_t base = 4 * attempt;
        std::uint64_t component = rng::bits(stream_key, base) % m;
        const double z = rng::normal(stream_key, base + 1); // consumes base+1, base+2
        const double f = mix.centers[component] + mix.width * z;
        const double p = density_unnormalized(setup, f) / norm;
        const double bound = mix.envelope * mix.pdf(f);
        if (p > bound) {
            throw numerical_error("sample_pointer: envelope violated at f = " + detail::num_str(f) +
                                  " (density " + detail::num_str(p) + " > bound " +
                                  detail::num_str(bound) + ")");
        }
        if (rng::uniform01(stream_key, base + 3) * bound <= p) {
            return f;
        }
    }
    throw numerical_error("sample_pointer: acceptance stalled after " +
                          std::to_string(max_attempts) + " proposals for one reading");
}

} // namespace detail

/// Draws n independent readings from the conditioned pointer density.
/// Identical (setup, n, seed) produce identical batches for any thread
/// count; threads partition the sample indices, not the random stream.
inline sample_batch sample_pointer(const measurement_setup &setup, std::size_t n,
                                   std::uint64_t seed, double norm_cutoff = default_norm_cutoff,
                                   unsigned threads = 1) {
    if (n < 1) {
        throw validation_error("sample_pointer: need at least one draw");
    }
    const double norm = postselect_norm(setup);
    if (!(norm > norm_cutoff)) {
        throw forbidden_transition("sample_pointer: post-selection weight " +
                                       detail::num_str(norm) + " is below the cutoff",
                                   norm);
    }

    const auto mix = detail::build_proposal(setup, norm);
    // Expected attempts per accepted reading equal the envelope constant;
    // the cap only trips on a broken bound.
    const auto max_attempts =
        static_cast<std::uint64_t>(1000.0 + 100.0 * std::max(mix.envelope, 1.0));

    sample_batch batch{std::vector<double>(n), seed, setup};

    auto worker = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const std::uint64_t stream = rng::derive_stream(seed, i);
            batch.readings[i] = detail::draw_reading(setup, norm, mix, stream, max_attempts);
        }
    };

    const std::size_t worker_count =
        std::min<std::size_t>(std::max(1u, threads), std::max<std::size_t>(n, 1));
    if (worker_count == 1) {
        worker(0, n);
        return batch;
    }

    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> failures(worker_count);
    const std::size_t chunk = (n + worker_count - 1) / worker_count;
    for (std::size_t w = 0; w < worker_count; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(n, begin + chunk);
        pool.emplace_back([&, w, begin, end] {
            try {
                worker(begin, end);
            } catch (...) {
                failures[w] = std::current_exception();
            }
        });
    }
    for (auto &t : pool) {
        t.join();
    }
    for (const auto &failure : failures) {
        if (failure) {
            std::rethrow_exception(failure);
        }
    }
    return batch;
}

/// Sample mean and its standard error (Bessel-corrected deviation / sqrt(n)).
inline empirical_summary empirical_stats(const sample_batch &batch) {
    const auto &r = batch.readings;
    if (r.size() < 2) {
        throw validation_error("empirical_stats: need at least two readings");
    }
    double mean = 0.0;
    for (double x : r) {
        mean += x;
    }
    mean /= static_cast<double>(r.size());
    double ss = 0.0;
    for (double x : r) {
        ss += (x - mean) * (x - mean);
    }
    const double variance = ss / static_cast<double>(r.size() - 1);

    empirical_summary s;
    s.mean = mean;
    s.std_error = std::sqrt(variance / static_cast<double>(r.size()));
    s.count = r.size();
    return s;
}

/// Assigns every reading to the nearest branch shift g * B_i and counts per
/// eigenvalue. Only meaningful when the lobes are disjoint, so the meter
/// width must be below 0.2 times the smallest open-path shift gap.
inline std::vector<std::size_t> classify_strong(const sample_batch &batch) {
    const auto &setup = batch.setup;
    const auto &amps = setup.paths().amplitudes();

    double min_gap = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < setup.dim(); ++i) {
        if (!(std::abs(amps[i]) > 0.0)) {
            continue;
        }
        for (Eigen::Index j = i + 1; j < setup.dim(); ++j) {
            if (!(std::abs(amps[j]) > 0.0)) {
                continue;
            }
            min_gap = std::min(min_gap, std::abs(setup.meter().shift(i) - setup.meter().shift(j)));
        }
    }
    if (!(setup.meter().width() < 0.2 * min_gap)) {
        throw regime_error("classify_strong: meter width " + detail::num_str(setup.meter().width()) +
                           " does not resolve the smallest branch gap " + detail::num_str(min_gap));
    }

    std::vector<std::size_t> counts(static_cast<std::size_t>(setup.dim()), 0);
    for (double f : batch.readings) {
        Eigen::Index best = 0;
        double best_distance = std::abs(f - setup.meter().shift(0));
        for (Eigen::Index i = 1; i < setup.dim(); ++i) {
            const double distance = std::abs(f - setup.meter().shift(i));
            if (distance < best_distance) {
                best_distance = distance;
                best = i;
            }
        }
        ++counts[static_cast<std::size_t>(best)];
    }
    return counts;
}

} // namespace weakval
