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

#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace weakval {

namespace detail {
inline std::string num_str(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}
} // namespace detail

/// An input fails a structural precondition (dimension mismatch,
/// non-Hermitian matrix, malformed setup document, ...).
class validation_error : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// The post-selection has numerically vanishing probability, so conditioned
/// quantities (relative amplitudes, mean pointer shifts) are undefined.
class forbidden_transition : public std::runtime_error {
  public:
    explicit forbidden_transition(const std::string &msg, double magnitude = 0.0)
        : std::runtime_error(msg), magnitude_(magnitude) {}

    /// Magnitude of the vanishing quantity: |total amplitude| or the
    /// post-selected norm, depending on which guard fired.
    double magnitude() const noexcept { return magnitude_; }

  private:
    double magnitude_;
};

/// Every path amplitude is zero; path probabilities are undefined.
class no_open_path : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// An operation that assumes one measurement regime was invoked outside it,
/// e.g. eigenvalue classification with overlapping pointer lobes.
class regime_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A numerical procedure failed to reach its accuracy target.
class numerical_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

} // namespace weakval
