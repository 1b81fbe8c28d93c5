// Copyright 2026 The crcal Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CRCAL_ERRORS_H
#define CRCAL_ERRORS_H

#include <stdexcept>
#include <string>
#include <vector>

namespace crcal {

/// Bad input to a constructor or operation. The message names the offending field.
struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Ill-conditioned linear algebra (e.g. a singular readout confusion matrix).
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A nonlinear fit that did not converge. Carries the best point reached.
struct FitError : std::runtime_error {
    FitError(const std::string &what, std::vector<double> best_point, double residual)
        : std::runtime_error(what), best_point(std::move(best_point)), residual(residual) {
    }
    std::vector<double> best_point;
    double residual;
};

/// A calibration step could not produce a usable value. `stage` labels the pipeline step.
struct CalibrationError : std::runtime_error {
    CalibrationError(std::string stage, const std::string &what)
        : std::runtime_error(stage.empty() ? what : stage + ": " + what), stage(std::move(stage)) {
    }
    std::string stage;
};

}  // namespace crcal

#endif
