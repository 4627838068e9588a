/*
   Copyright 2026 The dpre Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#include "dpre/params.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace dpre {

namespace {

// Ratio num/den rounded to the nearest integer, or -1 if it is not an
// integer within relative rounding.
long long integral_ratio(double num, double den)
{
    const double r = num / den;
    const double k = std::round(r);
    if (k < 1.0 || std::abs(r - k) > 1e-9 * k) {
        return -1;
    }
    return static_cast<long long>(k);
}

} // namespace

void ModelParams::validate() const
{
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw std::invalid_argument("dt must be positive and finite");
    }
    if (!(horizon > 0.0) || !std::isfinite(horizon)) {
        throw std::invalid_argument("horizon must be positive and finite");
    }
    if (!(output_stride >= dt) || !std::isfinite(output_stride)) {
        throw std::invalid_argument("output stride must be finite and >= dt");
    }
    if (n_paths == 0) {
        throw std::invalid_argument("at least one path is required");
    }
    if (integral_ratio(output_stride, dt) < 0) {
        throw std::invalid_argument("output stride " + std::to_string(output_stride) +
                                    " is not a whole number of steps of " + std::to_string(dt));
    }
    if (integral_ratio(horizon, output_stride) < 0) {
        throw std::invalid_argument("horizon " + std::to_string(horizon) +
                                    " is not a whole number of output strides");
    }
}

std::size_t ModelParams::steps_per_output() const
{
    return static_cast<std::size_t>(std::llround(output_stride / dt));
}

std::size_t ModelParams::output_intervals() const
{
    return static_cast<std::size_t>(std::llround(horizon / output_stride));
}

} // namespace dpre
