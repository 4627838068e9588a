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

#pragma once

#include <cstddef>
#include <cstdint>

#include "dpre/beta.hpp"
#include "dpre/sde.hpp"

namespace dpre {

/// Physical input (beta) plus discretisation, horizon and sampling controls.
struct ModelParams {
    Beta beta{1.0};
    double dt = 1e-3;
    double horizon = 10.0;
    std::size_t n_paths = 10000;
    StepScheme scheme = StepScheme::splitting;
    double output_stride = 0.1;
    std::uint64_t master_seed = 42;

    /// Throws std::invalid_argument unless dt > 0, stride >= dt, and both
    /// stride/dt and horizon/stride are integers up to rounding.
    void validate() const;

    std::size_t steps_per_output() const;
    /// Number of output intervals; outputs are recorded at k * stride for
    /// k = 0..output_intervals().
    std::size_t output_intervals() const;
    double output_time(std::size_t k) const { return static_cast<double>(k) * output_stride; }
};

} // namespace dpre
