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

#include "dpre/simulate.hpp"

#include <optional>

namespace dpre {

std::string_view to_string(StepScheme scheme)
{
    switch (scheme) {
    case StepScheme::euler:
        return "euler";
    case StepScheme::milstein:
        return "milstein";
    case StepScheme::splitting:
        return "splitting";
    }
    return "unknown";
}

std::optional<StepScheme> parse_scheme(std::string_view name)
{
    for (auto s : {StepScheme::euler, StepScheme::milstein, StepScheme::splitting}) {
        if (name == to_string(s)) {
            return s;
        }
    }
    return std::nullopt;
}

SimulatedPath simulate_path(const ModelParams& params, std::uint64_t path_index)
{
    params.validate();
    SimulatedPath path;
    path.states.reserve(params.output_intervals() + 1);
    path.clamp_events = visit_path(params, path_index, [&](std::size_t, const PolymerState<double>& s) {
        path.states.push_back(s);
    });
    return path;
}

} // namespace dpre
