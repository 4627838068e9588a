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

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "dpre/params.hpp"
#include "dpre/rng.hpp"
#include "dpre/sde.hpp"

namespace dpre {

/// A path failed; carries the path index and the time of failure.
class PathError : public std::runtime_error {
public:
    PathError(std::uint64_t path_index, double t, const std::string& what)
        : std::runtime_error("path " + std::to_string(path_index) + ": " + what), path_index_(path_index), t_(t)
    {
    }

    std::uint64_t path_index() const { return path_index_; }
    double time() const { return t_; }

private:
    std::uint64_t path_index_;
    double t_;
};

/// Brownian increments for one path: four standard normals per step from the
/// path's own stream, scaled to half-step variance dt/2.
class PathNoise {
public:
    PathNoise(std::uint64_t master_seed, std::uint64_t path_index, double dt)
        : variates_(master_seed, StreamDomain::path_noise, path_index), scale_(std::sqrt(dt / 2.0))
    {
    }

    NoiseIncrement<double> next()
    {
        NoiseIncrement<double> inc;
        inc.first_half = Pair<double>(variates_.normal(), variates_.normal()) * scale_;
        inc.second_half = Pair<double>(variates_.normal(), variates_.normal()) * scale_;
        return inc;
    }

private:
    Variates variates_;
    double scale_;
};

/// Runs one path from X(0) = (1, 0) and calls on_output(k, state) at every
/// output time k * stride, k = 0..output_intervals(). Returns the number of
/// clamp events. Deterministic in (params, path_index).
template <typename OnOutput>
std::uint64_t visit_path(const ModelParams& params, std::uint64_t path_index, OnOutput&& on_output)
{
    const Stepper<double> stepper(params.beta, params.dt, params.scheme);
    PathNoise noise(params.master_seed, path_index, params.dt);
    const std::size_t per_output = params.steps_per_output();
    const std::size_t intervals = params.output_intervals();

    PolymerState<double> state;
    std::uint64_t clamps = 0;
    on_output(std::size_t{0}, state);
    for (std::size_t k = 1; k <= intervals; ++k) {
        try {
            for (std::size_t s = 0; s < per_output; ++s) {
                clamps += static_cast<std::uint64_t>(stepper.advance(state, noise.next()));
            }
        } catch (const StepError& e) {
            throw PathError(path_index, e.time(), e.what());
        }
        state.t = params.output_time(k);
        on_output(k, state);
    }
    return clamps;
}

struct SimulatedPath {
    std::vector<PolymerState<double>> states;  ///< one per output time
    std::uint64_t clamp_events = 0;
};

SimulatedPath simulate_path(const ModelParams& params, std::uint64_t path_index);

} // namespace dpre
