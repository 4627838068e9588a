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

// Time stepping for the two-site stochastic heat equation (Ito sense)
//
//     dX1 = (X2 - X1) dt + b X1 dB1,
//     dX2 = (X1 - X2) dt + b X2 dB2,
//
// with X_i(t) = Z_t(1, i) and X(0) = (1, 0).

#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Core>

#include "dpre/beta.hpp"

namespace dpre {

template <typename Scalar>
using Pair = Eigen::Array<Scalar, 2, 1>;

enum class StepScheme { euler, milstein, splitting };

std::string_view to_string(StepScheme scheme);
std::optional<StepScheme> parse_scheme(std::string_view name);

template <typename Scalar = double>
struct PolymerState {
    Scalar t = Scalar(0);
    Pair<Scalar> x = Pair<Scalar>(Scalar(1), Scalar(0));

    Scalar z() const { return x.sum(); }
};

/// Brownian increments of both sites over one step, given as the two
/// half-step increments (each of variance dt/2). The full increment is their
/// sum; the split is what the splitting scheme consumes.
template <typename Scalar = double>
struct NoiseIncrement {
    Pair<Scalar> first_half = Pair<Scalar>::Zero();
    Pair<Scalar> second_half = Pair<Scalar>::Zero();

    Pair<Scalar> total() const { return first_half + second_half; }

    static NoiseIncrement zero() { return {}; }
    /// Both halves carry half of db, i.e. the bridge midpoint sits on the chord.
    static NoiseIncrement from_total(const Pair<Scalar>& db) { return {db / Scalar(2), db / Scalar(2)}; }
};

template <typename Scalar = double>
struct Observables {
    Scalar z{};
    Scalar n{};
    Scalar overlap{};
    Scalar log_z{};
};

/// A step produced a non-finite state.
class StepError : public std::runtime_error {
public:
    StepError(double t, double x1, double x2)
        : std::runtime_error(describe(t, x1, x2)), t_(t), x1_(x1), x2_(x2)
    {
    }

    double time() const { return t_; }
    double x1() const { return x1_; }
    double x2() const { return x2_; }

private:
    static std::string describe(double t, double x1, double x2)
    {
        std::ostringstream os;
        os.precision(17);
        os << "non-finite state after step at t=" << t << " (x1=" << x1 << ", x2=" << x2 << ")";
        return os.str();
    }

    double t_;
    double x1_;
    double x2_;
};

/// Precomputed constants for repeated steps at fixed (beta, dt, scheme).
///
/// EULER and MILSTEIN clamp negative components to zero and report how many
/// were clamped. SPLITTING applies the exact geometric factor over each half
/// step, the exact drift semigroup exp(L dt) in between, and never leaves the
/// open quadrant once x2 > 0.
template <typename Scalar = double>
class Stepper {
public:
    Stepper(const BasicBeta<Scalar>& beta, Scalar dt, StepScheme scheme)
        : beta_(beta.value()), dt_(dt), scheme_(scheme)
    {
        using std::exp;
        using std::isfinite;
        if (!(dt > Scalar(0)) || !isfinite(dt)) {
            throw std::invalid_argument("step size must be positive and finite");
        }
        damping_ = exp(Scalar(-2) * dt);
        half_ito_ = beta.squared() * dt / Scalar(4);
    }

    Scalar dt() const { return dt_; }
    StepScheme scheme() const { return scheme_; }

    /// Advances the state in place; returns the number of clamped components.
    int advance(PolymerState<Scalar>& state, const NoiseIncrement<Scalar>& noise) const
    {
        int clamped = 0;
        switch (scheme_) {
        case StepScheme::splitting:
            state.x *= (beta_ * noise.first_half - half_ito_).exp();
            relax(state.x);
            state.x *= (beta_ * noise.second_half - half_ito_).exp();
            break;
        case StepScheme::euler:
        case StepScheme::milstein: {
            const Pair<Scalar> db = noise.total();
            Pair<Scalar> next = state.x + drift(state.x) * dt_ + beta_ * state.x * db;
            if (scheme_ == StepScheme::milstein) {
                next += Scalar(0.5) * beta_ * beta_ * state.x * (db.square() - dt_);
            }
            clamped = static_cast<int>((next < Scalar(0)).count());
            state.x = next.max(Scalar(0));
            break;
        }
        }
        state.t += dt_;
        if (!state.x.allFinite()) {
            throw StepError(static_cast<double>(state.t), static_cast<double>(state.x[0]),
                            static_cast<double>(state.x[1]));
        }
        return clamped;
    }

private:
    static Pair<Scalar> drift(const Pair<Scalar>& x) { return Pair<Scalar>(x[1] - x[0], x[0] - x[1]); }

    // exp(L dt): the mean of the two sites is conserved, their half
    // difference decays like exp(-2 dt).
    void relax(Pair<Scalar>& x) const
    {
        const Scalar mean = (x[0] + x[1]) / Scalar(2);
        const Scalar half_diff = (x[0] - x[1]) / Scalar(2) * damping_;
        x = Pair<Scalar>(mean + half_diff, mean - half_diff);
    }

    Scalar beta_;
    Scalar dt_;
    StepScheme scheme_;
    Scalar damping_{};
    Scalar half_ito_{};
};

/// One step of the chosen scheme.
template <typename Scalar>
PolymerState<Scalar> step(PolymerState<Scalar> state, Scalar dt, const NoiseIncrement<Scalar>& noise,
                          StepScheme scheme, const BasicBeta<Scalar>& beta)
{
    Stepper<Scalar>(beta, dt, scheme).advance(state, noise);
    return state;
}

/// Z, N = x1^2 + x2^2, I = N / Z^2 and log Z for a state with Z > 0.
///
/// The overlap is evaluated as 1/2 + r^2/2 with r = (x1 - x2)/(x1 + x2), an
/// exact rewrite that keeps it inside [1/2, 1] under rounding.
template <typename Scalar>
Observables<Scalar> derive_observables(const PolymerState<Scalar>& state)
{
    using std::isfinite;
    using std::log;
    const Scalar z = state.x.sum();
    if (!(z > Scalar(0)) || !isfinite(z)) {
        throw std::domain_error("derive_observables: partition function is not positive");
    }
    const Scalar r = (state.x[0] - state.x[1]) / z;
    return {z, state.x.square().sum(), Scalar(0.5) + Scalar(0.5) * r * r, log(z)};
}

} // namespace dpre
