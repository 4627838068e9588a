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

// Exact second moments of (X1, X2). Ito's formula on the two-site system
// closes at second order:
//
//     d/dt E[X1^2]  = (b^2 - 2) E[X1^2] + 2 E[X1 X2]
//     d/dt E[X2^2]  = (b^2 - 2) E[X2^2] + 2 E[X1 X2]
//     d/dt E[X1 X2] = E[X1^2] + E[X2^2] - 2 E[X1 X2]
//
// (the cross-variation d<X1, X2> vanishes because B1 and B2 are independent).
// With s = m11 + m22 and d = m12 this reduces to the 2x2 system
// s' = (b^2 - 2) s + 4 d, d' = s - 2 d, while m11 - m22 = exp((b^2 - 2) t).
// The reduced matrix has det = -2 b^2 and discriminant b^4 + 16 > 0, so its
// eigenvalues are real and distinct for every b.

#include <cmath>
#include <stdexcept>

#include <Eigen/Core>
#include <Eigen/LU>

#include "dpre/beta.hpp"

namespace dpre {

template <typename Scalar = double>
struct MomentVector {
    Scalar m11{};  ///< E[X1^2]
    Scalar m22{};  ///< E[X2^2]
    Scalar m12{};  ///< E[X1 X2]

    Scalar mean_n() const { return m11 + m22; }           ///< E[N_t]
    Scalar mean_z2() const { return m11 + m22 + 2 * m12; } ///< E[Z_t^2]
};

/// Generator of the 3x3 linear moment system acting on (m11, m22, m12).
template <typename Scalar>
Eigen::Matrix<Scalar, 3, 3> moment_generator(const BasicBeta<Scalar>& beta)
{
    const Scalar g = beta.squared() - Scalar(2);
    Eigen::Matrix<Scalar, 3, 3> a;
    a << g, 0, 2,
         0, g, 2,
         1, 1, -2;
    return a;
}

namespace detail {

template <typename Scalar>
struct ReducedEigensystem {
    Eigen::Matrix<Scalar, 2, 1> values;   // (mu_+, mu_-)
    Eigen::Matrix<Scalar, 2, 2> vectors;  // columns (mu + 2, 1)
    Eigen::Matrix<Scalar, 2, 1> coeffs;   // (s, d)(0) = (1, 0) in that basis
};

template <typename Scalar>
ReducedEigensystem<Scalar> reduced_eigensystem(const BasicBeta<Scalar>& beta)
{
    using std::sqrt;
    const Scalar b2 = beta.squared();
    // mu_- has no cancellation; mu_+ follows from the product -2 b^2.
    const Scalar mu_minus = (b2 - Scalar(4) - sqrt(b2 * b2 + Scalar(16))) / Scalar(2);
    const Scalar mu_plus = Scalar(-2) * b2 / mu_minus;

    ReducedEigensystem<Scalar> sys;
    sys.values << mu_plus, mu_minus;
    sys.vectors << mu_plus + Scalar(2), mu_minus + Scalar(2),
                   Scalar(1), Scalar(1);
    sys.coeffs = sys.vectors.inverse() * Eigen::Matrix<Scalar, 2, 1>(Scalar(1), Scalar(0));
    return sys;
}

// (exp(mu t) - 1) / mu, continuous at mu = 0.
template <typename Scalar>
Scalar integrated_exp(Scalar mu, Scalar t)
{
    using std::expm1;
    return mu == Scalar(0) ? t : expm1(mu * t) / mu;
}

template <typename Scalar>
void check_time(Scalar t)
{
    using std::isfinite;
    if (!(t >= Scalar(0)) || !isfinite(t)) {
        throw std::invalid_argument("moment oracle: time must be finite and >= 0");
    }
}

} // namespace detail

/// Second moments at time t from X(0) = (1, 0).
template <typename Scalar>
MomentVector<Scalar> moment_flow(const BasicBeta<Scalar>& beta, Scalar t)
{
    using std::exp;
    detail::check_time(t);
    const auto sys = detail::reduced_eigensystem(beta);
    const Eigen::Matrix<Scalar, 2, 1> growth = (sys.values.array() * t).exp().matrix();
    const Eigen::Matrix<Scalar, 2, 1> sd = sys.vectors * sys.coeffs.cwiseProduct(growth);
    const Scalar diff = exp((beta.squared() - Scalar(2)) * t);
    return {(sd[0] + diff) / Scalar(2), (sd[0] - diff) / Scalar(2), sd[1]};
}

/// E[Z_t^2] = s(t) + 2 d(t).
template <typename Scalar>
Scalar exact_ez2(const BasicBeta<Scalar>& beta, Scalar t)
{
    return moment_flow(beta, t).mean_z2();
}

/// E[Z_t^2] from the quadratic variation of the martingale Z:
/// 1 + b^2 int_0^t E[N_u] du, with the integral in closed form.
template <typename Scalar>
Scalar ez2_from_quadratic_variation(const BasicBeta<Scalar>& beta, Scalar t)
{
    detail::check_time(t);
    const auto sys = detail::reduced_eigensystem(beta);
    Scalar integral = 0;
    for (int k = 0; k < 2; ++k) {
        integral += sys.vectors(0, k) * sys.coeffs[k] * detail::integrated_exp(sys.values[k], t);
    }
    return Scalar(1) + beta.squared() * integral;
}

} // namespace dpre
