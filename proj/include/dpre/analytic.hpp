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

// Closed-form quantities of the two-site polymer: the overlap polynomial
//
//     P_beta(x) = 3 b^2 x^2 - (5 b^2 + 4) x + 2 (1 + b^2),
//
// its roots alpha_-(b) < 1 < alpha_+(b), the free energy -(b^2/2) alpha_-
// and the decay rate lambda = 5 b^2 + 4 - 3 b^2 (1 + alpha_-).
//
// Observed on [1e-3, 1e2]: alpha_- increases monotonically from 1/2 (b -> 0)
// towards 2/3 (b -> inf). Only alpha_- in (0, 1) is a proven bound.

#include <cmath>
#include <limits>
#include <stdexcept>

#include "dpre/beta.hpp"

namespace dpre {

template <typename Scalar = double>
struct AnalyticSolution {
    Scalar beta{};
    Scalar a{};            ///< midpoint of the roots, (5b^2 + 4) / (6b^2)
    Scalar alpha_minus{};  ///< smaller root, in (0, 1)
    Scalar alpha_plus{};   ///< larger root, > 1
    Scalar free_energy{};  ///< -(b^2/2) alpha_minus
    Scalar rate_lambda{};  ///< 5b^2 + 4 - 3b^2 (1 + alpha_minus) > 0
    /// True when b == 0 and the fields hold the b -> 0+ limit
    /// (a and alpha_plus are +inf there).
    bool is_limit = false;
};

/// Evaluates P_beta(x). Rejects b == 0, where the quadratic degenerates.
///
/// Uses the factorisation P_beta(x) = b^2 (3x - 2)(x - 1) + 2 (1 - 2x), which
/// is exact at x = 1 and avoids the large cancelling terms of the expanded
/// form when b is large.
template <typename Scalar>
Scalar eval_poly(const BasicBeta<Scalar>& beta, Scalar x)
{
    if (beta.is_zero()) {
        throw std::domain_error("eval_poly: beta = 0 makes the overlap polynomial linear");
    }
    const Scalar b2 = beta.squared();
    return b2 * (Scalar(3) * x - Scalar(2)) * (x - Scalar(1)) + Scalar(2) * (Scalar(1) - Scalar(2) * x);
}

/// Roots and derived constants of P_beta.
///
/// The discriminant (5b^2+4)^2 - 24 b^2 (1+b^2) reduces to b^4 + 16 b^2 + 16,
/// so it is computed without cancellation. The small root comes from the
/// citardauq form 2C / (B + sqrt(D)) and the large one from the product of
/// the roots, which stays accurate when a ~ 2/(3b^2) blows up.
template <typename Scalar>
AnalyticSolution<Scalar> solve_alpha(const BasicBeta<Scalar>& beta)
{
    using std::sqrt;
    const Scalar b2 = beta.squared();
    const Scalar quad = Scalar(3) * b2;               // leading coefficient
    const Scalar lin = Scalar(5) * b2 + Scalar(4);    // minus the linear coefficient
    const Scalar cst = Scalar(2) * (Scalar(1) + b2);  // constant term
    const Scalar disc = b2 * b2 + Scalar(16) * b2 + Scalar(16);

    AnalyticSolution<Scalar> sol;
    sol.beta = beta.value();
    sol.alpha_minus = Scalar(2) * cst / (lin + sqrt(disc));
    sol.free_energy = beta.is_zero() ? Scalar(0) : -b2 / Scalar(2) * sol.alpha_minus;
    sol.rate_lambda = Scalar(2) * b2 + Scalar(4) - quad * sol.alpha_minus;

    if (beta.is_zero()) {
        sol.a = std::numeric_limits<Scalar>::infinity();
        sol.alpha_plus = std::numeric_limits<Scalar>::infinity();
        sol.is_limit = true;
        return sol;
    }
    sol.a = lin / (Scalar(2) * quad);
    sol.alpha_plus = cst / (quad * sol.alpha_minus);
    return sol;
}

/// p(beta) = -(b^2/2) alpha_-(beta); exactly 0 at b = 0.
template <typename Scalar>
Scalar free_energy(const BasicBeta<Scalar>& beta)
{
    return solve_alpha(beta).free_energy;
}

} // namespace dpre
