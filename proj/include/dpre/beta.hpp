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
#include <stdexcept>
#include <string>

namespace dpre {

/// Inverse temperature of the polymer. Always finite and nonnegative.
template <typename Scalar = double>
class BasicBeta {
public:
    explicit BasicBeta(Scalar value) : value_(value)
    {
        using std::isfinite;
        if (!isfinite(value) || value < Scalar(0)) {
            throw std::invalid_argument("beta must be finite and >= 0, got " +
                                        std::to_string(static_cast<double>(value)));
        }
    }

    Scalar value() const { return value_; }
    Scalar squared() const { return value_ * value_; }
    bool is_zero() const { return value_ == Scalar(0); }

private:
    Scalar value_;
};

using Beta = BasicBeta<double>;

} // namespace dpre
