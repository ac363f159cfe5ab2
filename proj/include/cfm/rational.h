// Copyright 2026 The cfm Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Exact rationals. Thin layer over GMP's mpq_class, which keeps every
// result of arithmetic in lowest terms with a positive denominator.

#ifndef CFM_RATIONAL_H_
#define CFM_RATIONAL_H_

#include <gmpxx.h>

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cfm {

using Rational = mpq_class;

// num/den reduced to lowest terms. den must be nonzero.
Rational MakeRational(long num, long den = 1);

// "p/q" or "p" when the denominator is 1.
std::string ToString(const Rational& q);

// Accepts "[-]digits" or "[-]digits/digits". Decimal points are rejected.
std::optional<Rational> ParseRational(std::string_view text);

double ToDouble(const Rational& q);

std::string JoinRationals(const std::vector<Rational>& values,
                          std::string_view sep = ",");

}  // namespace cfm

#endif  // CFM_RATIONAL_H_
