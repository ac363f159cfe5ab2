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

// Text formats for instances and equilibria.
//
// Instance:
//   [market]
//   name = hole1
//   [goods]
//   t1
//   s->t scale=13
//   [agent 1]
//   budget = 30
//   delays = 1,2,3,4,5,6
//   cover: 1,1,1,1,1,1 >= 1
//   cover: t1:1 t2:1 >= 1        (sparse form)
//
// Equilibrium:
//   [prices]      <good> = <q>
//   [lambda]      <agent> = <q>
//   [allocation]  <agent>, <good>, <q>   (nonzero entries only)
//   [segments]    <k>: <agent> <agent> ... lambda = <q>
//
// Numbers are integers or p/q fractions; decimals are rejected.

#ifndef CFM_IO_H_
#define CFM_IO_H_

#include <string>
#include <string_view>

#include "cfm/market.h"

namespace cfm {

MarketInstance ParseInstance(std::string_view text);
std::string WriteInstance(const MarketInstance& instance);

Equilibrium ParseEquilibrium(std::string_view text,
                             const MarketInstance& instance);
std::string WriteEquilibrium(const MarketInstance& instance,
                             const Equilibrium& eq);

std::string ReadFile(const std::string& path);
void WriteFile(const std::string& path, const std::string& contents);

}  // namespace cfm

#endif  // CFM_IO_H_
