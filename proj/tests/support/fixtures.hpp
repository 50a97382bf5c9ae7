// Copyright 2026 The tousched Authors
//
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

#pragma once

#include <vector>

#include "tousched/tousched.hpp"

namespace tousched::fixtures {

// Job lengths 1, 2, 4 on a 20-interval tariff, NOSBY machine.
inline Instance example1() {
  const std::vector<int> c = {9, 7, 9, 13, 3, 11, 3, 13, 6, 7, 60, 4, 10, 6, 9, 3, 14, 0, 4, 6};
  std::vector<Rational> costs(c.begin(), c.end());
  return Instance(costs, {1, 2, 4}, nosby_diagram());
}

inline constexpr StateId kOff{0};
inline constexpr StateId kIdle{1};
inline constexpr StateId kProc{2};

// The optimal schedule: J2 on 7-8, J1 on 14, J3 on 15-18.
inline Schedule example1_optimum() {
  const Transition oo{kOff, kOff}, op{kOff, kProc}, pp{kProc, kProc}, po{kProc, kOff};
  Schedule s;
  s.starts = {14, 7, 15};
  s.transitions = {oo, oo, oo, oo, op, op, pp, pp, po, oo, oo, op, op, pp, pp, pp, pp, pp, po, oo};
  return s;
}

}  // namespace tousched::fixtures
