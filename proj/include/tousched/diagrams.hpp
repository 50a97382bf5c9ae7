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

#include "tousched/core.hpp"

namespace tousched {

/// Three-state diagram off / idle / proc with no standby state.
///
///            T   P
///  off->off   1   0
///  off->proc  2   5
///  proc->off  1   1
///  proc->proc 1   4
///  proc->idle 0   0
///  idle->proc 0   0
///  idle->idle 1   2
inline TransitionDiagram nosby_diagram() {
  using T = std::optional<int>;
  using P = std::optional<Rational>;
  const T n = std::nullopt;
  // state order: off, idle, proc
  TransitionDiagram::TimeMatrix time = {
      {T{1}, n, T{2}},
      {n, T{1}, T{0}},
      {T{1}, T{0}, T{1}},
  };
  TransitionDiagram::PowerMatrix power = {
      {P{Rational(0)}, std::nullopt, P{Rational(5)}},
      {std::nullopt, P{Rational(2)}, P{Rational(0)}},
      {P{Rational(1)}, P{Rational(0)}, P{Rational(4)}},
  };
  return TransitionDiagram({"off", "idle", "proc"}, StateId{0}, StateId{2}, std::move(time), std::move(power));
}

/// Five-state demo diagram with two standby levels.
///
/// Made-up values for exercising larger diagrams. It is not calibrated
/// against any real machine and is not the published two-standby benchmark
/// diagram.
inline TransitionDiagram demo5_diagram() {
  using T = std::optional<int>;
  using P = std::optional<Rational>;
  const T n = std::nullopt;
  const P a = std::nullopt;
  // state order: off, standby_deep, standby_light, idle, proc
  TransitionDiagram::TimeMatrix time = {
      {T{1}, T{1}, n, n, T{3}},
      {T{1}, T{1}, T{1}, n, n},
      {n, T{1}, T{1}, T{0}, T{1}},
      {n, n, T{0}, T{1}, T{0}},
      {T{2}, n, T{1}, T{0}, T{1}},
  };
  TransitionDiagram::PowerMatrix power = {
      {P{Rational(0)}, P{Rational(1)}, a, a, P{Rational(6)}},
      {P{Rational(0)}, P{Rational(1, 2)}, P{Rational(2)}, a, a},
      {a, P{Rational(1)}, P{Rational(3, 2)}, P{Rational(0)}, P{Rational(3)}},
      {a, a, P{Rational(0)}, P{Rational(5, 2)}, P{Rational(0)}},
      {P{Rational(1)}, a, P{Rational(1)}, P{Rational(0)}, P{Rational(4)}},
  };
  return TransitionDiagram({"off", "standby_deep", "standby_light", "idle", "proc"}, StateId{0}, StateId{4},
                           std::move(time), std::move(power));
}

/// Built-in diagram by name ("nosby" or "demo5"); nullopt when unknown.
inline std::optional<TransitionDiagram> builtin_diagram(std::string_view name) {
  if (name == "nosby") return nosby_diagram();
  if (name == "demo5") return demo5_diagram();
  return std::nullopt;
}

}  // namespace tousched
