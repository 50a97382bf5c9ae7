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

#include <algorithm>
#include <compare>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tousched/errors.hpp"
#include "tousched/rational.hpp"

namespace tousched {

/// Energy cost on the instance's integer grid (see Instance::to_rational).
using Cost = std::int64_t;

inline constexpr Cost kInfCost = std::numeric_limits<Cost>::max() / 4;

inline constexpr Cost add_cost(Cost a, Cost b) {
  return (a >= kInfCost || b >= kInfCost) ? kInfCost : a + b;
}

struct StateId {
  int value = 0;
  friend auto operator<=>(const StateId&, const StateId&) = default;
};

/// Label of one interval: the machine is in `from` (from == to) or moving
/// from `from` to `to`.
struct Transition {
  StateId from;
  StateId to;
  friend bool operator==(const Transition&, const Transition&) = default;
};

/// Machine states with transition time and power matrices. A missing entry
/// means the direct transition does not exist.
class TransitionDiagram {
 public:
  using TimeMatrix = std::vector<std::vector<std::optional<int>>>;
  using PowerMatrix = std::vector<std::vector<std::optional<Rational>>>;

  TransitionDiagram(std::vector<std::string> states, StateId off, StateId proc,
                    TimeMatrix time, PowerMatrix power)
      : states_(std::move(states)), off_(off), proc_(proc),
        time_(std::move(time)), power_(std::move(power)) {
    const int n = size();
    auto invalid = [](const std::string& why) {
      throw Error(ErrorCode::kInvalidInstance, "transition diagram: " + why);
    };
    if (n < 2) invalid("at least two states are required");
    if (off.value < 0 || off.value >= n || proc.value < 0 || proc.value >= n) {
      invalid("off/proc state out of range");
    }
    if (off == proc) invalid("off and proc must be distinct states");
    if (static_cast<int>(time_.size()) != n || static_cast<int>(power_.size()) != n) {
      invalid("matrices must be |S| x |S|");
    }
    for (int s = 0; s < n; ++s) {
      if (static_cast<int>(time_[s].size()) != n || static_cast<int>(power_[s].size()) != n) {
        invalid("matrices must be |S| x |S|");
      }
      for (int t = 0; t < n; ++t) {
        const auto& d = time_[s][t];
        const auto& p = power_[s][t];
        if (d.has_value() != p.has_value()) {
          invalid("time and power must be both present or both absent for " +
                  states_[s] + "->" + states_[t]);
        }
        if (d && *d < 0) invalid("negative transition time " + states_[s] + "->" + states_[t]);
        if (p && *p < Rational(0)) {
          invalid("negative transition power " + states_[s] + "->" + states_[t]);
        }
      }
      if (!time_[s][s] || *time_[s][s] != 1) {
        invalid("self transition of " + states_[s] + " must last exactly one interval");
      }
    }
    for (int s = 0; s < n; ++s) {
      for (int t = s + 1; t < n; ++t) {
        if (states_[s] == states_[t]) invalid("duplicate state name " + states_[s]);
      }
    }
  }

  int size() const { return static_cast<int>(states_.size()); }
  StateId off() const { return off_; }
  StateId proc() const { return proc_; }
  const std::string& name(StateId s) const { return states_[s.value]; }
  const std::vector<std::string>& names() const { return states_; }

  std::optional<StateId> find(const std::string& name) const {
    for (int s = 0; s < size(); ++s) {
      if (states_[s] == name) return StateId{s};
    }
    return std::nullopt;
  }

  std::optional<int> time(StateId s, StateId t) const { return time_[s.value][t.value]; }
  std::optional<Rational> power(StateId s, StateId t) const {
    return power_[s.value][t.value];
  }
  bool has(StateId s, StateId t) const { return time_[s.value][t.value].has_value(); }

  const TimeMatrix& time_matrix() const { return time_; }
  const PowerMatrix& power_matrix() const { return power_; }

  void set_power(StateId s, StateId t, Rational p) {
    if (!has(s, t)) throw Error(ErrorCode::kInvalidInstance, "cannot set power of absent transition");
    if (p < Rational(0)) throw Error(ErrorCode::kInvalidInstance, "negative transition power");
    power_[s.value][t.value] = p;
  }

  /// zero_reach()[s][t]: t is reachable from s by zero-duration transitions only.
  std::vector<std::vector<bool>> zero_reach() const {
    const int n = size();
    std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
    for (int s = 0; s < n; ++s) {
      reach[s][s] = true;
      for (int t = 0; t < n; ++t) {
        if (time_[s][t] && *time_[s][t] == 0) reach[s][t] = true;
      }
    }
    for (int k = 0; k < n; ++k) {
      for (int s = 0; s < n; ++s) {
        if (!reach[s][k]) continue;
        for (int t = 0; t < n; ++t) {
          if (reach[k][t]) reach[s][t] = true;
        }
      }
    }
    return reach;
  }

 private:
  std::vector<std::string> states_;
  StateId off_;
  StateId proc_;
  TimeMatrix time_;
  PowerMatrix power_;
};

/// Energy prices over the horizon, job processing times and the machine
/// diagram. Interval indices are 1-based.
///
/// Prices and powers are rationals; internally both are rescaled onto a
/// common integer grid so that c_i * P[s,s'] is an exact integer Cost. One
/// Cost unit equals 1 / (cost_scale * power_scale).
class Instance {
 public:
  Instance(std::vector<Rational> costs, std::vector<int> jobs, TransitionDiagram diagram)
      : costs_(std::move(costs)), jobs_(std::move(jobs)), diagram_(std::move(diagram)) {
    if (costs_.size() < 2) {
      throw Error(ErrorCode::kInvalidInstance, "horizon must contain at least two intervals");
    }
    for (std::size_t j = 0; j < jobs_.size(); ++j) {
      if (jobs_[j] < 1) {
        throw Error(ErrorCode::kInvalidInstance,
                    "processing time of job " + std::to_string(j + 1) + " must be positive");
      }
    }
    build_grid();
  }

  int horizon() const { return static_cast<int>(costs_.size()); }
  int job_count() const { return static_cast<int>(jobs_.size()); }
  int num_states() const { return diagram_.size(); }
  const std::vector<Rational>& costs() const { return costs_; }
  const std::vector<int>& jobs() const { return jobs_; }
  int processing_time(int job) const { return jobs_[job]; }
  const TransitionDiagram& diagram() const { return diagram_; }
  StateId off() const { return diagram_.off(); }
  StateId proc() const { return diagram_.proc(); }

  int total_processing() const { return std::accumulate(jobs_.begin(), jobs_.end(), 0); }

  /// Price of interval i (1-based) on the integer grid.
  Cost price(int i) const { return grid_cost_[i]; }
  /// Sum of grid prices over intervals [first, last], empty when last < first.
  Cost price_sum(int first, int last) const {
    return last < first ? 0 : prefix_[last] - prefix_[first - 1];
  }
  /// Power of s->t on the grid; kInfCost when the transition is absent.
  Cost power(StateId s, StateId t) const { return grid_power_[index(s, t)]; }
  /// Duration of s->t; -1 when the transition is absent.
  int duration(StateId s, StateId t) const { return grid_time_[index(s, t)]; }

  /// Energy of holding label (s, t) over intervals [first, last].
  Cost energy(StateId s, StateId t, int first, int last) const {
    return price_sum(first, last) * power(s, t);
  }

  Rational to_rational(Cost value) const { return Rational(value, cost_scale_ * power_scale_); }
  std::int64_t cost_scale() const { return cost_scale_; }
  std::int64_t power_scale() const { return power_scale_; }
  bool has_negative_price() const {
    return std::any_of(grid_cost_.begin() + 1, grid_cost_.end(), [](Cost c) { return c < 0; });
  }

 private:
  std::size_t index(StateId s, StateId t) const {
    return static_cast<std::size_t>(s.value) * diagram_.size() + t.value;
  }

  static std::int64_t lcm_checked(std::int64_t a, std::int64_t b) {
    const __int128 l = static_cast<__int128>(a) / std::gcd(a, b) * b;
    if (l > (static_cast<__int128>(1) << 40)) {
      throw Error(ErrorCode::kOverflow, "denominators too large to share a common grid");
    }
    return static_cast<std::int64_t>(l);
  }

  void build_grid() {
    cost_scale_ = 1;
    for (const auto& c : costs_) cost_scale_ = lcm_checked(cost_scale_, c.den());
    power_scale_ = 1;
    const int n = diagram_.size();
    for (int s = 0; s < n; ++s) {
      for (int t = 0; t < n; ++t) {
        if (auto p = diagram_.power(StateId{s}, StateId{t})) {
          power_scale_ = lcm_checked(power_scale_, p->den());
        }
      }
    }
    constexpr __int128 kPriceLimit = static_cast<__int128>(1) << 40;
    const int h = horizon();
    grid_cost_.assign(h + 1, 0);
    prefix_.assign(h + 1, 0);
    for (int i = 1; i <= h; ++i) {
      const __int128 v = static_cast<__int128>(costs_[i - 1].num()) * (cost_scale_ / costs_[i - 1].den());
      if (v > kPriceLimit || v < -kPriceLimit) {
        throw Error(ErrorCode::kOverflow, "price of interval " + std::to_string(i) + " too large");
      }
      grid_cost_[i] = static_cast<Cost>(v);
      prefix_[i] = prefix_[i - 1] + grid_cost_[i];
    }
    grid_power_.assign(static_cast<std::size_t>(n) * n, kInfCost);
    grid_time_.assign(static_cast<std::size_t>(n) * n, -1);
    for (int s = 0; s < n; ++s) {
      for (int t = 0; t < n; ++t) {
        const StateId a{s}, b{t};
        if (auto p = diagram_.power(a, b)) {
          const __int128 v = static_cast<__int128>(p->num()) * (power_scale_ / p->den());
          if (v > (static_cast<__int128>(1) << 20)) {
            throw Error(ErrorCode::kOverflow, "transition power on grid too large");
          }
          grid_power_[index(a, b)] = static_cast<Cost>(v);
          grid_time_[index(a, b)] = *diagram_.time(a, b);
        }
      }
    }
    __int128 max_price = 0;
    for (int i = 1; i <= h; ++i) max_price = std::max<__int128>(max_price, grid_cost_[i] < 0 ? -grid_cost_[i] : grid_cost_[i]);
    __int128 max_power = 0;
    for (Cost p : grid_power_) {
      if (p < kInfCost) max_power = std::max<__int128>(max_power, p);
    }
    if (max_price * max_power * h * 4 >= static_cast<__int128>(kInfCost)) {
      throw Error(ErrorCode::kOverflow, "prices and powers too large for exact 64-bit energy sums");
    }
  }

  std::vector<Rational> costs_;
  std::vector<int> jobs_;
  TransitionDiagram diagram_;

  std::int64_t cost_scale_ = 1;
  std::int64_t power_scale_ = 1;
  std::vector<Cost> grid_cost_;
  std::vector<Cost> prefix_;
  std::vector<Cost> grid_power_;
  std::vector<int> grid_time_;
};

/// Job start intervals (1-based, indexed by job) and one label per interval.
struct Schedule {
  std::vector<int> starts;
  std::vector<Transition> transitions;
  friend bool operator==(const Schedule&, const Schedule&) = default;
};

/// Earliest and latest interval in which the machine can be processing.
struct ProcessingWindow {
  int first = 0;
  int last = -1;
  int size() const { return last >= first ? last - first + 1 : 0; }
  bool empty() const { return last < first; }
  friend bool operator==(const ProcessingWindow&, const ProcessingWindow&) = default;
};

/// Total energy cost of a labelling on the instance grid.
inline Cost tec_grid(const Instance& instance, const Schedule& schedule) {
  if (static_cast<int>(schedule.transitions.size()) != instance.horizon()) {
    throw Error(ErrorCode::kInvalidInstance, "schedule must label every interval");
  }
  Cost total = 0;
  for (int i = 1; i <= instance.horizon(); ++i) {
    const Transition& label = schedule.transitions[i - 1];
    const int n = instance.num_states();
    if (label.from.value < 0 || label.from.value >= n || label.to.value < 0 || label.to.value >= n ||
        instance.duration(label.from, label.to) < 0) {
      throw Error(ErrorCode::kAbsentTransition,
                  "interval " + std::to_string(i) + " uses a transition that does not exist");
    }
    total += instance.price(i) * instance.power(label.from, label.to);
  }
  return total;
}

/// Total energy cost: sum over intervals of price times label power.
inline Rational tec(const Instance& instance, const Schedule& schedule) {
  return instance.to_rational(tec_grid(instance, schedule));
}

struct Violation {
  /// Feasibility condition number 1-4, or 0 for a structural defect.
  int condition = 0;
  int interval = 0;  // 0 when not tied to an interval
  int job = 0;       // 1-based, 0 when not tied to a job
  std::string message;
};

struct ValidationReport {
  bool ok = false;
  Rational tec;
  std::vector<Violation> violations;
};

/// Checks the four feasibility conditions and reports every violation.
inline ValidationReport validate(const Instance& instance, const Schedule& schedule) {
  ValidationReport report;
  auto& out = report.violations;
  const int h = instance.horizon();
  const int n = instance.job_count();
  const int states = instance.num_states();
  const StateId off = instance.off();
  const StateId proc = instance.proc();
  const TransitionDiagram& diagram = instance.diagram();
  auto label_name = [&](const Transition& t) {
    auto safe = [&](StateId s) {
      return (s.value >= 0 && s.value < states) ? diagram.name(s) : "#" + std::to_string(s.value);
    };
    return "(" + safe(t.from) + "," + safe(t.to) + ")";
  };

  if (static_cast<int>(schedule.starts.size()) != n) {
    out.push_back({0, 0, 0, "expected " + std::to_string(n) + " start times, got " +
                                std::to_string(schedule.starts.size())});
  }
  if (static_cast<int>(schedule.transitions.size()) != h) {
    out.push_back({0, 0, 0, "expected " + std::to_string(h) + " interval labels, got " +
                                std::to_string(schedule.transitions.size())});
  }
  if (!out.empty()) return report;

  bool labels_known = true;
  for (int i = 1; i <= h; ++i) {
    const Transition& t = schedule.transitions[i - 1];
    if (t.from.value < 0 || t.from.value >= states || t.to.value < 0 || t.to.value >= states) {
      out.push_back({0, i, 0, "unknown state in label " + label_name(t)});
      labels_known = false;
    }
  }

  // Condition 1: at most one job at a time (and every job inside the horizon).
  std::vector<std::pair<int, int>> order;
  for (int j = 0; j < n; ++j) {
    const int start = schedule.starts[j];
    const int end = start + instance.processing_time(j) - 1;
    if (start < 1 || end > h) {
      out.push_back({1, start, j + 1, "job " + std::to_string(j + 1) + " runs outside the horizon"});
      continue;
    }
    order.emplace_back(start, j);
  }
  std::sort(order.begin(), order.end());
  for (std::size_t k = 1; k < order.size(); ++k) {
    const auto [prev_start, prev_job] = order[k - 1];
    const auto [start, job] = order[k];
    if (start <= prev_start + instance.processing_time(prev_job) - 1) {
      out.push_back({1, start, job + 1,
                     "job " + std::to_string(job + 1) + " overlaps job " + std::to_string(prev_job + 1)});
    }
  }

  if (!labels_known) return report;
  const Transition idle_off{off, off};

  // Condition 2: jobs run only in the processing state.
  for (const auto& [start, job] : order) {
    for (int i = start; i < start + instance.processing_time(job); ++i) {
      if (!(schedule.transitions[i - 1] == Transition{proc, proc})) {
        out.push_back({2, i, job + 1,
                       "job " + std::to_string(job + 1) + " runs during " +
                           label_name(schedule.transitions[i - 1])});
      }
    }
  }

  // Condition 3: off during the first and the last interval.
  if (!(schedule.transitions.front() == idle_off)) {
    out.push_back({3, 1, 0, "first interval must be (off,off), found " +
                                label_name(schedule.transitions.front())});
  }
  if (!(schedule.transitions.back() == idle_off)) {
    out.push_back({3, h, 0, "last interval must be (off,off), found " +
                                label_name(schedule.transitions.back())});
  }

  // Condition 4: labels decompose into whole transitions that chain up.
  const auto zero = diagram.zero_reach();
  std::optional<StateId> current;
  for (int i = 1; i <= h;) {
    const Transition t = schedule.transitions[i - 1];
    const int d = instance.duration(t.from, t.to);
    if (d < 0) {
      out.push_back({4, i, 0, "transition " + label_name(t) + " does not exist"});
      current.reset();
      ++i;
      continue;
    }
    if (d == 0) {
      out.push_back({4, i, 0, "zero-duration transition " + label_name(t) + " cannot occupy an interval"});
      current.reset();
      ++i;
      continue;
    }
    if (current && !zero[current->value][t.from.value]) {
      out.push_back({4, i, 0, "transition " + label_name(t) + " cannot follow state " +
                                  diagram.name(*current)});
    }
    int len = 1;
    while (len < d && i + len <= h && schedule.transitions[i + len - 1] == t) ++len;
    if (len < d) {
      out.push_back({4, i, 0, "transition " + label_name(t) + " lasts " + std::to_string(len) +
                                  " intervals instead of " + std::to_string(d)});
    }
    current = t.to;
    i += len;
  }

  if (out.empty()) {
    report.ok = true;
    report.tec = tec(instance, schedule);
  }
  return report;
}

/// Jobs fit the window iff their total length does not exceed it.
inline bool fits_window(const Instance& instance, const ProcessingWindow& window) {
  return !window.empty() && instance.total_processing() <= window.size();
}

}  // namespace tousched
