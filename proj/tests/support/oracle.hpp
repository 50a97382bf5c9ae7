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

// Slow reference implementations for tests. Nothing here is used by the
// solver itself.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <optional>
#include <random>
#include <vector>

#include "tousched/tousched.hpp"

namespace tousched::oracle {

struct BruteForceResult {
  bool feasible = false;
  Cost tec_grid = kInfCost;
  Rational tec;
  Schedule schedule;
};

namespace detail {

// Vertex (layer, state, jobs done) of the explicit graph; layer in 1..h+1.
struct Node {
  Cost dist = kInfCost;
  int prev = -1;
  Transition label{};
  int span = 0;     // intervals covered by the step into this node
  int job = -1;     // job processed by that step, -1 for a plain transition
};

inline BruteForceResult best_for_order(const Instance& inst, const std::vector<int>& order) {
  const int h = inst.horizon();
  const int S = inst.num_states();
  const int n = static_cast<int>(order.size());
  const StateId off = inst.off(), proc = inst.proc();
  auto id = [&](int layer, int s, int k) { return ((layer - 1) * S + s) * (n + 1) + k; };
  std::vector<Node> nodes(static_cast<std::size_t>(h + 1) * S * (n + 1));
  auto relax = [&](int from, int to, Cost w, Transition label, int span, int job) {
    if (nodes[from].dist >= kInfCost) return false;
    if (nodes[from].dist + w < nodes[to].dist) {
      nodes[to] = {nodes[from].dist + w, from, label, span, job};
      return true;
    }
    return false;
  };
  auto energy = [&](int s, int t, int first, int last) {
    Cost total = 0;
    for (int i = first; i <= last; ++i) total += inst.price(i) * inst.power(StateId{s}, StateId{t});
    return total;
  };
  nodes[id(1, off.value, 0)].dist = 0;
  relax(id(1, off.value, 0), id(2, off.value, 0), energy(off.value, off.value, 1, 1), {off, off}, 1, -1);
  for (int layer = 2; layer <= h; ++layer) {
    // zero-duration moves inside the layer
    for (int round = 0; round < S; ++round) {
      for (int k = 0; k <= n; ++k) {
        for (int s = 0; s < S; ++s) {
          for (int t = 0; t < S; ++t) {
            const auto d = inst.diagram().time(StateId{s}, StateId{t});
            if (d && *d == 0 && s != t) relax(id(layer, s, k), id(layer, t, k), 0, {StateId{s}, StateId{t}}, 0, -1);
          }
        }
      }
    }
    for (int k = 0; k <= n; ++k) {
      for (int s = 0; s < S; ++s) {
        const int from = id(layer, s, k);
        if (nodes[from].dist >= kInfCost) continue;
        for (int t = 0; t < S; ++t) {
          const auto d = inst.diagram().time(StateId{s}, StateId{t});
          if (!d || *d == 0 || layer - 1 + *d > h - 1) continue;
          relax(from, id(layer + *d, t, k), energy(s, t, layer, layer + *d - 1), {StateId{s}, StateId{t}}, *d, -1);
        }
        if (s == proc.value && k < n) {
          const int p = inst.processing_time(order[k]);
          if (layer - 1 + p <= h - 1) {
            relax(from, id(layer + p, s, k + 1), energy(s, s, layer, layer + p - 1), {proc, proc}, p, order[k]);
          }
        }
      }
    }
  }
  relax(id(h, off.value, n), id(h + 1, off.value, n), energy(off.value, off.value, h, h), {off, off}, 1, -1);

  BruteForceResult r;
  const int goal = id(h + 1, off.value, n);
  if (nodes[goal].dist >= kInfCost) return r;
  r.feasible = true;
  r.tec_grid = nodes[goal].dist;
  r.tec = inst.to_rational(r.tec_grid);
  r.schedule.starts.assign(inst.job_count(), 0);
  std::vector<Transition> rev;
  for (int v = goal; nodes[v].prev >= 0; v = nodes[v].prev) {
    const Node& nd = nodes[v];
    for (int q = 0; q < nd.span; ++q) rev.push_back(nd.label);
    if (nd.job >= 0) {
      const int layer = v / (S * (n + 1)) + 1;
      r.schedule.starts[nd.job] = layer - nd.span;
    }
  }
  r.schedule.transitions.assign(rev.rbegin(), rev.rend());
  return r;
}

}  // namespace detail

/// Minimum TEC over all job orders, each solved by a DP over the explicit
/// (interval, state, jobs done) graph without switching-cost shortcuts.
inline BruteForceResult brute_force_optimum(const Instance& inst) {
  if (inst.job_count() > 8 || inst.horizon() > 30) {
    throw Error(ErrorCode::kTooLarge, "brute force is limited to n <= 8 and h <= 30");
  }
  std::vector<int> order(inst.job_count());
  std::iota(order.begin(), order.end(), 0);
  BruteForceResult best;
  do {
    BruteForceResult r = detail::best_for_order(inst, order);
    if (r.feasible && r.tec_grid < best.tec_grid) best = std::move(r);
  } while (std::next_permutation(order.begin(), order.end()));
  return best;
}

/// Minimum over every labelling and every start vector; only for tiny h.
inline std::optional<Cost> exhaustive_min(const Instance& inst) {
  const int h = inst.horizon();
  const int n = inst.job_count();
  const int S = inst.num_states();
  std::vector<Transition> labels;
  for (int s = 0; s < S; ++s) {
    for (int t = 0; t < S; ++t) {
      if (inst.duration(StateId{s}, StateId{t}) >= 1) labels.push_back({StateId{s}, StateId{t}});
    }
  }
  double space = std::pow(static_cast<double>(labels.size()), h) * std::pow(static_cast<double>(h), n);
  if (space > 5e7) throw Error(ErrorCode::kTooLarge, "exhaustive enumeration space too large");
  std::optional<Cost> best;
  std::vector<int> pick(h, 0);
  Schedule s;
  s.transitions.resize(h);
  s.starts.assign(n, 1);
  for (;;) {
    for (int i = 0; i < h; ++i) s.transitions[i] = labels[pick[i]];
    std::fill(s.starts.begin(), s.starts.end(), 1);
    for (;;) {
      if (validate(inst, s).ok) {
        const Cost c = tec_grid(inst, s);
        if (!best || c < *best) best = c;
      }
      int q = 0;
      while (q < n && ++s.starts[q] > h) s.starts[q++] = 1;
      if (q == n) break;
    }
    int i = 0;
    while (i < h && ++pick[i] == static_cast<int>(labels.size())) pick[i++] = 0;
    if (i == h) break;
  }
  return best;
}

/// All-pairs shortest paths on an independently built interval-state graph,
/// projected onto the anchor pairs.
inline SwitchingTable floyd_warshall_sigma(const Instance& inst) {
  const int h = inst.horizon();
  const int S = inst.num_states();
  const int V = (h + 1) * S;
  if (V > 600) throw Error(ErrorCode::kTooLarge, "Floyd-Warshall is limited to 600 vertices");
  auto v = [&](int layer, int s) { return (layer - 1) * S + s; };
  std::vector<Cost> d(static_cast<std::size_t>(V) * V, kInfCost);
  auto at = [&](int a, int b) -> Cost& { return d[static_cast<std::size_t>(a) * V + b]; };
  for (int a = 0; a < V; ++a) at(a, a) = 0;
  const int off = inst.off().value, proc = inst.proc().value;
  auto add = [&](int a, int b, Cost w) { at(a, b) = std::min(at(a, b), w); };
  add(v(1, off), v(2, off), inst.price(1) * inst.power(inst.off(), inst.off()));
  add(v(h, off), v(h + 1, off), inst.price(h) * inst.power(inst.off(), inst.off()));
  for (int layer = 2; layer <= h; ++layer) {
    for (int s = 0; s < S; ++s) {
      for (int t = 0; t < S; ++t) {
        const auto dt = inst.diagram().time(StateId{s}, StateId{t});
        if (!dt || layer - 1 + *dt > h - 1) continue;
        Cost w = 0;
        for (int i = layer; i < layer + *dt; ++i) w += inst.price(i) * inst.power(StateId{s}, StateId{t});
        add(v(layer, s), v(layer + *dt, t), w);
      }
    }
  }
  for (int k = 0; k < V; ++k) {
    for (int a = 0; a < V; ++a) {
      const Cost ak = at(a, k);
      if (ak >= kInfCost) continue;
      for (int b = 0; b < V; ++b) {
        const Cost kb = at(k, b);
        if (kb < kInfCost && ak + kb < at(a, b)) at(a, b) = ak + kb;
      }
    }
  }
  SwitchingTable table(h);
  for (int i = 1; i <= h - 1; ++i) {
    const int src = (i == 1) ? v(2, off) : v(i + 1, proc);
    for (int j = i + 1; j <= h; ++j) {
      if (!table.is_anchor_pair(i, j)) continue;
      const int dst = (j == h) ? v(h, off) : v(j, proc);
      table.set(i, j, at(src, dst));
    }
  }
  return table;
}

/// Sum of c_i * P over the labels, written out term by term.
inline Rational termwise_tec(const Instance& inst, const std::vector<Transition>& omega) {
  Rational total(0);
  for (std::size_t i = 0; i < omega.size(); ++i) {
    total = total + inst.costs()[i] * *inst.diagram().power(omega[i].from, omega[i].to);
  }
  return total;
}

/// Feasibility straight from the definitions: jobs inside the horizon and
/// disjoint, proc labels under every job, and the labels spell a walk of the
/// explicit interval-state graph from layer 1 off to layer h+1 off.
inline bool feasible(const Instance& inst, const Schedule& s) {
  const int h = inst.horizon();
  const int S = inst.num_states();
  const int n = inst.job_count();
  if (static_cast<int>(s.starts.size()) != n || static_cast<int>(s.transitions.size()) != h) return false;
  for (const Transition& t : s.transitions) {
    if (t.from.value < 0 || t.from.value >= S || t.to.value < 0 || t.to.value >= S) return false;
  }
  std::vector<int> busy(h + 2, 0);
  for (int j = 0; j < n; ++j) {
    const int a = s.starts[j], b = a + inst.processing_time(j) - 1;
    if (a < 1 || b > h) return false;
    for (int i = a; i <= b; ++i) {
      if (++busy[i] > 1) return false;
      if (!(s.transitions[i - 1] == Transition{inst.proc(), inst.proc()})) return false;
    }
  }
  const Transition oo{inst.off(), inst.off()};
  if (!(s.transitions.front() == oo) || !(s.transitions.back() == oo)) return false;
  // reach[i][q]: state q at the start of interval i
  std::vector<std::vector<char>> reach(h + 2, std::vector<char>(S, 0));
  reach[1][inst.off().value] = 1;
  for (int i = 1; i <= h; ++i) {
    for (bool grew = true; grew;) {
      grew = false;
      for (int a = 0; a < S; ++a) {
        for (int b = 0; b < S; ++b) {
          if (reach[i][a] && !reach[i][b] && inst.duration(StateId{a}, StateId{b}) == 0) reach[i][b] = grew = true;
        }
      }
    }
    const Transition t = s.transitions[i - 1];
    if (!reach[i][t.from.value]) continue;
    const int d = inst.duration(t.from, t.to);
    if (d < 1 || i + d - 1 > h) continue;
    bool same = true;
    for (int k = i; k < i + d; ++k) same = same && s.transitions[k - 1] == t;
    if (same) reach[i + d][t.to.value] = 1;
  }
  return reach[h + 1][inst.off().value];
}

// ---- packing ----

// Tries all k^n assignments.
inline bool exhaustive_pack(const std::vector<int>& cap, const std::vector<int>& jobs) {
  const int k = static_cast<int>(cap.size());
  const int n = static_cast<int>(jobs.size());
  std::vector<int> a(n, 0);
  for (;;) {
    std::vector<int> used(k, 0);
    bool ok = true;
    for (int j = 0; j < n; ++j) used[a[j]] += jobs[j];
    for (int b = 0; b < k; ++b) ok = ok && used[b] <= cap[b];
    if (ok) return true;
    int j = 0;
    while (j < n && ++a[j] == k) a[j++] = 0;
    if (j == n) return false;
  }
}

inline int exhaustive_find(const std::vector<int>& b, const std::vector<int>& jobs) {
  const int k = static_cast<int>(b.size());
  const int n = static_cast<int>(jobs.size());
  std::vector<int> a(n, 0);
  int best = INT32_MAX;
  for (;;) {
    std::vector<int> s(k, 0);
    for (int j = 0; j < n; ++j) s[a[j]] += jobs[j];
    int z = 0;
    for (int q = 0; q < k; ++q) z = std::max(z, std::abs(s[q] - b[q]));
    best = std::min(best, z);
    int j = 0;
    while (j < n && ++a[j] == k) a[j++] = 0;
    if (j == n) return best;
  }
}

// ---- random instances ----

struct RandomSpec {
  int states = 3;
  int min_jobs = 1, max_jobs = 4;
  int max_p = 3;
  int min_h = 8, max_h = 16;
  bool negative = false;      // allow negative prices
  bool fractional = false;    // allow half-integer prices
  bool zero_duration = true;  // allow zero-duration transitions between non-off states
};

/// Random diagram: off = 0, proc = last state, a direct off->proc and
/// proc->off path, the rest filled at random.
inline TransitionDiagram random_diagram(std::mt19937_64& rng, int states, bool zero_duration) {
  auto coin = [&](double p) { return std::uniform_real_distribution<double>(0, 1)(rng) < p; };
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  const int S = states;
  TransitionDiagram::TimeMatrix time(S, std::vector<std::optional<int>>(S));
  TransitionDiagram::PowerMatrix power(S, std::vector<std::optional<Rational>>(S));
  const int off = 0, proc = S - 1;
  for (int s = 0; s < S; ++s) {
    time[s][s] = 1;
    power[s][s] = Rational(s == off ? pick(0, 1) : pick(1, 5));
    for (int t = 0; t < S; ++t) {
      if (s == t || !coin(0.55)) continue;
      const bool can_zero = zero_duration && s != off && t != off;
      time[s][t] = can_zero && coin(0.35) ? 0 : pick(1, 3);
      power[s][t] = Rational(pick(0, 6));
    }
  }
  if (!time[off][proc]) {
    time[off][proc] = pick(1, 3);
    power[off][proc] = Rational(pick(1, 6));
  }
  if (!time[proc][off]) {
    time[proc][off] = pick(1, 2);
    power[proc][off] = Rational(pick(0, 3));
  }
  std::vector<std::string> names;
  for (int s = 0; s < S; ++s) names.push_back(s == off ? "off" : s == proc ? "proc" : "s" + std::to_string(s));
  return TransitionDiagram(names, StateId{off}, StateId{proc}, time, power);
}

/// Random instance that always admits a schedule.
inline Instance random_instance(std::mt19937_64& rng, const RandomSpec& spec) {
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  for (;;) {
    TransitionDiagram d = random_diagram(rng, spec.states, spec.zero_duration);
    const int n = pick(spec.min_jobs, spec.max_jobs);
    std::vector<int> jobs(n);
    for (int& p : jobs) p = pick(1, spec.max_p);
    const int h = pick(spec.min_h, spec.max_h);
    std::vector<Rational> costs(h);
    for (auto& c : costs) {
      int v = spec.negative ? pick(-4, 10) : pick(0, 10);
      c = spec.fractional && pick(0, 3) == 0 ? Rational(2 * v + 1, 2) : Rational(v);
    }
    Instance inst(costs, jobs, d);
    if (fits_window(inst, try_processing_window(inst))) return inst;
  }
}

}  // namespace tousched::oracle
