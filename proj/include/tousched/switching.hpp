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
#include <map>
#include <span>
#include <thread>
#include <vector>

#include "tousched/interval_graph.hpp"

namespace tousched {

/// Optimal switching costs between anchor intervals.
///
///   cost(1, i')  : from the initial off state (beginning of interval 2) to
///                  proc at the beginning of i'            (i' < h)
///   cost(i, i')  : from proc right after interval i to proc at i'
///                  (1 < i < i' < h)
///   cost(i, h)   : from proc right after interval i to off at the
///                  beginning of h                         (i > 1)
///
/// Undefined or unreachable pairs hold kInfCost.
class SwitchingTable {
 public:
  SwitchingTable() = default;
  explicit SwitchingTable(int horizon)
      : horizon_(horizon), cost_(static_cast<std::size_t>(horizon + 1) * (horizon + 1), kInfCost) {}

  int horizon() const { return horizon_; }

  Cost cost(int i, int j) const {
    if (i < 1 || j <= i || j > horizon_) return kInfCost;
    return cost_[index(i, j)];
  }
  bool defined(int i, int j) const { return cost(i, j) < kInfCost; }
  void set(int i, int j, Cost value) { cost_[index(i, j)] = value; }

  /// Whether (i, j) is one of the three anchor cases.
  bool is_anchor_pair(int i, int j) const {
    if (i < 1 || j <= i || j > horizon_) return false;
    if (i == 1) return j < horizon_;
    return true;
  }

  friend bool operator==(const SwitchingTable&, const SwitchingTable&) = default;

 private:
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(i) * (horizon_ + 1) + j; }

  int horizon_ = 0;
  std::vector<Cost> cost_;
};

struct SpacesOptions {
  PathAlgorithm algorithm = PathAlgorithm::kAuto;
  int threads = 1;
};

/// Source vertex of the shortest-path tree for anchor i.
inline int anchor_source(const IntervalStateGraph& g, const Instance& instance, int i) {
  return i == 1 ? g.vertex(2, instance.off()) : g.vertex(i + 1, instance.proc());
}

/// Target vertex for anchor pair (i, j).
inline int anchor_target(const IntervalStateGraph& g, const Instance& instance, int j) {
  return j == instance.horizon() ? g.vertex(j, instance.off()) : g.vertex(j, instance.proc());
}

namespace detail {

inline void fill_row(const Instance& instance, const IntervalStateGraph& g, const ShortestPathTree& tree,
                     int i, SwitchingTable& table) {
  const int h = instance.horizon();
  for (int j = i + 1; j <= h; ++j) {
    if (!table.is_anchor_pair(i, j)) continue;
    const int v = anchor_target(g, instance, j);
    if (tree.reached(v)) table.set(i, j, tree.dist[v]);
  }
}

}  // namespace detail

/// Shortest-path pre-processing of all anchor pairs: one tree per anchor,
/// Dijkstra when every price is non-negative, Bellman-Ford otherwise.
inline SwitchingTable spaces(const Instance& instance, const IntervalStateGraph& g,
                             const SpacesOptions& options = {}) {
  const int h = instance.horizon();
  SwitchingTable table(h);
  const bool negative = instance.has_negative_price();
  auto run_rows = [&](int first, int step) {
    for (int i = first; i <= h - 1; i += step) {
      const ShortestPathTree tree =
          shortest_paths(g, anchor_source(g, instance, i), options.algorithm, negative);
      detail::fill_row(instance, g, tree, i, table);
    }
  };
  const int threads = std::max(1, options.threads);
  if (threads == 1) {
    run_rows(1, 1);
  } else {
    // Rows are disjoint, so the result does not depend on scheduling.
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(run_rows, 1 + t, threads);
    for (auto& th : pool) th.join();
  }
  return table;
}

inline SwitchingTable spaces(const Instance& instance, const SpacesOptions& options = {}) {
  return spaces(instance, IntervalStateGraph(instance), options);
}

/// Lazily computed optimal switching behaviours.
///
/// Keeps one parent array per requested anchor. Not thread-safe; each search
/// owns its own cache.
class BehaviorCache {
 public:
  explicit BehaviorCache(const Instance& instance)
      : instance_(&instance), graph_(instance), negative_(instance.has_negative_price()) {}

  const IntervalStateGraph& graph() const { return graph_; }

  /// Labels for the intervals strictly between the anchors (interval 2 on for
  /// i == 1). Throws MalformedBehavior when the pair is unreachable.
  std::vector<Transition> behavior(int i, int j) {
    if (j == i + 1) return {};
    auto it = parents_.find(i);
    if (it == parents_.end()) {
      ShortestPathTree tree =
          shortest_paths(graph_, anchor_source(graph_, *instance_, i), PathAlgorithm::kAuto, negative_);
      it = parents_.emplace(i, std::move(tree.parent)).first;
    }
    ShortestPathTree view;
    view.source = anchor_source(graph_, *instance_, i);
    view.parent = it->second;
    return path_labels(graph_, view, anchor_target(graph_, *instance_, j));
  }

 private:
  const Instance* instance_;
  IntervalStateGraph graph_;
  bool negative_;
  std::map<int, std::vector<int>> parents_;
};

/// Energy of a behaviour between anchors i and j, checking that its labels
/// tile the gap with whole transitions that chain from the start state to
/// the end state.
inline Cost replay_grid(const std::vector<Transition>& behavior, int i, int j, const Instance& instance) {
  const int h = instance.horizon();
  const int first = (i == 1) ? 2 : i + 1;
  const int last = j - 1;
  auto malformed = [&](const std::string& why) -> Cost {
    throw Error(ErrorCode::kMalformedBehavior,
                "behaviour for (" + std::to_string(i) + "," + std::to_string(j) + "): " + why);
  };
  if (static_cast<int>(behavior.size()) != std::max(0, last - first + 1)) {
    return malformed("expected " + std::to_string(std::max(0, last - first + 1)) + " labels, got " +
                     std::to_string(behavior.size()));
  }
  const auto zero = instance.diagram().zero_reach();
  StateId current = (i == 1) ? instance.off() : instance.proc();
  const StateId goal = (j == h) ? instance.off() : instance.proc();
  Cost total = 0;
  for (std::size_t k = 0; k < behavior.size();) {
    const Transition t = behavior[k];
    if (t.from.value < 0 || t.from.value >= instance.num_states() || t.to.value < 0 ||
        t.to.value >= instance.num_states()) {
      return malformed("unknown state");
    }
    const int d = instance.duration(t.from, t.to);
    if (d <= 0) return malformed("transition does not exist or has zero duration");
    if (!zero[current.value][t.from.value]) return malformed("labels do not chain");
    if (k + d > behavior.size()) return malformed("transition cut off by the anchor");
    for (int r = 0; r < d; ++r) {
      if (!(behavior[k + r] == t)) return malformed("transition shorter than its duration");
    }
    const int interval = first + static_cast<int>(k);
    total += instance.energy(t.from, t.to, interval, interval + d - 1);
    current = t.to;
    k += d;
  }
  if (!zero[current.value][goal.value]) return malformed("behaviour does not end in the anchor state");
  return total;
}

inline Rational replay(const std::vector<Transition>& behavior, int i, int j, const Instance& instance) {
  return instance.to_rational(replay_grid(behavior, i, j, instance));
}

/// Multi-source relaxation through the interval-state layers.
///
/// Given values src[k] attached to "a unit of processing ends at interval
/// src_first + k", computes for each target interval t
///   out[t - target_first] = min_k src[k] + cost(src_first + k, t)
/// over pairs with src_first + k < t, without touching the dense table. The
/// cost is one pass over the covered layers.
class GapSweep {
 public:
  explicit GapSweep(const Instance& instance) : instance_(&instance), states_(instance.num_states()) {
    zero_ = instance.diagram().zero_reach();
    moves_.resize(states_);
    for (int s = 0; s < states_; ++s) {
      for (int t = 0; t < states_; ++t) {
        const int d = instance.duration(StateId{s}, StateId{t});
        if (d >= 1) {
          moves_[s].push_back({t, d, instance.power(StateId{s}, StateId{t})});
          max_duration_ = std::max(max_duration_, d);
        }
      }
    }
  }

  void run(std::span<const Cost> src, int src_first, int target_first, std::span<Cost> out) {
    std::fill(out.begin(), out.end(), kInfCost);
    if (src.empty() || out.empty()) return;
    const int proc = instance_->proc().value;
    const int first_layer = src_first + 1;
    const int last_layer = target_first + static_cast<int>(out.size()) - 1;
    if (last_layer < first_layer) return;
    const int layers = last_layer - first_layer + 1;
    buffer_.assign(static_cast<std::size_t>(layers + max_duration_ + 1) * states_, kInfCost);
    auto at = [&](int layer, int s) -> Cost& {
      return buffer_[static_cast<std::size_t>(layer - first_layer) * states_ + s];
    };
    std::vector<Cost> closed(states_);
    const int src_last = src_first + static_cast<int>(src.size()) - 1;
    for (int layer = first_layer; layer <= last_layer; ++layer) {
      const int unit_end = layer - 1;
      if (unit_end <= src_last) {
        const Cost v = src[unit_end - src_first];
        if (v < at(layer, proc)) at(layer, proc) = v;
      }
      bool any = false;
      for (int t = 0; t < states_; ++t) {
        Cost best = kInfCost;
        for (int s = 0; s < states_; ++s) {
          if (zero_[s][t] && at(layer, s) < best) best = at(layer, s);
        }
        closed[t] = best;
        any = any || best < kInfCost;
      }
      if (!any) continue;
      for (int t = 0; t < states_; ++t) at(layer, t) = closed[t];
      if (layer >= target_first) out[layer - target_first] = closed[proc];
      for (int s = 0; s < states_; ++s) {
        if (closed[s] >= kInfCost) continue;
        for (const Move& m : moves_[s]) {
          const int next = layer + m.duration;
          if (next > last_layer) continue;
          const Cost w = instance_->price_sum(layer, next - 1) * m.power;
          Cost& slot = at(next, m.to);
          if (closed[s] + w < slot) slot = closed[s] + w;
        }
      }
    }
  }

 private:
  struct Move {
    int to;
    int duration;
    Cost power;
  };

  const Instance* instance_;
  int states_;
  int max_duration_ = 1;
  std::vector<std::vector<bool>> zero_;
  std::vector<std::vector<Move>> moves_;
  std::vector<Cost> buffer_;
};

}  // namespace tousched
