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
#include <queue>
#include <tuple>
#include <vector>

#include "tousched/core.hpp"

namespace tousched {

/// Time expansion of the transition diagram over the horizon.
///
/// Vertex v(i, s) means "at the beginning of interval i the machine is in
/// state s". Layers run from 1 to h + 1; layers 1 and h + 1 only hold the off
/// state. An edge v(i, s) -> v(i + T[s,s'], s') spans intervals
/// [i, i + T - 1] labelled (s, s') and costs the price of those intervals
/// times P[s, s']. Interior edges must finish no later than the beginning of
/// interval h.
class IntervalStateGraph {
 public:
  struct Edge {
    int from = 0;
    int to = 0;
    Cost weight = 0;
    Transition label;
    int duration = 0;
  };

  explicit IntervalStateGraph(const Instance& instance)
      : horizon_(instance.horizon()), states_(instance.num_states()) {
    const int h = horizon_;
    const StateId off = instance.off();
    const int slots = (h + 1) * states_;
    exists_.assign(slots, false);
    exists_[vertex(1, off)] = true;
    exists_[vertex(h + 1, off)] = true;
    for (int i = 2; i <= h; ++i) {
      for (int s = 0; s < states_; ++s) exists_[vertex(i, StateId{s})] = true;
    }

    std::vector<Edge> edges;
    edges.push_back({vertex(1, off), vertex(2, off), instance.energy(off, off, 1, 1), {off, off}, 1});
    for (int i = 2; i <= h; ++i) {
      for (int s = 0; s < states_; ++s) {
        for (int t = 0; t < states_; ++t) {
          const StateId a{s}, b{t};
          const int d = instance.duration(a, b);
          if (d < 0 || (i - 1) + d > h - 1) continue;
          edges.push_back({vertex(i, a), vertex(i + d, b), instance.energy(a, b, i, i + d - 1), {a, b}, d});
        }
      }
    }
    edges.push_back({vertex(h, off), vertex(h + 1, off), instance.energy(off, off, h, h), {off, off}, 1});
    edges_ = std::move(edges);

    out_start_.assign(slots + 1, 0);
    in_start_.assign(slots + 1, 0);
    for (const Edge& e : edges_) {
      ++out_start_[e.from + 1];
      ++in_start_[e.to + 1];
    }
    for (int v = 0; v < slots; ++v) {
      out_start_[v + 1] += out_start_[v];
      in_start_[v + 1] += in_start_[v];
    }
    out_edges_.resize(edges_.size());
    in_edges_.resize(edges_.size());
    std::vector<int> out_fill(out_start_.begin(), out_start_.end() - 1);
    std::vector<int> in_fill(in_start_.begin(), in_start_.end() - 1);
    for (int e = 0; e < static_cast<int>(edges_.size()); ++e) {
      out_edges_[out_fill[edges_[e].from]++] = e;
      in_edges_[in_fill[edges_[e].to]++] = e;
    }
  }

  int horizon() const { return horizon_; }
  int num_states() const { return states_; }
  int slot_count() const { return (horizon_ + 1) * states_; }
  /// Number of vertices that actually exist: 2 + (h - 1) * |S|.
  int vertex_count() const { return 2 + (horizon_ - 1) * states_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }

  int vertex(int layer, StateId s) const { return (layer - 1) * states_ + s.value; }
  int layer_of(int v) const { return v / states_ + 1; }
  StateId state_of(int v) const { return StateId{v % states_}; }
  bool exists(int v) const { return exists_[v]; }

  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(int e) const { return edges_[e]; }

  template <typename F>
  void for_each_out(int v, F&& f) const {
    for (int k = out_start_[v]; k < out_start_[v + 1]; ++k) f(edges_[out_edges_[k]], out_edges_[k]);
  }
  template <typename F>
  void for_each_in(int v, F&& f) const {
    for (int k = in_start_[v]; k < in_start_[v + 1]; ++k) f(edges_[in_edges_[k]], in_edges_[k]);
  }

 private:
  int horizon_;
  int states_;
  std::vector<bool> exists_;
  std::vector<Edge> edges_;
  std::vector<int> out_start_, in_start_;
  std::vector<int> out_edges_, in_edges_;
};

inline IntervalStateGraph build_graph(const Instance& instance) { return IntervalStateGraph(instance); }

enum class PathAlgorithm { kAuto, kDijkstra, kBellmanFord };

/// Single-source shortest paths with a deterministic parent choice.
///
/// Paths are ranked by (cost, number of edges). Among the tight in-edges of
/// a vertex the parent is the one leaving the lowest-index state, then the
/// earliest layer, so every algorithm yields the same tree.
struct ShortestPathTree {
  int source = -1;
  std::vector<Cost> dist;
  std::vector<int> hops;
  std::vector<int> parent;  // edge index, -1 at the source or when unreached

  bool reached(int v) const { return dist[v] < kInfCost; }
};

namespace detail {

inline void choose_parents(const IntervalStateGraph& g, ShortestPathTree& tree) {
  const int slots = g.slot_count();
  tree.parent.assign(slots, -1);
  for (int v = 0; v < slots; ++v) {
    if (v == tree.source || !tree.reached(v)) continue;
    int best = -1;
    std::pair<int, int> best_key{0, 0};
    g.for_each_in(v, [&](const IntervalStateGraph::Edge& e, int idx) {
      if (!tree.reached(e.from)) return;
      if (tree.dist[e.from] + e.weight != tree.dist[v] || tree.hops[e.from] + 1 != tree.hops[v]) return;
      const std::pair<int, int> key{g.state_of(e.from).value, g.layer_of(e.from)};
      if (best < 0 || key < best_key) {
        best = idx;
        best_key = key;
      }
    });
    tree.parent[v] = best;
  }
}

inline bool better(Cost d1, int h1, Cost d2, int h2) { return d1 < d2 || (d1 == d2 && h1 < h2); }

}  // namespace detail

/// Dijkstra with a binary heap; requires non-negative edge weights.
inline ShortestPathTree dijkstra(const IntervalStateGraph& g, int source) {
  ShortestPathTree tree;
  tree.source = source;
  tree.dist.assign(g.slot_count(), kInfCost);
  tree.hops.assign(g.slot_count(), 0);
  using Item = std::tuple<Cost, int, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  tree.dist[source] = 0;
  heap.emplace(0, 0, source);
  while (!heap.empty()) {
    const auto [d, hops, v] = heap.top();
    heap.pop();
    if (d != tree.dist[v] || hops != tree.hops[v]) continue;
    g.for_each_out(v, [&](const IntervalStateGraph::Edge& e, int) {
      const Cost nd = d + e.weight;
      if (detail::better(nd, hops + 1, tree.dist[e.to], tree.hops[e.to])) {
        tree.dist[e.to] = nd;
        tree.hops[e.to] = hops + 1;
        heap.emplace(nd, hops + 1, e.to);
      }
    });
  }
  detail::choose_parents(g, tree);
  return tree;
}

/// Bellman-Ford; tolerates negative edge weights. Edges are stored in layer
/// order, so a pass usually settles everything reachable.
inline ShortestPathTree bellman_ford(const IntervalStateGraph& g, int source) {
  ShortestPathTree tree;
  tree.source = source;
  tree.dist.assign(g.slot_count(), kInfCost);
  tree.hops.assign(g.slot_count(), 0);
  tree.dist[source] = 0;
  const auto& edges = g.edges();
  for (int pass = 0; pass < g.vertex_count(); ++pass) {
    bool changed = false;
    for (const auto& e : edges) {
      if (!tree.reached(e.from)) continue;
      const Cost nd = tree.dist[e.from] + e.weight;
      const int nh = tree.hops[e.from] + 1;
      if (detail::better(nd, nh, tree.dist[e.to], tree.hops[e.to])) {
        tree.dist[e.to] = nd;
        tree.hops[e.to] = nh;
        changed = true;
      }
    }
    if (!changed) break;
  }
  detail::choose_parents(g, tree);
  return tree;
}

inline ShortestPathTree shortest_paths(const IntervalStateGraph& g, int source, PathAlgorithm algorithm,
                                       bool has_negative_weights) {
  if (algorithm == PathAlgorithm::kAuto) {
    algorithm = has_negative_weights ? PathAlgorithm::kBellmanFord : PathAlgorithm::kDijkstra;
  }
  return algorithm == PathAlgorithm::kDijkstra ? dijkstra(g, source) : bellman_ford(g, source);
}

/// Labels of the tree path from the source to `target`, one per interval.
inline std::vector<Transition> path_labels(const IntervalStateGraph& g, const ShortestPathTree& tree,
                                           int target) {
  std::vector<Transition> labels;
  for (int v = target; v != tree.source;) {
    const int e = tree.parent[v];
    if (e < 0) throw Error(ErrorCode::kMalformedBehavior, "target is not reachable from the source");
    const auto& edge = g.edge(e);
    for (int k = 0; k < edge.duration; ++k) labels.push_back(edge.label);
    v = edge.from;
  }
  std::reverse(labels.begin(), labels.end());
  return labels;
}

/// Interval window in which the processing state is reachable from the
/// initial off state and can still return to the final off state.
inline ProcessingWindow try_processing_window(const Instance& instance, const IntervalStateGraph& g) {
  const int h = instance.horizon();
  const StateId off = instance.off();
  const StateId proc = instance.proc();
  ProcessingWindow window{0, -1};

  std::vector<bool> forward(g.slot_count(), false);
  std::vector<int> stack{g.vertex(2, off)};
  forward[stack.back()] = true;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    g.for_each_out(v, [&](const IntervalStateGraph::Edge& e, int) {
      if (!forward[e.to]) {
        forward[e.to] = true;
        stack.push_back(e.to);
      }
    });
  }
  std::vector<bool> backward(g.slot_count(), false);
  stack.assign(1, g.vertex(h, off));
  backward[stack.back()] = true;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    g.for_each_in(v, [&](const IntervalStateGraph::Edge& e, int) {
      if (!backward[e.from]) {
        backward[e.from] = true;
        stack.push_back(e.from);
      }
    });
  }
  for (int i = 2; i <= h; ++i) {
    if (forward[g.vertex(i, proc)]) {
      window.first = i;
      break;
    }
  }
  for (int i = h - 1; i >= 1; --i) {
    if (backward[g.vertex(i + 1, proc)]) {
      window.last = i;
      break;
    }
  }
  if (window.first == 0) window.first = h + 1;
  return window;
}

inline ProcessingWindow try_processing_window(const Instance& instance) {
  return try_processing_window(instance, IntervalStateGraph(instance));
}

/// Like try_processing_window but throws NoProcessingWindow when empty.
inline ProcessingWindow processing_window(const Instance& instance) {
  const ProcessingWindow w = try_processing_window(instance);
  if (w.empty()) {
    throw Error(ErrorCode::kNoProcessingWindow,
                "the machine cannot process within the horizon (window " + std::to_string(w.first) +
                    ".." + std::to_string(w.last) + ")");
  }
  return w;
}

}  // namespace tousched
