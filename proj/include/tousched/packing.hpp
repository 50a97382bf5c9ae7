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
#include <chrono>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "tousched/bounds.hpp"

namespace tousched {

enum class PackStatus { kFeasible, kInfeasible, kUnknown };

inline const char* to_string(PackStatus s) {
  switch (s) {
    case PackStatus::kFeasible: return "Feasible";
    case PackStatus::kInfeasible: return "Infeasible";
    case PackStatus::kUnknown: return "Unknown";
  }
  return "?";
}

/// Per-block lists of job indices (into the jobs vector given to the packer),
/// ascending by index.
using PackAssignment = std::vector<std::vector<int>>;

struct PackBudget {
  std::chrono::microseconds time{50'000};
  std::int64_t nodes = 2'000'000;
};

struct PackResult {
  PackStatus status = PackStatus::kUnknown;
  PackAssignment assignment;
  std::int64_t nodes = 0;
};

namespace detail {

inline std::vector<int> order_desc(const std::vector<int>& jobs) {
  std::vector<int> order(jobs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return jobs[a] > jobs[b]; });
  return order;
}

class Packer {
 public:
  Packer(const std::vector<int>& capacity, const std::vector<int>& jobs, const PackBudget& budget)
      : jobs_(jobs), order_(order_desc(jobs)), residual_(capacity), place_(jobs.size(), -1), budget_(budget) {
    suffix_.assign(order_.size() + 1, 0);
    for (int t = static_cast<int>(order_.size()) - 1; t >= 0; --t) suffix_[t] = suffix_[t + 1] + jobs_[order_[t]];
    deadline_ = std::chrono::steady_clock::now() + budget.time;
  }

  PackStatus run() {
    if (dfs(0)) return PackStatus::kFeasible;
    return aborted_ ? PackStatus::kUnknown : PackStatus::kInfeasible;
  }

  std::int64_t nodes() const { return nodes_; }
  const std::vector<int>& placement() const { return place_; }

 private:
  bool dfs(int t) {
    if (t == static_cast<int>(order_.size())) return true;
    if (aborted_) return false;
    if (++nodes_ > budget_.nodes || ((nodes_ & 1023) == 0 && std::chrono::steady_clock::now() > deadline_)) {
      aborted_ = true;
      return false;
    }
    const int job = order_[t];
    const int p = jobs_[job];
    // Remaining jobs are no longer than p; capacity below the smallest one is wasted.
    const int smallest = jobs_[order_.back()];
    std::int64_t usable = 0;
    for (int r : residual_) {
      if (r >= smallest) usable += r;
    }
    if (usable < suffix_[t]) return false;

    const bool tied = t > 0 && jobs_[order_[t - 1]] == p;
    const int first_block = tied ? place_[order_[t - 1]] : 0;
    std::string key;
    if (!tied) {
      key = state_key(t);
      if (failed_.count(key)) return false;
    }
    std::vector<int> tried;
    for (int k = first_block; k < static_cast<int>(residual_.size()); ++k) {
      const int r = residual_[k];
      if (r < p || std::find(tried.begin(), tried.end(), r) != tried.end()) continue;
      tried.push_back(r);
      residual_[k] -= p;
      place_[job] = k;
      if (dfs(t + 1)) return true;
      residual_[k] += p;
      place_[job] = -1;
      if (aborted_) return false;
    }
    if (!tied && failed_.size() < 1'000'000) failed_.insert(std::move(key));
    return false;
  }

  std::string state_key(int t) const {
    std::vector<int> r = residual_;
    std::sort(r.begin(), r.end());
    std::string key = std::to_string(t);
    for (int v : r) {
      key.push_back(',');
      key += std::to_string(v);
    }
    return key;
  }

  const std::vector<int>& jobs_;
  std::vector<int> order_;
  std::vector<int> residual_;
  std::vector<int> place_;
  std::vector<std::int64_t> suffix_;
  PackBudget budget_;
  std::chrono::steady_clock::time_point deadline_;
  std::int64_t nodes_ = 0;
  bool aborted_ = false;
  std::unordered_set<std::string> failed_;
};

inline PackAssignment to_assignment(const std::vector<int>& place, std::size_t blocks, const std::vector<int>& jobs) {
  PackAssignment out(blocks);
  for (std::size_t j = 0; j < place.size(); ++j) out[place[j]].push_back(static_cast<int>(j));
  (void)jobs;
  return out;
}

}  // namespace detail

/// Decides whether the jobs fit into bins of the given capacities.
///
/// First-fit decreasing, then an exact DFS with waste pruning, symmetry
/// breaking on equal jobs and equal residuals, and a memo of failed states.
/// Returns kUnknown when the budget runs out.
inline PackResult bin_pack(const std::vector<int>& capacity, const std::vector<int>& jobs,
                           const PackBudget& budget = {}) {
  PackResult result;
  const std::int64_t need = std::accumulate(jobs.begin(), jobs.end(), std::int64_t{0});
  const std::int64_t have = std::accumulate(capacity.begin(), capacity.end(), std::int64_t{0});
  if (need > have) {
    result.status = PackStatus::kInfeasible;
    return result;
  }
  if (jobs.empty()) {
    result.status = PackStatus::kFeasible;
    result.assignment.assign(capacity.size(), {});
    return result;
  }
  // first-fit decreasing
  {
    std::vector<int> residual = capacity;
    std::vector<int> place(jobs.size(), -1);
    bool ok = true;
    for (int j : detail::order_desc(jobs)) {
      const auto it = std::find_if(residual.begin(), residual.end(), [&](int r) { return r >= jobs[j]; });
      if (it == residual.end()) {
        ok = false;
        break;
      }
      *it -= jobs[j];
      place[j] = static_cast<int>(it - residual.begin());
    }
    if (ok) {
      result.status = PackStatus::kFeasible;
      result.assignment = detail::to_assignment(place, capacity.size(), jobs);
      return result;
    }
  }
  detail::Packer packer(capacity, jobs, budget);
  result.status = packer.run();
  result.nodes = packer.nodes();
  if (result.status == PackStatus::kFeasible) {
    result.assignment = detail::to_assignment(packer.placement(), capacity.size(), jobs);
  }
  return result;
}

inline PackResult bin_pack(const BlockList& blocks, const std::vector<int>& jobs, const PackBudget& budget = {}) {
  return bin_pack(block_lengths(blocks), jobs, budget);
}

struct BinFindResult {
  int z = 0;
  std::vector<int> sizes;       // s_i
  PackAssignment assignment;    // per-block job lists
  std::vector<int> block_of;    // per job
  bool optimal = false;
  std::int64_t nodes = 0;
};

namespace detail {

class BinFinder {
 public:
  BinFinder(const std::vector<int>& target, const std::vector<int>& jobs, std::int64_t node_limit)
      : target_(target), jobs_(jobs), order_(order_desc(jobs)), sums_(target.size(), 0),
        place_(jobs.size(), -1), node_limit_(node_limit) {
    suffix_.assign(order_.size() + 1, 0);
    for (int t = static_cast<int>(order_.size()) - 1; t >= 0; --t) suffix_[t] = suffix_[t + 1] + jobs_[order_[t]];
  }

  int greedy(std::vector<int>& place) const {
    std::vector<int> sums(target_.size(), 0);
    place.assign(jobs_.size(), -1);
    for (int j : order_) {
      int best = 0;
      for (int k = 1; k < static_cast<int>(target_.size()); ++k) {
        if (target_[k] - sums[k] > target_[best] - sums[best]) best = k;
      }
      sums[best] += jobs_[j];
      place[j] = best;
    }
    int z = 0;
    for (std::size_t k = 0; k < sums.size(); ++k) z = std::max(z, std::abs(sums[k] - target_[k]));
    return z;
  }

  void run(int greedy_z) {
    cap_ = greedy_z;
    dfs(0);
  }

  bool found() const { return best_ >= 0; }
  bool complete() const { return !aborted_; }
  int best() const { return best_; }
  const std::vector<int>& best_place() const { return best_place_; }
  std::int64_t nodes() const { return nodes_; }

 private:
  int bound(int t) const {
    const std::int64_t rest = suffix_[t];
    int excess = 0;
    std::int64_t room = 0;
    int largest_deficit = 0;
    for (std::size_t k = 0; k < sums_.size(); ++k) {
      excess = std::max(excess, sums_[k] - target_[k]);
      room += target_[k] - sums_[k];
      largest_deficit = std::max(largest_deficit, target_[k] - sums_[k]);
    }
    int z = excess;
    // All remaining work has to fit within target + z.
    const std::int64_t k = static_cast<std::int64_t>(sums_.size());
    if (rest > room) z = std::max<std::int64_t>(z, (rest - room + k - 1) / k);
    // Deficits beyond z have to be filled by the remaining work.
    auto unfilled = [&](int zz) {
      std::int64_t d = 0;
      for (std::size_t b = 0; b < sums_.size(); ++b) d += std::max(0, target_[b] - sums_[b] - zz);
      return d;
    };
    int lo = z, hi = std::max(z, largest_deficit);
    if (unfilled(lo) > rest) {
      while (lo < hi) {
        const int mid = lo + (hi - lo) / 2;
        if (unfilled(mid) <= rest) hi = mid; else lo = mid + 1;
      }
      z = lo;
    }
    return z;
  }

  void dfs(int t) {
    if (aborted_) return;
    if (++nodes_ > node_limit_) {
      aborted_ = true;
      return;
    }
    const int lb = bound(t);
    if (lb > cap_ || (best_ >= 0 && lb >= best_)) return;
    if (t == static_cast<int>(order_.size())) {
      best_ = lb;  // all sums final, bound is exact
      best_place_ = place_;
      return;
    }
    const int job = order_[t];
    for (int k = 0; k < static_cast<int>(sums_.size()); ++k) {
      sums_[k] += jobs_[job];
      place_[job] = k;
      dfs(t + 1);
      sums_[k] -= jobs_[job];
      place_[job] = -1;
      if (aborted_ || best_ == 0) return;
    }
  }

  std::vector<int> target_;
  const std::vector<int>& jobs_;
  std::vector<int> order_;
  std::vector<int> sums_;
  std::vector<int> place_;
  std::vector<std::int64_t> suffix_;
  std::int64_t node_limit_;
  std::int64_t nodes_ = 0;
  bool aborted_ = false;
  int cap_ = 0;
  int best_ = -1;
  std::vector<int> best_place_;
};

}  // namespace detail

/// Assigns every job to one of k blocks so that the largest deviation
/// |s_i - b_i| between assigned work and suggested size is minimal.
///
/// Branch and bound over jobs in decreasing length (ties by index), blocks
/// tried in index order; the first optimum found is kept. When the node
/// limit is hit the best assignment so far (or the greedy one) is returned
/// with optimal = false.
inline BinFindResult bin_find(const std::vector<int>& block_sizes, const std::vector<int>& jobs,
                              std::int64_t node_limit = 5'000'000) {
  if (block_sizes.empty() || jobs.empty()) {
    throw Error(ErrorCode::kInvalidInstance, "bin_find needs at least one block and one job");
  }
  detail::BinFinder finder(block_sizes, jobs, node_limit);
  std::vector<int> greedy_place;
  const int greedy_z = finder.greedy(greedy_place);
  finder.run(greedy_z);

  BinFindResult result;
  result.block_of = finder.found() ? finder.best_place() : greedy_place;
  result.optimal = finder.complete();
  result.nodes = finder.nodes();
  result.sizes.assign(block_sizes.size(), 0);
  for (std::size_t j = 0; j < jobs.size(); ++j) result.sizes[result.block_of[j]] += jobs[j];
  result.z = 0;
  for (std::size_t k = 0; k < block_sizes.size(); ++k) {
    result.z = std::max(result.z, std::abs(result.sizes[k] - block_sizes[k]));
  }
  result.assignment = detail::to_assignment(result.block_of, block_sizes.size(), jobs);
  return result;
}

struct InitialBound {
  Cost ub_grid = kInfCost;
  Rational ub;
  Schedule schedule;
  BinFindResult bins;
};

/// Upper bound from the root blocks: enlarge them into aggregated jobs with
/// bin_find, sequence the aggregated jobs in block order and expand each one
/// into its jobs back-to-back. nullopt when the aggregated sequence is
/// infeasible.
inline std::optional<InitialBound> initial_upper_bound(const Instance& instance, const SwitchingTable& table,
                                                       const ProcessingWindow& window, BehaviorCache& cache,
                                                       const BlockList& root_blocks,
                                                       std::int64_t node_limit = 5'000'000) {
  if (root_blocks.empty() || instance.job_count() == 0) return std::nullopt;
  InitialBound out;
  out.bins = bin_find(block_lengths(root_blocks), instance.jobs(), node_limit);
  std::vector<int> lengths;
  std::vector<const std::vector<int>*> groups;
  for (std::size_t k = 0; k < root_blocks.size(); ++k) {
    if (out.bins.sizes[k] == 0) continue;
    lengths.push_back(out.bins.sizes[k]);
    groups.push_back(&out.bins.assignment[k]);
  }
  const SequenceResult seq = detail::sequence_dp(instance, table, window, lengths);
  if (seq.tec_grid >= kInfCost) return std::nullopt;

  std::vector<int> starts(instance.job_count(), 0);
  std::vector<Run> runs;
  for (std::size_t k = 0; k < lengths.size(); ++k) {
    int at = seq.starts[k];
    runs.push_back({at, lengths[k]});
    // longest first, ties by index
    std::vector<int> members = *groups[k];
    std::stable_sort(members.begin(), members.end(), [&](int a, int b) {
      return instance.processing_time(a) > instance.processing_time(b);
    });
    for (int j : members) {
      starts[j] = at;
      at += instance.processing_time(j);
    }
  }
  out.schedule.starts = std::move(starts);
  out.schedule.transitions = stitch_omega(instance, cache, runs);
  out.ub_grid = seq.tec_grid;
  out.ub = seq.tec;
  return out;
}

}  // namespace tousched
