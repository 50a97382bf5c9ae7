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

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "tousched/packing.hpp"

namespace tousched {

enum class SolveStatus { kOptimal, kFeasible, kInfeasible, kTimedOut };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::kOptimal: return "Optimal";
    case SolveStatus::kFeasible: return "Feasible";
    case SolveStatus::kInfeasible: return "Infeasible";
    case SolveStatus::kTimedOut: return "TimedOut";
  }
  return "?";
}

struct ProgressEvent {
  std::int64_t nodes = 0;
  int depth = 0;
  Cost lb = 0;      // grid units, node bound
  Cost ub = kInfCost;
};

enum class NodeOutcome { kInfeasible, kPruned, kLeaf, kPacked, kBranched, kAborted };

inline const char* to_string(NodeOutcome o) {
  switch (o) {
    case NodeOutcome::kInfeasible: return "infeasible";
    case NodeOutcome::kPruned: return "pruned";
    case NodeOutcome::kLeaf: return "leaf";
    case NodeOutcome::kPacked: return "packed";
    case NodeOutcome::kBranched: return "branched";
    case NodeOutcome::kAborted: return "aborted";
  }
  return "?";
}

/// One visited search node, reported after its bound and primal step.
struct NodeTrace {
  std::vector<int> fixed;  // job indices
  int piece = 1;
  Cost lb = kInfCost;
  Cost ub = kInfCost;      // incumbent after the node
  NodeOutcome outcome = NodeOutcome::kBranched;
  std::vector<int> blocks;  // block lengths, when packing was attempted
};

struct SearchConfig {
  bool use_gcd = true;
  bool use_primal_packing = true;
  bool use_initial_heuristic = true;
  PackBudget pack_budget{};
  int pack_every = 1;  // attempt packing at depths divisible by this
  std::chrono::milliseconds time_limit{60'000};
  std::optional<std::int64_t> node_limit;
  int spaces_threads = 1;
  /// Called every progress_interval nodes; returning false cancels the search.
  std::function<bool(const ProgressEvent&)> progress;
  std::int64_t progress_interval = 1000;
  /// Called for every visited node (tests, verbose output).
  std::function<void(const NodeTrace&)> trace;
};

struct SearchStats {
  std::int64_t leaves = 0;
  std::int64_t pruned = 0;
  std::int64_t pack_calls = 0;
  std::int64_t pack_feasible = 0;
  std::int64_t pack_unknown = 0;
  std::optional<Cost> initial_ub;
};

struct SolveResult {
  SolveStatus status = SolveStatus::kInfeasible;
  Cost ub_grid = kInfCost;
  Cost lb_grid = kInfCost;
  Rational ub;  // meaningful when has_ub()
  Rational lb;
  std::optional<Schedule> schedule;
  std::int64_t nodes = 0;
  std::chrono::microseconds wall_time{0};
  std::chrono::microseconds preprocess_time{0};
  SearchStats stats;

  bool has_ub() const { return ub_grid < kInfCost; }
  bool has_lb() const { return lb_grid < kInfCost; }
};

/// Turns a packing of jobs into relaxed processing blocks into a schedule.
/// The relaxed labelling is kept as is; within a block the jobs run
/// back-to-back from its first interval, shortest first, so leftover block intervals stay in
/// proc and the cost is that of the relaxed labelling.
inline Schedule reconstruct_schedule(const Instance& instance, const std::vector<Transition>& relaxed_omega,
                                     const BlockList& blocks, const PackAssignment& assignment) {
  Schedule s;
  s.starts.assign(instance.job_count(), 0);
  s.transitions = relaxed_omega;
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    int at = blocks[k].start;
    // shortest first, ties by index
    std::vector<int> members = assignment[k];
    std::stable_sort(members.begin(), members.end(), [&](int a, int b) {
      return instance.processing_time(a) < instance.processing_time(b);
    });
    for (int j : members) {
      s.starts[j] = at;
      at += instance.processing_time(j);
    }
    if (at > blocks[k].end() + 1) throw Error(ErrorCode::kReconstructionMismatch, "block over capacity");
  }
  const ValidationReport report = validate(instance, s);
  if (!report.ok) {
    throw Error(ErrorCode::kReconstructionMismatch,
                "reconstructed schedule is infeasible: " + report.violations.front().message);
  }
  return s;
}

namespace detail {

class Search {
 public:
  using Clock = std::chrono::steady_clock;

  Search(const Instance& instance, const SwitchingTable& table, const ProcessingWindow& window,
         const SearchConfig& config, Clock::time_point start)
      : instance_(instance), table_(table), window_(window), config_(config), levels_(instance, table, window),
        cache_(instance), deadline_(start + config.time_limit) {
    for (int j = 0; j < instance.job_count(); ++j) by_length_[instance.processing_time(j)].push_back(j);
    for (auto& [p, list] : by_length_) used_[p] = 0;
  }

  BehaviorCache& cache() { return cache_; }
  LevelsArray& levels() { return levels_; }

  void offer(Cost value, Schedule schedule) {
    if (value < ub_) {
      ub_ = value;
      best_ = std::move(schedule);
    }
  }

  /// Root relaxation with blocks, used for the initial heuristic.
  RelaxedSolution root_relaxation() {
    RelaxedSolution r;
    r.piece = piece();
    r.lb_grid = levels_.evaluate(r.piece);
    if (r.lb_grid < kInfCost) fill_relaxed(instance_, cache_, levels_, r);
    return r;
  }

  bool out_of_time() const { return Clock::now() >= deadline_; }

  void run() {
    stack_lb_.clear();
    visit(0);
  }

  bool aborted() const { return aborted_; }
  bool cancelled() const { return cancelled_; }
  std::int64_t nodes() const { return nodes_; }
  Cost ub() const { return ub_; }
  std::optional<Schedule>& best() { return best_; }
  SearchStats& stats() { return stats_; }

  /// Lower bound on the overall optimum after an aborted search.
  Cost open_bound(Cost root_lb) const {
    if (stack_lb_.empty()) return std::min(ub_, root_lb);
    Cost lb = ub_;
    for (Cost v : stack_lb_) lb = std::min(lb, v);
    return lb;
  }

 private:
  int piece() const {
    if (!config_.use_gcd) return 1;
    int g = 0;
    for (const auto& [p, list] : by_length_) {
      if (used_.at(p) < static_cast<int>(list.size())) g = std::gcd(g, p);
    }
    return g == 0 ? 1 : g;
  }

  bool check_limits() {
    if (config_.node_limit && nodes_ >= *config_.node_limit) return false;
    if ((nodes_ & 63) == 0 && out_of_time()) return false;
    if (config_.progress && config_.progress_interval > 0 && nodes_ % config_.progress_interval == 0) {
      ProgressEvent ev{nodes_, depth_, stack_lb_.empty() ? 0 : stack_lb_.back(), ub_};
      if (!config_.progress(ev)) {
        cancelled_ = true;
        return false;
      }
    }
    return true;
  }

  // Schedule for the current node when its relaxation is already a real
  // schedule: equal-length pieces are filled by the remaining jobs in index order.
  Schedule exact_schedule() {
    const std::vector<int> starts = levels_.piece_starts();
    std::vector<int> order = levels_.fixed_jobs();
    for (const auto& [p, list] : by_length_) {
      for (std::size_t k = used_.at(p); k < list.size(); ++k) order.push_back(list[k]);
    }
    std::vector<int> by_job(instance_.job_count());
    for (std::size_t k = 0; k < order.size(); ++k) by_job[order[k]] = starts[k];
    return schedule_from_starts(instance_, cache_, std::move(by_job));
  }

  void report(const Cost lb, int g, NodeOutcome outcome, std::vector<int> blocks = {}) {
    if (!config_.trace) return;
    config_.trace(NodeTrace{levels_.fixed_jobs(), g, lb, ub_, outcome, std::move(blocks)});
  }

  void visit(int depth) {
    if (aborted_) return;
    if (!check_limits()) {
      aborted_ = true;
      return;
    }
    ++nodes_;
    depth_ = depth;
    const int g = piece();
    const Cost lb = levels_.evaluate(g);
    if (lb >= kInfCost) {
      report(lb, g, NodeOutcome::kInfeasible);
      return;
    }
    if (lb >= ub_) {
      ++stats_.pruned;
      report(lb, g, NodeOutcome::kPruned);
      return;
    }
    int distinct_left = 0;
    int left_length = 0;
    for (const auto& [p, list] : by_length_) {
      if (used_.at(p) < static_cast<int>(list.size())) {
        ++distinct_left;
        left_length = p;
      }
    }
    std::vector<int> blocks;
    if (distinct_left > 0 && config_.use_primal_packing && depth % std::max(1, config_.pack_every) == 0) {
      RelaxedSolution relaxed;
      relaxed.lb_grid = lb;
      fill_relaxed(instance_, cache_, levels_, relaxed);
      blocks = block_lengths(relaxed.blocks);
      ++stats_.pack_calls;
      const PackResult pack = bin_pack(relaxed.blocks, instance_.jobs(), config_.pack_budget);
      if (pack.status == PackStatus::kFeasible) {
        ++stats_.pack_feasible;
        offer(lb, reconstruct_schedule(instance_, relaxed.omega, relaxed.blocks, pack.assignment));
        report(lb, g, NodeOutcome::kPacked, std::move(blocks));
        return;
      }
      if (pack.status == PackStatus::kUnknown) ++stats_.pack_unknown;
    }
    // No remaining jobs, or all remaining jobs as long as the pieces: exact.
    if (distinct_left == 0 || (distinct_left == 1 && g == left_length)) {
      ++stats_.leaves;
      offer(lb, exact_schedule());
      report(lb, g, NodeOutcome::kLeaf, std::move(blocks));
      return;
    }
    report(lb, g, NodeOutcome::kBranched, std::move(blocks));
    stack_lb_.push_back(lb);
    for (auto& [p, list] : by_length_) {
      int& used = used_.at(p);
      if (used == static_cast<int>(list.size())) continue;
      const int job = list[used];
      ++used;
      levels_.join(job);
      visit(depth + 1);
      levels_.split();
      --used;
      if (aborted_) return;  // keep this node's bound on the stack
      // The incumbent may have caught up with this node.
      if (lb >= ub_) break;
    }
    stack_lb_.pop_back();
  }

  const Instance& instance_;
  const SwitchingTable& table_;
  ProcessingWindow window_;
  const SearchConfig& config_;
  LevelsArray levels_;
  BehaviorCache cache_;
  Clock::time_point deadline_;
  std::map<int, std::vector<int>> by_length_;
  std::map<int, int> used_;
  Cost ub_ = kInfCost;
  std::optional<Schedule> best_;
  std::vector<Cost> stack_lb_;
  std::int64_t nodes_ = 0;
  int depth_ = 0;
  bool aborted_ = false;
  bool cancelled_ = false;
  SearchStats stats_;
};

}  // namespace detail

/// Depth-first branch and bound over job sequences.
inline SolveResult solve(const Instance& instance, const SearchConfig& config = {}) {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  SolveResult result;
  auto finish = [&]() -> SolveResult {
    result.wall_time = std::chrono::duration_cast<std::chrono::microseconds>(Clock::now() - start);
    result.ub = result.has_ub() ? instance.to_rational(result.ub_grid) : Rational(0);
    result.lb = result.has_lb() ? instance.to_rational(result.lb_grid) : Rational(0);
    return result;
  };

  const IntervalStateGraph graph(instance);
  const ProcessingWindow window = try_processing_window(instance, graph);
  if (!fits_window(instance, window) || instance.job_count() == 0) {
    result.status = SolveStatus::kInfeasible;
    return finish();
  }
  const SwitchingTable table = spaces(instance, graph, {PathAlgorithm::kAuto, config.spaces_threads});
  result.preprocess_time = std::chrono::duration_cast<std::chrono::microseconds>(Clock::now() - start);

  detail::Search search(instance, table, window, config, start);
  const RelaxedSolution root = search.root_relaxation();
  if (root.lb_grid >= kInfCost) {
    result.status = SolveStatus::kInfeasible;
    return finish();
  }
  result.lb_grid = root.lb_grid;
  if (config.use_initial_heuristic && !search.out_of_time()) {
    if (auto init = initial_upper_bound(instance, table, window, search.cache(), root.blocks)) {
      search.stats().initial_ub = init->ub_grid;
      search.offer(init->ub_grid, std::move(init->schedule));
    }
  }
  search.run();

  result.nodes = search.nodes();
  result.stats = search.stats();
  result.ub_grid = search.ub();
  result.schedule = std::move(search.best());
  if (!search.aborted()) {
    result.status = result.has_ub() ? SolveStatus::kOptimal : SolveStatus::kInfeasible;
    result.lb_grid = result.has_ub() ? result.ub_grid : result.lb_grid;
    return finish();
  }
  result.lb_grid = std::max(result.lb_grid, search.open_bound(root.lb_grid));
  if (result.has_ub() && result.lb_grid >= result.ub_grid) {
    result.lb_grid = result.ub_grid;
    result.status = SolveStatus::kOptimal;
  } else if (search.cancelled() && result.has_ub()) {
    result.status = SolveStatus::kFeasible;
  } else {
    result.status = SolveStatus::kTimedOut;
  }
  return finish();
}

}  // namespace tousched
