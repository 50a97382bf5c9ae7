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
#include <numeric>
#include <vector>

#include "tousched/switching.hpp"

namespace tousched {

/// A maximal stretch of consecutive processing intervals.
struct Run {
  int start = 0;
  int length = 0;
  int end() const { return start + length - 1; }
  friend bool operator==(const Run&, const Run&) = default;
};

struct SequenceResult {
  Cost tec_grid = kInfCost;
  Rational tec;
  std::vector<int> starts;  // per sequence position
};

namespace detail {

inline Cost processing_energy(const Instance& instance, int start, int length) {
  return instance.price_sum(start, start + length - 1) * instance.power(instance.proc(), instance.proc());
}

inline Cost boundary_energy(const Instance& instance, int interval) {
  return instance.price(interval) * instance.power(instance.off(), instance.off());
}

/// Reference DP over (position, start interval) with a full predecessor scan.
/// Ties go to the earliest predecessor start.
inline SequenceResult sequence_dp(const Instance& instance, const SwitchingTable& table,
                                  const ProcessingWindow& window, const std::vector<int>& lengths) {
  SequenceResult result;
  const int m = static_cast<int>(lengths.size());
  const int h = instance.horizon();
  if (m == 0) return result;
  const int total = std::accumulate(lengths.begin(), lengths.end(), 0);
  if (window.empty() || total > window.size()) return result;

  std::vector<int> lo(m), hi(m);
  int prefix = 0;
  for (int l = 0; l < m; ++l) {
    lo[l] = window.first + prefix;
    hi[l] = window.last - (total - prefix) + 1;
    prefix += lengths[l];
  }
  std::vector<std::vector<Cost>> value(m);
  std::vector<std::vector<int>> from(m);
  for (int l = 0; l < m; ++l) {
    value[l].assign(hi[l] - lo[l] + 1, kInfCost);
    from[l].assign(hi[l] - lo[l] + 1, -1);
    for (int i = lo[l]; i <= hi[l]; ++i) {
      Cost best = kInfCost;
      int arg = -1;
      if (l == 0) {
        const Cost s = table.cost(1, i);
        if (s < kInfCost) best = boundary_energy(instance, 1) + s;
      } else {
        for (int i0 = lo[l - 1]; i0 <= hi[l - 1]; ++i0) {
          const int e0 = i0 + lengths[l - 1] - 1;
          if (e0 >= i) break;
          const Cost f = value[l - 1][i0 - lo[l - 1]];
          const Cost s = table.cost(e0, i);
          if (f >= kInfCost || s >= kInfCost) continue;
          if (f + s < best) {
            best = f + s;
            arg = i0;
          }
        }
      }
      if (best < kInfCost) {
        value[l][i - lo[l]] = best + processing_energy(instance, i, lengths[l]);
        from[l][i - lo[l]] = arg;
      }
    }
  }
  Cost best = kInfCost;
  int last = -1;
  for (int i = lo[m - 1]; i <= hi[m - 1]; ++i) {
    const Cost f = value[m - 1][i - lo[m - 1]];
    const Cost s = table.cost(i + lengths[m - 1] - 1, h);
    if (f >= kInfCost || s >= kInfCost) continue;
    const Cost v = f + s + boundary_energy(instance, h);
    if (v < best) {
      best = v;
      last = i;
    }
  }
  if (last < 0) return result;
  result.tec_grid = best;
  result.tec = instance.to_rational(best);
  result.starts.assign(m, 0);
  result.starts[m - 1] = last;
  for (int l = m - 1; l > 0; --l) result.starts[l - 1] = from[l][result.starts[l] - lo[l]];
  return result;
}

}  // namespace detail

/// Minimum TEC over schedules that process the jobs in the given order.
///
/// `sequence` holds 0-based job indices; the returned starts are indexed by
/// job. Throws InfeasibleSequence when no schedule exists.
inline SequenceResult fixed_sequence_tec(const Instance& instance, const SwitchingTable& table,
                                         const std::vector<int>& sequence,
                                         const ProcessingWindow& window) {
  std::vector<bool> seen(instance.job_count(), false);
  if (static_cast<int>(sequence.size()) != instance.job_count()) {
    throw Error(ErrorCode::kInfeasibleSequence, "sequence must list every job exactly once");
  }
  std::vector<int> lengths;
  for (int j : sequence) {
    if (j < 0 || j >= instance.job_count() || seen[j]) {
      throw Error(ErrorCode::kInfeasibleSequence, "sequence must list every job exactly once");
    }
    seen[j] = true;
    lengths.push_back(instance.processing_time(j));
  }
  SequenceResult r = detail::sequence_dp(instance, table, window, lengths);
  if (r.tec_grid >= kInfCost) {
    throw Error(ErrorCode::kInfeasibleSequence, "no feasible schedule for the given job order");
  }
  std::vector<int> by_job(instance.job_count());
  for (std::size_t l = 0; l < sequence.size(); ++l) by_job[sequence[l]] = r.starts[l];
  r.starts = std::move(by_job);
  return r;
}

inline SequenceResult fixed_sequence_tec(const Instance& instance, const SwitchingTable& table,
                                         const std::vector<int>& sequence) {
  return fixed_sequence_tec(instance, table, sequence, try_processing_window(instance));
}

/// Full labelling for processing runs sorted by start: (off,off) at both
/// ends, proc inside the runs and optimal switching in every gap.
inline std::vector<Transition> stitch_omega(const Instance& instance, BehaviorCache& cache,
                                            const std::vector<Run>& runs) {
  const int h = instance.horizon();
  const Transition off_off{instance.off(), instance.off()};
  const Transition busy{instance.proc(), instance.proc()};
  std::vector<Transition> omega;
  omega.reserve(h);
  omega.push_back(off_off);
  auto append = [&](const std::vector<Transition>& labels) {
    omega.insert(omega.end(), labels.begin(), labels.end());
  };
  int anchor = 1;
  for (const Run& r : runs) {
    if (r.length <= 0) continue;
    append(cache.behavior(anchor, r.start));
    for (int k = 0; k < r.length; ++k) omega.push_back(busy);
    anchor = r.end();
  }
  append(cache.behavior(anchor, h));
  omega.push_back(off_off);
  if (static_cast<int>(omega.size()) != h) {
    throw Error(ErrorCode::kReconstructionMismatch, "stitched labelling has " + std::to_string(omega.size()) +
                                                        " intervals, expected " + std::to_string(h));
  }
  return omega;
}

/// Schedule for given job starts, with optimal switching between jobs.
inline Schedule schedule_from_starts(const Instance& instance, BehaviorCache& cache, std::vector<int> starts) {
  std::vector<Run> runs;
  for (int j = 0; j < instance.job_count(); ++j) runs.push_back({starts[j], instance.processing_time(j)});
  std::sort(runs.begin(), runs.end(), [](const Run& a, const Run& b) { return a.start < b.start; });
  Schedule s;
  s.transitions = stitch_omega(instance, cache, runs);
  s.starts = std::move(starts);
  return s;
}

/// Maximal (proc,proc) runs of a labelling.
inline std::vector<Run> proc_runs(const Instance& instance, const std::vector<Transition>& omega) {
  const Transition busy{instance.proc(), instance.proc()};
  std::vector<Run> runs;
  for (int i = 1; i <= static_cast<int>(omega.size()); ++i) {
    if (!(omega[i - 1] == busy)) continue;
    if (!runs.empty() && runs.back().end() == i - 1) {
      ++runs.back().length;
    } else {
      runs.push_back({i, 1});
    }
  }
  return runs;
}

/// Incremental DP over the Σp unit levels of the processing window.
///
/// A prefix of the levels is fixed to real jobs (join/split, LIFO); the
/// remaining free levels are grouped into equal pieces on evaluate(). Every
/// level has the same number of candidate columns, so row r, column k stands
/// for "level r ends at interval first + r + k".
class LevelsArray {
 public:
  LevelsArray(const Instance& instance, const SwitchingTable& table, const ProcessingWindow& window)
      : instance_(&instance),
        table_(&table),
        window_(window),
        levels_(instance.total_processing()),
        sweep_(instance) {
    width_ = window.empty() ? 0 : window.size() - levels_ + 1;
    if (width_ < 1) {
      throw Error(ErrorCode::kInfeasibleRelaxation,
                  "processing window of " + std::to_string(window.size()) + " intervals cannot host " +
                      std::to_string(levels_) + " processing intervals");
    }
    rows_.assign(levels_, std::vector<Cost>(width_, kInfCost));
  }

  int level_count() const { return levels_; }
  int width() const { return width_; }
  int fixed_levels() const { return fixed_levels_; }
  int free_levels() const { return levels_ - fixed_levels_; }
  const std::vector<int>& fixed_jobs() const { return fixed_jobs_; }
  const ProcessingWindow& window() const { return window_; }

  /// DP row of level r (kInfCost except at piece ends of the latest layout).
  const std::vector<Cost>& row(int r) const { return rows_[r]; }

  void join(int job) {
    const int p = instance_->processing_time(job);
    if (p > free_levels()) throw Error(ErrorCode::kInvalidInstance, "not enough free levels to fix the job");
    fill_piece(fixed_levels_ - 1, p);
    fixed_jobs_.push_back(job);
    fixed_levels_ += p;
  }

  void split() {
    if (fixed_jobs_.empty()) throw Error(ErrorCode::kEmptyJoinStack, "split without a matching join");
    fixed_levels_ -= instance_->processing_time(fixed_jobs_.back());
    fixed_jobs_.pop_back();
  }

  /// Optimal TEC with the free levels grouped into pieces of length g
  /// (g must divide the free level count). kInfCost when infeasible.
  Cost evaluate(int g) {
    if (g < 1 || free_levels() % g != 0) {
      throw Error(ErrorCode::kInvalidInstance, "piece length must divide the free levels");
    }
    piece_ = g;
    for (int r = fixed_levels_ - 1; r + g <= levels_ - 1; r += g) fill_piece(r, g);
    return sink(nullptr);
  }

  /// Piece lengths of the latest evaluate(): fixed jobs, then free pieces.
  std::vector<int> layout() const {
    std::vector<int> pieces;
    for (int j : fixed_jobs_) pieces.push_back(instance_->processing_time(j));
    for (int k = 0; k < free_levels() / piece_; ++k) pieces.push_back(piece_);
    return pieces;
  }

  /// Start interval of every piece of the latest evaluate(), earliest start
  /// among ties. Empty when infeasible.
  std::vector<int> piece_starts() const {
    int column = -1;
    if (sink(&column) >= kInfCost) return {};
    const std::vector<int> pieces = layout();
    std::vector<int> ends(pieces.size());
    int r = levels_ - 1;
    for (int k = static_cast<int>(pieces.size()) - 1; k >= 0; --k) {
      const int end = window_.first + r + column;
      ends[k] = end;
      if (k == 0) break;
      const int start = end - pieces[k] + 1;
      const Cost target = rows_[r][column] - detail::processing_energy(*instance_, start, pieces[k]);
      const int prev = r - pieces[k];
      int found = -1;
      for (int c = 0; c < width_; ++c) {
        const int e = window_.first + prev + c;
        if (e >= start) break;
        const Cost f = rows_[prev][c];
        const Cost s = table_->cost(e, start);
        if (f < kInfCost && s < kInfCost && f + s == target) {
          found = c;
          break;
        }
      }
      if (found < 0) throw Error(ErrorCode::kReconstructionMismatch, "levels backtrack lost its predecessor");
      column = found;
      r = prev;
    }
    std::vector<int> starts(pieces.size());
    for (std::size_t k = 0; k < pieces.size(); ++k) starts[k] = ends[k] - pieces[k] + 1;
    return starts;
  }

 private:
  // Computes the row of the piece covering levels prev+1 .. prev+len.
  void fill_piece(int prev, int len) {
    const int last = prev + len;
    std::vector<Cost>& out = rows_[last];
    const int first_start = window_.first + prev + 1;
    if (prev < 0) {
      const Cost base = detail::boundary_energy(*instance_, 1);
      for (int c = 0; c < width_; ++c) {
        const Cost s = table_->cost(1, first_start + c);
        out[c] = s < kInfCost ? base + s : kInfCost;
      }
    } else {
      sweep_.run(rows_[prev], window_.first + prev, first_start, out);
    }
    for (int c = 0; c < width_; ++c) {
      if (out[c] < kInfCost) out[c] += detail::processing_energy(*instance_, first_start + c, len);
    }
  }

  Cost sink(int* column) const {
    const int h = instance_->horizon();
    const Cost tail = detail::boundary_energy(*instance_, h);
    Cost best = kInfCost;
    const auto& last = rows_[levels_ - 1];
    for (int c = 0; c < width_; ++c) {
      const Cost s = table_->cost(window_.first + levels_ - 1 + c, h);
      if (last[c] >= kInfCost || s >= kInfCost) continue;
      if (last[c] + s + tail < best) {
        best = last[c] + s + tail;
        if (column) *column = c;
      }
    }
    return best;
  }

  const Instance* instance_;
  const SwitchingTable* table_;
  ProcessingWindow window_;
  int levels_;
  int width_ = 0;
  int fixed_levels_ = 0;
  int piece_ = 1;
  std::vector<int> fixed_jobs_;
  std::vector<std::vector<Cost>> rows_;
  GapSweep sweep_;
};

}  // namespace tousched
