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

#include <numeric>
#include <optional>
#include <vector>

#include "tousched/seqtec.hpp"

namespace tousched {

/// Fixed job prefix plus the processing times still to be sequenced.
struct PartialSequence {
  std::vector<int> fixed;
  std::vector<int> remaining;  // processing times, ascending

  static PartialSequence of(const Instance& instance, std::vector<int> fixed) {
    std::vector<bool> used(instance.job_count(), false);
    PartialSequence ps;
    for (int j : fixed) {
      if (j < 0 || j >= instance.job_count() || used[j]) {
        throw Error(ErrorCode::kInvalidInstance, "partial sequence repeats or misnames a job");
      }
      used[j] = true;
    }
    ps.fixed = std::move(fixed);
    for (int j = 0; j < instance.job_count(); ++j) {
      if (!used[j]) ps.remaining.push_back(instance.processing_time(j));
    }
    std::sort(ps.remaining.begin(), ps.remaining.end());
    return ps;
  }
};

using BlockList = std::vector<Run>;

inline std::vector<int> block_lengths(const BlockList& blocks) {
  std::vector<int> out;
  for (const Run& b : blocks) out.push_back(b.length);
  return out;
}

/// gcd of the remaining processing times; nullopt when nothing remains.
inline std::optional<int> gcd_of_remaining(const std::vector<int>& remaining) {
  if (remaining.empty()) return std::nullopt;
  int g = 0;
  for (int p : remaining) g = std::gcd(g, p);
  return g;
}

inline std::optional<int> gcd_of_remaining(const PartialSequence& partial) {
  return gcd_of_remaining(partial.remaining);
}

enum class BoundMode { kUnit, kGcd };

struct RelaxedSolution {
  Cost lb_grid = kInfCost;
  Rational lb;
  int piece = 1;
  std::vector<int> pieces;  // piece lengths in sequence order
  std::vector<int> starts;  // start interval of each piece
  std::vector<Transition> omega;
  BlockList blocks;
};

/// Labelling and processing blocks of the latest levels evaluation.
inline void fill_relaxed(const Instance& instance, BehaviorCache& cache, const LevelsArray& levels,
                         RelaxedSolution& out) {
  out.pieces = levels.layout();
  out.starts = levels.piece_starts();
  std::vector<Run> runs;
  for (std::size_t k = 0; k < out.pieces.size(); ++k) {
    if (!runs.empty() && runs.back().end() + 1 == out.starts[k]) {
      runs.back().length += out.pieces[k];
    } else {
      runs.push_back({out.starts[k], out.pieces[k]});
    }
  }
  out.omega = stitch_omega(instance, cache, runs);
  out.blocks = proc_runs(instance, out.omega);
}

/// Relaxed optimum for a partial sequence: the remaining jobs become unit
/// pieces (kUnit) or pieces of their gcd (kGcd). `levels` must hold exactly
/// the joins of partial.fixed. Throws InfeasibleRelaxation when no relaxed
/// schedule exists.
inline RelaxedSolution lower_bound(const Instance& instance, const PartialSequence& partial, LevelsArray& levels,
                                   BoundMode mode, BehaviorCache* cache = nullptr) {
  if (levels.fixed_jobs() != partial.fixed) {
    throw Error(ErrorCode::kInvalidInstance, "levels do not match the partial sequence");
  }
  RelaxedSolution out;
  out.piece = (mode == BoundMode::kGcd) ? gcd_of_remaining(partial).value_or(1) : 1;
  out.lb_grid = levels.evaluate(out.piece);
  if (out.lb_grid >= kInfCost) {
    throw Error(ErrorCode::kInfeasibleRelaxation, "no relaxed schedule fits the processing window");
  }
  out.lb = instance.to_rational(out.lb_grid);
  if (cache) fill_relaxed(instance, *cache, levels, out);
  return out;
}

}  // namespace tousched
