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

#include <gtest/gtest.h>

#include "support/fixtures.hpp"
#include "support/oracle.hpp"

using namespace tousched;

namespace {

struct Prepared {
  Instance inst;
  SwitchingTable table;
  ProcessingWindow window;
  explicit Prepared(Instance i) : inst(std::move(i)), table(spaces(inst)), window(try_processing_window(inst)) {}
};

Cost reference_relaxed(const Prepared& p, const LevelsArray& levels, int g) {
  std::vector<int> lengths;
  for (int j : levels.fixed_jobs()) lengths.push_back(p.inst.processing_time(j));
  for (int k = 0; k < levels.free_levels() / g; ++k) lengths.push_back(g);
  return detail::sequence_dp(p.inst, p.table, p.window, lengths).tec_grid;
}

}  // namespace

TEST(FixedSequence, TwoOrdersOfSampleJobs) {
  const Prepared p(fixtures::example1());
  const auto a = fixed_sequence_tec(p.inst, p.table, {0, 1, 2});
  EXPECT_EQ(a.tec, Rational(353));
  EXPECT_EQ(a.starts, (std::vector<int>{7, 8, 15}));
  const auto b = fixed_sequence_tec(p.inst, p.table, {1, 0, 2});
  EXPECT_EQ(b.tec, Rational(342));
  EXPECT_EQ(b.starts, (std::vector<int>{14, 7, 15}));
}

TEST(FixedSequence, SingleUnitJob) {
  Instance inst(std::vector<Rational>(6, Rational(1)), {1}, nosby_diagram());
  const SwitchingTable table = spaces(inst);
  EXPECT_EQ(fixed_sequence_tec(inst, table, {0}).tec, Rational(15));
  EXPECT_EQ(oracle::exhaustive_min(inst), std::optional<Cost>(15));
}

TEST(FixedSequence, RejectsBadSequences) {
  const Prepared p(fixtures::example1());
  EXPECT_THROW(fixed_sequence_tec(p.inst, p.table, {0, 0, 2}), Error);
  EXPECT_THROW(fixed_sequence_tec(p.inst, p.table, {0, 1}), Error);
}

TEST(FixedSequence, InfeasibleWhenNoPathExists) {
  // Turning on takes the whole horizon.
  using T = std::optional<int>;
  using P = std::optional<Rational>;
  TransitionDiagram d({"off", "proc"}, StateId{0}, StateId{1}, {{T{1}, T{3}}, {T{1}, T{1}}},
                      {{P{Rational(0)}, P{Rational(1)}}, {P{Rational(1)}, P{Rational(1)}}});
  Instance inst(std::vector<Rational>(5, Rational(1)), {1}, d);
  const SwitchingTable table = spaces(inst);
  try {
    fixed_sequence_tec(inst, table, {0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInfeasibleSequence);
  }
}

TEST(FixedSequence, MatchesBruteForcePerOrder) {
  std::mt19937_64 rng(77);
  int checked = 0;
  for (int trial = 0; trial < 220; ++trial) {
    oracle::RandomSpec spec;
    spec.max_jobs = 4;
    spec.max_p = 3;
    spec.min_h = 8;
    spec.max_h = 16;
    spec.negative = trial % 4 == 0;
    spec.fractional = trial % 7 == 0;
    const Prepared p(oracle::random_instance(rng, spec));
    std::vector<int> order(p.inst.job_count());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    const auto ref = oracle::detail::best_for_order(p.inst, order);
    ASSERT_TRUE(ref.feasible);
    const auto got = fixed_sequence_tec(p.inst, p.table, order);
    ASSERT_EQ(got.tec_grid, ref.tec_grid) << "trial " << trial;
    ++checked;
  }
  EXPECT_GE(checked, 200);
}

TEST(FixedSequence, ScheduleFromStartsValidates) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const Prepared p(oracle::random_instance(rng, {.negative = true}));
    std::vector<int> order(p.inst.job_count());
    std::iota(order.begin(), order.end(), 0);
    const auto r = fixed_sequence_tec(p.inst, p.table, order);
    BehaviorCache cache(p.inst);
    const Schedule s = schedule_from_starts(p.inst, cache, r.starts);
    const auto report = validate(p.inst, s);
    ASSERT_TRUE(report.ok) << report.violations.front().message;
    EXPECT_EQ(report.tec, r.tec);
  }
}

TEST(Levels, JoinOrderJ2J1J3Gives342) {
  const Prepared p(fixtures::example1());
  LevelsArray levels(p.inst, p.table, p.window);
  EXPECT_EQ(levels.level_count(), 7);
  levels.join(1);
  levels.join(0);
  levels.join(2);
  EXPECT_EQ(levels.evaluate(1), 342);
  EXPECT_EQ(levels.piece_starts(), (std::vector<int>{7, 14, 15}));
}

TEST(Levels, JoiningUnitJobKeepsRows) {
  const Prepared p(fixtures::example1());
  LevelsArray levels(p.inst, p.table, p.window);
  levels.evaluate(1);
  const auto before = levels.row(0);
  levels.join(0);
  EXPECT_EQ(levels.row(0), before);
  EXPECT_EQ(levels.evaluate(1), 339);
}

TEST(Levels, SplitOnFreshArrayThrows) {
  const Prepared p(fixtures::example1());
  LevelsArray levels(p.inst, p.table, p.window);
  try {
    levels.split();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyJoinStack);
  }
}

TEST(Levels, RootValueIndependentOfOrder) {
  const Prepared p(fixtures::example1());
  LevelsArray a(p.inst, p.table, p.window);
  EXPECT_EQ(a.evaluate(1), 339);
  EXPECT_EQ(a.piece_starts(), (std::vector<int>{7, 8, 9, 14, 15, 16, 18}));
}

TEST(Levels, JoinSplitRestoresRows) {
  std::mt19937_64 rng(123);
  for (int trial = 0; trial < 100; ++trial) {
    oracle::RandomSpec spec;
    spec.max_jobs = 5;
    spec.max_h = 24;
    spec.negative = trial % 3 == 0;
    const Prepared p(oracle::random_instance(rng, spec));
    LevelsArray levels(p.inst, p.table, p.window);
    LevelsArray fresh(p.inst, p.table, p.window);
    const int n = p.inst.job_count();
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    const int keep = static_cast<int>(rng() % n);
    for (int k = 0; k < keep; ++k) {
      levels.join(order[k]);
      fresh.join(order[k]);
    }
    const Cost expect = fresh.evaluate(1);
    std::vector<std::vector<Cost>> rows;
    for (int r = 0; r < fresh.level_count(); ++r) rows.push_back(fresh.row(r));
    // wander off and come back
    for (int k = keep; k < n; ++k) {
      levels.join(order[k]);
      levels.evaluate(1);
    }
    for (int k = keep; k < n; ++k) levels.split();
    ASSERT_EQ(levels.evaluate(1), expect);
    for (int r = 0; r < levels.level_count(); ++r) ASSERT_EQ(levels.row(r), rows[r]) << "row " << r;
  }
}

TEST(Levels, MatchesReferenceDpForAnyPieceLength) {
  std::mt19937_64 rng(321);
  for (int trial = 0; trial < 150; ++trial) {
    oracle::RandomSpec spec;
    spec.max_jobs = 5;
    spec.max_p = 4;
    spec.max_h = 24;
    spec.negative = trial % 2 == 0;
    const Prepared p(oracle::random_instance(rng, spec));
    LevelsArray levels(p.inst, p.table, p.window);
    const int n = p.inst.job_count();
    const int keep = static_cast<int>(rng() % (n + 1));
    for (int k = 0; k < keep; ++k) levels.join(k);
    const int free = levels.free_levels();
    for (int g = 1; g <= std::max(1, free); ++g) {
      if (free % g != 0) continue;
      const Cost got = levels.evaluate(g);
      ASSERT_EQ(got, reference_relaxed(p, levels, g)) << "trial " << trial << " g " << g;
      if (got < kInfCost) {
        std::vector<int> lengths = levels.layout();
        const auto ref = detail::sequence_dp(p.inst, p.table, p.window, lengths);
        ASSERT_EQ(levels.piece_starts(), ref.starts);
      }
    }
  }
}

TEST(Levels, RelaxationNeverExceedsCompletions) {
  std::mt19937_64 rng(555);
  for (int trial = 0; trial < 100; ++trial) {
    oracle::RandomSpec spec;
    spec.max_jobs = 4;
    spec.negative = trial % 2 == 0;
    const Prepared p(oracle::random_instance(rng, spec));
    const int n = p.inst.job_count();
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    do {
      for (int keep = 0; keep <= n; ++keep) {
        LevelsArray levels(p.inst, p.table, p.window);
        for (int k = 0; k < keep; ++k) levels.join(order[k]);
        const Cost relaxed = levels.evaluate(1);
        const Cost full = fixed_sequence_tec(p.inst, p.table, order).tec_grid;
        ASSERT_LE(relaxed, full);
        if (keep == n) {
          ASSERT_EQ(relaxed, full);
        }
      }
    } while (std::next_permutation(order.begin(), order.end()));
  }
}
