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

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "tousched/core.hpp"
#include "tousched/diagrams.hpp"

namespace tousched {

/// SplitMix64 (Steele, Lea, Flood). Substream k of seed s starts from state
/// s + k * 0xD1B54A32D192ED03, so the job stream and the cost stream never
/// depend on each other.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  static SplitMix64 substream(std::uint64_t seed, std::uint64_t stream) {
    return SplitMix64(seed + stream * 0xD1B54A32D192ED03ULL);
  }

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform integer in [lo, hi] by rejection, free of modulo bias.
  std::int64_t uniform(std::int64_t lo, std::int64_t hi) {
    const std::uint64_t range = static_cast<std::uint64_t>(hi - lo) + 1;
    if (range == 0) return static_cast<std::int64_t>(next());
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % range;
    std::uint64_t x;
    do {
      x = next();
    } while (x >= limit);
    return lo + static_cast<std::int64_t>(x % range);
  }

 private:
  std::uint64_t state_;
};

inline constexpr std::uint64_t kJobStream = 1;
inline constexpr std::uint64_t kCostStream = 2;

struct UniformCost {
  std::int64_t lo = 1;
  std::int64_t hi = 10;
};

struct ProfileCost {
  std::vector<Rational> prices;
  int offset = 0;
  bool wrap = true;
};

struct ExplicitCost {
  std::vector<Rational> costs;
};

using CostSource = std::variant<UniformCost, ProfileCost, ExplicitCost>;

struct GenSpec {
  std::string id;
  int n = 1;
  std::vector<int> proc_time_set{1};
  std::vector<int> forced_jobs;  // used verbatim instead of drawing when non-empty
  CostSource cost_source = UniformCost{};
  Rational lambda{1};
  std::uint64_t seed = 0;
  TransitionDiagram diagram = nosby_diagram();
};

/// h = ceil(lambda * (T[off,proc] + sum p + T[proc,off])).
inline int generated_horizon(const TransitionDiagram& diagram, const std::vector<int>& jobs, Rational lambda) {
  const auto on = diagram.time(diagram.off(), diagram.proc());
  const auto down = diagram.time(diagram.proc(), diagram.off());
  if (!on || !down) {
    throw Error(ErrorCode::kInvalidInstance, "diagram needs direct off->proc and proc->off transitions");
  }
  std::int64_t base = *on + *down;
  for (int p : jobs) base += p;
  return static_cast<int>((lambda * Rational(base)).ceil());
}

inline Instance generate(const GenSpec& spec) {
  if (spec.lambda < Rational(1)) throw Error(ErrorCode::kInvalidInstance, "lambda must be at least 1");
  std::vector<int> jobs = spec.forced_jobs;
  if (jobs.empty()) {
    if (spec.n < 1) throw Error(ErrorCode::kInvalidInstance, "n must be positive");
    if (spec.proc_time_set.empty()) throw Error(ErrorCode::kInvalidInstance, "empty processing-time set");
    for (int p : spec.proc_time_set) {
      if (p < 1) throw Error(ErrorCode::kInvalidInstance, "processing times must be positive");
    }
    SplitMix64 rng = SplitMix64::substream(spec.seed, kJobStream);
    const auto last = static_cast<std::int64_t>(spec.proc_time_set.size()) - 1;
    for (int j = 0; j < spec.n; ++j) jobs.push_back(spec.proc_time_set[rng.uniform(0, last)]);
  }
  const int h = generated_horizon(spec.diagram, jobs, spec.lambda);

  std::vector<Rational> costs;
  costs.reserve(h);
  if (const auto* u = std::get_if<UniformCost>(&spec.cost_source)) {
    if (u->lo > u->hi) throw Error(ErrorCode::kInvalidInstance, "uniform cost range is empty");
    SplitMix64 rng = SplitMix64::substream(spec.seed, kCostStream);
    for (int i = 0; i < h; ++i) costs.emplace_back(rng.uniform(u->lo, u->hi));
  } else if (const auto* prof = std::get_if<ProfileCost>(&spec.cost_source)) {
    const int len = static_cast<int>(prof->prices.size());
    if (len == 0 || prof->offset < 0 || prof->offset >= len || (!prof->wrap && prof->offset + h > len)) {
      throw Error(ErrorCode::kProfileTooShort, "price profile of " + std::to_string(len) +
                                                   " rows cannot cover " + std::to_string(h) +
                                                   " intervals from offset " + std::to_string(prof->offset));
    }
    for (int i = 0; i < h; ++i) costs.push_back(prof->prices[(prof->offset + i) % len]);
  } else {
    const auto& ex = std::get<ExplicitCost>(spec.cost_source);
    if (static_cast<int>(ex.costs.size()) < h) {
      throw Error(ErrorCode::kProfileTooShort, "explicit cost vector has " + std::to_string(ex.costs.size()) +
                                                   " entries, horizon is " + std::to_string(h));
    }
    costs.assign(ex.costs.begin(), ex.costs.begin() + h);
  }
  return Instance(std::move(costs), std::move(jobs), spec.diagram);
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    std::size_t b = 0;
    while (b < cell.size() && cell[b] == ' ') ++b;
    out.push_back(cell.substr(b));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace detail

/// Reads a price column from a CSV file with a header row.
inline std::vector<Rational> ingest_prices(std::istream& in, const std::string& index_column = "idx",
                                           const std::string& cost_column = "cost") {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::kParseError, "price file is empty");
  const auto header = detail::split_csv_line(line);
  int idx_col = -1, cost_col = -1;
  for (int k = 0; k < static_cast<int>(header.size()); ++k) {
    if (header[k] == index_column) idx_col = k;
    if (header[k] == cost_column) cost_col = k;
  }
  if (idx_col < 0) throw Error(ErrorCode::kParseError, "missing column '" + index_column + "'");
  if (cost_col < 0) throw Error(ErrorCode::kParseError, "missing column '" + cost_column + "'");
  std::vector<Rational> prices;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    const auto cells = detail::split_csv_line(line);
    auto bad = [&](int col, const std::string& why) {
      throw Error(ErrorCode::kParseError,
                  "row " + std::to_string(row) + ", column " + std::to_string(col + 1) + ": " + why);
    };
    if (static_cast<int>(cells.size()) <= std::max(idx_col, cost_col)) bad(static_cast<int>(cells.size()), "missing cell");
    auto number = [](const std::string& text) -> std::optional<Rational> {
      try {
        return Rational::parse(text);
      } catch (const Error&) {
        return std::nullopt;
      }
    };
    const auto idx = number(cells[idx_col]);
    if (!idx || !idx->is_integer()) bad(idx_col, "bad index '" + cells[idx_col] + "'");
    const auto price = number(cells[cost_col]);
    if (!price) bad(cost_col, "bad price '" + cells[cost_col] + "'");
    prices.push_back(*price);
  }
  return prices;
}

inline std::vector<Rational> ingest_prices(const std::string& path, const std::string& index_column = "idx",
                                           const std::string& cost_column = "cost") {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kParseError, "cannot open price file " + path);
  return ingest_prices(in, index_column, cost_column);
}

}  // namespace tousched
