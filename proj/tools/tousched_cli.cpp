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

// tousched: solve, validate, generate, bench and sweep.
//
// Exit codes: 0 Optimal or Feasible (or success), 1 I/O or parse error,
// 2 Infeasible, 3 TimedOut, 4 schedule rejected by validate.

#include <algorithm>
#include <atomic>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "tousched/json_io.hpp"
#include "tousched/tousched.hpp"

namespace fs = std::filesystem;
using namespace tousched;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitTimedOut = 3;
constexpr int kExitInvalid = 4;

// "250ms", "60s", "2m", or a bare number of seconds.
std::chrono::microseconds parse_duration(const std::string& text) {
  std::size_t pos = 0;
  while (pos < text.size() && (std::isdigit(static_cast<unsigned char>(text[pos])) || text[pos] == '.')) ++pos;
  if (pos == 0) throw CLI::ValidationError("duration", "cannot parse '" + text + "'");
  const double value = std::stod(text.substr(0, pos));
  const std::string unit = text.substr(pos);
  double scale = 1e6;
  if (unit == "us") {
    scale = 1;
  } else if (unit == "ms") {
    scale = 1e3;
  } else if (unit == "s" || unit.empty()) {
    scale = 1e6;
  } else if (unit == "m" || unit == "min") {
    scale = 60e6;
  } else {
    throw CLI::ValidationError("duration", "unknown unit in '" + text + "'");
  }
  return std::chrono::microseconds(static_cast<std::int64_t>(value * scale));
}

struct SolverFlags {
  std::string time_limit = "60s";
  std::int64_t node_limit = -1;
  bool no_gcd = false;
  bool no_pack = false;
  bool no_init = false;
  std::string pack_budget = "50ms";
  int jobs = 1;

  void add_to(CLI::App* app) {
    app->add_option("--time-limit", time_limit, "wall-clock limit per solve, e.g. 500ms, 60s");
    app->add_option("--node-limit", node_limit, "search node limit per solve");
    app->add_flag("--no-gcd", no_gcd, "use unit pieces instead of gcd pieces in the bound");
    app->add_flag("--no-primal-pack", no_pack, "skip the packing step at search nodes");
    app->add_flag("--no-init", no_init, "skip the initial bin-finding heuristic");
    app->add_option("--pack-budget", pack_budget, "time budget per packing call");
    app->add_option("--jobs", jobs, "parallelism")->check(CLI::PositiveNumber);
  }

  SearchConfig config() const {
    SearchConfig c;
    c.use_gcd = !no_gcd;
    c.use_primal_packing = !no_pack;
    c.use_initial_heuristic = !no_init;
    c.time_limit = std::chrono::duration_cast<std::chrono::milliseconds>(parse_duration(time_limit));
    if (node_limit >= 0) c.node_limit = node_limit;
    c.pack_budget.time = parse_duration(pack_budget);
    return c;
  }
};

int exit_code(SolveStatus s) {
  switch (s) {
    case SolveStatus::kOptimal:
    case SolveStatus::kFeasible: return kExitOk;
    case SolveStatus::kInfeasible: return kExitInfeasible;
    case SolveStatus::kTimedOut: return kExitTimedOut;
  }
  return kExitIo;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kParseError, "cannot write " + path);
  out << text;
  if (!out) throw Error(ErrorCode::kParseError, "write failed for " + path);
}

Instance load_instance(const std::string& path) { return instance_from_json(read_json_file(path)); }

// ---- solve ----

int cmd_solve(const std::string& path, const SolverFlags& flags, const std::string& out) {
  const Instance inst = load_instance(path);
  SearchConfig cfg = flags.config();
  cfg.spaces_threads = flags.jobs;
  const SolveResult r = solve(inst, cfg);
  std::cout << result_to_json(inst, r).dump() << "\n";
  if (!out.empty() && r.schedule) write_text(out, schedule_to_json(inst, *r.schedule).dump(2) + "\n");
  return exit_code(r.status);
}

// ---- validate ----

int cmd_validate(const std::string& instance_path, const std::string& schedule_path) {
  const Instance inst = load_instance(instance_path);
  Json j = read_json_file(schedule_path);
  // accept a bare schedule or a solve result wrapping one
  if (j.is_object() && j.contains("schedule")) {
    if (j["schedule"].is_null()) throw Error(ErrorCode::kParseError, "field 'schedule': result has no schedule");
    j = j["schedule"];
  }
  const Schedule s = schedule_from_json(inst, j);
  const ValidationReport report = validate(inst, s);
  std::cout << violations_to_json(report).dump() << "\n";
  return report.ok ? kExitOk : kExitInvalid;
}

// ---- spec loading shared by generate and bench ----

struct BenchItem {
  std::string id;
  std::string group;
  std::optional<GenSpec> spec;      // generate from this
  std::optional<Instance> instance;  // or use this as is
  std::vector<int> proc_time_set;
};

std::vector<BenchItem> items_from_json(const Json& j, const std::string& base_dir, const std::string& stem,
                                       std::optional<std::uint64_t> seed) {
  std::vector<BenchItem> items;
  if (j.is_array()) {
    for (std::size_t k = 0; k < j.size(); ++k) {
      auto more = items_from_json(j[k], base_dir, stem + "-" + std::to_string(k), seed);
      items.insert(items.end(), more.begin(), more.end());
    }
    return items;
  }
  if (j.is_object() && j.contains("horizon")) {
    BenchItem item;
    item.id = item.group = j.value("id", stem);
    item.instance = instance_from_json(j);
    item.proc_time_set = item.instance->jobs();
    std::sort(item.proc_time_set.begin(), item.proc_time_set.end());
    item.proc_time_set.erase(std::unique(item.proc_time_set.begin(), item.proc_time_set.end()),
                             item.proc_time_set.end());
    items.push_back(std::move(item));
    return items;
  }
  Json copy = j;
  if (seed && copy.is_object() && !copy.contains("seeds")) copy["seed"] = *seed;
  for (GenSpec& spec : genspecs_from_json(copy, base_dir)) {
    BenchItem item;
    item.id = spec.id;
    item.group = copy.value("id", std::string("instance"));
    item.proc_time_set = spec.forced_jobs.empty() ? spec.proc_time_set : spec.forced_jobs;
    std::sort(item.proc_time_set.begin(), item.proc_time_set.end());
    item.proc_time_set.erase(std::unique(item.proc_time_set.begin(), item.proc_time_set.end()),
                             item.proc_time_set.end());
    item.spec = std::move(spec);
    items.push_back(std::move(item));
  }
  return items;
}

std::vector<BenchItem> load_items(const std::string& path, std::optional<std::uint64_t> seed) {
  std::vector<std::string> files;
  if (fs::is_directory(path)) {
    for (const auto& e : fs::directory_iterator(path)) {
      if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path().string());
    }
    std::sort(files.begin(), files.end());
  } else {
    files.push_back(path);
  }
  std::vector<BenchItem> items;
  for (const std::string& f : files) {
    const fs::path p(f);
    auto more = items_from_json(read_json_file(f), p.parent_path().string().empty() ? "." : p.parent_path().string(),
                                p.stem().string(), seed);
    items.insert(items.end(), more.begin(), more.end());
  }
  return items;
}

// ---- generate ----

int cmd_generate(const std::string& path, std::optional<std::uint64_t> seed, const std::string& out) {
  const auto items = load_items(path, seed);
  if (items.size() == 1 && !fs::is_directory(out)) {
    const Instance inst = items[0].spec ? generate(*items[0].spec) : *items[0].instance;
    const std::string text = instance_to_json(inst).dump(2) + "\n";
    if (out.empty()) {
      std::cout << text;
    } else {
      write_text(out, text);
    }
    return kExitOk;
  }
  if (out.empty()) {
    // one compact instance per line
    for (const auto& item : items) {
      Json j = instance_to_json(item.spec ? generate(*item.spec) : *item.instance);
      j["id"] = item.id;
      std::cout << j.dump() << "\n";
    }
    return kExitOk;
  }
  fs::create_directories(out);
  for (const auto& item : items) {
    const Instance inst = item.spec ? generate(*item.spec) : *item.instance;
    write_text((fs::path(out) / (item.id + ".json")).string(), instance_to_json(inst).dump(2) + "\n");
  }
  return kExitOk;
}

// ---- bench ----

// Digit runs compare by value, so "g-s2" sorts before "g-s10".
bool natural_less(const std::string& a, const std::string& b) {
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (std::isdigit(static_cast<unsigned char>(a[i])) && std::isdigit(static_cast<unsigned char>(b[j]))) {
      std::size_t ie = i, je = j;
      while (ie < a.size() && std::isdigit(static_cast<unsigned char>(a[ie]))) ++ie;
      while (je < b.size() && std::isdigit(static_cast<unsigned char>(b[je]))) ++je;
      std::string na = a.substr(i, ie - i), nb = b.substr(j, je - j);
      na.erase(0, std::min(na.find_first_not_of('0'), na.size()));
      nb.erase(0, std::min(nb.find_first_not_of('0'), nb.size()));
      if (na.size() != nb.size()) return na.size() < nb.size();
      if (na != nb) return na < nb;
      i = ie;
      j = je;
    } else {
      if (a[i] != b[j]) return a[i] < b[j];
      ++i;
      ++j;
    }
  }
  return a.size() - i < b.size() - j;
}

struct BenchRow {
  std::string id, group;
  int n = 0, h = 0;
  std::string set;
  std::string status;
  std::optional<Rational> ub, lb;
  std::optional<double> gap;
  std::int64_t nodes = 0;
  double time_ms = 0, preprocess_ms = 0;
};

std::string fmt(double v, int digits) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

BenchRow run_item(const BenchItem& item, const SearchConfig& cfg) {
  BenchRow row;
  row.id = item.id;
  row.group = item.group;
  for (std::size_t k = 0; k < item.proc_time_set.size(); ++k) {
    row.set += (k ? "|" : "") + std::to_string(item.proc_time_set[k]);
  }
  try {
    const Instance inst = item.spec ? generate(*item.spec) : *item.instance;
    row.n = inst.job_count();
    row.h = inst.horizon();
    const SolveResult r = solve(inst, cfg);
    row.status = to_string(r.status);
    if (r.has_ub()) row.ub = r.ub;
    if (r.has_lb()) row.lb = r.lb;
    if (row.ub && row.lb && *row.ub > Rational(0)) {
      row.gap = 100.0 * (*row.ub - *row.lb).to_double() / row.ub->to_double();
    }
    row.nodes = r.nodes;
    row.time_ms = r.wall_time.count() / 1000.0;
    row.preprocess_ms = r.preprocess_time.count() / 1000.0;
  } catch (const Error& e) {
    row.status = "Error:" + std::string(to_string(e.code()));
    std::cerr << item.id << ": " << e.what() << "\n";
  }
  return row;
}

int cmd_bench(const std::string& path, const SolverFlags& flags, std::optional<std::uint64_t> seed,
              const std::string& out) {
  std::vector<BenchItem> items = load_items(path, seed);
  const SearchConfig cfg = flags.config();
  std::vector<BenchRow> rows(items.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k; (k = next++) < items.size();) rows[k] = run_item(items[k], cfg);
  };
  const int threads = std::max(1, std::min<int>(flags.jobs, static_cast<int>(items.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  std::stable_sort(rows.begin(), rows.end(), [](const BenchRow& a, const BenchRow& b) { return natural_less(a.id, b.id); });

  std::ostringstream csv;
  csv << "instance_id,n,h,proc_time_set,status,ub,lb,gap_percent,nodes,time_ms,preprocess_ms\n";
  for (const BenchRow& r : rows) {
    csv << r.id << ',' << r.n << ',' << r.h << ',' << r.set << ',' << r.status << ','
        << (r.ub ? r.ub->to_string() : "") << ',' << (r.lb ? r.lb->to_string() : "") << ','
        << (r.gap ? fmt(*r.gap, 4) : "") << ',' << r.nodes << ',' << fmt(r.time_ms, 3) << ','
        << fmt(r.preprocess_ms, 3) << '\n';
  }
  std::ostream* summary = &std::cout;
  if (out.empty()) {
    std::cout << csv.str();
    summary = &std::cerr;
  } else {
    write_text(out, csv.str());
  }
  if (rows.empty()) return kExitOk;

  struct Agg {
    int count = 0, optimal = 0, solved = 0, gaps = 0;
    double gap_sum = 0, time_sum = 0;
  };
  std::map<std::string, Agg> groups;
  std::vector<std::string> order;
  for (const BenchRow& r : rows) {
    if (!groups.count(r.group)) order.push_back(r.group);
    Agg& a = groups[r.group];
    ++a.count;
    a.optimal += r.status == "Optimal";
    // #s: a solution without an optimality proof; the gap averages over those
    const bool unproven = r.ub.has_value() && r.status != "Optimal";
    a.solved += unproven;
    if (unproven && r.gap) {
      a.gap_sum += *r.gap;
      ++a.gaps;
    }
    a.time_sum += r.time_ms;
  }
  *summary << std::left << std::setw(16) << "group" << std::right << std::setw(6) << "count" << std::setw(6) << "#o"
           << std::setw(6) << "#s" << std::setw(12) << "gap[%]" << std::setw(12) << "t[s]" << "\n";
  for (const std::string& g : order) {
    const Agg& a = groups[g];
    *summary << std::left << std::setw(16) << g << std::right << std::setw(6) << a.count << std::setw(6) << a.optimal
             << std::setw(6) << a.solved << std::setw(12) << (a.gaps ? fmt(a.gap_sum / a.gaps, 3) : "-")
             << std::setw(12) << fmt(a.time_sum / a.count / 1000.0, 3) << "\n";
  }
  return kExitOk;
}

// ---- sweep ----

// "lo:hi:count" or a single value.
std::vector<Rational> parse_axis(const std::string& text, const std::string& name) {
  std::vector<std::string> parts;
  std::stringstream in(text);
  for (std::string p; std::getline(in, p, ':');) parts.push_back(p);
  try {
    if (parts.size() == 1) return {Rational::parse(parts[0])};
    if (parts.size() == 3) {
      const Rational lo = Rational::parse(parts[0]), hi = Rational::parse(parts[1]);
      const int count = std::stoi(parts[2]);
      if (count < 1) throw CLI::ValidationError(name, "count must be positive");
      std::vector<Rational> v;
      for (int k = 0; k < count; ++k) {
        v.push_back(count == 1 ? lo : lo + (hi - lo) * Rational(k, count - 1));
      }
      return v;
    }
  } catch (const Error& e) {
    throw CLI::ValidationError(name, e.what());
  } catch (const std::logic_error&) {
  }
  throw CLI::ValidationError(name, "expected lo:hi:count or a single value, got '" + text + "'");
}

int cmd_sweep(const std::string& path, const std::string& on_axis, const std::string& off_axis,
              const SolverFlags& flags, const std::string& out) {
  const Instance base = load_instance(path);
  const auto& d0 = base.diagram();
  const StateId off = d0.off(), proc = d0.proc();
  const auto on_v = on_axis.empty() ? std::vector<Rational>{*d0.power(off, proc)} : parse_axis(on_axis, "--on");
  const auto off_v = off_axis.empty() ? std::vector<Rational>{*d0.power(proc, off)} : parse_axis(off_axis, "--off");
  struct Point {
    Rational on, off;
    std::string status, tec;
  };
  std::vector<Point> points;
  for (const Rational& a : on_v) {
    for (const Rational& b : off_v) points.push_back({a, b, "", ""});
  }
  const SearchConfig cfg = flags.config();
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k; (k = next++) < points.size();) {
      Point& pt = points[k];
      try {
        TransitionDiagram d = d0;
        d.set_power(off, proc, pt.on);
        d.set_power(proc, off, pt.off);
        const Instance inst(base.costs(), base.jobs(), d);
        const SolveResult r = solve(inst, cfg);
        pt.status = to_string(r.status);
        if (r.has_ub()) pt.tec = r.ub.to_string();
      } catch (const Error& e) {
        pt.status = "Error:" + std::string(to_string(e.code()));
      }
    }
  };
  const int threads = std::max(1, std::min<int>(flags.jobs, static_cast<int>(points.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  std::ostringstream csv;
  csv << "p_on,p_off,status,tec\n";
  for (const Point& p : points) csv << p.on << ',' << p.off << ',' << p.status << ',' << p.tec << '\n';
  if (out.empty()) {
    std::cout << csv.str();
  } else {
    write_text(out, csv.str());
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact single-machine scheduling under time-of-use prices"};
  app.require_subcommand(1);

  std::string instance_path, schedule_path, spec_path, out;
  std::string on_axis, off_axis;
  std::int64_t seed_value = -1;
  SolverFlags solve_flags, bench_flags, sweep_flags;

  auto* solve_cmd = app.add_subcommand("solve", "solve an instance and print the result as JSON");
  solve_cmd->add_option("instance", instance_path, "instance JSON")->required();
  solve_cmd->add_option("--out", out, "write the schedule JSON here");
  solve_flags.add_to(solve_cmd);

  auto* validate_cmd = app.add_subcommand("validate", "check a schedule against an instance");
  validate_cmd->add_option("instance", instance_path, "instance JSON")->required();
  validate_cmd->add_option("schedule", schedule_path, "schedule JSON or solve output")->required();

  auto* generate_cmd = app.add_subcommand("generate", "generate instances from a generator spec");
  generate_cmd->add_option("spec", spec_path, "generator spec JSON or directory")->required();
  generate_cmd->add_option("--seed", seed_value, "seed for specs without a seed list");
  generate_cmd->add_option("--out", out, "output file, or directory for several instances");

  auto* bench_cmd = app.add_subcommand("bench", "solve generated instances and write a CSV");
  bench_cmd->add_option("spec", spec_path, "generator spec JSON or directory")->required();
  bench_cmd->add_option("--seed", seed_value, "seed for specs without a seed list");
  bench_cmd->add_option("--out", out, "CSV output path (stdout if omitted)");
  bench_flags.add_to(bench_cmd);

  auto* sweep_cmd = app.add_subcommand("sweep", "TEC over a grid of turn-on and turn-off powers");
  sweep_cmd->add_option("instance", instance_path, "instance JSON template")->required();
  sweep_cmd->add_option("--on", on_axis, "off->proc power grid lo:hi:count");
  sweep_cmd->add_option("--off", off_axis, "proc->off power grid lo:hi:count");
  sweep_cmd->add_option("--out", out, "CSV output path (stdout if omitted)");
  sweep_flags.add_to(sweep_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitIo;
  }

  std::optional<std::uint64_t> seed;
  if (seed_value >= 0) seed.emplace(static_cast<std::uint64_t>(seed_value));
  try {
    if (*solve_cmd) return cmd_solve(instance_path, solve_flags, out);
    if (*validate_cmd) return cmd_validate(instance_path, schedule_path);
    if (*generate_cmd) return cmd_generate(spec_path, seed, out);
    if (*bench_cmd) return cmd_bench(spec_path, bench_flags, seed, out);
    if (*sweep_cmd) return cmd_sweep(instance_path, on_axis, off_axis, sweep_flags, out);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitIo;
}
