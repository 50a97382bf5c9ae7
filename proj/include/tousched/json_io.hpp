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

#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "tousched/bnb.hpp"
#include "tousched/instgen.hpp"

namespace tousched {

using Json = nlohmann::json;

namespace detail {

[[noreturn]] inline void bad_field(const std::string& field, const std::string& why) {
  throw Error(ErrorCode::kParseError, "field '" + field + "': " + why);
}

inline const Json& member(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object()) bad_field(where, "expected an object");
  const auto it = j.find(key);
  if (it == j.end()) bad_field(where.empty() ? key : where + "." + key, "missing");
  return *it;
}

inline int as_int(const Json& j, const std::string& field) {
  if (!j.is_number_integer()) bad_field(field, "expected an integer");
  const auto v = j.get<std::int64_t>();
  if (v < INT32_MIN || v > INT32_MAX) bad_field(field, "integer out of range");
  return static_cast<int>(v);
}

inline Rational as_rational(const Json& j, const std::string& field) {
  try {
    if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
    if (j.is_number_float()) return Rational::parse(j.dump());
    if (j.is_string()) return Rational::parse(j.get<std::string>());
  } catch (const Error& e) {
    bad_field(field, e.what());
  }
  bad_field(field, "expected a number or a rational string");
}

inline std::string as_string(const Json& j, const std::string& field) {
  if (!j.is_string()) bad_field(field, "expected a string");
  return j.get<std::string>();
}

inline StateId state_by_name(const TransitionDiagram& d, const std::string& name, const std::string& field) {
  const auto s = d.find(name);
  if (!s) bad_field(field, "unknown state '" + name + "'");
  return *s;
}

}  // namespace detail

/// Integral rationals become JSON integers, others "p/q" strings.
inline Json to_json(const Rational& r) {
  if (r.is_integer()) return r.num();
  return r.to_string();
}

inline Json diagram_to_json(const TransitionDiagram& d) {
  Json j;
  j["states"] = d.names();
  j["off"] = d.name(d.off());
  j["proc"] = d.name(d.proc());
  Json time = Json::array(), power = Json::array();
  for (int s = 0; s < d.size(); ++s) {
    Json trow = Json::array(), prow = Json::array();
    for (int t = 0; t < d.size(); ++t) {
      const auto dt = d.time(StateId{s}, StateId{t});
      const auto pw = d.power(StateId{s}, StateId{t});
      trow.push_back(dt ? Json(*dt) : Json(nullptr));
      prow.push_back(pw ? to_json(*pw) : Json(nullptr));
    }
    time.push_back(trow);
    power.push_back(prow);
  }
  j["transition_time"] = time;
  j["transition_power"] = power;
  return j;
}

inline TransitionDiagram diagram_from_json(const Json& j, const std::string& where = "") {
  using detail::member;
  auto path = [&](const std::string& k) { return where.empty() ? k : where + "." + k; };
  const Json& states_j = member(j, "states", where);
  if (!states_j.is_array()) detail::bad_field(path("states"), "expected an array");
  std::vector<std::string> states;
  for (std::size_t k = 0; k < states_j.size(); ++k) {
    states.push_back(detail::as_string(states_j[k], path("states") + "[" + std::to_string(k) + "]"));
  }
  const int n = static_cast<int>(states.size());
  auto index_of = [&](const char* key) {
    const std::string name = detail::as_string(member(j, key, where), path(key));
    for (int s = 0; s < n; ++s) {
      if (states[s] == name) return StateId{s};
    }
    detail::bad_field(path(key), "unknown state '" + name + "'");
  };
  const StateId off = index_of("off");
  const StateId proc = index_of("proc");
  auto matrix = [&](const char* key) {
    const Json& m = member(j, key, where);
    if (!m.is_array() || static_cast<int>(m.size()) != n) {
      detail::bad_field(path(key), "expected a " + std::to_string(n) + "x" + std::to_string(n) + " matrix");
    }
    for (const auto& row : m) {
      if (!row.is_array() || static_cast<int>(row.size()) != n) {
        detail::bad_field(path(key), "expected a " + std::to_string(n) + "x" + std::to_string(n) + " matrix");
      }
    }
    return m;
  };
  const Json tm = matrix("transition_time");
  const Json pm = matrix("transition_power");
  TransitionDiagram::TimeMatrix time(n, std::vector<std::optional<int>>(n));
  TransitionDiagram::PowerMatrix power(n, std::vector<std::optional<Rational>>(n));
  for (int s = 0; s < n; ++s) {
    for (int t = 0; t < n; ++t) {
      const std::string cell = "[" + std::to_string(s) + "][" + std::to_string(t) + "]";
      if (!tm[s][t].is_null()) time[s][t] = detail::as_int(tm[s][t], path("transition_time") + cell);
      if (!pm[s][t].is_null()) power[s][t] = detail::as_rational(pm[s][t], path("transition_power") + cell);
    }
  }
  try {
    return TransitionDiagram(std::move(states), off, proc, std::move(time), std::move(power));
  } catch (const Error& e) {
    detail::bad_field(where.empty() ? "transition_time" : where, e.what());
  }
}

inline Json instance_to_json(const Instance& instance) {
  Json j;
  j["horizon"] = instance.horizon();
  Json costs = Json::array();
  for (const Rational& c : instance.costs()) costs.push_back(to_json(c));
  j["costs"] = costs;
  j["jobs"] = instance.jobs();
  const Json d = diagram_to_json(instance.diagram());
  for (const auto& [k, v] : d.items()) j[k] = v;
  return j;
}

inline Instance instance_from_json(const Json& j) {
  using detail::member;
  const int h = detail::as_int(member(j, "horizon", ""), "horizon");
  const Json& costs_j = member(j, "costs", "");
  if (!costs_j.is_array()) detail::bad_field("costs", "expected an array");
  if (static_cast<int>(costs_j.size()) != h) {
    detail::bad_field("costs", "has " + std::to_string(costs_j.size()) + " entries but horizon is " +
                                   std::to_string(h));
  }
  std::vector<Rational> costs;
  for (std::size_t i = 0; i < costs_j.size(); ++i) {
    costs.push_back(detail::as_rational(costs_j[i], "costs[" + std::to_string(i) + "]"));
  }
  const Json& jobs_j = member(j, "jobs", "");
  if (!jobs_j.is_array()) detail::bad_field("jobs", "expected an array");
  std::vector<int> jobs;
  for (std::size_t k = 0; k < jobs_j.size(); ++k) {
    jobs.push_back(detail::as_int(jobs_j[k], "jobs[" + std::to_string(k) + "]"));
  }
  TransitionDiagram diagram = diagram_from_json(j);
  try {
    return Instance(std::move(costs), std::move(jobs), std::move(diagram));
  } catch (const Error& e) {
    detail::bad_field("instance", e.what());
  }
}

inline Json schedule_to_json(const Instance& instance, const Schedule& s) {
  Json j;
  j["starts"] = s.starts;
  Json omega = Json::array();
  const auto& d = instance.diagram();
  for (const Transition& t : s.transitions) omega.push_back(Json::array({d.name(t.from), d.name(t.to)}));
  j["omega"] = omega;
  j["tec"] = to_json(tec(instance, s));
  return j;
}

inline Schedule schedule_from_json(const Instance& instance, const Json& j) {
  using detail::member;
  Schedule s;
  const Json& starts = member(j, "starts", "");
  if (!starts.is_array()) detail::bad_field("starts", "expected an array");
  for (std::size_t k = 0; k < starts.size(); ++k) {
    s.starts.push_back(detail::as_int(starts[k], "starts[" + std::to_string(k) + "]"));
  }
  const Json& omega = member(j, "omega", "");
  if (!omega.is_array()) detail::bad_field("omega", "expected an array");
  for (std::size_t k = 0; k < omega.size(); ++k) {
    const std::string f = "omega[" + std::to_string(k) + "]";
    if (!omega[k].is_array() || omega[k].size() != 2) detail::bad_field(f, "expected a [from, to] pair");
    s.transitions.push_back({detail::state_by_name(instance.diagram(), detail::as_string(omega[k][0], f), f),
                             detail::state_by_name(instance.diagram(), detail::as_string(omega[k][1], f), f)});
  }
  return s;
}

inline Json result_to_json(const Instance& instance, const SolveResult& r) {
  Json j;
  j["status"] = to_string(r.status);
  j["ub"] = r.has_ub() ? to_json(r.ub) : Json(nullptr);
  j["lb"] = r.has_lb() ? to_json(r.lb) : Json(nullptr);
  j["tec"] = r.schedule ? to_json(tec(instance, *r.schedule)) : Json(nullptr);
  j["nodes"] = r.nodes;
  j["time_ms"] = r.wall_time.count() / 1000.0;
  j["preprocess_ms"] = r.preprocess_time.count() / 1000.0;
  j["schedule"] = r.schedule ? schedule_to_json(instance, *r.schedule) : Json(nullptr);
  return j;
}

inline Json violations_to_json(const ValidationReport& report) {
  Json j;
  j["ok"] = report.ok;
  if (report.ok) j["tec"] = to_json(report.tec);
  Json list = Json::array();
  for (const Violation& v : report.violations) {
    list.push_back({{"condition", v.condition}, {"interval", v.interval}, {"job", v.job}, {"message", v.message}});
  }
  j["violations"] = list;
  return j;
}

/// Generator spec. Paths inside it (price files) resolve against base_dir.
///
///   {"id": "g1", "n": 50, "proc_times": [1,2,3], "lambda": "13/10",
///    "seed": 7 | "seeds": [1,2,...],
///    "costs": {"kind": "uniform", "lo": 1, "hi": 10}
///           | {"kind": "profile", "path": "prices.csv", "offset": 0, "wrap": true}
///           | {"kind": "explicit", "values": [...]},
///    "jobs": [...optional forced processing times...],
///    "diagram": "nosby" | {diagram object}}
inline std::vector<GenSpec> genspecs_from_json(const Json& j, const std::string& base_dir = ".") {
  using detail::member;
  GenSpec spec;
  spec.id = j.contains("id") ? detail::as_string(j["id"], "id") : "instance";
  if (j.contains("jobs")) {
    for (std::size_t k = 0; k < j["jobs"].size(); ++k) {
      spec.forced_jobs.push_back(detail::as_int(j["jobs"][k], "jobs[" + std::to_string(k) + "]"));
    }
    spec.n = static_cast<int>(spec.forced_jobs.size());
  } else {
    spec.n = detail::as_int(member(j, "n", ""), "n");
    spec.proc_time_set.clear();
    const Json& set = member(j, "proc_times", "");
    if (!set.is_array() || set.empty()) detail::bad_field("proc_times", "expected a non-empty array");
    for (std::size_t k = 0; k < set.size(); ++k) {
      spec.proc_time_set.push_back(detail::as_int(set[k], "proc_times[" + std::to_string(k) + "]"));
    }
  }
  if (j.contains("lambda")) spec.lambda = detail::as_rational(j["lambda"], "lambda");
  if (j.contains("diagram")) {
    const Json& d = j["diagram"];
    if (d.is_string()) {
      auto builtin = builtin_diagram(d.get<std::string>());
      if (!builtin) detail::bad_field("diagram", "unknown built-in diagram '" + d.get<std::string>() + "'");
      spec.diagram = *builtin;
    } else {
      spec.diagram = diagram_from_json(d, "diagram");
    }
  }
  if (j.contains("costs")) {
    const Json& c = j["costs"];
    const std::string kind = detail::as_string(member(c, "kind", "costs"), "costs.kind");
    if (kind == "uniform") {
      UniformCost u;
      if (c.contains("lo")) u.lo = detail::as_int(c["lo"], "costs.lo");
      if (c.contains("hi")) u.hi = detail::as_int(c["hi"], "costs.hi");
      spec.cost_source = u;
    } else if (kind == "profile") {
      ProfileCost p;
      std::string path = detail::as_string(member(c, "path", "costs"), "costs.path");
      if (!path.empty() && path.front() != '/') path = base_dir + "/" + path;
      p.prices = ingest_prices(path, c.value("index_column", "idx"), c.value("cost_column", "cost"));
      if (c.contains("offset")) p.offset = detail::as_int(c["offset"], "costs.offset");
      if (c.contains("wrap")) p.wrap = c["wrap"].get<bool>();
      spec.cost_source = std::move(p);
    } else if (kind == "explicit") {
      ExplicitCost e;
      const Json& v = member(c, "values", "costs");
      for (std::size_t k = 0; k < v.size(); ++k) {
        e.costs.push_back(detail::as_rational(v[k], "costs.values[" + std::to_string(k) + "]"));
      }
      spec.cost_source = std::move(e);
    } else {
      detail::bad_field("costs.kind", "expected uniform, profile or explicit");
    }
  }
  std::vector<GenSpec> out;
  if (j.contains("seeds")) {
    for (const auto& s : j["seeds"]) {
      GenSpec copy = spec;
      copy.seed = s.get<std::uint64_t>();
      copy.id = spec.id + "-s" + std::to_string(copy.seed);
      out.push_back(std::move(copy));
    }
  } else {
    if (j.contains("seed")) spec.seed = j["seed"].get<std::uint64_t>();
    out.push_back(std::move(spec));
  }
  return out;
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kParseError, "cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::kParseError, path + ": " + e.what());
  }
}

}  // namespace tousched
