// Copyright 2025-2026 The reuseq developers
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

// Calibration-aware qubit assignment: re-place an already-mapped circuit on
// the set of physical qubits minimizing a fidelity-product cost, and choose
// the reset repetition count per qubit that maximizes the adapted reset
// fidelity. Missing calibration entries are hard errors, never defaults.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "reuseq/circuit.hpp"
#include "reuseq/mapper.hpp"
#include "reuseq/topology.hpp"

namespace reuseq {

struct PlacementError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Per-device calibration tables. Gate fidelities are keyed by gate kind and
// location (a qubit, or a directed pair for two-qubit gates; lookups try
// both orientations). Reset tables cover repetitions r = 1..r_max per qubit.
struct CalibrationSet {
  // "h:3" or "cx:(1,4)" -> fidelity
  std::map<std::string, double> gate_fidelity;
  std::map<int, double> measure_fidelity;
  std::map<int, std::vector<double>> reset_error;     // p -> [R(1,p)..R(r_max,p)]
  std::map<int, std::vector<double>> reset_duration;  // p -> [eps(1,p)..]
  double decoherence_time = 1.0;
  int r_max = 1;

  void validate() const {
    auto check01 = [](double v, const std::string& what) {
      if (!(v >= 0.0 && v <= 1.0))
        throw PlacementError(what + " outside [0,1]");
    };
    for (const auto& [k, v] : gate_fidelity) check01(v, "gate fidelity " + k);
    for (const auto& [p, v] : measure_fidelity)
      check01(v, "measure fidelity of qubit " + std::to_string(p));
    if (decoherence_time <= 0)
      throw PlacementError("decoherence time must be positive");
    if (r_max < 1) throw PlacementError("r_max must be at least 1");
    for (const auto& [p, row] : reset_error) {
      if (static_cast<int>(row.size()) < r_max)
        throw PlacementError("reset_error row for qubit " + std::to_string(p) +
                             " shorter than r_max");
      for (double v : row) check01(v, "reset error");
    }
    for (const auto& [p, row] : reset_duration) {
      if (static_cast<int>(row.size()) < r_max)
        throw PlacementError("reset_duration row for qubit " +
                             std::to_string(p) + " shorter than r_max");
      for (double v : row)
        if (v < 0) throw PlacementError("negative reset duration");
    }
  }
};

inline std::string gate_key(OpKind kind, int p0, int p1 = -1) {
  std::ostringstream os;
  os << op_name(kind) << ':';
  if (p1 >= 0)
    os << '(' << p0 << ',' << p1 << ')';
  else
    os << p0;
  return os.str();
}

namespace detail {

inline double lookup_gate_fidelity(const CalibrationSet& cal, OpKind kind,
                                   int p0, int p1) {
  auto try_key = [&](const std::string& k) -> std::optional<double> {
    auto it = cal.gate_fidelity.find(k);
    if (it == cal.gate_fidelity.end()) return std::nullopt;
    return it->second;
  };
  if (p1 >= 0) {
    if (auto f = try_key(gate_key(kind, p0, p1))) return *f;
    if (auto f = try_key(gate_key(kind, p1, p0))) return *f;
  } else if (auto f = try_key(gate_key(kind, p0))) {
    return *f;
  }
  throw PlacementError("missing calibration entry for " +
                       gate_key(kind, p0, p1));
}

inline double lookup_cx_fidelity(const CalibrationSet& cal, int a, int b) {
  return lookup_gate_fidelity(cal, OpKind::CX, a, b);
}

}  // namespace detail

// Adapted reset fidelity xi(r,p) = exp(-eps(r,p)/T) * (1 - R(r,p)).
inline double reset_fidelity(const CalibrationSet& cal, int r, int p) {
  if (r < 1 || r > cal.r_max)
    throw PlacementError("reset repetitions out of range");
  auto eit = cal.reset_error.find(p);
  auto dit = cal.reset_duration.find(p);
  if (eit == cal.reset_error.end() || dit == cal.reset_duration.end())
    throw PlacementError("missing reset table for qubit " + std::to_string(p));
  double err = eit->second[r - 1];
  double dur = dit->second[r - 1];
  return std::exp(-dur / cal.decoherence_time) * (1.0 - err);
}

// argmax over r in 1..r_max of xi(r,p); ties toward smaller r.
inline int optimal_repetitions(const CalibrationSet& cal, int p) {
  int best_r = 1;
  double best = reset_fidelity(cal, 1, p);
  for (int r = 2; r <= cal.r_max; ++r) {
    double f = reset_fidelity(cal, r, p);
    if (f > best) {
      best = f;
      best_r = r;
    }
  }
  return best_r;
}

namespace detail {

// Fidelity product over every op of the mapped circuit, with physical
// locations remapped through `relabel` (identity when empty). SWAPs without
// a native entry cost three CX applications on the edge; measurements use
// the measurement table; resets use xi(R_p, p).
inline double fidelity_product(const MappedCircuit& mc,
                               const CalibrationSet& cal,
                               const std::map<int, int>& reps,
                               const std::map<int, int>& relabel) {
  auto loc = [&](int p) {
    if (relabel.empty()) return p;
    auto it = relabel.find(p);
    if (it == relabel.end())
      throw PlacementError("embedding does not cover physical qubit " +
                           std::to_string(p));
    return it->second;
  };
  double prod = 1.0;
  for (const auto& step : mc.steps)
    for (const PhysOp& po : step) {
      switch (po.kind) {
        case OpKind::Barrier:
          break;
        case OpKind::Measure: {
          int p = loc(po.p0);
          auto it = cal.measure_fidelity.find(p);
          if (it == cal.measure_fidelity.end())
            throw PlacementError("missing measurement fidelity for qubit " +
                                 std::to_string(p));
          prod *= it->second;
          break;
        }
        case OpKind::Reset: {
          int p = loc(po.p0);
          auto rit = reps.find(p);
          int r = rit == reps.end() ? 1 : rit->second;
          prod *= reset_fidelity(cal, r, p);
          break;
        }
        case OpKind::Swap: {
          int a = loc(po.p0), b = loc(po.p1);
          auto it = cal.gate_fidelity.find(gate_key(OpKind::Swap, a, b));
          if (it == cal.gate_fidelity.end())
            it = cal.gate_fidelity.find(gate_key(OpKind::Swap, b, a));
          if (it != cal.gate_fidelity.end()) {
            prod *= it->second;
          } else {
            double cx = lookup_cx_fidelity(cal, a, b);
            prod *= cx * cx * cx;
          }
          break;
        }
        default: {
          int a = loc(po.p0);
          int b = po.p1 >= 0 ? loc(po.p1) : -1;
          prod *= lookup_gate_fidelity(cal, po.kind, a, b);
          break;
        }
      }
    }
  return prod;
}

// Interaction pattern of a mapped circuit over its used physical qubits:
// one pattern node per used qubit, one edge per adjacency actually exercised
// by a two-qubit op (gates and swaps alike).
struct MappedPattern {
  PatternGraph pattern;
  std::vector<int> node_to_phys;  // pattern node -> original physical qubit
};

inline MappedPattern mapped_pattern(const MappedCircuit& mc) {
  MappedPattern mp;
  std::vector<int> used = mc.used_phys();
  std::map<int, int> node_of;
  for (int p : used) {
    node_of[p] = static_cast<int>(mp.node_to_phys.size());
    mp.node_to_phys.push_back(p);
  }
  mp.pattern.num_nodes = static_cast<int>(mp.node_to_phys.size());
  std::set<std::pair<int, int>> edges;
  for (const auto& step : mc.steps)
    for (const PhysOp& po : step)
      if (po.p1 >= 0 && po.kind != OpKind::Barrier) {
        int a = node_of.at(po.p0), b = node_of.at(po.p1);
        edges.insert({std::min(a, b), std::max(a, b)});
      }
  mp.pattern.edges.assign(edges.begin(), edges.end());
  return mp;
}

}  // namespace detail

// Eq.-9 style cost of running `mc` relabeled through `emb` (pattern node i of
// mapped_pattern(mc) lands on emb[i]): K = 1 - fidelity product over gates,
// swaps, measurements and resets (resets at reps[p] repetitions).
inline double placement_cost(const MappedCircuit& mc, const Embedding& emb,
                             const CalibrationSet& cal,
                             const std::map<int, int>& reps) {
  detail::MappedPattern mp = detail::mapped_pattern(mc);
  if (emb.size() != mp.node_to_phys.size())
    throw PlacementError("embedding size does not match used qubit count");
  std::map<int, int> relabel;
  for (std::size_t i = 0; i < emb.size(); ++i)
    relabel[mp.node_to_phys[i]] = emb[i];
  return 1.0 - detail::fidelity_product(mc, cal, reps, relabel);
}

// Estimated success probability of a circuit already sitting on its final
// physical qubits: the plain fidelity product (= 1 - placement cost over the
// identity embedding).
inline double esp(const MappedCircuit& mc, const CalibrationSet& cal,
                  const std::map<int, int>& reps) {
  return detail::fidelity_product(mc, cal, reps, {});
}

struct PlacementResult {
  bool feasible = false;
  Embedding embedding;              // pattern node -> physical qubit
  std::vector<int> original_phys;   // pattern node -> qubit before placement
  double cost = 1.0;                // K of the chosen embedding
  std::map<int, int> reset_repetitions;  // final physical qubit -> R_p
  double esp_value = 0.0;
  MappedCircuit output;             // mc rewritten onto the chosen set
  int num_candidates = 0;           // embeddings enumerated
  std::string message;
};

// Algorithm: enumerate the embeddings of the circuit's interaction pattern
// into the host, evaluate the cost of each under per-qubit optimal reset
// repetitions, keep the first minimum in enumeration order, and rewrite the
// circuit onto it with each reset repeated R_p times.
inline PlacementResult place(const MappedCircuit& mc, const CouplingGraph& g,
                             const CalibrationSet& cal) {
  cal.validate();
  PlacementResult res;
  detail::MappedPattern mp = detail::mapped_pattern(mc);
  res.original_phys = mp.node_to_phys;

  std::vector<Embedding> candidates = enumerate_embeddings(mp.pattern, g);
  res.num_candidates = static_cast<int>(candidates.size());
  if (candidates.empty()) {
    res.message = "interaction pattern does not embed into the host";
    return res;
  }

  // R_p is a property of the physical qubit alone, so it is precomputed for
  // every qubit that appears in any candidate.
  std::map<int, int> reps_of;
  for (const Embedding& emb : candidates)
    for (int p : emb)
      if (!reps_of.count(p)) reps_of[p] = optimal_repetitions(cal, p);

  bool first = true;
  for (const Embedding& emb : candidates) {
    double k = placement_cost(mc, emb, cal, reps_of);
    if (first || k < res.cost) {
      first = false;
      res.cost = k;
      res.embedding = emb;
    }
  }
  res.feasible = true;

  // rewrite the circuit onto the chosen qubits, repeating each reset
  std::map<int, int> relabel;
  for (std::size_t i = 0; i < res.embedding.size(); ++i)
    relabel[mp.node_to_phys[i]] = res.embedding[i];
  MappedCircuit out = mc;
  for (auto& step : out.steps)
    for (PhysOp& po : step) {
      po.p0 = relabel.at(po.p0);
      if (po.p1 >= 0) po.p1 = relabel.at(po.p1);
    }
  for (auto& [q, p] : out.initial_assignment) p = relabel.at(p);
  for (auto& ev : out.reuse_events) ev.freed_phys = relabel.at(ev.freed_phys);
  for (auto& step : out.steps) {
    std::vector<PhysOp> expanded;
    for (const PhysOp& po : step) {
      expanded.push_back(po);
      if (po.kind == OpKind::Reset) {
        int extra = reps_of.at(po.p0) - 1;
        for (int i = 0; i < extra; ++i) expanded.push_back(po);
      }
    }
    step = std::move(expanded);
  }
  res.output = std::move(out);
  for (int p : res.embedding) res.reset_repetitions[p] = reps_of.at(p);
  res.esp_value = 1.0 - res.cost;
  return res;
}

// ---------------------------------------------------------------------------
// JSON round-trips

inline nlohmann::json calibration_to_json(const CalibrationSet& cal) {
  nlohmann::json j;
  j["gate_fidelity"] = cal.gate_fidelity;
  nlohmann::json mf = nlohmann::json::object();
  for (const auto& [p, v] : cal.measure_fidelity) mf[std::to_string(p)] = v;
  j["measure_fidelity"] = mf;
  nlohmann::json re = nlohmann::json::object(), rd = nlohmann::json::object();
  for (const auto& [p, row] : cal.reset_error) re[std::to_string(p)] = row;
  for (const auto& [p, row] : cal.reset_duration) rd[std::to_string(p)] = row;
  j["reset_error"] = re;
  j["reset_duration"] = rd;
  j["decoherence_time"] = cal.decoherence_time;
  j["r_max"] = cal.r_max;
  return j;
}

inline CalibrationSet calibration_from_json(const nlohmann::json& j) {
  CalibrationSet cal;
  if (j.contains("gate_fidelity"))
    cal.gate_fidelity =
        j.at("gate_fidelity").get<std::map<std::string, double>>();
  if (j.contains("measure_fidelity"))
    for (const auto& [k, v] : j.at("measure_fidelity").items())
      cal.measure_fidelity[std::stoi(k)] = v.get<double>();
  if (j.contains("reset_error"))
    for (const auto& [k, v] : j.at("reset_error").items())
      cal.reset_error[std::stoi(k)] = v.get<std::vector<double>>();
  if (j.contains("reset_duration"))
    for (const auto& [k, v] : j.at("reset_duration").items())
      cal.reset_duration[std::stoi(k)] = v.get<std::vector<double>>();
  cal.decoherence_time = j.value("decoherence_time", 1.0);
  cal.r_max = j.value("r_max", 1);
  cal.validate();
  return cal;
}

inline nlohmann::json placement_to_json(const PlacementResult& res) {
  nlohmann::json j;
  j["feasible"] = res.feasible;
  j["embedding"] = res.embedding;
  j["original_phys"] = res.original_phys;
  j["cost"] = res.cost;
  j["esp"] = res.esp_value;
  j["num_candidates"] = res.num_candidates;
  nlohmann::json reps = nlohmann::json::object();
  for (const auto& [p, r] : res.reset_repetitions) reps[std::to_string(p)] = r;
  j["reset_repetitions"] = reps;
  if (res.feasible) j["output"] = mapped_to_json(res.output);
  if (!res.message.empty()) j["message"] = res.message;
  return j;
}

}  // namespace reuseq
