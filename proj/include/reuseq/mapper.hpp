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

// Joint swap-insertion + reset-reuse optimization. A propositional model
// schedules every gate onto a time step and a physical location, inserts
// swaps, and may detach a logical qubit after its final measurement so that
// the freed physical qubit can be acquired by a logical qubit that has not
// started yet. Objectives (depth, swap count, qubit count) are minimized by
// linear descent on assumption-guarded cardinality bounds; optimality is
// certified by the UNSAT result at value-1.

#include <algorithm>
#include <chrono>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "reuseq/circuit.hpp"
#include "reuseq/router.hpp"
#include "reuseq/sat.hpp"
#include "reuseq/simulator.hpp"
#include "reuseq/topology.hpp"

namespace reuseq {

struct MapperError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Resets (the number of inserted reset operations, i.e. the reuse count) is
// mainly useful as a lexicographic secondary: minimizing it subject to the
// optimal swap count yields the least reuse that still achieves it.
enum class Objective { Depth, Swaps, Qubits, Resets };

inline const char* objective_name(Objective o) {
  switch (o) {
    case Objective::Depth: return "depth";
    case Objective::Swaps: return "swaps";
    case Objective::Qubits: return "qubits";
    case Objective::Resets: return "resets";
  }
  return "?";
}

struct ReuseMode {
  enum Kind { Off, On, Exactly, AtMostQubits } kind = Off;
  int k = 0;

  static ReuseMode off() { return {Off, 0}; }
  static ReuseMode on() { return {On, 0}; }
  static ReuseMode exactly(int k) { return {Exactly, k}; }
  static ReuseMode at_most_qubits(int k) { return {AtMostQubits, k}; }
};

// ---------------------------------------------------------------------------
// MappedCircuit

struct PhysOp {
  OpKind kind;
  int p0 = -1;
  int p1 = -1;
  double angle = 0;
  int cbit = -1;
  int src = -1;  // index of the originating op; -1 for inserted swaps
};

struct ReuseEvent {
  int measurement_src = -1;   // original op index of the measurement
  int freed_phys = -1;
  int acquired_logical = -1;  // -1 when no qubit picked the slot up
  int step = 0;               // step of the measurement/reset
};

struct MappedCircuit {
  std::string name;
  int num_phys = 0;
  int num_logical = 0;
  int num_clbits = 0;
  std::vector<std::vector<PhysOp>> steps;  // steps[t-1] = ops at step t
  std::map<int, int> initial_assignment;   // logical -> physical (partial)
  std::vector<ReuseEvent> reuse_events;
  int depth = 0;
  int swap_count = 0;
  int used_qubits = 0;

  std::vector<int> used_phys() const {
    std::set<int> s;
    for (const auto& [q, p] : initial_assignment) s.insert(p);
    for (const auto& step : steps)
      for (const PhysOp& op : step) {
        s.insert(op.p0);
        if (op.p1 >= 0) s.insert(op.p1);
      }
    return {s.begin(), s.end()};
  }
};

// Physical circuit from the schedule. With compact=true qubits are
// relabeled to 0..used-1 (ascending physical index) so the result stays
// inside the simulator cap.
inline Circuit lower_to_circuit(const MappedCircuit& mc, bool compact = true) {
  std::vector<int> used = mc.used_phys();
  std::vector<int> relabel(mc.num_phys, -1);
  int n;
  if (compact) {
    n = static_cast<int>(used.size());
    for (int i = 0; i < n; ++i) relabel[used[i]] = i;
  } else {
    n = mc.num_phys;
    for (int i = 0; i < n; ++i) relabel[i] = i;
  }
  Circuit c;
  c.num_qubits = std::max(n, 1);
  c.num_clbits = mc.num_clbits;
  c.name = mc.name;
  for (const auto& step : mc.steps) {
    for (const PhysOp& op : step) {
      if (op.kind == OpKind::Reset) continue;  // resets after their measure
      Op o{op.kind, relabel[op.p0],
           op.p1 >= 0 ? relabel[op.p1] : -1, op.angle, op.cbit};
      c.ops.push_back(o);
    }
    for (const PhysOp& op : step)
      if (op.kind == OpKind::Reset)
        c.ops.push_back(Op{OpKind::Reset, relabel[op.p0]});
  }
  c.validate();
  return c;
}

// ---------------------------------------------------------------------------
// Validity checking

struct ValidityReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

inline ValidityReport check_valid(const MappedCircuit& mc,
                                  const CouplingGraph& g,
                                  const Circuit& original) {
  ValidityReport rep;
  auto fail = [&](const std::string& msg) { rep.violations.push_back(msg); };

  if (mc.num_phys != g.num_qubits)
    fail("physical qubit count does not match the coupling graph");

  // occupancy and connectivity per step
  for (std::size_t t = 0; t < mc.steps.size(); ++t) {
    std::map<int, const PhysOp*> busy;
    for (const PhysOp& op : mc.steps[t]) {
      for (int p : {op.p0, op.p1}) {
        if (p < 0) continue;
        auto it = busy.find(p);
        if (it != busy.end()) {
          bool measure_reset_pair =
              (op.kind == OpKind::Reset &&
               it->second->kind == OpKind::Measure) ||
              (op.kind == OpKind::Measure &&
               it->second->kind == OpKind::Reset);
          if (!measure_reset_pair)
            fail("step " + std::to_string(t + 1) + ": physical qubit " +
                 std::to_string(p) + " used twice");
        }
        busy[p] = &op;
      }
      if (is_two_qubit(op.kind) && !g.has_edge(op.p0, op.p1))
        fail("step " + std::to_string(t + 1) + ": " + op_name(op.kind) +
             " on non-edge (" + std::to_string(op.p0) + "," +
             std::to_string(op.p1) + ")");
    }
  }

  // reset directly follows a measurement on the same physical qubit
  {
    std::vector<std::vector<std::pair<int, OpKind>>> per_phys(mc.num_phys);
    for (std::size_t t = 0; t < mc.steps.size(); ++t)
      for (const PhysOp& op : mc.steps[t]) {
        per_phys[op.p0].emplace_back(static_cast<int>(t), op.kind);
        if (op.p1 >= 0) per_phys[op.p1].emplace_back(static_cast<int>(t),
                                                     op.kind);
      }
    for (int p = 0; p < mc.num_phys; ++p) {
      auto& v = per_phys[p];
      // measure before reset within the same step
      std::stable_sort(v.begin(), v.end(),
                       [](const auto& a, const auto& b) {
                         if (a.first != b.first) return a.first < b.first;
                         return (a.second == OpKind::Measure) &&
                                (b.second == OpKind::Reset);
                       });
      for (std::size_t i = 0; i < v.size(); ++i)
        if (v[i].second == OpKind::Reset &&
            (i == 0 || v[i - 1].second != OpKind::Measure))
          fail("reset on physical qubit " + std::to_string(p) +
               " not preceded by a measurement");
    }
  }

  // every original non-barrier op appears exactly once, in DAG order
  {
    int expected = 0;
    for (const Op& op : original.ops)
      if (op.kind != OpKind::Barrier) ++expected;
    std::map<int, int> step_of;  // src -> step
    for (std::size_t t = 0; t < mc.steps.size(); ++t)
      for (const PhysOp& op : mc.steps[t]) {
        if (op.kind == OpKind::Swap && op.src < 0) continue;
        if (op.kind == OpKind::Reset) continue;  // inserted
        if (op.src < 0 ||
            op.src >= static_cast<int>(original.ops.size())) {
          fail("scheduled op without a valid source index");
          continue;
        }
        if (!step_of.emplace(op.src, static_cast<int>(t)).second)
          fail("original op " + std::to_string(op.src) +
               " scheduled more than once");
      }
    if (static_cast<int>(step_of.size()) != expected)
      fail("not all original ops are scheduled");
    DependencyDag dag = build_dag(original);
    for (auto [i, j] : dag.edges) {
      if (original.ops[i].kind == OpKind::Barrier ||
          original.ops[j].kind == OpKind::Barrier)
        continue;
      auto it = step_of.find(i);
      auto jt = step_of.find(j);
      if (it != step_of.end() && jt != step_of.end() &&
          it->second >= jt->second)
        fail("precedence violated: op " + std::to_string(i) +
             " not before op " + std::to_string(j));
    }
  }

  // logical trace: gates act where their logical operands currently live
  {
    std::vector<int> phys_of(original.num_qubits, -1);
    std::vector<int> logical_at(mc.num_phys, -1);
    for (const auto& [q, p] : mc.initial_assignment) {
      if (q < 0 || q >= original.num_qubits || p < 0 || p >= mc.num_phys) {
        fail("initial assignment out of range");
        continue;
      }
      phys_of[q] = p;
      logical_at[p] = q;
    }
    for (std::size_t t = 0; t < mc.steps.size(); ++t) {
      for (const PhysOp& op : mc.steps[t]) {
        if (op.kind == OpKind::Swap && op.src < 0) continue;
        if (op.kind == OpKind::Reset) continue;
        if (op.src < 0 || op.src >= static_cast<int>(original.ops.size()))
          continue;
        const Op& orig = original.ops[op.src];
        if (phys_of[orig.q0] != op.p0)
          fail("step " + std::to_string(t + 1) + ": logical qubit " +
               std::to_string(orig.q0) + " is not at physical qubit " +
               std::to_string(op.p0));
        if (orig.q1 >= 0 && phys_of[orig.q1] != op.p1)
          fail("step " + std::to_string(t + 1) + ": logical qubit " +
               std::to_string(orig.q1) + " is not at physical qubit " +
               std::to_string(op.p1));
      }
      // swaps and frees take effect at the next step
      for (const PhysOp& op : mc.steps[t]) {
        if (op.kind == OpKind::Swap && op.src < 0) {
          int la = logical_at[op.p0], lb = logical_at[op.p1];
          if (la < 0 || lb < 0)
            fail("step " + std::to_string(t + 1) +
                 ": swap touches an unoccupied physical qubit");
          logical_at[op.p0] = lb;
          logical_at[op.p1] = la;
          if (lb >= 0) phys_of[lb] = op.p0;
          if (la >= 0) phys_of[la] = op.p1;
        }
      }
      for (const ReuseEvent& ev : mc.reuse_events) {
        if (ev.step != static_cast<int>(t) + 1) continue;
        int freed = logical_at[ev.freed_phys];
        if (freed >= 0) {
          phys_of[freed] = -1;
          logical_at[ev.freed_phys] = -1;
        }
        if (ev.acquired_logical >= 0) {
          if (phys_of[ev.acquired_logical] != -1)
            fail("reuse event: qubit " +
                 std::to_string(ev.acquired_logical) + " already assigned");
          phys_of[ev.acquired_logical] = ev.freed_phys;
          logical_at[ev.freed_phys] = ev.acquired_logical;
        }
      }
    }
  }

  return rep;
}

// ---------------------------------------------------------------------------
// JSON round-trip

inline nlohmann::json mapped_to_json(const MappedCircuit& mc) {
  using nlohmann::json;
  json j;
  j["name"] = mc.name;
  j["num_phys"] = mc.num_phys;
  j["num_logical"] = mc.num_logical;
  j["num_clbits"] = mc.num_clbits;
  j["depth"] = mc.depth;
  j["swap_count"] = mc.swap_count;
  j["used_qubits"] = mc.used_qubits;
  json ia = json::object();
  for (const auto& [q, p] : mc.initial_assignment)
    ia[std::to_string(q)] = p;
  j["initial_assignment"] = ia;
  json steps = json::array();
  for (const auto& step : mc.steps) {
    json s = json::array();
    for (const PhysOp& op : step) {
      json o;
      o["op"] = op_name(op.kind);
      json phys = json::array();
      phys.push_back(op.p0);
      if (op.p1 >= 0) phys.push_back(op.p1);
      o["phys"] = phys;
      if (op.kind == OpKind::RZ) o["angle"] = op.angle;
      if (op.cbit >= 0) o["cbit"] = op.cbit;
      if (op.src >= 0) o["src"] = op.src;
      s.push_back(o);
    }
    steps.push_back(s);
  }
  j["steps"] = steps;
  json evs = json::array();
  for (const ReuseEvent& ev : mc.reuse_events) {
    json e;
    e["measurement"] = ev.measurement_src;
    e["freed_phys"] = ev.freed_phys;
    if (ev.acquired_logical >= 0)
      e["acquired_by"] = ev.acquired_logical;
    else
      e["acquired_by"] = nullptr;
    e["step"] = ev.step;
    evs.push_back(e);
  }
  j["reuse_events"] = evs;
  return j;
}

inline MappedCircuit mapped_from_json(const nlohmann::json& j) {
  MappedCircuit mc;
  mc.name = j.value("name", "");
  mc.num_phys = j.at("num_phys").get<int>();
  mc.num_logical = j.at("num_logical").get<int>();
  mc.num_clbits = j.at("num_clbits").get<int>();
  mc.depth = j.at("depth").get<int>();
  mc.swap_count = j.at("swap_count").get<int>();
  mc.used_qubits = j.at("used_qubits").get<int>();
  for (const auto& [k, v] : j.at("initial_assignment").items())
    mc.initial_assignment[std::stoi(k)] = v.get<int>();
  for (const auto& s : j.at("steps")) {
    std::vector<PhysOp> step;
    for (const auto& o : s) {
      PhysOp op;
      auto kind = op_from_name(o.at("op").get<std::string>());
      if (!kind) throw MapperError("unknown op in mapped circuit JSON");
      op.kind = *kind;
      op.p0 = o.at("phys").at(0).get<int>();
      if (o.at("phys").size() > 1) op.p1 = o.at("phys").at(1).get<int>();
      op.angle = o.value("angle", 0.0);
      op.cbit = o.value("cbit", -1);
      op.src = o.value("src", -1);
      step.push_back(op);
    }
    mc.steps.push_back(std::move(step));
  }
  for (const auto& e : j.at("reuse_events")) {
    ReuseEvent ev;
    ev.measurement_src = e.at("measurement").get<int>();
    ev.freed_phys = e.at("freed_phys").get<int>();
    ev.acquired_logical =
        e.at("acquired_by").is_null() ? -1 : e.at("acquired_by").get<int>();
    ev.step = e.at("step").get<int>();
    mc.reuse_events.push_back(ev);
  }
  return mc;
}

// ---------------------------------------------------------------------------
// Semantic equivalence via the simulator

struct EquivalenceResult {
  bool equivalent = false;
  double fidelity = 0;
};

inline EquivalenceResult equivalent(const Circuit& original,
                                    const MappedCircuit& mapped) {
  Circuit lowered = lower_to_circuit(mapped, true);
  if (lowered.num_clbits != original.num_clbits)
    throw MapperError("classical bit count mismatch");
  OutcomeDistribution a = exact_distribution(original);
  OutcomeDistribution b = exact_distribution(lowered);
  EquivalenceResult r;
  r.fidelity = hellinger_fidelity(a, b);
  r.equivalent = r.fidelity >= 1.0 - 1e-9;
  return r;
}

// ---------------------------------------------------------------------------
// The constraint model

class ReuseModel {
 public:
  ReuseModel(const Circuit& c, const CouplingGraph& g, int T,
             bool reuse_enabled)
      : circuit_(&c), graph_(&g), T_(T), reuse_(reuse_enabled) {
    if (T < 1) throw MapperError("horizon must be at least 1");
    if (!reuse_enabled && c.num_qubits > g.num_qubits)
      throw MapperError(
          "more logical than physical qubits requires reuse to be enabled");
    build();
  }

  sat::Solver& solver() { return solver_; }
  bool trivially_unsat() const { return trivially_unsat_; }
  int horizon() const { return T_; }
  int num_eligible_resets() const {
    return static_cast<int>(eligible_meas_.size());
  }

  // Critical-path lower bound on the schedule depth.
  int min_depth() const {
    int m = 1;
    for (int e : est_) m = std::max(m, e);
    return m;
  }

  // Assumption enforcing "exactly k resets" (needs reuse enabled).
  std::vector<sat::Lit> exactly_k_resets(int k) {
    ensure_reset_counter();
    std::vector<sat::Lit> as;
    int n = static_cast<int>(reset_lits_.size());
    if (k > n) throw MapperError("k exceeds the number of reset locations");
    if (k >= 1) as.push_back(reset_counter_.geq(k));
    if (k < n) as.push_back(reset_counter_.leq(k));
    return as;
  }

  std::vector<sat::Lit> at_most_qubits(int k) {
    ensure_used_counter(k + 1);
    if (k >= graph_->num_qubits) return {};
    return {used_counter_.leq(k)};
  }

  // Swap-count bound <= k as an assumption. The counter is (re)built wide
  // enough for the requested bound; a bound at or above the input size is
  // trivially true.
  sat::Lit swaps_leq(int k) {
    if (k >= static_cast<int>(sigma_.size())) return solver_.true_lit();
    ensure_swap_counter(k + 1);
    return swap_counter_.leq(k);
  }

  sat::Lit resets_leq(int k) {
    if (k >= static_cast<int>(reset_lits_.size())) return solver_.true_lit();
    ensure_reset_counter();
    return reset_counter_.leq(k);
  }

  sat::Lit qubits_leq(int k) {
    ensure_used_counter(k + 1);
    if (k >= static_cast<int>(used_counter_.at_least.size()))
      return solver_.true_lit();
    return used_counter_.leq(k);
  }

  // Depth bound <= k: every gate done by k, no swap after k.
  std::vector<sat::Lit> depth_leq(int k) {
    std::vector<sat::Lit> as;
    for (std::size_t gi = 0; gi < gates_.size(); ++gi) {
      sat::Lit l = sle(static_cast<int>(gi), k);
      if (l == solver_.true_lit()) continue;
      as.push_back(l);  // may be the false literal when k < est
    }
    for (int t = k + 1; t <= T_ - 1; ++t)
      for (std::size_t e = 0; e < edges_.size(); ++e)
        as.push_back(~sigma(static_cast<int>(e), t));
    return as;
  }

  // --- model readout (after a Sat result) ---

  int model_depth() const {
    int depth = 0;
    for (std::size_t gi = 0; gi < gates_.size(); ++gi)
      depth = std::max(depth, gate_time(static_cast<int>(gi)));
    for (int t = 1; t <= T_ - 1; ++t)
      for (std::size_t e = 0; e < edges_.size(); ++e)
        if (lit_true(sigma(static_cast<int>(e), t))) depth = std::max(depth, t);
    return depth;
  }

  int model_swaps() const {
    int n = 0;
    for (int t = 1; t <= T_ - 1; ++t)
      for (std::size_t e = 0; e < edges_.size(); ++e)
        if (lit_true(sigma(static_cast<int>(e), t))) ++n;
    return n;
  }

  int model_qubits() const {
    std::set<int> used;
    for (int q = 0; q < num_q_; ++q)
      for (int t = 1; t <= T_; ++t)
        for (int p = 0; p < num_p_; ++p)
          if (lit_true(pi(q, p, t))) used.insert(p);
    return static_cast<int>(used.size());
  }

  int model_resets() const {
    int n = 0;
    for (const Lit& l : reset_lits_)
      if (lit_true(l)) ++n;
    return n;
  }

  int objective_value(Objective obj) const {
    switch (obj) {
      case Objective::Depth: return model_depth();
      case Objective::Swaps: return model_swaps();
      case Objective::Qubits: return model_qubits();
      case Objective::Resets: return model_resets();
    }
    return 0;
  }

  MappedCircuit extract() const {
    const Circuit& c = *circuit_;
    MappedCircuit mc;
    mc.name = c.name;
    mc.num_phys = num_p_;
    mc.num_logical = num_q_;
    mc.num_clbits = c.num_clbits;
    mc.steps.assign(T_, {});

    for (std::size_t gi = 0; gi < gates_.size(); ++gi) {
      int t = gate_time(static_cast<int>(gi));
      const Op& op = c.ops[gates_[gi]];
      PhysOp po;
      po.kind = op.kind;
      po.angle = op.angle;
      po.cbit = op.cbit;
      po.src = gates_[gi];
      po.p0 = qubit_position(op.q0, t);
      if (op.q1 >= 0) po.p1 = qubit_position(op.q1, t);
      if (po.p0 < 0 || (op.q1 >= 0 && po.p1 < 0))
        throw MapperError("extraction: scheduled gate on unassigned qubit");
      mc.steps[t - 1].push_back(po);
    }
    for (int t = 1; t <= T_ - 1; ++t)
      for (std::size_t e = 0; e < edges_.size(); ++e)
        if (lit_true(sigma(static_cast<int>(e), t))) {
          PhysOp po;
          po.kind = OpKind::Swap;
          po.p0 = edges_[e].first;
          po.p1 = edges_[e].second;
          mc.steps[t - 1].push_back(po);
        }
    // resets and reuse events
    for (std::size_t mi = 0; mi < eligible_meas_.size(); ++mi) {
      if (!lit_true(reset_lits_[mi])) continue;
      int gi = meas_gate_index_[mi];
      int t = gate_time(gi);
      const Op& op = c.ops[gates_[gi]];
      int p = qubit_position(op.q0, t);
      PhysOp po;
      po.kind = OpKind::Reset;
      po.p0 = p;
      po.src = gates_[gi];
      mc.steps[t - 1].push_back(po);
      ReuseEvent ev;
      ev.measurement_src = gates_[gi];
      ev.freed_phys = p;
      ev.step = t;
      if (t + 1 <= T_) {
        for (int q = 0; q < num_q_; ++q)
          if (!lit_true(a(q, t)) && lit_true(a(q, t + 1)) &&
              lit_true(pi(q, p, t + 1))) {
            ev.acquired_logical = q;
            break;
          }
      }
      mc.reuse_events.push_back(ev);
    }
    for (int q = 0; q < num_q_; ++q) {
      int p = qubit_position(q, 1);
      if (p >= 0) mc.initial_assignment[q] = p;
    }
    mc.swap_count = model_swaps();
    mc.used_qubits = model_qubits();
    mc.depth = model_depth();
    mc.steps.resize(std::max(mc.depth, 1));
    return mc;
  }

 private:
  using Lit = sat::Lit;

  bool lit_true(Lit l) const {
    return const_cast<sat::Solver&>(solver_).model_value(l);
  }

  int gate_time(int gi) const {
    for (int t = est_[gi]; t <= lst_[gi]; ++t)
      if (lit_true(d(gi, t))) return t;
    throw MapperError("extraction: gate has no time step");
  }

  int qubit_position(int q, int t) const {
    for (int p = 0; p < num_p_; ++p)
      if (lit_true(pi(q, p, t))) return p;
    return -1;
  }

  // --- variable accessors ---
  Lit d(int gi, int t) const {
    if (t < est_[gi] || t > lst_[gi]) return false_lit_;
    return d_[d_base_[gi] + (t - est_[gi])];
  }
  Lit sle(int gi, int t) const {
    if (t < est_[gi]) return false_lit_;
    if (t >= lst_[gi]) return true_lit_;
    return sle_[sle_base_[gi] + (t - est_[gi])];
  }
  Lit pi(int q, int p, int t) const {
    return pi_[(static_cast<std::size_t>(q) * num_p_ + p) * T_ + (t - 1)];
  }
  Lit a(int q, int t) const {
    if (!reuse_) return true_lit_;
    return a_[static_cast<std::size_t>(q) * T_ + (t - 1)];
  }
  Lit sigma(int e, int t) const {
    return sigma_[static_cast<std::size_t>(e) * (T_ - 1) + (t - 1)];
  }

  void build() {
    const Circuit& c = *circuit_;
    const CouplingGraph& g = *graph_;
    num_q_ = c.num_qubits;
    num_p_ = g.num_qubits;
    edges_ = g.edges;
    true_lit_ = solver_.true_lit();
    false_lit_ = ~true_lit_;

    // schedulable gates (barriers contribute only precedence)
    std::vector<int> sched_index(c.ops.size(), -1);
    for (std::size_t i = 0; i < c.ops.size(); ++i)
      if (c.ops[i].kind != OpKind::Barrier) {
        sched_index[i] = static_cast<int>(gates_.size());
        gates_.push_back(static_cast<int>(i));
      }
    int n_gates = static_cast<int>(gates_.size());

    // precedence among schedulable gates, closed through barriers
    DependencyDag dag = build_dag(c);
    std::vector<std::vector<int>> preds(c.ops.size());
    for (auto [x, y] : dag.edges) preds[y].push_back(x);
    std::set<std::pair<int, int>> prec;
    for (std::size_t j = 0; j < c.ops.size(); ++j) {
      if (c.ops[j].kind == OpKind::Barrier) continue;
      // walk predecessors, skipping through barrier nodes
      std::vector<int> stack(preds[j].begin(), preds[j].end());
      std::set<int> seen;
      while (!stack.empty()) {
        int x = stack.back();
        stack.pop_back();
        if (!seen.insert(x).second) continue;
        if (c.ops[x].kind == OpKind::Barrier) {
          for (int w : preds[x]) stack.push_back(w);
        } else {
          prec.insert({sched_index[x], sched_index[static_cast<int>(j)]});
        }
      }
    }

    // time windows
    est_.assign(n_gates, 1);
    lst_.assign(n_gates, T_);
    for (auto [x, y] : prec) est_[y] = std::max(est_[y], est_[x] + 1);
    // prec is ordered by construction (pairs follow op order), one forward
    // sweep reaches the fixpoint because edges go from lower to higher index
    for (auto [x, y] : prec) est_[y] = std::max(est_[y], est_[x] + 1);
    std::vector<std::pair<int, int>> rev(prec.begin(), prec.end());
    std::sort(rev.begin(), rev.end(),
              [](const auto& a2, const auto& b2) { return a2.second > b2.second; });
    for (auto [x, y] : rev) lst_[x] = std::min(lst_[x], lst_[y] - 1);
    for (auto [x, y] : rev) lst_[x] = std::min(lst_[x], lst_[y] - 1);
    for (int gi = 0; gi < n_gates; ++gi)
      if (est_[gi] > lst_[gi]) {
        trivially_unsat_ = true;
        return;
      }

    // eligible measurements: the final op on their qubit
    std::vector<int> last_op_on_qubit(num_q_, -1);
    for (std::size_t i = 0; i < c.ops.size(); ++i) {
      const Op& op = c.ops[i];
      if (op.kind == OpKind::Barrier) continue;
      last_op_on_qubit[op.q0] = static_cast<int>(i);
      if (op.q1 >= 0) last_op_on_qubit[op.q1] = static_cast<int>(i);
    }
    meas_of_qubit_.assign(num_q_, -1);
    if (reuse_) {
      for (int q = 0; q < num_q_; ++q) {
        int i = last_op_on_qubit[q];
        if (i >= 0 && c.ops[i].kind == OpKind::Measure) {
          meas_of_qubit_[q] = static_cast<int>(eligible_meas_.size());
          eligible_meas_.push_back(i);
          meas_gate_index_.push_back(sched_index[i]);
        }
      }
    }

    alloc_vars();
    add_scheduling_clauses(prec);
    add_assignment_clauses();
    add_location_clauses();
    add_swap_clauses();
    if (reuse_) add_reuse_clauses();
  }

  void alloc_vars() {
    auto& s = solver_;
    int n_gates = static_cast<int>(gates_.size());
    d_base_.resize(n_gates);
    sle_base_.resize(n_gates);
    for (int gi = 0; gi < n_gates; ++gi) {
      d_base_[gi] = static_cast<int>(d_.size());
      for (int t = est_[gi]; t <= lst_[gi]; ++t) {
        if (est_[gi] == lst_[gi])
          d_.push_back(true_lit_);
        else
          d_.push_back(sat::pos(s.new_var()));
      }
      sle_base_[gi] = static_cast<int>(sle_.size());
      for (int t = est_[gi]; t < lst_[gi]; ++t)
        sle_.push_back(sat::pos(s.new_var()));
    }
    pi_.resize(static_cast<std::size_t>(num_q_) * num_p_ * T_);
    for (auto& l : pi_) l = sat::pos(s.new_var());
    if (reuse_) {
      a_.resize(static_cast<std::size_t>(num_q_) * T_);
      for (auto& l : a_) l = sat::pos(s.new_var());
    }
    if (T_ >= 2) {
      sigma_.resize(edges_.size() * (T_ - 1));
      for (auto& l : sigma_) l = sat::pos(s.new_var());
    }
    for (std::size_t mi = 0; mi < eligible_meas_.size(); ++mi)
      reset_lits_.push_back(sat::pos(s.new_var()));
  }

  void add_scheduling_clauses(const std::set<std::pair<int, int>>& prec) {
    auto& s = solver_;
    int n_gates = static_cast<int>(gates_.size());
    for (int gi = 0; gi < n_gates; ++gi) {
      if (est_[gi] == lst_[gi]) continue;  // constant
      for (int t = est_[gi]; t <= lst_[gi]; ++t) {
        Lit dt = d(gi, t);
        Lit cur = sle(gi, t);
        Lit prev = sle(gi, t - 1);
        if (cur != true_lit_) s.add_clause({~dt, cur});
        if (prev != false_lit_) s.add_clause({~dt, ~prev});
        std::vector<Lit> cl{dt};
        if (cur != true_lit_) cl.push_back(~cur);
        if (prev != false_lit_) cl.push_back(prev);
        s.add_clause(cl);
        if (t > est_[gi] && cur != true_lit_ && prev != false_lit_)
          s.add_clause({~prev, cur});  // monotone
      }
    }
    for (auto [x, y] : prec) {
      for (int t = est_[y]; t <= lst_[y]; ++t) {
        Lit ly = sle(y, t);
        Lit lx = sle(x, t - 1);
        if (lx == true_lit_) continue;
        if (ly == true_lit_) {
          if (lx == false_lit_)
            s.add_clause({});  // unreachable given window computation
          else
            s.add_clause({lx});
        } else if (lx == false_lit_) {
          s.add_clause({~ly});
        } else {
          s.add_clause({~ly, lx});
        }
      }
    }
  }

  void add_assignment_clauses() {
    auto& s = solver_;
    for (int q = 0; q < num_q_; ++q)
      for (int t = 1; t <= T_; ++t) {
        std::vector<Lit> row;
        for (int p = 0; p < num_p_; ++p) row.push_back(pi(q, p, t));
        std::vector<Lit> alo = row;
        if (reuse_) {
          alo.push_back(~a(q, t));
          for (int p = 0; p < num_p_; ++p)
            s.add_clause({a(q, t), ~pi(q, p, t)});
        }
        s.add_clause(alo);
        sat::add_at_most_one(s, row);
      }
    for (int p = 0; p < num_p_; ++p)
      for (int t = 1; t <= T_; ++t) {
        std::vector<Lit> col;
        for (int q = 0; q < num_q_; ++q) col.push_back(pi(q, p, t));
        sat::add_at_most_one(s, col);
      }
    // gates act only on assigned qubits
    if (reuse_) {
      for (std::size_t gi = 0; gi < gates_.size(); ++gi) {
        const Op& op = circuit_->ops[gates_[gi]];
        for (int t = est_[gi]; t <= lst_[gi]; ++t) {
          Lit dt = d(static_cast<int>(gi), t);
          s.add_clause({a(op.q0, t), ~dt});
          if (op.q1 >= 0) s.add_clause({a(op.q1, t), ~dt});
        }
      }
    }
  }

  void add_location_clauses() {
    auto& s = solver_;
    // directed edge list for two-qubit locations
    dir_edges_.clear();
    for (auto [a2, b2] : edges_) {
      dir_edges_.emplace_back(a2, b2);
      dir_edges_.emplace_back(b2, a2);
    }
    x1_.assign(gates_.size(), {});
    x2_.assign(gates_.size(), {});
    for (std::size_t gi = 0; gi < gates_.size(); ++gi) {
      const Op& op = circuit_->ops[gates_[gi]];
      int igi = static_cast<int>(gi);
      if (op.q1 < 0) {
        auto& xs = x1_[gi];
        xs.resize(num_p_);
        for (int p = 0; p < num_p_; ++p) xs[p] = sat::pos(s.new_var());
        s.add_clause(std::vector<Lit>(xs.begin(), xs.end()));
        for (int t = est_[igi]; t <= lst_[igi]; ++t) {
          Lit dt = d(igi, t);
          for (int p = 0; p < num_p_; ++p) {
            s.add_clause({~dt, ~xs[p], pi(op.q0, p, t)});
            s.add_clause({~dt, ~pi(op.q0, p, t), xs[p]});
          }
        }
      } else {
        auto& xs = x2_[gi];
        xs.resize(dir_edges_.size());
        for (std::size_t k = 0; k < dir_edges_.size(); ++k)
          xs[k] = sat::pos(s.new_var());
        s.add_clause(std::vector<Lit>(xs.begin(), xs.end()));
        for (int t = est_[igi]; t <= lst_[igi]; ++t) {
          Lit dt = d(igi, t);
          for (std::size_t k = 0; k < dir_edges_.size(); ++k) {
            auto [i, j] = dir_edges_[k];
            s.add_clause({~dt, ~xs[k], pi(op.q0, i, t)});
            s.add_clause({~dt, ~xs[k], pi(op.q1, j, t)});
          }
          // the control's position restricts the location to its edges
          for (int i = 0; i < num_p_; ++i) {
            std::vector<Lit> cl{~dt, ~pi(op.q0, i, t)};
            for (std::size_t k = 0; k < dir_edges_.size(); ++k)
              if (dir_edges_[k].first == i) cl.push_back(xs[k]);
            s.add_clause(cl);
          }
        }
      }
    }
  }

  void add_swap_clauses() {
    auto& s = solver_;
    if (T_ < 2) return;
    int n_edges = static_cast<int>(edges_.size());
    // incident edges per physical qubit
    std::vector<std::vector<int>> incident(num_p_);
    for (int e = 0; e < n_edges; ++e) {
      incident[edges_[e].first].push_back(e);
      incident[edges_[e].second].push_back(e);
    }
    for (int t = 1; t <= T_ - 1; ++t) {
      for (int e = 0; e < n_edges; ++e) {
        Lit se = sigma(e, t);
        auto [i, j] = edges_[e];
        // endpoints occupied
        std::vector<Lit> occ_i{~se}, occ_j{~se};
        for (int q = 0; q < num_q_; ++q) {
          occ_i.push_back(pi(q, i, t));
          occ_j.push_back(pi(q, j, t));
        }
        s.add_clause(occ_i);
        s.add_clause(occ_j);
        // a repeated swap on the same edge is dead weight
        if (t + 1 <= T_ - 1) s.add_clause({~se, ~sigma(e, t + 1)});
      }
      for (int p = 0; p < num_p_; ++p)
        for (std::size_t u = 0; u < incident[p].size(); ++u)
          for (std::size_t v = u + 1; v < incident[p].size(); ++v)
            s.add_clause({~sigma(incident[p][u], t),
                          ~sigma(incident[p][v], t)});
    }
    // gate/swap exclusivity on shared physical qubits
    for (std::size_t gi = 0; gi < gates_.size(); ++gi) {
      const Op& op = circuit_->ops[gates_[gi]];
      int igi = static_cast<int>(gi);
      for (int t = std::max(est_[igi], 1);
           t <= std::min(lst_[igi], T_ - 1); ++t) {
        Lit dt = d(igi, t);
        for (int e = 0; e < n_edges; ++e) {
          Lit se = sigma(e, t);
          for (int p : {edges_[e].first, edges_[e].second}) {
            s.add_clause({~se, ~dt, ~pi(op.q0, p, t)});
            if (op.q1 >= 0) s.add_clause({~se, ~dt, ~pi(op.q1, p, t)});
          }
        }
      }
    }
    // frame axioms
    for (int t = 1; t <= T_ - 1; ++t) {
      for (int q = 0; q < num_q_; ++q) {
        for (int p = 0; p < num_p_; ++p) {
          std::vector<Lit> cl{~pi(q, p, t)};
          if (reuse_) cl.push_back(~a(q, t + 1));
          for (int e : incident[p]) cl.push_back(sigma(e, t));
          cl.push_back(pi(q, p, t + 1));
          s.add_clause(cl);
        }
        for (int e = 0; e < n_edges; ++e) {
          auto [i, j] = edges_[e];
          std::vector<Lit> m1{~sigma(e, t), ~pi(q, i, t), pi(q, j, t + 1)};
          std::vector<Lit> m2{~sigma(e, t), ~pi(q, j, t), pi(q, i, t + 1)};
          if (reuse_) {
            m1.insert(m1.begin() + 2, ~a(q, t + 1));
            m2.insert(m2.begin() + 2, ~a(q, t + 1));
          }
          s.add_clause(m1);
          s.add_clause(m2);
        }
      }
    }
  }

  void add_reuse_clauses() {
    auto& s = solver_;
    const Circuit& c = *circuit_;
    int n_meas = static_cast<int>(eligible_meas_.size());
    // z(m,t) <-> l(m) & d(m,t)
    z_.assign(n_meas, {});
    for (int mi = 0; mi < n_meas; ++mi) {
      int gi = meas_gate_index_[mi];
      z_[mi].resize(lst_[gi] - est_[gi] + 1);
      for (int t = est_[gi]; t <= lst_[gi]; ++t) {
        Lit z = sat::pos(s.new_var());
        z_[mi][t - est_[gi]] = z;
        s.add_clause({~z, reset_lits_[mi]});
        s.add_clause({~z, d(gi, t)});
        s.add_clause({~reset_lits_[mi], ~d(gi, t), z});
      }
    }
    auto z_at = [&](int mi, int t) -> Lit {
      int gi = meas_gate_index_[mi];
      if (t < est_[gi] || t > lst_[gi]) return false_lit_;
      return z_[mi][t - est_[gi]];
    };

    // f(p,t): a reset fires on physical qubit p at step t
    // v(m,p,t): reset of m fires and m is located at p
    std::map<std::pair<int, int>, Lit> f;
    for (int t = 1; t <= T_ - 1; ++t) {
      std::vector<int> live;  // eligible measurements schedulable at t
      for (int mi = 0; mi < n_meas; ++mi)
        if (z_at(mi, t) != false_lit_) live.push_back(mi);
      if (live.empty()) continue;
      for (int p = 0; p < num_p_; ++p) {
        Lit fp = sat::pos(s.new_var());
        f[{p, t}] = fp;
        std::vector<Lit> alo{~fp};
        for (int mi : live) {
          Lit v = sat::pos(s.new_var());
          s.add_clause({~v, z_at(mi, t)});
          s.add_clause({~v, x1_[meas_gate_index_[mi]][p]});
          alo.push_back(v);
        }
        s.add_clause(alo);
      }
    }

    // Rising edge of a(q): requires a reset on the acquired physical qubit
    for (int q = 0; q < num_q_; ++q)
      for (int t = 1; t <= T_ - 1; ++t)
        for (int p = 0; p < num_p_; ++p) {
          std::vector<Lit> cl{a(q, t), ~a(q, t + 1), ~pi(q, p, t + 1)};
          auto it = f.find({p, t});
          if (it != f.end()) cl.push_back(it->second);
          s.add_clause(cl);
        }

    // Falling edge of a(q) <-> the qubit's reset fires
    for (int q = 0; q < num_q_; ++q) {
      int mi = meas_of_qubit_[q];
      for (int t = 1; t <= T_ - 1; ++t) {
        std::vector<Lit> fall{~a(q, t), a(q, t + 1)};
        if (mi >= 0 && z_at(mi, t) != false_lit_) {
          fall.push_back(z_at(mi, t));
          s.add_clause({~z_at(mi, t), ~a(q, t + 1)});
        }
        s.add_clause(fall);
      }
    }
    // a qubit never re-rises after its final measurement has run; this
    // keeps the assignment trajectory rise-once/fall-once and unambiguous
    for (int q = 0; q < num_q_; ++q) {
      int mi = meas_of_qubit_[q];
      if (mi < 0) continue;
      int gi = meas_gate_index_[mi];
      for (int t = 1; t <= T_ - 1; ++t) {
        Lit done = sle(gi, t);
        if (done == false_lit_) continue;
        std::vector<Lit> cl{a(q, t), ~a(q, t + 1)};
        if (done == true_lit_)
          ;  // after lst the measurement has certainly run
        else
          cl.push_back(~done);
        s.add_clause(cl);
      }
    }
    (void)c;
  }

  // Counters are built lazily at the first requested width and rebuilt
  // wider if a later bound needs it (the earlier, narrower counter stays in
  // the formula but is no longer referenced).
  void ensure_swap_counter(int width) {
    if (swap_counter_width_ >= std::min<int>(width, sigma_.size())) return;
    std::vector<Lit> in(sigma_.begin(), sigma_.end());
    swap_counter_ = sat::add_counter(solver_, in, width, false);
    swap_counter_width_ = static_cast<int>(swap_counter_.at_least.size());
  }

  void ensure_used_counter(int width) {
    if (!used_built_) {
      used_.resize(num_p_);
      for (int p = 0; p < num_p_; ++p) {
        used_[p] = sat::pos(solver_.new_var());
        for (int q = 0; q < num_q_; ++q)
          for (int t = 1; t <= T_; ++t)
            solver_.add_clause({~pi(q, p, t), used_[p]});
      }
      used_built_ = true;
    }
    if (used_counter_width_ < std::min(width, num_p_)) {
      used_counter_ = sat::add_counter(solver_, used_, width, false);
      used_counter_width_ = static_cast<int>(used_counter_.at_least.size());
    }
  }

  void ensure_reset_counter() {
    if (reset_counter_built_) return;
    reset_counter_ = sat::add_counter(solver_, reset_lits_,
                                      static_cast<int>(reset_lits_.size()),
                                      true);
    reset_counter_built_ = true;
  }

  const Circuit* circuit_;
  const CouplingGraph* graph_;
  int T_;
  bool reuse_;
  int num_q_ = 0, num_p_ = 0;
  bool trivially_unsat_ = false;

  sat::Solver solver_;
  Lit true_lit_, false_lit_;

  std::vector<int> gates_;  // schedulable op indices
  std::vector<int> est_, lst_;
  std::vector<int> d_base_, sle_base_;
  std::vector<Lit> d_, sle_, pi_, a_, sigma_;
  std::vector<std::pair<int, int>> edges_;
  std::vector<std::pair<int, int>> dir_edges_;
  std::vector<std::vector<Lit>> x1_, x2_;
  std::vector<int> eligible_meas_;     // original op indices
  std::vector<int> meas_gate_index_;   // schedulable gate index per eligible
  std::vector<int> meas_of_qubit_;     // qubit -> eligible index or -1
  std::vector<Lit> reset_lits_;
  std::vector<std::vector<Lit>> z_;
  std::vector<Lit> used_;
  bool used_built_ = false;
  sat::CardinalityOutputs swap_counter_, used_counter_, reset_counter_;
  int swap_counter_width_ = 0, used_counter_width_ = 0;
  bool reset_counter_built_ = false;
};

// ---------------------------------------------------------------------------
// Optimization driver

struct OptimizeOptions {
  double budget_seconds = 3600;
  uint64_t seed = 0;
  std::optional<int> horizon_override;
  std::optional<Objective> secondary;
};

struct OptimizeResult {
  bool feasible = false;
  bool proven_optimal = false;
  bool timed_out = false;
  int objective_value = -1;
  std::optional<int> secondary_value;
  int horizon = 0;
  MappedCircuit mapped;
  std::string message;
};

namespace detail {

struct DescentOutcome {
  bool feasible = false;
  bool proven = false;
  bool timed_out = false;
  int value = -1;
  MappedCircuit best;
};

// Minimize one objective by probing the floor, then linear descent.
// `base` assumptions encode the reuse mode (and, for a secondary pass, the
// primary bound).
inline DescentOutcome minimize_objective(
    ReuseModel& model, Objective obj, const std::vector<sat::Lit>& base,
    const std::chrono::steady_clock::time_point& deadline, int floor_value) {
  using clock = std::chrono::steady_clock;
  auto remaining = [&]() {
    return std::chrono::duration<double>(deadline - clock::now()).count();
  };
  auto bound_assumptions = [&](int k) -> std::vector<sat::Lit> {
    std::vector<sat::Lit> as = base;
    switch (obj) {
      case Objective::Swaps:
        as.push_back(model.swaps_leq(k));
        break;
      case Objective::Qubits:
        as.push_back(model.qubits_leq(k));
        break;
      case Objective::Resets:
        as.push_back(model.resets_leq(k));
        break;
      case Objective::Depth: {
        auto extra = model.depth_leq(k);
        as.insert(as.end(), extra.begin(), extra.end());
        break;
      }
    }
    return as;
  };

  DescentOutcome out;
  double rem = remaining();
  if (rem <= 0) {
    out.timed_out = true;
    return out;
  }
  sat::Status st = model.solver().solve(base, rem);
  if (st == sat::Status::Timeout) {
    out.timed_out = true;
    return out;
  }
  if (st == sat::Status::Unsat) return out;  // infeasible at this horizon
  out.feasible = true;
  out.value = model.objective_value(obj);
  out.best = model.extract();

  // probe the floor first: when reuse absorbs all cost this ends the search
  if (out.value > floor_value) {
    rem = remaining();
    if (rem <= 0) {
      out.timed_out = true;
      return out;
    }
    st = model.solver().solve(bound_assumptions(floor_value), rem);
    if (st == sat::Status::Sat) {
      out.value = model.objective_value(obj);
      out.best = model.extract();
    } else if (st == sat::Status::Timeout) {
      out.timed_out = true;
      return out;
    }
  }
  if (out.value == floor_value) {
    out.proven = true;
    return out;
  }
  // linear descent with optimality certificate at value-1
  for (int bound = out.value - 1; bound >= floor_value; --bound) {
    rem = remaining();
    if (rem <= 0) {
      out.timed_out = true;
      return out;
    }
    st = model.solver().solve(bound_assumptions(bound), rem);
    if (st == sat::Status::Timeout) {
      out.timed_out = true;
      return out;
    }
    if (st == sat::Status::Unsat) {
      out.proven = true;
      return out;
    }
    out.value = model.objective_value(obj);
    out.best = model.extract();
    bound = out.value;  // loop decrement lands on value-1
  }
  out.proven = true;  // reached the floor
  return out;
}

}  // namespace detail

// Full pipeline: horizon from the heuristic router, encode, minimize with
// iterative deepening on the horizon, extract and re-check.
inline OptimizeResult optimize_circuit(const Circuit& c,
                                       const CouplingGraph& g, Objective obj,
                                       ReuseMode mode,
                                       const OptimizeOptions& opt = {}) {
  using clock = std::chrono::steady_clock;
  c.validate();
  OptimizeResult res;
  bool reuse_enabled = mode.kind != ReuseMode::Off;
  if (!reuse_enabled && c.num_qubits > g.num_qubits) {
    res.message = "more logical than physical qubits and reuse is off";
    return res;
  }
  if (mode.kind == ReuseMode::Exactly && mode.k < 0) {
    res.message = "exactly(k) requires k >= 0";
    return res;
  }
  if (mode.kind == ReuseMode::AtMostQubits && mode.k < 1) {
    res.message = "at_most_qubits(k) requires k >= 1";
    return res;
  }

  // Horizon: heuristic routed depth for the swap-model modes (off and
  // exact-k); the unrestricted reuse modes get serialization slack up front.
  bool reuse_slack = mode.kind == ReuseMode::On ||
                     mode.kind == ReuseMode::AtMostQubits;
  int num_meas = c.count(OpKind::Measure);
  int T = opt.horizon_override
              ? *opt.horizon_override
              : depth_bound(c, g, reuse_slack, opt.seed);
  int cap = std::max(serialization_cap(c), T);
  auto deadline = clock::now() +
                  std::chrono::duration_cast<clock::duration>(
                      std::chrono::duration<double>(opt.budget_seconds));

  bool has_two_qubit_gate = false;
  for (const Op& op : c.ops)
    if (is_two_qubit(op.kind)) has_two_qubit_gate = true;
  int qubit_floor = !reuse_enabled
                        ? std::max(1, c.num_qubits)
                        : std::max(1, std::min(c.num_qubits,
                                               has_two_qubit_gate ? 2 : 1));

  auto finalize = [&](detail::DescentOutcome out, bool proven) {
    res.feasible = true;
    res.proven_optimal = proven && !res.timed_out;
    res.objective_value = out.value;
    res.mapped = out.best;
    ValidityReport rep = check_valid(res.mapped, g, c);
    if (!rep.ok()) {
      std::string msg = "extraction failed validity:";
      for (const auto& v : rep.violations) msg += " " + v + ";";
      throw MapperError(msg);
    }
    return res;
  };

  // Incumbent across horizons: only the qubit objective keeps deepening
  // after a feasible solve, probing for value-1 at each larger horizon; at
  // the serialization cap every schedule fits, so a cap-level UNSAT proves
  // global optimality.
  std::optional<detail::DescentOutcome> incumbent;

  for (;;) {
    ReuseModel model(c, g, T, reuse_enabled);
    res.horizon = T;
    bool at_cap = T >= cap;
    if (!model.trivially_unsat()) {
      model.solver().set_seed(opt.seed);

      std::vector<sat::Lit> base;
      if (mode.kind == ReuseMode::Exactly) {
        if (mode.k > model.num_eligible_resets()) {
          res.message = "exactly(k): only " +
                        std::to_string(model.num_eligible_resets()) +
                        " reset locations exist";
          return res;
        }
        base = model.exactly_k_resets(mode.k);
      } else if (mode.kind == ReuseMode::AtMostQubits) {
        base = model.at_most_qubits(mode.k);
      }

      auto floor_of = [&](Objective o) {
        switch (o) {
          case Objective::Swaps: return 0;
          case Objective::Resets:
            return mode.kind == ReuseMode::Exactly ? mode.k : 0;
          case Objective::Depth: return model.min_depth();
          case Objective::Qubits: return qubit_floor;
        }
        return 0;
      };

      std::vector<sat::Lit> probe_base = base;
      if (incumbent)
        probe_base.push_back(model.qubits_leq(incumbent->value - 1));
      auto out = detail::minimize_objective(model, obj, probe_base, deadline,
                                            floor_of(obj));
      if (out.timed_out) {
        res.timed_out = true;
        if (out.feasible || incumbent) {
          res.message = "budget exhausted; best-known value reported";
          return finalize(out.feasible ? out : *incumbent, false);
        }
        res.message = "budget exhausted before any solution was found";
        return res;
      }
      if (out.feasible) {
        bool keep_deepening = obj == Objective::Qubits &&
                              out.value > qubit_floor && !at_cap;
        if (keep_deepening) {
          incumbent = out;
        } else {
          if (opt.secondary && *opt.secondary != obj) {
            std::vector<sat::Lit> fixed = base;
            switch (obj) {
              case Objective::Swaps:
                fixed.push_back(model.swaps_leq(out.value));
                break;
              case Objective::Qubits:
                fixed.push_back(model.qubits_leq(out.value));
                break;
              case Objective::Resets:
                fixed.push_back(model.resets_leq(out.value));
                break;
              case Objective::Depth: {
                auto extra = model.depth_leq(out.value);
                fixed.insert(fixed.end(), extra.begin(), extra.end());
                break;
              }
            }
            auto sec = detail::minimize_objective(
                model, *opt.secondary, fixed, deadline,
                floor_of(*opt.secondary));
            if (sec.feasible) {
              res.secondary_value = sec.value;
              out.best = sec.best;
            }
            if (sec.timed_out) res.timed_out = true;
          }
          return finalize(out, out.proven);
        }
      }
    }
    // UNSAT (or probe failed, or horizon below the critical path): deepen
    if (at_cap) {
      if (incumbent) return finalize(*incumbent, true);
      res.message = "no feasible mapping within the serialization cap";
      return res;
    }
    T = std::min(T + std::max(1, num_meas), cap);
  }
}

}  // namespace reuseq
