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

// Conflict-driven clause learning SAT engine with incremental assumptions.
// The design follows the classic two-watched-literal scheme: first-UIP
// learning with recursive minimization, VSIDS branching, phase saving,
// Luby restarts and activity/LBD-based learnt clause reduction.

#include <algorithm>
#include <cassert>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <random>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace reuseq::sat {

using Var = int;

struct Lit {
  int x = -2;  // 2*var + sign (sign = 1 for negated)

  Lit() = default;
  Lit(Var v, bool neg) : x(2 * v + (neg ? 1 : 0)) {}

  Var var() const { return x >> 1; }
  bool neg() const { return x & 1; }
  Lit operator~() const {
    Lit l;
    l.x = x ^ 1;
    return l;
  }
  bool operator==(const Lit& o) const { return x == o.x; }
  bool operator!=(const Lit& o) const { return x != o.x; }
  bool operator<(const Lit& o) const { return x < o.x; }
};

inline Lit pos(Var v) { return Lit(v, false); }
inline Lit neg(Var v) { return Lit(v, true); }

enum class Value : uint8_t { False = 0, True = 1, Undef = 2 };

inline Value operator^(Value v, bool b) {
  if (v == Value::Undef) return v;
  return static_cast<Value>(static_cast<uint8_t>(v) ^ static_cast<uint8_t>(b));
}

enum class Status { Sat, Unsat, Timeout };

class Solver {
 public:
  Solver() { new_var(); /* var 0 reserved: constant true literal */
    add_clause({pos(0)});
  }

  Var new_var() {
    Var v = static_cast<Var>(assigns_.size());
    assigns_.push_back(Value::Undef);
    phase_.push_back(false);
    level_.push_back(0);
    reason_.push_back(kNoClause);
    activity_.push_back(0.0);
    seen_.push_back(0);
    heap_pos_.push_back(-1);
    watches_.emplace_back();
    watches_.emplace_back();
    heap_insert(v);
    return v;
  }

  int num_vars() const { return static_cast<int>(assigns_.size()); }

  // Literal that is always true, for encoding constants.
  Lit true_lit() const { return pos(0); }

  bool ok() const { return ok_; }

  // Returns false if the clause set became trivially unsatisfiable.
  bool add_clause(std::vector<Lit> lits) {
    if (!ok_) return false;
    assert(decision_level() == 0);
    std::sort(lits.begin(), lits.end());
    std::vector<Lit> out;
    for (std::size_t i = 0; i < lits.size(); ++i) {
      Lit l = lits[i];
      if (i > 0 && l == lits[i - 1]) continue;
      if (i > 0 && l == ~lits[i - 1]) return true;  // tautology
      Value v = value(l);
      if (v == Value::True) return true;
      if (v == Value::False) continue;
      out.push_back(l);
    }
    ++num_clauses_;
    if (out.empty()) {
      ok_ = false;
      return false;
    }
    if (out.size() == 1) {
      unchecked_enqueue(out[0], kNoClause);
      if (propagate() != kNoClause) ok_ = false;
      return ok_;
    }
    attach_new(out, false, 0);
    return true;
  }

  void set_seed(uint64_t seed) { rng_.seed(seed); }

  // Fraction of decisions made on a random variable (0 disables).
  void set_random_freq(double f) { random_freq_ = f; }

  Status solve(const std::vector<Lit>& assumptions, double budget_seconds) {
    model_.clear();
    conflict_core_.clear();
    if (!ok_) return Status::Unsat;
    assumptions_ = assumptions;
    assumption_level_ = 0;
    deadline_ = std::chrono::steady_clock::now() +
                std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                    std::chrono::duration<double>(budget_seconds));
    Status st = search_loop();
    cancel_until(0);
    return st;
  }

  Status solve() { return solve({}, 1e18); }

  // Model access after Sat.
  bool model_value(Var v) const { return model_[v] == Value::True; }
  bool model_value(Lit l) const {
    return (model_[l.var()] == Value::True) != l.neg();
  }

  // After Unsat under assumptions: a subset of the assumptions sufficient
  // for unsatisfiability.
  const std::vector<Lit>& unsat_core() const { return conflict_core_; }

  uint64_t conflicts() const { return stats_conflicts_; }
  uint64_t propagations() const { return stats_propagations_; }
  int num_clauses() const { return num_clauses_; }

  void to_dimacs(std::ostream& out) const {
    std::vector<std::vector<Lit>> cls = all_clauses();
    out << "p cnf " << num_vars() << " " << cls.size() << "\n";
    for (const auto& c : cls) {
      for (Lit l : c) out << (l.neg() ? -(l.var() + 1) : (l.var() + 1)) << " ";
      out << "0\n";
    }
  }

  std::vector<std::vector<Lit>> all_clauses() const {
    std::vector<std::vector<Lit>> cls;
    for (uint32_t ref : problem_clauses_) {
      std::vector<Lit> c;
      const Clause& cl = clause(ref);
      for (uint32_t i = 0; i < cl.size; ++i) c.push_back(cl.lits[i]);
      cls.push_back(std::move(c));
    }
    // root-level unit facts (skip the reserved constant)
    int root_end = trail_lim_.empty() ? static_cast<int>(trail_.size())
                                      : trail_lim_[0];
    for (int i = 0; i < root_end; ++i) {
      if (trail_[i].var() == 0) continue;
      cls.push_back({trail_[i]});
    }
    return cls;
  }

 private:
  static constexpr uint32_t kNoClause = 0xFFFFFFFF;

  struct Clause {
    uint32_t size;
    uint32_t learnt : 1;
    uint32_t lbd : 31;
    float activity;
    Lit lits[1];  // flexible
  };

  struct Watcher {
    uint32_t cref;
    Lit blocker;
  };

  // --- clause arena ---
  Clause& clause(uint32_t ref) {
#ifdef REUSEQ_SAT_CHECK
    if (ref + sizeof(Clause) > arena_.size()) std::abort();
#endif
    return *reinterpret_cast<Clause*>(&arena_[ref]);
  }
  const Clause& clause(uint32_t ref) const {
#ifdef REUSEQ_SAT_CHECK
    if (ref + sizeof(Clause) > arena_.size()) std::abort();
#endif
    return *reinterpret_cast<const Clause*>(&arena_[ref]);
  }

  static uint32_t clause_footprint(std::size_t num_lits) {
    return static_cast<uint32_t>(
               (sizeof(Clause) + (num_lits - 1) * sizeof(Lit) + 7) / 8) * 8;
  }

  uint32_t alloc_clause(const std::vector<Lit>& lits, bool learnt,
                        uint32_t lbd) {
    uint32_t need = clause_footprint(lits.size());
    // refs are byte offsets in 32 bits; live clauses near this limit mean the
    // instance is hopeless anyway, so fail loudly instead of wrapping
    if (arena_.size() + need > 0xFFFFFFF0u)
      throw std::length_error("sat: clause arena exceeds addressable size");
    if (arena_.size() + need > arena_.capacity())
      arena_.reserve(std::max<std::size_t>(arena_.capacity() * 2,
                                           arena_.size() + need));
    uint32_t ref = static_cast<uint32_t>(arena_.size());
    arena_.resize(arena_.size() + need);
    Clause& c = clause(ref);
    c.size = static_cast<uint32_t>(lits.size());
    c.learnt = learnt ? 1 : 0;
    c.lbd = lbd;
    c.activity = 0;
    for (std::size_t i = 0; i < lits.size(); ++i) c.lits[i] = lits[i];
    return ref;
  }

  void attach(uint32_t ref) {
    Clause& c = clause(ref);
    watches_[(~c.lits[0]).x].push_back({ref, c.lits[1]});
    watches_[(~c.lits[1]).x].push_back({ref, c.lits[0]});
  }

  uint32_t attach_new(const std::vector<Lit>& lits, bool learnt, uint32_t lbd) {
    uint32_t ref = alloc_clause(lits, learnt, lbd);
    attach(ref);
    if (learnt)
      learnt_clauses_.push_back(ref);
    else
      problem_clauses_.push_back(ref);
    return ref;
  }

  // --- assignment ---
  Value value(Var v) const { return assigns_[v]; }
  Value value(Lit l) const { return assigns_[l.var()] ^ l.neg(); }
  int decision_level() const { return static_cast<int>(trail_lim_.size()); }

  void unchecked_enqueue(Lit l, uint32_t from) {
    assigns_[l.var()] = l.neg() ? Value::False : Value::True;
    level_[l.var()] = decision_level();
    reason_[l.var()] = from;
    trail_.push_back(l);
  }

  void new_decision_level() {
    trail_lim_.push_back(static_cast<int>(trail_.size()));
  }

  void cancel_until(int lvl) {
    if (decision_level() <= lvl) return;
    for (int i = static_cast<int>(trail_.size()) - 1; i >= trail_lim_[lvl];
         --i) {
      Var v = trail_[i].var();
      phase_[v] = assigns_[v] == Value::True;
      assigns_[v] = Value::Undef;
      reason_[v] = kNoClause;
      if (heap_pos_[v] < 0) heap_insert(v);
    }
    qhead_ = trail_lim_[lvl];
    trail_.resize(trail_lim_[lvl]);
    trail_lim_.resize(lvl);
  }

  // --- propagation ---
  uint32_t propagate() {
    while (qhead_ < trail_.size()) {
      Lit p = trail_[qhead_++];
      ++stats_propagations_;
      auto& ws = watches_[p.x];
      std::size_t i = 0, j = 0;
      while (i < ws.size()) {
        Watcher w = ws[i];
        if (value(w.blocker) == Value::True) {
          ws[j++] = ws[i++];
          continue;
        }
        Clause& c = clause(w.cref);
        Lit false_lit = ~p;
        if (c.lits[0] == false_lit) std::swap(c.lits[0], c.lits[1]);
        Lit first = c.lits[0];
        if (first != w.blocker && value(first) == Value::True) {
          ws[j++] = {w.cref, first};
          ++i;
          continue;
        }
        bool found = false;
        for (uint32_t k = 2; k < c.size; ++k) {
          if (value(c.lits[k]) != Value::False) {
            std::swap(c.lits[1], c.lits[k]);
            watches_[(~c.lits[1]).x].push_back({w.cref, first});
            found = true;
            break;
          }
        }
        if (found) {
          ++i;
          continue;
        }
        // unit or conflict
        ws[j++] = {w.cref, first};
        ++i;
        if (value(first) == Value::False) {
          // conflict: copy remaining watchers and bail
          while (i < ws.size()) ws[j++] = ws[i++];
          ws.resize(j);
          qhead_ = trail_.size();
          return w.cref;
        }
        unchecked_enqueue(first, w.cref);
      }
      ws.resize(j);
    }
    return kNoClause;
  }

  // --- VSIDS heap ---
  bool heap_less(Var a, Var b) const {
    return activity_[a] > activity_[b] || (activity_[a] == activity_[b] && a < b);
  }
  void heap_insert(Var v) {
    heap_pos_[v] = static_cast<int>(heap_.size());
    heap_.push_back(v);
    heap_up(heap_pos_[v]);
  }
  void heap_up(int i) {
    Var v = heap_[i];
    while (i > 0) {
      int par = (i - 1) / 2;
      if (!heap_less(v, heap_[par])) break;
      heap_[i] = heap_[par];
      heap_pos_[heap_[i]] = i;
      i = par;
    }
    heap_[i] = v;
    heap_pos_[v] = i;
  }
  void heap_down(int i) {
    Var v = heap_[i];
    int n = static_cast<int>(heap_.size());
    for (;;) {
      int c = 2 * i + 1;
      if (c >= n) break;
      if (c + 1 < n && heap_less(heap_[c + 1], heap_[c])) ++c;
      if (!heap_less(heap_[c], v)) break;
      heap_[i] = heap_[c];
      heap_pos_[heap_[i]] = i;
      i = c;
    }
    heap_[i] = v;
    heap_pos_[v] = i;
  }
  Var heap_pop() {
    Var v = heap_[0];
    heap_pos_[v] = -1;
    Var last = heap_.back();
    heap_.pop_back();
    if (!heap_.empty()) {
      heap_[0] = last;
      heap_pos_[last] = 0;
      heap_down(0);
    }
    return v;
  }

  void bump_var(Var v) {
    activity_[v] += var_inc_;
    if (activity_[v] > 1e100) {
      for (double& a : activity_) a *= 1e-100;
      var_inc_ *= 1e-100;
    }
    if (heap_pos_[v] >= 0) heap_up(heap_pos_[v]);
  }

  void bump_clause(Clause& c) {
    c.activity += static_cast<float>(cla_inc_);
    if (c.activity > 1e20f) {
      for (uint32_t ref : learnt_clauses_) clause(ref).activity *= 1e-20f;
      cla_inc_ *= 1e-20;
    }
  }

  // --- conflict analysis (first UIP) ---
  void analyze(uint32_t confl, std::vector<Lit>& out_learnt, int& out_btlevel,
               uint32_t& out_lbd) {
    out_learnt.clear();
    out_learnt.push_back(Lit());  // placeholder for asserting literal
    int path_count = 0;
    Lit p;
    p.x = -2;
    int index = static_cast<int>(trail_.size()) - 1;
    do {
      Clause& c = clause(confl);
      if (c.learnt) bump_clause(c);
      for (uint32_t k = (p.x == -2 ? 0 : 1); k < c.size; ++k) {
        Lit q = c.lits[k];
        Var v = q.var();
        if (!seen_[v] && level_[v] > 0) {
          seen_[v] = 1;
          bump_var(v);
          if (level_[v] >= decision_level())
            ++path_count;
          else
            out_learnt.push_back(q);
        }
      }
      while (!seen_[trail_[index].var()]) --index;
      p = trail_[index];
      confl = reason_[p.var()];
      seen_[p.var()] = 0;
      --index;
      --path_count;
    } while (path_count > 0);
    out_learnt[0] = ~p;

    // recursive minimization
    analyze_clear_.clear();
    for (std::size_t i = 1; i < out_learnt.size(); ++i)
      analyze_clear_.push_back(out_learnt[i].var());
    std::size_t j = 1;
    for (std::size_t i = 1; i < out_learnt.size(); ++i) {
      Var v = out_learnt[i].var();
      if (reason_[v] == kNoClause || !lit_redundant(out_learnt[i]))
        out_learnt[j++] = out_learnt[i];
    }
    out_learnt.resize(j);
    for (Var v : analyze_clear_) seen_[v] = 0;
    for (std::size_t i = 1; i < out_learnt.size(); ++i)
      seen_[out_learnt[i].var()] = 0;  // in case cleared list missed any

    // LBD + backtrack level
    if (out_learnt.size() == 1) {
      out_btlevel = 0;
    } else {
      std::size_t max_i = 1;
      for (std::size_t i = 2; i < out_learnt.size(); ++i)
        if (level_[out_learnt[i].var()] > level_[out_learnt[max_i].var()])
          max_i = i;
      std::swap(out_learnt[1], out_learnt[max_i]);
      out_btlevel = level_[out_learnt[1].var()];
    }
    std::vector<int> lvls;
    for (Lit l : out_learnt) lvls.push_back(level_[l.var()]);
    std::sort(lvls.begin(), lvls.end());
    out_lbd = static_cast<uint32_t>(
        std::unique(lvls.begin(), lvls.end()) - lvls.begin());
  }

  // True when l is implied by other literals already in the learnt clause.
  bool lit_redundant(Lit l) {
    minimize_stack_.clear();
    minimize_stack_.push_back(l);
    std::size_t cleared_top = analyze_clear_.size();
    while (!minimize_stack_.empty()) {
      Lit q = minimize_stack_.back();
      minimize_stack_.pop_back();
      uint32_t r = reason_[q.var()];
      if (r == kNoClause) continue;
      Clause& c = clause(r);
      for (uint32_t k = 1; k < c.size; ++k) {
        Lit x = c.lits[k];
        Var v = x.var();
        if (seen_[v] || level_[v] == 0) continue;
        if (reason_[v] == kNoClause) {
          // not removable: undo marks made during this check
          for (std::size_t i = cleared_top; i < analyze_clear_.size(); ++i)
            seen_[analyze_clear_[i]] = 0;
          analyze_clear_.resize(cleared_top);
          return false;
        }
        seen_[v] = 1;
        analyze_clear_.push_back(v);
        minimize_stack_.push_back(x);
      }
    }
    return true;
  }

  // Conflict under assumptions: collect the involved assumption literals.
  void analyze_final(Lit p, std::vector<Lit>& out) {
    out.clear();
    out.push_back(p);
    if (decision_level() == 0) return;
    seen_[p.var()] = 1;
    for (int i = static_cast<int>(trail_.size()) - 1; i >= trail_lim_[0]; --i) {
      Var v = trail_[i].var();
      if (!seen_[v]) continue;
      if (reason_[v] == kNoClause) {
        out.push_back(~trail_[i]);
      } else {
        Clause& c = clause(reason_[v]);
        for (uint32_t k = 1; k < c.size; ++k)
          if (level_[c.lits[k].var()] > 0) seen_[c.lits[k].var()] = 1;
      }
      seen_[v] = 0;
    }
    seen_[p.var()] = 0;
  }

  // --- learnt DB reduction ---
  void reduce_db() {
    std::sort(learnt_clauses_.begin(), learnt_clauses_.end(),
              [&](uint32_t a, uint32_t b) {
                const Clause& ca = clause(a);
                const Clause& cb = clause(b);
                if (ca.lbd != cb.lbd) return ca.lbd > cb.lbd;
                return ca.activity < cb.activity;
              });
    std::size_t keep_from = learnt_clauses_.size() / 2;
    std::vector<uint32_t> kept;
    for (std::size_t i = 0; i < learnt_clauses_.size(); ++i) {
      uint32_t ref = learnt_clauses_[i];
      Clause& c = clause(ref);
      bool locked = reason_[c.lits[0].var()] == ref &&
                    value(c.lits[0]) == Value::True;
      if (i >= keep_from || c.lbd <= 3 || locked) {
        kept.push_back(ref);
      } else {
        detach(ref);
        wasted_bytes_ += clause_footprint(c.size);
      }
    }
    learnt_clauses_ = std::move(kept);
    if (wasted_bytes_ > arena_.size() / 2) garbage_collect();
  }

  // Compact the clause arena: dead clauses would otherwise accumulate until
  // the 32-bit byte offsets wrap on long runs.
  void garbage_collect() {
    std::vector<uint8_t> fresh;
    fresh.reserve(arena_.size() - wasted_bytes_ + 64);
    std::unordered_map<uint32_t, uint32_t> remap;
    auto move_clause = [&](uint32_t ref) {
      const Clause& c = clause(ref);
      uint32_t need = clause_footprint(c.size);
      uint32_t nref = static_cast<uint32_t>(fresh.size());
      fresh.resize(fresh.size() + need);
      std::memcpy(&fresh[nref], &arena_[ref],
                  sizeof(Clause) + (c.size - 1) * sizeof(Lit));
      remap.emplace(ref, nref);
      return nref;
    };
    for (uint32_t& ref : problem_clauses_) ref = move_clause(ref);
    for (uint32_t& ref : learnt_clauses_) ref = move_clause(ref);
    for (uint32_t& r : reason_) {
      if (r == kNoClause) continue;
      auto it = remap.find(r);
      r = it == remap.end() ? kNoClause : it->second;
    }
    arena_ = std::move(fresh);
    wasted_bytes_ = 0;
    for (auto& ws : watches_) ws.clear();
    for (uint32_t ref : problem_clauses_) attach(ref);
    for (uint32_t ref : learnt_clauses_) attach(ref);
  }

  void detach(uint32_t ref) {
    Clause& c = clause(ref);
    for (int w = 0; w < 2; ++w) {
      auto& ws = watches_[(~c.lits[w]).x];
      for (std::size_t i = 0; i < ws.size(); ++i)
        if (ws[i].cref == ref) {
          ws[i] = ws.back();
          ws.pop_back();
          break;
        }
    }
  }

  static double luby(double y, int x) {
    int size, seq;
    for (size = 1, seq = 0; size < x + 1; ++seq, size = 2 * size + 1) {
    }
    while (size - 1 != x) {
      size = (size - 1) >> 1;
      --seq;
      x = x % size;
    }
    return std::pow(y, seq);
  }

  Lit pick_branch_lit() {
    if (random_freq_ > 0 &&
        std::uniform_real_distribution<double>(0, 1)(rng_) < random_freq_ &&
        !heap_.empty()) {
      std::uniform_int_distribution<std::size_t> d(0, heap_.size() - 1);
      Var v = heap_[d(rng_)];
      if (value(v) == Value::Undef) return Lit(v, !phase_[v]);
    }
    while (!heap_.empty()) {
      Var v = heap_pop();
      if (value(v) == Value::Undef) return Lit(v, !phase_[v]);
    }
    return Lit();
  }

  Status search_loop() {
    int restart_count = 0;
    for (;;) {
      int64_t budget = static_cast<int64_t>(100 * luby(2.0, restart_count++));
      Status st = search(budget);
      if (st != Status::Timeout || timed_out_) return st;
    }
  }

  bool time_exceeded() {
    return std::chrono::steady_clock::now() > deadline_;
  }

  // Runs until conflict budget exhausted (returns Timeout with
  // timed_out_=false to signal a restart) or a result is found.
  Status search(int64_t conflict_budget) {
    timed_out_ = false;
    int64_t conflicts_here = 0;
    std::vector<Lit> learnt;
    for (;;) {
      uint32_t confl = propagate();
      if (confl != kNoClause) {
        ++stats_conflicts_;
        ++conflicts_here;
        if (decision_level() == 0) {
          ok_ = false;
          conflict_core_.clear();
          return Status::Unsat;
        }
        if (decision_level() <= assumption_level_) {
          // conflict among assumptions: extract a core
          extract_core_from_conflict(confl);
          return Status::Unsat;
        }
        int btlevel;
        uint32_t lbd;
        analyze(confl, learnt, btlevel, lbd);
        if (learnt.size() == 1) {
          // A unit learnt is implied by the formula alone, so record it at
          // the root; the outer loop re-establishes any assumptions.
          cancel_until(0);
          unchecked_enqueue(learnt[0], kNoClause);
        } else {
          btlevel = std::max(btlevel, assumption_level_);
          cancel_until(btlevel);
          uint32_t ref = attach_new(learnt, true, lbd);
          bump_clause(clause(ref));
          unchecked_enqueue(learnt[0], ref);
        }
        var_inc_ /= 0.95;
        cla_inc_ /= 0.999;
        if (static_cast<int64_t>(learnt_clauses_.size()) >
            4000 + 8 * static_cast<int64_t>(stats_conflicts_ / 4096) * 1024) {
          reduce_db();
        }
        if ((stats_conflicts_ & 255) == 0 && time_exceeded()) {
          timed_out_ = true;
          return Status::Timeout;
        }
        if (conflicts_here >= conflict_budget && decision_level() >
                                                     assumption_level_) {
          cancel_until(assumption_level_);
          return Status::Timeout;  // restart
        }
      } else {
        // place assumptions as pseudo-decisions
        if (decision_level() < static_cast<int>(assumptions_.size())) {
          Lit a = assumptions_[decision_level()];
          if (value(a) == Value::True) {
            new_decision_level();
            assumption_level_ = decision_level();
            continue;
          }
          if (value(a) == Value::False) {
            analyze_final(~a, conflict_core_);
            return Status::Unsat;
          }
          new_decision_level();
          assumption_level_ = decision_level();
          unchecked_enqueue(a, kNoClause);
          continue;
        }
        Lit next = pick_branch_lit();
        if (next.x == -2) {
          // full model
          model_.assign(assigns_.begin(), assigns_.end());
          return Status::Sat;
        }
        new_decision_level();
        unchecked_enqueue(next, kNoClause);
      }
    }
  }

  void extract_core_from_conflict(uint32_t confl) {
    conflict_core_.clear();
    Clause& c = clause(confl);
    for (uint32_t k = 0; k < c.size; ++k)
      if (level_[c.lits[k].var()] > 0) seen_[c.lits[k].var()] = 1;
    for (int i = static_cast<int>(trail_.size()) - 1;
         i >= (trail_lim_.empty() ? 0 : trail_lim_[0]); --i) {
      Var v = trail_[i].var();
      if (!seen_[v]) continue;
      if (reason_[v] == kNoClause) {
        conflict_core_.push_back(~trail_[i]);
      } else {
        Clause& rc = clause(reason_[v]);
        for (uint32_t k = 1; k < rc.size; ++k)
          if (level_[rc.lits[k].var()] > 0) seen_[rc.lits[k].var()] = 1;
      }
      seen_[v] = 0;
    }
  }

  // state
  bool ok_ = true;
  std::vector<uint64_t> arena_alignment_;  // unused, keeps arena 8-aligned
  std::vector<uint8_t> arena_;
  std::size_t wasted_bytes_ = 0;
  std::vector<uint32_t> problem_clauses_;
  std::vector<uint32_t> learnt_clauses_;
  std::vector<std::vector<Watcher>> watches_;  // indexed by lit.x
  std::vector<Value> assigns_;
  std::vector<bool> phase_;
  std::vector<int> level_;
  std::vector<uint32_t> reason_;
  std::vector<double> activity_;
  std::vector<char> seen_;
  std::vector<Lit> trail_;
  std::vector<int> trail_lim_;
  std::size_t qhead_ = 0;
  std::vector<Var> heap_;
  std::vector<int> heap_pos_;
  double var_inc_ = 1.0;
  double cla_inc_ = 1.0;
  int num_clauses_ = 0;
  std::vector<Lit> assumptions_;
  int assumption_level_ = 0;
  std::vector<Value> model_;
  std::vector<Lit> conflict_core_;
  std::vector<Var> analyze_clear_;
  std::vector<Lit> minimize_stack_;
  std::mt19937_64 rng_{0};
  double random_freq_ = 0.0;
  std::chrono::steady_clock::time_point deadline_;
  bool timed_out_ = false;
  uint64_t stats_conflicts_ = 0;
  uint64_t stats_propagations_ = 0;
};

// ---------------------------------------------------------------------------
// Sequential-counter cardinality machinery.
//
// Builds counter outputs out[j] (j = 1..width) meaning "at least j of the
// inputs are true". With `both_directions` the equivalence holds in the
// model; otherwise only input -> counter propagation is encoded, which is
// sufficient for enforcing upper bounds by assuming ~out[k+1].
struct CardinalityOutputs {
  std::vector<Lit> at_least;  // at_least[j-1] <=> sum >= j

  // Assumption literal enforcing sum <= k (k < width required).
  Lit leq(int k) const { return ~at_least[k]; }
  // Assumption literal enforcing sum >= k (requires both_directions).
  Lit geq(int k) const { return at_least[k - 1]; }
};

inline CardinalityOutputs add_counter(Solver& s, const std::vector<Lit>& in,
                                      int width, bool both_directions) {
  width = std::min<int>(width, static_cast<int>(in.size()));
  CardinalityOutputs out;
  if (width <= 0 || in.empty()) return out;
  int n = static_cast<int>(in.size());
  // reg[i][j] : among in[0..i], at least j+1 are true
  std::vector<std::vector<Lit>> reg(n);
  for (int i = 0; i < n; ++i) {
    int w = std::min(width, i + 1);
    reg[i].resize(w);
    for (int j = 0; j < w; ++j) reg[i][j] = pos(s.new_var());
  }
  // in[i] -> reg[i][0]
  for (int i = 0; i < n; ++i) s.add_clause({~in[i], reg[i][0]});
  for (int i = 1; i < n; ++i) {
    int w = static_cast<int>(reg[i].size());
    int wp = static_cast<int>(reg[i - 1].size());
    for (int j = 0; j < wp && j < w; ++j)
      s.add_clause({~reg[i - 1][j], reg[i][j]});  // monotone carry
    for (int j = 1; j < w; ++j)
      if (j - 1 < wp) s.add_clause({~in[i], ~reg[i - 1][j - 1], reg[i][j]});
    if (both_directions) {
      // reg[i][j] -> reg[i-1][j] | (in[i] & reg[i-1][j-1])
      for (int j = 0; j < w; ++j) {
        std::vector<Lit> c1{~reg[i][j], in[i]};
        if (j < wp) c1.push_back(reg[i - 1][j]);
        s.add_clause(c1);
        if (j >= 1) {
          std::vector<Lit> c2{~reg[i][j]};
          if (j < wp) c2.push_back(reg[i - 1][j]);
          if (j - 1 < wp) c2.push_back(reg[i - 1][j - 1]);
          s.add_clause(c2);
        }
      }
    }
  }
  if (both_directions) {
    // reg[0][0] -> in[0]
    s.add_clause({~reg[0][0], in[0]});
  }
  out.at_least.assign(reg[n - 1].begin(), reg[n - 1].end());
  return out;
}

// Permanently enforce "at most k of lits" (sequential counter).
inline void add_at_most_k(Solver& s, const std::vector<Lit>& lits, int k) {
  if (k >= static_cast<int>(lits.size())) return;
  if (k == 0) {
    for (Lit l : lits) s.add_clause({~l});
    return;
  }
  auto card = add_counter(s, lits, k + 1, false);
  s.add_clause({card.leq(k)});
}

// At-most-one: pairwise below 6 literals, sequential counter otherwise.
inline void add_at_most_one(Solver& s, const std::vector<Lit>& lits) {
  if (lits.size() < 6) {
    for (std::size_t i = 0; i < lits.size(); ++i)
      for (std::size_t j = i + 1; j < lits.size(); ++j)
        s.add_clause({~lits[i], ~lits[j]});
  } else {
    add_at_most_k(s, lits, 1);
  }
}

inline void add_exactly_one(Solver& s, const std::vector<Lit>& lits) {
  s.add_clause(lits);
  add_at_most_one(s, lits);
}

}  // namespace reuseq::sat
