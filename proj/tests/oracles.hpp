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

// Brute-force reference implementations used only by the test suite. Each
// oracle mirrors the production semantics with an independent, exhaustive
// algorithm so the two can disagree only when one of them is wrong.

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "reuseq/circuit.hpp"
#include "reuseq/sat.hpp"
#include "reuseq/topology.hpp"

namespace reuseq::oracle {

// ---------------------------------------------------------------------------
// Truth-table SAT oracle (<= 20 variables)

// Enumerates all assignments over max_var+1 variables; variable 0 is the
// constant-true variable of the production solver and is pinned to true.
inline bool truth_table_satisfiable(
    const std::vector<std::vector<sat::Lit>>& clauses, int num_vars) {
  for (uint32_t m = 0; m < (uint32_t{1} << num_vars); ++m) {
    if (!(m & 1u)) continue;  // var 0 must be true
    bool all = true;
    for (const auto& cl : clauses) {
      bool any = false;
      for (sat::Lit l : cl) {
        bool v = (m >> l.var()) & 1u;
        if (l.neg()) v = !v;
        if (v) {
          any = true;
          break;
        }
      }
      if (!any) {
        all = false;
        break;
      }
    }
    if (all) return true;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Brute-force subgraph-embedding enumeration

// Independent of enumerate_embeddings: tries every ordered tuple of distinct
// host vertices via index counting.
inline std::vector<Embedding> all_embeddings_bruteforce(
    const PatternGraph& pat, const CouplingGraph& host) {
  std::vector<Embedding> out;
  int n = pat.num_nodes, h = host.num_qubits;
  if (n > h) return out;
  Embedding emb(n, 0);
  for (;;) {
    bool distinct = true;
    for (int i = 0; i < n && distinct; ++i)
      for (int j = i + 1; j < n; ++j)
        if (emb[i] == emb[j]) {
          distinct = false;
          break;
        }
    if (distinct && embedding_valid(pat, host, emb)) out.push_back(emb);
    int i = n - 1;
    while (i >= 0 && emb[i] == h - 1) emb[i--] = 0;
    if (i < 0) break;
    ++emb[i];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Exhaustive search over mapping states
//
// Mirrors the constraint model's semantics exactly, without any horizon:
//  - a state assigns each logical qubit a physical position, or marks it
//    not-yet-born / retired;
//  - ops execute in any DAG-compatible order; two-qubit ops need adjacency;
//  - a swap exchanges two *occupied* physical qubits and costs 1;
//  - with reuse, a measurement that is the final op on its logical qubit may
//    retire that qubit and immediately hand its physical qubit to a
//    not-yet-born logical qubit (reset + reuse), or just retire it.

struct MappingSearchResult {
  bool feasible = false;
  int min_swaps = -1;   // minimum swap insertions over all executions
  int min_qubits = -1;  // minimum |physical qubits ever used| (reuse only)
};

namespace detail {

constexpr int kUnborn = -2;
constexpr int kDead = -3;

struct SearchState {
  std::vector<int> pos;  // logical -> phys / kUnborn / kDead
  uint32_t done = 0;     // executed op mask
  uint32_t used = 0;     // physical qubits ever occupied

  bool operator<(const SearchState& o) const {
    if (done != o.done) return done < o.done;
    if (used != o.used) return used < o.used;
    return pos < o.pos;
  }
};

}  // namespace detail

// Exhaustive 0/1-cost BFS; minimizes swap count, and over all minimum-swap
// (or any-cost, for qubit minimization) executions tracks the used-qubit
// footprint. `reuse` toggles the retire/rebirth transitions.
inline MappingSearchResult search_mapping_states(const Circuit& c,
                                                 const CouplingGraph& g,
                                                 bool reuse) {
  using detail::SearchState;
  const int Q = c.num_qubits, P = g.num_qubits;
  std::vector<int> real_ops;
  for (std::size_t i = 0; i < c.ops.size(); ++i)
    if (c.ops[i].kind != OpKind::Barrier)
      real_ops.push_back(static_cast<int>(i));
  const int n_ops = static_cast<int>(real_ops.size());
  if (n_ops > 30)
    throw std::runtime_error("mapping-state oracle: too many ops");

  // DAG predecessors by op position (same-qubit / same-clbit ordering)
  std::vector<uint32_t> preds(n_ops, 0);
  for (int a = 0; a < n_ops; ++a)
    for (int b = a + 1; b < n_ops; ++b) {
      const Op &x = c.ops[real_ops[a]], &y = c.ops[real_ops[b]];
      bool dep = x.q0 == y.q0 || (y.q1 >= 0 && x.q0 == y.q1) ||
                 (x.q1 >= 0 && (x.q1 == y.q0 || (y.q1 >= 0 && x.q1 == y.q1)));
      if (x.kind == OpKind::Measure && y.kind == OpKind::Measure &&
          x.cbit == y.cbit)
        dep = true;
      if (dep) preds[b] |= uint32_t{1} << a;
    }

  // a measurement is reset-eligible iff it is the final op on its qubit
  std::vector<int> last_op_on_qubit(Q, -1);
  for (int a = 0; a < n_ops; ++a) {
    const Op& op = c.ops[real_ops[a]];
    last_op_on_qubit[op.q0] = a;
    if (op.q1 >= 0) last_op_on_qubit[op.q1] = a;
  }
  auto retire_eligible = [&](int a) {
    const Op& op = c.ops[real_ops[a]];
    return reuse && op.kind == OpKind::Measure && last_op_on_qubit[op.q0] == a;
  };

  const uint32_t all_done = n_ops == 32 ? ~uint32_t{0}
                                        : (uint32_t{1} << n_ops) - 1;

  // 0/1 BFS on (state -> min swaps); dist keyed including the used set so
  // qubit minimization stays exact.
  std::map<SearchState, int> dist;
  std::deque<std::pair<SearchState, int>> dq;
  auto push = [&](const SearchState& s, int d, bool front) {
    auto it = dist.find(s);
    if (it != dist.end() && it->second <= d) return;
    dist[s] = d;
    if (front)
      dq.emplace_front(s, d);
    else
      dq.emplace_back(s, d);
  };

  // initial placements: every injective map of a subset containing, with
  // reuse, any choice of initially-born qubits (the rest are born by reuse);
  // without reuse, all qubits are born at once.
  {
    SearchState s;
    s.pos.assign(Q, reuse ? detail::kUnborn : -1);
    // enumerate injective placements recursively
    auto rec = [&](auto&& self, int q) -> void {
      if (q == Q) {
        bool any = false;
        for (int v : s.pos)
          if (v >= 0) any = true;
        if (!any && Q > 0) return;  // someone must start born
        push(s, 0, true);
        return;
      }
      if (reuse) {
        s.pos[q] = detail::kUnborn;
        self(self, q + 1);
      }
      for (int p = 0; p < P; ++p) {
        bool taken = false;
        for (int r = 0; r < q; ++r)
          if (s.pos[r] == p) taken = true;
        if (taken) continue;
        s.pos[q] = p;
        uint32_t save = s.used;
        s.used |= uint32_t{1} << p;
        self(self, q + 1);
        s.used = save;
        s.pos[q] = reuse ? detail::kUnborn : -1;
      }
    };
    if (Q <= P || reuse) rec(rec, 0);
  }

  MappingSearchResult res;
  while (!dq.empty()) {
    auto [s, d] = dq.front();
    dq.pop_front();
    auto it = dist.find(s);
    if (it == dist.end() || it->second < d) continue;
    if (s.done == all_done) {
      if (!res.feasible || d < res.min_swaps) {
        res.feasible = true;
        res.min_swaps = d;
      }
      int q_used = __builtin_popcount(s.used);
      if (res.min_qubits < 0 || q_used < res.min_qubits) res.min_qubits = q_used;
      continue;  // keep draining: min_qubits ranges over all executions
    }

    // execute any ready op
    for (int a = 0; a < n_ops; ++a) {
      if (s.done & (uint32_t{1} << a)) continue;
      if ((s.done & preds[a]) != preds[a]) continue;
      const Op& op = c.ops[real_ops[a]];
      if (s.pos[op.q0] < 0) continue;
      if (op.q1 >= 0) {
        if (s.pos[op.q1] < 0) continue;
        if (!g.has_edge(s.pos[op.q0], s.pos[op.q1])) continue;
      }
      SearchState ns = s;
      ns.done |= uint32_t{1} << a;
      push(ns, d, true);
      if (retire_eligible(a)) {
        int p = s.pos[op.q0];
        SearchState rs = ns;
        rs.pos[op.q0] = detail::kDead;
        push(rs, d, true);  // retire without reuse
        for (int q2 = 0; q2 < Q; ++q2)
          if (rs.pos[q2] == detail::kUnborn) {
            SearchState bs = rs;
            bs.pos[q2] = p;  // reset + immediate reuse on the same qubit
            push(bs, d, true);
          }
      }
    }
    // swap two occupied physical qubits
    for (auto [i, j] : g.edges) {
      int qi = -1, qj = -1;
      for (int q2 = 0; q2 < Q; ++q2) {
        if (s.pos[q2] == i) qi = q2;
        if (s.pos[q2] == j) qj = q2;
      }
      if (qi < 0 || qj < 0) continue;
      SearchState ns = s;
      std::swap(ns.pos[qi], ns.pos[qj]);
      push(ns, d + 1, false);
    }
  }
  return res;
}

}  // namespace reuseq::oracle
