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

// Heuristic swap-insertion baseline in the SABRE style: interaction-aware
// initial placement, then front-layer routing with distance scoring. It is
// not meant to compete with published routers; its depth seeds the exact
// model's step horizon, so a parallel (qiskit-quality) schedule matters.
// Swaps are only applied between two occupied physical qubits, matching the
// exact model's semantics.

#include <algorithm>
#include <deque>
#include <limits>
#include <stdexcept>
#include <vector>

#include "reuseq/circuit.hpp"
#include "reuseq/topology.hpp"

namespace reuseq {

struct RouterError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RoutedCircuit {
  Circuit circuit;               // over physical qubits, SWAPs inserted
  std::vector<int> initial_map;  // logical -> physical
  int swap_count = 0;
  int depth = 0;  // ASAP time steps, one per op, barriers free
};

namespace detail {

// ASAP depth of a physical circuit: every non-barrier op takes one step.
inline int asap_depth(const Circuit& c) {
  std::vector<int> ready(c.num_qubits, 0);
  int depth = 0;
  for (const Op& op : c.ops) {
    if (op.kind == OpKind::Barrier) {
      int m = ready[op.q0];
      if (op.q1 >= 0) m = std::max(m, ready[op.q1]);
      ready[op.q0] = m;
      if (op.q1 >= 0) ready[op.q1] = m;
      continue;
    }
    int start = ready[op.q0];
    if (op.q1 >= 0) start = std::max(start, ready[op.q1]);
    ready[op.q0] = start + 1;
    if (op.q1 >= 0) ready[op.q1] = start + 1;
    depth = std::max(depth, start + 1);
  }
  return depth;
}

// Greedy placement: logical qubits in interaction-degree order, each onto
// the free physical qubit minimizing distance to already-placed partners.
// Candidates are restricted to the boundary of the occupied set so that the
// occupied region stays connected.
inline std::vector<int> initial_placement(const Circuit& c,
                                          const CouplingGraph& g) {
  InteractionGraph ig = interaction_graph(c);
  std::vector<std::vector<int>> partners(c.num_qubits);
  for (auto [a, b] : ig.edges) {
    partners[a].push_back(b);
    partners[b].push_back(a);
  }
  std::vector<int> order(c.num_qubits);
  for (int q = 0; q < c.num_qubits; ++q) order[q] = q;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return partners[a].size() > partners[b].size();
  });

  std::vector<std::vector<int>> dist(g.num_qubits);
  for (int p = 0; p < g.num_qubits; ++p) dist[p] = g.bfs_distances(p);

  // ties prefer well-connected host vertices so dead ends are kept free
  auto host_weight = [&](int p) {
    long w = 0;
    for (int v : g.neighbours(p)) w += g.degree(v);
    return w;
  };

  std::vector<int> phys_of(c.num_qubits, -1);
  std::vector<char> taken(g.num_qubits, 0);
  for (std::size_t i = 0; i < order.size(); ++i) {
    int q = order[i];
    int best = -1;
    std::pair<long, long> best_score{std::numeric_limits<long>::max(), 0};
    for (int p = 0; p < g.num_qubits; ++p) {
      if (taken[p]) continue;
      std::pair<long, long> score{0, -(g.degree(p) * 1000 + host_weight(p))};
      if (i > 0) {
        // boundary restriction: adjacent to the occupied set
        bool boundary = false;
        for (int w : g.neighbours(p))
          if (taken[w]) {
            boundary = true;
            break;
          }
        if (!boundary) continue;
        bool any_partner = false;
        for (int r : partners[q])
          if (phys_of[r] >= 0) {
            score.first += dist[p][phys_of[r]];
            any_partner = true;
          }
        if (!any_partner)
          for (int r = 0; r < c.num_qubits; ++r)
            if (phys_of[r] >= 0) score.first += dist[p][phys_of[r]];
      }
      if (score < best_score) {
        best_score = score;
        best = p;
      }
    }
    if (best < 0) throw RouterError("placement failed (disconnected host?)");
    phys_of[q] = best;
    taken[best] = 1;
  }
  return phys_of;
}

// Chain placement: logical qubits in BFS order over the interaction graph
// (starting from a minimum-degree qubit), assigned to a BFS order of the
// host from a minimum-degree vertex. Maps path-shaped circuits onto
// path-shaped hosts without any swaps; a portfolio alternative to the
// degree-greedy placement above.
inline std::vector<int> chain_placement(const Circuit& c,
                                        const CouplingGraph& g) {
  InteractionGraph ig = interaction_graph(c);
  std::vector<std::vector<int>> nbr(c.num_qubits);
  for (auto [a, b] : ig.edges) {
    nbr[a].push_back(b);
    nbr[b].push_back(a);
  }
  auto bfs_order = [](int n, auto degree, auto neighbours) {
    std::vector<int> order;
    std::vector<char> seen(n, 0);
    for (;;) {
      int start = -1;
      for (int v = 0; v < n; ++v)
        if (!seen[v] && (start < 0 || degree(v) < degree(start))) start = v;
      if (start < 0) break;
      std::deque<int> dq{start};
      seen[start] = 1;
      while (!dq.empty()) {
        int v = dq.front();
        dq.pop_front();
        order.push_back(v);
        for (int w : neighbours(v))
          if (!seen[w]) {
            seen[w] = 1;
            dq.push_back(w);
          }
      }
    }
    return order;
  };
  std::vector<int> lorder = bfs_order(
      c.num_qubits, [&](int v) { return nbr[v].size(); },
      [&](int v) -> const std::vector<int>& { return nbr[v]; });
  std::vector<int> horder = bfs_order(
      g.num_qubits, [&](int v) { return g.degree(v); },
      [&](int v) -> const std::vector<int>& { return g.neighbours(v); });
  std::vector<int> phys_of(c.num_qubits, -1);
  for (std::size_t i = 0; i < lorder.size(); ++i) phys_of[lorder[i]] = horder[i];
  return phys_of;
}

// The routing pass proper, for a fixed initial placement.
inline RoutedCircuit route_with_map(const Circuit& c, const CouplingGraph& g,
                                    std::vector<int> phys_of) {
  std::vector<int> logical_at(g.num_qubits, -1);
  for (int q = 0; q < c.num_qubits; ++q) logical_at[phys_of[q]] = q;

  std::vector<std::vector<int>> dist(g.num_qubits);
  for (int p = 0; p < g.num_qubits; ++p) dist[p] = g.bfs_distances(p);

  DependencyDag dag = build_dag(c);
  std::vector<std::vector<int>> succs(dag.num_nodes);
  std::vector<int> pending(dag.num_nodes, 0);
  for (auto [a, b] : dag.edges) {
    succs[a].push_back(b);
    ++pending[b];
  }
  std::vector<int> ready;
  for (int i = 0; i < dag.num_nodes; ++i)
    if (pending[i] == 0) ready.push_back(i);

  RoutedCircuit out;
  out.circuit.num_qubits = g.num_qubits;
  out.circuit.num_clbits = c.num_clbits;
  out.circuit.name = c.name.empty() ? "routed" : c.name + "_routed";
  out.initial_map = phys_of;

  auto finish = [&](int idx) {
    for (int s : succs[idx])
      if (--pending[s] == 0) ready.push_back(s);
  };
  // ASAP availability of every physical qubit in the emitted prefix; swap
  // ties are broken toward the earliest-available edge
  std::vector<int> busy(g.num_qubits, 0);
  auto emit = [&](const Op& op) {
    int s = busy[op.q0];
    if (op.q1 >= 0) s = std::max(s, busy[op.q1]);
    busy[op.q0] = s + 1;
    if (op.q1 >= 0) busy[op.q1] = s + 1;
    out.circuit.ops.push_back(op);
  };
  auto apply_swap = [&](int a, int b) {
    emit(Op{OpKind::Swap, std::min(a, b), std::max(a, b)});
    ++out.swap_count;
    std::swap(logical_at[a], logical_at[b]);
    if (logical_at[a] >= 0) phys_of[logical_at[a]] = a;
    if (logical_at[b] >= 0) phys_of[logical_at[b]] = b;
  };
  // front-layer distance sum plus a half-weight lookahead over the next
  // pending two-qubit gates; keeps ties from walking busy qubits around
  std::vector<char> executed(c.ops.size(), 0);
  constexpr int kLookahead = 20;
  auto front_cost = [&]() {
    long cost = 0;
    std::vector<char> in_front(c.ops.size(), 0);
    for (int idx : ready) {
      const Op& op = c.ops[idx];
      if (is_two_qubit(op.kind)) {
        cost += 2 * dist[phys_of[op.q0]][phys_of[op.q1]];
        in_front[idx] = 1;
      }
    }
    int seen = 0;
    for (std::size_t i = 0; i < c.ops.size() && seen < kLookahead; ++i) {
      if (executed[i] || in_front[i]) continue;
      const Op& op = c.ops[i];
      if (!is_two_qubit(op.kind)) continue;
      cost += dist[phys_of[op.q0]][phys_of[op.q1]];
      ++seen;
    }
    return cost;
  };

  // Single-qubit ops are location-independent, so they are buffered and
  // only materialized when forced (before a two-qubit gate on that qubit,
  // at a barrier, or at the end). This lets swaps start as early as the
  // ASAP schedule allows instead of queueing behind measurement tails.
  std::vector<std::vector<Op>> deferred(c.num_qubits);
  auto flush_deferred = [&](int q) {
    for (Op op : deferred[q]) {
      op.q0 = phys_of[q];
      emit(op);
    }
    deferred[q].clear();
  };

  std::pair<int, int> last_swap{-1, -1};
  int swaps_since_execute = 0;

  while (!ready.empty()) {
    // flush everything executable, in op order
    bool progressed = false;
    std::sort(ready.begin(), ready.end());
    for (std::size_t i = 0; i < ready.size();) {
      int idx = ready[i];
      const Op& op = c.ops[idx];
      if (op.kind == OpKind::Barrier) {
        // scheduling fence only; nothing emitted
        flush_deferred(op.q0);
        if (op.q1 >= 0) flush_deferred(op.q1);
        ready.erase(ready.begin() + i);
        executed[idx] = 1;
        finish(idx);
        progressed = true;
        continue;
      }
      if (is_two_qubit(op.kind) &&
          !g.has_edge(phys_of[op.q0], phys_of[op.q1])) {
        ++i;
        continue;
      }
      if (is_two_qubit(op.kind)) {
        flush_deferred(op.q0);
        flush_deferred(op.q1);
        Op emitted = op;
        emitted.q0 = phys_of[op.q0];
        emitted.q1 = phys_of[op.q1];
        emit(emitted);
      } else {
        deferred[op.q0].push_back(op);
      }
      ready.erase(ready.begin() + i);
      executed[idx] = 1;
      finish(idx);
      progressed = true;
    }
    if (progressed) {
      last_swap = {-1, -1};
      swaps_since_execute = 0;
      continue;
    }
    if (ready.empty()) break;

    // blocked: score candidate swaps on occupied edges touching an operand
    // of a blocked front-layer gate
    std::vector<std::pair<int, int>> candidates;
    for (int idx : ready) {
      const Op& op = c.ops[idx];
      if (!is_two_qubit(op.kind)) continue;
      for (int p : {phys_of[op.q0], phys_of[op.q1]})
        for (int w : g.neighbours(p))
          if (logical_at[w] >= 0) {
            int a = std::min(p, w), b = std::max(p, w);
            candidates.emplace_back(a, b);
          }
    }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()),
                     candidates.end());

    long before = front_cost();
    std::pair<long, int> best_score{std::numeric_limits<long>::max(), 0};
    std::pair<int, int> best{-1, -1};
    for (auto [a, b] : candidates) {
      if (std::pair{a, b} == last_swap) continue;  // no immediate undo
      std::swap(logical_at[a], logical_at[b]);
      if (logical_at[a] >= 0) phys_of[logical_at[a]] = a;
      if (logical_at[b] >= 0) phys_of[logical_at[b]] = b;
      // equal-cost swaps start at the earliest-available endpoint pair
      std::pair<long, int> score{front_cost(), std::max(busy[a], busy[b])};
      std::swap(logical_at[a], logical_at[b]);
      if (logical_at[a] >= 0) phys_of[logical_at[a]] = a;
      if (logical_at[b] >= 0) phys_of[logical_at[b]] = b;
      if (score < best_score) {
        best_score = score;
        best = {a, b};
      }
    }

    bool stuck = best.first < 0 || best_score.first >= before ||
                 swaps_since_execute > 2 * g.num_qubits;
    if (!stuck) {
      apply_swap(best.first, best.second);
      last_swap = best;
      ++swaps_since_execute;
      continue;
    }

    // fallback: walk the oldest blocked gate's control one step along the
    // shortest path through the occupied region
    std::sort(ready.begin(), ready.end());
    int idx = -1;
    for (int r : ready)
      if (is_two_qubit(c.ops[r].kind)) {
        idx = r;
        break;
      }
    if (idx < 0) throw RouterError("router stuck with no two-qubit gate");
    const Op& op = c.ops[idx];
    int src = phys_of[op.q0], dst = phys_of[op.q1];
    std::vector<int> prev(g.num_qubits, -2);
    std::deque<int> bfs{src};
    prev[src] = -1;
    while (!bfs.empty()) {
      int v = bfs.front();
      bfs.pop_front();
      if (v == dst) break;
      for (int w : g.neighbours(v))
        if (prev[w] == -2 && logical_at[w] >= 0) {
          prev[w] = v;
          bfs.push_back(w);
        }
    }
    if (prev[dst] == -2)
      throw RouterError("router stuck (occupied region disconnected)");
    int step = dst;
    while (prev[step] != src) step = prev[step];
    // one hop of q0 toward q1; never scored, so always progresses
    apply_swap(src, step);
    last_swap = {std::min(src, step), std::max(src, step)};
    ++swaps_since_execute;
  }

  for (int q = 0; q < c.num_qubits; ++q) flush_deferred(q);
  out.depth = asap_depth(out.circuit);
  return out;
}

}  // namespace detail

// Deterministic SABRE-style router. The front layer is routed by applying
// the occupied-edge swap that most reduces the summed distance of pending
// two-qubit gates; a shortest-path fallback guarantees progress. Two initial
// placements are tried (degree-greedy and BFS chain) and the better routed
// result is kept, compared by swap count, then depth.
inline RoutedCircuit route_greedy(const Circuit& c, const CouplingGraph& g,
                                  uint64_t seed = 0) {
  (void)seed;  // reserved for portfolio variants; routing is deterministic
  if (c.num_qubits > g.num_qubits)
    throw RouterError("more logical qubits than physical qubits");
  if (!g.connected()) throw RouterError("coupling graph must be connected");
  RoutedCircuit best =
      detail::route_with_map(c, g, detail::initial_placement(c, g));
  RoutedCircuit alt =
      detail::route_with_map(c, g, detail::chain_placement(c, g));
  if (std::pair{alt.swap_count, alt.depth} <
      std::pair{best.swap_count, best.depth})
    best = std::move(alt);
  return best;
}

inline int serialization_cap(const Circuit& c) {
  int num_gates = 0, num_meas = 0;
  for (const Op& op : c.ops) {
    if (op.kind == OpKind::Barrier) continue;
    ++num_gates;
    if (op.kind == OpKind::Measure) ++num_meas;
  }
  return std::max(1, num_gates + num_meas + c.num_qubits);
}

// Initial step horizon for the exact model. Without reuse (and for the
// exact-k trade-off mode) this is the heuristic routed depth; the
// unrestricted reuse modes get one extra step per potential reuse so the
// reset-serialized schedules fit. Everything is capped by the full
// serialization bound |G| + |M| + |Q|.
inline int depth_bound(const Circuit& c, const CouplingGraph& g,
                       bool reuse_slack, uint64_t seed = 0) {
  // routing needs a slot per logical qubit; reuse-only instances fall back
  // to the serialization bound
  if (c.num_qubits > g.num_qubits) return serialization_cap(c);
  RoutedCircuit r = route_greedy(c, g, seed);
  int num_meas = c.count(OpKind::Measure);
  int cap = serialization_cap(c);
  int t = std::max(1, r.depth);
  if (reuse_slack) t += num_meas;
  return std::min(t, cap);
}

}  // namespace reuseq
