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

#include <algorithm>
#include <deque>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace reuseq {

struct TopologyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Undirected physical-qubit adjacency. Edges are stored normalized (a < b),
// sorted and deduplicated.
struct CouplingGraph {
  int num_qubits = 0;
  std::vector<std::pair<int, int>> edges;
  std::string name;

  CouplingGraph() = default;
  CouplingGraph(int n, std::vector<std::pair<int, int>> e, std::string nm = "")
      : num_qubits(n), name(std::move(nm)) {
    for (auto [a, b] : e) {
      if (a == b) throw TopologyError("self-loop in coupling graph");
      if (a < 0 || b < 0 || a >= n || b >= n)
        throw TopologyError("edge endpoint out of range");
      if (a > b) std::swap(a, b);
      edges.emplace_back(a, b);
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    adj_.assign(n, {});
    for (auto [a, b] : edges) {
      adj_[a].push_back(b);
      adj_[b].push_back(a);
    }
    for (auto& v : adj_) std::sort(v.begin(), v.end());
  }

  bool has_edge(int a, int b) const {
    if (a > b) std::swap(a, b);
    return std::binary_search(edges.begin(), edges.end(), std::pair{a, b});
  }

  const std::vector<int>& neighbours(int p) const { return adj_[p]; }

  int degree(int p) const { return static_cast<int>(adj_[p].size()); }

  bool connected() const {
    if (num_qubits == 0) return true;
    auto d = bfs_distances(0);
    for (int x : d)
      if (x < 0) return false;
    return true;
  }

  // Hop counts from src; -1 for unreachable vertices.
  std::vector<int> bfs_distances(int src) const {
    std::vector<int> dist(num_qubits, -1);
    std::deque<int> bfs{src};
    dist[src] = 0;
    while (!bfs.empty()) {
      int v = bfs.front();
      bfs.pop_front();
      for (int w : adj_[v])
        if (dist[w] < 0) {
          dist[w] = dist[v] + 1;
          bfs.push_back(w);
        }
    }
    return dist;
  }

 private:
  std::vector<std::vector<int>> adj_;
};

// Shortest-path hop count; nullopt when disconnected.
inline std::optional<int> distance(const CouplingGraph& g, int a, int b) {
  if (a < 0 || b < 0 || a >= g.num_qubits || b >= g.num_qubits)
    throw TopologyError("distance: vertex out of range");
  int d = g.bfs_distances(a)[b];
  if (d < 0) return std::nullopt;
  return d;
}

inline CouplingGraph make_line(int k) {
  if (k < 1) throw TopologyError("line: size must be positive");
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i + 1 < k; ++i) e.emplace_back(i, i + 1);
  return CouplingGraph(k, e, "line" + std::to_string(k));
}

inline CouplingGraph make_ring(int k) {
  if (k < 3) throw TopologyError("ring: need at least 3 vertices");
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i < k; ++i) e.emplace_back(i, (i + 1) % k);
  return CouplingGraph(k, e, "ring" + std::to_string(k));
}

inline CouplingGraph make_grid(int rows, int cols) {
  if (rows < 1 || cols < 1) throw TopologyError("grid: sizes must be positive");
  std::vector<std::pair<int, int>> e;
  auto id = [&](int r, int c) { return r * cols + c; };
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      if (c + 1 < cols) e.emplace_back(id(r, c), id(r, c + 1));
      if (r + 1 < rows) e.emplace_back(id(r, c), id(r + 1, c));
    }
  return CouplingGraph(rows * cols, e,
                       "grid" + std::to_string(rows) + "x" + std::to_string(cols));
}

// The 27-qubit heavy-hex layout used as the evaluation host. The edge list
// is pinned; its eight degree-3 vertices are the anchor property.
inline CouplingGraph make_heavy_hex_27() {
  static const std::vector<std::pair<int, int>> e = {
      {0, 1},   {1, 2},   {2, 3},   {3, 5},   {1, 4},   {4, 7},   {5, 8},
      {6, 7},   {7, 10},  {8, 9},   {8, 11},  {10, 12}, {11, 14}, {12, 13},
      {12, 15}, {13, 14}, {14, 16}, {15, 18}, {16, 19}, {17, 18}, {18, 21},
      {19, 20}, {19, 22}, {21, 23}, {22, 25}, {23, 24}, {24, 25}, {25, 26}};
  return CouplingGraph(27, e, "heavy_hex_27");
}

// Parses preset names of the form line<k>, ring<k>, grid<r>x<c>,
// heavy_hex_27.
inline std::optional<CouplingGraph> preset(const std::string& name) {
  auto num_after = [&](std::size_t off) -> std::optional<int> {
    if (off >= name.size()) return std::nullopt;
    try {
      std::size_t used = 0;
      int v = std::stoi(name.substr(off), &used);
      if (off + used != name.size()) return std::nullopt;
      return v;
    } catch (...) {
      return std::nullopt;
    }
  };
  if (name == "heavy_hex_27") return make_heavy_hex_27();
  if (name.rfind("line", 0) == 0) {
    if (auto k = num_after(4)) return make_line(*k);
  }
  if (name.rfind("ring", 0) == 0) {
    if (auto k = num_after(4)) return make_ring(*k);
  }
  if (name.rfind("grid", 0) == 0) {
    auto xpos = name.find('x');
    if (xpos != std::string::npos && xpos > 4) {
      try {
        int r = std::stoi(name.substr(4, xpos - 4));
        int c = std::stoi(name.substr(xpos + 1));
        return make_grid(r, c);
      } catch (...) {
      }
    }
  }
  return std::nullopt;
}

inline nlohmann::json coupling_to_json(const CouplingGraph& g) {
  nlohmann::json j;
  j["num_qubits"] = g.num_qubits;
  auto arr = nlohmann::json::array();
  for (auto [a, b] : g.edges) arr.push_back({a, b});
  j["edges"] = arr;
  return j;
}

inline CouplingGraph coupling_from_json(const nlohmann::json& j) {
  std::vector<std::pair<int, int>> e;
  for (const auto& it : j.at("edges"))
    e.emplace_back(it.at(0).get<int>(), it.at(1).get<int>());
  return CouplingGraph(j.at("num_qubits").get<int>(), e);
}

// ---------------------------------------------------------------------------
// Subgraph-isomorphism enumeration

// A small pattern graph; nodes 0..num_nodes-1.
struct PatternGraph {
  int num_nodes = 0;
  std::vector<std::pair<int, int>> edges;
};

// An injective, edge-preserving map pattern node -> physical qubit.
using Embedding = std::vector<int>;

inline bool embedding_valid(const PatternGraph& pat, const CouplingGraph& host,
                            const Embedding& emb) {
  if (static_cast<int>(emb.size()) != pat.num_nodes) return false;
  std::set<int> seen;
  for (int p : emb) {
    if (p < 0 || p >= host.num_qubits) return false;
    if (!seen.insert(p).second) return false;
  }
  for (auto [a, b] : pat.edges)
    if (!host.has_edge(emb[a], emb[b])) return false;
  return true;
}

// All labeled non-induced embeddings, in lexicographic order of the mapped
// tuple. Backtracking over pattern nodes in index order.
inline std::vector<Embedding> enumerate_embeddings(const PatternGraph& pat,
                                                   const CouplingGraph& host) {
  std::vector<Embedding> out;
  if (pat.num_nodes > host.num_qubits) return out;
  std::vector<std::vector<int>> earlier(pat.num_nodes);
  for (auto [a, b] : pat.edges) {
    if (a == b || a < 0 || b < 0 || a >= pat.num_nodes || b >= pat.num_nodes)
      throw TopologyError("bad pattern edge");
    if (a < b)
      earlier[b].push_back(a);
    else
      earlier[a].push_back(b);
  }
  Embedding emb(pat.num_nodes, -1);
  std::vector<char> used(host.num_qubits, 0);
  auto rec = [&](auto&& self, int node) -> void {
    if (node == pat.num_nodes) {
      out.push_back(emb);
      return;
    }
    for (int p = 0; p < host.num_qubits; ++p) {
      if (used[p]) continue;
      bool ok = true;
      for (int prev : earlier[node])
        if (!host.has_edge(emb[prev], p)) {
          ok = false;
          break;
        }
      if (!ok) continue;
      emb[node] = p;
      used[p] = 1;
      self(self, node + 1);
      used[p] = 0;
      emb[node] = -1;
    }
  };
  rec(rec, 0);
  return out;
}

}  // namespace reuseq
