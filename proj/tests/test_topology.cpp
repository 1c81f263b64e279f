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

#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "oracles.hpp"
#include "reuseq/topology.hpp"

using namespace reuseq;

TEST_CASE("presets") {
  CHECK(preset("line5")->num_qubits == 5);
  CHECK(preset("ring6")->edges.size() == 6);
  CHECK(preset("grid3x4")->num_qubits == 12);
  CHECK(preset("heavy_hex_27")->num_qubits == 27);
  CHECK_FALSE(preset("nope"));
  CHECK_FALSE(preset("line"));
}

TEST_CASE("heavy hex layout invariants") {
  CouplingGraph g = make_heavy_hex_27();
  CHECK(g.edges.size() == 28);
  CHECK(g.connected());
  int deg3 = 0;
  for (int p = 0; p < g.num_qubits; ++p) {
    CHECK(g.degree(p) <= 3);
    if (g.degree(p) == 3) ++deg3;
  }
  CHECK(deg3 == 8);  // the eight star centers
}

TEST_CASE("distance and connectivity") {
  CouplingGraph g = make_line(5);
  CHECK(*distance(g, 0, 4) == 4);
  CHECK(*distance(g, 2, 2) == 0);
  CouplingGraph split(4, {{0, 1}, {2, 3}});
  CHECK_FALSE(split.connected());
  CHECK_FALSE(distance(split, 0, 3).has_value());
}

TEST_CASE("coupling graph normalizes and validates edges") {
  CouplingGraph g(3, {{2, 1}, {1, 2}, {0, 1}});
  REQUIRE(g.edges.size() == 2);
  CHECK(g.edges[0] == std::pair<int, int>{0, 1});
  CHECK(g.edges[1] == std::pair<int, int>{1, 2});
  CHECK_THROWS_AS(CouplingGraph(2, {{0, 0}}), TopologyError);
  CHECK_THROWS_AS(CouplingGraph(2, {{0, 5}}), TopologyError);
}

TEST_CASE("coupling json round trip") {
  CouplingGraph g = make_heavy_hex_27();
  CouplingGraph back = coupling_from_json(coupling_to_json(g));
  CHECK(back.num_qubits == g.num_qubits);
  CHECK(back.edges == g.edges);
}

TEST_CASE("embedding enumeration matches brute force") {
  std::vector<PatternGraph> patterns = {
      {1, {}},
      {2, {{0, 1}}},
      {3, {{0, 1}, {1, 2}}},
      {3, {{0, 1}, {1, 2}, {0, 2}}},  // triangle
      {4, {{0, 3}, {1, 3}, {2, 3}}},  // K(1,3)
  };
  std::vector<CouplingGraph> hosts = {
      make_line(4), make_ring(5), make_grid(2, 3),
      CouplingGraph(5, {{0, 1}, {1, 2}, {1, 3}, {3, 4}}, "tee5")};
  for (const auto& pat : patterns)
    for (const auto& host : hosts) {
      auto fast = enumerate_embeddings(pat, host);
      auto slow = oracle::all_embeddings_bruteforce(pat, host);
      std::set<Embedding> a(fast.begin(), fast.end());
      std::set<Embedding> b(slow.begin(), slow.end());
      CHECK(a == b);
      CHECK(fast.size() == a.size());  // no duplicates
    }
}

TEST_CASE("embeddings come out in lexicographic order") {
  PatternGraph pat{2, {{0, 1}}};
  auto embs = enumerate_embeddings(pat, make_line(4));
  REQUIRE(embs.size() == 6);
  CHECK(std::is_sorted(embs.begin(), embs.end()));
}

TEST_CASE("triangle does not embed into a tree") {
  PatternGraph tri{3, {{0, 1}, {1, 2}, {0, 2}}};
  CHECK(enumerate_embeddings(tri, make_line(5)).empty());
  CHECK(enumerate_embeddings(tri, make_heavy_hex_27()).empty());
}
