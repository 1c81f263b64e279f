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

#include <fstream>
#include <sstream>

#include "reuseq/circuit.hpp"

using namespace reuseq;

TEST_CASE("qasm parser handles a minimal program") {
  Circuit c = parse_qasm(
      "qreg q[2]; creg c[2]; h q[0]; cx q[0],q[1]; measure q[0]->c[0];");
  REQUIRE(c.num_qubits == 2);
  REQUIRE(c.num_clbits == 2);
  REQUIRE(c.ops.size() == 3);
  CHECK(c.ops[0].kind == OpKind::H);
  CHECK(c.ops[1].kind == OpKind::CX);
  CHECK(c.ops[2].kind == OpKind::Measure);
  CHECK(c.ops[2].cbit == 0);
}

TEST_CASE("qasm parser reports unsupported gates") {
  CHECK_THROWS_AS(parse_qasm("qreg q[2]; cz q[0],q[1];"), ParseError);
}

TEST_CASE("qasm parser rejects re-measured classical bits") {
  CHECK_THROWS(parse_qasm(
      "qreg q[2]; creg c[1]; measure q[0]->c[0]; measure q[1]->c[0];"));
}

TEST_CASE("qasm round trip is the identity") {
  Circuit c = generate_bv(5, "1011");
  Circuit back = parse_qasm(to_qasm(c));
  CHECK(back == c);

  Circuit d;
  d.num_qubits = 2;
  d.num_clbits = 1;
  d.append({OpKind::RZ, 0, -1, 0.12345678901234});
  d.append({OpKind::Sdg, 1});
  d.append({OpKind::Swap, 0, 1});
  d.append({OpKind::Reset, 1});
  d.append({OpKind::Measure, 0, -1, 0, 0});
  CHECK(parse_qasm(to_qasm(d)) == d);
}

TEST_CASE("xor5_254 fixture has six qubits") {
  std::ifstream f(std::string(FIXTURE_DIR) + "/xor5_254.qasm");
  REQUIRE(f.good());
  std::stringstream ss;
  ss << f.rdbuf();
  Circuit c = parse_qasm(ss.str());
  CHECK(c.num_qubits == 6);
  CHECK(c.count(OpKind::CX) == 5);
  CHECK(c.count(OpKind::Measure) == 6);
}

TEST_CASE("bv generator structure") {
  Circuit c = generate_bv(7, "111111");
  CHECK(c.num_qubits == 7);
  CHECK(c.num_clbits == 6);
  CHECK(c.count(OpKind::CX) == 6);
  CHECK(c.count(OpKind::Measure) == 6);
  CHECK(generate_bv(7, "101010").count(OpKind::CX) == 3);
  CHECK_THROWS(generate_bv(1, ""));
  CHECK_THROWS(generate_bv(4, "11"));
}

TEST_CASE("h-ladder generator uses nearest neighbours only") {
  Circuit c = generate_h_ladder(5);
  InteractionGraph ig = interaction_graph(c);
  for (auto [a, b] : ig.edges) CHECK(b - a == 1);
  CHECK(c.count(OpKind::CX) == 4);
}

TEST_CASE("dependency dag is acyclic and respects source order") {
  Circuit c = generate_bv(4, "111");
  DependencyDag dag = build_dag(c);
  for (auto [a, b] : dag.edges) CHECK(a < b);
  // same-qubit ordering present: every CX depends on the H before it
  Circuit d = parse_qasm("qreg q[2]; creg c[1]; h q[0]; cx q[0],q[1];");
  DependencyDag dd = build_dag(d);
  REQUIRE(dd.edges.size() == 1);
  CHECK(dd.edges[0] == std::pair<int, int>{0, 1});
}

TEST_CASE("measure then reset produces a dag edge") {
  Circuit c =
      parse_qasm("qreg q[1]; creg c[1]; measure q[0]->c[0]; reset q[0];");
  DependencyDag dag = build_dag(c);
  REQUIRE(dag.edges.size() == 1);
  CHECK(dag.edges[0] == std::pair<int, int>{0, 1});
}

TEST_CASE("validate rejects malformed ops") {
  Circuit c;
  c.num_qubits = 2;
  CHECK_THROWS(c.append({OpKind::CX, 0, 0}));
  CHECK_THROWS(c.append({OpKind::H, 5}));
  CHECK_THROWS(c.append({OpKind::Measure, 0, -1, 0, 0}));  // no clbits
}

TEST_CASE("angle arithmetic in qasm") {
  Circuit c = parse_qasm("qreg q[1]; rz(pi/2) q[0]; rz(-pi) q[0];");
  REQUIRE(c.ops.size() == 2);
  CHECK(c.ops[0].angle == Catch::Approx(M_PI / 2));
  CHECK(c.ops[1].angle == Catch::Approx(-M_PI));
}
