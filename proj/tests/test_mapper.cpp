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

#include <random>

#include "oracles.hpp"
#include "reuseq/mapper.hpp"
#include "reuseq/simulator.hpp"

using namespace reuseq;

namespace {

// Run at the serialization-cap horizon so the optimum is horizon-free and
// comparable to the exhaustive mapping-state search.
OptimizeResult solve_uncapped(const Circuit& c, const CouplingGraph& g,
                              Objective obj, ReuseMode mode) {
  OptimizeOptions opt;
  opt.horizon_override = serialization_cap(c);
  opt.budget_seconds = 120;
  return optimize_circuit(c, g, obj, mode, opt);
}

void check_sound(const Circuit& c, const CouplingGraph& g,
                 const OptimizeResult& res) {
  auto rep = check_valid(res.mapped, g, c);
  for (const auto& v : rep.violations) INFO(v);
  REQUIRE(rep.ok());
  auto eq = equivalent(c, res.mapped);
  CHECK(eq.fidelity >= 1.0 - 1e-9);
}

Circuit tiny_random_circuit(int qubits, int gates, uint64_t seed) {
  std::mt19937_64 rng(seed);
  Circuit c;
  c.num_qubits = qubits;
  c.num_clbits = qubits;
  for (int i = 0; i < gates; ++i) {
    if (rng() % 3 == 0) {
      c.append({OpKind::H, static_cast<int>(rng() % qubits)});
    } else {
      int a = static_cast<int>(rng() % qubits);
      int b = static_cast<int>(rng() % qubits);
      if (a == b) b = (b + 1) % qubits;
      c.append({OpKind::CX, a, b});
    }
  }
  for (int q = 0; q < qubits; ++q)
    c.append({OpKind::Measure, q, -1, 0, q});
  return c;
}

}  // namespace

TEST_CASE("swap minimization matches exhaustive search, reuse off") {
  CouplingGraph line3 = make_line(3), line4 = make_line(4);
  CouplingGraph tee5(5, {{0, 1}, {1, 2}, {1, 3}, {3, 4}}, "tee5");
  struct Case {
    Circuit c;
    const CouplingGraph* g;
  };
  std::vector<Case> cases;
  cases.push_back({generate_bv(3, "11"), &line3});
  cases.push_back({generate_bv(4, "111"), &line4});
  cases.push_back({generate_bv(4, "111"), &tee5});
  cases.push_back({generate_h_ladder(3), &line3});
  for (uint64_t seed : {11, 12, 13})
    cases.push_back({tiny_random_circuit(3, 5, seed), &line3});
  for (const auto& cs : cases) {
    auto oracle_res = oracle::search_mapping_states(cs.c, *cs.g, false);
    auto res = solve_uncapped(cs.c, *cs.g, Objective::Swaps, ReuseMode::off());
    REQUIRE(res.feasible == oracle_res.feasible);
    REQUIRE(res.proven_optimal);
    CHECK(res.objective_value == oracle_res.min_swaps);
    check_sound(cs.c, *cs.g, res);
  }
}

TEST_CASE("qubit minimization matches exhaustive search, reuse on") {
  CouplingGraph line3 = make_line(3), line4 = make_line(4);
  struct Case {
    Circuit c;
    const CouplingGraph* g;
  };
  std::vector<Case> cases;
  cases.push_back({generate_bv(3, "11"), &line3});
  cases.push_back({generate_bv(4, "111"), &line4});
  cases.push_back({generate_h_ladder(3), &line3});
  for (const auto& cs : cases) {
    auto oracle_res = oracle::search_mapping_states(cs.c, *cs.g, true);
    auto res = solve_uncapped(cs.c, *cs.g, Objective::Qubits, ReuseMode::on());
    REQUIRE(res.feasible);
    REQUIRE(res.proven_optimal);
    CHECK(res.objective_value == oracle_res.min_qubits);
    check_sound(cs.c, *cs.g, res);
  }
}

TEST_CASE("reuse squeezes bv onto two qubits") {
  Circuit c = generate_bv(4, "111");
  auto res = optimize_circuit(c, make_line(4), Objective::Qubits,
                              ReuseMode::on(), {.budget_seconds = 120});
  REQUIRE(res.feasible);
  REQUIRE(res.proven_optimal);
  CHECK(res.objective_value == 2);
  CHECK(res.mapped.used_qubits == 2);
  check_sound(c, make_line(4), res);
}

TEST_CASE("exactly-zero reuse equals reuse off") {
  Circuit c = generate_bv(4, "111");
  CouplingGraph g = make_line(4);
  auto off = solve_uncapped(c, g, Objective::Swaps, ReuseMode::off());
  auto ex0 = solve_uncapped(c, g, Objective::Swaps, ReuseMode::exactly(0));
  REQUIRE(off.proven_optimal);
  REQUIRE(ex0.proven_optimal);
  CHECK(off.objective_value == ex0.objective_value);
}

TEST_CASE("swap count never increases with more allowed reuse") {
  Circuit c = generate_bv(4, "111");
  CouplingGraph g = make_line(4);
  int prev = 1 << 20;
  for (int k = 0; k <= 3; ++k) {
    auto res = solve_uncapped(c, g, Objective::Swaps, ReuseMode::exactly(k));
    REQUIRE(res.feasible);
    REQUIRE(res.proven_optimal);
    CHECK(res.objective_value <= prev);
    prev = res.objective_value;
    check_sound(c, g, res);
  }
  // full freedom is at least as good as any fixed count
  auto on = solve_uncapped(c, g, Objective::Swaps, ReuseMode::on());
  REQUIRE(on.proven_optimal);
  CHECK(on.objective_value <= prev);
}

TEST_CASE("secondary objective picks least reuse at the swap optimum") {
  Circuit c = generate_bv(4, "111");
  CouplingGraph g = make_heavy_hex_27();
  OptimizeOptions opt;
  opt.budget_seconds = 120;
  opt.secondary = Objective::Resets;
  auto res = optimize_circuit(c, g, Objective::Swaps, ReuseMode::on(), opt);
  REQUIRE(res.feasible);
  REQUIRE(res.proven_optimal);
  // K(1,3) embeds directly into heavy hex: no swaps needed and therefore
  // no reset should be spent either.
  CHECK(res.objective_value == 0);
  REQUIRE(res.secondary_value.has_value());
  CHECK(*res.secondary_value == 0);
  CHECK(res.mapped.used_qubits == 4);
  check_sound(c, g, res);
}

TEST_CASE("at-most-qubits constrains the footprint") {
  Circuit c = generate_bv(4, "111");
  CouplingGraph g = make_line(4);
  auto res = optimize_circuit(c, g, Objective::Swaps,
                              ReuseMode::at_most_qubits(2),
                              {.budget_seconds = 120});
  REQUIRE(res.feasible);
  CHECK(res.mapped.used_qubits <= 2);
  check_sound(c, g, res);
}

TEST_CASE("reuse admits more logical than physical qubits") {
  Circuit c = generate_bv(5, "1111");
  CouplingGraph g = make_line(3);
  auto off = optimize_circuit(c, g, Objective::Swaps, ReuseMode::off(),
                              {.budget_seconds = 30});
  CHECK_FALSE(off.feasible);
  auto on = optimize_circuit(c, g, Objective::Swaps, ReuseMode::on(),
                             {.budget_seconds = 120});
  REQUIRE(on.feasible);
  check_sound(c, g, on);
}

TEST_CASE("depth objective at the routed horizon") {
  Circuit c = generate_h_ladder(3);
  auto res = optimize_circuit(c, make_line(3), Objective::Depth,
                              ReuseMode::off(), {.budget_seconds = 60});
  REQUIRE(res.feasible);
  REQUIRE(res.proven_optimal);
  // critical path runs through q1: H, CX(0,1), CX(1,2), H, measure
  CHECK(res.objective_value == 5);
  check_sound(c, make_line(3), res);
}

TEST_CASE("mapped circuit json round trip") {
  Circuit c = generate_bv(4, "111");
  CouplingGraph g = make_line(4);
  auto res = solve_uncapped(c, g, Objective::Qubits, ReuseMode::on());
  REQUIRE(res.feasible);
  MappedCircuit back = mapped_from_json(mapped_to_json(res.mapped));
  CHECK(mapped_to_json(back) == mapped_to_json(res.mapped));
  auto rep = check_valid(back, g, c);
  CHECK(rep.ok());
}

TEST_CASE("optimization is deterministic per seed") {
  Circuit c = generate_bv(4, "111");
  CouplingGraph g = make_line(4);
  OptimizeOptions opt;
  opt.budget_seconds = 120;
  opt.seed = 5;
  auto a = optimize_circuit(c, g, Objective::Swaps, ReuseMode::on(), opt);
  auto b = optimize_circuit(c, g, Objective::Swaps, ReuseMode::on(), opt);
  REQUIRE(a.feasible);
  CHECK(mapped_to_json(a.mapped) == mapped_to_json(b.mapped));
}

TEST_CASE("validity checker flags broken schedules") {
  Circuit c = generate_bv(3, "11");
  CouplingGraph g = make_line(3);
  auto res = solve_uncapped(c, g, Objective::Swaps, ReuseMode::off());
  REQUIRE(res.feasible);
  MappedCircuit broken = res.mapped;
  REQUIRE_FALSE(broken.steps.empty());
  // drop one step entirely: some original op is now missing
  broken.steps.pop_back();
  CHECK_FALSE(check_valid(broken, g, c).ok());
}
