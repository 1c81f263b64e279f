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
#include "reuseq/sat.hpp"

using namespace reuseq;
using sat::Lit;

TEST_CASE("basic sat and unsat") {
  sat::Solver s;
  sat::Var a = s.new_var(), b = s.new_var();
  s.add_clause({sat::pos(a), sat::pos(b)});
  s.add_clause({~sat::pos(a)});
  REQUIRE(s.solve() == sat::Status::Sat);
  CHECK(s.model_value(b));
  CHECK_FALSE(s.model_value(a));
  s.add_clause({~sat::pos(b)});
  CHECK(s.solve() == sat::Status::Unsat);
}

TEST_CASE("assumptions do not pollute the formula") {
  sat::Solver s;
  sat::Var a = s.new_var();
  REQUIRE(s.solve({~sat::pos(a)}, 10) == sat::Status::Sat);
  CHECK_FALSE(s.model_value(a));
  REQUIRE(s.solve({sat::pos(a)}, 10) == sat::Status::Sat);
  CHECK(s.model_value(a));
  s.add_clause({sat::pos(a)});
  CHECK(s.solve({~sat::pos(a)}, 10) == sat::Status::Unsat);
  CHECK(s.solve() == sat::Status::Sat);
}

TEST_CASE("random 3-cnf agrees with the truth table oracle") {
  std::mt19937_64 rng(12345);
  for (int round = 0; round < 200; ++round) {
    int num_vars = 3 + static_cast<int>(rng() % 10);  // excluding constant
    int num_clauses = 2 + static_cast<int>(rng() % (3 * num_vars));
    sat::Solver s;
    std::vector<sat::Var> vars;
    for (int i = 0; i < num_vars; ++i) vars.push_back(s.new_var());
    std::vector<std::vector<Lit>> clauses;
    clauses.push_back({s.true_lit()});  // the solver adds this internally
    for (int ci = 0; ci < num_clauses; ++ci) {
      std::vector<Lit> cl;
      int len = 1 + static_cast<int>(rng() % 3);
      for (int li = 0; li < len; ++li) {
        sat::Var v = vars[rng() % vars.size()];
        cl.push_back(Lit(v, rng() & 1));
      }
      clauses.push_back(cl);
      s.add_clause(cl);
    }
    bool expect = oracle::truth_table_satisfiable(clauses, num_vars + 1);
    sat::Status st = s.solve();
    INFO("round " << round);
    REQUIRE(st == (expect ? sat::Status::Sat : sat::Status::Unsat));
    if (st == sat::Status::Sat) {
      for (const auto& cl : clauses) {
        bool any = false;
        for (Lit l : cl) any = any || s.model_value(l);
        CHECK(any);
      }
    }
  }
}

TEST_CASE("sequential counter tracks popcount bounds") {
  std::mt19937_64 rng(99);
  for (int round = 0; round < 30; ++round) {
    int n = 3 + static_cast<int>(rng() % 8);
    sat::Solver s;
    std::vector<Lit> in;
    for (int i = 0; i < n; ++i) in.push_back(sat::pos(s.new_var()));
    auto card = sat::add_counter(s, in, n, true);
    // force a random subset true/false, check every <=k / >=k assumption
    std::vector<bool> val(n);
    int ones = 0;
    std::vector<Lit> fix;
    for (int i = 0; i < n; ++i) {
      val[i] = rng() & 1;
      ones += val[i];
      fix.push_back(val[i] ? in[i] : ~in[i]);
    }
    for (int k = 0; k < n; ++k) {
      auto with = fix;
      with.push_back(card.leq(k));
      CHECK((s.solve(with, 10) == sat::Status::Sat) == (ones <= k));
    }
    for (int k = 1; k <= n; ++k) {
      auto with = fix;
      with.push_back(card.geq(k));
      CHECK((s.solve(with, 10) == sat::Status::Sat) == (ones >= k));
    }
  }
}

TEST_CASE("exactly-one and at-most-one") {
  for (int n : {2, 3, 7}) {
    sat::Solver s;
    std::vector<Lit> in;
    for (int i = 0; i < n; ++i) in.push_back(sat::pos(s.new_var()));
    sat::add_exactly_one(s, in);
    REQUIRE(s.solve() == sat::Status::Sat);
    // exactly one true in every model reachable under assumptions
    for (int i = 0; i < n; ++i) {
      REQUIRE(s.solve({in[i]}, 10) == sat::Status::Sat);
      int count = 0;
      for (Lit l : in) count += s.model_value(l);
      CHECK(count == 1);
    }
    CHECK(s.solve({in[0], in[1 % n]}, 10) ==
          (n >= 2 ? sat::Status::Unsat : sat::Status::Sat));
  }
}

TEST_CASE("deterministic for a fixed seed") {
  auto run = [](uint64_t seed) {
    sat::Solver s;
    s.set_seed(seed);
    std::vector<Lit> in;
    for (int i = 0; i < 12; ++i) in.push_back(sat::pos(s.new_var()));
    auto card = sat::add_counter(s, in, 12, true);
    s.add_clause({card.geq(5)});
    s.add_clause({card.leq(5)});
    REQUIRE(s.solve() == sat::Status::Sat);
    std::vector<bool> model;
    for (Lit l : in) model.push_back(s.model_value(l));
    return model;
  };
  CHECK(run(7) == run(7));
}
