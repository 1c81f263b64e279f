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

#include <cmath>

#include "reuseq/circuit.hpp"
#include "reuseq/simulator.hpp"

using namespace reuseq;
using Catch::Approx;

TEST_CASE("bell state distribution") {
  Circuit c;
  c.num_qubits = 2;
  c.num_clbits = 2;
  c.append({OpKind::H, 0});
  c.append({OpKind::CX, 0, 1});
  c.append({OpKind::Measure, 0, -1, 0, 0});
  c.append({OpKind::Measure, 1, -1, 0, 1});
  auto d = exact_distribution(c);
  REQUIRE(d.size() == 2);
  CHECK(d.at("00") == Approx(0.5).margin(1e-12));
  CHECK(d.at("11") == Approx(0.5).margin(1e-12));
}

TEST_CASE("bv circuits are deterministic and recover the secret") {
  for (const std::string& secret : {"101", "111", "0110"}) {
    Circuit c = generate_bv(static_cast<int>(secret.size()) + 1, secret);
    auto d = exact_distribution(c);
    // clbit i records data qubit i; the expected string is the secret
    double p = 0;
    for (const auto& [k, v] : d)
      if (k.substr(0, secret.size()) == secret) p += v;
    CHECK(p == Approx(1.0).margin(1e-9));
  }
}

TEST_CASE("mid-circuit measurement and reset reuse the qubit cleanly") {
  // measure q0 into c0, reset it, flip it, measure into c1
  Circuit c;
  c.num_qubits = 1;
  c.num_clbits = 2;
  c.append({OpKind::H, 0});
  c.append({OpKind::Measure, 0, -1, 0, 0});
  c.append({OpKind::Reset, 0});
  c.append({OpKind::X, 0});
  c.append({OpKind::Measure, 0, -1, 0, 1});
  auto d = exact_distribution(c);
  CHECK(d.at("01") == Approx(0.5).margin(1e-12));
  CHECK(d.at("11") == Approx(0.5).margin(1e-12));
}

TEST_CASE("rz/s/t phase bookkeeping via interference") {
  // H, Z-phase, H maps phase rotation to amplitude: P(1) = sin^2(theta/2)
  for (double theta : {0.0, M_PI / 3, M_PI / 2, M_PI}) {
    Circuit c;
    c.num_qubits = 1;
    c.num_clbits = 1;
    c.append({OpKind::H, 0});
    c.append({OpKind::RZ, 0, -1, theta});
    c.append({OpKind::H, 0});
    c.append({OpKind::Measure, 0, -1, 0, 0});
    auto d = exact_distribution(c);
    double p1 = d.count("1") ? d.at("1") : 0.0;
    CHECK(p1 == Approx(std::sin(theta / 2) * std::sin(theta / 2))
                    .margin(1e-12));
  }
}

TEST_CASE("swap gate relabels the state") {
  Circuit c;
  c.num_qubits = 2;
  c.num_clbits = 2;
  c.append({OpKind::X, 0});
  c.append({OpKind::Swap, 0, 1});
  c.append({OpKind::Measure, 0, -1, 0, 0});
  c.append({OpKind::Measure, 1, -1, 0, 1});
  auto d = exact_distribution(c);
  CHECK(d.at("01") == Approx(1.0).margin(1e-12));
}

TEST_CASE("leave-state reset noise has closed form eta^r") {
  // prepare |1>, apply r resets each failing (leaving the state) w.p. eta,
  // then measure: P(1) = eta^r.
  const double eta = 0.1;
  for (int r = 1; r <= 3; ++r) {
    Circuit c;
    c.num_qubits = 1;
    c.num_clbits = 1;
    c.append({OpKind::X, 0});
    for (int i = 0; i < r; ++i) c.append({OpKind::Reset, 0});
    c.append({OpKind::Measure, 0, -1, 0, 0});
    auto d = exact_distribution(c, ResetNoise::uniform(1, eta));
    double p1 = d.count("1") ? d.at("1") : 0.0;
    CHECK(p1 == Approx(std::pow(eta, r)).margin(1e-12));
  }
}

TEST_CASE("flip-to-one reset noise forces |1> on failure") {
  const double eta = 0.2;
  Circuit c;
  c.num_qubits = 1;
  c.num_clbits = 1;
  c.append({OpKind::Reset, 0});  // from |0>; only the failure mode flips
  c.append({OpKind::Measure, 0, -1, 0, 0});
  auto d = exact_distribution(
      c, ResetNoise::uniform(1, eta, ResetFailureMode::FlipToOne));
  CHECK(d.at("1") == Approx(eta).margin(1e-12));
}

TEST_CASE("noisy reset leaves superposition intact in leave-state mode") {
  // |+> then a failed reset keeps |+>: the next H undoes it exactly.
  const double eta = 0.25;
  Circuit c;
  c.num_qubits = 1;
  c.num_clbits = 1;
  c.append({OpKind::H, 0});
  c.append({OpKind::Reset, 0});
  c.append({OpKind::H, 0});
  c.append({OpKind::Measure, 0, -1, 0, 0});
  auto d = exact_distribution(c, ResetNoise::uniform(1, eta));
  // failure branch (eta): H|+> = |0>. success branch: H|0> = |+> -> 50/50.
  double expect1 = (1 - eta) * 0.5;
  CHECK(d.at("1") == Approx(expect1).margin(1e-12));
}

TEST_CASE("hellinger fidelity and total variation") {
  OutcomeDistribution p{{"0", 0.5}, {"1", 0.5}};
  OutcomeDistribution q{{"0", 1.0}};
  CHECK(hellinger_fidelity(p, p) == Approx(1.0).margin(1e-12));
  CHECK(hellinger_fidelity(p, q) == Approx(0.5).margin(1e-12));
  CHECK(total_variation_distance(p, q) == Approx(0.5).margin(1e-12));
  OutcomeDistribution r{{"1", 1.0}};
  CHECK(hellinger_fidelity(q, r) == Approx(0.0).margin(1e-12));
  CHECK(total_variation_distance(q, r) == Approx(1.0).margin(1e-12));
}

TEST_CASE("sampling is deterministic per seed and converges") {
  Circuit c;
  c.num_qubits = 3;
  c.num_clbits = 3;
  for (int q = 0; q < 3; ++q) c.append({OpKind::H, q});
  for (int q = 0; q < 3; ++q) c.append({OpKind::Measure, q, -1, 0, q});
  auto a = sample_counts(c, 4096, 17);
  auto b = sample_counts(c, 4096, 17);
  CHECK(a.counts == b.counts);
  auto other = sample_counts(c, 4096, 18);
  CHECK(a.counts != other.counts);

  auto exact = exact_distribution(c);
  double tv = total_variation_distance(exact, counts_to_distribution(a));
  CHECK(tv <= 5.0 * std::sqrt(static_cast<double>(exact.size()) / 4096.0));
}

TEST_CASE("simulator rejects oversized circuits") {
  Circuit c;
  c.num_qubits = kSimulatorQubitCap + 1;
  c.num_clbits = 1;
  c.append({OpKind::H, 0});
  CHECK_THROWS_AS(exact_distribution(c), SimError);
}
