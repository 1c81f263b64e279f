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

// Exact reference semantics: branching statevector simulation with
// mid-circuit measurement, reset (modeled as measure + conditional X) and a
// configurable reset-failure channel used to produce synthetic
// characterization data.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "reuseq/circuit.hpp"

namespace reuseq {

struct SimError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Outcome probabilities keyed by classical bitstring; string position i is
// the i-th written classical bit, '0'/'1'.
using OutcomeDistribution = std::map<std::string, double>;

struct CountsRecord {
  std::map<std::string, int> counts;
  int shots = 0;
};

enum class ResetFailureMode { LeaveState, FlipToOne };

// Per-qubit reset failure probability.
struct ResetNoise {
  std::vector<double> eta;  // indexed by qubit
  ResetFailureMode mode = ResetFailureMode::LeaveState;

  static ResetNoise uniform(int n, double e,
                            ResetFailureMode m = ResetFailureMode::LeaveState) {
    ResetNoise r;
    r.eta.assign(n, e);
    r.mode = m;
    return r;
  }
};

namespace detail {

using cd = std::complex<double>;

struct Branch {
  std::vector<cd> amps;        // normalized
  std::vector<int8_t> clbits;  // -1 unwritten
  double prob;                 // branch weight
};

inline void apply_1q(std::vector<cd>& a, int q, cd m00, cd m01, cd m10,
                     cd m11) {
  const std::size_t mask = std::size_t{1} << q;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (i & mask) continue;
    cd a0 = a[i], a1 = a[i | mask];
    a[i] = m00 * a0 + m01 * a1;
    a[i | mask] = m10 * a0 + m11 * a1;
  }
}

inline void apply_cx(std::vector<cd>& a, int c, int t) {
  const std::size_t cm = std::size_t{1} << c;
  const std::size_t tm = std::size_t{1} << t;
  for (std::size_t i = 0; i < a.size(); ++i)
    if ((i & cm) && !(i & tm)) std::swap(a[i], a[i | tm]);
}

inline void apply_gate(std::vector<cd>& a, const Op& op) {
  const cd I(0, 1);
  const double s = 1.0 / std::sqrt(2.0);
  switch (op.kind) {
    case OpKind::H:
      apply_1q(a, op.q0, s, s, s, -s);
      break;
    case OpKind::X:
      apply_1q(a, op.q0, 0, 1, 1, 0);
      break;
    case OpKind::Z:
      apply_1q(a, op.q0, 1, 0, 0, -1);
      break;
    case OpKind::S:
      apply_1q(a, op.q0, 1, 0, 0, I);
      break;
    case OpKind::Sdg:
      apply_1q(a, op.q0, 1, 0, 0, -I);
      break;
    case OpKind::T:
      apply_1q(a, op.q0, 1, 0, 0, std::exp(I * (M_PI / 4)));
      break;
    case OpKind::Tdg:
      apply_1q(a, op.q0, 1, 0, 0, std::exp(-I * (M_PI / 4)));
      break;
    case OpKind::RZ:
      apply_1q(a, op.q0, std::exp(-I * (op.angle / 2)), 0, 0,
               std::exp(I * (op.angle / 2)));
      break;
    case OpKind::CX:
      apply_cx(a, op.q0, op.q1);
      break;
    case OpKind::Swap: {
      const std::size_t pm = std::size_t{1} << op.q0;
      const std::size_t qm = std::size_t{1} << op.q1;
      for (std::size_t i = 0; i < a.size(); ++i)
        if ((i & pm) && !(i & qm)) std::swap(a[i], a[i ^ pm ^ qm]);
      break;
    }
    default:
      throw SimError("apply_gate: not a unitary");
  }
}

// Probability of measuring |1> on q.
inline double prob_one(const std::vector<cd>& a, int q) {
  const std::size_t mask = std::size_t{1} << q;
  double p = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (i & mask) p += std::norm(a[i]);
  return p;
}

// Project onto outcome and renormalize; returns the outcome probability.
inline double project(std::vector<cd>& a, int q, int outcome) {
  const std::size_t mask = std::size_t{1} << q;
  double p = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    bool one = (i & mask) != 0;
    if (one == (outcome == 1))
      p += std::norm(a[i]);
    else
      a[i] = 0;
  }
  if (p > 0) {
    double inv = 1.0 / std::sqrt(p);
    for (auto& x : a) x *= inv;
  }
  return p;
}

// Coalesce branches with identical classical record and state. Keeps the
// branch tree small for product-structured circuits with many resets.
inline void merge_branches(std::vector<Branch>& branches) {
  if (branches.size() < 2) return;
  std::map<std::string, std::size_t> index;
  std::vector<Branch> out;
  for (auto& b : branches) {
    std::ostringstream key;
    for (int8_t c : b.clbits) key << static_cast<int>(c) << ',';
    key << '|';
    key.precision(12);
    for (const cd& x : b.amps) key << x.real() << ',' << x.imag() << ';';
    auto [it, inserted] = index.try_emplace(key.str(), out.size());
    if (inserted)
      out.push_back(std::move(b));
    else
      out[it->second].prob += b.prob;
  }
  branches = std::move(out);
}

constexpr double kBranchPruneThreshold = 1e-15;

}  // namespace detail

constexpr int kSimulatorQubitCap = 14;

// Exact outcome probabilities over the written classical bits. Branches on
// each measurement; reset branches on the measured outcome (both merge to
// |0>) and, when noise is given, on the failure channel.
inline OutcomeDistribution exact_distribution(
    const Circuit& c, const std::optional<ResetNoise>& noise = std::nullopt) {
  using namespace detail;
  if (c.num_qubits > kSimulatorQubitCap)
    throw SimError("circuit exceeds the simulator qubit cap");
  if (noise && static_cast<int>(noise->eta.size()) < c.num_qubits)
    throw SimError("reset noise table smaller than qubit count");

  std::vector<Branch> branches(1);
  branches[0].amps.assign(std::size_t{1} << c.num_qubits, 0);
  branches[0].amps[0] = 1;
  branches[0].clbits.assign(c.num_clbits, -1);
  branches[0].prob = 1;

  auto ideal_reset = [&](const Branch& b, std::vector<Branch>& out, int q) {
    for (int outcome = 0; outcome < 2; ++outcome) {
      Branch nb = b;
      double p = project(nb.amps, q, outcome);
      if (p * b.prob < kBranchPruneThreshold) continue;
      nb.prob = b.prob * p;
      if (outcome == 1) apply_gate(nb.amps, Op{OpKind::X, q});
      out.push_back(std::move(nb));
    }
  };

  for (const Op& op : c.ops) {
    if (op.kind == OpKind::Barrier) continue;
    std::vector<Branch> next;
    next.reserve(branches.size() * 2);
    for (Branch& b : branches) {
      if (op.kind == OpKind::Measure) {
        for (int outcome = 0; outcome < 2; ++outcome) {
          Branch nb = b;
          double p = project(nb.amps, op.q0, outcome);
          if (p * b.prob < kBranchPruneThreshold) continue;
          nb.prob = b.prob * p;
          nb.clbits[op.cbit] = static_cast<int8_t>(outcome);
          next.push_back(std::move(nb));
        }
      } else if (op.kind == OpKind::Reset) {
        double eta = noise ? noise->eta[op.q0] : 0.0;
        if (eta > 0) {
          Branch fail = b;
          fail.prob = b.prob * eta;
          if (noise->mode == ResetFailureMode::FlipToOne) {
            // forced |1>: ideal reset followed by X
            std::vector<Branch> tmp;
            ideal_reset(fail, tmp, op.q0);
            for (Branch& t : tmp) {
              apply_gate(t.amps, Op{OpKind::X, op.q0});
              next.push_back(std::move(t));
            }
          } else if (fail.prob >= kBranchPruneThreshold) {
            next.push_back(std::move(fail));  // leave_state: no-op
          }
          Branch succ = b;
          succ.prob = b.prob * (1 - eta);
          if (succ.prob >= kBranchPruneThreshold)
            ideal_reset(succ, next, op.q0);
        } else {
          ideal_reset(b, next, op.q0);
        }
      } else {
        apply_gate(b.amps, op);
        next.push_back(std::move(b));
      }
    }
    branches = std::move(next);
    if (op.kind == OpKind::Measure || op.kind == OpKind::Reset)
      merge_branches(branches);
    if (branches.empty())
      throw SimError("all branches pruned (internal error)");
  }

  // written classical bits, in index order
  std::vector<int> written;
  for (int cb = 0; cb < c.num_clbits; ++cb)
    for (const Op& op : c.ops)
      if (op.kind == OpKind::Measure && op.cbit == cb) {
        written.push_back(cb);
        break;
      }

  OutcomeDistribution dist;
  double total = 0;
  for (const Branch& b : branches) {
    std::string key;
    key.reserve(written.size());
    for (int cb : written) key += (b.clbits[cb] == 1 ? '1' : '0');
    dist[key] += b.prob;
    total += b.prob;
  }
  if (total <= 0) throw SimError("zero total probability (internal error)");
  for (auto& [k, v] : dist) v /= total;
  return dist;
}

// Multinomial sample from the exact distribution; deterministic per seed.
inline CountsRecord sample_counts(
    const Circuit& c, int shots, uint64_t seed,
    const std::optional<ResetNoise>& noise = std::nullopt) {
  CountsRecord rec;
  rec.shots = shots;
  if (shots == 0) return rec;
  OutcomeDistribution dist = exact_distribution(c, noise);
  std::vector<std::pair<std::string, double>> cdf;
  double acc = 0;
  for (const auto& [k, p] : dist) {
    acc += p;
    cdf.emplace_back(k, acc);
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int s = 0; s < shots; ++s) {
    double r = u(rng) * acc;
    auto it = std::lower_bound(
        cdf.begin(), cdf.end(), r,
        [](const auto& a, double b) { return a.second < b; });
    if (it == cdf.end()) --it;
    ++rec.counts[it->first];
  }
  return rec;
}

// (sum_x sqrt(p_x q_x))^2
inline double hellinger_fidelity(const OutcomeDistribution& p,
                                 const OutcomeDistribution& q) {
  double s = 0;
  for (const auto& [k, pv] : p) {
    auto it = q.find(k);
    if (it != q.end()) s += std::sqrt(pv * it->second);
  }
  return s * s;
}

inline double total_variation_distance(const OutcomeDistribution& p,
                                       const OutcomeDistribution& q) {
  double s = 0;
  for (const auto& [k, pv] : p) {
    auto it = q.find(k);
    s += std::abs(pv - (it == q.end() ? 0.0 : it->second));
  }
  for (const auto& [k, qv] : q)
    if (!p.count(k)) s += qv;
  return s / 2;
}

inline OutcomeDistribution counts_to_distribution(const CountsRecord& rec) {
  OutcomeDistribution d;
  for (const auto& [k, n] : rec.counts)
    d[k] = static_cast<double>(n) / rec.shots;
  return d;
}

}  // namespace reuseq
