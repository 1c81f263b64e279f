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

// Reset-error characterization: generate the three experiment batches
// (individual random preparation, simultaneous random preparation,
// simultaneous X preparation), and analyze measurement counts into a
// reset-error table plus summary statistics (outlier rates by the 1.5*IQR
// boxplot rule, per-qubit best repetition count, and the Pearson correlation
// of reset fidelity against |0>-overlap of the prepared state).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "reuseq/circuit.hpp"
#include "reuseq/simulator.hpp"

namespace reuseq {

struct CharacterizeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class BatchKind { IndividualRandom, SimultaneousRandom, SimultaneousX };

inline const char* batch_kind_name(BatchKind k) {
  switch (k) {
    case BatchKind::IndividualRandom: return "individual_random";
    case BatchKind::SimultaneousRandom: return "simultaneous_random";
    case BatchKind::SimultaneousX: return "simultaneous_x";
  }
  return "?";
}

inline std::optional<BatchKind> batch_kind_from_name(const std::string& s) {
  if (s == "individual_random") return BatchKind::IndividualRandom;
  if (s == "simultaneous_random") return BatchKind::SimultaneousRandom;
  if (s == "simultaneous_x") return BatchKind::SimultaneousX;
  return std::nullopt;
}

// One single-qubit preparation: an X gate, or U(theta,phi,lambda).
struct PrepSpec {
  bool is_x = false;
  double theta = 0, phi = 0, lambda = 0;
};

// |<0|U|0>|^2 of the preparation.
inline double zero_overlap(const PrepSpec& prep) {
  if (prep.is_x) return 0.0;
  double c = std::cos(prep.theta / 2);
  return c * c;
}

struct BatchEntry {
  Circuit circuit;
  std::vector<int> qubits;      // physical qubit per circuit position
  std::vector<PrepSpec> preps;  // preparation per circuit position
  int r = 1;                    // reset repetitions
  int w = 0;                    // preparation index (0 for the X experiment)
  int index = 0;                // position within the batch
};

struct ExperimentBatch {
  BatchKind kind = BatchKind::SimultaneousX;
  int P = 0, W = 0, R = 0;
  uint64_t seed = 0;
  std::vector<BatchEntry> circuits;
};

namespace detail {

// U(theta,phi,lambda)|0> up to global phase:
// rz(lambda) is irrelevant on |0>, sdg-h-rz(theta)-h-s realizes ry(theta),
// rz(phi) sets the relative phase.
inline void emit_prep(Circuit& c, int q, const PrepSpec& prep) {
  if (prep.is_x) {
    c.ops.push_back(Op{OpKind::X, q});
    return;
  }
  c.ops.push_back(Op{OpKind::RZ, q, -1, prep.lambda});
  c.ops.push_back(Op{OpKind::Sdg, q});
  c.ops.push_back(Op{OpKind::H, q});
  c.ops.push_back(Op{OpKind::RZ, q, -1, prep.theta});
  c.ops.push_back(Op{OpKind::H, q});
  c.ops.push_back(Op{OpKind::S, q});
  c.ops.push_back(Op{OpKind::RZ, q, -1, prep.phi});
}

// Haar-uniform single-qubit preparation: cos(theta) uniform on [-1,1],
// phases uniform on [0,2pi).
inline PrepSpec draw_prep(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  PrepSpec p;
  p.theta = std::acos(1.0 - 2.0 * u01(rng));
  p.phi = 2.0 * M_PI * u01(rng);
  p.lambda = 2.0 * M_PI * u01(rng);
  return p;
}

inline BatchEntry make_entry(const std::vector<int>& qubits,
                             const std::vector<PrepSpec>& preps, int r, int w,
                             const std::string& tag) {
  BatchEntry e;
  e.qubits = qubits;
  e.preps = preps;
  e.r = r;
  e.w = w;
  int n = static_cast<int>(qubits.size());
  e.circuit.num_qubits = n;
  e.circuit.num_clbits = n;
  e.circuit.name = tag;
  for (int i = 0; i < n; ++i) emit_prep(e.circuit, i, preps[i]);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < r; ++k) e.circuit.ops.push_back(Op{OpKind::Reset, i});
  for (int i = 0; i < n; ++i)
    e.circuit.ops.push_back(Op{OpKind::Measure, i, -1, 0, i});
  return e;
}

}  // namespace detail

// Circuit counts per kind: individual_random |P|*W*R, simultaneous_random
// W*R, simultaneous_x R. Deterministic per seed; circuits ordered by
// (w, r, qubit).
inline ExperimentBatch generate_batch(BatchKind kind, int P, int W, int R,
                                      uint64_t seed) {
  if (P < 1 || W < 1 || R < 1)
    throw CharacterizeError("P, W and R must all be at least 1");
  ExperimentBatch batch;
  batch.kind = kind;
  batch.P = P;
  batch.W = W;
  batch.R = R;
  batch.seed = seed;
  std::mt19937_64 rng(seed);

  auto tag = [&](int w, int r, int q) {
    std::ostringstream os;
    os << batch_kind_name(kind) << "_w" << w << "_r" << r;
    if (q >= 0) os << "_q" << q;
    return os.str();
  };

  if (kind == BatchKind::SimultaneousX) {
    std::vector<int> qubits(P);
    for (int q = 0; q < P; ++q) qubits[q] = q;
    std::vector<PrepSpec> preps(P);
    for (auto& p : preps) p.is_x = true;
    for (int r = 1; r <= R; ++r)
      batch.circuits.push_back(
          detail::make_entry(qubits, preps, r, 0, tag(0, r, -1)));
  } else {
    std::vector<PrepSpec> gates(W);
    for (auto& g : gates) g = detail::draw_prep(rng);
    for (int w = 1; w <= W; ++w)
      for (int r = 1; r <= R; ++r) {
        if (kind == BatchKind::IndividualRandom) {
          for (int q = 0; q < P; ++q)
            batch.circuits.push_back(detail::make_entry(
                {q}, {gates[w - 1]}, r, w, tag(w, r, q)));
        } else {
          std::vector<int> qubits(P);
          for (int q = 0; q < P; ++q) qubits[q] = q;
          std::vector<PrepSpec> preps(P, gates[w - 1]);
          batch.circuits.push_back(
              detail::make_entry(qubits, preps, r, w, tag(w, r, -1)));
        }
      }
  }
  for (std::size_t i = 0; i < batch.circuits.size(); ++i)
    batch.circuits[i].index = static_cast<int>(i);
  return batch;
}

// Simulate every circuit of a batch; per-circuit seeds derive from `seed`
// and the circuit index so results are order-independent and reproducible.
inline std::vector<CountsRecord> simulate_batch(
    const ExperimentBatch& batch, int shots, uint64_t seed,
    const std::optional<ResetNoise>& noise = std::nullopt) {
  std::vector<CountsRecord> out;
  out.reserve(batch.circuits.size());
  for (const BatchEntry& e : batch.circuits) {
    std::optional<ResetNoise> local;
    if (noise) {
      // project the device-level noise table onto this circuit's qubits
      ResetNoise n;
      n.mode = noise->mode;
      for (int p : e.qubits) {
        if (p >= static_cast<int>(noise->eta.size()))
          throw CharacterizeError("noise table smaller than qubit index");
        n.eta.push_back(noise->eta[p]);
      }
      local = n;
    }
    out.push_back(sample_counts(e.circuit, shots,
                                seed + 0x9e3779b97f4a7c15ULL * (e.index + 1),
                                local));
  }
  return out;
}

struct ResetCellStats {
  double mean_fidelity = 0;
  double min_fidelity = 0;
  double max_fidelity = 0;
  double outlier_rate = 0;
  int samples = 0;
};

struct ResetReport {
  int P = 0, R = 0;
  // stats[p][r-1]
  std::vector<std::vector<ResetCellStats>> stats;
  std::vector<int> best_repetitions;                  // per qubit, argmax mean
  std::vector<std::optional<double>> pearson_by_r;    // absent: zero variance
  // reset_error[p][r-1] = R(r,p) = 1 - mean fidelity
  std::vector<std::vector<double>> reset_error;
};

namespace detail {

// type-7 (linear interpolation) quantile of sorted data
inline double quantile_sorted(const std::vector<double>& v, double q) {
  if (v.empty()) return 0;
  double pos = q * (v.size() - 1);
  std::size_t lo = static_cast<std::size_t>(pos);
  std::size_t hi = std::min(lo + 1, v.size() - 1);
  double frac = pos - lo;
  return v[lo] * (1 - frac) + v[hi] * frac;
}

inline std::optional<double> pearson(const std::vector<double>& x,
                                     const std::vector<double>& y) {
  std::size_t n = x.size();
  if (n < 2 || y.size() != n) return std::nullopt;
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx <= 0 || syy <= 0) return std::nullopt;  // zero variance: absent
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace detail

// Per-circuit, per-position fidelity = fraction of shots measuring 0 on that
// position's bit. R(r,p) = 1 - mean fidelity over the batch's circuits for
// that cell.
inline ResetReport analyze(const ExperimentBatch& batch,
                           const std::vector<CountsRecord>& counts) {
  if (counts.size() != batch.circuits.size())
    throw CharacterizeError("counts are not aligned with the batch");
  ResetReport rep;
  rep.P = batch.P;
  rep.R = batch.R;
  // fidelity samples per (p, r), and pooled (overlap, fidelity) per r
  std::vector<std::vector<std::vector<double>>> samples(
      batch.P, std::vector<std::vector<double>>(batch.R));
  std::vector<std::vector<double>> ov_by_r(batch.R + 1), fid_by_r(batch.R + 1);

  for (std::size_t ci = 0; ci < batch.circuits.size(); ++ci) {
    const BatchEntry& e = batch.circuits[ci];
    const CountsRecord& rec = counts[ci];
    if (rec.shots < 1) throw CharacterizeError("record with zero shots");
    for (std::size_t i = 0; i < e.qubits.size(); ++i) {
      long zeros = 0;
      for (const auto& [bits, n] : rec.counts) {
        if (bits.size() != e.qubits.size())
          throw CharacterizeError("bitstring length mismatch");
        if (bits[i] == '0') zeros += n;
      }
      double fid = static_cast<double>(zeros) / rec.shots;
      samples[e.qubits[i]][e.r - 1].push_back(fid);
      ov_by_r[e.r].push_back(zero_overlap(e.preps[i]));
      fid_by_r[e.r].push_back(fid);
    }
  }

  rep.stats.assign(batch.P, std::vector<ResetCellStats>(batch.R));
  rep.reset_error.assign(batch.P, std::vector<double>(batch.R, 0.0));
  rep.best_repetitions.assign(batch.P, 1);
  for (int p = 0; p < batch.P; ++p) {
    double best_mean = -1;
    for (int r = 1; r <= batch.R; ++r) {
      auto& v = samples[p][r - 1];
      ResetCellStats& cell = rep.stats[p][r - 1];
      cell.samples = static_cast<int>(v.size());
      if (v.empty()) continue;
      std::sort(v.begin(), v.end());
      double sum = 0;
      for (double f : v) sum += f;
      cell.mean_fidelity = sum / v.size();
      cell.min_fidelity = v.front();
      cell.max_fidelity = v.back();
      double q1 = detail::quantile_sorted(v, 0.25);
      double q3 = detail::quantile_sorted(v, 0.75);
      double iqr = q3 - q1;
      int outliers = 0;
      for (double f : v)
        if (f < q1 - 1.5 * iqr || f > q3 + 1.5 * iqr) ++outliers;
      cell.outlier_rate = static_cast<double>(outliers) / v.size();
      rep.reset_error[p][r - 1] = 1.0 - cell.mean_fidelity;
      if (cell.mean_fidelity > best_mean) {
        best_mean = cell.mean_fidelity;
        rep.best_repetitions[p] = r;
      }
    }
  }
  rep.pearson_by_r.assign(batch.R, std::nullopt);
  for (int r = 1; r <= batch.R; ++r)
    rep.pearson_by_r[r - 1] = detail::pearson(ov_by_r[r], fid_by_r[r]);
  return rep;
}

// ---------------------------------------------------------------------------
// JSON / CSV round-trips

inline nlohmann::json batch_to_json(const ExperimentBatch& batch) {
  nlohmann::json j;
  j["kind"] = batch_kind_name(batch.kind);
  j["P"] = batch.P;
  j["W"] = batch.W;
  j["R"] = batch.R;
  j["seed"] = batch.seed;
  auto arr = nlohmann::json::array();
  for (const BatchEntry& e : batch.circuits) {
    nlohmann::json je;
    je["index"] = e.index;
    je["qubits"] = e.qubits;
    je["r"] = e.r;
    je["w"] = e.w;
    auto preps = nlohmann::json::array();
    for (const PrepSpec& p : e.preps) {
      if (p.is_x)
        preps.push_back("x");
      else
        preps.push_back({p.theta, p.phi, p.lambda});
    }
    je["preps"] = preps;
    je["qasm"] = to_qasm(e.circuit);
    arr.push_back(je);
  }
  j["circuits"] = arr;
  return j;
}

inline ExperimentBatch batch_from_json(const nlohmann::json& j) {
  ExperimentBatch batch;
  auto kind = batch_kind_from_name(j.at("kind").get<std::string>());
  if (!kind) throw CharacterizeError("unknown batch kind");
  batch.kind = *kind;
  batch.P = j.at("P").get<int>();
  batch.W = j.at("W").get<int>();
  batch.R = j.at("R").get<int>();
  batch.seed = j.at("seed").get<uint64_t>();
  for (const auto& je : j.at("circuits")) {
    BatchEntry e;
    e.index = je.at("index").get<int>();
    e.qubits = je.at("qubits").get<std::vector<int>>();
    e.r = je.at("r").get<int>();
    e.w = je.at("w").get<int>();
    for (const auto& jp : je.at("preps")) {
      PrepSpec p;
      if (jp.is_string()) {
        p.is_x = true;
      } else {
        p.theta = jp.at(0).get<double>();
        p.phi = jp.at(1).get<double>();
        p.lambda = jp.at(2).get<double>();
      }
      e.preps.push_back(p);
    }
    e.circuit = parse_qasm(je.at("qasm").get<std::string>());
    batch.circuits.push_back(std::move(e));
  }
  return batch;
}

inline nlohmann::json counts_to_json(const std::vector<CountsRecord>& counts) {
  nlohmann::json j = nlohmann::json::object();
  for (std::size_t i = 0; i < counts.size(); ++i) {
    nlohmann::json je;
    je["shots"] = counts[i].shots;
    je["counts"] = counts[i].counts;
    j[std::to_string(i)] = je;
  }
  return j;
}

inline std::vector<CountsRecord> counts_from_json(const nlohmann::json& j) {
  std::vector<CountsRecord> out(j.size());
  for (const auto& [key, je] : j.items()) {
    std::size_t i = std::stoul(key);
    if (i >= out.size()) throw CharacterizeError("non-contiguous counts ids");
    out[i].shots = je.at("shots").get<int>();
    out[i].counts = je.at("counts").get<std::map<std::string, int>>();
  }
  return out;
}

inline nlohmann::json report_to_json(const ResetReport& rep) {
  nlohmann::json j;
  j["P"] = rep.P;
  j["R"] = rep.R;
  auto stats = nlohmann::json::array();
  for (int p = 0; p < rep.P; ++p) {
    auto row = nlohmann::json::array();
    for (int r = 1; r <= rep.R; ++r) {
      const ResetCellStats& c = rep.stats[p][r - 1];
      row.push_back({{"mean_fidelity", c.mean_fidelity},
                     {"min_fidelity", c.min_fidelity},
                     {"max_fidelity", c.max_fidelity},
                     {"outlier_rate", c.outlier_rate},
                     {"samples", c.samples}});
    }
    stats.push_back(row);
  }
  j["stats"] = stats;
  j["best_repetitions"] = rep.best_repetitions;
  auto pear = nlohmann::json::array();
  for (const auto& v : rep.pearson_by_r) {
    if (v)
      pear.push_back(*v);
    else
      pear.push_back(nullptr);
  }
  j["pearson_by_r"] = pear;
  j["reset_error"] = rep.reset_error;
  return j;
}

// CSV table of R(r,p): one row per qubit, one column per repetition count.
inline std::string report_to_csv(const ResetReport& rep) {
  std::ostringstream os;
  os.precision(10);
  os << "qubit";
  for (int r = 1; r <= rep.R; ++r) os << ",reset_error_r" << r;
  os << '\n';
  for (int p = 0; p < rep.P; ++p) {
    os << p;
    for (int r = 1; r <= rep.R; ++r) os << ',' << rep.reset_error[p][r - 1];
    os << '\n';
  }
  return os.str();
}

}  // namespace reuseq
