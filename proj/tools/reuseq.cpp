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

// reuseq: command line front end for the swap-insertion + qubit-reuse
// optimizer, the calibration-aware placement stage, the reset-error
// characterization tooling and the equivalence verifier.
//
// Machine-readable JSON goes to stdout (or --out); human notes to stderr.
// Exit codes: 0 success/proven optimum, 2 timeout best-effort, 1 failure.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "reuseq/characterize.hpp"
#include "reuseq/circuit.hpp"
#include "reuseq/mapper.hpp"
#include "reuseq/placement.hpp"
#include "reuseq/router.hpp"
#include "reuseq/simulator.hpp"
#include "reuseq/topology.hpp"

namespace {

using nlohmann::json;
using namespace reuseq;

std::string read_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open file: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_output(const std::string& out_path, const std::string& text) {
  if (out_path.empty()) {
    std::cout << text << "\n";
  } else {
    std::ofstream f(out_path);
    if (!f) throw std::runtime_error("cannot write file: " + out_path);
    f << text << "\n";
  }
}

// Built-in circuits: bv<n>[:secret] (default secret all ones), h_ladder<n>.
Circuit builtin_circuit(const std::string& name) {
  if (name.rfind("bv", 0) == 0) {
    std::string rest = name.substr(2);
    std::string secret;
    auto colon = rest.find(':');
    if (colon != std::string::npos) {
      secret = rest.substr(colon + 1);
      rest = rest.substr(0, colon);
    }
    int n = std::stoi(rest);
    if (secret.empty()) secret.assign(std::max(0, n - 1), '1');
    return generate_bv(n, secret);
  }
  if (name.rfind("h_ladder", 0) == 0)
    return generate_h_ladder(std::stoi(name.substr(8)));
  throw std::runtime_error("unknown built-in circuit: " + name);
}

Circuit load_circuit(const std::string& builtin, const std::string& qasm_path) {
  if (!builtin.empty() && !qasm_path.empty())
    throw std::runtime_error("--circuit and --qasm are mutually exclusive");
  if (!builtin.empty()) return builtin_circuit(builtin);
  if (!qasm_path.empty()) {
    Circuit c = parse_qasm(read_file(qasm_path));
    if (c.name.empty()) c.name = qasm_path;
    return c;
  }
  throw std::runtime_error("one of --circuit or --qasm is required");
}

CouplingGraph load_topology(const std::string& spec) {
  if (auto g = preset(spec)) return *g;
  CouplingGraph g = coupling_from_json(json::parse(read_file(spec)));
  if (g.name.empty()) g.name = spec;
  return g;
}

Objective parse_objective(const std::string& s) {
  if (s == "depth") return Objective::Depth;
  if (s == "swaps") return Objective::Swaps;
  if (s == "qubits") return Objective::Qubits;
  if (s == "resets") return Objective::Resets;
  throw std::runtime_error("unknown objective: " + s);
}

ReuseMode parse_reuse(const std::string& s) {
  if (s == "off") return ReuseMode::off();
  if (s == "on") return ReuseMode::on();
  if (s.rfind("exact:", 0) == 0)
    return ReuseMode::exactly(std::stoi(s.substr(6)));
  if (s.rfind("max-qubits:", 0) == 0)
    return ReuseMode::at_most_qubits(std::stoi(s.substr(11)));
  throw std::runtime_error("unknown reuse mode: " + s);
}

uint64_t effective_seed(uint64_t flag_seed) {
  if (const char* env = std::getenv("REUSEQ_SOLVER_SEED"))
    return std::stoull(env);
  return flag_seed;
}

struct OptimizeArgs {
  std::string circuit, qasm, topology = "heavy_hex_27";
  std::string objective = "swaps", secondary, reuse = "off", out;
  double budget = 3600;
  uint64_t seed = 0;
  int horizon = -1;
};

int cmd_optimize(const OptimizeArgs& a) {
  Circuit c = load_circuit(a.circuit, a.qasm);
  CouplingGraph g = load_topology(a.topology);
  Objective obj = parse_objective(a.objective);
  ReuseMode mode = parse_reuse(a.reuse);

  OptimizeOptions opt;
  opt.budget_seconds = a.budget;
  opt.seed = effective_seed(a.seed);
  if (a.horizon >= 1) opt.horizon_override = a.horizon;
  if (!a.secondary.empty()) {
    opt.secondary = parse_objective(a.secondary);
  } else if (obj == Objective::Swaps && mode.kind != ReuseMode::Off) {
    // default lexicographic tie-break: the least reuse achieving the swap
    // optimum, so reported qubit counts are deterministic
    opt.secondary = Objective::Resets;
  }

  OptimizeResult res = optimize_circuit(c, g, obj, mode, opt);

  json j;
  j["feasible"] = res.feasible;
  j["proven_optimal"] = res.proven_optimal;
  j["timed_out"] = res.timed_out;
  j["objective"] = objective_name(obj);
  j["objective_value"] = res.objective_value;
  if (res.secondary_value) {
    j["secondary_objective"] = objective_name(*opt.secondary);
    j["secondary_value"] = *res.secondary_value;
  }
  j["horizon"] = res.horizon;
  if (!res.message.empty()) j["message"] = res.message;
  if (res.feasible) {
    j["depth"] = res.mapped.depth;
    j["swaps"] = res.mapped.swap_count;
    j["qubits"] = res.mapped.used_qubits;
    j["mapped"] = mapped_to_json(res.mapped);
    j["qasm"] = to_qasm(lower_to_circuit(res.mapped));
  }
  write_output(a.out, j.dump(2));
  if (!res.feasible) {
    std::cerr << "infeasible: " << res.message << "\n";
    return 1;
  }
  if (!res.proven_optimal) {
    std::cerr << "budget exhausted; result is best-effort\n";
    return 2;
  }
  return 0;
}

struct PlaceArgs {
  std::string mapped, topology = "heavy_hex_27", calibration, out;
};

int cmd_place(const PlaceArgs& a) {
  MappedCircuit mc = mapped_from_json(json::parse(read_file(a.mapped)));
  CouplingGraph g = load_topology(a.topology);
  CalibrationSet cal = calibration_from_json(json::parse(read_file(a.calibration)));
  PlacementResult res = place(mc, g, cal);
  write_output(a.out, placement_to_json(res).dump(2));
  if (!res.feasible) {
    std::cerr << "placement infeasible: " << res.message << "\n";
    return 1;
  }
  return 0;
}

struct CharGenArgs {
  std::string kind = "simultaneous_x", out;
  int P = 1, W = 1, R = 1;
  uint64_t seed = 0;
};

int cmd_char_generate(const CharGenArgs& a) {
  auto kind = batch_kind_from_name(a.kind);
  if (!kind) throw std::runtime_error("unknown batch kind: " + a.kind);
  ExperimentBatch batch =
      generate_batch(*kind, a.P, a.W, a.R, effective_seed(a.seed));
  write_output(a.out, batch_to_json(batch).dump(2));
  std::cerr << batch.circuits.size() << " circuits generated\n";
  return 0;
}

struct CharSimArgs {
  std::string manifest, out, eta, mode = "leave_state";
  int shots = 10000;
  uint64_t seed = 0;
};

int cmd_char_simulate(const CharSimArgs& a) {
  ExperimentBatch batch = batch_from_json(json::parse(read_file(a.manifest)));
  std::optional<ResetNoise> noise;
  if (!a.eta.empty()) {
    ResetNoise n;
    n.mode = a.mode == "flip_to_one" ? ResetFailureMode::FlipToOne
                                     : ResetFailureMode::LeaveState;
    std::stringstream ss(a.eta);
    std::string tok;
    while (std::getline(ss, tok, ',')) n.eta.push_back(std::stod(tok));
    if (n.eta.size() == 1) n.eta.assign(batch.P, n.eta[0]);
    if (static_cast<int>(n.eta.size()) != batch.P)
      throw std::runtime_error("--eta needs 1 or P comma-separated values");
    noise = n;
  }
  auto counts =
      simulate_batch(batch, a.shots, effective_seed(a.seed), noise);
  write_output(a.out, counts_to_json(counts).dump(2));
  return 0;
}

struct CharAnalyzeArgs {
  std::string manifest, counts, out, csv;
};

int cmd_char_analyze(const CharAnalyzeArgs& a) {
  ExperimentBatch batch = batch_from_json(json::parse(read_file(a.manifest)));
  auto counts = counts_from_json(json::parse(read_file(a.counts)));
  ResetReport rep = analyze(batch, counts);
  write_output(a.out, report_to_json(rep).dump(2));
  if (!a.csv.empty()) {
    std::ofstream f(a.csv);
    if (!f) throw std::runtime_error("cannot write file: " + a.csv);
    f << report_to_csv(rep);
  }
  return 0;
}

struct VerifyArgs {
  std::string circuit, qasm, mapped, topology, out;
};

int cmd_verify(const VerifyArgs& a) {
  Circuit original = load_circuit(a.circuit, a.qasm);
  MappedCircuit mc = mapped_from_json(json::parse(read_file(a.mapped)));
  json j;
  bool ok = true;
  if (!a.topology.empty()) {
    CouplingGraph g = load_topology(a.topology);
    ValidityReport rep = check_valid(mc, g, original);
    j["structural_ok"] = rep.ok();
    j["violations"] = rep.violations;
    ok = ok && rep.ok();
  }
  EquivalenceResult eq = equivalent(original, mc);
  j["equivalent"] = eq.equivalent;
  j["hellinger_fidelity"] = eq.fidelity;
  ok = ok && eq.equivalent;
  write_output(a.out, j.dump(2));
  if (!ok) std::cerr << "verification failed\n";
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact qubit-reuse and swap-insertion optimizer"};
  app.require_subcommand(1);

  OptimizeArgs oa;
  auto* opt = app.add_subcommand("optimize", "map and optimize a circuit");
  opt->add_option("--circuit", oa.circuit, "built-in circuit (bv<n>[:secret], h_ladder<n>)");
  opt->add_option("--qasm", oa.qasm, "OpenQASM 2 input file");
  opt->add_option("--topology", oa.topology, "preset name or coupling JSON file");
  opt->add_option("--objective", oa.objective, "depth|swaps|qubits");
  opt->add_option("--secondary-objective", oa.secondary, "depth|swaps|qubits|resets");
  opt->add_option("--reuse", oa.reuse, "off|on|exact:K|max-qubits:K");
  opt->add_option("--budget", oa.budget, "solver budget in seconds");
  opt->add_option("--seed", oa.seed, "solver seed");
  opt->add_option("--T", oa.horizon, "step horizon override");
  opt->add_option("--out", oa.out, "output JSON path (default stdout)");

  PlaceArgs pa;
  auto* plc = app.add_subcommand("place", "calibration-aware qubit assignment");
  plc->add_option("--mapped", pa.mapped, "MappedCircuit JSON")->required();
  plc->add_option("--topology", pa.topology, "preset name or coupling JSON file");
  plc->add_option("--calibration", pa.calibration, "calibration JSON")->required();
  plc->add_option("--out", pa.out, "output JSON path (default stdout)");

  auto* chr = app.add_subcommand("characterize", "reset-error characterization");
  chr->require_subcommand(1);
  CharGenArgs cga;
  auto* cgen = chr->add_subcommand("generate", "emit an experiment batch");
  cgen->add_option("--kind", cga.kind, "individual_random|simultaneous_random|simultaneous_x");
  cgen->add_option("--P", cga.P, "qubit count");
  cgen->add_option("--W", cga.W, "random preparations");
  cgen->add_option("--R", cga.R, "maximum reset repetitions");
  cgen->add_option("--seed", cga.seed, "preparation seed");
  cgen->add_option("--out", cga.out, "manifest JSON path (default stdout)");
  CharSimArgs csa;
  auto* csim = chr->add_subcommand("simulate", "simulate a batch into counts");
  csim->add_option("--manifest", csa.manifest, "batch manifest JSON")->required();
  csim->add_option("--shots", csa.shots, "shots per circuit");
  csim->add_option("--eta", csa.eta, "reset failure probability (single value or per-qubit list)");
  csim->add_option("--noise-mode", csa.mode, "leave_state|flip_to_one");
  csim->add_option("--seed", csa.seed, "sampling seed");
  csim->add_option("--out", csa.out, "counts JSON path (default stdout)");
  CharAnalyzeArgs caa;
  auto* cana = chr->add_subcommand("analyze", "analyze counts into a reset report");
  cana->add_option("--manifest", caa.manifest, "batch manifest JSON")->required();
  cana->add_option("--counts", caa.counts, "counts JSON")->required();
  cana->add_option("--out", caa.out, "report JSON path (default stdout)");
  cana->add_option("--csv", caa.csv, "also write the reset-error table as CSV");

  VerifyArgs va;
  auto* ver = app.add_subcommand("verify", "check a mapped circuit against its source");
  ver->add_option("--circuit", va.circuit, "built-in original circuit");
  ver->add_option("--qasm", va.qasm, "original circuit QASM file");
  ver->add_option("--mapped", va.mapped, "MappedCircuit JSON")->required();
  ver->add_option("--topology", va.topology, "also run the structural validity check");
  ver->add_option("--out", va.out, "output JSON path (default stdout)");

  CLI11_PARSE(app, argc, argv);
  try {
    if (opt->parsed()) return cmd_optimize(oa);
    if (plc->parsed()) return cmd_place(pa);
    if (chr->parsed()) {
      if (cgen->parsed()) return cmd_char_generate(cga);
      if (csim->parsed()) return cmd_char_simulate(csa);
      if (cana->parsed()) return cmd_char_analyze(caa);
    }
    if (ver->parsed()) return cmd_verify(va);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
