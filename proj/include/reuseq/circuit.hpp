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
#include <cctype>
#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace reuseq {

enum class OpKind {
  H,
  X,
  Z,
  S,
  Sdg,
  T,
  Tdg,
  RZ,
  CX,
  Swap,
  Measure,
  Reset,
  Barrier
};

inline bool is_two_qubit(OpKind k) {
  return k == OpKind::CX || k == OpKind::Swap;
}

inline bool is_unitary_gate(OpKind k) {
  switch (k) {
    case OpKind::Measure:
    case OpKind::Reset:
    case OpKind::Barrier:
      return false;
    default:
      return true;
  }
}

inline const char* op_name(OpKind k) {
  switch (k) {
    case OpKind::H: return "h";
    case OpKind::X: return "x";
    case OpKind::Z: return "z";
    case OpKind::S: return "s";
    case OpKind::Sdg: return "sdg";
    case OpKind::T: return "t";
    case OpKind::Tdg: return "tdg";
    case OpKind::RZ: return "rz";
    case OpKind::CX: return "cx";
    case OpKind::Swap: return "swap";
    case OpKind::Measure: return "measure";
    case OpKind::Reset: return "reset";
    case OpKind::Barrier: return "barrier";
  }
  return "?";
}

inline std::optional<OpKind> op_from_name(const std::string& s) {
  if (s == "h") return OpKind::H;
  if (s == "x") return OpKind::X;
  if (s == "z") return OpKind::Z;
  if (s == "s") return OpKind::S;
  if (s == "sdg") return OpKind::Sdg;
  if (s == "t") return OpKind::T;
  if (s == "tdg") return OpKind::Tdg;
  if (s == "rz") return OpKind::RZ;
  if (s == "cx") return OpKind::CX;
  if (s == "swap") return OpKind::Swap;
  if (s == "measure") return OpKind::Measure;
  if (s == "reset") return OpKind::Reset;
  if (s == "barrier") return OpKind::Barrier;
  return std::nullopt;
}

// One operation on 1-2 qubits. cbit is valid for Measure only.
struct Op {
  OpKind kind;
  int q0 = -1;
  int q1 = -1;       // second operand for CX/Swap/two-qubit barriers
  double angle = 0;  // RZ only
  int cbit = -1;     // Measure only

  bool operator==(const Op& o) const {
    return kind == o.kind && q0 == o.q0 && q1 == o.q1 && cbit == o.cbit &&
           angle == o.angle;
  }
};

struct CircuitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : CircuitError {
  int line, column;
  ParseError(const std::string& msg, int l, int c)
      : CircuitError(msg + " (line " + std::to_string(l) + ", column " +
                     std::to_string(c) + ")"),
        line(l),
        column(c) {}
};

struct Circuit {
  int num_qubits = 0;
  int num_clbits = 0;
  std::string name;
  std::vector<Op> ops;

  void append(Op op) {
    check_op(op, static_cast<int>(ops.size()));
    ops.push_back(op);
  }

  // Structural well-formedness: operand ranges, arity, no re-measured
  // classical bit.
  void validate() const {
    std::vector<char> cl_written(num_clbits, 0);
    for (std::size_t i = 0; i < ops.size(); ++i) {
      check_op(ops[i], static_cast<int>(i));
      if (ops[i].kind == OpKind::Measure) {
        if (cl_written[ops[i].cbit])
          throw CircuitError("classical bit " + std::to_string(ops[i].cbit) +
                             " measured more than once");
        cl_written[ops[i].cbit] = 1;
      }
    }
  }

  // Reuse semantics: a reset on q must come after a measurement on q.
  // Checked separately from validate() since characterization circuits
  // legitimately reset freshly prepared qubits.
  void validate_reset_after_measure() const {
    std::vector<char> measured(num_qubits, 0);
    for (const Op& op : ops) {
      if (op.kind == OpKind::Measure) measured[op.q0] = 1;
      if (op.kind == OpKind::Reset && !measured[op.q0])
        throw CircuitError("reset on qubit " + std::to_string(op.q0) +
                           " before any measurement of it");
    }
  }

  int count(OpKind k) const {
    int n = 0;
    for (const Op& op : ops)
      if (op.kind == k) ++n;
    return n;
  }

  bool operator==(const Circuit& o) const {
    return num_qubits == o.num_qubits && num_clbits == o.num_clbits &&
           ops == o.ops;
  }

 private:
  void check_op(const Op& op, int idx) const {
    auto bad = [&](const std::string& what) {
      throw CircuitError("op " + std::to_string(idx) + " (" +
                         op_name(op.kind) + "): " + what);
    };
    if (op.q0 < 0 || op.q0 >= num_qubits) bad("qubit index out of range");
    if (is_two_qubit(op.kind) ||
        (op.kind == OpKind::Barrier && op.q1 >= 0)) {
      if (is_two_qubit(op.kind) && op.q1 < 0) bad("missing second operand");
      if (op.q1 >= 0) {
        if (op.q1 >= num_qubits) bad("qubit index out of range");
        if (op.q1 == op.q0) bad("operands must be distinct");
      }
    } else if (op.q1 != -1) {
      bad("unexpected second operand");
    }
    if (op.kind == OpKind::Measure) {
      if (op.cbit < 0 || op.cbit >= num_clbits)
        bad("classical index out of range");
    } else if (op.cbit != -1) {
      bad("unexpected classical operand");
    }
    if (op.kind == OpKind::RZ && !std::isfinite(op.angle))
      bad("non-finite angle");
  }
};

// ---------------------------------------------------------------------------
// Benchmark generators

// Bernstein-Vazirani over n qubits with an (n-1)-bit secret. Qubit n-1 is
// the target; controls carry the measurements.
inline Circuit generate_bv(int n, const std::string& secret) {
  if (n < 2) throw CircuitError("generate_bv: need at least 2 qubits");
  if (static_cast<int>(secret.size()) != n - 1)
    throw CircuitError("generate_bv: secret must have length n-1");
  Circuit c;
  c.num_qubits = n;
  c.num_clbits = n - 1;
  c.name = "bv" + std::to_string(n);
  for (int q = 0; q < n - 1; ++q) c.append({OpKind::H, q});
  c.append({OpKind::X, n - 1});
  c.append({OpKind::H, n - 1});
  for (int q = 0; q < n - 1; ++q)
    if (secret[q] == '1') c.append({OpKind::CX, q, n - 1});
  for (int q = 0; q < n - 1; ++q) c.append({OpKind::H, q});
  for (int q = 0; q < n - 1; ++q) c.append({OpKind::Measure, q, -1, 0, q});
  return c;
}

// Nearest-neighbour CX ladder with interleaved Hadamard layers; needs only
// a path in the coupling graph.
inline Circuit generate_h_ladder(int n) {
  if (n < 2) throw CircuitError("generate_h_ladder: need at least 2 qubits");
  Circuit c;
  c.num_qubits = n;
  c.num_clbits = n;
  c.name = "h_ladder" + std::to_string(n);
  for (int q = 0; q < n; ++q) c.append({OpKind::H, q});
  for (int q = 0; q + 1 < n; ++q) {
    c.append({OpKind::CX, q, q + 1});
    c.append({OpKind::H, q});
  }
  c.append({OpKind::H, n - 1});
  for (int q = 0; q < n; ++q) c.append({OpKind::Measure, q, -1, 0, q});
  return c;
}

// ---------------------------------------------------------------------------
// Dependency DAG

struct DependencyDag {
  int num_nodes = 0;
  std::vector<std::pair<int, int>> edges;  // (i, j) with i before j
};

// Immediate-predecessor edges per qubit and classical bit. This is a
// transitive reduction of the full same-resource ordering.
inline DependencyDag build_dag(const Circuit& c) {
  DependencyDag dag;
  dag.num_nodes = static_cast<int>(c.ops.size());
  std::vector<int> last_q(c.num_qubits, -1);
  std::vector<int> last_c(c.num_clbits, -1);
  for (int i = 0; i < dag.num_nodes; ++i) {
    const Op& op = c.ops[i];
    std::set<int> preds;
    auto touch = [&](std::vector<int>& last, int idx) {
      if (last[idx] >= 0) preds.insert(last[idx]);
      last[idx] = i;
    };
    touch(last_q, op.q0);
    if (op.q1 >= 0) touch(last_q, op.q1);
    if (op.kind == OpKind::Measure) touch(last_c, op.cbit);
    for (int p : preds) dag.edges.emplace_back(p, i);
  }
  return dag;
}

// ---------------------------------------------------------------------------
// Interaction graph (logical two-qubit connectivity)

struct InteractionGraph {
  int num_nodes = 0;
  std::set<std::pair<int, int>> edges;  // normalized a < b

  bool has_edge(int a, int b) const {
    if (a > b) std::swap(a, b);
    return edges.count({a, b}) != 0;
  }
};

inline InteractionGraph interaction_graph(const Circuit& c) {
  InteractionGraph g;
  g.num_nodes = c.num_qubits;
  for (const Op& op : c.ops) {
    if (is_two_qubit(op.kind)) {
      int a = op.q0, b = op.q1;
      if (a > b) std::swap(a, b);
      g.edges.insert({a, b});
    }
  }
  return g;
}

// ---------------------------------------------------------------------------
// OpenQASM 2 subset

namespace detail {

class QasmLexer {
 public:
  explicit QasmLexer(const std::string& src) : src_(src) {}

  struct Tok {
    std::string text;
    int line, col;
  };

  // Returns an empty token at end of input.
  Tok next() {
    skip_ws();
    Tok t{"", line_, col_};
    if (pos_ >= src_.size()) return t;
    char ch = src_[pos_];
    if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
              src_[pos_] == '_')) {
        t.text += src_[pos_];
        advance();
      }
    } else if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.') {
      bool seen_e = false;
      while (pos_ < src_.size()) {
        char c2 = src_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c2)) || c2 == '.') {
          t.text += c2;
          advance();
        } else if ((c2 == 'e' || c2 == 'E') && !seen_e) {
          seen_e = true;
          t.text += c2;
          advance();
          if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) {
            t.text += src_[pos_];
            advance();
          }
        } else {
          break;
        }
      }
    } else if (ch == '-' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '>') {
      t.text = "->";
      advance();
      advance();
    } else {
      t.text = std::string(1, ch);
      advance();
    }
    return t;
  }

 private:
  void skip_ws() {
    while (pos_ < src_.size()) {
      char ch = src_[pos_];
      if (ch == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(ch))) {
        advance();
      } else {
        break;
      }
    }
  }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  const std::string& src_;
  std::size_t pos_ = 0;
  int line_ = 1, col_ = 1;
};

// Recursive-descent evaluator for angle expressions: pi, literals, + - * /,
// parentheses, unary minus.
class AngleParser {
 public:
  AngleParser(std::vector<QasmLexer::Tok> toks) : toks_(std::move(toks)) {}

  double parse() {
    double v = expr();
    if (pos_ < toks_.size())
      fail("trailing tokens in angle expression", toks_[pos_]);
    return v;
  }

 private:
  double expr() {
    double v = term();
    while (pos_ < toks_.size() &&
           (toks_[pos_].text == "+" || toks_[pos_].text == "-")) {
      bool plus = toks_[pos_].text == "+";
      ++pos_;
      double r = term();
      v = plus ? v + r : v - r;
    }
    return v;
  }

  double term() {
    double v = factor();
    while (pos_ < toks_.size() &&
           (toks_[pos_].text == "*" || toks_[pos_].text == "/")) {
      bool mul = toks_[pos_].text == "*";
      ++pos_;
      double r = factor();
      v = mul ? v * r : v / r;
    }
    return v;
  }

  double factor() {
    if (pos_ >= toks_.size()) fail("unexpected end of angle expression",
                                   toks_.empty() ? QasmLexer::Tok{"", 0, 0}
                                                 : toks_.back());
    auto t = toks_[pos_];
    if (t.text == "-") {
      ++pos_;
      return -factor();
    }
    if (t.text == "+") {
      ++pos_;
      return factor();
    }
    if (t.text == "(") {
      ++pos_;
      double v = expr();
      if (pos_ >= toks_.size() || toks_[pos_].text != ")")
        fail("expected ')'", t);
      ++pos_;
      return v;
    }
    if (t.text == "pi") {
      ++pos_;
      return M_PI;
    }
    char* end = nullptr;
    double v = std::strtod(t.text.c_str(), &end);
    if (end == t.text.c_str() || *end != '\0')
      fail("bad token '" + t.text + "' in angle expression", t);
    ++pos_;
    return v;
  }

  [[noreturn]] void fail(const std::string& msg, const QasmLexer::Tok& t) {
    throw ParseError(msg, t.line, t.col);
  }

  std::vector<QasmLexer::Tok> toks_;
  std::size_t pos_ = 0;
};

}  // namespace detail

// Parses an OpenQASM-2-style subset: one quantum and one classical register,
// gate set restricted to Op. Multi-qubit barriers are expanded to a chain of
// two-qubit barriers so every stored op has at most two operands.
inline Circuit parse_qasm(const std::string& source) {
  detail::QasmLexer lex(source);
  Circuit c;
  std::string qreg_name, creg_name;
  auto fail = [](const std::string& msg, const detail::QasmLexer::Tok& t)
      -> void { throw ParseError(msg, t.line, t.col); };

  auto expect = [&](const std::string& want) {
    auto t = lex.next();
    if (t.text != want) fail("expected '" + want + "', got '" + t.text + "'", t);
    return t;
  };
  auto parse_index = [&](const std::string& reg_expected,
                         int reg_size) -> int {
    auto t = lex.next();
    if (t.text != reg_expected)
      fail("unknown register '" + t.text + "'", t);
    expect("[");
    auto it = lex.next();
    int idx = -1;
    try {
      std::size_t used = 0;
      idx = std::stoi(it.text, &used);
      if (used != it.text.size()) throw std::invalid_argument("");
    } catch (...) {
      fail("expected register index", it);
    }
    expect("]");
    if (idx < 0 || idx >= reg_size)
      fail("index " + std::to_string(idx) + " out of range", it);
    return idx;
  };

  for (;;) {
    auto t = lex.next();
    if (t.text.empty()) break;
    if (t.text == "OPENQASM") {
      // version token, e.g. 2.0
      lex.next();
      expect(";");
    } else if (t.text == "include") {
      // include "qelib1.inc";  -- skip to the terminating semicolon
      for (;;) {
        auto u = lex.next();
        if (u.text.empty()) fail("unterminated include", t);
        if (u.text == ";") break;
      }
    } else if (t.text == "qreg" || t.text == "creg") {
      bool quantum = t.text == "qreg";
      auto nt = lex.next();
      if (nt.text.empty() ||
          !(std::isalpha(static_cast<unsigned char>(nt.text[0])) ||
            nt.text[0] == '_'))
        fail("expected register name", nt);
      if (quantum && !qreg_name.empty())
        fail("only one quantum register supported", nt);
      if (!quantum && !creg_name.empty())
        fail("only one classical register supported", nt);
      expect("[");
      auto st = lex.next();
      int size = 0;
      try {
        size = std::stoi(st.text);
      } catch (...) {
        fail("expected register size", st);
      }
      if (size <= 0) fail("register size must be positive", st);
      expect("]");
      expect(";");
      if (quantum) {
        qreg_name = nt.text;
        c.num_qubits = size;
      } else {
        creg_name = nt.text;
        c.num_clbits = size;
      }
    } else {
      auto kind = op_from_name(t.text);
      if (!kind) fail("unsupported gate '" + t.text + "'", t);
      if (qreg_name.empty()) fail("gate before qreg declaration", t);
      double angle = 0;
      if (*kind == OpKind::RZ) {
        expect("(");
        std::vector<detail::QasmLexer::Tok> toks;
        int depth = 0;
        for (;;) {
          auto u = lex.next();
          if (u.text.empty()) fail("unterminated angle expression", t);
          if (u.text == "(") ++depth;
          if (u.text == ")") {
            if (depth == 0) break;
            --depth;
          }
          toks.push_back(u);
        }
        angle = detail::AngleParser(std::move(toks)).parse();
        if (!std::isfinite(angle)) fail("angle is not finite", t);
      }
      if (*kind == OpKind::Measure) {
        int q = parse_index(qreg_name, c.num_qubits);
        expect("->");
        if (creg_name.empty()) fail("measure before creg declaration", t);
        int cb = parse_index(creg_name, c.num_clbits);
        expect(";");
        Op op{OpKind::Measure, q, -1, 0, cb};
        try {
          c.append(op);
          // re-measured classical bit check
          int seen = 0;
          for (const Op& o : c.ops)
            if (o.kind == OpKind::Measure && o.cbit == cb) ++seen;
          if (seen > 1)
            fail("classical bit " + std::to_string(cb) +
                     " measured more than once",
                 t);
        } catch (const ParseError&) {
          throw;
        } catch (const CircuitError& e) {
          fail(e.what(), t);
        }
      } else {
        std::vector<int> qubits;
        qubits.push_back(parse_index(qreg_name, c.num_qubits));
        for (;;) {
          auto u = lex.next();
          if (u.text == ";") break;
          if (u.text != ",") fail("expected ',' or ';'", u);
          qubits.push_back(parse_index(qreg_name, c.num_qubits));
        }
        auto emit = [&](Op op) {
          try {
            c.append(op);
          } catch (const CircuitError& e) {
            fail(e.what(), t);
          }
        };
        if (*kind == OpKind::Barrier) {
          if (qubits.size() == 1) {
            emit({OpKind::Barrier, qubits[0]});
          } else {
            for (std::size_t i = 0; i + 1 < qubits.size(); ++i)
              emit({OpKind::Barrier, qubits[i], qubits[i + 1]});
          }
        } else if (is_two_qubit(*kind)) {
          if (qubits.size() != 2) fail("two operands required", t);
          emit({*kind, qubits[0], qubits[1], angle});
        } else {
          if (qubits.size() != 1) fail("one operand required", t);
          emit({*kind, qubits[0], -1, angle});
        }
      }
    }
  }
  if (c.num_qubits == 0) throw ParseError("no quantum register declared", 1, 1);
  c.validate();
  return c;
}

// Canonical printer: one op per line, lowercase mnemonics, angles with 17
// significant digits (lossless for double). parse_qasm(to_qasm(c)) == c.
inline std::string to_qasm(const Circuit& c) {
  std::ostringstream out;
  out << "OPENQASM 2.0;\n";
  out << "include \"qelib1.inc\";\n";
  out << "qreg q[" << c.num_qubits << "];\n";
  if (c.num_clbits > 0) out << "creg c[" << c.num_clbits << "];\n";
  for (const Op& op : c.ops) {
    out << op_name(op.kind);
    if (op.kind == OpKind::RZ) {
      std::ostringstream a;
      a.precision(17);
      a << op.angle;
      out << "(" << a.str() << ")";
    }
    out << " q[" << op.q0 << "]";
    if (op.q1 >= 0) out << ",q[" << op.q1 << "]";
    if (op.kind == OpKind::Measure) out << " -> c[" << op.cbit << "]";
    out << ";\n";
  }
  return out.str();
}

}  // namespace reuseq
