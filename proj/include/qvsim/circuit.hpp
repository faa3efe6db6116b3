// Copyright 2026 The qvsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <charconv>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "qvsim/adqc.hpp"
#include "qvsim/core.hpp"
#include "qvsim/logical.hpp"
#include "qvsim/mincontrol.hpp"

// Line-oriented circuit files:
//
//   # comment
//   dim 3
//   qvs 2
//   variant E            (or checkE, hybrid:K)
//   init 0 +1            (one token per QV: q or +q)
//   seed 42
//   force 2,0,1
//   gate F 0
//   gate P 1 0           (p, target)
//   gate X 2 0           (shift, target)
//   gate Z 1 0           (power, target)
//   gate CZ 0 1
//   gate R 0 [0.0,0.3,1.1]
//   gate D3 1 0 [c=1]    (q', target, optional cubic constant c=1 or c=d3)
//   measure 0
//
// `dim` and `qvs` must come before any line that names a QV.

namespace qvsim {

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// One QV of the initial product state: |q> or |+_q>.
struct InitLabel {
  int q = 0;
  bool plus = false;
  bool operator==(const InitLabel&) const = default;
};

struct CircuitFile {
  int d = 0;
  std::size_t n = 0;
  Interaction interaction;
  std::vector<InitLabel> init;  ///< empty means |0...0>
  std::optional<std::uint64_t> seed;
  std::vector<int> forced;
  std::vector<LogicalOp> ops;

  LogicalCircuit logical() const { return {d, n, ops}; }

  QState initial_state() const {
    QState s;
    for (std::size_t k = 0; k < n; ++k) {
      const InitLabel l = init.empty() ? InitLabel{} : init[k];
      s = tensor(s, l.plus ? make_plus_state(d, l.q) : make_basis_state(std::vector<int>{d}, std::vector<int>{l.q}));
    }
    return s;
  }
};

namespace detail {

inline std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream in{std::string(s)};
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

inline long long parse_int(const std::string& tok, int line, const char* what) {
  long long v = 0;
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || p != tok.data() + tok.size()) {
    throw ParseError(line, std::string("expected an integer ") + what + ", got '" + tok + "'");
  }
  return v;
}

inline std::uint64_t parse_u64(const std::string& tok, int line, const char* what) {
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || p != tok.data() + tok.size()) {
    throw ParseError(line, std::string("expected a non-negative integer ") + what + ", got '" + tok + "'");
  }
  return v;
}

inline double parse_double(const std::string& tok, int line) {
  try {
    std::size_t used = 0;
    double v = std::stod(tok, &used);
    if (used != tok.size() || !std::isfinite(v)) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw ParseError(line, "expected a number, got '" + tok + "'");
  }
}

inline std::vector<int> parse_int_list(const std::string& s, int line) {
  std::vector<int> out;
  std::string tok;
  std::istringstream in(s);
  while (std::getline(in, tok, ',')) {
    if (tok.empty()) throw ParseError(line, "empty entry in list");
    out.push_back(static_cast<int>(parse_int(tok, line, "list entry")));
  }
  return out;
}

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

inline CircuitFile parse_circuit(std::string_view text) {
  CircuitFile c;
  bool have_dim = false, have_qvs = false, have_variant = false;
  std::vector<bool> measured;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string line(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    std::vector<std::string> tok = detail::split_ws(line);
    if (tok.empty()) continue;
    const std::string& kw = tok[0];
    const int ln = line_no;

    auto need_header = [&] {
      if (!have_dim || !have_qvs) throw ParseError(ln, "'" + kw + "' before dim and qvs");
    };
    auto arity = [&](std::size_t k) {
      if (tok.size() != k + 1) {
        throw ParseError(ln, "'" + kw + "' takes " + std::to_string(k) + " argument(s), got " +
                                 std::to_string(tok.size() - 1));
      }
    };
    auto target = [&](const std::string& t) {
      long long v = detail::parse_int(t, ln, "QV index");
      if (v < 0 || static_cast<std::size_t>(v) >= c.n) throw ParseError(ln, "QV index " + t + " out of range");
      if (measured[static_cast<std::size_t>(v)]) throw ParseError(ln, "QV " + t + " was already measured");
      return static_cast<std::size_t>(v);
    };
    auto param = [&](const std::string& t) {
      long long v = detail::parse_int(t, ln, "parameter");
      return mod(v, c.d);
    };

    if (kw == "dim") {
      arity(1);
      if (have_dim) throw ParseError(ln, "duplicate dim");
      long long d = detail::parse_int(tok[1], ln, "dimension");
      if (d < 2 || d > 1 << 16) throw ParseError(ln, "dimension must be in [2, 65536]");
      c.d = static_cast<int>(d);
      have_dim = true;
    } else if (kw == "qvs") {
      arity(1);
      if (have_qvs) throw ParseError(ln, "duplicate qvs");
      long long n = detail::parse_int(tok[1], ln, "QV count");
      if (n < 1 || n > 64) throw ParseError(ln, "QV count must be in [1, 64]");
      c.n = static_cast<std::size_t>(n);
      measured.assign(c.n, false);
      have_qvs = true;
    } else if (kw == "variant") {
      arity(1);
      if (have_variant) throw ParseError(ln, "duplicate variant");
      const std::string& v = tok[1];
      if (v == "E") {
        c.interaction = Interaction::standard();
      } else if (v == "checkE") {
        c.interaction = Interaction::swap_based();
      } else if (v.rfind("hybrid:", 0) == 0) {
        long long k = detail::parse_int(v.substr(7), ln, "ancilla dimension");
        if (k < 2 || k > 1 << 16) throw ParseError(ln, "ancilla dimension must be in [2, 65536]");
        c.interaction = Interaction::hybrid(static_cast<int>(k));
      } else {
        throw ParseError(ln, "unknown variant '" + v + "'");
      }
      have_variant = true;
    } else if (kw == "seed") {
      arity(1);
      c.seed = detail::parse_u64(tok[1], ln, "seed");
    } else if (kw == "force") {
      arity(1);
      std::vector<int> f = detail::parse_int_list(tok[1], ln);
      for (int m : f) {
        if (m < 0) throw ParseError(ln, "forced outcomes must be non-negative");
      }
      c.forced.insert(c.forced.end(), f.begin(), f.end());
    } else if (kw == "init") {
      need_header();
      arity(c.n);
      if (!c.init.empty()) throw ParseError(ln, "duplicate init");
      for (std::size_t k = 1; k < tok.size(); ++k) {
        InitLabel l;
        std::string t = tok[k];
        if (!t.empty() && t[0] == '+') {
          l.plus = true;
          t.erase(0, 1);
        }
        long long q = detail::parse_int(t, ln, "init label");
        if (q < 0 || q >= c.d) throw ParseError(ln, "init label " + tok[k] + " out of range");
        l.q = static_cast<int>(q);
        c.init.push_back(l);
      }
    } else if (kw == "measure") {
      need_header();
      arity(1);
      const std::size_t r = target(tok[1]);
      c.ops.push_back(LogicalOp::measure(r));
      measured[r] = true;
    } else if (kw == "gate") {
      need_header();
      if (tok.size() < 2) throw ParseError(ln, "'gate' needs a gate name");
      const std::string g = tok[1];
      tok.erase(tok.begin());  // arity() now counts arguments after the gate name
      if (g == "F") {
        arity(1);
        c.ops.push_back(LogicalOp::f(target(tok[1])));
      } else if (g == "P" || g == "X" || g == "Z") {
        arity(2);
        // P takes p mod 2d; X and Z take labels mod d.
        long long v = detail::parse_int(tok[1], ln, "parameter");
        const std::size_t r = target(tok[2]);
        if (g == "P") {
          c.ops.push_back(LogicalOp::phase(r, mod(v, 2 * c.d)));
        } else if (g == "X") {
          c.ops.push_back(LogicalOp::x(r, param(tok[1])));
        } else {
          c.ops.push_back(LogicalOp::z(r, param(tok[1])));
        }
      } else if (g == "CZ") {
        arity(2);
        const std::size_t r = target(tok[1]), s = target(tok[2]);
        if (r == s) throw ParseError(ln, "CZ needs two distinct QVs");
        c.ops.push_back(LogicalOp::controlled_z(r, s));
      } else if (g == "R") {
        if (tok.size() < 3) throw ParseError(ln, "'R' takes a target and a table [t0,...]");
        const std::size_t r = target(tok[1]);
        std::string list;
        for (std::size_t k = 2; k < tok.size(); ++k) list += tok[k];
        if (list.size() < 2 || list.front() != '[' || list.back() != ']') {
          throw ParseError(ln, "R table must be written [t0,t1,...]");
        }
        list = list.substr(1, list.size() - 2);
        std::vector<double> table;
        std::istringstream in(list);
        std::string entry;
        while (std::getline(in, entry, ',')) table.push_back(detail::parse_double(entry, ln));
        if (table.size() != static_cast<std::size_t>(c.d)) {
          throw ParseError(ln, "R table has " + std::to_string(table.size()) + " entries, expected " +
                                   std::to_string(c.d));
        }
        c.ops.push_back(LogicalOp::rotation(r, PhaseFunction(std::move(table))));
      } else if (g == "D3") {
        if (tok.size() != 3 && tok.size() != 4) throw ParseError(ln, "'D3' takes q', a target and an optional c=1|c=d3");
        // q' is not reduced: with c = d^3 the phase has period d^4 in q'.
        const long long qp = detail::parse_int(tok[1], ln, "parameter");
        if (qp < -1000000 || qp > 1000000) throw ParseError(ln, "D3 parameter out of range");
        const std::size_t r = target(tok[2]);
        CubicConstant cc = CubicConstant::kDimensionCubed;
        if (tok.size() == 4) {
          if (tok[3] == "c=1") {
            cc = CubicConstant::kOne;
            if (!unit_cubic_constant_allowed(c.d)) throw ParseError(ln, "c=1 needs a prime dimension > 3");
          } else if (tok[3] != "c=d3") {
            throw ParseError(ln, "unknown cubic constant '" + tok[3] + "'");
          }
        }
        c.ops.push_back(LogicalOp::cubic_phase(r, static_cast<int>(qp), cc));
      } else {
        throw ParseError(ln, "unknown gate '" + g + "'");
      }
    } else {
      throw ParseError(ln, "unknown keyword '" + kw + "'");
    }
  }
  if (!have_dim) throw ParseError(line_no, "missing dim");
  if (!have_qvs) throw ParseError(line_no, "missing qvs");
  return c;
}

/// Canonical text form; parse(serialize(c)) == c.
inline std::string serialize_circuit(const CircuitFile& c) {
  std::ostringstream out;
  out << "dim " << c.d << "\n" << "qvs " << c.n << "\n";
  if (c.interaction.kind != InteractionKind::kStandard) out << "variant " << c.interaction.label() << "\n";
  if (!c.init.empty()) {
    out << "init";
    for (const InitLabel& l : c.init) out << ' ' << (l.plus ? "+" : "") << l.q;
    out << "\n";
  }
  if (c.seed) out << "seed " << *c.seed << "\n";
  if (!c.forced.empty()) {
    out << "force ";
    for (std::size_t k = 0; k < c.forced.size(); ++k) out << (k ? "," : "") << c.forced[k];
    out << "\n";
  }
  for (const LogicalOp& op : c.ops) {
    const std::size_t r = op.targets[0];
    switch (op.kind) {
      case LogicalOp::Kind::kF: out << "gate F " << r; break;
      case LogicalOp::Kind::kP: out << "gate P " << op.param << ' ' << r; break;
      case LogicalOp::Kind::kX: out << "gate X " << op.param << ' ' << r; break;
      case LogicalOp::Kind::kZ: out << "gate Z " << op.param << ' ' << r; break;
      case LogicalOp::Kind::kCZ: out << "gate CZ " << r << ' ' << op.targets[1]; break;
      case LogicalOp::Kind::kR: {
        out << "gate R " << r << " [";
        for (int q = 0; q < op.table.dim(); ++q) out << (q ? "," : "") << detail::format_double(op.table.table()[q]);
        out << "]";
        break;
      }
      case LogicalOp::Kind::kD3:
        out << "gate D3 " << op.param << ' ' << r;
        if (op.cubic == CubicConstant::kOne) out << " c=1";
        break;
      case LogicalOp::Kind::kMeasure: out << "measure " << r; break;
    }
    out << "\n";
  }
  return out.str();
}

inline bool operator==(const LogicalOp& a, const LogicalOp& b) {
  return a.kind == b.kind && a.targets == b.targets && a.param == b.param && a.table.table() == b.table.table() &&
         a.cubic == b.cubic;
}

inline bool operator==(const CircuitFile& a, const CircuitFile& b) {
  return a.d == b.d && a.n == b.n && a.interaction == b.interaction && a.init == b.init && a.seed == b.seed &&
         a.forced == b.forced && a.ops == b.ops;
}

// ---------------------------------------------------------------------------
// Running.

enum class Mode { kDirect, kAdqc, kMinControl };

enum class McSpecKind { kAppendixB, kCZ };

struct RunConfig {
  Mode mode = Mode::kDirect;
  bool compare = false;
  std::optional<std::uint64_t> seed;         ///< overrides the file's seed
  std::optional<std::vector<int>> forced;    ///< overrides the file's force line
  std::optional<std::uint64_t> spec_seed;    ///< minimal-control spec; defaults to the run seed
  McSpecKind mc_spec = McSpecKind::kAppendixB;
};

inline const char* mode_name(Mode m) {
  switch (m) {
    case Mode::kDirect: return "direct";
    case Mode::kAdqc: return "adqc";
    case Mode::kMinControl: return "mincontrol";
  }
  return "?";
}

namespace detail {

/// 15 significant digits, with -0 and sub-1e-14 noise mapped to 0.
inline double round15(double v) {
  if (std::abs(v) < 1e-14) return 0.0;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return std::strtod(buf, nullptr);
}

inline nlohmann::ordered_json amplitudes_json(const QState& s, bool canonical_phase) {
  Complex ref(1.0, 0.0);
  if (canonical_phase) {
    for (const Complex& a : s.amps()) {
      if (std::abs(a) > 1e-9) {
        ref = std::conj(a) / std::abs(a);
        break;
      }
    }
  }
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (const Complex& a : s.amps()) {
    const Complex b = a * ref;
    out.push_back({round15(b.real()), round15(b.imag())});
  }
  return out;
}

inline nlohmann::ordered_json frame_json(const PauliFrame& f) {
  nlohmann::ordered_json x = nlohmann::ordered_json::array(), z = nlohmann::ordered_json::array();
  for (std::size_t k = 0; k < f.size(); ++k) {
    x.push_back(f.x(k));
    z.push_back(f.z(k));
  }
  nlohmann::ordered_json out;
  out["x"] = x;
  out["z"] = z;
  if (f.xi()) {
    out["xi"] = *f.xi();
  } else {
    out["xi"] = nullptr;
  }
  return out;
}

}  // namespace detail

inline MinControlSpec make_mc_spec(int d, McSpecKind kind, std::uint64_t seed) {
  return kind == McSpecKind::kCZ ? cz_spec(d) : appendixB_spec(d, seed);
}

/// Layer and adaptivity summary of the compiled program.
inline nlohmann::ordered_json report_layers(const CircuitFile& c) {
  const AdqcProgram program = compile_logical(c.logical(), c.interaction);
  const LayerReport r = schedule(program);
  nlohmann::ordered_json out;
  out["variant"] = c.interaction.label();
  out["steps"] = program.steps.size();
  out["layers"] = r.layers;
  out["adaptive_measurements"] = r.adaptive_measurements;
  out["ancillas"] = r.ancillas;
  out["interactions"] = r.interactions;
  return out;
}

/// Runs one mode and builds the result document.
inline nlohmann::ordered_json run_mode(const CircuitFile& c, const RunConfig& cfg) {
  const LogicalCircuit circuit = c.logical();
  circuit.validate();
  const std::uint64_t seed = cfg.seed.value_or(c.seed.value_or(0));
  const std::vector<int> forced = cfg.forced.value_or(c.forced);
  const QState input = c.initial_state();

  nlohmann::ordered_json doc;
  doc["mode"] = mode_name(cfg.mode);
  doc["dim"] = c.d;
  doc["qvs"] = c.n;
  doc["variant"] = c.interaction.label();
  doc["seed"] = seed;

  auto surviving_json = [](const std::vector<std::size_t>& s) {
    nlohmann::ordered_json a = nlohmann::ordered_json::array();
    for (std::size_t k : s) a.push_back(k);
    return a;
  };
  auto direct_with = [&](std::vector<int> f) {
    OutcomeSource src(std::move(f), seed);
    return run_direct(circuit, input, src);
  };

  if (cfg.mode == Mode::kDirect) {
    DirectResult r = direct_with(forced);
    doc["surviving_qvs"] = surviving_json(r.surviving);
    doc["amplitudes"] = detail::amplitudes_json(r.state, true);
    doc["measurements"] = r.measurements;
    if (cfg.compare) {
      DirectResult again = direct_with(r.measurements);
      doc["fidelity"] = detail::round15(fidelity(r.state, again.state));
    }
    return doc;
  }

  if (cfg.mode == Mode::kAdqc) {
    const AdqcProgram program = compile_logical(circuit, c.interaction);
    OutcomeSource src(forced, seed);
    RunOptions options;
    options.stochastic = !c.interaction.deterministic(c.d);
    RunResult r = run(program, input, src, options);
    const QState logical = logical_state(r);
    doc["surviving_qvs"] = surviving_json(r.surviving);
    doc["deterministic"] = r.deterministic;
    doc["amplitudes"] = detail::amplitudes_json(logical, true);
    doc["raw_amplitudes"] = detail::amplitudes_json(r.state, false);
    doc["frame"] = detail::frame_json(r.frame);
    doc["outcomes"] = r.outcomes;
    doc["measurements"] = r.measurements;
    nlohmann::ordered_json obs = nlohmann::ordered_json::array();
    for (const MeasurementRecord& rec : r.records) obs.push_back(rec.observable);
    doc["observables"] = obs;
    doc["layers"] = r.report.layers;
    doc["adaptive_measurements"] = r.report.adaptive_measurements;
    doc["ancillas"] = r.report.ancillas;
    doc["interactions"] = r.report.interactions;
    doc["peak_subsystems"] = r.peak_subsystems;
    nlohmann::ordered_json res = nlohmann::ordered_json::array();
    for (const ResidualError& e : r.residuals) res.push_back({{"step", e.step}, {"qv", e.qv}, {"gate", e.gate.name()}});
    doc["residuals"] = res;
    if (cfg.compare) {
      DirectResult d = direct_with(r.measurements);
      doc["fidelity"] = detail::round15(fidelity(logical, d.state));
    }
    return doc;
  }

  if (c.interaction.kind != InteractionKind::kStandard) {
    throw std::invalid_argument("mincontrol mode does not use the " + c.interaction.label() + " interaction");
  }
  const std::uint64_t spec_seed = cfg.spec_seed.value_or(seed);
  const MinControlSpec spec = make_mc_spec(c.d, cfg.mc_spec, spec_seed);
  OutcomeSource src(forced, seed);
  MinControlResult r = run_mincontrol(circuit, input, spec, src);
  doc["mc_spec"] = cfg.mc_spec == McSpecKind::kCZ ? "cz" : "appendixB";
  doc["spec_seed"] = spec_seed;
  doc["surviving_qvs"] = surviving_json(r.surviving);
  doc["amplitudes"] = detail::amplitudes_json(r.state, true);
  doc["measurements"] = r.measurements;
  doc["ancillas"] = r.ancillas;
  doc["interactions"] = r.interactions;
  doc["min_purity"] = detail::round15(r.min_purity);
  if (cfg.compare) {
    DirectResult d = direct_with(r.measurements);
    doc["fidelity"] = detail::round15(fidelity(r.state, d.state));
  }
  return doc;
}

}  // namespace qvsim
