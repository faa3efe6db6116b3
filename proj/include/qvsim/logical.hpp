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

#include <algorithm>
#include <string>
#include <vector>

#include "qvsim/core.hpp"
#include "qvsim/gates.hpp"

namespace qvsim {

/// One operation of a logical circuit over the alphabet {F, P, X, Z, CZ, R, D3, measure}.
/// Targets are register QV labels; they stay valid after other QVs are measured.
struct LogicalOp {
  enum class Kind { kF, kP, kX, kZ, kCZ, kR, kD3, kMeasure };

  Kind kind = Kind::kF;
  std::vector<std::size_t> targets;
  int param = 0;  ///< p for P, shift for X, power for Z, q' for D3
  PhaseFunction table;
  CubicConstant cubic = CubicConstant::kDimensionCubed;

  static LogicalOp make(Kind k, std::vector<std::size_t> targets, int param = 0) {
    LogicalOp op;
    op.kind = k;
    op.targets = std::move(targets);
    op.param = param;
    return op;
  }
  static LogicalOp f(std::size_t r) { return make(Kind::kF, {r}); }
  static LogicalOp phase(std::size_t r, int p) { return make(Kind::kP, {r}, p); }
  static LogicalOp x(std::size_t r, int q) { return make(Kind::kX, {r}, q); }
  static LogicalOp z(std::size_t r, int q) { return make(Kind::kZ, {r}, q); }
  static LogicalOp controlled_z(std::size_t r, std::size_t s) { return make(Kind::kCZ, {r, s}); }
  static LogicalOp rotation(std::size_t r, PhaseFunction t) {
    LogicalOp op = make(Kind::kR, {r});
    op.table = std::move(t);
    return op;
  }
  static LogicalOp cubic_phase(std::size_t r, int qp, CubicConstant c = CubicConstant::kDimensionCubed) {
    LogicalOp op = make(Kind::kD3, {r}, qp);
    op.cubic = c;
    return op;
  }
  static LogicalOp measure(std::size_t r) { return make(Kind::kMeasure, {r}); }

  bool is_clifford() const {
    return kind == Kind::kF || kind == Kind::kP || kind == Kind::kX || kind == Kind::kZ ||
           kind == Kind::kCZ;
  }
};

inline const char* op_name(LogicalOp::Kind k) {
  switch (k) {
    case LogicalOp::Kind::kF: return "F";
    case LogicalOp::Kind::kP: return "P";
    case LogicalOp::Kind::kX: return "X";
    case LogicalOp::Kind::kZ: return "Z";
    case LogicalOp::Kind::kCZ: return "CZ";
    case LogicalOp::Kind::kR: return "R";
    case LogicalOp::Kind::kD3: return "D3";
    case LogicalOp::Kind::kMeasure: return "measure";
  }
  return "?";
}

struct LogicalCircuit {
  int d = 2;
  std::size_t n = 1;
  std::vector<LogicalOp> ops;

  void validate() const {
    if (d < 2) throw std::invalid_argument("dimension must be >= 2");
    std::vector<bool> measured(n, false);
    for (const LogicalOp& op : ops) {
      const std::size_t arity = op.kind == LogicalOp::Kind::kCZ ? 2 : 1;
      if (op.targets.size() != arity) throw std::invalid_argument(std::string(op_name(op.kind)) + ": wrong target count");
      for (std::size_t t : op.targets) {
        if (t >= n) throw std::out_of_range(std::string(op_name(op.kind)) + ": target out of range");
        if (measured[t]) throw std::invalid_argument("operation on an already measured QV");
      }
      if (arity == 2 && op.targets[0] == op.targets[1]) throw std::invalid_argument("CZ needs distinct targets");
      if (op.kind == LogicalOp::Kind::kR && op.table.dim() != d) {
        throw std::invalid_argument("R table length must equal the dimension");
      }
      if (op.kind == LogicalOp::Kind::kMeasure) measured[op.targets[0]] = true;
    }
  }
};

/// The unitary of a non-measurement logical op.
inline Gate logical_gate(const LogicalOp& op, int d) {
  switch (op.kind) {
    case LogicalOp::Kind::kF: return fourier(d);
    case LogicalOp::Kind::kP: return phase_gate(d, op.param);
    case LogicalOp::Kind::kX: return pauli_x(d, op.param);
    case LogicalOp::Kind::kZ: return pauli_z(d, op.param);
    case LogicalOp::Kind::kCZ: return cz(d);
    case LogicalOp::Kind::kR: return rotation(op.table);
    case LogicalOp::Kind::kD3: return cubic_phase(d, op.param, op.cubic);
    case LogicalOp::Kind::kMeasure: break;
  }
  throw std::invalid_argument("measurement has no unitary");
}

/// Tracks where each surviving register QV sits in the state vector.
class RegisterMap {
 public:
  explicit RegisterMap(std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) live_.push_back(k);
  }

  std::size_t position(std::size_t label) const {
    auto it = std::find(live_.begin(), live_.end(), label);
    if (it == live_.end()) throw std::invalid_argument("QV " + std::to_string(label) + " was already measured");
    return static_cast<std::size_t>(it - live_.begin());
  }

  void remove(std::size_t label) { live_.erase(live_.begin() + static_cast<std::ptrdiff_t>(position(label))); }
  void swap_labels(std::size_t a, std::size_t b) {
    std::size_t pa = position(a), pb = position(b);
    std::swap(live_[pa], live_[pb]);
  }
  const std::vector<std::size_t>& live() const { return live_; }

 private:
  std::vector<std::size_t> live_;
};

struct DirectResult {
  QState state;
  std::vector<std::size_t> surviving;
  std::vector<int> measurements;  ///< one per measure op, in circuit order
};

/// Brute-force execution: every gate applied as a unitary, measurements destructive.
inline DirectResult run_direct(const LogicalCircuit& circuit, QState state, OutcomeSource& source) {
  circuit.validate();
  if (state.num_subsystems() != circuit.n) throw std::invalid_argument("initial state size mismatch");
  RegisterMap map(circuit.n);
  DirectResult result;
  for (const LogicalOp& op : circuit.ops) {
    if (op.kind == LogicalOp::Kind::kMeasure) {
      MeasurementResult mr = measure_x(state, map.position(op.targets[0]), source);
      state = std::move(mr.post);
      map.remove(op.targets[0]);
      result.measurements.push_back(mr.outcome);
      continue;
    }
    std::vector<std::size_t> pos;
    for (std::size_t t : op.targets) pos.push_back(map.position(t));
    state = apply_gate(std::move(state), logical_gate(op, circuit.d), pos);
  }
  result.state = std::move(state);
  result.surviving = map.live();
  return result;
}

}  // namespace qvsim
