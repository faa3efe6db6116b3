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
#include <variant>
#include <vector>

#include "qvsim/core.hpp"
#include "qvsim/gates.hpp"
#include "qvsim/logical.hpp"
#include "qvsim/pauli.hpp"

// Ancilla-driven computation: a fixed ancilla-register interaction, fresh ancillas, and
// destructive ancilla measurements. Every protocol leaves a known error on the register
// that is either tracked in a Pauli frame (deterministic mode) or reported as a residual
// gate (stochastic hybrid mode).

namespace qvsim {

enum class InteractionKind {
  kStandard,   ///< E_ar = F_r F_a^dag CZ
  kSwapBased,  ///< E_ar = F_a SWAP CZ
  kHybrid,     ///< E_ar = F_r F_a^dag C^r_a Z with ancillas of a different dimension
};

struct Interaction {
  InteractionKind kind = InteractionKind::kStandard;
  int ancilla_dim = 0;  ///< hybrid only

  static Interaction standard() { return {InteractionKind::kStandard, 0}; }
  static Interaction swap_based() { return {InteractionKind::kSwapBased, 0}; }
  static Interaction hybrid(int d_a) {
    if (d_a < 2) throw std::invalid_argument("ancilla dimension must be >= 2");
    return {InteractionKind::kHybrid, d_a};
  }

  int ancilla_dimension(int d) const { return kind == InteractionKind::kHybrid ? ancilla_dim : d; }

  /// Frame tracking works iff every outcome-dependent error is Pauli, i.e. d_a divides d.
  bool deterministic(int d) const { return kind != InteractionKind::kHybrid || d % ancilla_dim == 0; }

  /// X-error multiplier k with d = k d_a.
  int error_multiplier(int d) const { return kind == InteractionKind::kHybrid ? d / ancilla_dim : 1; }

  std::string label() const {
    switch (kind) {
      case InteractionKind::kStandard: return "E";
      case InteractionKind::kSwapBased: return "checkE";
      case InteractionKind::kHybrid: return "hybrid:" + std::to_string(ancilla_dim);
    }
    return "?";
  }

  bool operator==(const Interaction&) const = default;
};

/// The two-subsystem interaction gate, ordered (register, ancilla).
inline Gate build_interaction(InteractionKind kind, int d, int d_a = 0, bool require_deterministic = false) {
  switch (kind) {
    case InteractionKind::kStandard:
      return (kron(fourier(d), fourier(d).adjoint()) * cz(d)).renamed("E");
    case InteractionKind::kSwapBased:
      return (kron(identity(d), fourier(d)) * swap(d) * cz(d)).renamed("checkE");
    case InteractionKind::kHybrid:
      if (d_a < 2) throw std::invalid_argument("hybrid interaction needs an ancilla dimension");
      if (require_deterministic && d % d_a != 0) {
        throw std::invalid_argument("deterministic hybrid mode needs d_a to divide d");
      }
      return (kron(fourier(d), fourier(d_a).adjoint()) * cz(d, d_a)).renamed("E'");
  }
  throw std::invalid_argument("unknown interaction");
}

inline Gate build_interaction(const Interaction& in, int d) {
  return build_interaction(in.kind, d, in.ancilla_dim);
}

/// The register gate an ideal entangling step implements before its error:
/// F_r F_s CZ (standard), F_r F_s CX^r_s (swap-based), F_r F_s diag(e^{2 pi i q q'/d_a}) (hybrid).
inline Gate ideal_entangler(const Interaction& in, int d) {
  const Gate ff = kron(fourier(d), fourier(d));
  switch (in.kind) {
    case InteractionKind::kStandard: return ff * cz(d);
    case InteractionKind::kSwapBased: return ff * controlled_u(pauli_x(d, 1), d);
    case InteractionKind::kHybrid: {
      std::vector<Complex> phases(static_cast<std::size_t>(d) * d);
      for (int q = 0; q < d; ++q) {
        for (int k = 0; k < d; ++k) {
          phases[static_cast<std::size_t>(q) * d + k] =
              std::polar(1.0, kTwoPi * mod(static_cast<long long>(q) * k, in.ancilla_dim) / in.ancilla_dim);
        }
      }
      return ff * Gate::diagonal("CZ_a", {d, d}, std::move(phases));
    }
  }
  throw std::invalid_argument("unknown interaction");
}

// ---------------------------------------------------------------------------
// Single protocol steps. Each appends a fresh ancilla, interacts, measures it, and
// returns the register state with the ancilla removed.

struct ProtocolStep {
  QState state;
  int outcome = 0;
  double probability = 0.0;
  MeasurementRecord record;
  std::size_t interactions = 0;
};

namespace detail {

inline ProtocolStep drive_ancilla(const QState& state, std::initializer_list<std::size_t> sites,
                                  const Gate& interaction, const QState& ancilla, const Gate& rotation,
                                  std::string label, OutcomeSource& source) {
  QState s = tensor(state, ancilla);
  const std::size_t a = s.num_subsystems() - 1;
  for (std::size_t site : sites) {
    if (site >= state.num_subsystems()) throw std::out_of_range("register site out of range");
    std::size_t t[] = {site, a};
    s = apply_gate(std::move(s), interaction, t);
  }
  MeasurementResult mr = measure_observable(s, a, rotation, source);
  ProtocolStep step;
  step.outcome = mr.outcome;
  step.probability = mr.probability;
  step.record = {*sites.begin(), std::move(label), mr.outcome, source.last_forced()};
  step.interactions = sites.size();
  step.state = std::move(mr.post);
  return step;
}

/// Removes register QV r that is known to sit in |+_m>.
inline QState discard_plus_state(const QState& state, std::size_t r, int m) {
  MeasurementResult mr = measure_observable(state, r, fourier(state.dims()[r]).adjoint(), m);
  if (std::abs(mr.probability - 1.0) > kNormTolerance) {
    throw NumericalInvariantError("register QV was not left in a conjugate basis state");
  }
  return std::move(mr.post);
}

inline std::string local_label(const PhaseFunction& theta) { return theta.is_constant() ? "x_F" : "x_FR"; }

inline std::string fp_label(int p) { return p == 1 ? "x_FP" : "x_FP(" + std::to_string(p) + ")"; }

}  // namespace detail

/// Two interactions and an x-hat measurement: register gains X_r(m) F_r F_s CZ.
inline ProtocolStep protocol_entangle(const QState& state, std::size_t r, std::size_t s, OutcomeSource& source) {
  if (r == s) throw std::invalid_argument("entangling protocol needs distinct QVs");
  const int d = state.dims()[r];
  return detail::drive_ancilla(state, {r, s}, build_interaction(InteractionKind::kStandard, d),
                               make_plus_state(d, 0), identity(d), "x", source);
}

/// One interaction and a measurement of x-hat_{F R(theta)}: register gains X_r(-m) F R(theta).
inline ProtocolStep protocol_local(const QState& state, std::size_t r, const PhaseFunction& theta,
                                   OutcomeSource& source) {
  const int d = state.dims()[r];
  if (theta.dim() != d) throw std::invalid_argument("phase table length must equal the dimension");
  return detail::drive_ancilla(state, {r}, build_interaction(InteractionKind::kStandard, d), make_plus_state(d, 0),
                               fourier(d) * rotation(theta), detail::local_label(theta), source);
}

/// Measurement of x-hat_{F P(p)}: register gains X_r(-m) F P(p).
inline ProtocolStep protocol_local_fp(const QState& state, std::size_t r, int p, OutcomeSource& source) {
  const int d = state.dims()[r];
  return detail::drive_ancilla(state, {r}, build_interaction(InteractionKind::kStandard, d), make_plus_state(d, 0),
                               fourier(d) * phase_gate(d, p), detail::fp_label(p), source);
}

/// Simulates an x-hat measurement of register QV r; QV r is removed.
inline ProtocolStep protocol_measure_x(const QState& state, std::size_t r, OutcomeSource& source) {
  const int d = state.dims()[r];
  ProtocolStep step = detail::drive_ancilla(state, {r}, build_interaction(InteractionKind::kStandard, d),
                                            make_plus_state(d, 0), identity(d), "x", source);
  step.state = detail::discard_plus_state(step.state, r, step.outcome);
  return step;
}

// Swap-based interaction.

/// Register gains X_r(m) X_s(-m) F_r F_s CX^r_s.
inline ProtocolStep protocol_entangle_swap(const QState& state, std::size_t r, std::size_t s,
                                           OutcomeSource& source) {
  if (r == s) throw std::invalid_argument("entangling protocol needs distinct QVs");
  const int d = state.dims()[r];
  return detail::drive_ancilla(state, {r, s}, build_interaction(InteractionKind::kSwapBased, d),
                               make_plus_state(d, 0), identity(d), "x", source);
}

/// Measurement of x-hat_{F R(theta) F^dag}: register gains X_r(-m) F R(theta).
inline ProtocolStep protocol_local_swap(const QState& state, std::size_t r, const PhaseFunction& theta,
                                        OutcomeSource& source) {
  const int d = state.dims()[r];
  if (theta.dim() != d) throw std::invalid_argument("phase table length must equal the dimension");
  const Gate f = fourier(d);
  // F R(const) F^dag is a global phase, so the constant table needs only x-hat.
  std::string label = theta.is_constant() ? "x" : "x_FRF^dag";
  return detail::drive_ancilla(state, {r}, build_interaction(InteractionKind::kSwapBased, d), make_plus_state(d, 0),
                               f * rotation(theta) * f.adjoint(), std::move(label), source);
}

inline ProtocolStep protocol_local_fp_swap(const QState& state, std::size_t r, int p, OutcomeSource& source) {
  const int d = state.dims()[r];
  const Gate f = fourier(d);
  return detail::drive_ancilla(state, {r}, build_interaction(InteractionKind::kSwapBased, d), make_plus_state(d, 0),
                               f * phase_gate(d, p) * f.adjoint(), "x_FPF^dag", source);
}

inline ProtocolStep protocol_measure_x_swap(const QState& state, std::size_t r, OutcomeSource& source) {
  const int d = state.dims()[r];
  ProtocolStep step = detail::drive_ancilla(state, {r}, build_interaction(InteractionKind::kSwapBased, d),
                                            make_plus_state(d, 0), fourier(d).adjoint(), "x_F^dag", source);
  step.state = detail::discard_plus_state(step.state, r, step.outcome);
  return step;
}

// Hybrid interaction with ancillas of dimension d_a.

/// Register gains u_r(m) F_r F_s diag(e^{2 pi i q q'/d_a}); u(m) = X(k m) when d = k d_a.
inline ProtocolStep protocol_entangle_hybrid(const QState& state, std::size_t r, std::size_t s, int d_a,
                                             OutcomeSource& source, bool require_deterministic = false) {
  if (r == s) throw std::invalid_argument("entangling protocol needs distinct QVs");
  const int d = state.dims()[r];
  return detail::drive_ancilla(state, {r, s}, build_interaction(InteractionKind::kHybrid, d, d_a, require_deterministic),
                               make_plus_state(d_a, 0), identity(d_a), "x", source);
}

/// theta is a table over Z(d_a). Register gains u_r(-m) F R(theta-bar), theta-bar(q) = theta(q mod d_a).
inline ProtocolStep protocol_local_hybrid(const QState& state, std::size_t r, const PhaseFunction& theta, int d_a,
                                          OutcomeSource& source, bool require_deterministic = false) {
  const int d = state.dims()[r];
  if (theta.dim() != d_a) throw std::invalid_argument("hybrid phase table length must equal the ancilla dimension");
  return detail::drive_ancilla(state, {r}, build_interaction(InteractionKind::kHybrid, d, d_a, require_deterministic),
                               make_plus_state(d_a, 0), fourier(d_a) * rotation(theta), detail::local_label(theta),
                               source);
}

/// Needs d_a >= d so the ancilla can hold the full register label.
inline ProtocolStep protocol_measure_x_hybrid(const QState& state, std::size_t r, int d_a, OutcomeSource& source) {
  const int d = state.dims()[r];
  if (d_a < d) throw std::invalid_argument("hybrid x-hat measurement needs d_a >= d");
  ProtocolStep step = detail::drive_ancilla(state, {r}, build_interaction(InteractionKind::kHybrid, d, d_a),
                                            make_plus_state(d_a, 0), identity(d_a), "x", source);
  step.state = detail::discard_plus_state(step.state, r, step.outcome);
  return step;
}

/// theta-bar(q) = theta(q mod d_a) on Z(d): the rotation a hybrid local step applies.
inline PhaseFunction hybrid_effective_table(const PhaseFunction& theta, int d) {
  std::vector<double> t(d);
  for (int q = 0; q < d; ++q) t[q] = theta(q % theta.dim());
  return PhaseFunction(std::move(t));
}

// ---------------------------------------------------------------------------
// Programs.

struct EntangleStep {
  std::size_t r;
  std::size_t s;
};
struct LocalStep {
  std::size_t r;
  PhaseFunction theta;  ///< over Z(ancilla dimension)
  bool adaptive = true;
};
struct LocalFPStep {
  std::size_t r;
  int p;
};
struct AbsorbPauliStep {
  std::size_t r;
  int x;
  int z;
};
struct MeasureStep {
  std::size_t r;
};

using AdqcStep = std::variant<EntangleStep, LocalStep, LocalFPStep, AbsorbPauliStep, MeasureStep>;

struct AdqcProgram {
  int d = 2;
  std::size_t n = 1;
  Interaction interaction;
  std::vector<AdqcStep> steps;
};

/// Depth and resource summary of a program under an as-soon-as-possible schedule.
/// A layer is one time step in which every QV takes part in at most one interaction or
/// measurement. Adaptive measurements wait until the frame component they read is known.
struct LayerReport {
  std::size_t layers = 0;
  std::size_t adaptive_measurements = 0;
  std::size_t ancillas = 0;
  std::size_t interactions = 0;
};

inline LayerReport schedule(const AdqcProgram& program) {
  const std::size_t n = program.n;
  std::vector<long> free_at(n, 0);
  std::vector<long> known_x(n, -1), known_z(n, -1);
  LayerReport report;
  long last = -1;
  auto local = [&](std::size_t r, bool adaptive, bool reads_x_into_x) {
    long t = free_at[r];
    long tm = adaptive ? std::max(t + 1, known_x[r] + 1) : t + 1;
    free_at[r] = t + 1;
    long kx = known_x[r], kz = known_z[r];
    known_x[r] = std::max({tm, kz, reads_x_into_x ? kx : -1L});
    known_z[r] = kx;
    last = std::max(last, tm);
    ++report.ancillas;
    ++report.interactions;
    if (adaptive) ++report.adaptive_measurements;
  };
  for (const AdqcStep& step : program.steps) {
    if (const auto* e = std::get_if<EntangleStep>(&step)) {
      long t1 = free_at[e->r];
      long t2 = std::max(t1 + 1, free_at[e->s]);
      long tm = t2 + 1;
      free_at[e->r] = t1 + 1;
      free_at[e->s] = t2 + 1;
      long kxr = known_x[e->r], kxs = known_x[e->s], kzr = known_z[e->r], kzs = known_z[e->s];
      known_x[e->r] = std::max({tm, kzr, kxs, kzs});
      known_x[e->s] = std::max({tm, kzs, kxr, kzr});
      known_z[e->r] = std::max(kxr, kxs);
      known_z[e->s] = std::max(kxs, kxr);
      last = std::max(last, tm);
      ++report.ancillas;
      report.interactions += 2;
    } else if (const auto* l = std::get_if<LocalStep>(&step)) {
      local(l->r, l->adaptive, false);
    } else if (const auto* fp = std::get_if<LocalFPStep>(&step)) {
      local(fp->r, false, true);
    } else if (const auto* m = std::get_if<MeasureStep>(&step)) {
      long tm = free_at[m->r] + 1;
      free_at[m->r] = tm;
      last = std::max(last, tm);
      ++report.ancillas;
      ++report.interactions;
    }
  }
  report.layers = static_cast<std::size_t>(last + 1);
  return report;
}

/// Compiles a logical circuit into interaction steps:
///   F -> one local step with theta = 0 (measures x-hat_F);
///   P(p) -> p rounds of [F P(1), F^-1];
///   X, Z -> frame updates only;
///   CZ -> entangle, then F^-1 on both QVs (swap-based: F^-1 on s first, F^-1 on r after);
///   R, D3 -> adaptive F R(theta) followed by F^-1.
/// F^-1 is F^3, or F itself at d = 2.
inline AdqcProgram compile_logical(const LogicalCircuit& circuit, Interaction interaction = Interaction::standard()) {
  circuit.validate();
  const int d = circuit.d;
  const int d_a = interaction.ancilla_dimension(d);
  const bool hybrid = interaction.kind == InteractionKind::kHybrid;
  const bool deterministic = interaction.deterministic(d);
  AdqcProgram program{d, circuit.n, interaction, {}};
  auto unsupported = [&](const std::string& what) {
    return std::invalid_argument(what + " is not supported with interaction " + interaction.label() + " at d=" +
                                 std::to_string(d));
  };
  const int f_inverse = d == 2 ? 1 : 3;
  auto f_steps = [&](std::size_t r, int count) {
    for (int i = 0; i < count; ++i) program.steps.push_back(LocalStep{r, PhaseFunction::zero(d_a), false});
  };
  auto ancilla_table = [&](const PhaseFunction& theta) {
    if (!hybrid || d_a == d) return theta;
    std::vector<double> t(d_a, 0.0);
    if (d_a < d) {
      for (int q = 0; q < d; ++q) {
        if (std::abs(std::remainder(theta(q) - theta(q % d_a), kTwoPi)) > 1e-12) {
          throw unsupported("a phase table that is not periodic in the ancilla dimension");
        }
      }
      for (int q = 0; q < d_a; ++q) t[q] = theta(q);
    } else {
      for (int q = 0; q < d; ++q) t[q] = theta(q);
    }
    return PhaseFunction(std::move(t));
  };
  for (const LogicalOp& op : circuit.ops) {
    const std::size_t r = op.targets[0];
    switch (op.kind) {
      case LogicalOp::Kind::kF:
        f_steps(r, 1);
        break;
      case LogicalOp::Kind::kP: {
        if (hybrid && d_a != d) throw unsupported("P");
        const int reps = mod(op.param, 2 * d);
        for (int i = 0; i < reps; ++i) {
          program.steps.push_back(LocalFPStep{r, 1});
          f_steps(r, f_inverse);
        }
        break;
      }
      case LogicalOp::Kind::kX:
      case LogicalOp::Kind::kZ:
        if (!deterministic) throw unsupported("a Pauli gate");
        program.steps.push_back(op.kind == LogicalOp::Kind::kX ? AbsorbPauliStep{r, mod(op.param, d), 0}
                                                               : AbsorbPauliStep{r, 0, mod(op.param, d)});
        break;
      case LogicalOp::Kind::kCZ: {
        if (hybrid && d_a != d) throw unsupported("CZ");
        const std::size_t s = op.targets[1];
        if (interaction.kind == InteractionKind::kSwapBased) {
          f_steps(s, f_inverse);
          program.steps.push_back(EntangleStep{r, s});
          f_steps(r, f_inverse);
        } else {
          program.steps.push_back(EntangleStep{r, s});
          f_steps(r, f_inverse);
          f_steps(s, f_inverse);
        }
        break;
      }
      case LogicalOp::Kind::kR:
      case LogicalOp::Kind::kD3: {
        PhaseFunction theta = op.kind == LogicalOp::Kind::kR ? op.table : cubic_phase_table(d, op.param, op.cubic);
        program.steps.push_back(LocalStep{r, ancilla_table(theta), deterministic});
        f_steps(r, f_inverse);
        break;
      }
      case LogicalOp::Kind::kMeasure:
        if (hybrid && d_a < d) throw unsupported("measurement");
        program.steps.push_back(MeasureStep{r});
        break;
    }
  }
  return program;
}

// ---------------------------------------------------------------------------
// Execution.

/// A non-Pauli outcome-dependent error left on the register in stochastic mode.
struct ResidualError {
  std::size_t step;
  std::size_t qv;
  Gate gate;
};

struct RunOptions {
  /// Permit hybrid runs whose errors cannot be tracked as Pauli frames.
  bool stochastic = false;
};

struct RunResult {
  QState state;                          ///< raw register state (frame not removed)
  std::vector<std::size_t> surviving;    ///< register labels of `state`'s subsystems, in order
  PauliFrame frame;                      ///< over `surviving`
  std::vector<int> outcomes;             ///< one per ancilla, in order
  std::vector<MeasurementRecord> records;
  std::vector<int> measurements;         ///< logical x-hat outcomes, one per MeasureStep
  std::vector<ResidualError> residuals;  ///< stochastic mode only
  LayerReport report;
  std::size_t peak_subsystems = 0;
  bool deterministic = true;
};

/// Register state with the frame removed (equal to the ideal circuit output up to phase).
inline QState logical_state(const RunResult& result) {
  if (!result.deterministic) return result.state;
  return remove_frame(result.state, result.frame);
}

inline RunResult run(const AdqcProgram& program, QState state, OutcomeSource& source, RunOptions options = {}) {
  const int d = program.d;
  const Interaction& in = program.interaction;
  const int d_a = in.ancilla_dimension(d);
  const int k = in.error_multiplier(d);
  const bool deterministic = in.deterministic(d);
  if (!deterministic && !options.stochastic) {
    throw std::invalid_argument("interaction " + in.label() + " at d=" + std::to_string(d) +
                                " cannot be run deterministically (d_a does not divide d)");
  }
  if (state.num_subsystems() != program.n) throw std::invalid_argument("initial state size mismatch");
  for (std::size_t q = 0; q < program.n; ++q) {
    if (state.dims()[q] != d) throw std::invalid_argument("register dimension mismatch");
  }

  RegisterMap map(program.n);
  PauliFrame frame(static_cast<int>(program.n), d);
  RunResult result;
  result.deterministic = deterministic;
  result.peak_subsystems = state.num_subsystems();

  auto record = [&](ProtocolStep& step) {
    result.outcomes.push_back(step.outcome);
    result.records.push_back(step.record);
    result.peak_subsystems = std::max(result.peak_subsystems, state.num_subsystems() + 1);
    state = std::move(step.state);
  };

  for (std::size_t i = 0; i < program.steps.size(); ++i) {
    const AdqcStep& step = program.steps[i];
    if (const auto* e = std::get_if<EntangleStep>(&step)) {
      const std::size_t pr = map.position(e->r), ps = map.position(e->s);
      ProtocolStep ps_step;
      switch (in.kind) {
        case InteractionKind::kStandard: ps_step = protocol_entangle(state, pr, ps, source); break;
        case InteractionKind::kSwapBased: ps_step = protocol_entangle_swap(state, pr, ps, source); break;
        case InteractionKind::kHybrid: ps_step = protocol_entangle_hybrid(state, pr, ps, d_a, source); break;
      }
      ps_step.record.target = e->r;
      const int m = ps_step.outcome;
      record(ps_step);
      if (!deterministic) {
        result.residuals.push_back({i, e->r, hybrid_u(d, d_a, m)});
      } else if (in.kind == InteractionKind::kSwapBased) {
        frame = frame_update_entangle_swap(frame, e->r, e->s, m);
      } else {
        frame = frame_update_entangle(frame, e->r, e->s, m, k);
      }
    } else if (const auto* l = std::get_if<LocalStep>(&step)) {
      if (l->theta.dim() != d_a) throw std::invalid_argument("local step table must cover the ancilla dimension");
      if (deterministic && !l->adaptive && !l->theta.is_constant()) {
        throw std::invalid_argument("a non-adaptive local step needs a constant table (use LocalFPStep)");
      }
      const std::size_t pr = map.position(l->r);
      const PhaseFunction theta = (deterministic && l->adaptive) ? l->theta.shifted(frame.x(l->r)) : l->theta;
      ProtocolStep ps_step;
      switch (in.kind) {
        case InteractionKind::kStandard: ps_step = protocol_local(state, pr, theta, source); break;
        case InteractionKind::kSwapBased: ps_step = protocol_local_swap(state, pr, theta, source); break;
        case InteractionKind::kHybrid: ps_step = protocol_local_hybrid(state, pr, theta, d_a, source); break;
      }
      ps_step.record.target = l->r;
      const int m = ps_step.outcome;
      record(ps_step);
      if (!deterministic) {
        result.residuals.push_back({i, l->r, hybrid_u(d, d_a, -m)});
      } else {
        frame = frame_update_FR(frame, l->r, m, k);
      }
    } else if (const auto* fp = std::get_if<LocalFPStep>(&step)) {
      if (in.kind == InteractionKind::kHybrid && d_a != d) {
        throw std::invalid_argument("F P(p) steps need ancillas of the register dimension");
      }
      const std::size_t pr = map.position(fp->r);
      ProtocolStep ps_step = in.kind == InteractionKind::kSwapBased ? protocol_local_fp_swap(state, pr, fp->p, source)
                                                                    : protocol_local_fp(state, pr, fp->p, source);
      ps_step.record.target = fp->r;
      const int m = ps_step.outcome;
      record(ps_step);
      frame = frame_update_FP(frame, fp->r, fp->p, m);
    } else if (const auto* a = std::get_if<AbsorbPauliStep>(&step)) {
      if (!deterministic) throw std::invalid_argument("Pauli absorption needs a deterministic frame");
      map.position(a->r);
      frame = frame_absorb_pauli(frame, a->r, a->x, a->z);
    } else if (const auto* ms = std::get_if<MeasureStep>(&step)) {
      const std::size_t pr = map.position(ms->r);
      ProtocolStep ps_step;
      switch (in.kind) {
        case InteractionKind::kStandard: ps_step = protocol_measure_x(state, pr, source); break;
        case InteractionKind::kSwapBased: ps_step = protocol_measure_x_swap(state, pr, source); break;
        case InteractionKind::kHybrid: ps_step = protocol_measure_x_hybrid(state, pr, d_a, source); break;
      }
      ps_step.record.target = ms->r;
      const int m = ps_step.outcome;
      record(ps_step);
      result.measurements.push_back(deterministic ? mod(m - frame.x(ms->r), d) : m);
      map.remove(ms->r);
    }
  }

  PauliFrame compact(std::vector<int>(map.live().size(), d));
  for (std::size_t j = 0; j < map.live().size(); ++j) {
    const std::size_t label = map.live()[j];
    compact.set(j, frame.x(label), frame.z(label));
  }
  if (frame.xi()) compact.add_xi(*frame.xi());
  result.frame = std::move(compact);
  result.surviving = map.live();
  result.state = std::move(state);
  result.report = schedule(program);
  return result;
}

/// Observables measured by a program, without running it (E and hybrid labels).
inline std::vector<std::string> program_observables(const AdqcProgram& program) {
  std::vector<std::string> out;
  const bool swap_based = program.interaction.kind == InteractionKind::kSwapBased;
  for (const AdqcStep& step : program.steps) {
    if (std::holds_alternative<EntangleStep>(step)) {
      out.push_back("x");
    } else if (const auto* l = std::get_if<LocalStep>(&step)) {
      if (swap_based) {
        out.push_back(l->theta.is_constant() ? "x" : "x_FRF^dag");
      } else {
        out.push_back(detail::local_label(l->theta));
      }
    } else if (const auto* fp = std::get_if<LocalFPStep>(&step)) {
      out.push_back(swap_based ? "x_FPF^dag" : detail::fp_label(fp->p));
    } else if (std::holds_alternative<MeasureStep>(step)) {
      out.push_back(swap_based ? "x_F^dag" : "x");
    }
  }
  return out;
}

}  // namespace qvsim
