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

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_set>
#include <vector>

#include "qvsim/core.hpp"
#include "qvsim/gates.hpp"
#include "qvsim/logical.hpp"

// Globally unitary computation with a fixed interaction E-hat(u, phi) = u_a SWAP D(phi).
// Gates are selected by the computational-basis state each ancilla is prepared in.

namespace qvsim {

struct MinControlSpec {
  int d = 2;
  Gate u;
  TwoPhaseFunction phi;

  void validate() const {
    if (u.arity() != 1 || u.dims()[0] != d) throw std::invalid_argument("u must be a single-QV gate of dimension d");
    if (phi.dim() != d) throw std::invalid_argument("phi must be a table over Z(d) x Z(d)");
    for (double v : phi.table()) {
      if (!std::isfinite(v)) throw std::invalid_argument("phi must be finite");
    }
  }
};

/// u = F; phi zero except phi(q, d-1) = theta_q with theta_0 = 0 and theta_q uniform in [0, 2 pi).
inline MinControlSpec appendixB_spec(int d, Rng& rng) {
  if (d < 2) throw std::invalid_argument("dimension must be >= 2");
  TwoPhaseFunction phi = TwoPhaseFunction::zero(d);
  for (int q = 1; q < d; ++q) phi.at(q, d - 1) = kTwoPi * rng.uniform();
  return {d, fourier(d), std::move(phi)};
}

inline MinControlSpec appendixB_spec(int d, std::uint64_t seed) {
  Rng rng(seed);
  return appendixB_spec(d, rng);
}

/// u = I, phi(q, q') = 2 pi q q' / d. Then W = SWAP CZ.
inline MinControlSpec cz_spec(int d) {
  TwoPhaseFunction phi = TwoPhaseFunction::zero(d);
  for (int q = 0; q < d; ++q) {
    for (int k = 0; k < d; ++k) phi.at(q, k) = kTwoPi * mod(static_cast<long long>(q) * k, d) / d;
  }
  return {d, identity(d), std::move(phi)};
}

/// E-hat on (register, ancilla): |psi>|q> -> |q> u R(phi(., q))|psi>, |q>|psi> -> R(phi(q, .))|psi> u|q>.
inline Gate build_E_hat(const MinControlSpec& spec) {
  spec.validate();
  return (kron(identity(spec.d), spec.u) * swap(spec.d) * diag2(spec.phi)).renamed("E^");
}

/// s(q) = R(phi(q, .)) u R(phi(., q)).
inline Gate s_matrix(const MinControlSpec& spec, int q) {
  spec.validate();
  check_label(q, spec.d);
  return (rotation(spec.phi.row(q)) * spec.u * rotation(spec.phi.column(q))).renamed("s(" + std::to_string(q) + ")");
}

/// W_rs = R_r(phi(0, .)) E-hat_rs u_r R_r(phi(., 0)), with r in the ancilla role of E-hat_rs.
inline Gate W_matrix(const MinControlSpec& spec) {
  const Gate e = build_E_hat(spec);
  const Gate sw = swap(spec.d);
  const Gate e_rs = sw * e * sw;  // E-hat with subsystem 0 as the ancilla
  const Gate id = identity(spec.d);
  return (kron(rotation(spec.phi.row(0)), id) * e_rs * kron(spec.u * rotation(spec.phi.column(0)), id))
      .renamed("W");
}

/// True iff phi(q,q) + phi(q',q') - phi(q,q') - phi(q',q) is nonzero mod 2 pi for some pair.
inline bool entangling_condition(const TwoPhaseFunction& phi, double tol = 1e-9) {
  const int d = phi.dim();
  for (int q = 0; q < d; ++q) {
    for (int k = q + 1; k < d; ++k) {
      const double v = phi(q, q) + phi(k, k) - phi(q, k) - phi(k, q);
      if (std::abs(std::remainder(v, kTwoPi)) > tol) return true;
    }
  }
  return false;
}

/// Singular values of the realigned matrix R[(i1 j1), (i2 j2)] = W[(i1 i2), (j1 j2)].
inline Eigen::VectorXd operator_schmidt_values(const Gate& w) {
  if (w.arity() != 2) throw std::invalid_argument("operator Schmidt decomposition needs a two-QV gate");
  const int d1 = w.dims()[0], d2 = w.dims()[1];
  const Matrix m = w.matrix();
  Matrix r(d1 * d1, d2 * d2);
  for (int i1 = 0; i1 < d1; ++i1) {
    for (int j1 = 0; j1 < d1; ++j1) {
      for (int i2 = 0; i2 < d2; ++i2) {
        for (int j2 = 0; j2 < d2; ++j2) r(i1 * d1 + j1, i2 * d2 + j2) = m(i1 * d2 + i2, j1 * d2 + j2);
      }
    }
  }
  return Eigen::JacobiSVD<Matrix>(r).singularValues();
}

inline bool is_product_unitary(const Gate& w, double tol = 1e-9) {
  const Eigen::VectorXd sv = operator_schmidt_values(w);
  Eigen::Index rank = 0;
  for (Eigen::Index k = 0; k < sv.size(); ++k) rank += sv[k] > tol ? 1 : 0;
  return rank == 1;
}

// ---------------------------------------------------------------------------
// Protocols on states. Each appends one ancilla, runs interactions, then splits the
// ancilla off; the split must be exact.

struct McOutcome {
  QState state;         ///< register
  QState ancilla;       ///< final ancilla state (dominant eigenvector of its reduced state)
  double purity = 1.0;  ///< tr(rho_a^2)
  std::size_t interactions = 0;
};

namespace detail {

/// Splits the last subsystem off a state that should be a product across that cut.
inline McOutcome split_last(const QState& s) {
  const std::size_t n = s.num_subsystems();
  const int da = s.dims()[n - 1];
  const std::size_t rows = s.dims().total() / static_cast<std::size_t>(da);
  Matrix m(static_cast<Eigen::Index>(rows), da);
  for (std::size_t i = 0; i < rows; ++i) {
    for (int a = 0; a < da; ++a) m(static_cast<Eigen::Index>(i), a) = s.amp(i * da + a);
  }
  const Matrix rho = (m.transpose() * m.conjugate()).eval();  // rho[a][b] = sum_i m[i,a] conj(m[i,b])
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho);
  const Vector v = es.eigenvectors().col(da - 1);
  McOutcome out;
  out.purity = (rho * rho).trace().real();
  if (out.purity < 1.0 - kNormTolerance) {
    throw NumericalInvariantError("ancilla did not disentangle from the register");
  }
  Vector reg = m * v.conjugate();
  reg /= reg.norm();
  out.state = state_from_vector(s.dims().without(n - 1), reg);
  out.ancilla = state_from_vector(DimSpec({da}), v);
  return out;
}

}  // namespace detail

/// Two E-hat interactions with an ancilla prepared in |q>: QV r gains s(q).
inline McOutcome mc_local(const QState& state, std::size_t r, int q, const MinControlSpec& spec) {
  if (r >= state.num_subsystems() || state.dims()[r] != spec.d) throw std::invalid_argument("bad register QV");
  check_label(q, spec.d);
  const Gate e = build_E_hat(spec);
  std::vector<int> label{q};
  QState s = tensor(state, make_basis_state(DimSpec({spec.d}), label));
  const std::size_t a = s.num_subsystems() - 1;
  s = apply_gate(std::move(s), e, {r, a});
  s = apply_gate(std::move(s), e, {r, a});
  McOutcome out = detail::split_last(s);
  out.interactions = 2;
  return out;
}

/// E-hat_ar E-hat_as E-hat_ar with the ancilla in |0>: register gains W_rs.
inline McOutcome mc_entangle(const QState& state, std::size_t r, std::size_t s_qv, const MinControlSpec& spec) {
  if (r == s_qv) throw std::invalid_argument("mc_entangle needs distinct QVs");
  for (std::size_t t : {r, s_qv}) {
    if (t >= state.num_subsystems() || state.dims()[t] != spec.d) throw std::invalid_argument("bad register QV");
  }
  const Gate e = build_E_hat(spec);
  QState s = tensor(state, make_basis_state(std::vector<int>{spec.d}, std::vector<int>{0}));
  const std::size_t a = s.num_subsystems() - 1;
  s = apply_gate(std::move(s), e, {r, a});
  s = apply_gate(std::move(s), e, {s_qv, a});
  s = apply_gate(std::move(s), e, {r, a});
  McOutcome out = detail::split_last(s);
  out.interactions = 3;
  return out;
}

/// v' = R(-phi(0, .)) v R(-phi(., 0)) u^dag, the ancilla gate that transports v onto the register.
inline Gate ancilla_gate_for(const Gate& v, const MinControlSpec& spec) {
  if (v.arity() != 1 || v.dims()[0] != spec.d) throw std::invalid_argument("v must be a single-QV gate of dimension d");
  return (rotation(spec.phi.row(0)).adjoint() * v * rotation(spec.phi.column(0)).adjoint() * spec.u.adjoint())
      .renamed("v'");
}

/// E-hat_ar v'_a E-hat_ar with the ancilla in |0>: QV r gains v.
inline McOutcome mc_ancilla_controlled(const QState& state, std::size_t r, const Gate& v, const MinControlSpec& spec) {
  if (r >= state.num_subsystems() || state.dims()[r] != spec.d) throw std::invalid_argument("bad register QV");
  const Gate e = build_E_hat(spec);
  const Gate vp = ancilla_gate_for(v, spec);
  QState s = tensor(state, make_basis_state(std::vector<int>{spec.d}, std::vector<int>{0}));
  const std::size_t a = s.num_subsystems() - 1;
  s = apply_gate(std::move(s), e, {r, a});
  s = apply_gate(std::move(s), vp, {a});
  s = apply_gate(std::move(s), e, {r, a});
  McOutcome out = detail::split_last(s);
  out.interactions = 2;
  return out;
}

/// Equality up to global phase.
inline bool equal_up_to_phase(const Matrix& a, const Matrix& b, double tol = 1e-10) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  const Complex t = (b.adjoint() * a).trace();
  if (std::abs(t) < kZeroProbability) return a.norm() < tol && b.norm() < tol;
  return (a - (t / std::abs(t)) * b).norm() < tol;
}

struct MinControlResult {
  QState state;
  std::vector<std::size_t> surviving;
  std::vector<int> measurements;
  std::size_t ancillas = 0;
  std::size_t interactions = 0;
  double min_purity = 1.0;
};

/// Runs a logical circuit: F via s(0) when s(0) = F, other one-QV gates via the
/// ancilla-controlled scheme, CZ via one W = SWAP CZ (needs cz_spec). Measurements read
/// the register directly.
inline MinControlResult run_mincontrol(const LogicalCircuit& circuit, QState state, const MinControlSpec& spec,
                                       OutcomeSource& source) {
  circuit.validate();
  spec.validate();
  if (spec.d != circuit.d) throw std::invalid_argument("spec dimension does not match the circuit");
  if (state.num_subsystems() != circuit.n) throw std::invalid_argument("initial state size mismatch");
  const bool s0_is_f = equal_up_to_phase(s_matrix(spec, 0).matrix(), fourier(spec.d).matrix());
  const bool w_is_swap_cz = equal_up_to_phase(W_matrix(spec).matrix(), (swap(spec.d) * cz(spec.d)).matrix());
  RegisterMap map(circuit.n);
  MinControlResult result;
  auto take = [&](McOutcome out) {
    state = std::move(out.state);
    result.min_purity = std::min(result.min_purity, out.purity);
    result.interactions += out.interactions;
    ++result.ancillas;
  };
  for (const LogicalOp& op : circuit.ops) {
    if (op.kind == LogicalOp::Kind::kMeasure) {
      MeasurementResult mr = measure_x(state, map.position(op.targets[0]), source);
      state = std::move(mr.post);
      map.remove(op.targets[0]);
      result.measurements.push_back(mr.outcome);
    } else if (op.kind == LogicalOp::Kind::kCZ) {
      if (!w_is_swap_cz) throw std::invalid_argument("CZ needs a spec whose W equals SWAP CZ (use the cz spec)");
      take(mc_entangle(state, map.position(op.targets[0]), map.position(op.targets[1]), spec));
      // W = SWAP CZ: the two register labels trade places.
      map.swap_labels(op.targets[0], op.targets[1]);
    } else if (op.kind == LogicalOp::Kind::kF && s0_is_f) {
      take(mc_local(state, map.position(op.targets[0]), 0, spec));
    } else {
      take(mc_ancilla_controlled(state, map.position(op.targets[0]), logical_gate(op, circuit.d), spec));
    }
  }
  // Restore label order so surviving QVs appear in ascending label order.
  std::vector<std::size_t> live = map.live();
  std::vector<std::size_t> sorted = live;
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::size_t> order;
  for (std::size_t label : sorted) order.push_back(static_cast<std::size_t>(std::find(live.begin(), live.end(), label) - live.begin()));
  result.state = permute_subsystems(state, order);
  result.surviving = std::move(sorted);
  return result;
}

// ---------------------------------------------------------------------------
// Universality witness: breadth-first search over gate words.

/// min over theta of || e^{i theta} a - b || in operator norm.
inline double phase_invariant_distance(const Matrix& a, const Matrix& b) {
  const Matrix v = a.adjoint() * b;
  Eigen::ComplexEigenSolver<Matrix> es(v, false);
  std::vector<double> angles;
  for (Eigen::Index k = 0; k < v.rows(); ++k) angles.push_back(std::arg(es.eigenvalues()[k]));
  std::sort(angles.begin(), angles.end());
  double gap = angles.front() + kTwoPi - angles.back();
  for (std::size_t k = 1; k < angles.size(); ++k) gap = std::max(gap, angles[k] - angles[k - 1]);
  const double arc = std::max(0.0, kTwoPi - gap);
  return std::min(2.0, 2.0 * std::sin(arc / 4.0));
}

/// Haar-random unitary from the QR decomposition of a complex Ginibre matrix.
inline Matrix haar_unitary(int d, Rng& rng) {
  Matrix z(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) z(i, j) = Complex(rng.normal(), rng.normal()) / std::sqrt(2.0);
  }
  Eigen::HouseholderQR<Matrix> qr(z);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR();
  for (int j = 0; j < d; ++j) {
    const Complex rj = r(j, j);
    if (std::abs(rj) > 0) q.col(j) *= rj / std::abs(rj);
  }
  return q;
}

struct SynthesisReport {
  std::size_t targets = 0;
  int max_length = 0;
  double epsilon = 0.0;
  std::vector<double> best_distance;  ///< per target, in [0, 2]
  double success_fraction = 0.0;
  std::size_t words_explored = 0;  ///< distinct operators visited
  bool partial = false;            ///< budget ran out before length L was exhausted
};

namespace detail {

inline std::string phase_key(const Matrix& m) {
  Complex ref(1.0, 0.0);
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    if (std::abs(m(i)) > 1e-6) {
      ref = std::conj(m(i)) / std::abs(m(i));
      break;
    }
  }
  std::string key;
  key.reserve(static_cast<std::size_t>(m.size()) * 16);
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    const Complex c = m(i) * ref;
    const long long re = std::llround(c.real() * 1e7), im = std::llround(c.imag() * 1e7);
    key.append(reinterpret_cast<const char*>(&re), sizeof re);
    key.append(reinterpret_cast<const char*>(&im), sizeof im);
  }
  return key;
}

}  // namespace detail

/// Enumerates words of length <= L over `gates`, skipping operators already seen up to
/// phase, and records for each target the best phase-invariant distance.
inline SynthesisReport universality_witness(const std::vector<Gate>& gates, int max_length,
                                            const std::vector<Matrix>& targets, double epsilon,
                                            std::size_t budget = 2'000'000) {
  if (gates.empty()) throw std::invalid_argument("empty gate set");
  const Eigen::Index d = static_cast<Eigen::Index>(gates[0].dim());
  std::vector<Matrix> mats;
  for (const Gate& g : gates) {
    if (g.arity() != 1 || static_cast<Eigen::Index>(g.dim()) != d) {
      throw std::invalid_argument("witness gates must be single-QV gates of one dimension");
    }
    mats.push_back(g.matrix());
  }
  SynthesisReport report;
  report.targets = targets.size();
  report.max_length = max_length;
  report.epsilon = epsilon;
  report.best_distance.assign(targets.size(), 2.0);

  auto score = [&](const Matrix& w) {
    for (std::size_t t = 0; t < targets.size(); ++t) {
      // |tr(W^dag T)| < d (1 - best) implies the distance cannot beat `best`.
      const double tr = std::abs((w.adjoint() * targets[t]).trace());
      if (tr < static_cast<double>(d) * (1.0 - report.best_distance[t])) continue;
      report.best_distance[t] = std::min(report.best_distance[t], phase_invariant_distance(w, targets[t]));
    }
  };

  std::unordered_set<std::string> seen;
  std::vector<Matrix> frontier{Matrix::Identity(d, d)};
  seen.insert(detail::phase_key(frontier[0]));
  score(frontier[0]);
  for (int len = 1; len <= max_length && !frontier.empty() && !report.partial; ++len) {
    std::vector<Matrix> next;
    for (const Matrix& w : frontier) {
      for (const Matrix& g : mats) {
        Matrix c = g * w;
        if (!seen.insert(detail::phase_key(c)).second) continue;
        if (seen.size() > budget) {
          report.partial = true;
          break;
        }
        score(c);
        next.push_back(std::move(c));
      }
      if (report.partial) break;
    }
    frontier = std::move(next);
  }
  report.words_explored = seen.size();
  std::size_t ok = 0;
  for (double b : report.best_distance) ok += b <= epsilon ? 1 : 0;
  report.success_fraction = targets.empty() ? 0.0 : static_cast<double>(ok) / static_cast<double>(targets.size());
  return report;
}

/// {s(0), ..., s(d-1)} for a spec.
inline std::vector<Gate> s_gate_set(const MinControlSpec& spec) {
  std::vector<Gate> out;
  for (int q = 0; q < spec.d; ++q) out.push_back(s_matrix(spec, q));
  return out;
}

}  // namespace qvsim
