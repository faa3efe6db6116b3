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

#include <string>
#include <vector>

#include "qvsim/core.hpp"

namespace qvsim {

/// Real phase table theta(q), q in Z(d). Drives the rotation gate R(theta).
class PhaseFunction {
 public:
  PhaseFunction() = default;
  explicit PhaseFunction(std::vector<double> table) : table_(std::move(table)) {
    if (table_.size() < 2) throw std::invalid_argument("phase table needs length >= 2");
    for (double v : table_) {
      if (!std::isfinite(v)) throw std::invalid_argument("phase table entries must be finite");
    }
  }

  static PhaseFunction zero(int d) { return PhaseFunction(std::vector<double>(d, 0.0)); }

  int dim() const { return static_cast<int>(table_.size()); }
  double operator()(int q) const { return table_.at(static_cast<std::size_t>(mod(q, dim()))); }
  const std::vector<double>& table() const { return table_; }

  /// theta_x(q) = theta(q - x): satisfies R(theta_x) X(x) = X(x) R(theta).
  PhaseFunction shifted(int x) const {
    std::vector<double> t(table_.size());
    for (int q = 0; q < dim(); ++q) t[q] = (*this)(q - x);
    return PhaseFunction(std::move(t));
  }

  /// True if every entry equals the first (R is then a global phase).
  bool is_constant(double tol = 1e-12) const {
    for (double v : table_) {
      if (std::abs(std::remainder(v - table_[0], kTwoPi)) > tol) return false;
    }
    return true;
  }

 private:
  std::vector<double> table_;
};

/// Real table phi(q, q') on Z(d) x Z(d).
class TwoPhaseFunction {
 public:
  TwoPhaseFunction() = default;
  TwoPhaseFunction(int d, std::vector<double> table) : d_(d), table_(std::move(table)) {
    if (d_ < 2 || table_.size() != static_cast<std::size_t>(d_) * d_) {
      throw std::invalid_argument("two-variable phase table must be d x d");
    }
    for (double v : table_) {
      if (!std::isfinite(v)) throw std::invalid_argument("phase table entries must be finite");
    }
  }

  static TwoPhaseFunction zero(int d) {
    return TwoPhaseFunction(d, std::vector<double>(static_cast<std::size_t>(d) * d, 0.0));
  }

  int dim() const { return d_; }
  double operator()(int q, int qp) const {
    return table_.at(static_cast<std::size_t>(mod(q, d_)) * d_ + mod(qp, d_));
  }
  double& at(int q, int qp) { return table_.at(static_cast<std::size_t>(q) * d_ + qp); }

  /// phi(q, .)
  PhaseFunction row(int q) const {
    std::vector<double> t(d_);
    for (int k = 0; k < d_; ++k) t[k] = (*this)(q, k);
    return PhaseFunction(std::move(t));
  }

  /// phi(., q)
  PhaseFunction column(int q) const {
    std::vector<double> t(d_);
    for (int k = 0; k < d_; ++k) t[k] = (*this)(k, q);
    return PhaseFunction(std::move(t));
  }

  const std::vector<double>& table() const { return table_; }

 private:
  int d_ = 0;
  std::vector<double> table_;
};

inline Gate identity(int d) {
  return Gate::diagonal("I", {d}, std::vector<Complex>(d, Complex{1.0, 0.0}));
}

/// F|q> = d^{-1/2} sum_q' omega^{q q'} |q'>. The Hadamard gate for d = 2.
inline Gate fourier(int d) {
  Matrix m(d, d);
  const double norm = 1.0 / std::sqrt(static_cast<double>(d));
  for (int row = 0; row < d; ++row) {
    for (int col = 0; col < d; ++col) m(row, col) = omega_pow(d, static_cast<long long>(row) * col) * norm;
  }
  return Gate::from_matrix("F", {d}, std::move(m));
}

/// X(q')|q> = |q + q'>.
inline Gate pauli_x(int d, int shift) {
  std::vector<std::size_t> perm(d);
  for (int q = 0; q < d; ++q) perm[q] = static_cast<std::size_t>(mod(q + shift, d));
  return Gate::structured("X(" + std::to_string(mod(shift, d)) + ")", {d}, std::move(perm),
                          std::vector<Complex>(d, Complex{1.0, 0.0}));
}

/// Z(q')|q> = omega^{q q'} |q>.
inline Gate pauli_z(int d, int power) {
  std::vector<Complex> phases(d);
  for (int q = 0; q < d; ++q) phases[q] = omega_pow(d, static_cast<long long>(q) * power);
  return Gate::diagonal("Z(" + std::to_string(mod(power, d)) + ")", {d}, std::move(phases));
}

/// P(p)|q> = omega^{p q (q + rho_d) / 2} |q> = tau^{p q (q + rho_d)} |q>, p in Z(2d).
inline Gate phase_gate(int d, int p) {
  const int rho = phase_offset(d);
  std::vector<Complex> phases(d);
  for (int q = 0; q < d; ++q) phases[q] = tau_pow(d, static_cast<long long>(p) * q * (q + rho));
  return Gate::diagonal("P(" + std::to_string(mod(p, 2 * d)) + ")", {d}, std::move(phases));
}

/// Phase table of P(p), for measuring x-hat_{F P(p)}.
inline PhaseFunction phase_gate_table(int d, int p) {
  const int rho = phase_offset(d);
  std::vector<double> t(d);
  for (int q = 0; q < d; ++q) t[q] = kPi * mod(static_cast<long long>(p) * q * (q + rho), 2 * d) / d;
  return PhaseFunction(std::move(t));
}

/// Controlled phase |q>|q'> -> exp(2 pi i q q' / d_target) |q>|q'>. Symmetric when the
/// dimensions agree; for hybrids the target dimension sets the root of unity.
inline Gate cz(int d_control, int d_target) {
  std::vector<Complex> phases(static_cast<std::size_t>(d_control) * d_target);
  for (int q = 0; q < d_control; ++q) {
    for (int k = 0; k < d_target; ++k) {
      phases[static_cast<std::size_t>(q) * d_target + k] = omega_pow(d_target, static_cast<long long>(q) * k);
    }
  }
  return Gate::diagonal("CZ", {d_control, d_target}, std::move(phases));
}

inline Gate cz(int d) { return cz(d, d); }

/// |q>|q'> -> |q'>|q>.
inline Gate swap(int d) {
  std::vector<std::size_t> perm(static_cast<std::size_t>(d) * d);
  for (int q = 0; q < d; ++q) {
    for (int k = 0; k < d; ++k) perm[static_cast<std::size_t>(q) * d + k] = static_cast<std::size_t>(k) * d + q;
  }
  return Gate::structured("SWAP", {d, d}, std::move(perm),
                          std::vector<Complex>(static_cast<std::size_t>(d) * d, Complex{1.0, 0.0}));
}

/// R(theta)|q> = exp(i theta(q)) |q>.
inline Gate rotation(const PhaseFunction& theta) {
  std::vector<Complex> phases(theta.dim());
  for (int q = 0; q < theta.dim(); ++q) phases[q] = std::polar(1.0, theta(q));
  return Gate::diagonal("R", {theta.dim()}, std::move(phases));
}

/// Constant in the cubic phase gate.
enum class CubicConstant { kDimensionCubed, kOne };

/// c = 1 gives a non-Clifford gate only for prime d > 3.
inline bool unit_cubic_constant_allowed(int d) {
  if (d <= 3) return false;
  for (int k = 2; k * k <= d; ++k) {
    if (d % k == 0) return false;
  }
  return true;
}

/// Phase table of D3(q'): theta(q) = 2 pi q^3 q' / (c d).
inline PhaseFunction cubic_phase_table(int d, int qp, CubicConstant c = CubicConstant::kDimensionCubed) {
  if (c == CubicConstant::kOne && !unit_cubic_constant_allowed(d)) {
    throw std::invalid_argument("cubic constant c = 1 requires prime d > 3");
  }
  std::vector<double> t(d);
  for (int q = 0; q < d; ++q) {
    const long long cube = static_cast<long long>(q) * q * q;
    if (c == CubicConstant::kOne) {
      t[q] = kTwoPi * mod(cube * qp, d) / d;
    } else {
      // omega^{q^3 q' / d^3}, an exact rational multiple of 2 pi
      const long long denom = static_cast<long long>(d) * d * d * d;
      const long long num = cube * qp;
      t[q] = kTwoPi * static_cast<double>(((num % denom) + denom) % denom) / static_cast<double>(denom);
    }
  }
  return PhaseFunction(std::move(t));
}

/// D3(q')|q> = omega^{q^3 q' / c} |q>.
inline Gate cubic_phase(int d, int qp, CubicConstant c = CubicConstant::kDimensionCubed) {
  return rotation(cubic_phase_table(d, qp, c)).renamed("D3(" + std::to_string(qp) + ")");
}

/// C_u: |q>_c |q'>_t -> |q>_c u^q |q'>_t.
inline Gate controlled_u(const Gate& u, int d_control) {
  if (u.arity() != 1) throw std::invalid_argument("controlled_u needs a one-subsystem gate");
  const int dt = u.dims()[0];
  const std::string name = "C[" + u.name() + "]";
  if (u.is_structured()) {
    std::vector<std::size_t> perm(static_cast<std::size_t>(d_control) * dt);
    std::vector<Complex> phases(perm.size());
    Gate power = identity(dt);
    for (int q = 0; q < d_control; ++q) {
      for (int k = 0; k < dt; ++k) {
        perm[static_cast<std::size_t>(q) * dt + k] = static_cast<std::size_t>(q) * dt + power.permutation()[k];
        phases[static_cast<std::size_t>(q) * dt + k] = power.phases()[k];
      }
      power = u * power;
    }
    return Gate::structured(name, {d_control, dt}, std::move(perm), std::move(phases));
  }
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(d_control) * dt, static_cast<Eigen::Index>(d_control) * dt);
  Matrix power = Matrix::Identity(dt, dt);
  const Matrix um = u.matrix();
  for (int q = 0; q < d_control; ++q) {
    m.block(static_cast<Eigen::Index>(q) * dt, static_cast<Eigen::Index>(q) * dt, dt, dt) = power;
    power = um * power;
  }
  return Gate::from_matrix(name, {d_control, dt}, std::move(m));
}

/// D(phi): |q>|q'> -> exp(i phi(q, q')) |q>|q'>.
inline Gate diag2(const TwoPhaseFunction& phi) {
  const int d = phi.dim();
  std::vector<Complex> phases(static_cast<std::size_t>(d) * d);
  for (int q = 0; q < d; ++q) {
    for (int k = 0; k < d; ++k) phases[static_cast<std::size_t>(q) * d + k] = std::polar(1.0, phi(q, k));
  }
  return Gate::diagonal("D", {d, d}, std::move(phases));
}

/// u(q') on a d-dimensional register with d_a-dimensional ancillas:
/// u(q')|+_q> = exp(-2 pi i q q' / d_a) |+_q>. Equals X(k q') when d = k d_a.
inline Gate hybrid_u(int d, int d_a, int qp) {
  std::vector<Complex> phases(d);
  for (int q = 0; q < d; ++q) phases[q] = std::polar(1.0, -kTwoPi * mod(static_cast<long long>(q) * qp, d_a) / d_a);
  const Gate f = fourier(d);
  return Gate::from_matrix("u(" + std::to_string(qp) + ")", {d},
                           f.matrix() * Gate::diagonal("", {d}, phases).matrix() * f.matrix().adjoint());
}

/// A rank-1 projective observable: measured by rotating with `basis_change`, then reading
/// the computational basis; outcome m carries eigenvalue `eigenvalues[m]`.
struct Observable {
  std::string label;
  Gate basis_change;
  std::vector<double> eigenvalues;
};

/// x-hat = sum_q q |q><q|.
inline Observable observable_x(int d) {
  std::vector<double> ev(d);
  for (int q = 0; q < d; ++q) ev[q] = q;
  return {"x", identity(d), std::move(ev)};
}

/// p-hat = sum_q q |+_q><+_q| = x-hat_{F^dag}.
inline Observable observable_p(int d) {
  std::vector<double> ev(d);
  for (int q = 0; q < d; ++q) ev[q] = q;
  return {"p", fourier(d).adjoint(), std::move(ev)};
}

/// x-hat_U for a one-subsystem rotation U.
inline Observable observable_x_rotated(const Gate& u, std::string label) {
  const int d = u.dims().at(0);
  std::vector<double> ev(d);
  for (int q = 0; q < d; ++q) ev[q] = q;
  return {std::move(label), u, std::move(ev)};
}

inline MeasurementResult measure(const QState& state, std::size_t target, const Observable& obs,
                                 OutcomeSource& source) {
  return measure_observable(state, target, obs.basis_change, source);
}

}  // namespace qvsim
