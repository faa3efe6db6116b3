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

#include <optional>
#include <string>
#include <vector>

#include "qvsim/core.hpp"
#include "qvsim/gates.hpp"

namespace qvsim {

/// n-subsystem Pauli operator tau^xi X(x_1)Z(z_1) (x) ... (x) X(x_n)Z(z_n), d uniform.
/// `vec` is ordered (x_1, ..., x_n, z_1, ..., z_n); xi lives in Z(2d).
class PauliElement {
 public:
  PauliElement(int n, int d) : n_(n), d_(d), vec_(2 * static_cast<std::size_t>(n), 0) {
    if (n < 0 || d < 2) throw std::invalid_argument("bad Pauli shape");
  }

  PauliElement(int d, int xi, std::vector<int> vec)
      : n_(static_cast<int>(vec.size() / 2)), d_(d), xi_(mod(xi, 2 * d)), vec_(std::move(vec)) {
    if (vec_.size() % 2 != 0) throw std::invalid_argument("Pauli vector must have even length");
    for (int& v : vec_) v = mod(v, d_);
  }

  /// X(x)Z(z) on a single site of an n-site register.
  static PauliElement single(int n, int d, int site, int x, int z) {
    PauliElement p(n, d);
    p.set_x(site, x);
    p.set_z(site, z);
    return p;
  }

  int n() const { return n_; }
  int d() const { return d_; }
  int xi() const { return xi_; }
  const std::vector<int>& vec() const { return vec_; }
  int x(int k) const { return vec_.at(k); }
  int z(int k) const { return vec_.at(n_ + k); }

  void set_xi(long long xi) { xi_ = mod(xi, 2 * d_); }
  void add_xi(long long delta) { xi_ = mod(xi_ + mod(delta, 2 * d_), 2 * d_); }
  void set_x(int k, long long v) { vec_.at(k) = mod(v, d_); }
  void set_z(int k, long long v) { vec_.at(n_ + k) = mod(v, d_); }

  bool operator==(const PauliElement& o) const {
    return n_ == o.n_ && d_ == o.d_ && xi_ == o.xi_ && vec_ == o.vec_;
  }

 private:
  int n_;
  int d_;
  int xi_ = 0;
  std::vector<int> vec_;
};

/// a * b. Moving Z(z_a) past X(x_b) costs omega^{z_a x_b}, so
/// xi = xi_a + xi_b + 2 * sum_k z_a,k x_b,k (reduced mod 2d).
inline PauliElement pauli_compose(const PauliElement& a, const PauliElement& b) {
  if (a.n() != b.n() || a.d() != b.d()) throw std::invalid_argument("Pauli shape mismatch");
  long long delta = 0;
  for (int k = 0; k < a.n(); ++k) delta += static_cast<long long>(a.z(k)) * b.x(k);
  PauliElement out(a.n(), a.d());
  for (int k = 0; k < a.n(); ++k) {
    out.set_x(k, a.x(k) + b.x(k));
    out.set_z(k, a.z(k) + b.z(k));
  }
  out.set_xi(static_cast<long long>(a.xi()) + b.xi() + 2 * delta);
  return out;
}

inline PauliElement pauli_inverse(const PauliElement& p) {
  // (X(x)Z(z))^{-1} = Z(-z)X(-x) = omega^{xz} X(-x)Z(-z)
  PauliElement out(p.n(), p.d());
  long long delta = 0;
  for (int k = 0; k < p.n(); ++k) {
    out.set_x(k, -p.x(k));
    out.set_z(k, -p.z(k));
    delta += static_cast<long long>(p.x(k)) * p.z(k);
  }
  out.set_xi(-static_cast<long long>(p.xi()) + 2 * delta);
  return out;
}

/// Dense matrix of a Pauli element (site 0 most significant).
inline Matrix pauli_to_matrix(const PauliElement& p) {
  if (p.n() > 6) throw std::length_error("Pauli element too large to expand");
  const int d = p.d();
  Matrix m = Matrix::Identity(1, 1);
  for (int k = 0; k < p.n(); ++k) {
    Matrix local = pauli_x(d, p.x(k)).matrix() * pauli_z(d, p.z(k)).matrix();
    Matrix next(m.rows() * d, m.cols() * d);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) next.block(i * d, j * d, d, d) = m(i, j) * local;
    }
    m = std::move(next);
  }
  return tau_pow(d, p.xi()) * m;
}

/// Clifford generators with closed-form conjugation rules.
struct CliffordOp {
  enum class Kind { kF, kFDagger, kPhase, kCZ, kCX, kX, kZ };
  Kind kind;
  int site = 0;
  int other = 0;  ///< second site for CZ / CX (CX: site controls, other is target)
  int param = 1;  ///< p for P(p), shift for X, power for Z

  static CliffordOp f(int k) { return {Kind::kF, k}; }
  static CliffordOp f_dagger(int k) { return {Kind::kFDagger, k}; }
  static CliffordOp phase(int k, int p) { return {Kind::kPhase, k, 0, p}; }
  static CliffordOp controlled_z(int j, int k) { return {Kind::kCZ, j, k}; }
  static CliffordOp controlled_x(int control, int target) { return {Kind::kCX, control, target}; }
  static CliffordOp x(int k, int q) { return {Kind::kX, k, 0, q}; }
  static CliffordOp z(int k, int q) { return {Kind::kZ, k, 0, q}; }
};

/// g p g^dag, phase included.
inline PauliElement conjugate(const PauliElement& p, const CliffordOp& g) {
  auto check_site = [&](int k) {
    if (k < 0 || k >= p.n()) throw std::out_of_range("Clifford site out of range");
  };
  check_site(g.site);
  const int d = p.d();
  PauliElement out = p;
  const int x = p.x(g.site);
  const int z = p.z(g.site);
  switch (g.kind) {
    case CliffordOp::Kind::kF:
      // X(x)Z(z) -> Z(x)X(-z) = omega^{-xz} X(-z)Z(x)
      out.set_x(g.site, -z);
      out.set_z(g.site, x);
      out.add_xi(-2LL * x * z);
      break;
    case CliffordOp::Kind::kFDagger:
      // X(x)Z(z) -> Z(-x)X(z) = omega^{-xz} X(z)Z(-x)
      out.set_x(g.site, z);
      out.set_z(g.site, -x);
      out.add_xi(-2LL * x * z);
      break;
    case CliffordOp::Kind::kPhase:
      out.set_z(g.site, z + static_cast<long long>(g.param) * x);
      out.add_xi(static_cast<long long>(g.param) * x * (x + phase_offset(d)));
      break;
    case CliffordOp::Kind::kCZ: {
      check_site(g.other);
      if (g.other == g.site) throw std::invalid_argument("CZ needs distinct sites");
      const int xo = p.x(g.other);
      out.set_z(g.site, z + xo);
      out.set_z(g.other, p.z(g.other) + x);
      out.add_xi(2LL * x * xo);
      break;
    }
    case CliffordOp::Kind::kCX: {
      check_site(g.other);
      if (g.other == g.site) throw std::invalid_argument("CX needs distinct sites");
      // |c>|t> -> |c>|t + c>: X_c -> X_c X_t, Z_t -> Z_c^{-1} Z_t
      out.set_x(g.other, p.x(g.other) + x);
      out.set_z(g.site, z - p.z(g.other));
      break;
    }
    case CliffordOp::Kind::kX:
      // X(q) Z(z) X(-q) = omega^{-qz} Z(z)
      out.add_xi(-2LL * g.param * z);
      break;
    case CliffordOp::Kind::kZ:
      // Z(q) X(x) Z(-q) = omega^{qx} X(x)
      out.add_xi(2LL * g.param * x);
      break;
  }
  return out;
}

/// Matrix of a Clifford generator on an n-site register of dimension d (test support).
inline Matrix clifford_matrix(const CliffordOp& g, int n, int d) {
  auto embed1 = [&](const Matrix& local, int site) {
    Matrix m = Matrix::Identity(1, 1);
    for (int k = 0; k < n; ++k) {
      Matrix f = (k == site) ? local : Matrix::Identity(d, d);
      Matrix next(m.rows() * d, m.cols() * d);
      for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) next.block(i * d, j * d, d, d) = m(i, j) * f;
      }
      m = std::move(next);
    }
    return m;
  };
  const int total = static_cast<int>(std::pow(d, n));
  DimSpec dims(std::vector<int>(n, d));
  auto embed2 = [&](const Gate& gate, int a, int b) {
    Matrix m(total, total);
    std::size_t targets[] = {static_cast<std::size_t>(a), static_cast<std::size_t>(b)};
    for (int col = 0; col < total; ++col) {
      std::vector<Complex> e(total, 0.0);
      e[col] = 1.0;
      QState s = apply_gate(QState(dims, e), gate, targets);
      for (int row = 0; row < total; ++row) m(row, col) = s.amp(row);
    }
    return m;
  };
  switch (g.kind) {
    case CliffordOp::Kind::kF: return embed1(fourier(d).matrix(), g.site);
    case CliffordOp::Kind::kFDagger: return embed1(fourier(d).matrix().adjoint(), g.site);
    case CliffordOp::Kind::kPhase: return embed1(phase_gate(d, g.param).matrix(), g.site);
    case CliffordOp::Kind::kX: return embed1(pauli_x(d, g.param).matrix(), g.site);
    case CliffordOp::Kind::kZ: return embed1(pauli_z(d, g.param).matrix(), g.site);
    case CliffordOp::Kind::kCZ: return embed2(cz(d), g.site, g.other);
    case CliffordOp::Kind::kCX: return embed2(controlled_u(pauli_x(d, 1), d), g.site, g.other);
  }
  throw std::invalid_argument("unknown Clifford generator");
}

// ---------------------------------------------------------------------------
// Pauli frame: the classical record of the X(x_k)Z(z_k) error on each register QV.

class PauliFrame {
 public:
  PauliFrame() = default;
  explicit PauliFrame(std::vector<int> moduli)
      : moduli_(std::move(moduli)), x_(moduli_.size(), 0), z_(moduli_.size(), 0) {
    for (int d : moduli_) {
      if (d < 2) throw std::invalid_argument("frame modulus must be >= 2");
    }
    if (uniform()) xi_ = 0;
  }
  PauliFrame(int n, int d) : PauliFrame(std::vector<int>(n, d)) {}

  std::size_t size() const { return moduli_.size(); }
  int modulus(std::size_t k) const { return moduli_.at(k); }
  const std::vector<int>& moduli() const { return moduli_; }
  int x(std::size_t k) const { return x_.at(k); }
  int z(std::size_t k) const { return z_.at(k); }
  void set(std::size_t k, long long x, long long z) {
    x_.at(k) = mod(x, moduli_[k]);
    z_.at(k) = mod(z, moduli_[k]);
  }
  /// Global phase exponent in Z(2d); tracked only for registers of uniform dimension.
  std::optional<int> xi() const { return xi_; }
  void add_xi(long long delta) {
    if (xi_) xi_ = mod(*xi_ + delta, 2 * moduli_[0]);
  }

  bool is_zero() const {
    return std::all_of(x_.begin(), x_.end(), [](int v) { return v == 0; }) &&
           std::all_of(z_.begin(), z_.end(), [](int v) { return v == 0; });
  }

  bool uniform() const {
    return !moduli_.empty() &&
           std::all_of(moduli_.begin(), moduli_.end(), [&](int d) { return d == moduli_[0]; });
  }

  /// The frame as a Pauli element (uniform dimension only).
  PauliElement as_pauli() const {
    if (!uniform()) throw std::logic_error("mixed-dimension frame has no single Pauli element");
    std::vector<int> vec(x_);
    vec.insert(vec.end(), z_.begin(), z_.end());
    return PauliElement(moduli_[0], xi_.value_or(0), std::move(vec));
  }

  bool operator==(const PauliFrame& o) const {
    return moduli_ == o.moduli_ && x_ == o.x_ && z_ == o.z_;
  }

 private:
  std::vector<int> moduli_;
  std::vector<int> x_;
  std::vector<int> z_;
  std::optional<int> xi_;
};

namespace detail {
inline void check_frame_site(const PauliFrame& f, std::size_t r) {
  if (r >= f.size()) throw std::out_of_range("frame site out of range");
}
}  // namespace detail

/// After X_r(k m) F_r F_s CZ^k (k = 1 for the standard interaction):
/// (x_r, x_s, z_r, z_s) -> (k m - z_r - k x_s, -z_s - k x_r, x_r, x_s).
inline PauliFrame frame_update_entangle(PauliFrame f, std::size_t r, std::size_t s, int m, int k = 1) {
  detail::check_frame_site(f, r);
  detail::check_frame_site(f, s);
  if (r == s) throw std::invalid_argument("entangling update needs two distinct QVs");
  const long long xr = f.x(r), xs = f.x(s), zr = f.z(r), zs = f.z(s);
  // CZ^k adds 2 k x_r x_s; each F then subtracts 2 x z of its new pair.
  const long long zr1 = zr + k * xs, zs1 = zs + k * xr;
  f.add_xi(2 * k * xr * xs - 2 * xr * zr1 - 2 * xs * zs1);
  f.set(r, static_cast<long long>(k) * m - zr1, xr);
  f.set(s, -zs1, xs);
  return f;
}

/// After X_r(-k m) F R(theta_x) with the adapted table: (x_r, z_r) -> (-z_r - k m, x_r).
inline PauliFrame frame_update_FR(PauliFrame f, std::size_t r, int m, int k = 1) {
  detail::check_frame_site(f, r);
  const long long x = f.x(r), z = f.z(r);
  f.add_xi(-2 * x * z);
  f.set(r, -z - static_cast<long long>(k) * m, x);
  return f;
}

/// After X_r(-m) F P(p), no adaptation: (x_r, z_r) -> (-z_r - p x_r - m, x_r).
inline PauliFrame frame_update_FP(PauliFrame f, std::size_t r, int p, int m) {
  detail::check_frame_site(f, r);
  const long long x = f.x(r), z = f.z(r);
  const long long z1 = z + static_cast<long long>(p) * x;
  f.add_xi(static_cast<long long>(p) * x * (x + phase_offset(f.modulus(r))) - 2 * x * z1);
  f.set(r, -z1 - m, x);
  return f;
}

/// Logical X_r(q) Z_r(q') by classical processing only: (x_r, z_r) -> (x_r - q, z_r - q').
inline PauliFrame frame_absorb_pauli(PauliFrame f, std::size_t r, int q, int qp) {
  detail::check_frame_site(f, r);
  const long long x = f.x(r), z = f.z(r);
  f.add_xi(-2LL * q * (z - qp));
  f.set(r, x - q, z - qp);
  return f;
}

/// After X_r(m) X_s(-m) F_r F_s CX^r_s (the swap-based interaction). Derived by
/// conjugating through CX then F on both sites.
inline PauliFrame frame_update_entangle_swap(PauliFrame f, std::size_t r, std::size_t s, int m) {
  detail::check_frame_site(f, r);
  detail::check_frame_site(f, s);
  if (r == s) throw std::invalid_argument("entangling update needs two distinct QVs");
  const long long xr = f.x(r), xs = f.x(s), zr = f.z(r), zs = f.z(s);
  const long long zr1 = zr - zs, xs1 = xs + xr;
  f.add_xi(-2 * xr * zr1 - 2 * xs1 * zs);
  f.set(r, -zr1 + m, xr);
  f.set(s, -zs - m, xs1);
  return f;
}

/// Applies the inverse frame correction: returns (prod_k X(x_k)Z(z_k))^dag |state>.
inline QState remove_frame(const QState& state, const PauliFrame& f) {
  if (state.num_subsystems() != f.size()) throw std::invalid_argument("frame size mismatch");
  QState out = state;
  for (std::size_t k = 0; k < f.size(); ++k) {
    const int d = f.modulus(k);
    if (state.dims()[k] != d) throw std::invalid_argument("frame modulus does not match register");
    std::size_t t[] = {k};
    out = apply_gate(std::move(out), pauli_x(d, -f.x(k)), t);
    out = apply_gate(std::move(out), pauli_z(d, -f.z(k)), t);
  }
  return out;
}

/// Applies prod_k X(x_k)Z(z_k) (the frame error itself) to a state.
inline QState apply_frame(const QState& state, const PauliFrame& f) {
  if (state.num_subsystems() != f.size()) throw std::invalid_argument("frame size mismatch");
  QState out = state;
  for (std::size_t k = 0; k < f.size(); ++k) {
    const int d = f.modulus(k);
    std::size_t t[] = {k};
    out = apply_gate(std::move(out), pauli_z(d, f.z(k)), t);
    out = apply_gate(std::move(out), pauli_x(d, f.x(k)), t);
  }
  return out;
}

}  // namespace qvsim
