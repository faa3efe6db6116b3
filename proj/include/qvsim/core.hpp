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
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace qvsim {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Norm and unitarity checks.
inline constexpr double kNormTolerance = 1e-9;
/// Forced outcomes below this probability are rejected.
inline constexpr double kZeroProbability = 1e-12;
/// Largest state vector we agree to allocate (2^26 amplitudes, 1 GiB).
inline constexpr std::size_t kMaxAmplitudes = std::size_t{1} << 26;

/// Raised when a forced measurement outcome has (numerically) zero probability.
class ImpossibleOutcome : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a numerical invariant (norm, unitarity, disentanglement) is violated.
class NumericalInvariantError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Ring arithmetic over Z(d).

/// Representative of `a` in {0, ..., n-1}.
inline int mod(long long a, int n) {
  long long r = a % n;
  return static_cast<int>(r < 0 ? r + n : r);
}

/// omega^k with omega = exp(2 pi i / d); k is reduced mod d first so the phase is exact.
inline Complex omega_pow(int d, long long k) {
  return std::polar(1.0, kTwoPi * mod(k, d) / d);
}

/// tau^k with tau = exp(i pi / d), a 2d-th root of unity, so omega^(k/2) = tau^k.
inline Complex tau_pow(int d, long long k) {
  return std::polar(1.0, kPi * mod(k, 2 * d) / d);
}

/// 1 for odd d, 0 for even d. Makes the phase gate well defined on Z(d).
inline int phase_offset(int d) { return d % 2; }

inline void check_label(int q, int d) {
  if (q < 0 || q >= d) {
    throw std::out_of_range("label " + std::to_string(q) + " outside Z(" + std::to_string(d) + ")");
  }
}

// ---------------------------------------------------------------------------
// Random numbers.

/// Seedable 64-bit generator. Raw draws from std::mt19937_64 are fully specified by the
/// standard; doubles are derived from the top 53 bits, so sequences agree across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform double in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n).
  int below(int n) { return static_cast<int>(engine_() % static_cast<std::uint64_t>(n)); }

  /// Standard normal via Box-Muller on `uniform()`.
  double normal() {
    double u1 = uniform();
    double u2 = uniform();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
  }

 private:
  std::mt19937_64 engine_;
};

/// Chooses measurement outcomes: consumes forced outcomes in order, then samples.
class OutcomeSource {
 public:
  explicit OutcomeSource(std::uint64_t seed = 0) : rng_(seed) {}
  explicit OutcomeSource(std::vector<int> forced, std::uint64_t seed = 0)
      : forced_(forced.begin(), forced.end()), rng_(seed) {}

  /// Picks an outcome given the exact outcome distribution.
  int choose(std::span<const double> probabilities) {
    if (!forced_.empty()) {
      int m = forced_.front();
      forced_.pop_front();
      last_forced_ = true;
      if (m < 0 || static_cast<std::size_t>(m) >= probabilities.size()) {
        throw std::out_of_range("forced outcome " + std::to_string(m) + " out of range");
      }
      if (probabilities[m] < kZeroProbability) {
        throw ImpossibleOutcome("forced outcome " + std::to_string(m) + " has probability " +
                                std::to_string(probabilities[m]));
      }
      return m;
    }
    last_forced_ = false;
    double u = rng_.uniform();
    double acc = 0.0;
    int last_possible = -1;
    for (std::size_t m = 0; m < probabilities.size(); ++m) {
      if (probabilities[m] < kZeroProbability) continue;
      last_possible = static_cast<int>(m);
      acc += probabilities[m];
      if (u < acc) return static_cast<int>(m);
    }
    if (last_possible < 0) throw NumericalInvariantError("all outcomes have zero probability");
    return last_possible;
  }

  bool last_forced() const { return last_forced_; }
  std::size_t forced_remaining() const { return forced_.size(); }

 private:
  std::deque<int> forced_;
  Rng rng_;
  bool last_forced_ = false;
};

// ---------------------------------------------------------------------------
// Register layout.

/// Dimensions of a tensor product of subsystems, row-major (subsystem 0 most significant).
class DimSpec {
 public:
  DimSpec() = default;

  explicit DimSpec(std::vector<int> dims) : dims_(std::move(dims)) {
    strides_.assign(dims_.size(), 1);
    total_ = 1;
    for (std::size_t k = dims_.size(); k-- > 0;) {
      if (dims_[k] < 2) throw std::invalid_argument("subsystem dimension must be >= 2");
      strides_[k] = total_;
      if (total_ > kMaxAmplitudes / static_cast<std::size_t>(dims_[k])) {
        throw std::length_error("state vector exceeds addressable size");
      }
      total_ *= static_cast<std::size_t>(dims_[k]);
    }
  }

  std::size_t size() const { return dims_.size(); }
  int operator[](std::size_t k) const { return dims_.at(k); }
  std::size_t total() const { return total_; }
  std::size_t stride(std::size_t k) const { return strides_.at(k); }
  const std::vector<int>& dims() const { return dims_; }

  std::size_t index_of(std::span<const int> labels) const {
    if (labels.size() != dims_.size()) throw std::invalid_argument("label count mismatch");
    std::size_t index = 0;
    for (std::size_t k = 0; k < dims_.size(); ++k) {
      check_label(labels[k], dims_[k]);
      index += static_cast<std::size_t>(labels[k]) * strides_[k];
    }
    return index;
  }

  std::vector<int> labels_of(std::size_t index) const {
    std::vector<int> labels(dims_.size());
    for (std::size_t k = 0; k < dims_.size(); ++k) {
      labels[k] = static_cast<int>((index / strides_[k]) % dims_[k]);
    }
    return labels;
  }

  DimSpec without(std::size_t k) const {
    std::vector<int> d = dims_;
    d.erase(d.begin() + static_cast<std::ptrdiff_t>(k));
    return DimSpec(std::move(d));
  }

  DimSpec appended(int d) const {
    std::vector<int> v = dims_;
    v.push_back(d);
    return DimSpec(std::move(v));
  }

  bool operator==(const DimSpec& other) const { return dims_ == other.dims_; }

 private:
  std::vector<int> dims_;
  std::vector<std::size_t> strides_;
  std::size_t total_ = 1;
};

class Gate;

/// Normalized pure state of a register. Immutable once built; operations return new states.
class QState {
 public:
  /// Empty register: the scalar 1.
  QState() : amps_{Complex{1.0, 0.0}} {}

  QState(DimSpec dims, std::vector<Complex> amps) : dims_(std::move(dims)), amps_(std::move(amps)) {
    if (amps_.size() != dims_.total()) throw std::invalid_argument("amplitude count mismatch");
    if (std::abs(norm_squared() - 1.0) > kNormTolerance) {
      throw NumericalInvariantError("state is not normalized");
    }
  }

  const DimSpec& dims() const { return dims_; }
  std::size_t num_subsystems() const { return dims_.size(); }
  std::span<const Complex> amps() const { return amps_; }
  Complex amp(std::size_t i) const { return amps_.at(i); }

  double norm_squared() const {
    double s = 0.0;
    for (const Complex& a : amps_) s += std::norm(a);
    return s;
  }

  Vector to_vector() const {
    return Eigen::Map<const Vector>(amps_.data(), static_cast<Eigen::Index>(amps_.size()));
  }

 private:
  struct Unchecked {};
  QState(Unchecked, DimSpec dims, std::vector<Complex> amps)
      : dims_(std::move(dims)), amps_(std::move(amps)) {}

  friend QState apply_gate(QState, const Gate&, std::span<const std::size_t>);
  friend QState project_out(const QState&, std::size_t, int);
  friend QState tensor(const QState&, const QState&);
  friend QState permute_subsystems(const QState&, std::span<const std::size_t>);
  friend QState make_unchecked_state(DimSpec, std::vector<Complex>);

  DimSpec dims_;
  std::vector<Complex> amps_;
};

/// Builds a state, renormalizing; throws if the vector is (numerically) zero.
inline QState make_unchecked_state(DimSpec dims, std::vector<Complex> amps) {
  double s = 0.0;
  for (const Complex& a : amps) s += std::norm(a);
  if (s < kZeroProbability) throw NumericalInvariantError("zero vector");
  double inv = 1.0 / std::sqrt(s);
  for (Complex& a : amps) a *= inv;
  return QState(QState::Unchecked{}, std::move(dims), std::move(amps));
}

inline QState state_from_vector(DimSpec dims, const Vector& v) {
  std::vector<Complex> amps(v.data(), v.data() + v.size());
  return QState(std::move(dims), std::move(amps));
}

inline QState make_basis_state(const DimSpec& dims, std::span<const int> labels) {
  std::vector<Complex> amps(dims.total());
  amps[dims.index_of(labels)] = 1.0;
  return QState(dims, std::move(amps));
}

inline QState make_basis_state(const std::vector<int>& dims, const std::vector<int>& labels) {
  return make_basis_state(DimSpec(dims), labels);
}

/// |+_q> = F|q>, amplitude omega^(q q') / sqrt(d) on |q'>.
inline QState make_plus_state(int d, int q) {
  check_label(q, d);
  std::vector<Complex> amps(d);
  double norm = 1.0 / std::sqrt(static_cast<double>(d));
  for (int k = 0; k < d; ++k) amps[k] = omega_pow(d, static_cast<long long>(q) * k) * norm;
  return QState(DimSpec({d}), std::move(amps));
}

inline QState tensor(const QState& a, const QState& b) {
  std::vector<int> dims = a.dims().dims();
  dims.insert(dims.end(), b.dims().dims().begin(), b.dims().dims().end());
  std::vector<Complex> amps;
  amps.reserve(a.amps_.size() * b.amps_.size());
  for (const Complex& x : a.amps_) {
    for (const Complex& y : b.amps_) amps.push_back(x * y);
  }
  return QState(QState::Unchecked{}, DimSpec(std::move(dims)), std::move(amps));
}

/// Reorders subsystems: new subsystem k is old subsystem order[k].
inline QState permute_subsystems(const QState& state, std::span<const std::size_t> order) {
  const DimSpec& in = state.dims();
  if (order.size() != in.size()) throw std::invalid_argument("permutation size mismatch");
  std::vector<int> dims(order.size());
  std::vector<bool> seen(order.size(), false);
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (order[k] >= in.size() || seen[order[k]]) throw std::invalid_argument("not a permutation");
    seen[order[k]] = true;
    dims[k] = in[order[k]];
  }
  DimSpec out(dims);
  std::vector<Complex> amps(in.total());
  for (std::size_t i = 0; i < in.total(); ++i) {
    std::vector<int> old_labels = in.labels_of(i);
    std::size_t j = 0;
    for (std::size_t k = 0; k < order.size(); ++k) j += old_labels[order[k]] * out.stride(k);
    amps[j] = state.amps_[i];
  }
  return QState(QState::Unchecked{}, std::move(out), std::move(amps));
}

// ---------------------------------------------------------------------------
// Gates.

/// Unitary on one or two subsystems. Either a dense matrix, or a structured form
/// U|i> = phases[i] |perm[i]> that is applied without building the matrix.
class Gate {
 public:
  static Gate from_matrix(std::string name, std::vector<int> dims, Matrix m) {
    Gate g(std::move(name), std::move(dims));
    if (m.rows() != static_cast<Eigen::Index>(g.dim_) || m.cols() != m.rows()) {
      throw std::invalid_argument("matrix size does not match gate dims");
    }
    Matrix defect = m.adjoint() * m - Matrix::Identity(m.rows(), m.cols());
    if (defect.cwiseAbs().maxCoeff() > kNormTolerance) {
      throw NumericalInvariantError("gate " + g.name_ + " is not unitary");
    }
    g.matrix_ = std::move(m);
    return g;
  }

  static Gate structured(std::string name, std::vector<int> dims, std::vector<std::size_t> perm,
                         std::vector<Complex> phases) {
    Gate g(std::move(name), std::move(dims));
    if (perm.size() != g.dim_ || phases.size() != g.dim_) {
      throw std::invalid_argument("structured gate tables do not match gate dims");
    }
    std::vector<bool> hit(g.dim_, false);
    for (std::size_t i = 0; i < g.dim_; ++i) {
      if (perm[i] >= g.dim_ || hit[perm[i]]) throw std::invalid_argument("not a permutation");
      hit[perm[i]] = true;
      if (std::abs(std::abs(phases[i]) - 1.0) > kNormTolerance) {
        throw NumericalInvariantError("gate " + g.name_ + " has a non-unit phase");
      }
    }
    g.perm_ = std::move(perm);
    g.phases_ = std::move(phases);
    return g;
  }

  static Gate diagonal(std::string name, std::vector<int> dims, std::vector<Complex> phases) {
    std::vector<std::size_t> perm(phases.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    return structured(std::move(name), std::move(dims), std::move(perm), std::move(phases));
  }

  const std::string& name() const { return name_; }
  std::size_t arity() const { return dims_.size(); }
  const std::vector<int>& dims() const { return dims_; }
  std::size_t dim() const { return dim_; }
  bool is_structured() const { return !matrix_.has_value(); }

  bool is_diagonal() const {
    if (!is_structured()) return false;
    for (std::size_t i = 0; i < dim_; ++i) {
      if (perm_[i] != i) return false;
    }
    return true;
  }

  const std::vector<std::size_t>& permutation() const { return perm_; }
  const std::vector<Complex>& phases() const { return phases_; }

  Matrix matrix() const {
    if (matrix_) return *matrix_;
    Matrix m = Matrix::Zero(static_cast<Eigen::Index>(dim_), static_cast<Eigen::Index>(dim_));
    for (std::size_t i = 0; i < dim_; ++i) m(perm_[i], i) = phases_[i];
    return m;
  }

  Gate adjoint() const {
    if (matrix_) return from_matrix(name_ + "^dag", dims_, matrix_->adjoint());
    std::vector<std::size_t> perm(dim_);
    std::vector<Complex> phases(dim_);
    for (std::size_t i = 0; i < dim_; ++i) {
      perm[perm_[i]] = i;
      phases[perm_[i]] = std::conj(phases_[i]);
    }
    return structured(name_ + "^dag", dims_, std::move(perm), std::move(phases));
  }

  Gate renamed(std::string name) const {
    Gate g = *this;
    g.name_ = std::move(name);
    return g;
  }

 private:
  Gate(std::string name, std::vector<int> dims) : name_(std::move(name)), dims_(std::move(dims)) {
    if (dims_.empty() || dims_.size() > 2) throw std::invalid_argument("gate arity must be 1 or 2");
    dim_ = 1;
    for (int d : dims_) {
      if (d < 2) throw std::invalid_argument("gate dimension must be >= 2");
      dim_ *= static_cast<std::size_t>(d);
    }
  }

  std::string name_;
  std::vector<int> dims_;
  std::size_t dim_ = 0;
  std::optional<Matrix> matrix_;
  std::vector<std::size_t> perm_;
  std::vector<Complex> phases_;
};

/// Product a*b (b acts first). Structured if both factors are.
inline Gate operator*(const Gate& a, const Gate& b) {
  if (a.dims() != b.dims()) throw std::invalid_argument("gate dims mismatch in product");
  std::string name = a.name() + "*" + b.name();
  if (a.is_structured() && b.is_structured()) {
    std::vector<std::size_t> perm(a.dim());
    std::vector<Complex> phases(a.dim());
    for (std::size_t i = 0; i < a.dim(); ++i) {
      std::size_t mid = b.permutation()[i];
      perm[i] = a.permutation()[mid];
      phases[i] = a.phases()[mid] * b.phases()[i];
    }
    return Gate::structured(std::move(name), a.dims(), std::move(perm), std::move(phases));
  }
  return Gate::from_matrix(std::move(name), a.dims(), a.matrix() * b.matrix());
}

/// Tensor product of two single-subsystem gates (a on the first subsystem).
inline Gate kron(const Gate& a, const Gate& b) {
  if (a.arity() != 1 || b.arity() != 1) throw std::invalid_argument("kron needs 1-subsystem gates");
  std::vector<int> dims{a.dims()[0], b.dims()[0]};
  std::string name = a.name() + "(x)" + b.name();
  const std::size_t db = b.dim();
  if (a.is_structured() && b.is_structured()) {
    std::vector<std::size_t> perm(a.dim() * db);
    std::vector<Complex> phases(a.dim() * db);
    for (std::size_t i = 0; i < a.dim(); ++i) {
      for (std::size_t j = 0; j < db; ++j) {
        perm[i * db + j] = a.permutation()[i] * db + b.permutation()[j];
        phases[i * db + j] = a.phases()[i] * b.phases()[j];
      }
    }
    return Gate::structured(std::move(name), std::move(dims), std::move(perm), std::move(phases));
  }
  Matrix ma = a.matrix();
  Matrix mb = b.matrix();
  Matrix m(ma.rows() * mb.rows(), ma.cols() * mb.cols());
  for (Eigen::Index i = 0; i < ma.rows(); ++i) {
    for (Eigen::Index j = 0; j < ma.cols(); ++j) {
      m.block(i * mb.rows(), j * mb.cols(), mb.rows(), mb.cols()) = ma(i, j) * mb;
    }
  }
  return Gate::from_matrix(std::move(name), std::move(dims), std::move(m));
}

namespace detail {

/// Calls fn(base) for every flat index whose digits on `targets` are all zero.
template <typename Fn>
void for_each_base(const DimSpec& dims, std::span<const std::size_t> targets, Fn&& fn) {
  std::vector<std::size_t> rest_dims;
  std::vector<std::size_t> rest_strides;
  for (std::size_t k = 0; k < dims.size(); ++k) {
    if (std::find(targets.begin(), targets.end(), k) == targets.end()) {
      rest_dims.push_back(static_cast<std::size_t>(dims[k]));
      rest_strides.push_back(dims.stride(k));
    }
  }
  std::vector<std::size_t> counter(rest_dims.size(), 0);
  std::size_t base = 0;
  while (true) {
    fn(base);
    std::size_t k = rest_dims.size();
    while (k > 0) {
      --k;
      if (++counter[k] < rest_dims[k]) {
        base += rest_strides[k];
        break;
      }
      base -= (rest_dims[k] - 1) * rest_strides[k];
      counter[k] = 0;
      if (k == 0) return;
    }
    if (rest_dims.empty()) return;
  }
}

/// Flat offsets of every local basis index of `targets` (row-major over the targets).
inline std::vector<std::size_t> local_offsets(const DimSpec& dims,
                                              std::span<const std::size_t> targets) {
  std::size_t local = 1;
  for (std::size_t t : targets) local *= static_cast<std::size_t>(dims[t]);
  std::vector<std::size_t> offsets(local, 0);
  for (std::size_t l = 0; l < local; ++l) {
    std::size_t rem = l;
    std::size_t off = 0;
    for (std::size_t j = targets.size(); j-- > 0;) {
      std::size_t dj = static_cast<std::size_t>(dims[targets[j]]);
      off += (rem % dj) * dims.stride(targets[j]);
      rem /= dj;
    }
    offsets[l] = off;
  }
  return offsets;
}

inline void check_targets(const DimSpec& dims, const Gate& g, std::span<const std::size_t> targets) {
  if (targets.size() != g.arity()) throw std::invalid_argument("gate arity does not match targets");
  for (std::size_t j = 0; j < targets.size(); ++j) {
    if (targets[j] >= dims.size()) throw std::out_of_range("target subsystem out of range");
    if (dims[targets[j]] != g.dims()[j]) {
      throw std::invalid_argument("gate " + g.name() + " dimension does not match target");
    }
    for (std::size_t i = 0; i < j; ++i) {
      if (targets[i] == targets[j]) throw std::invalid_argument("duplicate gate target");
    }
  }
}

}  // namespace detail

/// Applies I x ... x U x ... x I with U on `targets` (in gate order).
inline QState apply_gate(QState state, const Gate& g, std::span<const std::size_t> targets) {
  detail::check_targets(state.dims_, g, targets);
  const std::vector<std::size_t> offsets = detail::local_offsets(state.dims_, targets);
  const std::size_t local = offsets.size();
  std::vector<Complex> scratch(local);
  Complex* amps = state.amps_.data();
  if (g.is_structured()) {
    const auto& perm = g.permutation();
    const auto& phases = g.phases();
    detail::for_each_base(state.dims_, targets, [&](std::size_t base) {
      for (std::size_t l = 0; l < local; ++l) scratch[perm[l]] = phases[l] * amps[base + offsets[l]];
      for (std::size_t l = 0; l < local; ++l) amps[base + offsets[l]] = scratch[l];
    });
  } else {
    const Matrix m = g.matrix();
    detail::for_each_base(state.dims_, targets, [&](std::size_t base) {
      for (std::size_t row = 0; row < local; ++row) {
        Complex acc = 0.0;
        for (std::size_t col = 0; col < local; ++col) {
          acc += m(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) *
                 amps[base + offsets[col]];
        }
        scratch[row] = acc;
      }
      for (std::size_t l = 0; l < local; ++l) amps[base + offsets[l]] = scratch[l];
    });
  }
  if (std::abs(state.norm_squared() - 1.0) > kNormTolerance) {
    throw NumericalInvariantError("norm drift after gate " + g.name());
  }
  return state;
}

inline QState apply_gate(QState state, const Gate& g, std::initializer_list<std::size_t> targets) {
  std::vector<std::size_t> t(targets);
  return apply_gate(std::move(state), g, std::span<const std::size_t>(t));
}

// ---------------------------------------------------------------------------
// Measurement.

/// Born probabilities of each computational-basis outcome on `target`.
inline std::vector<double> outcome_probabilities(const QState& state, std::size_t target) {
  const DimSpec& dims = state.dims();
  if (target >= dims.size()) throw std::out_of_range("measured subsystem out of range");
  const int d = dims[target];
  const std::size_t stride = dims.stride(target);
  std::vector<double> probs(d, 0.0);
  for (std::size_t i = 0; i < dims.total(); ++i) {
    probs[(i / stride) % d] += std::norm(state.amp(i));
  }
  return probs;
}

/// Projects `target` onto |m>, removes it, and renormalizes.
inline QState project_out(const QState& state, std::size_t target, int m) {
  const DimSpec& dims = state.dims();
  if (target >= dims.size()) throw std::out_of_range("measured subsystem out of range");
  check_label(m, dims[target]);
  DimSpec rest = dims.without(target);
  std::vector<Complex> amps;
  amps.reserve(rest.total());
  const std::size_t stride = dims.stride(target);
  const std::size_t d = static_cast<std::size_t>(dims[target]);
  for (std::size_t i = 0; i < dims.total(); ++i) {
    if ((i / stride) % d == static_cast<std::size_t>(m)) amps.push_back(state.amps_[i]);
  }
  double s = 0.0;
  for (const Complex& a : amps) s += std::norm(a);
  if (s < kZeroProbability) throw ImpossibleOutcome("projection onto zero-probability outcome");
  double inv = 1.0 / std::sqrt(s);
  for (Complex& a : amps) a *= inv;
  return QState(QState::Unchecked{}, std::move(rest), std::move(amps));
}

struct MeasurementResult {
  int outcome = 0;
  double probability = 0.0;
  QState post;
};

/// Destructive computational-basis (x-hat) measurement of `target`.
inline MeasurementResult measure_x(const QState& state, std::size_t target, OutcomeSource& source) {
  std::vector<double> probs = outcome_probabilities(state, target);
  double total = 0.0;
  for (double p : probs) total += p;
  if (std::abs(total - 1.0) > kNormTolerance) throw NumericalInvariantError("probabilities do not sum to 1");
  int m = source.choose(probs);
  return {m, probs[m], project_out(state, target, m)};
}

inline MeasurementResult measure_x(const QState& state, std::size_t target, int forced) {
  OutcomeSource source(std::vector<int>{forced});
  return measure_x(state, target, source);
}

/// Measurement of x-hat_U = U^dag x-hat U: rotate by U, then measure x-hat.
inline MeasurementResult measure_observable(const QState& state, std::size_t target, const Gate& u,
                                            OutcomeSource& source) {
  if (u.arity() != 1) throw std::invalid_argument("measurement rotation must be a one-subsystem gate");
  std::size_t t[] = {target};
  return measure_x(apply_gate(state, u, t), target, source);
}

inline MeasurementResult measure_observable(const QState& state, std::size_t target, const Gate& u,
                                            int forced) {
  OutcomeSource source(std::vector<int>{forced});
  return measure_observable(state, target, u, source);
}

/// One ancilla measurement as logged by the protocols.
struct MeasurementRecord {
  std::size_t target = 0;
  std::string observable;
  int outcome = 0;
  bool forced = false;
};

// ---------------------------------------------------------------------------
// Comparison.

/// |<a|b>|^2, insensitive to global phase.
inline double fidelity(const QState& a, const QState& b) {
  if (!(a.dims() == b.dims())) throw std::invalid_argument("fidelity of states with different dims");
  Complex overlap = 0.0;
  for (std::size_t i = 0; i < a.amps().size(); ++i) overlap += std::conj(a.amp(i)) * b.amp(i);
  return std::norm(overlap);
}

}  // namespace qvsim
