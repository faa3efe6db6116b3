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

#include <gtest/gtest.h>

#include <random>

#include "oracle.hpp"
#include "qvsim/core.hpp"
#include "qvsim/gates.hpp"

using namespace qvsim;

namespace {

QState random_qstate(const std::vector<int>& dims, std::mt19937_64& rng) {
  return state_from_vector(DimSpec(dims), oracle::random_state(oracle::total(dims), rng));
}

}  // namespace

TEST(DimSpec, RowMajorIndexing) {
  DimSpec s({2, 3, 4});
  EXPECT_EQ(s.total(), 24u);
  EXPECT_EQ(s.stride(0), 12u);
  EXPECT_EQ(s.stride(2), 1u);
  std::vector<int> l{1, 2, 3};
  EXPECT_EQ(s.index_of(l), 23u);
  EXPECT_EQ(s.labels_of(23), l);
  for (std::size_t i = 0; i < s.total(); ++i) EXPECT_EQ(s.index_of(s.labels_of(i)), i);
}

TEST(DimSpec, RejectsBadDimensions) {
  EXPECT_THROW(DimSpec({2, 1}), std::invalid_argument);
  EXPECT_THROW(DimSpec(std::vector<int>(40, 2)), std::length_error);
  DimSpec s({3, 3});
  std::vector<int> bad{0, 3};
  EXPECT_THROW(s.index_of(bad), std::out_of_range);
}

TEST(QState, BasisAndPlusStates) {
  QState b = make_basis_state({2, 3}, {1, 2});
  EXPECT_EQ(b.amp(5), Complex(1.0, 0.0));
  QState p = make_plus_state(4, 1);
  // |+_1> = F|1>: amplitude of |q> is omega^q / 2.
  for (int q = 0; q < 4; ++q) EXPECT_NEAR(std::abs(p.amp(q) - oracle::w(4, q) / 2.0), 0.0, 1e-15);
  EXPECT_THROW(QState(DimSpec({2}), {Complex(1.0), Complex(1.0)}), NumericalInvariantError);
}

TEST(QState, TensorMatchesKron) {
  std::mt19937_64 rng(1);
  QState a = random_qstate({2, 3}, rng);
  QState b = random_qstate({3}, rng);
  Vector want = oracle::kron(a.to_vector(), b.to_vector());
  EXPECT_NEAR((tensor(a, b).to_vector() - want).norm(), 0.0, 1e-14);
}

TEST(ApplyGate, MatchesDenseOracleOnRandomTargets) {
  std::mt19937_64 rng(2);
  const std::vector<std::vector<int>> layouts{{2, 3, 2}, {3, 3, 3}, {4, 2, 5}, {5, 5}};
  for (const auto& dims : layouts) {
    for (int trial = 0; trial < 20; ++trial) {
      QState s = random_qstate(dims, rng);
      std::uniform_int_distribution<std::size_t> pick(0, dims.size() - 1);
      const std::size_t a = pick(rng);
      std::size_t b = a;
      while (b == a) b = pick(rng);
      const oracle::Mat u1 = oracle::random_unitary(dims[a], rng);
      const oracle::Mat u2 = oracle::random_unitary(dims[a] * dims[b], rng);
      QState s1 = apply_gate(s, Gate::from_matrix("u", {dims[a]}, u1), {a});
      EXPECT_NEAR((s1.to_vector() - oracle::embed1(u1, a, dims) * s.to_vector()).norm(), 0.0, 1e-12);
      QState s2 = apply_gate(s, Gate::from_matrix("u", {dims[a], dims[b]}, u2), {a, b});
      EXPECT_NEAR((s2.to_vector() - oracle::embed2(u2, a, b, dims) * s.to_vector()).norm(), 0.0, 1e-12);
      EXPECT_NEAR(s2.norm_squared(), 1.0, 1e-9);
    }
  }
}

TEST(ApplyGate, StructuredAndMatrixFormsAgree) {
  std::mt19937_64 rng(3);
  for (int d = 2; d <= 5; ++d) {
    const std::vector<Gate> gates{pauli_x(d, 1), pauli_z(d, 2), phase_gate(d, 3), swap(d), cz(d),
                                  cubic_phase(d, 1), kron(pauli_x(d, 1), pauli_z(d, 1))};
    for (const Gate& g : gates) {
      ASSERT_TRUE(g.is_structured()) << g.name();
      const Gate dense = Gate::from_matrix(g.name(), g.dims(), g.matrix());
      std::vector<int> dims(3, d);
      std::vector<std::size_t> targets = g.arity() == 1 ? std::vector<std::size_t>{1} : std::vector<std::size_t>{2, 0};
      for (int trial = 0; trial < 100; ++trial) {
        QState s = random_qstate(dims, rng);
        EXPECT_GT(fidelity(apply_gate(s, g, targets), apply_gate(s, dense, targets)), 1 - 1e-12);
      }
    }
  }
}

TEST(ApplyGate, RejectsBadTargets) {
  QState s = make_basis_state({2, 3}, {0, 0});
  EXPECT_THROW(apply_gate(s, pauli_x(2, 1), {1}), std::invalid_argument);
  EXPECT_THROW(apply_gate(s, pauli_x(2, 1), {5}), std::out_of_range);
  EXPECT_THROW(apply_gate(s, swap(2), {0, 0}), std::invalid_argument);
  EXPECT_THROW(Gate::from_matrix("bad", {2}, oracle::Mat::Ones(2, 2)), NumericalInvariantError);
}

TEST(Measurement, ProbabilitiesSumToOneAndRemoveSubsystem) {
  std::mt19937_64 rng(4);
  QState s = random_qstate({3, 2, 4}, rng);
  for (std::size_t t = 0; t < 3; ++t) {
    std::vector<double> p = outcome_probabilities(s, t);
    double sum = 0.0;
    for (double x : p) sum += x;
    EXPECT_NEAR(sum, 1.0, 1e-9);
    for (int m = 0; m < s.dims()[t]; ++m) {
      MeasurementResult r = measure_x(s, t, m);
      EXPECT_EQ(r.post.num_subsystems(), 2u);
      EXPECT_NEAR(r.post.norm_squared(), 1.0, 1e-9);
      // Oracle: project and renormalize.
      oracle::Vec want = oracle::project(s.to_vector(), t, m, {3, 2, 4});
      EXPECT_NEAR(r.probability, want.squaredNorm(), 1e-12);
      EXPECT_GT(oracle::fidelity(r.post.to_vector(), want / want.norm()), 1 - 1e-12);
    }
  }
}

TEST(Measurement, ForcedImpossibleOutcomeThrows) {
  QState s = make_basis_state({3}, {1});
  EXPECT_THROW(measure_x(s, 0, 0), ImpossibleOutcome);
  EXPECT_THROW(measure_x(s, 0, 7), std::out_of_range);
  EXPECT_EQ(measure_x(s, 0, 1).outcome, 1);
}

TEST(Measurement, ObservableRotatesBasis) {
  // x-hat_{F^dag} on |+_2> gives 2 with certainty.
  QState p = make_plus_state(5, 2);
  OutcomeSource src(9);
  MeasurementResult r = measure(p, 0, observable_p(5), src);
  EXPECT_EQ(r.outcome, 2);
  EXPECT_NEAR(r.probability, 1.0, 1e-12);
}

TEST(Rng, ReproducibleAcrossRuns) {
  Rng a(42), b(42);
  for (int k = 0; k < 100; ++k) EXPECT_EQ(a.next(), b.next());
  // mt19937_64 with the default seed 5489 has a standardized 10000th output.
  std::mt19937_64 ref;
  ref.discard(9999);
  EXPECT_EQ(ref(), 9981545732273789042ULL);
  Rng c(5489);
  for (int k = 0; k < 9999; ++k) c.next();
  EXPECT_EQ(c.next(), 9981545732273789042ULL);
}

TEST(OutcomeSource, SamplingFollowsDistribution) {
  OutcomeSource src(123);
  std::vector<double> p{0.0, 0.25, 0.75};
  std::vector<int> counts(3, 0);
  for (int k = 0; k < 20000; ++k) ++counts[src.choose(p)];
  EXPECT_EQ(counts[0], 0);
  EXPECT_NEAR(counts[1] / 20000.0, 0.25, 0.02);
  OutcomeSource forced({2, 1}, 0);
  EXPECT_EQ(forced.choose(p), 2);
  EXPECT_TRUE(forced.last_forced());
  EXPECT_EQ(forced.choose(p), 1);
  EXPECT_EQ(forced.forced_remaining(), 0u);
}

TEST(Permute, ReordersSubsystems) {
  std::mt19937_64 rng(5);
  QState s = random_qstate({2, 3, 4}, rng);
  std::vector<std::size_t> order{2, 0, 1};
  QState p = permute_subsystems(s, order);
  EXPECT_EQ(p.dims().dims(), (std::vector<int>{4, 2, 3}));
  for (std::size_t i = 0; i < s.dims().total(); ++i) {
    std::vector<int> l = s.dims().labels_of(i);
    std::vector<int> pl{l[2], l[0], l[1]};
    EXPECT_EQ(p.amp(p.dims().index_of(pl)), s.amp(i));
  }
}

TEST(Fidelity, PhaseInsensitive) {
  std::mt19937_64 rng(6);
  QState s = random_qstate({3, 3}, rng);
  Vector v = s.to_vector() * std::polar(1.0, 0.7);
  EXPECT_NEAR(fidelity(s, state_from_vector(s.dims(), v)), 1.0, 1e-12);
}
