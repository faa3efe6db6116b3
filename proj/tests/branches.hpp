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

// Helpers that run compiled programs on outcome branches and compare with the oracle.

#include <functional>
#include <random>
#include <vector>

#include "oracle.hpp"
#include "qvsim/adqc.hpp"

namespace branches {

/// Runs `program` with the given forced outcomes (random beyond them) and returns the
/// fidelity of the frame-corrected state with the oracle's ideal output.
inline double branch_fidelity(const qvsim::LogicalCircuit& c, const qvsim::AdqcProgram& program,
                              const qvsim::QState& input, std::vector<int> forced, std::uint64_t seed,
                              qvsim::RunResult* out = nullptr) {
  qvsim::OutcomeSource src(std::move(forced), seed);
  qvsim::RunResult r = qvsim::run(program, input, src);
  oracle::Vec ideal = oracle::run_circuit(c, input.to_vector(), r.measurements);
  if (ideal.size() == 0) return 0.0;
  const double f = oracle::fidelity(qvsim::logical_state(r).to_vector(), ideal);
  if (out) *out = std::move(r);
  return f;
}

inline std::size_t ancilla_count(const qvsim::AdqcProgram& p) {
  std::size_t k = 0;
  for (const auto& s : p.steps) k += std::holds_alternative<qvsim::AbsorbPauliStep>(s) ? 0 : 1;
  return k;
}

/// Calls fn(outcomes) for every outcome vector in Z(d)^k.
inline void for_each_branch(int d, std::size_t k, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> v(k, 0);
  while (true) {
    fn(v);
    std::size_t i = k;
    while (i > 0 && ++v[i - 1] == d) v[--i] = 0;
    if (i == 0) return;
  }
}

/// Minimum fidelity over every possible branch of a circuit. Gate steps have equiprobable
/// outcomes; branches that force an impossible readout are skipped.
inline double exhaustive_min_fidelity(const qvsim::LogicalCircuit& c, const qvsim::Interaction& in,
                                      const qvsim::QState& input, std::size_t* count = nullptr) {
  const qvsim::AdqcProgram program = qvsim::compile_logical(c, in);
  double worst = 1.0;
  std::size_t n = 0;
  for_each_branch(c.d, ancilla_count(program), [&](const std::vector<int>& f) {
    try {
      worst = std::min(worst, branch_fidelity(c, program, input, f, 0));
      ++n;
    } catch (const qvsim::ImpossibleOutcome&) {
    }
  });
  if (count) *count = n;
  return worst;
}

inline qvsim::QState random_input(int d, std::size_t n, std::mt19937_64& rng) {
  std::vector<int> dims(n, d);
  return qvsim::state_from_vector(qvsim::DimSpec(dims), oracle::random_state(oracle::total(dims), rng));
}

}  // namespace branches
