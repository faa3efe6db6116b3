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

#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>

#include "branches.hpp"
#include "oracle.hpp"
#include "qvsim/circuit.hpp"

using namespace qvsim;

namespace {

int line_of(const std::string& text) {
  try {
    parse_circuit(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return -1;
}

CircuitFile random_file(std::mt19937_64& rng) {
  const int d = 2 + static_cast<int>(rng() % 4);
  const std::size_t n = 1 + rng() % 3;
  CircuitFile c;
  c.d = d;
  c.n = n;
  c.ops = oracle::random_circuit(d, n, 15, rng, {.measure = rng() % 2 == 0}).ops;
  if (rng() % 2) c.seed = rng();
  if (rng() % 2) c.forced = {static_cast<int>(rng() % d), static_cast<int>(rng() % d)};
  if (rng() % 2) {
    for (std::size_t k = 0; k < n; ++k) c.init.push_back({static_cast<int>(rng() % d), rng() % 2 == 0});
  }
  switch (rng() % 3) {
    case 0: c.interaction = Interaction::standard(); break;
    case 1: c.interaction = Interaction::swap_based(); break;
    default: c.interaction = Interaction::hybrid(2 + static_cast<int>(rng() % 3)); break;
  }
  return c;
}

std::string cli_path() { return QVSIM_CLI_PATH; }

int run_cli(const std::string& args) {
  const int status = std::system((cli_path() + " " + args + " >/dev/null 2>&1").c_str());
  return WEXITSTATUS(status);
}

std::string write_temp(const std::string& name, const std::string& text) {
  const std::string path = ::testing::TempDir() + name;
  std::ofstream(path) << text;
  return path;
}

}  // namespace

TEST(Parse, MinimalCircuit) {
  CircuitFile c = parse_circuit("dim 2\nqvs 1\ngate F 0");
  EXPECT_EQ(c.d, 2);
  EXPECT_EQ(c.n, 1u);
  ASSERT_EQ(c.ops.size(), 1u);
  EXPECT_EQ(c.ops[0].kind, LogicalOp::Kind::kF);
  EXPECT_FALSE(c.seed.has_value());
}

TEST(Parse, FullGrammar) {
  CircuitFile c = parse_circuit(
      "# header\n"
      "dim 5\n"
      "qvs 2   # two QVs\n"
      "variant checkE\n"
      "init +1 3\n"
      "seed 42\n"
      "force 2,0,1\n"
      "gate P 7 0\n"
      "gate X 6 1\n"
      "gate Z -1 1\n"
      "gate CZ 1 0\n"
      "gate R 0 [0.0, 0.3,1.1,2,-4e-1]\n"
      "gate D3 2 1 c=1\n"
      "gate D3 30 0\n"
      "measure 1\n");
  EXPECT_EQ(c.interaction, Interaction::swap_based());
  EXPECT_EQ(c.init, (std::vector<InitLabel>{{1, true}, {3, false}}));
  EXPECT_EQ(*c.seed, 42u);
  EXPECT_EQ(c.forced, (std::vector<int>{2, 0, 1}));
  ASSERT_EQ(c.ops.size(), 8u);
  EXPECT_EQ(c.ops[0].param, 7);   // P keeps p mod 2d
  EXPECT_EQ(c.ops[1].param, 1);   // X shift mod d
  EXPECT_EQ(c.ops[2].param, 4);
  EXPECT_EQ(c.ops[3].targets, (std::vector<std::size_t>{1, 0}));
  EXPECT_EQ(c.ops[4].table.table(), (std::vector<double>{0.0, 0.3, 1.1, 2.0, -0.4}));
  EXPECT_EQ(c.ops[5].cubic, CubicConstant::kOne);
  EXPECT_EQ(c.ops[6].param, 30);  // not reduced
  EXPECT_EQ(c.ops[7].kind, LogicalOp::Kind::kMeasure);
  EXPECT_EQ(parse_circuit("dim 4\nqvs 1\nvariant hybrid:2").interaction, Interaction::hybrid(2));
}

TEST(Parse, ErrorsCarryLineNumbers) {
  EXPECT_EQ(line_of("dim 3\nqvs 1\ngate R 0 [0,1]"), 3);                  // table length
  EXPECT_EQ(line_of("dim 3\nqvs 1\n\nfrobnicate 2"), 4);                  // unknown keyword
  EXPECT_EQ(line_of("dim 3\nqvs 1\ngate CZ 0"), 3);                       // arity
  EXPECT_EQ(line_of("dim 3\nqvs 1\ngate F 0 1"), 3);                      // arity
  EXPECT_EQ(line_of("dim 3\nqvs 1\ngate H 0"), 3);                        // unknown gate
  EXPECT_EQ(line_of("dim 3\nqvs 2\ngate F 2"), 3);                        // QV range
  EXPECT_EQ(line_of("dim 3\nqvs 2\nmeasure 0\ngate F 0"), 4);             // measured QV
  EXPECT_EQ(line_of("gate F 0\ndim 3\nqvs 1"), 1);                        // before header
  EXPECT_EQ(line_of("dim 1\nqvs 1"), 1);                                  // dimension
  EXPECT_EQ(line_of("dim 3\nqvs 2\ngate CZ 1 1"), 3);                     // distinct targets
  EXPECT_EQ(line_of("dim 3\nqvs 1\ngate D3 1 0 c=1"), 3);                 // c = 1 at d = 3
  EXPECT_EQ(line_of("dim 3\nqvs 1\nforce 1,,2"), 3);                      // list
  EXPECT_EQ(line_of("dim 3\nqvs 1\nvariant F"), 3);                       // variant
  EXPECT_EQ(line_of("dim 3\nqvs 2\ninit 0"), 3);                          // init arity
  EXPECT_EQ(line_of("dim 3\nqvs 1\ngate R 0 [0,x,1]"), 3);                // number
  EXPECT_EQ(line_of("dim 3\ndim 3\nqvs 1"), 2);                           // duplicate
  EXPECT_EQ(line_of("dim 3"), 1);                                         // missing qvs
}

TEST(Parse, RoundTripIsFixedPoint) {
  std::mt19937_64 rng(1000);
  for (int k = 0; k < 200; ++k) {
    const CircuitFile c = random_file(rng);
    const std::string text = serialize_circuit(c);
    const CircuitFile back = parse_circuit(text);
    EXPECT_TRUE(back == c) << text;
    EXPECT_EQ(serialize_circuit(back), text);
  }
}

TEST(RunMode, FourierOnlyAllModesAgree) {
  CircuitFile c = parse_circuit("dim 2\nqvs 2\ngate F 0\ngate F 1\ngate F 0\ngate F 1\ngate F 1\n");
  RunConfig cfg;
  cfg.compare = true;
  std::vector<nlohmann::ordered_json> docs;
  for (Mode m : {Mode::kDirect, Mode::kAdqc, Mode::kMinControl}) {
    cfg.mode = m;
    docs.push_back(run_mode(c, cfg));
    EXPECT_NEAR(docs.back()["fidelity"].get<double>(), 1.0, 1e-10) << mode_name(m);
  }
  for (int m = 1; m < 3; ++m) {
    ASSERT_EQ(docs[m]["amplitudes"].size(), docs[0]["amplitudes"].size());
    for (std::size_t i = 0; i < docs[0]["amplitudes"].size(); ++i)
      for (int part = 0; part < 2; ++part)
        EXPECT_NEAR(docs[m]["amplitudes"][i][part].get<double>(), docs[0]["amplitudes"][i][part].get<double>(), 1e-12);
  }
}

TEST(RunMode, EmptyCircuitEchoesInput) {
  CircuitFile c = parse_circuit("dim 3\nqvs 2\ninit 2 +1\n");
  RunConfig cfg{.mode = Mode::kAdqc};
  nlohmann::ordered_json doc = run_mode(c, cfg);
  EXPECT_EQ(doc["frame"]["x"], nlohmann::ordered_json({0, 0}));
  EXPECT_EQ(doc["frame"]["z"], nlohmann::ordered_json({0, 0}));
  const oracle::Vec want = oracle::kron(oracle::eye(3).col(2), oracle::F(3).col(1));
  auto amps = doc["amplitudes"];
  ASSERT_EQ(amps.size(), 9u);
  for (int i = 0; i < 9; ++i) {
    EXPECT_NEAR(amps[i][0].get<double>(), want(i).real(), 1e-14);
    EXPECT_NEAR(amps[i][1].get<double>(), want(i).imag(), 1e-14);
  }
}

TEST(RunMode, RandomCircuitAdqcVersusDirect) {
  std::mt19937_64 rng(1001);
  LogicalCircuit lc = oracle::random_circuit(3, 2, 20, rng, {.measure = true});
  CircuitFile c;
  c.d = 3;
  c.n = 2;
  c.ops = lc.ops;
  double worst = 1.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    RunConfig cfg{.mode = Mode::kAdqc, .compare = true, .seed = seed};
    worst = std::min(worst, run_mode(c, cfg)["fidelity"].get<double>());
  }
  EXPECT_GT(worst, 1 - 1e-10);
}

TEST(RunMode, ReplayIsByteIdentical) {
  CircuitFile c = parse_circuit("dim 3\nqvs 2\nseed 9\ngate F 0\ngate CZ 0 1\ngate D3 1 1\ngate R 1 [0,1,2]\nmeasure 0\n");
  for (Mode m : {Mode::kDirect, Mode::kAdqc}) {
    RunConfig cfg{.mode = m, .compare = true};
    EXPECT_EQ(run_mode(c, cfg).dump(2), run_mode(c, cfg).dump(2));
  }
  // Different seeds change the outcome log.
  RunConfig a{.mode = Mode::kAdqc, .seed = 1}, b{.mode = Mode::kAdqc, .seed = 2};
  EXPECT_NE(run_mode(c, a)["outcomes"], run_mode(c, b)["outcomes"]);
}

TEST(RunMode, ForcedOutcomesAreHonoured) {
  CircuitFile c = parse_circuit("dim 3\nqvs 1\nforce 2,1\ngate F 0\ngate F 0\n");
  nlohmann::ordered_json doc = run_mode(c, RunConfig{.mode = Mode::kAdqc});
  EXPECT_EQ(doc["outcomes"], nlohmann::ordered_json({2, 1}));
  doc = run_mode(c, RunConfig{.mode = Mode::kAdqc, .forced = std::vector<int>{0, 0}});
  EXPECT_EQ(doc["outcomes"], nlohmann::ordered_json({0, 0}));
}

TEST(RunMode, UnsupportedCombinations) {
  CircuitFile hybrid = parse_circuit("dim 4\nqvs 1\nvariant hybrid:2\ngate F 0\n");
  EXPECT_THROW(run_mode(hybrid, RunConfig{.mode = Mode::kMinControl}), std::invalid_argument);
  CircuitFile cz = parse_circuit("dim 2\nqvs 2\ngate CZ 0 1\n");
  EXPECT_THROW(run_mode(cz, RunConfig{.mode = Mode::kMinControl}), std::invalid_argument);
  nlohmann::ordered_json doc = run_mode(cz, RunConfig{.mode = Mode::kMinControl, .compare = true, .mc_spec = McSpecKind::kCZ});
  EXPECT_NEAR(doc["fidelity"].get<double>(), 1.0, 1e-10);
}

TEST(RunMode, StochasticHybridReportsResiduals) {
  CircuitFile c = parse_circuit("dim 2\nqvs 1\nvariant hybrid:3\nforce 1\ngate F 0\n");
  nlohmann::ordered_json doc = run_mode(c, RunConfig{.mode = Mode::kAdqc});
  EXPECT_FALSE(doc["deterministic"].get<bool>());
  ASSERT_EQ(doc["residuals"].size(), 1u);
  EXPECT_EQ(doc["residuals"][0]["gate"], "u(-1)");
}

TEST(ReportLayers, CliffordAndNonClifford) {
  std::mt19937_64 rng(1002);
  CircuitFile c;
  c.d = 3;
  c.n = 3;
  c.ops = oracle::random_circuit(3, 3, 50, rng, {.clifford_only = true}).ops;
  EXPECT_EQ(report_layers(c)["adaptive_measurements"], 0);
  EXPECT_GE(report_layers(parse_circuit("dim 3\nqvs 1\ngate D3 1 0\n"))["adaptive_measurements"].get<int>(), 1);
  EXPECT_EQ(report_layers(parse_circuit("dim 3\nqvs 2\ngate CZ 0 1\n"))["layers"], 6);
}

TEST(Cli, ExitCodesAndReplay) {
  const std::string good = write_temp("good.qvc", "dim 3\nqvs 2\nseed 4\ngate F 0\ngate CZ 0 1\ngate D3 1 0\nmeasure 1\n");
  const std::string bad = write_temp("bad.qvc", "dim 3\nqvs 1\ngate R 0 [0,1]\n");
  const std::string hyb = write_temp("hyb.qvc", "dim 4\nqvs 1\nvariant hybrid:2\ngate F 0\n");
  EXPECT_EQ(run_cli("run " + good + " --mode adqc --compare"), 0);
  EXPECT_EQ(run_cli("run " + bad + " --mode direct"), 2);
  EXPECT_EQ(run_cli("run " + hyb + " --mode mincontrol"), 1);
  EXPECT_EQ(run_cli("layers " + good), 0);
  const std::string a = ::testing::TempDir() + "a.json", b = ::testing::TempDir() + "b.json";
  ASSERT_EQ(run_cli("run " + good + " --mode adqc --compare --seed 17 --out " + a), 0);
  ASSERT_EQ(run_cli("run " + good + " --mode adqc --compare --seed 17 --out " + b), 0);
  std::stringstream sa, sb;
  sa << std::ifstream(a).rdbuf();
  sb << std::ifstream(b).rdbuf();
  EXPECT_FALSE(sa.str().empty());
  EXPECT_EQ(sa.str(), sb.str());
}
