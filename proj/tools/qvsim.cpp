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

// qvsim run <file> --mode direct|adqc|mincontrol [--compare] [--seed N] [--force a,b,c]
//                  [--spec-seed N] [--mc-spec appendixB|cz] [--out file.json]
// qvsim layers <file>
//
// Exit codes: 0 ok, 1 unsupported or other error, 2 parse error, 3 numerical invariant violation.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "qvsim/qvsim.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + out_path);
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qvsim: qudit ancilla-driven and minimal-control circuit simulator"};
  app.require_subcommand(1);

  std::string file, out_path, mode = "direct", force, mc_spec = "appendixB";
  bool compare = false;
  std::uint64_t seed = 0, spec_seed = 0;

  CLI::App* run_cmd = app.add_subcommand("run", "Run a circuit file");
  run_cmd->add_option("file", file, "Circuit file")->required();
  run_cmd->add_option("--mode", mode, "direct, adqc or mincontrol")
      ->check(CLI::IsMember({"direct", "adqc", "mincontrol"}));
  run_cmd->add_flag("--compare", compare, "Also run the direct oracle and report fidelity");
  CLI::Option* seed_opt = run_cmd->add_option("--seed", seed, "Outcome sampling seed");
  CLI::Option* force_opt = run_cmd->add_option("--force", force, "Forced outcomes, comma separated");
  CLI::Option* spec_seed_opt = run_cmd->add_option("--spec-seed", spec_seed, "Seed for the minimal-control spec");
  run_cmd->add_option("--mc-spec", mc_spec, "Minimal-control spec: appendixB or cz")
      ->check(CLI::IsMember({"appendixB", "cz"}));
  run_cmd->add_option("--out", out_path, "Write JSON here instead of stdout");

  CLI::App* layers_cmd = app.add_subcommand("layers", "Report compiled layer and adaptivity counts");
  layers_cmd->add_option("file", file, "Circuit file")->required();
  layers_cmd->add_option("--out", out_path, "Write JSON here instead of stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    const qvsim::CircuitFile circuit = qvsim::parse_circuit(read_file(file));
    nlohmann::ordered_json doc;
    if (*layers_cmd) {
      doc = qvsim::report_layers(circuit);
    } else {
      qvsim::RunConfig cfg;
      cfg.mode = mode == "adqc" ? qvsim::Mode::kAdqc
                 : mode == "mincontrol" ? qvsim::Mode::kMinControl
                                        : qvsim::Mode::kDirect;
      cfg.compare = compare;
      if (*seed_opt) cfg.seed = seed;
      if (*force_opt) cfg.forced = qvsim::detail::parse_int_list(force, 0);
      if (*spec_seed_opt) cfg.spec_seed = spec_seed;
      cfg.mc_spec = mc_spec == "cz" ? qvsim::McSpecKind::kCZ : qvsim::McSpecKind::kAppendixB;
      doc = qvsim::run_mode(circuit, cfg);
    }
    emit(doc.dump(2) + "\n", out_path);
  } catch (const qvsim::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const qvsim::NumericalInvariantError& e) {
    std::cerr << "numerical invariant violated: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
