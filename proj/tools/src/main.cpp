// Copyright 2026 The qnd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <CLI11.hpp>
#include <iostream>

#include "commands.hpp"
#include "qnd/errors.hpp"

namespace {

enum Exit : int { kOk = 0, kOther = 1, kValidation = 2, kIntegration = 3, kIo = 4 };

}  // namespace

int main(int argc, char** argv) {
  using namespace qnd::cli;
  CLI::App app{"qnd: spin squeezing of atomic ensembles probed by a Gaussian beam"};
  app.require_subcommand(1);
  std::string config_path;
  std::vector<std::string> sets;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  app.add_option("--config", config_path, "JSON configuration file");
  app.add_option("--set", sets, "Override key=value (dotted path; value parsed as JSON)");
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--seed", seed, "Random seed (overrides 'seed')");
  app.fallthrough();

  using Fn = void (*)(const Context&);
  const std::vector<std::tuple<const char*, const char*, Fn>> cmds = {
      {"modes", "Mode orthonormality table and profiles", cmd_modes},
      {"effnums", "Effective atom numbers and coupling strength", cmd_effnums},
      {"simulate", "Squeezing trajectory for one geometry", cmd_simulate},
      {"scan", "Peak squeezing over a geometry grid", cmd_scan},
      {"oracle", "Stochastic master equation trajectories", cmd_oracle},
  };
  Fn selected = nullptr;
  for (const auto& [name, help, fn] : cmds) {
    auto* sub = app.add_subcommand(name, help);
    sub->callback([&selected, f = fn] { selected = f; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kValidation;
  }

  try {
    Context ctx;
    ctx.config = resolve_config(config_path, sets);
    if (seed) ctx.config["seed"] = *seed;
    ctx.out_dir = out_dir;
    selected(ctx);
    return kOk;
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kValidation;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kIo;
  } catch (const qnd::BudgetError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kValidation;
  } catch (const qnd::ConvergenceError& e) {
    std::cerr << "convergence error: " << e.what() << "\n";
    return kIntegration;
  } catch (const qnd::IntegrationError& e) {
    std::cerr << "integration error: " << e.what() << "\n";
    return kIntegration;
  } catch (const qnd::DomainError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kOther;
  }
}
