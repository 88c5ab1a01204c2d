// Copyright 2026 The pwdyn Authors
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

// pwdyn command-line front end.
//
// Precedence: defaults < --config file < --set key=value < --key value.
// Exit codes: 0 ok, 1 unexpected error, 2 config error, 3 numerical
// invariant violation, 4 tolerance failure in compare.

#include <CLI11.hpp>
#include <algorithm>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "pwdyn/experiments.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUnexpected = 1;
constexpr int kExitConfig = 2;
constexpr int kExitInvariant = 3;
constexpr int kExitTolerance = 4;

const char* describe(const std::string& command) {
  static const std::map<std::string, const char*> text{
      {"evolve", "occupation profile and Pauli weight versus depth"},
      {"beta-scan", "full-support beta(t) per alpha with Clifford baseline"},
      {"opt-depth", "optimal depth of contiguous operators and the a(alpha) fit"},
      {"boundary", "rho - 3/4 per site, dual-unitary next to Clifford"},
      {"appendix", "per-depth check of beta^-1 <= 1 - 2 rho / 3"},
      {"gate-analyze", "entanglement coordinates of a two-qubit gate"},
      {"compare", "cross-engine agreement on one config (exit 4 on failure)"}};
  return text.at(command);
}

struct SubcommandArgs {
  std::string config;
  std::vector<std::string> sets;
  std::map<std::string, std::string> flags;
};

int run(const std::string& command, const SubcommandArgs& args) {
  pwdyn::io::KeyValues kv;
  if (!args.config.empty()) kv = pwdyn::io::load_key_values(args.config);
  for (const auto& s : args.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw pwdyn::ConfigError("--set expects key=value, got '" + s + "'");
    kv[pwdyn::io::trim(s.substr(0, eq))] = pwdyn::io::trim(s.substr(eq + 1));
  }
  for (const auto& [k, v] : args.flags) {
    if (!v.empty()) kv[k] = v;
  }
  const auto cfg = pwdyn::config_from_keys(kv);
  const auto result = pwdyn::run_command(command, cfg);
  for (const auto& path : pwdyn::write_result(result, cfg, command)) {
    std::cout << path.string() << '\n';
  }
  if (!result.ok) {
    std::cerr << "pwdyn " << command << ": " << result.message << '\n';
    return kExitTolerance;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pauli-weight dynamics in brick-wall circuits"};
  app.set_version_flag("--version", PWDYN_VERSION);
  app.require_subcommand(1);
  std::map<std::string, SubcommandArgs> args;
  for (const auto& name : pwdyn::command_names()) {
    auto* sub = app.add_subcommand(name, describe(name));
    auto& a = args[name];
    sub->add_option("--config", a.config, "flat key = value config file");
    sub->add_option("--set", a.sets, "override one key, key=value (repeatable)");
    for (const auto& key : pwdyn::config_keys()) {
      std::string flag = "--" + key;
      std::replace(flag.begin(), flag.end(), '_', '-');
      sub->add_option(flag, a.flags[key], "config key '" + key + "'");
    }
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  try {
    return run(command, args[command]);
  } catch (const std::invalid_argument& e) {
    // ConfigError and failed library preconditions alike stem from input.
    std::cerr << "pwdyn " << command << ": config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const pwdyn::InvariantViolation& e) {
    std::cerr << "pwdyn " << command << ": invariant violation: " << e.what() << '\n';
    return kExitInvariant;
  } catch (const pwdyn::ToleranceFailure& e) {
    std::cerr << "pwdyn " << command << ": tolerance failure: " << e.what() << '\n';
    return kExitTolerance;
  } catch (const std::exception& e) {
    std::cerr << "pwdyn " << command << ": error: " << e.what() << '\n';
    return kExitUnexpected;
  }
}
