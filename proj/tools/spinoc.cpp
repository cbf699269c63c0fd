/*
 Copyright 2026 The spinoc Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/
#include "spinoc/config.hpp"
#include "spinoc/io.hpp"
#include "spinoc/workflows.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

struct Args {
  std::string config;
  std::string out;
  std::string hbars;
  std::uint64_t seed = 0;
};

int execute(const std::string& sub, const Args& a, CLI::App* app) {
  using namespace spinoc;
  ConfigOverrides ov;
  if (app->count("--out")) ov.output_dir = a.out;
  if (app->count("--seed")) ov.seed = a.seed;
  RunConfig cfg;
  try {
    if (app->count("--hbar-list")) ov.hbars = parse_number_list(a.hbars);
    cfg = load_config(a.config, ov);
  } catch (const ConfigViolations& e) {
    std::cerr << "spinoc: invalid configuration " << a.config << "\n";
    for (const auto& item : e.items()) std::cerr << "  - " << item << "\n";
    return exit_config;
  } catch (const std::exception& e) {
    std::cerr << "spinoc: config: " << e.what() << "\n";
    return exit_config;
  }
  try {
    const RunResult r = run(sub, cfg);
    std::cout << r.summary.dump(2) << "\n";
    std::cerr << "manifest: " << r.manifest.string() << "\n";
    return r.status;
  } catch (const RunError& e) {
    std::cerr << "spinoc: " << e.what() << "\n";
    return exit_runtime;
  } catch (const std::exception& e) {
    std::cerr << "spinoc: cli_io: " << e.what() << " [config " << hex64(cfg.fingerprint) << "]\n";
    return exit_runtime;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spin-resolved Wigner optimal control"};
  app.require_subcommand(1, 1);
  Args args;
  bool dump_defaults = false;
  app.add_flag("--print-default-config", dump_defaults, "print the built-in default configuration and exit");
  std::vector<std::pair<std::string, CLI::App*>> subs;
  for (const auto& name : spinoc::subcommands()) {
    CLI::App* s = app.add_subcommand(name);
    s->add_option("--config", args.config, "JSON configuration file")->required()->check(CLI::ExistingFile);
    s->add_option("--out", args.out, "output directory (overrides output.dir)");
    s->add_option("--hbar-list", args.hbars, "comma-separated hbar values (overrides sweep.hbar)");
    s->add_option("--seed", args.seed, "seed for randomized checks");
    subs.emplace_back(name, s);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (dump_defaults && e.get_exit_code() != 0) {
      std::cout << spinoc::default_document().dump(2) << "\n";
      return 0;
    }
    const int code = app.exit(e);
    return code == 0 ? 0 : spinoc::exit_config;
  }
  if (dump_defaults) {
    std::cout << spinoc::default_document().dump(2) << "\n";
    return 0;
  }
  for (auto& [name, s] : subs)
    if (s->parsed()) return execute(name, args, s);
  return spinoc::exit_config;
}
