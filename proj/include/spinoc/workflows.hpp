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
#pragma once

#include "spinoc/config.hpp"

#include <json.hpp>

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace spinoc {

/// Module failure during a run, tagged with the module name and the config
/// fingerprint.
class RunError : public std::runtime_error {
 public:
  RunError(std::string module, const std::string& what, std::uint64_t fingerprint);
  const std::string& module() const { return module_; }

 private:
  std::string module_;
};

/// Exit statuses of run().
enum ExitStatus : int {
  exit_ok = 0,
  exit_check_failed = 1,  ///< validate found a failing check, or a sweep member failed
  exit_config = 2,
  exit_runtime = 3,
};

const std::vector<std::string>& subcommands();

struct RunResult {
  int status = exit_ok;
  std::filesystem::path manifest;
  nlohmann::json summary;
};

/// Executes one subcommand, writing artifacts and manifest.json into
/// cfg.output_dir. Throws RunError for module failures.
RunResult run(const std::string& subcommand, const RunConfig& cfg);

/// Oracle suite on the configured problem (each entry: name, value,
/// tolerance, pass, detail). Used by the validate subcommand.
nlohmann::json validation_report(const RunConfig& cfg);

}  // namespace spinoc
