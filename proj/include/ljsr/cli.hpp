#pragma once

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace ljsr {

/// Raised for malformed or out-of-range configuration; maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Flat key-value configuration: `--key value` command-line pairs layered
/// over an optional `--config file` (one `key = value` per line, '#'
/// comments). Unknown keys are an error.
using Config = std::map<std::string, std::string>;

Config parse_cli_args(const std::vector<std::string>& args,
                      const std::vector<std::string>& positional_keys = {});

struct PipelineSummary {
  double relative_error = 0.0;
  double projection_error = -1.0;  // -1 when no truth rank is available
  double noise_sigma = 0.0;
  int subspace_rank = 0;
  int iterations = 0;
  bool converged = false;
};

// Subcommand runners; they throw ConfigError for bad configuration and
// std::exception subclasses for numerical failures.
void run_phantom(const Config& cfg);
PipelineSummary run_pipeline(const Config& cfg);
void run_fig2(const Config& cfg);
void run_fig3(const Config& cfg);
void run_fig4(const Config& cfg);
void run_budget(const Config& cfg);
void run_spark(const Config& cfg);

/// Full dispatch: args exclude argv[0]. Returns the process exit code
/// (0 success, 2 config error, 3 numerical failure).
int run_cli(const std::vector<std::string>& args);

}  // namespace ljsr
