#pragma once

// Subcommands of the noma_relay tool. Each returns the process exit code.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "noma/experiment.hpp"

namespace noma {

inline constexpr int kExitOk = 0;
inline constexpr int kExitAdvisory = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitIo = 3;

inline constexpr const char* kOutputDirEnv = "NOMA_RELAY_OUTPUT_DIR";

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  std::optional<std::vector<double>> snr_db;
  std::optional<std::string> output;
  std::optional<unsigned> threads;
};

void apply_overrides(ExperimentConfig& config, const Overrides& overrides);

/// Runs every (scheme, setting) sweep and renders the CSV table.
std::string sweep_csv(const ExperimentConfig& config, std::ostream* summary = nullptr);

/// Output path after applying the output-directory environment override.
std::string resolve_output_path(const std::string& path);

int cmd_sweep(const ExperimentConfig& config, std::ostream& out, std::ostream& err);
int cmd_asymmetry(const ExperimentConfig& config, std::ostream& out, std::ostream& err);
int cmd_validate(const ExperimentConfig& config, std::ostream& out, std::ostream& err);

/// Full command line: `noma_relay <sweep|asymmetry|validate> [CONFIG] [options]`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace noma
