#pragma once

// Experiment configuration: YAML parsing with line diagnostics, emission,
// and expansion into sweep entries.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "noma/metrics.hpp"
#include "noma/scenario.hpp"

namespace noma {

struct SettingConfig {
  std::string label;
  std::vector<LinkStats> links;
  int line = 0;

  friend bool operator==(const SettingConfig& a, const SettingConfig& b) {
    return a.label == b.label && a.links == b.links;
  }
};

struct SchemeConfig {
  std::string label;
  Strategy strategy = Strategy::icsi;
  std::optional<Protocol> protocol;  // experiment protocol when unset
  Baseline baseline = Baseline::none;
  std::vector<double> coefficients;           // fixed strategy
  std::vector<DecodingOrder> decoding_plans;  // experiment plans when empty
  std::optional<bool> trim;
  int line = 0;

  friend bool operator==(const SchemeConfig& a, const SchemeConfig& b) {
    return a.label == b.label && a.strategy == b.strategy && a.protocol == b.protocol &&
           a.baseline == b.baseline && a.coefficients == b.coefficients &&
           a.decoding_plans == b.decoding_plans && a.trim == b.trim;
  }
};

struct ExperimentConfig {
  std::string name = "experiment";
  ScenarioKind kind = ScenarioKind::diamond;
  Protocol protocol = Protocol::df;
  Pairing pairing = Pairing::direct;
  PhasePowerModel power_model = PhasePowerModel::shared;
  double noise_power = 1.0;
  std::vector<DecodingOrder> decoding_plans;
  std::vector<SettingConfig> settings;
  std::vector<SchemeConfig> schemes;
  std::vector<double> snr_db;
  std::size_t trials = 10000;
  std::uint64_t seed = 20180001;
  std::vector<double> outage_targets{1.0, 1.0};
  OptimizerConfig optimizer;
  std::size_t statistical_samples = 1000;
  std::optional<std::uint64_t> statistical_seed;  // derived from seed when unset
  double statistical_min_mean_rate = 0.0;
  unsigned threads = 0;
  std::string output = "results.csv";

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Throws ConfigError carrying the offending line.
ExperimentConfig parse_experiment(std::string_view yaml_text);
ExperimentConfig load_experiment(const std::string& path);

/// YAML text that parses back to an equal config.
std::string dump_experiment(const ExperimentConfig& config);

/// Parses "0,10,20" or "start:stop:step".
std::vector<double> parse_snr_list(std::string_view text);

/// Spec for one (setting, scheme) pair.
ScenarioSpec scheme_spec(const ExperimentConfig& config, const SettingConfig& setting,
                         const SchemeConfig& scheme);

/// One sweep entry per scheme for `setting`; all share the master seed.
std::vector<SweepEntry> sweep_entries(const ExperimentConfig& config, const SettingConfig& setting);

/// Structural checks of every (setting, scheme) spec and numeric ranges.
void check_experiment(const ExperimentConfig& config);

/// Embedded figure presets.
std::vector<std::string> preset_names();
std::optional<std::string_view> preset_text(std::string_view name);

/// Round to two significant figures, shortest decimal form.
std::string format_2sig(double value);
/// Shortest round-trip decimal.
std::string format_shortest(double value);
/// Fixed notation with `decimals` digits.
std::string format_fixed(double value, int decimals);

}  // namespace noma
