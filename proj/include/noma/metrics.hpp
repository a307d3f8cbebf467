#pragma once

// Seeded Monte Carlo engine: ergodic sum rate, outage, energy efficiency and
// power utilization over Rayleigh realizations, plus SNR sweeps.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "noma/allocation.hpp"
#include "noma/scenario.hpp"

namespace noma {

enum class Strategy { fixed, icsi, scsi, hcsi, oma_baseline };

std::string_view to_string(Strategy strategy);
std::optional<Strategy> parse_strategy(std::string_view text);

/// Transmit SNR in dB to the per-phase budget for unit noise.
double budget_from_snr(double snr_db, double noise_power = 1.0);

struct TrialPlan {
  ScenarioSpec spec;
  Strategy strategy = Strategy::icsi;
  double snr_db = 20.0;  // overrides spec.phase_budget
  std::size_t trials = 1000;
  std::uint64_t master_seed = 0;
  std::vector<double> outage_targets{1.0, 1.0};  // bits/s/Hz per symbol
  std::vector<double> coefficients{0.8, 0.2};    // fixed strategy fractions
  OptimizerConfig optimizer;
  StatisticalBudget statistical;
  std::optional<bool> trim;  // strategy default when unset
  unsigned threads = 0;      // 0 = hardware concurrency
  std::optional<OptimizationResult> stage1;  // SCSI/HCSI; computed when absent
  bool mean_channel = false;  // gains equal to the variances
  bool keep_trace = false;
};

struct TrialRecord {
  std::vector<double> rates;
  double sum_rate = 0.0;
  double consumed_power = 0.0;
  bool feasible = true;
  double reference_sum_rate = 0.0;  // FDMA on the same realization
  double reference_power = 0.0;
  std::uint64_t gain_hash = 0;
};

struct MetricsSummary {
  double ergodic_sum_rate = 0.0;
  double sum_rate_ci = 0.0;  // 95% half-width
  std::vector<double> mean_rates;
  std::vector<double> outage_per_symbol;
  double system_outage = 0.0;
  double mean_consumed_power = 0.0;
  double energy_efficiency = 0.0;
  double ee_ratio_vs_fdma = 0.0;
  double normalized_power_utilization = 0.0;
  std::size_t trials_used = 0;
  std::size_t infeasible_trials = 0;
  std::uint64_t gain_checksum = 0;  // identical for runs sharing realizations
  std::vector<TrialRecord> trace;   // filled when keep_trace is set
};

/// The SAA stage-1 allocation a SCSI or HCSI plan uses.
OptimizationResult stage1_allocation(const TrialPlan& plan);

MetricsSummary run_trials(const TrialPlan& plan);

struct SweepEntry {
  std::string label;
  TrialPlan plan;
};

struct SweepPoint {
  double snr_db = 0.0;
  MetricsSummary summary;
};

struct SweepCurve {
  std::string label;
  std::vector<SweepPoint> points;
};

/// One curve per entry; every entry and SNR point reuses the same substreams.
std::vector<SweepCurve> sweep(std::span<const SweepEntry> entries, std::span<const double> snr_list);

struct GapPoint {
  double snr_db = 0.0;
  double gap = 0.0;  // a - b
  double ci = 0.0;   // combined 95% half-width
};

std::vector<GapPoint> compare_gap(std::span<const SweepPoint> a, std::span<const SweepPoint> b);

}  // namespace noma
