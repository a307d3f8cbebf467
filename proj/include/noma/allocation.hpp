#pragma once

// Power-allocation strategies: fixed coefficients, per-realization
// optimization (ICSI), statistical optimization by sample averaging (SCSI),
// the two-stage hybrid (HCSI), OMA baselines and power trimming.

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "noma/channel.hpp"
#include "noma/power_allocation.hpp"
#include "noma/scenario.hpp"

namespace noma {

struct OptimizerConfig {
  int grid_resolution = 201;   // points per coefficient axis
  int refinement_rounds = 3;   // local grid shrinkage passes
  double min_rate_floor = 0.0; // bits/s/Hz required of every symbol
  bool enforce_ordering = true;

  friend bool operator==(const OptimizerConfig&, const OptimizerConfig&) = default;
};

struct StatisticalBudget {
  std::size_t sample_count = 1000;
  std::uint64_t seed = 0;
  bool mean_channel = false;  // every sample uses gains equal to the variances
  double min_mean_rate = 0.0; // sample-average rate each symbol must reach

  friend bool operator==(const StatisticalBudget&, const StatisticalBudget&) = default;
};

/// Fractions of the phase budget, indexed by symbol.
struct FixedCoefficients {
  std::vector<double> phase1;
  std::vector<double> phase2;

  friend bool operator==(const FixedCoefficients&, const FixedCoefficients&) = default;
};

struct OptimizationResult {
  PowerAllocation allocation;
  double sum_rate = 0.0;
  bool feasible = true;  // false when the rate floors cannot be met
};

using PhaseMask = std::array<bool, 2>;

/// Applies `fractions` to every phase that carries all symbols; a phase
/// carrying a single symbol gives it the whole budget.
FixedCoefficients uniform_coefficients(const Scenario& scenario, std::span<const double> fractions);

/// powers = fraction * P_t. Throws ConstraintViolation when a phase (or a
/// transmitter, under the per-transmitter model) exceeds 1.
PowerAllocation fixed(const Scenario& scenario, const FixedCoefficients& coefficients);

OptimizationResult icsi_optimize(const Scenario& scenario, const ChannelRealization& realization,
                                 const OptimizerConfig& cfg);

/// Fixed coefficients maximizing the sample-average sum rate. Rate floors
/// (cfg.min_rate_floor, budget.min_mean_rate) bound sample-average rates.
OptimizationResult scsi_optimize(const Scenario& scenario, const StatisticalBudget& budget,
                                 const OptimizerConfig& cfg);

/// Keeps stage-1 phase-1 powers and re-optimizes phase 2 on the realization.
OptimizationResult hcsi_allocate(const Scenario& scenario, const PowerAllocation& stage1,
                                 const ChannelRealization& realization, const OptimizerConfig& cfg);

/// Scales each phase in `phases` down to the smallest factor that keeps every
/// per-symbol rate.
PowerAllocation power_trim(const Scenario& scenario, const ChannelRealization& realization,
                           const PowerAllocation& alloc, PhaseMask phases = {true, true});

/// Orthogonal baseline on one realization. TDMA and FDMA give each symbol
/// half of the resource; max-min OMA serves one symbol through the selected
/// relay.
RateReport oma_report(const Scenario& scenario, const ChannelRealization& realization,
                      Baseline baseline, bool trim);

}  // namespace noma
