#include "noma/metrics.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "noma/errors.hpp"

namespace noma {

namespace {

constexpr double kZ95 = 1.96;

bool default_trim(const TrialPlan& plan) {
  switch (plan.strategy) {
    case Strategy::icsi:
    case Strategy::hcsi:
      return true;
    case Strategy::oma_baseline:
      return plan.spec.baseline != Baseline::fdma;
    case Strategy::fixed:
    case Strategy::scsi:
      return false;
  }
  return false;
}

std::uint64_t hash_gains(const ChannelRealization& r) {
  std::uint64_t h = 0x6a09e667f3bcc909ULL;
  for (const auto& [id, g] : r.gains) h = splitmix64(h ^ std::bit_cast<std::uint64_t>(g));
  return h;
}

double ci_half_width(const std::vector<double>& xs, double mean) {
  if (xs.size() < 2) return 0.0;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  return kZ95 * sd / std::sqrt(static_cast<double>(xs.size()));
}

struct Context {
  const TrialPlan& plan;
  const Scenario& scenario;
  PowerAllocation fixed_alloc;  // fixed and SCSI allocations, HCSI stage 1
  bool fixed_feasible = true;
  bool trim = false;
};

TrialRecord run_one(const Context& ctx, std::size_t t) {
  const Scenario& sc = ctx.scenario;
  const TrialPlan& plan = ctx.plan;
  ChannelRealization real;
  if (plan.mean_channel) {
    real = mean_realization(sc.links());
  } else {
    RngStream stream(plan.master_seed, t);
    real = sample_realization(sc.links(), stream);
  }

  TrialRecord rec;
  rec.gain_hash = hash_gains(real);
  RateReport report;
  switch (plan.strategy) {
    case Strategy::fixed:
    case Strategy::scsi: {
      if (!ctx.fixed_feasible) {
        rec.feasible = false;
        report = evaluate(sc, real, ctx.fixed_alloc);
        break;
      }
      auto alloc = ctx.trim ? power_trim(sc, real, ctx.fixed_alloc) : ctx.fixed_alloc;
      report = evaluate(sc, real, alloc);
      break;
    }
    case Strategy::icsi:
    case Strategy::hcsi: {
      if (!ctx.fixed_feasible) {
        rec.feasible = false;
        report = evaluate(sc, real, ctx.fixed_alloc);
        break;
      }
      const auto opt = plan.strategy == Strategy::icsi
                           ? icsi_optimize(sc, real, plan.optimizer)
                           : hcsi_allocate(sc, ctx.fixed_alloc, real, plan.optimizer);
      if (!opt.feasible) {
        rec.feasible = false;
        report = evaluate(sc, real, opt.allocation);
        break;
      }
      const PhaseMask mask =
          plan.strategy == Strategy::icsi ? PhaseMask{true, true} : PhaseMask{false, true};
      report = evaluate(sc, real, ctx.trim ? power_trim(sc, real, opt.allocation, mask)
                                           : opt.allocation);
      break;
    }
    case Strategy::oma_baseline:
      report = oma_report(sc, real, plan.spec.baseline, ctx.trim);
      break;
  }
  if (rec.feasible) {
    rec.rates = report.per_symbol_rates;
    rec.sum_rate = report.sum_rate;
  } else {
    rec.rates.assign(sc.symbol_count(), 0.0);
  }
  rec.consumed_power = report.consumed_power;

  if (plan.strategy == Strategy::oma_baseline && plan.spec.baseline == Baseline::fdma &&
      !ctx.trim) {
    rec.reference_sum_rate = rec.sum_rate;
    rec.reference_power = rec.consumed_power;
  } else {
    const auto ref = oma_report(sc, real, Baseline::fdma, false);
    rec.reference_sum_rate = ref.sum_rate;
    rec.reference_power = ref.consumed_power;
  }
  return rec;
}

void check_plan(const TrialPlan& plan) {
  if (plan.trials < 1) throw ConfigError("trials must be at least 1");
  if (!std::isfinite(plan.snr_db)) throw ConfigError("snr_db must be finite");
  for (double t : plan.outage_targets) {
    if (!(t >= 0.0)) throw ConfigError("outage targets must be nonnegative");
  }
  if (plan.strategy == Strategy::oma_baseline && plan.spec.baseline == Baseline::none) {
    throw ConfigError("oma_baseline strategy needs a baseline (tdma, fdma or maxmin_oma)");
  }
}

ScenarioSpec at_snr(const TrialPlan& plan) {
  ScenarioSpec spec = plan.spec;
  spec.phase_budget = budget_from_snr(plan.snr_db, spec.noise_power);
  return spec;
}

}  // namespace

std::string_view to_string(Strategy strategy) {
  switch (strategy) {
    case Strategy::fixed: return "fixed";
    case Strategy::icsi: return "icsi";
    case Strategy::scsi: return "scsi";
    case Strategy::hcsi: return "hcsi";
    case Strategy::oma_baseline: return "oma";
  }
  return "?";
}

std::optional<Strategy> parse_strategy(std::string_view text) {
  for (auto s : {Strategy::fixed, Strategy::icsi, Strategy::scsi, Strategy::hcsi,
                 Strategy::oma_baseline}) {
    if (text == to_string(s)) return s;
  }
  if (text == "oma_baseline") return Strategy::oma_baseline;
  return std::nullopt;
}

double budget_from_snr(double snr_db, double noise_power) {
  return noise_power * std::pow(10.0, snr_db / 10.0);
}

OptimizationResult stage1_allocation(const TrialPlan& plan) {
  const Scenario sc = Scenario::create(at_snr(plan));
  return scsi_optimize(sc, plan.statistical, plan.optimizer);
}

MetricsSummary run_trials(const TrialPlan& plan) {
  check_plan(plan);
  const Scenario sc = Scenario::create(at_snr(plan));
  const std::size_t n = sc.symbol_count();
  if (plan.outage_targets.size() != n) {
    throw ConfigError("expected " + std::to_string(n) + " outage targets");
  }

  Context ctx{.plan = plan, .scenario = sc, .trim = plan.trim.value_or(default_trim(plan))};
  switch (plan.strategy) {
    case Strategy::fixed:
      ctx.fixed_alloc = fixed(sc, uniform_coefficients(sc, plan.coefficients));
      break;
    case Strategy::scsi:
    case Strategy::hcsi:
    {
      const auto stage1 = plan.stage1 ? *plan.stage1 : stage1_allocation(plan);
      ctx.fixed_alloc = stage1.allocation;
      ctx.fixed_feasible = stage1.feasible;
      check_allocation(sc, ctx.fixed_alloc);
    }
      break;
    default:
      break;
  }

  std::vector<TrialRecord> records(plan.trials);
  unsigned workers = plan.threads ? plan.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, plan.trials));
  if (workers <= 1) {
    for (std::size_t t = 0; t < plan.trials; ++t) records[t] = run_one(ctx, t);
  } else {
    constexpr std::size_t kChunk = 64;
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    std::mutex failure_mutex;
    auto work = [&] {
      try {
        for (;;) {
          const std::size_t begin = next.fetch_add(kChunk);
          if (begin >= plan.trials || failed.load()) return;
          const std::size_t end = std::min(begin + kChunk, plan.trials);
          for (std::size_t t = begin; t < end; ++t) records[t] = run_one(ctx, t);
        }
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        failed = true;
      }
    };
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    pool.clear();
    if (failure) std::rethrow_exception(failure);
  }

  MetricsSummary m;
  m.trials_used = plan.trials;
  m.mean_rates.assign(n, 0.0);
  m.outage_per_symbol.assign(n, 0.0);
  std::vector<double> sums(plan.trials);
  double power = 0.0, ref_rate = 0.0, ref_power = 0.0;
  std::size_t system_out = 0;
  std::vector<std::size_t> out(n, 0);
  std::uint64_t checksum = 0;
  for (std::size_t t = 0; t < plan.trials; ++t) {
    const auto& r = records[t];
    sums[t] = r.sum_rate;
    m.ergodic_sum_rate += r.sum_rate;
    power += r.consumed_power;
    ref_rate += r.reference_sum_rate;
    ref_power += r.reference_power;
    bool any = false;
    for (std::size_t k = 0; k < n; ++k) {
      m.mean_rates[k] += r.rates[k];
      if (!r.feasible || r.rates[k] < plan.outage_targets[k]) {
        ++out[k];
        any = true;
      }
    }
    if (any) ++system_out;
    if (!r.feasible) ++m.infeasible_trials;
    checksum = splitmix64(checksum ^ r.gain_hash);
  }
  const double count = static_cast<double>(plan.trials);
  m.ergodic_sum_rate /= count;
  m.sum_rate_ci = ci_half_width(sums, m.ergodic_sum_rate);
  for (std::size_t k = 0; k < n; ++k) {
    m.mean_rates[k] /= count;
    m.outage_per_symbol[k] = static_cast<double>(out[k]) / count;
  }
  m.system_outage = static_cast<double>(system_out) / count;
  m.mean_consumed_power = power / count;
  m.energy_efficiency = power > 0.0 ? m.ergodic_sum_rate / m.mean_consumed_power : 0.0;
  const double ref_ee = ref_power > 0.0 ? (ref_rate / count) / (ref_power / count) : 0.0;
  m.ee_ratio_vs_fdma = ref_ee > 0.0 ? m.energy_efficiency / ref_ee : 0.0;
  m.normalized_power_utilization =
      m.mean_consumed_power / (static_cast<double>(sc.phase_count()) * sc.phase_budget());
  m.gain_checksum = checksum;
  if (plan.keep_trace) m.trace = std::move(records);
  return m;
}

std::vector<SweepCurve> sweep(std::span<const SweepEntry> entries,
                              std::span<const double> snr_list) {
  if (entries.empty()) throw ConfigError("nothing to compare");
  if (snr_list.empty()) throw ConfigError("empty snr grid");

  struct CachedStage1 {
    ScenarioSpec spec;
    double snr_db;
    StatisticalBudget budget;
    OptimizerConfig optimizer;
    OptimizationResult allocation;
  };
  std::vector<CachedStage1> cache;

  std::vector<SweepCurve> curves;
  for (const auto& entry : entries) {
    SweepCurve curve{entry.label, {}};
    for (double snr : snr_list) {
      TrialPlan plan = entry.plan;
      plan.snr_db = snr;
      if ((plan.strategy == Strategy::scsi || plan.strategy == Strategy::hcsi) && !plan.stage1) {
        auto hit = std::find_if(cache.begin(), cache.end(), [&](const CachedStage1& c) {
          return c.spec == plan.spec && c.snr_db == snr && c.budget == plan.statistical &&
                 c.optimizer == plan.optimizer;
        });
        if (hit == cache.end()) {
          cache.push_back({plan.spec, snr, plan.statistical, plan.optimizer,
                           stage1_allocation(plan)});
          hit = std::prev(cache.end());
        }
        plan.stage1 = hit->allocation;
      }
      curve.points.push_back({snr, run_trials(plan)});
    }
    curves.push_back(std::move(curve));
  }
  return curves;
}

std::vector<GapPoint> compare_gap(std::span<const SweepPoint> a, std::span<const SweepPoint> b) {
  if (a.size() != b.size()) throw ContractViolation("gap tables need the same snr grid");
  std::vector<GapPoint> gaps;
  gaps.reserve(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].snr_db != b[i].snr_db) throw ContractViolation("gap tables need the same snr grid");
    const auto& x = a[i].summary;
    const auto& y = b[i].summary;
    gaps.push_back({a[i].snr_db, x.ergodic_sum_rate - y.ergodic_sum_rate,
                    std::hypot(x.sum_rate_ci, y.sum_rate_ci)});
  }
  return gaps;
}

}  // namespace noma
