#include <doctest.h>

#include <cmath>
#include <cstring>
#include <vector>

#include "noma/errors.hpp"
#include "noma/metrics.hpp"

using namespace noma;

namespace {

ScenarioSpec x_network() {
  ScenarioSpec s;
  s.kind = ScenarioKind::x_network;
  s.links = {{"S1R", 9}, {"S2R", 3}, {"RU1", 2}, {"RU2", 10}};
  return s;
}

ScenarioSpec fig4_relay() {
  ScenarioSpec s;
  s.kind = ScenarioKind::downlink_relay;
  s.links = {{"SR", 8}, {"RU1", 2}, {"RU2", 10}};
  return s;
}

bool bit_equal(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

bool same_summary(const MetricsSummary& a, const MetricsSummary& b) {
  auto vec_equal = [](const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (!bit_equal(x[i], y[i])) return false;
    }
    return true;
  };
  return bit_equal(a.ergodic_sum_rate, b.ergodic_sum_rate) &&
         bit_equal(a.sum_rate_ci, b.sum_rate_ci) && vec_equal(a.mean_rates, b.mean_rates) &&
         vec_equal(a.outage_per_symbol, b.outage_per_symbol) &&
         bit_equal(a.system_outage, b.system_outage) &&
         bit_equal(a.mean_consumed_power, b.mean_consumed_power) &&
         bit_equal(a.energy_efficiency, b.energy_efficiency) &&
         bit_equal(a.ee_ratio_vs_fdma, b.ee_ratio_vs_fdma) &&
         bit_equal(a.normalized_power_utilization, b.normalized_power_utilization) &&
         a.trials_used == b.trials_used && a.infeasible_trials == b.infeasible_trials &&
         a.gain_checksum == b.gain_checksum;
}

}  // namespace

TEST_CASE("strategy names and SNR conversion") {
  for (auto s : {Strategy::fixed, Strategy::icsi, Strategy::scsi, Strategy::hcsi,
                 Strategy::oma_baseline}) {
    CHECK(parse_strategy(to_string(s)) == s);
  }
  CHECK(parse_strategy("oma_baseline") == Strategy::oma_baseline);
  CHECK_FALSE(parse_strategy("greedy").has_value());
  CHECK(budget_from_snr(20) == doctest::Approx(100.0));
  CHECK(budget_from_snr(0) == doctest::Approx(1.0));
  CHECK(budget_from_snr(10, 2.0) == doctest::Approx(20.0));
}

TEST_CASE("one deterministic trial reduces to a single evaluation") {
  TrialPlan plan;
  plan.spec = x_network();
  plan.snr_db = 20;
  plan.trials = 1;
  plan.mean_channel = true;
  plan.trim = false;
  const auto m = run_trials(plan);

  auto spec = plan.spec;
  spec.phase_budget = 100.0;
  const auto sc = Scenario::create(spec);
  const auto g = mean_realization(sc.links());
  const auto opt = icsi_optimize(sc, g, OptimizerConfig{});
  const auto r = evaluate(sc, g, opt.allocation);
  CHECK(m.ergodic_sum_rate == doctest::Approx(r.sum_rate).epsilon(1e-14));
  CHECK(m.mean_rates[0] == doctest::Approx(r.per_symbol_rates[0]).epsilon(1e-14));
  CHECK(m.mean_consumed_power == doctest::Approx(r.consumed_power).epsilon(1e-14));
  CHECK(m.sum_rate_ci == 0.0);
  CHECK(m.trials_used == 1);
  CHECK(m.energy_efficiency == doctest::Approx(r.sum_rate / r.consumed_power));
  CHECK(m.normalized_power_utilization == doctest::Approx(r.consumed_power / 200.0));
}

TEST_CASE("identical plans give bit-identical summaries at any thread count") {
  TrialPlan plan;
  plan.spec = x_network();
  plan.trials = 300;
  plan.master_seed = 99;
  plan.threads = 1;
  const auto a = run_trials(plan);
  const auto b = run_trials(plan);
  plan.threads = 4;
  const auto c = run_trials(plan);
  CHECK(same_summary(a, b));
  CHECK(same_summary(a, c));
  plan.master_seed = 100;
  CHECK(run_trials(plan).gain_checksum != a.gain_checksum);
}

TEST_CASE("strategies share realizations") {
  TrialPlan plan;
  plan.spec = fig4_relay();
  plan.trials = 200;
  plan.master_seed = 4;
  const auto icsi = run_trials(plan);
  plan.strategy = Strategy::fixed;
  const auto fixed = run_trials(plan);
  plan.strategy = Strategy::oma_baseline;
  plan.spec.baseline = Baseline::tdma;
  const auto tdma = run_trials(plan);
  CHECK(icsi.gain_checksum == fixed.gain_checksum);
  CHECK(icsi.gain_checksum == tdma.gain_checksum);
  CHECK(icsi.ergodic_sum_rate >= fixed.ergodic_sum_rate);
}

TEST_CASE("FDMA is its own energy-efficiency reference") {
  TrialPlan plan;
  plan.spec = x_network();
  plan.spec.baseline = Baseline::fdma;
  plan.strategy = Strategy::oma_baseline;
  plan.trials = 500;
  const auto m = run_trials(plan);
  CHECK(m.ee_ratio_vs_fdma == 1.0);
  CHECK(m.normalized_power_utilization == doctest::Approx(1.0));
}

TEST_CASE("outage thresholds") {
  TrialPlan plan;
  plan.spec = fig4_relay();
  plan.trials = 400;
  plan.outage_targets = {0.0, 0.0};
  auto m = run_trials(plan);
  CHECK(m.system_outage == 0.0);
  CHECK(m.outage_per_symbol == std::vector<double>{0.0, 0.0});
  plan.outage_targets = {1e6, 1e6};
  m = run_trials(plan);
  CHECK(m.system_outage == 1.0);
  CHECK(m.outage_per_symbol == std::vector<double>{1.0, 1.0});
  plan.outage_targets = {1e6, 0.0};
  m = run_trials(plan);
  CHECK(m.outage_per_symbol == std::vector<double>{1.0, 0.0});
  CHECK(m.system_outage == 1.0);
}

TEST_CASE("DF outage does not exceed AF outage") {
  TrialPlan plan;
  plan.spec = fig4_relay();
  plan.strategy = Strategy::fixed;
  plan.coefficients = {0.6875, 0.3125};
  plan.snr_db = 10;
  plan.trials = 100000;
  plan.master_seed = 20180001;
  const auto df = run_trials(plan);
  plan.spec.protocol = Protocol::af;
  const auto af = run_trials(plan);
  CHECK(df.system_outage <= af.system_outage);
  CHECK(df.outage_per_symbol[0] <= af.outage_per_symbol[0]);
  CHECK(df.outage_per_symbol[1] <= af.outage_per_symbol[1]);
  CHECK(df.ergodic_sum_rate >= af.ergodic_sum_rate);
}

TEST_CASE("confidence interval shrinks with more trials") {
  TrialPlan plan;
  plan.spec = fig4_relay();
  plan.strategy = Strategy::fixed;
  plan.trials = 2000;
  const double small = run_trials(plan).sum_rate_ci;
  plan.trials = 32000;
  const double large = run_trials(plan).sum_rate_ci;
  CHECK(large < small);
  CHECK(large == doctest::Approx(small / 4).epsilon(0.1));
}

TEST_CASE("trace records every trial") {
  TrialPlan plan;
  plan.spec = x_network();
  plan.trials = 50;
  plan.keep_trace = true;
  const auto m = run_trials(plan);
  REQUIRE(m.trace.size() == 50);
  double sum = 0.0;
  for (const auto& t : m.trace) sum += t.sum_rate;
  CHECK(m.ergodic_sum_rate == doctest::Approx(sum / 50).epsilon(1e-12));
  plan.keep_trace = false;
  CHECK(run_trials(plan).trace.empty());
}

TEST_CASE("trimming lowers utilization without changing rates") {
  TrialPlan plan;
  plan.spec = x_network();
  plan.trials = 300;
  plan.keep_trace = true;
  plan.trim = false;
  const auto full = run_trials(plan);
  plan.trim = true;
  const auto trimmed = run_trials(plan);
  CHECK(full.normalized_power_utilization == doctest::Approx(1.0));
  CHECK(trimmed.normalized_power_utilization < 1.0);
  for (std::size_t t = 0; t < 300; ++t) {
    for (std::size_t k = 0; k < 2; ++k) {
      REQUIRE(std::abs(trimmed.trace[t].rates[k] - full.trace[t].rates[k]) <= 1e-9);
    }
  }
}

TEST_CASE("infeasible optimizer trials count as outage") {
  TrialPlan plan;
  plan.spec = x_network();
  plan.trials = 20;
  plan.snr_db = 0;
  plan.optimizer.min_rate_floor = 20.0;
  const auto m = run_trials(plan);
  CHECK(m.infeasible_trials == 20);
  CHECK(m.system_outage == 1.0);
  CHECK(m.ergodic_sum_rate == 0.0);
}

TEST_CASE("statistical strategies") {
  TrialPlan plan;
  plan.spec = x_network();
  plan.trials = 300;
  plan.statistical.sample_count = 100;
  plan.statistical.seed = 12;
  plan.strategy = Strategy::scsi;
  const auto stage1 = stage1_allocation(plan);
  REQUIRE(stage1.feasible);
  const auto scsi = run_trials(plan);
  plan.stage1 = stage1;
  CHECK(same_summary(scsi, run_trials(plan)));
  plan.strategy = Strategy::hcsi;
  const auto hcsi = run_trials(plan);
  plan.strategy = Strategy::icsi;
  const auto icsi = run_trials(plan);
  CHECK(scsi.ergodic_sum_rate <= hcsi.ergodic_sum_rate);
  CHECK(hcsi.ergodic_sum_rate <= icsi.ergodic_sum_rate);
}

TEST_CASE("plan checks") {
  TrialPlan plan;
  plan.spec = x_network();
  plan.trials = 0;
  CHECK_THROWS_AS(run_trials(plan), ConfigError);
  plan.trials = 10;
  plan.strategy = Strategy::oma_baseline;
  CHECK_THROWS_AS(run_trials(plan), ConfigError);
  plan.strategy = Strategy::icsi;
  plan.snr_db = NAN;
  CHECK_THROWS_AS(run_trials(plan), ConfigError);
  plan.snr_db = 10;
  plan.outage_targets = {-1, 1};
  CHECK_THROWS_AS(run_trials(plan), ConfigError);
}

TEST_CASE("sweeps and gaps") {
  TrialPlan base;
  base.spec = x_network();
  base.trials = 100;
  std::vector<SweepEntry> entries{{"NOMA", base}, {"OMA", base}};
  entries[1].plan.strategy = Strategy::oma_baseline;
  entries[1].plan.spec.baseline = Baseline::tdma;
  const std::vector<double> snr{0, 10, 20};
  const auto curves = sweep(entries, snr);
  REQUIRE(curves.size() == 2);
  CHECK(curves[0].label == "NOMA");
  REQUIRE(curves[0].points.size() == 3);
  CHECK(curves[0].points[2].snr_db == 20);
  CHECK(curves[0].points[0].summary.gain_checksum == curves[1].points[0].summary.gain_checksum);

  auto direct = base;
  direct.snr_db = 10;
  CHECK(same_summary(curves[0].points[1].summary, run_trials(direct)));

  const auto self = compare_gap(curves[0].points, curves[0].points);
  for (std::size_t i = 0; i < self.size(); ++i) {
    const double ci = curves[0].points[i].summary.sum_rate_ci;
    CHECK(self[i].gap == 0.0);
    CHECK(self[i].ci == doctest::Approx(std::sqrt(2.0) * ci));
  }
  const auto gaps = compare_gap(curves[0].points, curves[1].points);
  REQUIRE(gaps.size() == 3);
  CHECK(gaps[2].gap == doctest::Approx(curves[0].points[2].summary.ergodic_sum_rate -
                                       curves[1].points[2].summary.ergodic_sum_rate));
  CHECK(gaps[2].gap > 0);

  const std::vector<SweepPoint> shorter(curves[0].points.begin(), curves[0].points.begin() + 2);
  CHECK_THROWS_AS(compare_gap(curves[0].points, shorter), ContractViolation);
  auto shifted = curves[0].points;
  shifted[0].snr_db = 5;
  CHECK_THROWS_AS(compare_gap(curves[0].points, shifted), ContractViolation);

  CHECK_THROWS_WITH_AS(sweep({}, snr), "nothing to compare", ConfigError);
  CHECK_THROWS_WITH_AS(sweep(entries, {}), "empty snr grid", ConfigError);
}
