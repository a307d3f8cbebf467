#include <doctest.h>

#include <cmath>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "noma/allocation.hpp"
#include "noma/errors.hpp"
#include "oracle.hpp"

using namespace noma;

namespace {

using Gains = std::map<std::string, double>;

ScenarioSpec make(ScenarioKind kind, const Gains& variances, double budget) {
  ScenarioSpec s;
  s.kind = kind;
  for (const auto& [id, v] : variances) s.links.push_back({id, v});
  s.phase_budget = budget;
  return s;
}

ChannelRealization realization(const Gains& g) {
  ChannelRealization r;
  for (const auto& [id, v] : g) r.gains.emplace(id, v);
  return r;
}

int first_of(const Scenario& sc, std::size_t phase) {
  return static_cast<int>(sc.phases()[phase].order.symbols.front().index);
}

// Best oracle sum rate with both phases on their budget line, `n` points per
// phase. A phase with a single transmitter keeps the first-decoded symbol at
// least as strong when `ordered`.
double boundary_max(const std::string& kind, const Scenario& sc, const Gains& g, int n,
                    bool ordered) {
  const double P = sc.phase_budget();
  const int f1 = first_of(sc, 0), f2 = first_of(sc, 1);
  const bool o1 = ordered && sc.phases()[0].single_transmitter();
  const bool o2 = ordered && sc.phases()[1].single_transmitter();
  double best = -1.0;
  for (int i = 0; i < n; ++i) {
    const oracle::Pair p{P * i / (n - 1), P * (n - 1 - i) / (n - 1)};
    if (o1 && p[f1] < p[1 - f1]) continue;
    for (int j = 0; j < n; ++j) {
      const oracle::Pair q{P * j / (n - 1), P * (n - 1 - j) / (n - 1)};
      if (o2 && q[f2] < q[1 - f2]) continue;
      const auto r = oracle::two_hop(kind, false, g, p, q, f1, f2);
      best = std::max(best, r[0] + r[1]);
    }
  }
  return best;
}

const Gains kFig3Setting1{{"SR1", 1}, {"SR2", 10}, {"R1U", 9}, {"R2U", 2}};

}  // namespace

TEST_CASE("fixed coefficients") {
  const auto sc = Scenario::create(make(ScenarioKind::downlink_relay, {{"SR", 8}, {"RU1", 2}, {"RU2", 10}}, 10.0));
  const std::vector<double> fig4{0.6875, 0.3125};
  const auto c = uniform_coefficients(sc, fig4);
  CHECK(c.phase1 == fig4);
  CHECK(c.phase2 == fig4);
  const auto a = fixed(sc, c);
  CHECK(a.phase1[0] == doctest::Approx(6.875).epsilon(1e-15));
  CHECK(a.phase1[1] == doctest::Approx(3.125).epsilon(1e-15));
  CHECK(a.phase_total(0) == doctest::Approx(10.0));

  const std::vector<double> alt{0.8, 0.2};
  CHECK_NOTHROW(fixed(sc, uniform_coefficients(sc, alt)));

  const std::vector<double> over{0.7, 0.4};
  CHECK_THROWS_AS(fixed(sc, uniform_coefficients(sc, over)), ConstraintViolation);
  const std::vector<double> negative{-0.1, 0.5};
  CHECK_THROWS_AS(fixed(sc, uniform_coefficients(sc, negative)), ConstraintViolation);
  const std::vector<double> three{0.3, 0.3, 0.3};
  CHECK_THROWS_AS(uniform_coefficients(sc, three), ContractViolation);
}

TEST_CASE("fixed coefficients under per-transmitter budgets") {
  auto spec = make(ScenarioKind::diamond, kFig3Setting1, 10.0);
  spec.power_model = PhasePowerModel::per_transmitter;
  const auto sc = Scenario::create(spec);
  const auto a = fixed(sc, {{0.8, 0.2}, {1.0, 1.0}});
  CHECK(a.phase2 == std::vector<double>{10.0, 10.0});
  CHECK_THROWS_AS(fixed(sc, {{0.8, 0.3}, {1.0, 1.0}}), ConstraintViolation);
  CHECK_THROWS_AS(fixed(sc, {{0.8, 0.2}, {1.1, 0.5}}), ConstraintViolation);
}

TEST_CASE("single-phase symbols get the whole budget in uniform coefficients") {
  const auto sc = Scenario::create(make(ScenarioKind::three_node_direct, {{"SR", 4}, {"SU", 1}, {"RU", 3}}, 2.0));
  const std::vector<double> f{0.8, 0.2};
  const auto c = uniform_coefficients(sc, f);
  CHECK(c.phase1 == f);
  CHECK(c.phase2 == std::vector<double>{0.0, 1.0});
}

TEST_CASE("ICSI on a single-hop broadcast matches a dense grid") {
  const Gains g{{"SU1", 1}, {"SU2", 10}};
  auto spec = make(ScenarioKind::broadcast, g, 10.0);
  spec.decoding_plans = {DecodingOrder{{SymbolId{0}, SymbolId{1}}}};
  const auto sc = Scenario::create(spec);
  for (bool ordered : {false, true}) {
    OptimizerConfig cfg;
    cfg.enforce_ordering = ordered;
    const auto r = icsi_optimize(sc, realization(g), cfg);
    REQUIRE(r.feasible);
    const double want = oracle::grid_max(1415, 10.0, ordered, 0, [&](const oracle::Pair& p) {
      return oracle::single_hop("broadcast", g, p, 0);
    });
    CHECK(r.sum_rate == doctest::Approx(want).epsilon(1e-6));
    CHECK(std::abs(r.sum_rate - want) < 1e-6);
    CHECK(r.sum_rate == doctest::Approx(evaluate(sc, realization(g), r.allocation).sum_rate));
  }
}

TEST_CASE("ICSI on two-hop kinds against the boundary oracle") {
  const std::map<std::string, Gains> kinds{
      {"diamond", kFig3Setting1},
      {"x_network", {{"S1R", 9}, {"S2R", 3}, {"RU1", 2}, {"RU2", 10}}},
      {"downlink_relay", {{"SR", 8}, {"RU1", 2}, {"RU2", 10}}},
      {"uplink_relay", {{"S1R", 9}, {"S2R", 3}, {"RU", 4}}},
  };
  std::mt19937_64 rng(31);
  std::exponential_distribution<double> fade(1.0);
  for (const auto& [name, variances] : kinds) {
    const auto sc = Scenario::create(make(*parse_kind(name), variances, 30.0));
    for (int t = 0; t < 6; ++t) {
      Gains g;
      for (const auto& [id, v] : variances) g[id] = v * fade(rng);
      const auto r = icsi_optimize(sc, realization(g), OptimizerConfig{});
      REQUIRE(r.feasible);
      INFO(name, " trial ", t);
      // The 101-point lattice is a subset of the optimizer's first grid.
      CHECK(r.sum_rate >= boundary_max(name, sc, g, 101, true) - 1e-9);
      CHECK(r.sum_rate >= boundary_max(name, sc, g, 801, true) - 1e-3);
      const auto check = oracle::two_hop(name, false, g, {r.allocation.phase1[0], r.allocation.phase1[1]},
                                         {r.allocation.phase2[0], r.allocation.phase2[1]},
                                         first_of(sc, 0), first_of(sc, 1));
      CHECK(r.sum_rate == doctest::Approx(check[0] + check[1]).epsilon(1e-12));
    }
  }
}

TEST_CASE("ICSI respects the ordering rule and budgets") {
  const auto sc = Scenario::create(make(ScenarioKind::downlink_relay, {{"SR", 8}, {"RU1", 2}, {"RU2", 10}}, 10.0));
  RngStream stream(8, 8);
  for (int t = 0; t < 50; ++t) {
    const auto g = sample_realization(sc.links(), stream);
    const auto r = icsi_optimize(sc, g, OptimizerConfig{});
    for (std::size_t p = 0; p < 2; ++p) {
      const auto& v = r.allocation.phase(p);
      const auto f = sc.phases()[p].order.symbols.front().index;
      REQUIRE(v[f] >= v[1 - f] - 1e-12);
      REQUIRE(r.allocation.phase_total(p) <= 10.0 * (1 + 1e-12));
    }
  }
}

TEST_CASE("ICSI beats the fixed split on the diamond") {
  const auto sc = Scenario::create(make(ScenarioKind::diamond, kFig3Setting1, 10.0));
  const auto g = mean_realization(sc.links());
  const auto r = icsi_optimize(sc, g, OptimizerConfig{});
  const std::vector<double> f{0.8, 0.2};
  const double fixed_rate = evaluate(sc, g, fixed(sc, uniform_coefficients(sc, f))).sum_rate;
  CHECK(r.sum_rate >= fixed_rate);
}

TEST_CASE("a symbol alone in its phase gets the full budget") {
  const auto sc = Scenario::create(make(ScenarioKind::three_node_direct, {{"SR", 4}, {"SU", 1}, {"RU", 3}}, 5.0));
  const auto g = mean_realization(sc.links());
  const auto r = icsi_optimize(sc, g, OptimizerConfig{});
  CHECK(r.allocation.phase2 == std::vector<double>{0.0, 5.0});

  const PowerAllocation stage1{{4.0, 1.0}, {0.0, 0.3}};
  const auto h = hcsi_allocate(sc, stage1, g, OptimizerConfig{});
  CHECK(h.allocation.phase1 == stage1.phase1);
  CHECK(h.allocation.phase2 == std::vector<double>{0.0, 5.0});
}

TEST_CASE("rate floors") {
  const auto sc = Scenario::create(make(ScenarioKind::x_network, {{"S1R", 9}, {"S2R", 3}, {"RU1", 2}, {"RU2", 10}}, 100.0));
  const auto g = mean_realization(sc.links());
  OptimizerConfig cfg;
  cfg.min_rate_floor = 1.0;
  const auto r = icsi_optimize(sc, g, cfg);
  REQUIRE(r.feasible);
  const auto rep = evaluate(sc, g, r.allocation);
  CHECK(rep.per_symbol_rates[0] >= 1.0 - 1e-9);
  CHECK(rep.per_symbol_rates[1] >= 1.0 - 1e-9);
  CHECK(r.sum_rate <= icsi_optimize(sc, g, OptimizerConfig{}).sum_rate + 1e-12);

  cfg.min_rate_floor = 50.0;
  const auto bad = icsi_optimize(sc, g, cfg);
  CHECK_FALSE(bad.feasible);
  CHECK(bad.sum_rate == 0.0);

  StatisticalBudget budget;
  budget.sample_count = 20;
  CHECK_FALSE(scsi_optimize(sc, budget, cfg).feasible);
}

TEST_CASE("optimizer config checks") {
  const auto sc = Scenario::create(make(ScenarioKind::x_network, {{"S1R", 9}, {"S2R", 3}, {"RU1", 2}, {"RU2", 10}}, 10.0));
  const auto g = mean_realization(sc.links());
  OptimizerConfig cfg;
  cfg.grid_resolution = 1;
  CHECK_THROWS_AS(icsi_optimize(sc, g, cfg), DomainError);
  cfg = {};
  cfg.min_rate_floor = -1;
  CHECK_THROWS_AS(icsi_optimize(sc, g, cfg), DomainError);
  StatisticalBudget budget;
  budget.sample_count = 0;
  CHECK_THROWS_AS(scsi_optimize(sc, budget, OptimizerConfig{}), DomainError);
}

TEST_CASE("SCSI with one mean-channel sample is ICSI on the mean channel") {
  for (auto kind : {ScenarioKind::x_network, ScenarioKind::diamond}) {
    const Gains v = kind == ScenarioKind::diamond
                        ? kFig3Setting1
                        : Gains{{"S1R", 9}, {"S2R", 3}, {"RU1", 2}, {"RU2", 10}};
    const auto sc = Scenario::create(make(kind, v, 100.0));
    StatisticalBudget budget;
    budget.sample_count = 1;
    budget.mean_channel = true;
    const auto s = scsi_optimize(sc, budget, OptimizerConfig{});
    const auto i = icsi_optimize(sc, mean_realization(sc.links()), OptimizerConfig{});
    CHECK(s.sum_rate == doctest::Approx(i.sum_rate).epsilon(1e-12));
    CHECK(s.allocation == i.allocation);
  }
}

TEST_CASE("SCSI is label-symmetric on a symmetric uplink") {
  auto spec = make(ScenarioKind::multiple_access, {{"S1U", 1}, {"S2U", 1}}, 10.0);
  spec.decoding_plans = {DecodingOrder{{SymbolId{0}, SymbolId{1}}}};
  auto mirrored = spec;
  mirrored.decoding_plans = {DecodingOrder{{SymbolId{1}, SymbolId{0}}}};
  OptimizerConfig cfg;
  cfg.enforce_ordering = false;
  StatisticalBudget budget;
  budget.sample_count = 200;
  budget.seed = 3;
  budget.min_mean_rate = 0.5;
  const auto a = scsi_optimize(Scenario::create(spec), budget, cfg);
  const auto b = scsi_optimize(Scenario::create(mirrored), budget, cfg);
  REQUIRE(a.feasible);
  REQUIRE(b.feasible);
  // Mean channel: the mirrored plan sees the same problem with labels swapped.
  budget.mean_channel = true;
  const auto c = scsi_optimize(Scenario::create(spec), budget, cfg);
  const auto d = scsi_optimize(Scenario::create(mirrored), budget, cfg);
  CHECK(c.sum_rate == doctest::Approx(d.sum_rate).epsilon(1e-12));
  const double step = 10.0 / 200;
  CHECK(std::abs(c.allocation.phase1[0] - d.allocation.phase1[1]) <= step + 1e-12);
  CHECK(std::abs(c.allocation.phase1[1] - d.allocation.phase1[0]) <= step + 1e-12);
}

TEST_CASE("SCSI does not beat ICSI on average") {
  const auto sc = Scenario::create(make(ScenarioKind::x_network, {{"S1R", 9}, {"S2R", 3}, {"RU1", 2}, {"RU2", 10}}, 100.0));
  StatisticalBudget budget;
  budget.sample_count = 200;
  budget.seed = 5;
  const auto stage1 = scsi_optimize(sc, budget, OptimizerConfig{});
  REQUIRE(stage1.feasible);
  double scsi = 0, icsi = 0, hcsi = 0;
  RngStream stream(77, 0);
  for (int t = 0; t < 300; ++t) {
    const auto g = sample_realization(sc.links(), stream);
    scsi += evaluate(sc, g, stage1.allocation).sum_rate;
    icsi += icsi_optimize(sc, g, OptimizerConfig{}).sum_rate;
    hcsi += hcsi_allocate(sc, stage1.allocation, g, OptimizerConfig{}).sum_rate;
  }
  CHECK(scsi <= hcsi + 1e-9);
  CHECK(hcsi <= icsi + 1e-9);
}

TEST_CASE("HCSI keeps stage-1 powers and matches ICSI from a jointly optimal start") {
  const auto sc = Scenario::create(make(ScenarioKind::x_network, {{"S1R", 9}, {"S2R", 3.8}, {"RU1", 5}, {"RU2", 10}}, 100.0));
  const auto g = mean_realization(sc.links());
  const auto joint = icsi_optimize(sc, g, OptimizerConfig{});
  const auto h = hcsi_allocate(sc, joint.allocation, g, OptimizerConfig{});
  CHECK(h.allocation.phase1 == joint.allocation.phase1);
  CHECK(h.sum_rate == doctest::Approx(joint.sum_rate).epsilon(1e-9));
  CHECK(h.sum_rate >= joint.sum_rate - 1e-9);

  RngStream stream(1, 1);
  const auto real = sample_realization(sc.links(), stream);
  const PowerAllocation stage1{{60.0, 40.0}, {50.0, 50.0}};
  const auto r = hcsi_allocate(sc, stage1, real, OptimizerConfig{});
  CHECK(r.allocation.phase1 == stage1.phase1);
  CHECK(r.sum_rate >= evaluate(sc, real, stage1).sum_rate - 1e-9);
}

TEST_CASE("power trim on strong first hops") {
  const Gains g{{"S1R", 50}, {"S2R", 30}, {"RU1", 3}, {"RU2", 5}};
  const auto sc = Scenario::create(make(ScenarioKind::x_network, g, 10.0));
  const PowerAllocation alloc{{5.0, 5.0}, {6.0, 4.0}};
  const auto before = evaluate(sc, realization(g), alloc);
  const auto trimmed = power_trim(sc, realization(g), alloc);
  const auto after = evaluate(sc, realization(g), trimmed);
  CHECK(trimmed.phase_total(0) < alloc.phase_total(0));
  CHECK(after.consumed_power < 2 * 10.0);
  CHECK(after.consumed_power <= before.consumed_power);
  for (std::size_t k = 0; k < 2; ++k) {
    CHECK(std::abs(after.per_symbol_rates[k] - before.per_symbol_rates[k]) <= 1e-9);
  }
  const auto only2 = power_trim(sc, realization(g), alloc, {false, true});
  CHECK(only2.phase1 == alloc.phase1);
}

TEST_CASE("power trim leaves tight allocations alone") {
  const Gains g{{"SR1", 2}, {"SR2", 1}, {"R1U", 2}, {"R2U", 1}};
  const auto sc = Scenario::create(make(ScenarioKind::diamond, g, 4.0));
  const auto solo = solo_allocation(sc, SymbolId{0}, 4.0);
  CHECK(power_trim(sc, realization(g), solo) == solo);

  const Gains b{{"SU1", 1}, {"SU2", 5}};
  const auto bc = Scenario::create(make(ScenarioKind::broadcast, b, 4.0));
  const PowerAllocation a{{3.0, 1.0}, {}};
  CHECK(power_trim(bc, realization(b), a) == a);
}

TEST_CASE("max-min OMA serves the selected relay") {
  const auto sc = Scenario::create(make(ScenarioKind::diamond, kFig3Setting1, 10.0));
  const Gains g{{"SR1", 0.5}, {"SR2", 7}, {"R1U", 3}, {"R2U", 1.5}};
  const auto r = oma_report(sc, realization(g), Baseline::maxmin_oma, false);
  CHECK(r.per_symbol_rates[0] == 0.0);
  CHECK(r.per_symbol_rates[1] == doctest::Approx(0.5 * std::log2(1 + 10 * 1.5)).epsilon(1e-14));
  CHECK(r.consumed_power == doctest::Approx(20.0));
  const auto t = oma_report(sc, realization(g), Baseline::maxmin_oma, true);
  CHECK(t.per_symbol_rates[1] == doctest::Approx(r.per_symbol_rates[1]).epsilon(1e-9));
  CHECK(t.consumed_power == doctest::Approx(10.0 + 10.0 * 1.5 / 7).epsilon(1e-9));

  const auto x = Scenario::create(make(ScenarioKind::x_network, {{"S1R", 9}, {"S2R", 3}, {"RU1", 2}, {"RU2", 10}}, 1.0));
  CHECK_THROWS_AS(oma_report(x, mean_realization(x.links()), Baseline::maxmin_oma, false),
                  ContractViolation);
}
