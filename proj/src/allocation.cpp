#include "noma/allocation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "grid_search.hpp"
#include "noma/errors.hpp"

namespace noma {

namespace {

constexpr double kRateTieTolerance = 1e-9;
constexpr int kTrimIterations = 64;
constexpr double kTrimNegligible = 1e-12;  // scale savings below this are rounding

// Scaling every power of a phase up never lowers any SINR, so the optimizers
// search the budget boundary only: one coordinate per two-symbol phase.
struct PhaseAxis {
  detail::Axis axis;
  std::size_t phase = 0;
  std::size_t n = 0;
  std::array<std::uint32_t, 2> order{};  // first- and second-decoded symbol
  bool box = false;                      // per-transmitter budgets
  double budget = 0.0;

  void powers(double x, double* out) const {
    for (std::size_t k = 0; k < kMaxSymbols; ++k) out[k] = 0.0;
    if (n == 1) {
      out[order[0]] = budget;
    } else if (box) {
      out[order[0]] = budget * std::min(x, 1.0);
      out[order[1]] = budget * std::min(2.0 - x, 1.0);
    } else {
      out[order[0]] = budget * x;
      out[order[1]] = budget * (1.0 - x);
    }
  }
};

PhaseAxis make_axis(const Scenario& scenario, std::size_t phase, const OptimizerConfig& cfg) {
  PhaseAxis a;
  a.phase = phase;
  a.budget = scenario.phase_budget();
  if (phase >= scenario.phase_count()) return a;
  const auto& plan = scenario.phases()[phase];
  a.n = plan.order.symbols.size();
  if (a.n > 2) throw ContractViolation("optimizers handle at most two symbols per phase");
  for (std::size_t i = 0; i < a.n; ++i) a.order[i] = plan.order.symbols[i].index;
  if (a.n == 2) {
    a.axis.active = true;
    a.box = scenario.spec().power_model == PhasePowerModel::per_transmitter &&
            !plan.single_transmitter();
    if (a.box) {
      a.axis.lo = 0.0;
      a.axis.hi = 2.0;
    } else {
      // Earlier-decoded symbols get at least as much power.
      a.axis.lo = cfg.enforce_ordering && plan.single_transmitter() ? 0.5 : 0.0;
      a.axis.hi = 1.0;
    }
  }
  return a;
}

void check_config(const OptimizerConfig& cfg) {
  if (cfg.grid_resolution < 2) throw DomainError("grid_resolution must be at least 2");
  if (cfg.refinement_rounds < 0) throw DomainError("refinement_rounds must be nonnegative");
  if (!(cfg.min_rate_floor >= 0.0)) throw DomainError("min_rate_floor must be nonnegative");
}

PowerAllocation allocation_from(const Scenario& scenario, const PhaseAxis& a1, double x,
                                const PhaseAxis& a2, double y) {
  std::array<double, kMaxSymbols> buf{};
  PowerAllocation alloc;
  const std::size_t n = scenario.symbol_count();
  a1.powers(x, buf.data());
  alloc.phase1.assign(buf.begin(), buf.begin() + n);
  if (scenario.phase_count() == 2) {
    a2.powers(y, buf.data());
    alloc.phase2.assign(buf.begin(), buf.begin() + n);
  }
  return alloc;
}

std::vector<ReducedPhase> reduce_grid(const ChannelView& view, const PhaseAxis& axis,
                                      std::span<const double> xs) {
  const Scenario& scenario = view.scenario();
  std::vector<ReducedPhase> out(xs.size());
  PhaseSummary summary;
  std::array<double, kMaxSymbols> powers{};
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (axis.phase < scenario.phase_count()) {
      axis.powers(xs[i], powers.data());
      view.phase_summary(axis.phase, powers.data(), summary);
    } else {
      summary.clear();
    }
    out[i] = scenario.reduce(axis.phase, summary);
  }
  return out;
}

// Product of (1 + sinr_k) over symbols, or -inf when a floor is violated.
template <Composition C>
inline double product_score(const ReducedPhase& a, const ReducedPhase& b, std::size_t n,
                            double sinr_floor) {
  double prod = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    double s;
    if constexpr (C == Composition::decode_forward) {
      s = std::min(a.bound[k], b.bound[k]);
    } else if constexpr (C == Composition::combining) {
      s = std::min({a.bound[k], b.bound[k], a.value[k] + b.value[k]});
    } else {
      s = detail::af_compose(a.value[k], b.value[k]);
    }
    if (s < sinr_floor) return -std::numeric_limits<double>::infinity();
    prod *= 1.0 + s;
  }
  return prod;
}

template <Composition C>
void fill_products(const std::vector<ReducedPhase>& r1, const std::vector<ReducedPhase>& r2,
                   std::size_t n, double sinr_floor, std::span<double> out) {
  const std::size_t ny = r2.size();
  for (std::size_t i = 0; i < r1.size(); ++i) {
    for (std::size_t j = 0; j < ny; ++j) {
      out[i * ny + j] = product_score<C>(r1[i], r2[j], n, sinr_floor);
    }
  }
}

void fill_products(Composition c, const std::vector<ReducedPhase>& r1,
                   const std::vector<ReducedPhase>& r2, std::size_t n, double sinr_floor,
                   std::span<double> out) {
  switch (c) {
    case Composition::decode_forward:
      fill_products<Composition::decode_forward>(r1, r2, n, sinr_floor, out);
      break;
    case Composition::combining:
      fill_products<Composition::combining>(r1, r2, n, sinr_floor, out);
      break;
    case Composition::amplify_forward:
      fill_products<Composition::amplify_forward>(r1, r2, n, sinr_floor, out);
      break;
  }
}

double floor_sinr(const Scenario& scenario, const OptimizerConfig& cfg) {
  if (cfg.min_rate_floor <= 0.0) return -std::numeric_limits<double>::infinity();
  // Tiny slack so a floor met exactly on a grid point is not rejected.
  return std::exp2(cfg.min_rate_floor / scenario.dof()) - 1.0 - 1e-12;
}

OptimizationResult finish(const Scenario& scenario, const ChannelRealization& realization,
                          const PhaseAxis& a1, const PhaseAxis& a2,
                          const detail::GridChoice& choice) {
  OptimizationResult result;
  if (!choice.feasible()) {
    result.feasible = false;
    result.allocation = allocation_from(scenario, a1, a1.axis.lo, a2, a2.axis.lo);
    return result;
  }
  result.allocation = allocation_from(scenario, a1, choice.x, a2, choice.y);
  result.sum_rate = evaluate(scenario, realization, result.allocation).sum_rate;
  return result;
}

// Searches the axes on one realization. A fixed phase-1 allocation turns the
// phase-1 axis off (hybrid stage 2).
OptimizationResult optimize_on(const Scenario& scenario, const ChannelRealization& realization,
                               const OptimizerConfig& cfg, const PowerAllocation* fixed_phase1) {
  check_config(cfg);
  const ChannelView view(scenario, realization);
  PhaseAxis a1 = make_axis(scenario, 0, cfg);
  const PhaseAxis a2 = make_axis(scenario, 1, cfg);
  const std::size_t n = scenario.symbol_count();
  const double sinr_floor = floor_sinr(scenario, cfg);

  std::vector<ReducedPhase> fixed_r1;
  if (fixed_phase1) {
    check_allocation(scenario, *fixed_phase1);
    PhaseSummary s;
    view.phase_summary(0, fixed_phase1->phase1.data(), s);
    fixed_r1.push_back(scenario.reduce(0, s));
    a1.axis.active = false;
  }

  auto eval = [&](std::span<const double> xs, std::span<const double> ys, std::span<double> out) {
    const auto r1 = fixed_phase1 ? fixed_r1 : reduce_grid(view, a1, xs);
    const auto r2 = reduce_grid(view, a2, ys);
    fill_products(scenario.composition(), r1, r2, n, sinr_floor, out);
  };
  const double tie_ratio = std::exp2(-kRateTieTolerance / scenario.dof());
  const auto choice = detail::grid_search(a1.axis, a2.axis, cfg.grid_resolution,
                                          cfg.refinement_rounds, eval,
                                          [&](double best) { return best * tie_ratio; });

  if (!fixed_phase1) return finish(scenario, realization, a1, a2, choice);

  OptimizationResult result;
  result.allocation = *fixed_phase1;
  if (scenario.phase_count() == 2) {
    if (!choice.feasible()) {
      result.feasible = false;
      return result;
    }
    std::array<double, kMaxSymbols> buf{};
    a2.powers(choice.y, buf.data());
    result.allocation.phase2.assign(buf.begin(), buf.begin() + n);
  } else if (!choice.feasible()) {
    result.feasible = false;
    return result;
  }
  result.sum_rate = evaluate(scenario, realization, result.allocation).sum_rate;
  return result;
}

}  // namespace

FixedCoefficients uniform_coefficients(const Scenario& scenario,
                                       std::span<const double> fractions) {
  const std::size_t n = scenario.symbol_count();
  if (fractions.size() != n) {
    throw ContractViolation("expected " + std::to_string(n) + " coefficients");
  }
  FixedCoefficients c;
  for (std::size_t p = 0; p < scenario.phase_count(); ++p) {
    const auto& plan = scenario.phases()[p];
    auto& out = p == 0 ? c.phase1 : c.phase2;
    out.assign(n, 0.0);
    for (auto s : plan.symbols) {
      out[s.index] = plan.symbols.size() == n ? fractions[s.index] : 1.0;
    }
  }
  return c;
}

PowerAllocation fixed(const Scenario& scenario, const FixedCoefficients& coefficients) {
  const std::size_t n = scenario.symbol_count();
  PowerAllocation alloc;
  for (std::size_t p = 0; p < scenario.phase_count(); ++p) {
    const auto& fr = p == 0 ? coefficients.phase1 : coefficients.phase2;
    if (fr.size() != n) {
      throw ContractViolation("phase " + std::to_string(p + 1) + " needs " + std::to_string(n) +
                              " coefficients");
    }
    const auto& plan = scenario.phases()[p];
    std::map<std::string, double> per_tx;
    double total = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      if (!(fr[k] >= 0.0) || !std::isfinite(fr[k])) {
        throw ConstraintViolation("coefficients must be finite and nonnegative");
      }
      total += fr[k];
      per_tx[plan.transmitter[k]] += fr[k];
    }
    const bool shared =
        scenario.spec().power_model == PhasePowerModel::shared || plan.single_transmitter();
    if (shared && total > 1.0 + 1e-12) {
      throw ConstraintViolation("phase " + std::to_string(p + 1) + " coefficients sum to " +
                                std::to_string(total) + " > 1");
    }
    for (const auto& [tx, v] : per_tx) {
      if (v > 1.0 + 1e-12) throw ConstraintViolation("transmitter " + tx + " exceeds 1");
    }
    auto& powers = alloc.phase(p);
    powers.resize(n);
    for (std::size_t k = 0; k < n; ++k) powers[k] = fr[k] * scenario.phase_budget();
  }
  check_allocation(scenario, alloc);
  return alloc;
}

OptimizationResult icsi_optimize(const Scenario& scenario, const ChannelRealization& realization,
                                 const OptimizerConfig& cfg) {
  return optimize_on(scenario, realization, cfg, nullptr);
}

OptimizationResult hcsi_allocate(const Scenario& scenario, const PowerAllocation& stage1,
                                 const ChannelRealization& realization,
                                 const OptimizerConfig& cfg) {
  return optimize_on(scenario, realization, cfg, &stage1);
}

OptimizationResult scsi_optimize(const Scenario& scenario, const StatisticalBudget& budget,
                                 const OptimizerConfig& cfg) {
  check_config(cfg);
  if (budget.sample_count < 1) throw DomainError("sample_count must be at least 1");
  const std::size_t samples = budget.sample_count;
  const std::size_t n = scenario.symbol_count();
  const PhaseAxis a1 = make_axis(scenario, 0, cfg);
  const PhaseAxis a2 = make_axis(scenario, 1, cfg);

  std::vector<ChannelRealization> draws;
  std::vector<ChannelView> views;
  draws.reserve(samples);
  for (std::size_t s = 0; s < samples; ++s) {
    if (budget.mean_channel) {
      draws.push_back(mean_realization(scenario.links()));
    } else {
      RngStream stream(budget.seed, s);
      draws.push_back(sample_realization(scenario.links(), stream));
    }
  }
  views.reserve(samples);
  for (const auto& d : draws) views.emplace_back(scenario, d);

  if (!(budget.min_mean_rate >= 0.0)) throw DomainError("min_mean_rate must be nonnegative");
  const double dof = scenario.dof();
  const double floor = std::max(cfg.min_rate_floor, budget.min_mean_rate);
  const bool floors = floor > 0.0;
  const Composition comp = scenario.composition();

  auto eval = [&](std::span<const double> xs, std::span<const double> ys, std::span<double> out) {
    // r[i * samples + s]
    std::vector<ReducedPhase> r1(xs.size() * samples), r2(ys.size() * samples);
    for (std::size_t s = 0; s < samples; ++s) {
      const auto g1 = reduce_grid(views[s], a1, xs);
      const auto g2 = reduce_grid(views[s], a2, ys);
      for (std::size_t i = 0; i < xs.size(); ++i) r1[i * samples + s] = g1[i];
      for (std::size_t j = 0; j < ys.size(); ++j) r2[j * samples + s] = g2[j];
    }
    std::array<double, kMaxSymbols> per_symbol{};
    const double none = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < xs.size(); ++i) {
      for (std::size_t j = 0; j < ys.size(); ++j) {
        double total = 0.0;
        per_symbol.fill(0.0);
        for (std::size_t s = 0; s < samples; ++s) {
          const auto& p = r1[i * samples + s];
          const auto& q = r2[j * samples + s];
          if (floors) {
            for (std::size_t k = 0; k < n; ++k) {
              const double l = std::log2(1.0 + scenario.combine(p, q, k));
              per_symbol[k] += l;
              total += l;
            }
          } else {
            double prod;
            switch (comp) {
              case Composition::decode_forward:
                prod = product_score<Composition::decode_forward>(p, q, n, none);
                break;
              case Composition::combining:
                prod = product_score<Composition::combining>(p, q, n, none);
                break;
              default:
                prod = product_score<Composition::amplify_forward>(p, q, n, none);
                break;
            }
            total += std::log2(prod);
          }
        }
        bool ok = true;
        if (floors) {
          for (std::size_t k = 0; k < n; ++k) {
            if (dof * per_symbol[k] / samples < floor - 1e-12) ok = false;
          }
        }
        out[i * ys.size() + j] = ok ? total : none;
      }
    }
  };
  const double tie = kRateTieTolerance * static_cast<double>(samples) / dof;
  const auto choice =
      detail::grid_search(a1.axis, a2.axis, cfg.grid_resolution, cfg.refinement_rounds, eval,
                          [&](double best) { return best - tie; });

  OptimizationResult result;
  if (!choice.feasible()) {
    result.feasible = false;
    result.allocation = allocation_from(scenario, a1, a1.axis.lo, a2, a2.axis.lo);
    return result;
  }
  result.allocation = allocation_from(scenario, a1, choice.x, a2, choice.y);
  result.sum_rate = dof * choice.score / static_cast<double>(samples);
  return result;
}

PowerAllocation power_trim(const Scenario& scenario, const ChannelRealization& realization,
                           const PowerAllocation& alloc, PhaseMask phases) {
  const ChannelView view(scenario, realization);
  PowerAllocation current = alloc;
  const std::size_t n = scenario.symbol_count();

  PhaseSummary summaries[2];
  auto rates = [&](std::array<double, kMaxSymbols>& out) {
    const auto r1 = scenario.reduce(0, summaries[0]);
    const auto r2 = scenario.reduce(1, summaries[1]);
    for (std::size_t k = 0; k < n; ++k) {
      out[k] = scenario.dof() * std::log2(1.0 + scenario.combine(r1, r2, k));
    }
  };
  std::array<double, kMaxSymbols> reference{}, trial{};
  for (std::size_t p = 0; p < scenario.phase_count(); ++p) {
    view.phase_summary(p, current.phase(p).data(), summaries[p]);
  }
  rates(reference);

  for (std::size_t p = 0; p < scenario.phase_count(); ++p) {
    if (!phases[p] || current.phase_total(p) <= 0.0) continue;
    const std::size_t other = 1 - p;
    if (scenario.phase_count() == 2) {
      view.phase_summary(other, current.phase(other).data(), summaries[other]);
    }
    std::array<double, kMaxSymbols> scaled{};
    auto keeps_rates = [&](double c) {
      for (std::size_t k = 0; k < n; ++k) scaled[k] = c * current.phase(p)[k];
      view.phase_summary(p, scaled.data(), summaries[p]);
      rates(trial);
      for (std::size_t k = 0; k < n; ++k) {
        if (trial[k] < reference[k]) return false;
      }
      return true;
    };
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < kTrimIterations; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (keeps_rates(mid)) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    if (hi > 1.0 - kTrimNegligible) continue;
    for (auto& v : current.phase(p)) v *= hi;
  }
  return current;
}

RateReport oma_report(const Scenario& scenario, const ChannelRealization& realization,
                      Baseline baseline, bool trim) {
  const ChannelView view(scenario, realization);
  const std::size_t n = scenario.symbol_count();
  RateReport out;
  out.per_symbol_rates.assign(n, 0.0);
  out.end_to_end_sinr.assign(n, 0.0);

  auto serve = [&](SymbolId s, double share) {
    PowerAllocation solo = solo_allocation(scenario, s, scenario.phase_budget());
    if (trim) solo = power_trim(scenario, realization, solo);
    const auto r = view.evaluate(solo);
    out.per_symbol_rates[s.index] = share * r.per_symbol_rates[s.index];
    out.end_to_end_sinr[s.index] = r.end_to_end_sinr[s.index];
    out.per_phase_power[0] += share * r.per_phase_power[0];
    out.per_phase_power[1] += share * r.per_phase_power[1];
  };

  switch (baseline) {
    case Baseline::none:
      throw ContractViolation("oma_report needs an orthogonal baseline");
    case Baseline::tdma:
    case Baseline::fdma:
      // TDMA: each symbol owns half of every phase at full power. FDMA: half
      // the band at half power and half the noise, which gives the same SINR
      // and the same average power.
      for (std::size_t k = 0; k < n; ++k) serve(SymbolId{static_cast<std::uint32_t>(k)}, 0.5);
      break;
    case Baseline::maxmin_oma: {
      if (scenario.spec().kind != ScenarioKind::diamond) {
        throw ContractViolation("maxmin_oma needs the diamond topology");
      }
      const auto& l = scenario.links();
      const std::size_t k = maxmin_select({l[0].variance, l[1].variance},
                                          {l[2].variance, l[3].variance});
      serve(SymbolId{static_cast<std::uint32_t>(k - 1)}, 1.0);
      break;
    }
  }
  for (double r : out.per_symbol_rates) out.sum_rate += r;
  out.consumed_power = out.per_phase_power[0] + out.per_phase_power[1];
  return out;
}

}  // namespace noma
