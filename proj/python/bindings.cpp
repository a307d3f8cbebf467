#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "noma/allocation.hpp"
#include "noma/cli.hpp"
#include "noma/errors.hpp"
#include "noma/experiment.hpp"
#include "noma/metrics.hpp"
#include "noma/scenario.hpp"

namespace py = pybind11;
using namespace noma;

namespace {

template <class T, class Parse>
T parse_or_throw(const std::string& text, Parse parse, const char* what) {
  const auto v = parse(text);
  if (!v) throw py::value_error(std::string("unknown ") + what + " '" + text + "'");
  return *v;
}

ScenarioSpec make_spec(const std::string& kind, const std::map<std::string, double>& links,
                       const std::string& protocol, const std::string& baseline,
                       double phase_budget, double noise_power,
                       const std::vector<std::vector<unsigned>>& decoding_plans,
                       const std::string& pairing, const std::string& power_model) {
  ScenarioSpec spec;
  spec.kind = parse_or_throw<ScenarioKind>(kind, parse_kind, "kind");
  spec.protocol = parse_or_throw<Protocol>(protocol, parse_protocol, "protocol");
  spec.baseline = parse_or_throw<Baseline>(baseline, parse_baseline, "baseline");
  for (const auto& [id, var] : links) spec.links.push_back({id, var});
  spec.phase_budget = phase_budget;
  spec.noise_power = noise_power;
  for (const auto& plan : decoding_plans) {
    DecodingOrder order;
    for (unsigned s : plan) {
      if (s == 0) throw py::value_error("symbols are numbered from 1");
      order.symbols.push_back(SymbolId{s - 1});
    }
    spec.decoding_plans.push_back(order);
  }
  spec.pairing = parse_or_throw<Pairing>(pairing, parse_pairing, "pairing");
  spec.power_model = parse_or_throw<PhasePowerModel>(power_model, parse_power_model, "power model");
  return spec;
}

ChannelRealization realization(const std::map<std::string, double>& gains) {
  ChannelRealization r;
  for (const auto& [id, g] : gains) r.gains.emplace(id, g);
  return r;
}

py::dict report_dict(const RateReport& r) {
  py::dict d;
  d["per_symbol_rates"] = r.per_symbol_rates;
  d["end_to_end_sinr"] = r.end_to_end_sinr;
  d["sum_rate"] = r.sum_rate;
  d["consumed_power"] = r.consumed_power;
  d["per_phase_power"] = std::vector<double>{r.per_phase_power[0], r.per_phase_power[1]};
  return d;
}

py::dict summary_dict(const MetricsSummary& m) {
  py::dict d;
  d["ergodic_sum_rate"] = m.ergodic_sum_rate;
  d["sum_rate_ci"] = m.sum_rate_ci;
  d["mean_rates"] = m.mean_rates;
  d["outage_per_symbol"] = m.outage_per_symbol;
  d["system_outage"] = m.system_outage;
  d["mean_consumed_power"] = m.mean_consumed_power;
  d["energy_efficiency"] = m.energy_efficiency;
  d["ee_ratio_vs_fdma"] = m.ee_ratio_vs_fdma;
  d["normalized_power_utilization"] = m.normalized_power_utilization;
  d["trials_used"] = m.trials_used;
  d["infeasible_trials"] = m.infeasible_trials;
  d["gain_checksum"] = m.gain_checksum;
  return d;
}

OptimizerConfig optimizer(int grid_resolution, int refinement_rounds, double min_rate_floor,
                          bool enforce_ordering) {
  return {grid_resolution, refinement_rounds, min_rate_floor, enforce_ordering};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "NOMA cooperative relay simulator";

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<ContractViolation>(m, "ContractViolation", PyExc_ValueError);
  py::register_exception<ConstraintViolation>(m, "ConstraintViolation", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  m.def("degree_of_asymmetry", &degree_of_asymmetry, py::arg("strong"), py::arg("weak"));
  m.def("relay_asymmetry", &relay_asymmetry, py::arg("uplink_strong"), py::arg("uplink_weak"),
        py::arg("downlink_strong"), py::arg("downlink_weak"));
  m.def("rate_from_sinr", &rate_from_sinr, py::arg("sinr"), py::arg("dof_fraction"));
  m.def("df_compose", &df_compose, py::arg("hop1_rate"), py::arg("hop2_rate"));
  m.def("af_end_to_end", &af_end_to_end, py::arg("hop1_sinr"), py::arg("hop2_sinr"));
  m.def("maxmin_select", &maxmin_select, py::arg("sr_variances"), py::arg("ru_variances"));
  m.def(
      "sic_sinr_chain",
      [](const std::vector<double>& powers, const std::vector<double>& gains,
         const std::vector<unsigned>& order, double noise_power) {
        if (powers.size() != gains.size()) throw py::value_error("powers and gains differ in length");
        std::vector<SignalComponent> comps;
        for (std::size_t i = 0; i < powers.size(); ++i) {
          comps.push_back({SymbolId{static_cast<std::uint32_t>(i)}, powers[i], gains[i]});
        }
        DecodingOrder o;
        for (unsigned k : order) o.symbols.push_back(SymbolId{k});
        std::vector<double> sinr(powers.size(), 0.0);
        for (const auto& s : sic_sinr_chain(comps, o, noise_power)) sinr[s.symbol.index] = s.sinr;
        return sinr;
      },
      py::arg("powers"), py::arg("gains"), py::arg("order"), py::arg("noise_power") = 1.0,
      "SINR per symbol index; `order` lists 0-based indices, first decoded first.");

  py::class_<Scenario>(m, "Scenario")
      .def(py::init([](const std::string& kind, const std::map<std::string, double>& links,
                       const std::string& protocol, const std::string& baseline,
                       double phase_budget, double noise_power,
                       const std::vector<std::vector<unsigned>>& decoding_plans,
                       const std::string& pairing, const std::string& power_model) {
             return Scenario::create(make_spec(kind, links, protocol, baseline, phase_budget,
                                               noise_power, decoding_plans, pairing, power_model));
           }),
           py::arg("kind"), py::arg("links"), py::arg("protocol") = "DF",
           py::arg("baseline") = "none", py::arg("phase_budget") = 1.0,
           py::arg("noise_power") = 1.0,
           py::arg("decoding_plans") = std::vector<std::vector<unsigned>>{},
           py::arg("pairing") = "direct", py::arg("power_model") = "shared")
      .def_property_readonly("phase_count", &Scenario::phase_count)
      .def_property_readonly("dof", &Scenario::dof)
      .def_property_readonly("phase_budget", &Scenario::phase_budget)
      .def_property_readonly("links", [](const Scenario& s) {
        std::vector<std::pair<std::string, double>> out;
        for (const auto& l : s.links()) out.emplace_back(l.link_id, l.variance);
        return out;
      })
      .def_property_readonly("decoding_plans", [](const Scenario& s) {
        std::vector<std::vector<unsigned>> out;
        for (const auto& p : s.phases()) {
          auto& v = out.emplace_back();
          for (auto sym : p.order.symbols) v.push_back(sym.index + 1);
        }
        return out;
      })
      .def("evaluate",
           [](const Scenario& s, const std::map<std::string, double>& gains,
              const std::vector<double>& phase1, const std::vector<double>& phase2) {
             return report_dict(evaluate(s, realization(gains), PowerAllocation{phase1, phase2}));
           },
           py::arg("gains"), py::arg("phase1"), py::arg("phase2") = std::vector<double>{})
      .def("icsi_optimize",
           [](const Scenario& s, const std::map<std::string, double>& gains, int grid_resolution,
              int refinement_rounds, double min_rate_floor, bool enforce_ordering) {
             const auto r = icsi_optimize(
                 s, realization(gains),
                 optimizer(grid_resolution, refinement_rounds, min_rate_floor, enforce_ordering));
             py::dict d;
             d["phase1"] = r.allocation.phase1;
             d["phase2"] = r.allocation.phase2;
             d["sum_rate"] = r.sum_rate;
             d["feasible"] = r.feasible;
             return d;
           },
           py::arg("gains"), py::arg("grid_resolution") = 201, py::arg("refinement_rounds") = 3,
           py::arg("min_rate_floor") = 0.0, py::arg("enforce_ordering") = true)
      .def("power_trim",
           [](const Scenario& s, const std::map<std::string, double>& gains,
              const std::vector<double>& phase1, const std::vector<double>& phase2) {
             const auto a = power_trim(s, realization(gains), PowerAllocation{phase1, phase2});
             return std::make_pair(a.phase1, a.phase2);
           },
           py::arg("gains"), py::arg("phase1"), py::arg("phase2") = std::vector<double>{})
      .def("asymmetry", [](const Scenario& s) {
        const auto a = asymmetry(s);
        py::dict d;
        d["uplink"] = a.uplink;
        d["downlink"] = a.downlink;
        d["relay"] = a.relay;
        d["maxmin_relay"] = a.maxmin_relay;
        d["last_decoded_path"] = a.last_decoded_path;
        return d;
      })
      .def("validate", [](const Scenario& s) {
        std::vector<std::tuple<std::string, std::string, std::string>> out;
        for (const auto& i : validate(s.spec()).issues) {
          out.emplace_back(i.severity == ValidationIssue::Severity::structural ? "structural"
                                                                               : "advisory",
                           i.rule, i.detail);
        }
        return out;
      });

  m.def(
      "run_trials",
      [](const Scenario& s, const std::string& strategy, double snr_db, std::size_t trials,
         std::uint64_t seed, std::vector<double> coefficients, std::vector<double> outage_targets,
         unsigned threads) {
        TrialPlan plan;
        plan.spec = s.spec();
        plan.strategy = parse_or_throw<Strategy>(strategy, parse_strategy, "strategy");
        plan.snr_db = snr_db;
        plan.trials = trials;
        plan.master_seed = seed;
        plan.coefficients = std::move(coefficients);
        plan.outage_targets = std::move(outage_targets);
        plan.threads = threads;
        plan.statistical.seed = splitmix64(seed ^ 0x9e3779b97f4a7c15ULL);
        MetricsSummary summary;
        {
          py::gil_scoped_release release;
          summary = run_trials(plan);
        }
        return summary_dict(summary);
      },
      py::arg("scenario"), py::arg("strategy") = "icsi", py::arg("snr_db") = 20.0,
      py::arg("trials") = 1000, py::arg("seed") = 0,
      py::arg("coefficients") = std::vector<double>{0.8, 0.2},
      py::arg("outage_targets") = std::vector<double>{1.0, 1.0}, py::arg("threads") = 0);

  m.def("preset_names", &preset_names);
  m.def("preset_text", [](const std::string& name) {
    const auto t = preset_text(name);
    if (!t) throw py::key_error(name);
    return std::string(*t);
  });
  m.def(
      "sweep_csv",
      [](const std::string& config_yaml, std::optional<std::size_t> trials,
         std::optional<std::vector<double>> snr_db, std::optional<unsigned> threads) {
        auto config = parse_experiment(config_yaml);
        Overrides o;
        o.trials = trials;
        o.snr_db = std::move(snr_db);
        o.threads = threads;
        apply_overrides(config, o);
        py::gil_scoped_release release;
        return sweep_csv(config);
      },
      py::arg("config_yaml"), py::arg("trials") = py::none(), py::arg("snr_db") = py::none(),
      py::arg("threads") = py::none(),
      "Runs an experiment config and returns the CSV table.");
}
