#include "noma/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "noma/errors.hpp"

namespace noma {

namespace {

constexpr SymbolId kX1{0};
constexpr SymbolId kX2{1};

template <class Enum, std::size_t N>
std::optional<Enum> lookup(const std::array<std::pair<std::string_view, Enum>, N>& table,
                           std::string_view text) {
  for (const auto& [name, value] : table) {
    if (name == text) return value;
  }
  return std::nullopt;
}

template <class Enum, std::size_t N>
std::string_view name_of(const std::array<std::pair<std::string_view, Enum>, N>& table,
                         Enum value) {
  for (const auto& [name, v] : table) {
    if (v == value) return name;
  }
  return "?";
}

constexpr std::array<std::pair<std::string_view, ScenarioKind>, 8> kKinds{{
    {"uplink_relay", ScenarioKind::uplink_relay},
    {"downlink_relay", ScenarioKind::downlink_relay},
    {"x_network", ScenarioKind::x_network},
    {"diamond", ScenarioKind::diamond},
    {"three_node_direct", ScenarioKind::three_node_direct},
    {"user_cooperation", ScenarioKind::user_cooperation},
    {"broadcast", ScenarioKind::broadcast},
    {"multiple_access", ScenarioKind::multiple_access},
}};
constexpr std::array<std::pair<std::string_view, Protocol>, 2> kProtocols{{
    {"DF", Protocol::df},
    {"AF", Protocol::af},
}};
constexpr std::array<std::pair<std::string_view, Baseline>, 4> kBaselines{{
    {"none", Baseline::none},
    {"tdma", Baseline::tdma},
    {"fdma", Baseline::fdma},
    {"maxmin_oma", Baseline::maxmin_oma},
}};
constexpr std::array<std::pair<std::string_view, Pairing>, 2> kPairings{{
    {"direct", Pairing::direct},
    {"swapped", Pairing::swapped},
}};
constexpr std::array<std::pair<std::string_view, PhasePowerModel>, 2> kPowerModels{{
    {"shared", PhasePowerModel::shared},
    {"per_transmitter", PhasePowerModel::per_transmitter},
}};

bool is_two_hop_relay(ScenarioKind kind) {
  return kind == ScenarioKind::uplink_relay || kind == ScenarioKind::downlink_relay ||
         kind == ScenarioKind::x_network || kind == ScenarioKind::diamond;
}

bool is_composite(ScenarioKind kind) {
  return kind == ScenarioKind::x_network || kind == ScenarioKind::diamond;
}

struct TopologyBuilder {
  const std::map<std::string, std::size_t>& link_index;

  Observation obs(SymbolId s, const std::string& link, Role role) const {
    return {s, link_index.at(link), role};
  }
};

PhasePlan make_phase(PhaseKind kind, std::vector<SymbolId> symbols,
                     std::vector<std::string> transmitter, std::vector<ReceiverPlan> receivers) {
  PhasePlan p;
  p.kind = kind;
  p.symbols = std::move(symbols);
  p.transmitter = std::move(transmitter);
  p.receivers = std::move(receivers);
  return p;
}

std::vector<PhasePlan> build_phases(const ScenarioSpec& spec,
                                    const std::map<std::string, std::size_t>& index) {
  TopologyBuilder b{index};
  const Role R = Role::relay, D = Role::destination, I = Role::interference;
  std::vector<PhasePlan> phases;

  switch (spec.kind) {
    case ScenarioKind::uplink_relay:
      phases.push_back(make_phase(PhaseKind::uplink, {kX1, kX2}, {"S1", "S2"},
                                  {{"R", {b.obs(kX1, "S1R", R), b.obs(kX2, "S2R", R)}}}));
      phases.push_back(make_phase(PhaseKind::point_to_point, {kX1, kX2}, {"R", "R"},
                                  {{"U", {b.obs(kX1, "RU", D), b.obs(kX2, "RU", D)}}}));
      break;
    case ScenarioKind::downlink_relay:
      phases.push_back(make_phase(PhaseKind::point_to_point, {kX1, kX2}, {"S", "S"},
                                  {{"R", {b.obs(kX1, "SR", R), b.obs(kX2, "SR", R)}}}));
      phases.push_back(make_phase(PhaseKind::downlink, {kX1, kX2}, {"R", "R"},
                                  {{"U1", {b.obs(kX1, "RU1", D), b.obs(kX2, "RU1", I)}},
                                   {"U2", {b.obs(kX1, "RU2", I), b.obs(kX2, "RU2", D)}}}));
      break;
    case ScenarioKind::x_network: {
      const bool swapped = spec.pairing == Pairing::swapped;
      const SymbolId to_u1 = swapped ? kX2 : kX1;
      const SymbolId to_u2 = swapped ? kX1 : kX2;
      phases.push_back(make_phase(PhaseKind::uplink, {kX1, kX2}, {"S1", "S2"},
                                  {{"R", {b.obs(kX1, "S1R", R), b.obs(kX2, "S2R", R)}}}));
      phases.push_back(make_phase(PhaseKind::downlink, {kX1, kX2}, {"R", "R"},
                                  {{"U1", {b.obs(to_u1, "RU1", D), b.obs(to_u2, "RU1", I)}},
                                   {"U2", {b.obs(to_u1, "RU2", I), b.obs(to_u2, "RU2", D)}}}));
      break;
    }
    case ScenarioKind::diamond:
      phases.push_back(make_phase(PhaseKind::downlink, {kX1, kX2}, {"S", "S"},
                                  {{"R1", {b.obs(kX1, "SR1", R), b.obs(kX2, "SR1", I)}},
                                   {"R2", {b.obs(kX1, "SR2", I), b.obs(kX2, "SR2", R)}}}));
      phases.push_back(make_phase(PhaseKind::uplink, {kX1, kX2}, {"R1", "R2"},
                                  {{"U", {b.obs(kX1, "R1U", D), b.obs(kX2, "R2U", D)}}}));
      break;
    case ScenarioKind::three_node_direct:
      phases.push_back(make_phase(PhaseKind::point_to_point, {kX1, kX2}, {"S", "S"},
                                  {{"R", {b.obs(kX1, "SR", R), b.obs(kX2, "SR", R)}},
                                   {"U", {b.obs(kX1, "SU", D), b.obs(kX2, "SU", D)}}}));
      phases.push_back(make_phase(PhaseKind::point_to_point, {kX2}, {"", "R"},
                                  {{"U", {b.obs(kX2, "RU", D)}}}));
      break;
    case ScenarioKind::user_cooperation:
      phases.push_back(make_phase(PhaseKind::downlink, {kX1, kX2}, {"S", "S"},
                                  {{"U1", {b.obs(kX1, "SU1", D), b.obs(kX2, "SU1", I)}},
                                   {"U2", {b.obs(kX1, "SU2", R), b.obs(kX2, "SU2", D)}}}));
      phases.push_back(make_phase(PhaseKind::point_to_point, {kX1}, {"U2", ""},
                                  {{"U1", {b.obs(kX1, "U2U1", D)}}}));
      break;
    case ScenarioKind::broadcast:
      phases.push_back(make_phase(PhaseKind::downlink, {kX1, kX2}, {"S", "S"},
                                  {{"U1", {b.obs(kX1, "SU1", D), b.obs(kX2, "SU1", I)}},
                                   {"U2", {b.obs(kX1, "SU2", I), b.obs(kX2, "SU2", D)}}}));
      break;
    case ScenarioKind::multiple_access:
      phases.push_back(make_phase(PhaseKind::uplink, {kX1, kX2}, {"S1", "S2"},
                                  {{"U", {b.obs(kX1, "S1U", D), b.obs(kX2, "S2U", D)}}}));
      break;
  }
  return phases;
}

double intended_variance(const PhasePlan& phase, const std::vector<LinkStats>& links,
                         SymbolId s) {
  for (const auto& rx : phase.receivers) {
    for (const auto& o : rx.observations) {
      if (o.symbol == s && o.role != Role::interference) return links[o.link].variance;
    }
  }
  return 0.0;
}

DecodingOrder sorted_order(const PhasePlan& phase, const std::vector<LinkStats>& links,
                           bool strongest_first) {
  DecodingOrder order{phase.symbols};
  std::stable_sort(order.symbols.begin(), order.symbols.end(), [&](SymbolId a, SymbolId b) {
    const double va = intended_variance(phase, links, a);
    const double vb = intended_variance(phase, links, b);
    return strongest_first ? va > vb : va < vb;
  });
  return order;
}

// Uplink hops decode the strongest transmitter first, downlink hops the
// weakest user's symbol first; a point-to-point hop copies the other hop so
// both hops are decoded in the same manner.
std::vector<DecodingOrder> default_plans(const std::vector<PhasePlan>& phases,
                                         const std::vector<LinkStats>& links) {
  std::vector<DecodingOrder> plans(phases.size());
  for (std::size_t p = 0; p < phases.size(); ++p) {
    if (phases[p].kind == PhaseKind::uplink) plans[p] = sorted_order(phases[p], links, true);
    if (phases[p].kind == PhaseKind::downlink) plans[p] = sorted_order(phases[p], links, false);
  }
  for (std::size_t p = 0; p < phases.size(); ++p) {
    if (phases[p].kind != PhaseKind::point_to_point) continue;
    const std::size_t other = 1 - p;
    if (phases.size() == 2 && phases[other].kind != PhaseKind::point_to_point &&
        phases[other].symbols.size() == phases[p].symbols.size()) {
      plans[p] = plans[other];
    } else {
      plans[p] = DecodingOrder{phases[p].symbols};
    }
  }
  return plans;
}

bool is_permutation_of(const DecodingOrder& order, const std::vector<SymbolId>& symbols) {
  if (order.symbols.size() != symbols.size()) return false;
  std::set<SymbolId> a(order.symbols.begin(), order.symbols.end());
  std::set<SymbolId> b(symbols.begin(), symbols.end());
  return a.size() == order.symbols.size() && a == b;
}

std::string format_order(const DecodingOrder& order) {
  std::string out = "[";
  for (std::size_t i = 0; i < order.symbols.size(); ++i) {
    if (i) out += ", ";
    out += order.symbols[i].name();
  }
  return out + "]";
}

}  // namespace

std::string_view to_string(ScenarioKind kind) { return name_of(kKinds, kind); }
std::string_view to_string(Protocol protocol) { return name_of(kProtocols, protocol); }
std::string_view to_string(Baseline baseline) { return name_of(kBaselines, baseline); }
std::string_view to_string(Pairing pairing) { return name_of(kPairings, pairing); }
std::string_view to_string(PhasePowerModel model) { return name_of(kPowerModels, model); }
std::optional<ScenarioKind> parse_kind(std::string_view text) { return lookup(kKinds, text); }
std::optional<Protocol> parse_protocol(std::string_view text) {
  if (text == "df") return Protocol::df;
  if (text == "af") return Protocol::af;
  return lookup(kProtocols, text);
}
std::optional<Baseline> parse_baseline(std::string_view text) { return lookup(kBaselines, text); }
std::optional<Pairing> parse_pairing(std::string_view text) { return lookup(kPairings, text); }
std::optional<PhasePowerModel> parse_power_model(std::string_view text) {
  return lookup(kPowerModels, text);
}

std::vector<std::string> required_links(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::uplink_relay: return {"S1R", "S2R", "RU"};
    case ScenarioKind::downlink_relay: return {"SR", "RU1", "RU2"};
    case ScenarioKind::x_network: return {"S1R", "S2R", "RU1", "RU2"};
    case ScenarioKind::diamond: return {"SR1", "SR2", "R1U", "R2U"};
    case ScenarioKind::three_node_direct: return {"SR", "SU", "RU"};
    case ScenarioKind::user_cooperation: return {"SU1", "SU2", "U2U1"};
    case ScenarioKind::broadcast: return {"SU1", "SU2"};
    case ScenarioKind::multiple_access: return {"S1U", "S2U"};
  }
  return {};
}

bool PhasePlan::carries(SymbolId s) const {
  return std::find(symbols.begin(), symbols.end(), s) != symbols.end();
}

bool PhasePlan::single_transmitter() const {
  std::set<std::string> tx;
  for (auto s : symbols) tx.insert(transmitter[s.index]);
  return tx.size() <= 1;
}

bool ValidationReport::structurally_ok() const { return structural().empty(); }

std::vector<ValidationIssue> ValidationReport::structural() const {
  std::vector<ValidationIssue> out;
  for (const auto& i : issues) {
    if (i.severity == ValidationIssue::Severity::structural) out.push_back(i);
  }
  return out;
}

std::vector<ValidationIssue> ValidationReport::advisories() const {
  std::vector<ValidationIssue> out;
  for (const auto& i : issues) {
    if (i.severity == ValidationIssue::Severity::advisory) out.push_back(i);
  }
  return out;
}

namespace {

struct Resolved {
  std::vector<LinkStats> links;
  std::vector<PhasePlan> phases;
};

// Resolves topology and plans, appending structural issues. Returns nullopt
// when the spec cannot be resolved.
std::optional<Resolved> resolve(const ScenarioSpec& spec, ValidationReport& report) {
  auto structural = [&](std::string rule, std::string detail) {
    report.issues.push_back({ValidationIssue::Severity::structural, std::move(rule),
                             std::move(detail)});
  };

  if (!(spec.phase_budget > 0.0) || !std::isfinite(spec.phase_budget)) {
    structural("phase budget", "phase_budget must be positive and finite");
  }
  if (!(spec.noise_power > 0.0) || !std::isfinite(spec.noise_power)) {
    structural("noise power", "noise_power must be positive and finite");
  }
  if (spec.protocol == Protocol::af && !is_two_hop_relay(spec.kind)) {
    structural("protocol", "AF is only defined for two-hop relay kinds, not " +
                               std::string(to_string(spec.kind)));
  }
  if (spec.baseline == Baseline::maxmin_oma && spec.kind != ScenarioKind::diamond) {
    structural("baseline", "maxmin_oma needs the diamond topology");
  }

  const auto required = required_links(spec.kind);
  std::map<std::string, const LinkStats*> given;
  bool links_ok = true;
  for (const auto& l : spec.links) {
    if (!given.emplace(l.link_id, &l).second) {
      structural("topology", "duplicate link '" + l.link_id + "'");
      links_ok = false;
    }
    if (std::find(required.begin(), required.end(), l.link_id) == required.end()) {
      structural("topology", "link '" + l.link_id + "' is not part of " +
                                 std::string(to_string(spec.kind)));
      links_ok = false;
    }
    if (!(l.variance > 0.0) || !std::isfinite(l.variance)) {
      structural("variance", "link '" + l.link_id + "' needs a positive variance");
      links_ok = false;
    }
  }
  for (const auto& id : required) {
    if (!given.count(id)) {
      structural("topology", "missing link '" + id + "' for " + std::string(to_string(spec.kind)));
      links_ok = false;
    }
  }
  if (!links_ok) return std::nullopt;

  Resolved r;
  std::map<std::string, std::size_t> index;
  for (const auto& id : required) {
    index[id] = r.links.size();
    r.links.push_back(*given.at(id));
  }
  r.phases = build_phases(spec, index);

  std::vector<DecodingOrder> plans;
  if (spec.decoding_plans.empty()) {
    plans = default_plans(r.phases, r.links);
  } else if (spec.decoding_plans.size() != r.phases.size()) {
    structural("decoding plan", "expected " + std::to_string(r.phases.size()) +
                                    " decoding plans, got " +
                                    std::to_string(spec.decoding_plans.size()));
    return std::nullopt;
  } else {
    plans = spec.decoding_plans;
    for (std::size_t p = 0; p < plans.size(); ++p) {
      if (!is_permutation_of(plans[p], r.phases[p].symbols)) {
        structural("decoding plan", "phase " + std::to_string(p + 1) + " order " +
                                        format_order(plans[p]) +
                                        " is not a permutation of the symbols sent");
        return std::nullopt;
      }
    }
  }
  for (std::size_t p = 0; p < plans.size(); ++p) r.phases[p].order = plans[p];
  if (!report.structurally_ok()) return std::nullopt;
  return r;
}

}  // namespace

ValidationReport validate(const ScenarioSpec& spec) {
  ValidationReport report;
  auto resolved = resolve(spec, report);
  if (!resolved) return report;
  const auto& phases = resolved->phases;
  const auto& links = resolved->links;

  auto advisory = [&](std::string rule, std::string detail) {
    report.issues.push_back({ValidationIssue::Severity::advisory, std::move(rule),
                             std::move(detail)});
  };

  if (spec.protocol == Protocol::df && is_two_hop_relay(spec.kind) &&
      phases[0].order.symbols.front() != phases[1].order.symbols.front()) {
    advisory("inconsistent decoding manner (DF)",
             "hop 1 decodes " + phases[0].order.symbols.front().name() +
                 " first but hop 2 decodes " + phases[1].order.symbols.front().name() +
                 " first; both hops must be decoded in the same manner");
  }

  if (spec.protocol == Protocol::af && is_composite(spec.kind)) {
    const double d1 = intended_variance(phases[0], links, kX1) -
                      intended_variance(phases[0], links, kX2);
    const double d2 = intended_variance(phases[1], links, kX1) -
                      intended_variance(phases[1], links, kX2);
    if (d1 * d2 < 0.0) {
      advisory("AF composite impractical",
               "hop gains are sorted in opposite manners; the relay cannot separate the "
               "symbols, use an uplink or downlink architecture");
    } else {
      advisory("AF composite impractical",
               "hop gains sorted in the same manner give poor fairness; use an uplink or "
               "downlink architecture");
    }
  }

  for (std::size_t p = 0; p < phases.size(); ++p) {
    const auto& phase = phases[p];
    if (phase.symbols.size() < 2 || phase.kind == PhaseKind::point_to_point) continue;
    const SymbolId first = phase.order.symbols.front();
    const double v_first = intended_variance(phase, links, first);
    for (auto s : phase.order.symbols) {
      if (s == first) continue;
      const double v = intended_variance(phase, links, s);
      const bool bad = phase.kind == PhaseKind::uplink ? v_first < v : v_first > v;
      if (bad) {
        advisory("asymmetry label mismatch",
                 "phase " + std::to_string(p + 1) + " (" +
                     (phase.kind == PhaseKind::uplink ? "uplink" : "downlink") +
                     ") decodes " + first.name() + " first, but its link is " +
                     (phase.kind == PhaseKind::uplink ? "weaker" : "stronger") + " than " +
                     s.name() + "'s");
        break;
      }
    }
  }
  return report;
}

Scenario Scenario::create(const ScenarioSpec& spec) {
  ValidationReport report;
  auto resolved = resolve(spec, report);
  if (!resolved) {
    std::ostringstream msg;
    msg << "invalid scenario:";
    for (const auto& i : report.structural()) msg << " [" << i.rule << "] " << i.detail << ';';
    throw ConfigError(msg.str());
  }
  Scenario s;
  s.spec_ = spec;
  s.links_ = std::move(resolved->links);
  s.phases_ = std::move(resolved->phases);
  s.symbol_count_ = 2;
  if (spec.protocol == Protocol::af) {
    s.composition_ = Composition::amplify_forward;
  } else if (spec.kind == ScenarioKind::three_node_direct ||
             spec.kind == ScenarioKind::user_cooperation) {
    s.composition_ = Composition::combining;
  } else {
    s.composition_ = Composition::decode_forward;
  }
  return s;
}

Scenario Scenario::with_budget(double phase_budget) const {
  if (!(phase_budget > 0.0) || !std::isfinite(phase_budget)) {
    throw DomainError("phase budget must be positive");
  }
  Scenario s = *this;
  s.spec_.phase_budget = phase_budget;
  return s;
}

double Scenario::hop_variance(std::size_t phase, SymbolId symbol) const {
  return intended_variance(phases_.at(phase), links_, symbol);
}

ReducedPhase Scenario::reduce(std::size_t phase, const PhaseSummary& s) const {
  ReducedPhase r;
  constexpr double inf = PhaseSummary::kAbsent;
  for (std::size_t k = 0; k < kMaxSymbols; ++k) {
    switch (composition_) {
      case Composition::decode_forward:
        r.bound[k] = std::min({s.relay[k], s.sic[k], s.dest[k]});
        r.value[k] = inf;
        break;
      case Composition::combining:
        r.bound[k] = std::min(s.relay[k], s.sic[k]);
        r.value[k] = s.dest[k] == inf ? 0.0 : s.dest[k];
        break;
      case Composition::amplify_forward:
        r.bound[k] = inf;
        r.value[k] = phase == 0 ? s.relay[k] : std::min(s.dest[k], s.sic[k]);
        break;
    }
  }
  return r;
}

double Scenario::combine(const ReducedPhase& a, const ReducedPhase& b, std::size_t k) const {
  switch (composition_) {
    case Composition::decode_forward:
      return std::min(a.bound[k], b.bound[k]);
    case Composition::combining:
      return std::min({a.bound[k], b.bound[k], a.value[k] + b.value[k]});
    case Composition::amplify_forward:
      return af_end_to_end(a.value[k], b.value[k]);
  }
  return 0.0;
}

RateReport Scenario::rates(const PhaseSummary& phase1, const PhaseSummary& phase2,
                           const PowerAllocation& alloc) const {
  const auto r1 = reduce(0, phase1);
  const auto r2 = reduce(1, phase2);
  RateReport out;
  out.per_symbol_rates.resize(symbol_count_);
  out.end_to_end_sinr.resize(symbol_count_);
  for (std::size_t k = 0; k < symbol_count_; ++k) {
    const double s = combine(r1, r2, k);
    out.end_to_end_sinr[k] = s;
    out.per_symbol_rates[k] = rate_from_sinr(s, dof());
    out.sum_rate += out.per_symbol_rates[k];
  }
  out.per_phase_power = {alloc.phase_total(0), phase_count() == 2 ? alloc.phase_total(1) : 0.0};
  out.consumed_power = out.per_phase_power[0] + out.per_phase_power[1];
  return out;
}

ChannelView::ChannelView(const Scenario& scenario, const ChannelRealization& realization)
    : scenario_(&scenario) {
  gains_.reserve(scenario.links().size());
  for (const auto& l : scenario.links()) {
    const double g = realization.gain(l.link_id);
    if (!(g >= 0.0) || !std::isfinite(g)) {
      throw DomainError("gain of link '" + l.link_id + "' must be finite and nonnegative");
    }
    gains_.push_back(g);
  }
}

void ChannelView::phase_summary(std::size_t phase, const double* powers,
                                PhaseSummary& out) const {
  out.clear();
  const auto& plan = scenario_->phases()[phase];
  const std::size_t n = plan.order.symbols.size();
  std::array<std::uint8_t, kMaxSymbols> order{};
  for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<std::uint8_t>(plan.order.symbols[i].index);

  std::array<double, kMaxSymbols> received{};
  std::array<double, kMaxSymbols> sinr{};
  std::array<Role, kMaxSymbols> role{};
  for (const auto& rx : plan.receivers) {
    for (const auto& o : rx.observations) {
      received[o.symbol.index] = powers[o.symbol.index] * gains_[o.link];
      role[o.symbol.index] = o.role;
    }
    detail::chain_sinr(received.data(), order.data(), n, scenario_->noise_power(), sinr.data());

    // A receiver decodes a symbol it does not want only to cancel it before
    // a later wanted symbol, and only when both actually carry power.
    bool wanted_later = false;
    for (std::size_t pos = n; pos-- > 0;) {
      const auto k = order[pos];
      switch (role[k]) {
        case Role::relay:
          out.relay[k] = std::min(out.relay[k], sinr[k]);
          break;
        case Role::destination:
          out.dest[k] = std::min(out.dest[k], sinr[k]);
          break;
        case Role::interference:
          if (wanted_later && powers[k] > 0.0) out.sic[k] = std::min(out.sic[k], sinr[k]);
          continue;
      }
      if (powers[k] > 0.0) wanted_later = true;
    }
  }
}

RateReport ChannelView::evaluate(const PowerAllocation& alloc) const {
  check_allocation(*scenario_, alloc);
  PhaseSummary s1, s2;
  phase_summary(0, alloc.phase1.data(), s1);
  if (scenario_->phase_count() == 2) phase_summary(1, alloc.phase2.data(), s2);
  return scenario_->rates(s1, s2, alloc);
}

void check_allocation(const Scenario& scenario, const PowerAllocation& alloc) {
  const std::size_t n = scenario.symbol_count();
  const double budget = scenario.phase_budget();
  for (std::size_t p = 0; p < 2; ++p) {
    const auto& powers = alloc.phase(p);
    if (p >= scenario.phase_count()) {
      for (double v : powers) {
        if (v != 0.0) throw ContractViolation("power allocated to a phase the scenario lacks");
      }
      continue;
    }
    if (powers.size() != n) {
      throw ContractViolation("phase " + std::to_string(p + 1) + " allocation has " +
                              std::to_string(powers.size()) + " entries, expected " +
                              std::to_string(n));
    }
    const auto& plan = scenario.phases()[p];
    std::map<std::string, double> per_tx;
    double total = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      if (!(powers[k] >= 0.0) || !std::isfinite(powers[k])) {
        throw DomainError("power of x" + std::to_string(k + 1) + " must be finite and nonnegative");
      }
      if (!plan.carries(SymbolId{static_cast<std::uint32_t>(k)})) {
        if (powers[k] != 0.0) {
          throw ContractViolation("x" + std::to_string(k + 1) + " is not sent in phase " +
                                  std::to_string(p + 1));
        }
        continue;
      }
      per_tx[plan.transmitter[k]] += powers[k];
      total += powers[k];
    }
    const double limit = budget * (1.0 + 1e-9);
    if (scenario.spec().power_model == PhasePowerModel::shared || plan.single_transmitter()) {
      if (total > limit) {
        throw ConstraintViolation("phase " + std::to_string(p + 1) + " uses " +
                                  std::to_string(total) + " > budget " + std::to_string(budget));
      }
    } else {
      for (const auto& [tx, v] : per_tx) {
        if (v > limit) {
          throw ConstraintViolation("transmitter " + tx + " exceeds the phase budget");
        }
      }
    }
  }
}

RateReport evaluate(const Scenario& scenario, const ChannelRealization& realization,
                    const PowerAllocation& alloc) {
  return ChannelView(scenario, realization).evaluate(alloc);
}

std::size_t maxmin_select(const std::vector<double>& sr_variances,
                          const std::vector<double>& ru_variances) {
  if (sr_variances.empty() || sr_variances.size() != ru_variances.size()) {
    throw DomainError("max-min selection needs equal-length nonempty variance lists");
  }
  std::size_t best = 0;
  double best_score = -1.0;
  for (std::size_t k = 0; k < sr_variances.size(); ++k) {
    const double score = std::min(sr_variances[k], ru_variances[k]);
    if (score > best_score) {
      best_score = score;
      best = k;
    }
  }
  return best + 1;
}

PowerAllocation solo_allocation(const Scenario& scenario, SymbolId symbol, double power) {
  PowerAllocation a;
  a.phase1.assign(scenario.symbol_count(), 0.0);
  a.phase2.assign(scenario.phase_count() == 2 ? scenario.symbol_count() : 0, 0.0);
  for (std::size_t p = 0; p < scenario.phase_count(); ++p) {
    if (scenario.phases()[p].carries(symbol)) a.phase(p)[symbol.index] = power;
  }
  return a;
}

AsymmetryReport asymmetry(const Scenario& scenario) {
  AsymmetryReport r;
  for (std::size_t p = 0; p < scenario.phase_count(); ++p) {
    const auto& phase = scenario.phases()[p];
    if (phase.symbols.size() < 2 || phase.kind == PhaseKind::point_to_point) continue;
    const double first = scenario.hop_variance(p, phase.order.symbols.front());
    const double last = scenario.hop_variance(p, phase.order.symbols.back());
    if (phase.kind == PhaseKind::uplink) {
      r.uplink = degree_of_asymmetry(first, last);
    } else {
      r.downlink = degree_of_asymmetry(last, first);
    }
  }
  r.relay = r.uplink * r.downlink;
  if (scenario.spec().kind == ScenarioKind::diamond) {
    const auto& links = scenario.links();
    r.maxmin_relay = maxmin_select({links[0].variance, links[1].variance},
                                   {links[2].variance, links[3].variance});
    r.last_decoded_path = scenario.relay_path(scenario.phases()[0].order.symbols.back());
  }
  return r;
}

}  // namespace noma
