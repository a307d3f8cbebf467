#pragma once

// Relay architectures built on the SIC core. Every kind carries two
// multiplexed symbols x1, x2 over one or two transmission phases.

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "noma/channel.hpp"
#include "noma/power_allocation.hpp"
#include "noma/sic.hpp"

namespace noma {

enum class ScenarioKind {
  uplink_relay,       // S1, S2 -> R -> U
  downlink_relay,     // S -> R -> U1, U2
  x_network,          // S1, S2 -> R -> U1, U2
  diamond,            // S -> R1, R2 -> U
  three_node_direct,  // S -> R -> U plus the direct S -> U link
  user_cooperation,   // S -> U1, U2, then U2 -> U1
  broadcast,          // single-hop S -> U1, U2
  multiple_access,    // single-hop S1, S2 -> U
};

enum class Protocol { df, af };
enum class Baseline { none, tdma, fdma, maxmin_oma };

/// x_network only: which user receives the symbol of S1.
enum class Pairing { direct, swapped };

/// How simultaneous transmitters in one phase split the budget.
enum class PhasePowerModel { shared, per_transmitter };

std::string_view to_string(ScenarioKind kind);
std::string_view to_string(Protocol protocol);
std::string_view to_string(Baseline baseline);
std::string_view to_string(Pairing pairing);
std::string_view to_string(PhasePowerModel model);
std::optional<ScenarioKind> parse_kind(std::string_view text);
std::optional<Protocol> parse_protocol(std::string_view text);
std::optional<Baseline> parse_baseline(std::string_view text);
std::optional<Pairing> parse_pairing(std::string_view text);
std::optional<PhasePowerModel> parse_power_model(std::string_view text);

/// Link ids a kind requires, in the canonical sampling order.
std::vector<std::string> required_links(ScenarioKind kind);

struct ScenarioSpec {
  ScenarioKind kind = ScenarioKind::diamond;
  Protocol protocol = Protocol::df;
  Baseline baseline = Baseline::none;
  std::vector<LinkStats> links;
  double phase_budget = 1.0;  // P_t per phase
  double noise_power = 1.0;
  std::vector<DecodingOrder> decoding_plans;  // one per phase; empty selects defaults
  Pairing pairing = Pairing::direct;
  PhasePowerModel power_model = PhasePowerModel::shared;

  friend bool operator==(const ScenarioSpec&, const ScenarioSpec&) = default;
};

struct ValidationIssue {
  enum class Severity { structural, advisory };
  Severity severity;
  std::string rule;
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;

  bool ok() const { return issues.empty(); }
  bool structurally_ok() const;
  std::vector<ValidationIssue> structural() const;
  std::vector<ValidationIssue> advisories() const;
};

/// Structural errors (topology, ranges) plus advisory rule checks: same
/// decoding manner on both DF hops, AF composites, strong/weak labels.
ValidationReport validate(const ScenarioSpec& spec);

enum class PhaseKind {
  uplink,          // several transmitters, one receiver
  downlink,        // one transmitter, receivers with distinct destinations
  point_to_point,  // one transmitter superposing for a single endpoint
};

enum class Role : std::uint8_t {
  relay,        // must decode (and, for relayed kinds, forward)
  destination,  // final receiver of the symbol
  interference, // decoded only when SIC requires it
};

struct Observation {
  SymbolId symbol;
  std::size_t link = 0;  // index into Scenario::links()
  Role role = Role::interference;
};

struct ReceiverPlan {
  std::string node;
  std::vector<Observation> observations;
};

struct PhasePlan {
  PhaseKind kind = PhaseKind::point_to_point;
  std::vector<SymbolId> symbols;          // transmitted this phase
  std::vector<std::string> transmitter;   // per symbol index; empty if silent
  std::vector<ReceiverPlan> receivers;
  DecodingOrder order;

  bool carries(SymbolId s) const;
  bool single_transmitter() const;
};

/// How per-phase SINRs become an end-to-end SINR.
enum class Composition {
  decode_forward,   // min over every decoding constraint
  combining,        // DF, destination SINRs add across phases
  amplify_forward,  // af_end_to_end(relay SINR, destination SINR)
};

inline constexpr std::size_t kMaxSymbols = 4;

/// Per-symbol constraint SINRs produced by one phase. Absent entries are +inf.
struct PhaseSummary {
  static constexpr double kAbsent = std::numeric_limits<double>::infinity();
  std::array<double, kMaxSymbols> relay;
  std::array<double, kMaxSymbols> sic;
  std::array<double, kMaxSymbols> dest;

  PhaseSummary() { clear(); }
  void clear() {
    relay.fill(kAbsent);
    sic.fill(kAbsent);
    dest.fill(kAbsent);
  }
};

/// Phase summary folded into the two numbers the composition needs.
struct ReducedPhase {
  std::array<double, kMaxSymbols> bound;  // min-type constraints
  std::array<double, kMaxSymbols> value;  // combined across phases
};

struct RateReport {
  std::vector<double> per_symbol_rates;
  std::vector<double> end_to_end_sinr;
  double sum_rate = 0.0;
  double consumed_power = 0.0;
  std::array<double, 2> per_phase_power{0.0, 0.0};
};

/// A structurally valid spec with its resolved topology. Immutable and
/// shareable across threads.
class Scenario {
 public:
  /// Throws ConfigError listing structural problems.
  static Scenario create(const ScenarioSpec& spec);

  const ScenarioSpec& spec() const { return spec_; }
  /// Links in canonical order (the order realizations are sampled in).
  const std::vector<LinkStats>& links() const { return links_; }
  const std::vector<PhasePlan>& phases() const { return phases_; }
  std::size_t phase_count() const { return phases_.size(); }
  std::size_t symbol_count() const { return symbol_count_; }
  double phase_budget() const { return spec_.phase_budget; }
  double noise_power() const { return spec_.noise_power; }
  double dof() const { return phases_.size() == 2 ? 0.5 : 1.0; }
  Composition composition() const { return composition_; }

  /// Variance of the link that carries `symbol` to its intended receiver in
  /// `phase` (relay or destination).
  double hop_variance(std::size_t phase, SymbolId symbol) const;

  /// Diamond only: 1-based relay index that forwards `symbol`.
  std::size_t relay_path(SymbolId symbol) const { return symbol.index + 1; }

  /// Same spec with a different budget.
  Scenario with_budget(double phase_budget) const;

  RateReport rates(const PhaseSummary& phase1, const PhaseSummary& phase2,
                   const PowerAllocation& alloc) const;

  ReducedPhase reduce(std::size_t phase, const PhaseSummary& summary) const;
  double combine(const ReducedPhase& a, const ReducedPhase& b, std::size_t k) const;

 private:
  Scenario() = default;

  ScenarioSpec spec_;
  std::vector<LinkStats> links_;
  std::vector<PhasePlan> phases_;
  std::size_t symbol_count_ = 2;
  Composition composition_ = Composition::decode_forward;
};

/// Scenario gains resolved for one realization; the fast path for repeated
/// evaluation at different powers.
class ChannelView {
 public:
  ChannelView(const Scenario& scenario, const ChannelRealization& realization);

  const Scenario& scenario() const { return *scenario_; }
  const std::vector<double>& gains() const { return gains_; }

  /// `powers` is indexed by symbol.
  void phase_summary(std::size_t phase, const double* powers, PhaseSummary& out) const;

  RateReport evaluate(const PowerAllocation& alloc) const;

 private:
  const Scenario* scenario_;
  std::vector<double> gains_;
};

/// Checks sizes, signs and budgets of an allocation against the scenario.
void check_allocation(const Scenario& scenario, const PowerAllocation& alloc);

/// End-to-end per-symbol rates with the half-duplex factor of the kind.
RateReport evaluate(const Scenario& scenario, const ChannelRealization& realization,
                    const PowerAllocation& alloc);

/// 1-based index maximizing min(sr[k], ru[k]); ties go to the smallest index.
std::size_t maxmin_select(const std::vector<double>& sr_variances,
                          const std::vector<double>& ru_variances);

/// Allocation giving `symbol` `power` in every phase that carries it.
PowerAllocation solo_allocation(const Scenario& scenario, SymbolId symbol, double power);

/// Degrees of asymmetry of each hop, labelled by the decoding plan.
struct AsymmetryReport {
  double uplink = 1.0;    // A^u; 1 when no uplink hop exists
  double downlink = 1.0;  // A^d
  double relay = 1.0;     // A^r = A^u * A^d
  std::optional<std::size_t> maxmin_relay;      // diamond only
  std::optional<std::size_t> last_decoded_path; // diamond only
};
AsymmetryReport asymmetry(const Scenario& scenario);

}  // namespace noma
