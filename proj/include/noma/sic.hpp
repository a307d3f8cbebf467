#pragma once

// Single-receiver successive interference cancellation and hop composition.

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace noma {

/// Index of a multiplexed symbol; printed as x1, x2, ...
struct SymbolId {
  std::uint32_t index = 0;

  std::string name() const { return "x" + std::to_string(index + 1); }
  friend auto operator<=>(const SymbolId&, const SymbolId&) = default;
};

/// One superposed symbol as seen by a receiver.
struct SignalComponent {
  SymbolId symbol;
  double power = 0.0;  // transmit power, same units as the phase budget
  double gain = 0.0;   // link power gain to this receiver
};

/// First element is decoded first.
struct DecodingOrder {
  std::vector<SymbolId> symbols;

  friend bool operator==(const DecodingOrder&, const DecodingOrder&) = default;
};

struct HopRate {
  SymbolId symbol;
  double rate = 0.0;  // bits/s/Hz
  double sinr = 0.0;
};

struct SymbolSinr {
  SymbolId symbol;
  double sinr = 0.0;
};

/// Per-symbol SINR along a SIC chain, returned in decoding order. Symbols
/// later in `order` interfere with earlier ones; the last one sees noise only.
std::vector<SymbolSinr> sic_sinr_chain(std::span<const SignalComponent> components,
                                       const DecodingOrder& order, double noise_power);

/// dof_fraction * log2(1 + sinr).
double rate_from_sinr(double sinr, double dof_fraction);

/// Rates for every element of a SIC chain.
std::vector<HopRate> hop_rates(std::span<const SymbolSinr> chain, double dof_fraction);

/// Decode-and-forward: the end-to-end rate is the weaker hop.
double df_compose(double hop1_rate, double hop2_rate);

/// Variable-gain amplify-and-forward end-to-end SINR g1*g2/(g1+g2+1).
double af_end_to_end(double hop1_sinr, double hop2_sinr);

namespace detail {

/// Allocation-free chain used by the optimizers. `received[i]` is
/// power*gain of symbol i, `order` lists symbol indices, `sinr_out[i]` is
/// written for every i in `order`.
inline void chain_sinr(const double* received, const std::uint8_t* order, std::size_t n,
                       double noise_power, double* sinr_out) {
  double residual = noise_power;
  for (std::size_t pos = n; pos-- > 0;) {
    const auto k = order[pos];
    sinr_out[k] = received[k] / residual;
    residual += received[k];
  }
}

inline double af_compose(double g1, double g2) {
  const double denom = g1 + g2 + 1.0;
  return denom > 0.0 ? (g1 * g2) / denom : 0.0;
}

}  // namespace detail
}  // namespace noma
