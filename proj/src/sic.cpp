#include "noma/sic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "noma/errors.hpp"

namespace noma {

std::vector<SymbolSinr> sic_sinr_chain(std::span<const SignalComponent> components,
                                       const DecodingOrder& order, double noise_power) {
  if (!(noise_power > 0.0)) throw DomainError("noise power must be positive");
  if (order.symbols.size() != components.size()) {
    throw ContractViolation("decoding order length does not match component count");
  }
  for (const auto& c : components) {
    if (c.power < 0.0 || c.gain < 0.0 || std::isnan(c.power) || std::isnan(c.gain)) {
      throw DomainError("negative power or gain for symbol " + c.symbol.name());
    }
  }

  std::vector<double> received;
  received.reserve(order.symbols.size());
  std::vector<bool> used(components.size(), false);
  for (const auto& id : order.symbols) {
    auto it = std::find_if(components.begin(), components.end(),
                           [&](const SignalComponent& c) { return c.symbol == id; });
    if (it == components.end()) {
      throw ContractViolation("decoding order names unknown symbol " + id.name());
    }
    auto idx = static_cast<std::size_t>(it - components.begin());
    if (used[idx]) throw ContractViolation("symbol " + id.name() + " appears twice in order");
    used[idx] = true;
    received.push_back(it->power * it->gain);
  }

  std::vector<SymbolSinr> out(order.symbols.size());
  double residual = noise_power;
  for (std::size_t pos = order.symbols.size(); pos-- > 0;) {
    out[pos] = {order.symbols[pos], received[pos] / residual};
    residual += received[pos];
  }
  return out;
}

double rate_from_sinr(double sinr, double dof_fraction) {
  if (!(dof_fraction > 0.0) || dof_fraction > 1.0) {
    throw DomainError("dof fraction must lie in (0, 1]");
  }
  if (!(sinr >= 0.0)) throw DomainError("sinr must be nonnegative");
  return dof_fraction * std::log2(1.0 + sinr);
}

std::vector<HopRate> hop_rates(std::span<const SymbolSinr> chain, double dof_fraction) {
  std::vector<HopRate> out;
  out.reserve(chain.size());
  for (const auto& s : chain) out.push_back({s.symbol, rate_from_sinr(s.sinr, dof_fraction), s.sinr});
  return out;
}

double df_compose(double hop1_rate, double hop2_rate) {
  if (!(hop1_rate >= 0.0) || !(hop2_rate >= 0.0)) throw DomainError("rates must be nonnegative");
  return std::min(hop1_rate, hop2_rate);
}

double af_end_to_end(double hop1_sinr, double hop2_sinr) {
  if (!(hop1_sinr >= 0.0) || !(hop2_sinr >= 0.0)) throw DomainError("sinr must be nonnegative");
  if (std::isinf(hop1_sinr)) return hop2_sinr;
  if (std::isinf(hop2_sinr)) return hop1_sinr;
  return detail::af_compose(hop1_sinr, hop2_sinr);
}

}  // namespace noma
