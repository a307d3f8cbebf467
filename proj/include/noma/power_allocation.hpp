#pragma once

#include <cstddef>
#include <numeric>
#include <vector>

namespace noma {

/// Absolute transmit powers per phase, indexed by symbol. A symbol that is
/// not transmitted in a phase holds 0 there.
struct PowerAllocation {
  std::vector<double> phase1;
  std::vector<double> phase2;

  std::vector<double>& phase(std::size_t p) { return p == 0 ? phase1 : phase2; }
  const std::vector<double>& phase(std::size_t p) const { return p == 0 ? phase1 : phase2; }

  double phase_total(std::size_t p) const {
    const auto& v = phase(p);
    return std::accumulate(v.begin(), v.end(), 0.0);
  }
  double total() const { return phase_total(0) + phase_total(1); }

  friend bool operator==(const PowerAllocation&, const PowerAllocation&) = default;
};

}  // namespace noma
