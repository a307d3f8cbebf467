#pragma once

// Statistical channel model: link variances, Rayleigh power-gain sampling
// and degree-of-asymmetry ratios. All quantities are normalized to unit
// noise power.

#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <span>
#include <string>
#include <string_view>

namespace noma {

struct LinkStats {
  std::string link_id;
  double variance = 1.0;  // average channel power sigma^2

  friend bool operator==(const LinkStats&, const LinkStats&) = default;
};

/// Instantaneous power gains |h|^2 keyed by link id.
struct ChannelRealization {
  std::map<std::string, double, std::less<>> gains;

  double gain(std::string_view link_id) const;
};

/// Reproducible random substream. The engine seed is a scrambled function of
/// (master_seed, substream_index) only, so trial t draws the same numbers no
/// matter which worker runs it or in which order.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t substream_index);

  std::uint64_t master_seed() const { return master_seed_; }
  std::uint64_t substream_index() const { return substream_index_; }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  /// Exponential with mean 1, by inversion.
  double unit_exponential();

 private:
  std::uint64_t master_seed_;
  std::uint64_t substream_index_;
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

/// One Rayleigh power gain: Exponential with mean `stats.variance`.
double sample_gain(const LinkStats& stats, RngStream& stream);

/// Draws every link in order from the same stream. Gains are variance times a
/// unit exponential, so two settings with the same link order share the
/// underlying fading draws.
ChannelRealization sample_realization(std::span<const LinkStats> links, RngStream& stream);

/// Gains fixed to their means (deterministic channel).
ChannelRealization mean_realization(std::span<const LinkStats> links);

/// strong_variance / weak_variance. Covers both uplink and downlink hops.
double degree_of_asymmetry(double strong_variance, double weak_variance);

/// Product of the uplink and downlink degrees of asymmetry.
double relay_asymmetry(double uplink_strong, double uplink_weak, double downlink_strong,
                       double downlink_weak);

}  // namespace noma
