#include "noma/channel.hpp"

#include <cmath>
#include <string>

#include "noma/errors.hpp"

namespace noma {

double ChannelRealization::gain(std::string_view link_id) const {
  auto it = gains.find(link_id);
  if (it == gains.end()) {
    throw ContractViolation("realization has no gain for link '" + std::string(link_id) + "'");
  }
  return it->second;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t substream_index)
    : master_seed_(master_seed),
      substream_index_(substream_index),
      engine_(splitmix64(splitmix64(master_seed) ^ splitmix64(~substream_index))) {}

double RngStream::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RngStream::unit_exponential() {
  // 1 - u lies in (0, 1], so the log is finite.
  return -std::log1p(-uniform());
}

double sample_gain(const LinkStats& stats, RngStream& stream) {
  if (!(stats.variance > 0.0)) {
    throw DomainError("link '" + stats.link_id + "' has non-positive variance");
  }
  return stats.variance * stream.unit_exponential();
}

ChannelRealization sample_realization(std::span<const LinkStats> links, RngStream& stream) {
  ChannelRealization out;
  for (const auto& link : links) out.gains[link.link_id] = sample_gain(link, stream);
  return out;
}

ChannelRealization mean_realization(std::span<const LinkStats> links) {
  ChannelRealization out;
  for (const auto& link : links) {
    if (!(link.variance > 0.0)) {
      throw DomainError("link '" + link.link_id + "' has non-positive variance");
    }
    out.gains[link.link_id] = link.variance;
  }
  return out;
}

double degree_of_asymmetry(double strong_variance, double weak_variance) {
  if (!(strong_variance > 0.0) || !(weak_variance > 0.0)) {
    throw DomainError("degree of asymmetry needs positive variances");
  }
  return strong_variance / weak_variance;
}

double relay_asymmetry(double uplink_strong, double uplink_weak, double downlink_strong,
                       double downlink_weak) {
  return degree_of_asymmetry(uplink_strong, uplink_weak) *
         degree_of_asymmetry(downlink_strong, downlink_weak);
}

}  // namespace noma
