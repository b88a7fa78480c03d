#include "radiographer/detection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "radiographer/errors.hpp"
#include "radiographer/numfmt.hpp"

namespace radiographer {

void validate(const DetectorParams& params) {
  if (!(params.tau >= 0.0)) throw InputError("tau must be >= 0, got " + format_number(params.tau));
  if (params.zone_order < 1) throw InputError("zone_order must be >= 1, got " + std::to_string(params.zone_order));
}

SilenceProfile build_silence_profile(const Topology& topology, std::span<const EpochWindows> silence_epochs) {
  const std::size_t k = topology.link_count();
  SilenceProfile profile{std::vector<double>(k, 0.0), std::vector<std::size_t>(k, 0)};
  for (const auto& epoch : silence_epochs) {
    for (const auto& [link, window] : epoch.links) {
      // Count-weighted running mean, exact when every window agrees.
      auto& n = profile.count.at(link);
      n += window.count;
      const double weight = static_cast<double>(window.count) / static_cast<double>(n);
      profile.baseline[link] += (window.mean_rss - profile.baseline[link]) * weight;
    }
  }
  for (std::size_t i = 0; i < k; ++i) {
    if (profile.count[i] == 0) throw PipelineError("no silence data for link " + topology.link_name(i));
    if (profile.baseline[i] == 0.0) throw PipelineError("zero silence baseline for link " + topology.link_name(i));
  }
  return profile;
}

double relative_change(double mean_rss, double baseline) { return std::abs((mean_rss - baseline) / baseline); }

DeviceFreeResult detect_device_free(const std::map<std::size_t, RssWindow>& windows, const SilenceProfile& profile,
                                    const DetectorParams& params) {
  DeviceFreeResult result;
  for (const auto& [link, window] : windows) {
    if (link >= profile.baseline.size() || profile.count[link] == 0)
      throw PipelineError("no silence baseline for link index " + std::to_string(link));
    const double delta = relative_change(window.mean_rss, profile.baseline[link]);
    result.deltas.emplace(link, delta);
    if (delta > params.tau) result.active.insert(link);
  }
  return result;
}

DeviceBasedDetector::DeviceBasedDetector(const Topology& topology, std::span<const std::size_t> links, int zone_order)
    : links_(links.begin(), links.end()) {
  ellipses_.reserve(links_.size());
  for (auto link : links_) ellipses_.push_back(ellipse_of(topology.radio_link(link), zone_order));
}

std::set<std::size_t> DeviceBasedDetector::detect(std::span<const DeviceBasedFix> fixes) const {
  std::set<std::size_t> active;
  for (std::size_t i = 0; i < links_.size(); ++i) {
    const bool hit = std::any_of(fixes.begin(), fixes.end(), [&](const DeviceBasedFix& f) { return contains(ellipses_[i], f.pos); });
    if (hit) active.insert(links_[i]);
  }
  return active;
}

std::set<std::size_t> detect_device_based(std::span<const DeviceBasedFix> fixes, const Topology& topology,
                                          const DetectorParams& params) {
  std::vector<std::size_t> all(topology.link_count());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return DeviceBasedDetector(topology, all, params.zone_order).detect(fixes);
}

bool detect_guests(const ActiveLinkSets& sets) {
  return std::any_of(sets.device_free.begin(), sets.device_free.end(),
                     [&](std::size_t link) { return !sets.device_based.contains(link); });
}

}  // namespace radiographer
