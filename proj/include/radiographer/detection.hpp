#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <span>
#include <vector>

#include "radiographer/geometry.hpp"
#include "radiographer/ingest.hpp"

namespace radiographer {

struct DetectorParams {
  double tau = 0.055;  // relative RSS change that marks a link active
  int zone_order = 5;  // Fresnel zone used for device-based activation

  friend bool operator==(const DetectorParams&, const DetectorParams&) = default;
};

void validate(const DetectorParams& params);

/// Per-link RSS baseline measured while nobody is in the area.
struct SilenceProfile {
  std::vector<double> baseline;     // indexed by topology link
  std::vector<std::size_t> count;   // raw samples pooled into each baseline
};

/// Pools every silence-epoch sample per link. Throws PipelineError naming the first
/// link without silence data, or whose baseline is zero.
SilenceProfile build_silence_profile(const Topology& topology, std::span<const EpochWindows> silence_epochs);

struct ActiveLinkSets {
  std::set<std::size_t> device_free;   // links whose RSS moved away from silence
  std::set<std::size_t> device_based;  // links a host fix explains
  std::map<std::size_t, double> deltas;
};

struct DeviceFreeResult {
  std::set<std::size_t> active;
  std::map<std::size_t, double> deltas;
};

double relative_change(double mean_rss, double baseline);

/// A link is active when |(mean - baseline) / baseline| > tau. Links absent from
/// the epoch are never active.
DeviceFreeResult detect_device_free(const std::map<std::size_t, RssWindow>& windows, const SilenceProfile& profile,
                                    const DetectorParams& params);

/// Caches one Fresnel ellipse per candidate link for a fixed zone order.
class DeviceBasedDetector {
 public:
  DeviceBasedDetector(const Topology& topology, std::span<const std::size_t> links, int zone_order);

  std::set<std::size_t> detect(std::span<const DeviceBasedFix> fixes) const;

 private:
  std::vector<std::size_t> links_;
  std::vector<FresnelEllipse> ellipses_;
};

/// Links (of all topology links) whose zone ellipse contains at least one fix.
std::set<std::size_t> detect_device_based(std::span<const DeviceBasedFix> fixes, const Topology& topology,
                                          const DetectorParams& params);

/// True when some device-free active link is not explained by a host.
bool detect_guests(const ActiveLinkSets& sets);

}  // namespace radiographer
