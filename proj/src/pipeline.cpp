#include "radiographer/pipeline.hpp"

#include <algorithm>

#include "radiographer/errors.hpp"
#include "radiographer/numfmt.hpp"

namespace radiographer {

StreamDensity parse_stream_density(const std::string& text) {
  if (text == "full") return StreamDensity::full;
  if (text == "half") return StreamDensity::half;
  throw InputError("stream_density must be 'full' or 'half', got '" + text + "'");
}

std::string to_string(StreamDensity density) { return density == StreamDensity::full ? "full" : "half"; }

double density_fraction(StreamDensity density) { return density == StreamDensity::full ? 1.0 : 0.5; }

StreamDensity density_from_fraction(double fraction) {
  if (fraction == 1.0) return StreamDensity::full;
  if (fraction == 0.5) return StreamDensity::half;
  throw InputError("stream density must be 0.5 (half) or 1 (full), got " + format_number(fraction));
}

std::vector<std::size_t> select_links(const Topology& topology, StreamDensity density) {
  std::vector<std::size_t> ap_ordinal(topology.nodes.size(), 0), mp_ordinal(topology.nodes.size(), 0);
  std::size_t aps = 0, mps = 0;
  for (std::size_t i = 0; i < topology.nodes.size(); ++i) {
    if (topology.nodes[i].kind == NodeKind::AP) ap_ordinal[i] = aps++;
    else mp_ordinal[i] = mps++;
  }
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < topology.links.size(); ++i) {
    const auto& l = topology.links[i];
    if (density == StreamDensity::full || ap_ordinal[l.ap] % 2 == mp_ordinal[l.mp] % 2) out.push_back(i);
  }
  return out;
}

std::string to_string(EpochOutcome outcome) {
  switch (outcome) {
    case EpochOutcome::stored: return "stored";
    case EpochOutcome::discarded_guest: return "discarded_guest";
    case EpochOutcome::skipped_no_fixes: return "skipped_no_fixes";
    case EpochOutcome::skipped_silence: return "skipped_silence";
  }
  return "unknown";
}

EpochVector epoch_vector(const EpochWindows& epoch, std::span<const std::size_t> links) {
  EpochVector v;
  v.reserve(links.size());
  for (auto link : links) {
    const auto it = epoch.links.find(link);
    v.push_back(it == epoch.links.end() ? std::nullopt : std::optional<double>(it->second.mean_rss));
  }
  return v;
}

BuildResult build_fingerprint(const Topology& topology, std::span<const EpochWindows> epochs,
                              const std::set<std::int64_t>& silence_epochs, const PipelineOptions& options) {
  validate(options.detector);
  const auto links = select_links(topology, options.density);
  std::vector<std::string> names;
  for (auto link : links) names.push_back(topology.link_name(link));

  std::vector<EpochWindows> silent;
  std::copy_if(epochs.begin(), epochs.end(), std::back_inserter(silent),
               [&](const EpochWindows& e) { return silence_epochs.contains(e.epoch); });
  const SilenceProfile profile = build_silence_profile(topology, silent);
  const DeviceBasedDetector device_based(topology, links, options.detector.zone_order);

  BuildResult result{Fingerprint(make_grid(topology, options.cell_size), names, options.detector), {}, {}};
  std::map<std::size_t, RssWindow> selected;
  for (const auto& epoch : epochs) {
    ++result.report.epochs;
    if (silence_epochs.contains(epoch.epoch)) {
      ++result.report.skipped_silence;
      result.decisions.push_back({epoch.epoch, EpochOutcome::skipped_silence, {}});
      continue;
    }
    selected.clear();
    for (auto link : links) {
      const auto it = epoch.links.find(link);
      if (it != epoch.links.end()) selected.emplace(link, it->second);
    }
    auto free = detect_device_free(selected, profile, options.detector);
    ActiveLinkSets sets{std::move(free.active), device_based.detect(epoch.fixes), std::move(free.deltas)};

    EpochOutcome outcome;
    switch (result.fingerprint.update(epoch_vector(epoch, links), epoch.fixes, sets)) {
      case UpdateOutcome::stored: outcome = EpochOutcome::stored, ++result.report.stored; break;
      case UpdateOutcome::discarded_guest: outcome = EpochOutcome::discarded_guest, ++result.report.discarded_guest; break;
      default: outcome = EpochOutcome::skipped_no_fixes, ++result.report.skipped_no_fixes; break;
    }
    result.decisions.push_back({epoch.epoch, outcome, std::move(sets)});
  }
  return result;
}

}  // namespace radiographer
