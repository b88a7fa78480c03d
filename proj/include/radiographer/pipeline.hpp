#pragma once

#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "radiographer/detection.hpp"
#include "radiographer/fingerprint.hpp"
#include "radiographer/ingest.hpp"

namespace radiographer {

/// Which links feed detection and the fingerprint. `half` keeps links whose AP and
/// MP ordinals have equal parity, so every AP and every MP keeps half its streams.
enum class StreamDensity { full, half };

StreamDensity parse_stream_density(const std::string& text);
std::string to_string(StreamDensity density);
double density_fraction(StreamDensity density);
StreamDensity density_from_fraction(double fraction);

std::vector<std::size_t> select_links(const Topology& topology, StreamDensity density);

struct PipelineOptions {
  DetectorParams detector;
  double cell_size = kDefaultCellSize;
  StreamDensity density = StreamDensity::full;
};

enum class EpochOutcome { stored, discarded_guest, skipped_no_fixes, skipped_silence };
std::string to_string(EpochOutcome outcome);

struct EpochDecision {
  std::int64_t epoch;
  EpochOutcome outcome;
  ActiveLinkSets sets;  // empty for silence epochs
};

struct BuildReport {
  std::size_t epochs = 0;
  std::size_t stored = 0;
  std::size_t discarded_guest = 0;
  std::size_t skipped_no_fixes = 0;
  std::size_t skipped_silence = 0;
};

struct BuildResult {
  Fingerprint fingerprint;
  std::vector<EpochDecision> decisions;
  BuildReport report;
};

/// Offline phase: silence baseline -> per-epoch device-free and device-based link
/// detection -> comparator -> fingerprint update, in epoch order.
BuildResult build_fingerprint(const Topology& topology, std::span<const EpochWindows> epochs,
                              const std::set<std::int64_t>& silence_epochs, const PipelineOptions& options);

/// The epoch's per-link means in the order of `links`.
EpochVector epoch_vector(const EpochWindows& epoch, std::span<const std::size_t> links);

}  // namespace radiographer
