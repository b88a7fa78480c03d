#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "radiographer/detection.hpp"
#include "radiographer/pipeline.hpp"
#include "radiographer/simulator.hpp"

namespace radiographer {

/// Everything a CLI run needs. Read from a flat `key = value` file; relative paths
/// resolve against the config file's directory.
struct RunConfig {
  std::filesystem::path topology;
  std::filesystem::path dataset;  // directory with rss.csv, fixes.csv, manifest.csv; empty = out
  std::filesystem::path out = "out";

  DetectorParams detector;
  double cell_size = kDefaultCellSize;
  double epoch_len = kDefaultEpochLength;
  StreamDensity density = StreamDensity::full;

  PropagationParams propagation;
  double rate = 3.0;
  SuiteParams suite;
  int test_points = 27;
  double test_duration = 4.0;
  std::uint64_t seed = 1;

  std::filesystem::path dataset_dir() const { return dataset.empty() ? out : dataset; }
  PipelineOptions pipeline() const { return {detector, cell_size, density}; }
  SimulationOptions simulation() const { return {rate, epoch_len, cell_size}; }
};

/// Throws InputError on unknown keys, malformed values, or violated invariants.
RunConfig parse_config(std::istream& in, const std::filesystem::path& base_dir, const std::string& source = "<config>");
RunConfig load_config(const std::filesystem::path& path);

/// Checks cross-field invariants after CLI overrides are applied.
void validate(const RunConfig& config);

/// Canonical `key = value` listing of every parameter (paths excluded), used in run reports.
void write_config(std::ostream& out, const RunConfig& config);

}  // namespace radiographer
