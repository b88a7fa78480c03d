#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "radiographer/locator.hpp"
#include "radiographer/pipeline.hpp"
#include "radiographer/simulator.hpp"

namespace radiographer {

struct ConfusionCounts {
  std::size_t stored_correct = 0;
  std::size_t stored_wrong = 0;
  std::size_t discarded_correct = 0;
  std::size_t discarded_wrong = 0;

  std::size_t total() const { return stored_correct + stored_wrong + discarded_correct + discarded_wrong; }
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

struct PrecisionRecall {
  std::optional<double> precision;  // nullopt when nothing was stored
  std::optional<double> recall;     // nullopt when nothing was expected to be stored
  ConfusionCounts counts;
};

/// Scores stored/discarded decisions against the labels; skipped epochs are not
/// decisions and are ignored. Throws PipelineError for a decided epoch without a label.
PrecisionRecall precision_recall(std::span<const EpochDecision> decisions, const std::map<std::int64_t, EpochLabel>& labels);

std::map<std::int64_t, EpochLabel> index_labels(std::span<const EpochLabel> labels);
std::set<std::int64_t> silence_epochs(std::span<const EpochLabel> labels);

/// Spearman rank correlation with average ranks for ties; nullopt if either side is constant.
std::optional<double> spearman(std::span<const double> x, std::span<const double> y);

enum class Trend { increasing, decreasing, flat, insufficient_points };
std::string to_string(Trend trend);

/// Direction of `metric` against `values` from the sign of Spearman's rho; undefined
/// metric points are skipped.
Trend trend_of(std::span<const double> values, std::span<const std::optional<double>> metric);

enum class SweepParameter { tau, zone_order, stream_density };
SweepParameter parse_sweep_parameter(const std::string& text);
std::string to_string(SweepParameter parameter);
/// Defaults used by the CLI: tau 0..0.25 step 0.025, zone order 1..9, density {0.5, 1}.
std::vector<double> default_sweep_values(SweepParameter parameter);

struct SweepSpec {
  SweepParameter parameter = SweepParameter::tau;
  std::vector<double> values;  // stream density as a fraction: 0.5 = half, 1 = full
  PipelineOptions fixed;       // everything that is not swept
};

/// Throws InputError if the values are empty or outside the supported ranges.
void validate(const SweepSpec& spec);

struct SweepRow {
  double value;
  PrecisionRecall metrics;
};

struct SweepResult {
  SweepParameter parameter;
  std::vector<SweepRow> rows;  // in the order of spec.values
  Trend precision_trend;
  Trend recall_trend;
  std::optional<double> precision_rho;
  std::optional<double> recall_rho;
};

/// One pipeline run per value, run concurrently. A failing run aborts the sweep with
/// a PipelineError naming the value.
SweepResult run_sweep(const SweepSpec& spec, const Topology& topology, std::span<const EpochWindows> epochs,
                      std::span<const EpochLabel> labels);

void write_sweep_csv(std::ostream& out, const SweepResult& result);
void write_sweep_verdict(std::ostream& out, const SweepResult& result);

/// Site-survey stand-in: for every grid cell, the noise-free RSS with one person at
/// the cell center, over `links` (topology indices, store order).
Fingerprint build_manual_fingerprint(const Topology& topology, std::span<const std::size_t> links, const Grid& grid,
                                     const PropagationParams& prop, const DetectorParams& params);

struct LabeledTestVector {
  TestVector vector;
  Point2D truth;
};

struct FingerprintComparison {
  std::vector<double> crowdsourced_errors;  // sorted ascending
  std::vector<double> manual_errors;
  double crowdsourced_median = 0.0;
  double manual_median = 0.0;
  double median_gap = 0.0;  // crowdsourced - manual
};

/// Throws PipelineError if the stores disagree on grid or link ordering.
FingerprintComparison compare_fingerprints(const Fingerprint& crowdsourced, const Fingerprint& manual,
                                           std::span<const LabeledTestVector> tests);

double median(std::vector<double> values);

/// Empirical CDF: (sorted error, (i+1)/n).
std::vector<std::pair<double, double>> cdf(std::vector<double> errors);
void write_cdf_csv(std::ostream& out, std::span<const std::pair<double, double>> table);

}  // namespace radiographer
