#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "radiographer/fingerprint.hpp"

namespace radiographer {

struct TestVector {
  std::int64_t epoch = 0;
  std::vector<double> rss;  // fingerprint link order, missing links at kRssFloor
};

struct LocationEstimate {
  CellIndex cell;
  Point2D center;
  double distance = 0.0;  // Euclidean, in dB
};

/// Nearest record in signal space. Ties go to the lowest row-major cell index.
/// Throws PipelineError on an empty store or a length mismatch.
LocationEstimate localize(const Fingerprint& fp, const TestVector& t);

double localization_error(const LocationEstimate& estimate, const Point2D& truth);

/// Builds a test vector for `links` (topology link indices in store order),
/// imputing the floor value for links without samples.
TestVector make_test_vector(const EpochWindows& epoch, std::span<const std::size_t> links);

/// Test-vector CSV: optional header `epoch,<link names...>`, then `epoch,rss_1,...,rss_k`.
/// With a header, columns are matched to `links` by name; without one the row must
/// have exactly links.size() values. Empty fields take the floor value.
std::vector<TestVector> parse_test_vectors(std::istream& in, std::span<const std::string> links,
                                           const std::string& source = "<vectors>");
std::vector<TestVector> load_test_vectors(const std::filesystem::path& path, std::span<const std::string> links);
void write_test_vectors(std::ostream& out, std::span<const std::string> links, std::span<const TestVector> vectors);

}  // namespace radiographer
