#include "radiographer/locator.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>

#include "radiographer/errors.hpp"
#include "radiographer/numfmt.hpp"
#include "text.hpp"

namespace radiographer {

LocationEstimate localize(const Fingerprint& fp, const TestVector& t) {
  if (fp.empty()) throw PipelineError("cannot localize against an empty fingerprint");
  if (t.rss.size() != fp.link_count())
    throw ValidationError("test vector has " + std::to_string(t.rss.size()) + " links, fingerprint has " +
                          std::to_string(fp.link_count()));

  const FingerprintRecord* best = nullptr;
  double best_sq = std::numeric_limits<double>::infinity();
  for (const auto& [index, record] : fp.records()) {  // row-major order
    double sq = 0.0;
    for (std::size_t j = 0; j < t.rss.size(); ++j) {
      const double d = t.rss[j] - record.mean_rss[j];
      sq += d * d;
    }
    if (sq < best_sq) {
      best_sq = sq;
      best = &record;
    }
  }
  return {best->cell, fp.grid().center(best->cell), std::sqrt(best_sq)};
}

double localization_error(const LocationEstimate& estimate, const Point2D& truth) { return distance(estimate.center, truth); }

TestVector make_test_vector(const EpochWindows& epoch, std::span<const std::size_t> links) {
  TestVector t{epoch.epoch, {}};
  t.rss.reserve(links.size());
  for (auto link : links) {
    const auto it = epoch.links.find(link);
    t.rss.push_back(it == epoch.links.end() ? kRssFloor : it->second.mean_rss);
  }
  return t;
}

std::vector<TestVector> parse_test_vectors(std::istream& in, std::span<const std::string> links, const std::string& source) {
  std::vector<TestVector> out;
  std::string line;
  std::size_t line_no = 0;
  // column_of[j] = CSV column holding link j
  std::vector<std::size_t> column_of(links.size());
  for (std::size_t j = 0; j < links.size(); ++j) column_of[j] = j + 1;
  std::optional<std::size_t> expected_columns;
  bool first = true;

  while (text::next_content_line(in, line, line_no)) {
    const auto cols = text::split_csv(line);
    if (first && cols[0] == "epoch") {
      first = false;
      expected_columns = cols.size();
      for (std::size_t j = 0; j < links.size(); ++j) {
        std::size_t found = 0;
        for (std::size_t c = 1; c < cols.size(); ++c)
          if (cols[c] == links[j]) found = c;
        if (found == 0) throw ValidationError(source + ": test vectors have no column for link " + links[j]);
        column_of[j] = found;
      }
      continue;
    }
    first = false;
    const std::size_t want = expected_columns.value_or(links.size() + 1);
    if (cols.size() != want)
      throw ValidationError(source + ":" + std::to_string(line_no) + ": expected " + std::to_string(want - 1) +
                            " rss values, got " + std::to_string(cols.size() - 1));
    TestVector t;
    try {
      t.epoch = parse_integer(cols[0]);
      for (std::size_t j = 0; j < links.size(); ++j) {
        const auto field = cols[column_of[j]];
        t.rss.push_back(field.empty() ? kRssFloor : parse_number(field));
      }
    } catch (const std::invalid_argument& e) {
      throw ParseError(source, line_no, e.what());
    }
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<TestVector> load_test_vectors(const std::filesystem::path& path, std::span<const std::string> links) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  return parse_test_vectors(in, links, path.string());
}

void write_test_vectors(std::ostream& out, std::span<const std::string> links, std::span<const TestVector> vectors) {
  out << "epoch";
  for (const auto& name : links) out << ',' << name;
  out << '\n';
  for (const auto& t : vectors) {
    out << t.epoch;
    for (double v : t.rss) out << ',' << format_number(v);
    out << '\n';
  }
}

}  // namespace radiographer
