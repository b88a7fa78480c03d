#include "radiographer/fingerprint.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <stdexcept>

#include "radiographer/errors.hpp"
#include "radiographer/numfmt.hpp"
#include "text.hpp"

namespace radiographer {

namespace {

int cells_along(double extent, double cell_size) {
  // Guards against 1.1 / 0.55 = 2.0000000000000004 producing a spurious extra cell.
  const double ratio = extent / cell_size;
  const double rounded = std::round(ratio);
  const double n = std::abs(ratio - rounded) <= 1e-9 * std::max(1.0, rounded) ? rounded : std::ceil(ratio);
  return std::max(1, static_cast<int>(n));
}

int locate(double offset, double cell_size, int n) {
  int i = static_cast<int>(std::floor(offset / cell_size));
  i = std::clamp(i, 0, n - 1);
  // Cell edges are i * cell_size in floating point; fix up the division's rounding.
  while (i + 1 < n && offset >= (i + 1) * cell_size) ++i;
  while (i > 0 && offset < i * cell_size) --i;
  return i;
}

}  // namespace

Grid make_grid(double width, double height, double cell_size) {
  if (!(std::isfinite(cell_size) && cell_size > 0.0)) throw InputError("cell_size must be positive");
  if (!(width > 0.0 && height > 0.0)) throw InputError("grid extent must be positive");
  return Grid{{0.0, 0.0}, cell_size, cells_along(width, cell_size), cells_along(height, cell_size), width, height};
}

Grid make_grid(const Topology& topology, double cell_size) { return make_grid(topology.width, topology.height, cell_size); }

CellIndex cell_of(const Grid& grid, const Point2D& p) {
  const double dx = p.x - grid.origin.x;
  const double dy = p.y - grid.origin.y;
  if (!(dx >= 0.0 && dx <= grid.width && dy >= 0.0 && dy <= grid.height))
    throw std::out_of_range("point (" + format_number(p.x) + ", " + format_number(p.y) + ") is outside the grid");
  return {locate(dx, grid.cell_size, grid.n_cols), locate(dy, grid.cell_size, grid.n_rows)};
}

Fingerprint::Fingerprint(Grid grid, std::vector<std::string> links, DetectorParams params_used)
    : grid_(grid), links_(std::move(links)), params_(params_used) {}

void Fingerprint::fold(const CellIndex& cell, const EpochVector& rss) {
  if (rss.size() != links_.size())
    throw PipelineError("epoch vector has " + std::to_string(rss.size()) + " links, store has " + std::to_string(links_.size()));
  if (cell.col < 0 || cell.col >= grid_.n_cols || cell.row < 0 || cell.row >= grid_.n_rows)
    throw std::out_of_range("cell outside the grid");

  auto [it, inserted] = records_.try_emplace(grid_.linear(cell));
  auto& record = it->second;
  if (inserted) {
    record.cell = cell;
    record.mean_rss.assign(links_.size(), kRssFloor);
    record.entry_counts.assign(links_.size(), 0);
  }
  record.count += 1;
  for (std::size_t j = 0; j < rss.size(); ++j) {
    if (!rss[j]) continue;
    auto& n = record.entry_counts[j];
    n += 1;
    if (n == 1) record.mean_rss[j] = *rss[j];
    else record.mean_rss[j] += (*rss[j] - record.mean_rss[j]) / static_cast<double>(n);
  }
}

UpdateOutcome Fingerprint::update(const EpochVector& rss, std::span<const DeviceBasedFix> fixes, const ActiveLinkSets& sets) {
  if (fixes.empty()) return UpdateOutcome::skipped_no_fixes;
  if (detect_guests(sets)) {
    ++discarded_;
    return UpdateOutcome::discarded_guest;
  }
  std::set<CellIndex> cells;
  for (const auto& fix : fixes) cells.insert(cell_of(grid_, fix.pos));
  for (const auto& cell : cells) fold(cell, rss);
  ++stored_;
  return UpdateOutcome::stored;
}

void write_fingerprint(std::ostream& out, const Fingerprint& fp) {
  const auto& g = fp.grid();
  out << "radiographer-fingerprint 1\n";
  out << "grid " << format_number(g.origin.x) << ' ' << format_number(g.origin.y) << ' ' << format_number(g.cell_size) << ' '
      << g.n_cols << ' ' << g.n_rows << ' ' << format_number(g.width) << ' ' << format_number(g.height) << '\n';
  out << "links " << fp.link_count();
  for (const auto& name : fp.links()) out << ' ' << name;
  out << '\n';
  out << "params " << format_number(fp.params_used().tau) << ' ' << fp.params_used().zone_order << '\n';
  out << "epochs " << fp.stored_epochs() << ' ' << fp.discarded_epochs() << '\n';
  out << "records " << fp.records().size() << '\n';
  for (const auto& [index, r] : fp.records()) {
    const auto c = g.center(r.cell);
    out << r.cell.col << ' ' << r.cell.row << ' ' << format_number(c.x) << ' ' << format_number(c.y) << ' ' << r.count;
    for (double v : r.mean_rss) out << ' ' << format_number(v);
    for (auto n : r.entry_counts) out << ' ' << n;
    out << '\n';
  }
}

Fingerprint read_fingerprint(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t line_no = 0;
  auto expect = [&](std::string_view keyword, std::size_t min_tokens) {
    if (!text::next_content_line(in, line, line_no)) throw ParseError(source, line_no, "missing '" + std::string(keyword) + "' line");
    auto tok = text::split_ws(line);
    if (tok.empty() || tok[0] != keyword || tok.size() < min_tokens)
      throw ParseError(source, line_no, "expected '" + std::string(keyword) + "' line");
    return tok;
  };
  auto guarded = [&](auto&& f) {
    try {
      return f();
    } catch (const std::invalid_argument& e) {
      throw ParseError(source, line_no, e.what());
    }
  };

  auto magic = expect("radiographer-fingerprint", 2);
  if (magic[1] != "1") throw ParseError(source, line_no, "unsupported fingerprint version");

  auto g = expect("grid", 8);
  Grid grid = guarded([&] {
    return Grid{{parse_number(g[1]), parse_number(g[2])},
                parse_number(g[3]),
                static_cast<int>(parse_integer(g[4])),
                static_cast<int>(parse_integer(g[5])),
                parse_number(g[6]),
                parse_number(g[7])};
  });
  if (!(grid.cell_size > 0.0 && grid.n_cols > 0 && grid.n_rows > 0)) throw ParseError(source, line_no, "invalid grid geometry");

  auto l = expect("links", 2);
  const auto k = static_cast<std::size_t>(guarded([&] { return parse_integer(l[1]); }));
  if (l.size() != k + 2) throw ParseError(source, line_no, "link count does not match the listed links");
  std::vector<std::string> links;
  for (std::size_t j = 0; j < k; ++j) links.emplace_back(l[j + 2]);

  auto p = expect("params", 3);
  DetectorParams params = guarded([&] { return DetectorParams{parse_number(p[1]), static_cast<int>(parse_integer(p[2]))}; });

  auto e = expect("epochs", 3);
  const auto stored = guarded([&] { return parse_integer(e[1]); });
  const auto discarded = guarded([&] { return parse_integer(e[2]); });

  auto rc = expect("records", 2);
  const auto n_records = guarded([&] { return parse_integer(rc[1]); });

  Fingerprint fp(grid, std::move(links), params);
  fp.stored_ = static_cast<std::size_t>(stored);
  fp.discarded_ = static_cast<std::size_t>(discarded);
  for (long long i = 0; i < n_records; ++i) {
    if (!text::next_content_line(in, line, line_no)) throw ParseError(source, line_no, "truncated record list");
    auto tok = text::split_ws(line);
    if (tok.size() != 5 + 2 * k) throw ParseError(source, line_no, "record must have " + std::to_string(5 + 2 * k) + " fields");
    FingerprintRecord r;
    guarded([&] {
      r.cell = {static_cast<int>(parse_integer(tok[0])), static_cast<int>(parse_integer(tok[1]))};
      r.count = static_cast<std::size_t>(parse_integer(tok[4]));
      for (std::size_t j = 0; j < k; ++j) r.mean_rss.push_back(parse_number(tok[5 + j]));
      for (std::size_t j = 0; j < k; ++j) r.entry_counts.push_back(static_cast<std::size_t>(parse_integer(tok[5 + k + j])));
      return 0;
    });
    if (r.cell.col < 0 || r.cell.col >= grid.n_cols || r.cell.row < 0 || r.cell.row >= grid.n_rows)
      throw ParseError(source, line_no, "record cell outside the grid");
    if (r.count == 0) throw ParseError(source, line_no, "record count must be >= 1");
    if (!fp.records_.emplace(grid.linear(r.cell), std::move(r)).second) throw ParseError(source, line_no, "duplicate record cell");
  }
  return fp;
}

void save_fingerprint(const std::filesystem::path& path, const Fingerprint& fp) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  write_fingerprint(out, fp);
}

Fingerprint load_fingerprint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  return read_fingerprint(in, path.string());
}

}  // namespace radiographer
