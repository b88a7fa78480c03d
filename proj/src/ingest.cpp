#include "radiographer/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <set>
#include <unordered_map>

#include "radiographer/errors.hpp"
#include "radiographer/numfmt.hpp"
#include "text.hpp"

namespace radiographer {

namespace {

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  return in;
}

std::string describe(const Point2D& p) { return "(" + format_number(p.x) + ", " + format_number(p.y) + ")"; }

std::string link_key(std::string_view ap, std::string_view mp) {
  std::string key(ap);
  key.push_back('\0');
  key.append(mp);
  return key;
}

template <typename F>
auto parse_field(const std::string& source, std::size_t line, std::string_view what, F&& f) {
  try {
    return f();
  } catch (const std::invalid_argument& e) {
    throw ParseError(source, line, std::string(what) + ": " + e.what());
  }
}

bool is_header(std::string_view line, std::string_view first_column) {
  return line.substr(0, first_column.size()) == first_column;
}

}  // namespace

std::string Topology::link_name(std::size_t link) const {
  const auto& ref = links.at(link);
  return nodes[ref.ap].id + ":" + nodes[ref.mp].id;
}

RadioLink Topology::radio_link(std::size_t link) const {
  const auto& ref = links.at(link);
  return RadioLink(nodes[ref.ap].id, nodes[ref.mp].id, nodes[ref.ap].pos, nodes[ref.mp].pos, frequency);
}

std::optional<std::size_t> Topology::find_node(const std::string& id) const {
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i].id == id) return i;
  return std::nullopt;
}

std::optional<std::size_t> Topology::find_link(const std::string& ap, const std::string& mp) const {
  for (std::size_t i = 0; i < links.size(); ++i)
    if (nodes[links[i].ap].id == ap && nodes[links[i].mp].id == mp) return i;
  return std::nullopt;
}

Topology make_topology(double width, double height, double frequency, std::vector<Node> nodes,
                       std::vector<std::pair<std::string, std::string>> explicit_links, std::vector<Room> rooms) {
  Topology t;
  t.width = width;
  t.height = height;
  t.frequency = frequency;
  t.nodes = std::move(nodes);
  t.rooms = std::move(rooms);

  if (!(std::isfinite(width) && width > 0.0 && std::isfinite(height) && height > 0.0))
    throw ValidationError("floor dimensions must be positive");
  if (!(std::isfinite(frequency) && frequency > 0.0)) throw ValidationError("frequency must be positive");

  std::set<std::string> ids;
  std::size_t aps = 0, mps = 0;
  for (const auto& node : t.nodes) {
    if (!ids.insert(node.id).second) throw ValidationError("duplicate node id '" + node.id + "'");
    if (!t.in_bounds(node.pos)) throw ValidationError("node '" + node.id + "' at " + describe(node.pos) + " is outside the floor");
    (node.kind == NodeKind::AP ? aps : mps) += 1;
  }
  if (aps == 0) throw ValidationError("topology needs at least one AP");
  if (mps == 0) throw ValidationError("topology needs at least one MP");

  if (explicit_links.empty()) {
    for (std::size_t a = 0; a < t.nodes.size(); ++a) {
      if (t.nodes[a].kind != NodeKind::AP) continue;
      for (std::size_t m = 0; m < t.nodes.size(); ++m)
        if (t.nodes[m].kind == NodeKind::MP) t.links.push_back({a, m});
    }
  } else {
    t.explicit_links = true;
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (const auto& [ap, mp] : explicit_links) {
      const auto a = t.find_node(ap);
      const auto m = t.find_node(mp);
      if (!a || t.nodes[*a].kind != NodeKind::AP) throw ValidationError("link " + ap + ":" + mp + ": '" + ap + "' is not an AP");
      if (!m || t.nodes[*m].kind != NodeKind::MP) throw ValidationError("link " + ap + ":" + mp + ": '" + mp + "' is not an MP");
      if (!seen.insert({*a, *m}).second) throw ValidationError("duplicate link " + ap + ":" + mp);
      t.links.push_back({*a, *m});
    }
  }
  for (std::size_t i = 0; i < t.links.size(); ++i) {
    if (t.nodes[t.links[i].ap].pos == t.nodes[t.links[i].mp].pos)
      throw ValidationError("link " + t.link_name(i) + " has zero length");
  }

  std::set<std::string> room_ids;
  for (const auto& room : t.rooms) {
    if (!room_ids.insert(room.id).second) throw ValidationError("duplicate room id '" + room.id + "'");
    if (!(room.lo.x < room.hi.x && room.lo.y < room.hi.y)) throw ValidationError("room '" + room.id + "' is empty");
    if (!t.in_bounds(room.lo) || !t.in_bounds(room.hi)) throw ValidationError("room '" + room.id + "' exceeds the floor");
  }
  return t;
}

Topology parse_topology(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t line_no = 0;
  if (!text::next_content_line(in, line, line_no)) throw ParseError(source, line_no, "missing header 'width height frequency_hz'");

  auto header = text::split_ws(line);
  if (header.size() != 3) throw ParseError(source, line_no, "header must be 'width height frequency_hz'");
  const double width = parse_field(source, line_no, "width", [&] { return parse_number(header[0]); });
  const double height = parse_field(source, line_no, "height", [&] { return parse_number(header[1]); });
  const double freq = parse_field(source, line_no, "frequency", [&] { return parse_number(header[2]); });

  std::vector<Node> nodes;
  std::vector<std::pair<std::string, std::string>> links;
  std::vector<Room> rooms;
  while (text::next_content_line(in, line, line_no)) {
    const auto tok = text::split_ws(line);
    if (tok[0] == "link") {
      if (tok.size() != 3) throw ParseError(source, line_no, "expected 'link ap_id mp_id'");
      links.emplace_back(std::string(tok[1]), std::string(tok[2]));
    } else if (tok[0] == "room") {
      if (tok.size() != 6) throw ParseError(source, line_no, "expected 'room id x0 y0 x1 y1'");
      Room room{std::string(tok[1]), {}, {}};
      parse_field(source, line_no, "room bounds", [&] {
        room.lo = {parse_number(tok[2]), parse_number(tok[3])};
        room.hi = {parse_number(tok[4]), parse_number(tok[5])};
        return 0;
      });
      rooms.push_back(std::move(room));
    } else {
      if (tok.size() != 4) throw ParseError(source, line_no, "expected 'id kind x y'");
      NodeKind kind;
      if (tok[1] == "AP") kind = NodeKind::AP;
      else if (tok[1] == "MP") kind = NodeKind::MP;
      else throw ParseError(source, line_no, "node kind must be AP or MP, got '" + std::string(tok[1]) + "'");
      const Point2D pos = parse_field(source, line_no, "node position",
                                      [&] { return Point2D{parse_number(tok[2]), parse_number(tok[3])}; });
      nodes.push_back({std::string(tok[0]), kind, pos});
    }
  }
  try {
    return make_topology(width, height, freq, std::move(nodes), std::move(links), std::move(rooms));
  } catch (const ValidationError& e) {
    throw ValidationError(source + ": " + e.what());
  }
}

Topology load_topology(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_topology(in, path.string());
}

void write_topology(std::ostream& out, const Topology& t) {
  out << format_number(t.width) << ' ' << format_number(t.height) << ' ' << format_number(t.frequency) << '\n';
  for (const auto& node : t.nodes) {
    out << node.id << ' ' << (node.kind == NodeKind::AP ? "AP" : "MP") << ' ' << format_number(node.pos.x) << ' '
        << format_number(node.pos.y) << '\n';
  }
  if (t.explicit_links) {
    for (const auto& link : t.links) out << "link " << t.nodes[link.ap].id << ' ' << t.nodes[link.mp].id << '\n';
  }
  for (const auto& room : t.rooms) {
    out << "room " << room.id << ' ' << format_number(room.lo.x) << ' ' << format_number(room.lo.y) << ' '
        << format_number(room.hi.x) << ' ' << format_number(room.hi.y) << '\n';
  }
}

std::vector<RssSample> parse_rss_samples(std::istream& in, const Topology& topology, const std::string& source) {
  std::vector<RssSample> samples;
  std::string line;
  std::size_t line_no = 0;
  bool first = true;
  while (text::next_content_line(in, line, line_no)) {
    if (first && is_header(line, "timestamp")) {
      first = false;
      continue;
    }
    first = false;
    const auto cols = text::split_csv(line);
    if (cols.size() != 4) throw ParseError(source, line_no, "expected 'timestamp,ap_id,mp_id,rss_dbm'");
    RssSample s{};
    s.timestamp = parse_field(source, line_no, "timestamp", [&] { return parse_number(cols[0]); });
    s.ap = std::string(cols[1]);
    s.mp = std::string(cols[2]);
    s.rss = parse_field(source, line_no, "rss", [&] { return parse_number(cols[3]); });
    if (!topology.find_link(s.ap, s.mp)) throw ValidationError(source + ":" + std::to_string(line_no) + ": unknown link " + s.ap + ":" + s.mp);
    if (!(s.rss >= -100.0 && s.rss <= 0.0))
      throw ValidationError(source + ":" + std::to_string(line_no) + ": rss " + format_number(s.rss) + " outside [-100, 0] dBm");
    samples.push_back(std::move(s));
  }
  return samples;
}

std::vector<RssSample> load_rss_samples(const std::filesystem::path& path, const Topology& topology) {
  auto in = open_input(path);
  return parse_rss_samples(in, topology, path.string());
}

void write_rss_samples(std::ostream& out, std::span<const RssSample> samples) {
  out << "timestamp,ap_id,mp_id,rss_dbm\n";
  for (const auto& s : samples)
    out << format_number(s.timestamp) << ',' << s.ap << ',' << s.mp << ',' << format_number(s.rss) << '\n';
}

std::vector<DeviceBasedFix> parse_fixes(std::istream& in, const Topology& topology, const std::string& source) {
  std::vector<DeviceBasedFix> fixes;
  std::string line;
  std::size_t line_no = 0;
  bool first = true;
  while (text::next_content_line(in, line, line_no)) {
    if (first && is_header(line, "timestamp")) {
      first = false;
      continue;
    }
    first = false;
    const auto cols = text::split_csv(line);
    if (cols.size() != 4) throw ParseError(source, line_no, "expected 'timestamp,user_id,x,y'");
    DeviceBasedFix f{};
    f.timestamp = parse_field(source, line_no, "timestamp", [&] { return parse_number(cols[0]); });
    f.user = std::string(cols[1]);
    f.pos = parse_field(source, line_no, "position", [&] { return Point2D{parse_number(cols[2]), parse_number(cols[3])}; });
    if (!topology.in_bounds(f.pos))
      throw ValidationError(source + ":" + std::to_string(line_no) + ": fix " + describe(f.pos) + " is outside the floor");
    fixes.push_back(std::move(f));
  }
  return fixes;
}

std::vector<DeviceBasedFix> load_fixes(const std::filesystem::path& path, const Topology& topology) {
  auto in = open_input(path);
  return parse_fixes(in, topology, path.string());
}

void write_fixes(std::ostream& out, std::span<const DeviceBasedFix> fixes) {
  out << "timestamp,user_id,x,y\n";
  for (const auto& f : fixes)
    out << format_number(f.timestamp) << ',' << f.user << ',' << format_number(f.pos.x) << ',' << format_number(f.pos.y) << '\n';
}

std::int64_t epoch_of(double timestamp, double epoch_len) {
  return static_cast<std::int64_t>(std::floor(timestamp / epoch_len));
}

std::vector<EpochWindows> windowize(const Topology& topology, std::span<const RssSample> samples,
                                    std::span<const DeviceBasedFix> fixes, double epoch_len) {
  if (!(epoch_len > 0.0)) throw InputError("epoch length must be positive");
  for (std::size_t i = 1; i < samples.size(); ++i) {
    if (samples[i].timestamp < samples[i - 1].timestamp)
      throw InputError("RSS stream out of order at sample " + std::to_string(i) + " (timestamp " +
                       format_number(samples[i].timestamp) + " after " + format_number(samples[i - 1].timestamp) + ")");
  }
  for (std::size_t i = 1; i < fixes.size(); ++i) {
    if (fixes[i].timestamp < fixes[i - 1].timestamp)
      throw InputError("fix stream out of order at fix " + std::to_string(i) + " (timestamp " +
                       format_number(fixes[i].timestamp) + " after " + format_number(fixes[i - 1].timestamp) + ")");
  }

  std::unordered_map<std::string, std::size_t> link_index;
  for (std::size_t i = 0; i < topology.links.size(); ++i)
    link_index.emplace(link_key(topology.nodes[topology.links[i].ap].id, topology.nodes[topology.links[i].mp].id), i);

  // Running mean: exact for constant streams, unlike sum / n.
  struct Accumulator {
    double mean = 0.0;
    std::size_t count = 0;
  };
  std::vector<EpochWindows> out;
  std::map<std::size_t, Accumulator> acc;
  auto flush = [&](std::int64_t epoch) {
    EpochWindows w{epoch, {}, {}};
    for (const auto& [link, a] : acc)
      w.links.emplace(link, RssWindow{epoch, link, a.mean, a.count});
    out.push_back(std::move(w));
    acc.clear();
  };

  std::optional<std::int64_t> current;
  for (const auto& s : samples) {
    const auto it = link_index.find(link_key(s.ap, s.mp));
    if (it == link_index.end()) throw InputError("sample on unknown link " + s.ap + ":" + s.mp);
    const auto epoch = epoch_of(s.timestamp, epoch_len);
    if (current && *current != epoch) flush(*current);
    current = epoch;
    auto& a = acc[it->second];
    a.count += 1;
    a.mean += (s.rss - a.mean) / static_cast<double>(a.count);
  }
  if (current) flush(*current);

  // Both streams are sorted, so a single merge pass attaches fixes.
  std::size_t w = 0;
  for (const auto& f : fixes) {
    const auto epoch = epoch_of(f.timestamp, epoch_len);
    while (w < out.size() && out[w].epoch < epoch) ++w;
    if (w == out.size()) break;
    if (out[w].epoch == epoch) out[w].fixes.push_back(f);
  }
  return out;
}

}  // namespace radiographer
