#include "radiographer/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <tuple>

#include "radiographer/errors.hpp"
#include "radiographer/numfmt.hpp"
#include "text.hpp"

namespace radiographer {

namespace {

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

double mp_offset(const PropagationParams& prop, const std::string& mp) {
  const auto it = prop.mp_offset_db.find(mp);
  return it == prop.mp_offset_db.end() ? 0.0 : it->second;
}

void check_track(const Topology& topology, const Scenario& scenario, const std::string& who, const Track& track) {
  if (track.empty()) throw ValidationError("scenario " + scenario.id + ": track of '" + who + "' is empty");
  for (std::size_t i = 0; i < track.size(); ++i) {
    if (!topology.in_bounds(track[i].pos))
      throw ValidationError("scenario " + scenario.id + ": '" + who + "' leaves the floor at t=" + format_number(track[i].t));
    if (i > 0 && track[i].t < track[i - 1].t)
      throw ValidationError("scenario " + scenario.id + ": track of '" + who + "' is not time ordered");
  }
}

struct Zone {
  Point2D lo, hi;
};

std::pair<Zone, Zone> halves(const Room& room) {
  const double w = room.hi.x - room.lo.x;
  const double h = room.hi.y - room.lo.y;
  if (w >= h) {
    const double mid = room.lo.x + w / 2.0;
    return {{room.lo, {mid, room.hi.y}}, {{mid, room.lo.y}, room.hi}};
  }
  const double mid = room.lo.y + h / 2.0;
  return {{room.lo, {room.hi.x, mid}}, {{room.lo.x, mid}, room.hi}};
}

bool inside(const Zone& z, const Point2D& p) { return p.x >= z.lo.x && p.x <= z.hi.x && p.y >= z.lo.y && p.y <= z.hi.y; }

std::string numbered(std::string_view prefix, int i) {
  std::string n = std::to_string(i + 1);
  while (n.size() < 3) n.insert(n.begin(), '0');
  return std::string(prefix) + n;
}

Track static_track(const Point2D& p, double duration, double epoch_len) {
  Track track;
  const auto epochs = static_cast<int>(std::ceil(duration / epoch_len - 1e-9));
  for (int e = 0; e < epochs; ++e) track.push_back({(e + 0.5) * epoch_len, p});
  return track;
}

constexpr std::string_view kPrefixOneHost = "host-";
constexpr std::string_view kPrefixSameZone = "same-zone-";
constexpr std::string_view kPrefixDifferentZones = "diff-zone-";
constexpr std::string_view kPrefixDifferentRooms = "diff-room-";
constexpr std::string_view kPrefixSilence = "silence-";

}  // namespace

void validate(const PropagationParams& prop) {
  if (!(prop.noise_sigma >= 0.0)) throw InputError("noise_sigma must be >= 0");
  if (!(prop.path_loss_exponent > 0.0)) throw InputError("path_loss_exponent must be positive");
  for (std::size_t i = 1; i < prop.zone_attenuation.size(); ++i) {
    if (prop.zone_attenuation[i] > prop.zone_attenuation[i - 1])
      throw InputError("zone_attenuation must be non-increasing in zone order");
  }
  for (double a : prop.zone_attenuation)
    if (!(a >= 0.0)) throw InputError("zone_attenuation entries must be >= 0");
}

double free_space_rss(const RadioLink& link, const PropagationParams& prop) {
  return prop.tx_power_dbm - prop.ref_loss_db - 10.0 * prop.path_loss_exponent * std::log10(link.length()) +
         mp_offset(prop, link.mp());
}

double zone_perturbation(const RadioLink& link, const Point2D& person, const PropagationParams& prop) {
  for (std::size_t j = 0; j < prop.zone_attenuation.size(); ++j) {
    if (contains(ellipse_of(link, static_cast<int>(j) + 1), person)) return prop.zone_attenuation[j];
  }
  return 0.0;
}

double expected_rss(const Topology& topology, std::size_t link, std::span<const Point2D> people, const PropagationParams& prop) {
  const RadioLink radio = topology.radio_link(link);
  double rss = free_space_rss(radio, prop);
  for (const auto& p : people) rss -= zone_perturbation(radio, p, prop);
  return rss;
}

Point2D position_at(const Track& track, double t) {
  auto it = std::upper_bound(track.begin(), track.end(), t, [](double v, const TrackPoint& p) { return v < p.t; });
  return it == track.begin() ? track.front().pos : std::prev(it)->pos;
}

SimulatedData simulate_rss(const Topology& topology, const Scenario& scenario, const PropagationParams& prop,
                           const SimulationOptions& options, double start_time, std::uint64_t seed) {
  if (!(options.rate > 0.0)) throw InputError("sample rate must be positive");
  if (!(options.epoch_len > 0.0)) throw InputError("epoch length must be positive");
  if (!(scenario.duration > 0.0)) throw ValidationError("scenario " + scenario.id + ": duration must be positive");
  if (scenario.silence && (!scenario.host_tracks.empty() || !scenario.guest_tracks.empty()))
    throw ValidationError("silence scenario " + scenario.id + " has people in it");
  for (const auto& [who, track] : scenario.host_tracks) check_track(topology, scenario, who, track);
  for (const auto& [who, track] : scenario.guest_tracks) check_track(topology, scenario, who, track);

  const std::size_t k = topology.link_count();
  std::vector<RadioLink> radios;
  std::vector<double> clear;
  for (std::size_t i = 0; i < k; ++i) {
    radios.push_back(topology.radio_link(i));
    clear.push_back(free_space_rss(radios.back(), prop));
  }

  auto rng = make_rng(seed, 0);
  std::normal_distribution<double> noise(0.0, prop.noise_sigma > 0.0 ? prop.noise_sigma : 1.0);

  SimulatedData out;
  const auto ticks = static_cast<std::int64_t>(std::floor(scenario.duration * options.rate + 1e-9));
  std::vector<Point2D> people;
  for (std::int64_t j = 0; j < ticks; ++j) {
    const double rel = (static_cast<double>(j) + 0.5) / options.rate;
    people.clear();
    for (const auto& [who, track] : scenario.host_tracks) people.push_back(position_at(track, rel));
    for (const auto& [who, track] : scenario.guest_tracks) people.push_back(position_at(track, rel));
    for (std::size_t i = 0; i < k; ++i) {
      double rss = clear[i];
      for (const auto& p : people) rss -= zone_perturbation(radios[i], p, prop);
      if (prop.noise_sigma > 0.0) rss += noise(rng);
      rss = std::clamp(rss, -100.0, 0.0);
      out.samples.push_back({start_time + rel, radios[i].ap(), radios[i].mp(), rss});
    }
  }

  for (const auto& [who, track] : scenario.host_tracks)
    for (const auto& tp : track)
      if (tp.t >= 0.0 && tp.t < scenario.duration) out.fixes.push_back({start_time + tp.t, who, tp.pos});
  std::stable_sort(out.fixes.begin(), out.fixes.end(),
                   [](const DeviceBasedFix& a, const DeviceBasedFix& b) { return std::tie(a.timestamp, a.user) < std::tie(b.timestamp, b.user); });

  const Grid grid = make_grid(topology, options.cell_size);
  const auto first = epoch_of(start_time, options.epoch_len);
  const auto last = epoch_of(start_time + scenario.duration - 1e-9, options.epoch_len);
  std::size_t f = 0;
  for (auto e = first; e <= last; ++e) {
    EpochLabel label;
    label.scenario_id = scenario.id;
    label.epoch = e;
    label.silence = scenario.silence;
    while (f < out.fixes.size() && epoch_of(out.fixes[f].timestamp, options.epoch_len) < e) ++f;
    for (auto g = f; g < out.fixes.size() && epoch_of(out.fixes[g].timestamp, options.epoch_len) == e; ++g)
      label.host_cells.insert(cell_of(grid, out.fixes[g].pos));
    label.guest_present = !scenario.guest_tracks.empty();
    label.expected_stored = !label.guest_present && !label.host_cells.empty();
    out.labels.push_back(std::move(label));
  }
  return out;
}

SimulatedData simulate_suite(const Topology& topology, std::span<const Scenario> scenarios, const PropagationParams& prop,
                             const SimulationOptions& options) {
  SimulatedData all;
  std::int64_t next_epoch = 0;
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    const double start = static_cast<double>(next_epoch) * options.epoch_len;
    auto part = simulate_rss(topology, scenarios[i], prop, options, start, prop.seed ^ (0x9e3779b97f4a7c15ULL * (i + 1)));
    next_epoch += static_cast<std::int64_t>(std::ceil(scenarios[i].duration / options.epoch_len - 1e-9));
    std::move(part.samples.begin(), part.samples.end(), std::back_inserter(all.samples));
    std::move(part.fixes.begin(), part.fixes.end(), std::back_inserter(all.fixes));
    std::move(part.labels.begin(), part.labels.end(), std::back_inserter(all.labels));
  }
  return all;
}

std::vector<Scenario> standard_suite(const Topology& topology, const SuiteParams& params, const SimulationOptions& options) {
  if (topology.rooms.size() < 2) throw InputError("the standard suite needs a topology with at least two rooms");
  auto rng = make_rng(params.seed, 0x5c3a);
  const Grid grid = make_grid(topology, options.cell_size);

  std::vector<Point2D> centers;
  for (std::size_t i = 0; i < grid.cell_count(); ++i) {
    const auto c = grid.center(grid.cell_at(i));
    if (topology.in_bounds(c)) centers.push_back(c);
  }
  auto centers_in = [&](const Zone& z) {
    std::vector<Point2D> out;
    std::copy_if(centers.begin(), centers.end(), std::back_inserter(out), [&](const Point2D& p) { return inside(z, p); });
    if (out.empty()) throw InputError("a room zone contains no grid cell centers; reduce cell_size");
    return out;
  };
  auto pick = [&](const std::vector<Point2D>& from) {
    std::uniform_int_distribution<std::size_t> d(0, from.size() - 1);
    return from[d(rng)];
  };
  auto guest_in = [&](const Zone& z, const Point2D& host) {
    std::uniform_real_distribution<double> ux(z.lo.x, z.hi.x), uy(z.lo.y, z.hi.y);
    Point2D best{};
    double best_sep = -1.0;
    for (int attempt = 0; attempt < 1000; ++attempt) {
      const Point2D p{ux(rng), uy(rng)};
      const double sep = distance(p, host);
      if (sep >= params.min_separation) return p;
      if (sep > best_sep) best_sep = sep, best = p;
    }
    return best;
  };

  std::vector<Scenario> out;
  const double dur = params.scenario_duration;
  const double eps = options.epoch_len;
  for (int i = 0; i < params.silence; ++i)
    out.push_back({numbered(kPrefixSilence, i), ScenarioKind::silence, params.silence_duration, {}, {}, true});

  std::vector<Point2D> shuffled = centers;
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  shuffled.resize(std::min<std::size_t>(shuffled.size(), static_cast<std::size_t>(params.one_host)));
  std::sort(shuffled.begin(), shuffled.end(), [&](const Point2D& a, const Point2D& b) {
    return grid.linear(cell_of(grid, a)) < grid.linear(cell_of(grid, b));
  });
  for (std::size_t i = 0; i < shuffled.size(); ++i) {
    Scenario s{numbered(kPrefixOneHost, static_cast<int>(i)), ScenarioKind::one_host, dur, {}, {}, false};
    s.host_tracks.emplace("host1", static_track(shuffled[i], dur, eps));
    out.push_back(std::move(s));
  }

  const std::size_t n_rooms = topology.rooms.size();
  auto guest_scenario = [&](std::string id, ScenarioKind kind, const Zone& host_zone, const Zone& guest_zone) {
    const Point2D host = pick(centers_in(host_zone));
    const Point2D guest = guest_in(guest_zone, host);
    Scenario s{std::move(id), kind, dur, {}, {}, false};
    s.host_tracks.emplace("host1", static_track(host, dur, eps));
    s.guest_tracks.emplace("guest1", static_track(guest, dur, eps));
    out.push_back(std::move(s));
  };
  for (int i = 0; i < params.same_zone; ++i) {
    const auto [a, b] = halves(topology.rooms[i % n_rooms]);
    const Zone& z = (i / n_rooms) % 2 == 0 ? a : b;
    guest_scenario(numbered(kPrefixSameZone, i), ScenarioKind::same_zone, z, z);
  }
  for (int i = 0; i < params.different_zones; ++i) {
    const auto [a, b] = halves(topology.rooms[i % n_rooms]);
    const bool flip = (i / n_rooms) % 2 == 1;
    guest_scenario(numbered(kPrefixDifferentZones, i), ScenarioKind::different_zones, flip ? b : a, flip ? a : b);
  }
  for (int i = 0; i < params.different_rooms; ++i) {
    const Room& host_room = topology.rooms[i % n_rooms];
    const Room& guest_room = topology.rooms[(i + 1) % n_rooms];
    guest_scenario(numbered(kPrefixDifferentRooms, i), ScenarioKind::different_rooms, {host_room.lo, host_room.hi},
                   {guest_room.lo, guest_room.hi});
  }
  return out;
}

SuiteCounts count_scenarios(std::span<const Scenario> scenarios) {
  SuiteCounts c;
  for (const auto& s : scenarios) {
    switch (s.kind) {
      case ScenarioKind::one_host: ++c.one_host; break;
      case ScenarioKind::same_zone: ++c.same_zone; break;
      case ScenarioKind::different_zones: ++c.different_zones; break;
      case ScenarioKind::different_rooms: ++c.different_rooms; break;
      case ScenarioKind::silence: ++c.silence; break;
      case ScenarioKind::custom: break;
    }
  }
  return c;
}

SuiteCounts count_scenarios(std::span<const EpochLabel> labels) {
  SuiteCounts c;
  std::set<std::string> seen;
  for (const auto& l : labels) {
    if (!seen.insert(l.scenario_id).second) continue;
    const std::string_view id = l.scenario_id;
    if (id.starts_with(kPrefixOneHost)) ++c.one_host;
    else if (id.starts_with(kPrefixSameZone)) ++c.same_zone;
    else if (id.starts_with(kPrefixDifferentZones)) ++c.different_zones;
    else if (id.starts_with(kPrefixDifferentRooms)) ++c.different_rooms;
    else if (id.starts_with(kPrefixSilence)) ++c.silence;
  }
  return c;
}

std::vector<TestPoint> simulate_test_points(const Topology& topology, const PropagationParams& prop,
                                            const SimulationOptions& options, int count, double duration,
                                            std::uint64_t seed) {
  auto rng = make_rng(seed, 0x7e57);
  std::uniform_real_distribution<double> ux(0.0, topology.width), uy(0.0, topology.height);
  std::vector<TestPoint> out;
  std::int64_t next_epoch = 0;
  for (int i = 0; i < count; ++i) {
    const Point2D truth{ux(rng), uy(rng)};
    Scenario s{numbered("test-", i), ScenarioKind::custom, duration, {}, {}, false};
    s.guest_tracks.emplace("target", static_track(truth, duration, options.epoch_len));
    const double start = static_cast<double>(next_epoch) * options.epoch_len;
    const auto data = simulate_rss(topology, s, prop, options, start, seed ^ (0xd1b54a32d192ed03ULL * (i + 1)));

    std::vector<double> sum(topology.link_count(), 0.0);
    std::vector<std::size_t> n(topology.link_count(), 0);
    for (const auto& sample : data.samples) {
      const auto link = *topology.find_link(sample.ap, sample.mp);
      sum[link] += sample.rss;
      n[link] += 1;
    }
    TestPoint tp{next_epoch, truth, {}};
    for (std::size_t j = 0; j < sum.size(); ++j) tp.rss.push_back(n[j] ? sum[j] / static_cast<double>(n[j]) : kRssFloor);
    out.push_back(std::move(tp));
    next_epoch += static_cast<std::int64_t>(std::ceil(duration / options.epoch_len - 1e-9));
  }
  return out;
}

void write_manifest(std::ostream& out, std::span<const EpochLabel> labels) {
  out << "scenario_id,epoch,silence,host_cells,guest_present,expected_stored\n";
  for (const auto& l : labels) {
    out << l.scenario_id << ',' << l.epoch << ',' << (l.silence ? 1 : 0) << ',';
    if (l.host_cells.empty()) out << '-';
    bool first = true;
    for (const auto& c : l.host_cells) {
      if (!first) out << ';';
      out << c.col << ':' << c.row;
      first = false;
    }
    out << ',' << (l.guest_present ? 1 : 0) << ',' << (l.expected_stored ? 1 : 0) << '\n';
  }
}

std::vector<EpochLabel> read_manifest(std::istream& in, const std::string& source) {
  std::vector<EpochLabel> out;
  std::string line;
  std::size_t line_no = 0;
  bool first = true;
  auto flag = [&](std::string_view v) {
    if (v == "1") return true;
    if (v == "0") return false;
    throw ParseError(source, line_no, "expected 0 or 1, got '" + std::string(v) + "'");
  };
  while (text::next_content_line(in, line, line_no)) {
    if (first && line.starts_with("scenario_id")) {
      first = false;
      continue;
    }
    first = false;
    const auto cols = text::split_csv(line);
    if (cols.size() != 6) throw ParseError(source, line_no, "expected 6 manifest columns");
    EpochLabel l;
    l.scenario_id = std::string(cols[0]);
    try {
      l.epoch = parse_integer(cols[1]);
      if (cols[3] != "-") {
        std::size_t start = 0;
        const std::string_view cells = cols[3];
        while (start <= cells.size()) {
          const auto end = std::min(cells.find(';', start), cells.size());
          const auto cell = cells.substr(start, end - start);
          const auto colon = cell.find(':');
          if (colon == std::string_view::npos) throw std::invalid_argument("bad cell '" + std::string(cell) + "'");
          l.host_cells.insert({static_cast<int>(parse_integer(cell.substr(0, colon))),
                               static_cast<int>(parse_integer(cell.substr(colon + 1)))});
          start = end + 1;
        }
      }
    } catch (const std::invalid_argument& e) {
      throw ParseError(source, line_no, e.what());
    }
    l.silence = flag(cols[2]);
    l.guest_present = flag(cols[4]);
    l.expected_stored = flag(cols[5]);
    out.push_back(std::move(l));
  }
  return out;
}

std::vector<EpochLabel> load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  return read_manifest(in, path.string());
}

void write_test_truth(std::ostream& out, std::span<const TestPoint> points) {
  out << "epoch,x,y\n";
  for (const auto& p : points) out << p.epoch << ',' << format_number(p.truth.x) << ',' << format_number(p.truth.y) << '\n';
}

std::map<std::int64_t, Point2D> read_test_truth(std::istream& in, const std::string& source) {
  std::map<std::int64_t, Point2D> out;
  std::string line;
  std::size_t line_no = 0;
  while (text::next_content_line(in, line, line_no)) {
    if (line.starts_with("epoch")) continue;
    const auto cols = text::split_csv(line);
    if (cols.size() != 3) throw ParseError(source, line_no, "expected 'epoch,x,y'");
    try {
      out[parse_integer(cols[0])] = {parse_number(cols[1]), parse_number(cols[2])};
    } catch (const std::invalid_argument& e) {
      throw ParseError(source, line_no, e.what());
    }
  }
  return out;
}

Topology default_testbed() {
  // Alternating AP/MP positions every 2.2 m around the perimeter, 0.2 m off the walls.
  std::vector<Node> nodes{
      {"AP1", NodeKind::AP, {1.3, 0.2}}, {"AP2", NodeKind::AP, {5.7, 0.2}}, {"AP3", NodeKind::AP, {6.8, 3.5}},
      {"AP4", NodeKind::AP, {5.7, 6.8}}, {"AP5", NodeKind::AP, {1.3, 6.8}}, {"AP6", NodeKind::AP, {0.2, 3.5}},
      {"MP1", NodeKind::MP, {3.5, 0.2}}, {"MP2", NodeKind::MP, {6.8, 1.3}}, {"MP3", NodeKind::MP, {6.8, 5.7}},
      {"MP4", NodeKind::MP, {3.5, 6.8}}, {"MP5", NodeKind::MP, {0.2, 5.7}}, {"MP6", NodeKind::MP, {0.2, 1.3}},
  };
  std::vector<Room> rooms{{"west", {0.0, 0.0}, {3.5, 7.0}}, {"east", {3.5, 0.0}, {7.0, 7.0}}};
  return make_topology(7.0, 7.0, 2.4e9, std::move(nodes), {}, std::move(rooms));
}

}  // namespace radiographer
