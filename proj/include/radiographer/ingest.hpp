#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "radiographer/geometry.hpp"

namespace radiographer {

enum class NodeKind { AP, MP };

struct Node {
  std::string id;
  NodeKind kind;
  Point2D pos;

  friend bool operator==(const Node&, const Node&) = default;
};

// Axis-aligned room rectangle; used by the scenario generator.
struct Room {
  std::string id;
  Point2D lo;
  Point2D hi;

  bool contains(const Point2D& p) const { return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y; }
  friend bool operator==(const Room&, const Room&) = default;
};

// Indices into Topology::nodes.
struct LinkRef {
  std::size_t ap;
  std::size_t mp;

  friend bool operator==(const LinkRef&, const LinkRef&) = default;
};

/// Validated floor plan with AP/MP placements and the directed link set.
///
/// Links are referred to everywhere else by their index in `links`; that order is
/// the canonical link ordering. Without an explicit link list it is the full
/// AP x MP product, APs outer, both in node declaration order.
struct Topology {
  double width = 0.0;
  double height = 0.0;
  double frequency = 0.0;
  std::vector<Node> nodes;
  std::vector<LinkRef> links;
  std::vector<Room> rooms;
  bool explicit_links = false;

  std::size_t link_count() const { return links.size(); }
  std::string link_name(std::size_t link) const;
  RadioLink radio_link(std::size_t link) const;
  std::optional<std::size_t> find_node(const std::string& id) const;
  std::optional<std::size_t> find_link(const std::string& ap, const std::string& mp) const;
  bool in_bounds(const Point2D& p) const { return p.x >= 0.0 && p.x <= width && p.y >= 0.0 && p.y <= height; }

  friend bool operator==(const Topology&, const Topology&) = default;
};

/// Validates the invariants and derives the link list when `links` is empty.
/// Throws ValidationError naming the violated invariant.
Topology make_topology(double width, double height, double frequency, std::vector<Node> nodes,
                       std::vector<std::pair<std::string, std::string>> explicit_links = {},
                       std::vector<Room> rooms = {});

Topology parse_topology(std::istream& in, const std::string& source = "<topology>");
Topology load_topology(const std::filesystem::path& path);
void write_topology(std::ostream& out, const Topology& topology);

struct RssSample {
  double timestamp;
  std::string ap;
  std::string mp;
  double rss;  // dBm
};

struct DeviceBasedFix {
  double timestamp;
  std::string user;
  Point2D pos;
};

std::vector<RssSample> parse_rss_samples(std::istream& in, const Topology& topology,
                                         const std::string& source = "<rss>");
std::vector<RssSample> load_rss_samples(const std::filesystem::path& path, const Topology& topology);
void write_rss_samples(std::ostream& out, std::span<const RssSample> samples);

std::vector<DeviceBasedFix> parse_fixes(std::istream& in, const Topology& topology, const std::string& source = "<fixes>");
std::vector<DeviceBasedFix> load_fixes(const std::filesystem::path& path, const Topology& topology);
void write_fixes(std::ostream& out, std::span<const DeviceBasedFix> fixes);

struct RssWindow {
  std::int64_t epoch;
  std::size_t link;
  double mean_rss;
  std::size_t count;  // samples of this link in the epoch
};

struct EpochWindows {
  std::int64_t epoch;
  std::map<std::size_t, RssWindow> links;  // only links with samples in this epoch
  std::vector<DeviceBasedFix> fixes;
};

inline constexpr double kDefaultEpochLength = 1.0;  // seconds

/// Partitions both streams by floor(timestamp / epoch_len). Only epochs holding at
/// least one RSS sample are emitted; fixes are attached to their epoch.
/// Throws InputError on unsorted input or unknown links.
std::vector<EpochWindows> windowize(const Topology& topology, std::span<const RssSample> samples,
                                    std::span<const DeviceBasedFix> fixes, double epoch_len = kDefaultEpochLength);

std::int64_t epoch_of(double timestamp, double epoch_len);

}  // namespace radiographer
