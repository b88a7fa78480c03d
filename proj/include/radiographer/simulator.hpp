#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "radiographer/fingerprint.hpp"
#include "radiographer/ingest.hpp"

namespace radiographer {

/// Log-distance path loss plus a per-Fresnel-zone body attenuation table.
struct PropagationParams {
  double tx_power_dbm = 0.0;
  double ref_loss_db = 40.0;  // at 1 m
  double path_loss_exponent = 2.2;
  double noise_sigma = 1.0;  // dB
  std::vector<double> zone_attenuation{6.0, 3.0, 1.5, 0.75, 0.4};  // dB, zone order 1..N
  std::map<std::string, double> mp_offset_db;  // receiver heterogeneity, keyed by MP id
  std::uint64_t seed = 1;
};

void validate(const PropagationParams& prop);

struct TrackPoint {
  double t;  // seconds from scenario start
  Point2D pos;
};
using Track = std::vector<TrackPoint>;

enum class ScenarioKind { custom, one_host, same_zone, different_zones, different_rooms, silence };

struct Scenario {
  std::string id;
  ScenarioKind kind = ScenarioKind::custom;
  double duration = 0.0;
  std::map<std::string, Track> host_tracks;   // emit fixes
  std::map<std::string, Track> guest_tracks;  // perturb RSS only
  bool silence = false;
};

struct EpochLabel {
  std::string scenario_id;
  std::int64_t epoch = 0;
  bool silence = false;
  std::set<CellIndex> host_cells;
  bool guest_present = false;
  bool expected_stored = false;

  friend bool operator==(const EpochLabel&, const EpochLabel&) = default;
};

struct SimulationOptions {
  double rate = 3.0;  // samples per second per link
  double epoch_len = kDefaultEpochLength;
  double cell_size = kDefaultCellSize;
};

struct SimulatedData {
  std::vector<RssSample> samples;
  std::vector<DeviceBasedFix> fixes;
  std::vector<EpochLabel> labels;
};

/// Noise-free received power on a link with nobody around.
double free_space_rss(const RadioLink& link, const PropagationParams& prop);

/// Attenuation of the lowest zone order whose ellipse holds the person, 0 outside all modeled zones.
double zone_perturbation(const RadioLink& link, const Point2D& person, const PropagationParams& prop);

/// Noise-free RSS of a topology link with the given people present.
double expected_rss(const Topology& topology, std::size_t link, std::span<const Point2D> people, const PropagationParams& prop);

/// Position at time t: the latest track point not after t, or the first one.
Point2D position_at(const Track& track, double t);

/// Simulates one scenario starting at `start_time` (absolute seconds). Deterministic in `seed`.
/// Throws ValidationError when a track leaves the floor or a silence scenario has people.
SimulatedData simulate_rss(const Topology& topology, const Scenario& scenario, const PropagationParams& prop,
                           const SimulationOptions& options, double start_time, std::uint64_t seed);

/// Lays scenarios back to back on epoch boundaries; scenario i draws noise from a
/// generator seeded by (prop.seed, i).
SimulatedData simulate_suite(const Topology& topology, std::span<const Scenario> scenarios, const PropagationParams& prop,
                             const SimulationOptions& options);

/// Scenario counts of the standard data-collection suite.
struct SuiteParams {
  int one_host = 131;
  int same_zone = 8;
  int different_zones = 10;  // same room
  int different_rooms = 22;
  int silence = 1;
  double scenario_duration = 4.0;
  double silence_duration = 20.0;
  double min_separation = 1.0;  // host-guest distance, m
  std::uint64_t seed = 1;
};

/// Static host/guest placements mirroring the data-collection table. Each room is
/// split in half along its longer side; the halves are the "zones".
/// Throws InputError if the topology defines fewer than two rooms.
std::vector<Scenario> standard_suite(const Topology& topology, const SuiteParams& params, const SimulationOptions& options);

struct SuiteCounts {
  int one_host = 0, same_zone = 0, different_zones = 0, different_rooms = 0, silence = 0;
};
SuiteCounts count_scenarios(std::span<const Scenario> scenarios);
/// Same tally recovered from a manifest via the scenario id prefixes.
SuiteCounts count_scenarios(std::span<const EpochLabel> labels);

/// Device-free test readings at uniformly random points.
struct TestPoint {
  std::int64_t epoch;
  Point2D truth;
  std::vector<double> rss;  // topology link order, mean over the reading
};

std::vector<TestPoint> simulate_test_points(const Topology& topology, const PropagationParams& prop,
                                            const SimulationOptions& options, int count, double duration,
                                            std::uint64_t seed);

void write_manifest(std::ostream& out, std::span<const EpochLabel> labels);
std::vector<EpochLabel> read_manifest(std::istream& in, const std::string& source = "<manifest>");
std::vector<EpochLabel> load_manifest(const std::filesystem::path& path);

void write_test_truth(std::ostream& out, std::span<const TestPoint> points);
std::map<std::int64_t, Point2D> read_test_truth(std::istream& in, const std::string& source = "<truth>");

/// Two-room 7 m x 7 m testbed with six APs and six MPs on the walls (36 links).
Topology default_testbed();

}  // namespace radiographer
