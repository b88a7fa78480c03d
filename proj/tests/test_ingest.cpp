#include <doctest.h>

#include <random>
#include <sstream>

#include "radiographer/errors.hpp"
#include "radiographer/ingest.hpp"
#include "radiographer/numfmt.hpp"

using namespace radiographer;

namespace {

Topology parse(const std::string& text) {
  std::istringstream in(text);
  return parse_topology(in, "test.topo");
}

const char* kThreeByThree =
    "# comment\n"
    "7 7 2400000000\n"
    "A1 AP 0 0\nA2 AP 0 3.5\nA3 AP 0 7\n"
    "M1 MP 7 0\nM2 MP 7 3.5\nM3 MP 7 7\n";

Topology small() {
  return make_topology(4, 4, 2.4e9, {{"A", NodeKind::AP, {0, 0}}, {"B", NodeKind::AP, {0, 4}}, {"M", NodeKind::MP, {4, 2}}});
}

}  // namespace

TEST_CASE("topology: full bipartite link set") {
  const auto t = parse(kThreeByThree);
  CHECK(t.link_count() == 9);
  CHECK(t.link_name(0) == "A1:M1");
  CHECK(t.link_name(1) == "A1:M2");
  CHECK(t.link_name(8) == "A3:M3");
  CHECK_FALSE(t.explicit_links);
  CHECK(t.frequency == 2.4e9);
}

TEST_CASE("topology: explicit links and rooms") {
  const auto t = parse("7 7 2.4e9\nA1 AP 0 0\nM1 MP 7 0\nM2 MP 7 7\nlink A1 M2\nroom r1 0 0 3.5 7\n");
  REQUIRE(t.link_count() == 1);
  CHECK(t.link_name(0) == "A1:M2");
  REQUIRE(t.rooms.size() == 1);
  CHECK(t.rooms[0].hi == Point2D{3.5, 7});
}

TEST_CASE("topology: validation errors") {
  CHECK_THROWS_AS(parse("7 7 2.4e9\nA1 AP 0 0\nM1 MP 7.5 0\n"), ValidationError);
  CHECK_THROWS_AS(parse("7 7 2.4e9\nA1 AP 0 0\nA1 MP 7 0\n"), ValidationError);
  CHECK_THROWS_AS(parse("7 7 2.4e9\nA1 AP 0 0\nA2 AP 7 0\n"), ValidationError);
  CHECK_THROWS_AS(parse("7 7 2.4e9\nA1 AP 0 0\nM1 MP 0 0\n"), ValidationError);
  CHECK_THROWS_AS(parse("7 7 2.4e9\nA1 AP 0 0\nM1 MP 7 0\nlink M1 A1\n"), ValidationError);
  CHECK_THROWS_AS(parse("7 7 0\nA1 AP 0 0\nM1 MP 7 0\n"), ValidationError);

  try {
    parse("7 7 2.4e9\nA1 AP 0 0\nM1 MP 7.5 0\n");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("M1") != std::string::npos);
  }
}

TEST_CASE("topology: parse errors carry the line number") {
  try {
    parse("7 7 2.4e9\nA1 AP 0 0\n\nM1 XX 7 0\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 4);
  }
  CHECK_THROWS_AS(parse(""), ParseError);
  CHECK_THROWS_AS(parse("7 7\n"), ParseError);
  CHECK_THROWS_AS(parse("7 7 2.4e9\nA1 AP zero 0\n"), ParseError);
  CHECK_THROWS_AS(load_topology("/nonexistent/testbed.topo"), InputError);
}

TEST_CASE("property: topology survives a write/parse round trip") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double w = 1.0 + 20.0 * u(rng), h = 1.0 + 20.0 * u(rng);
    std::vector<Node> nodes;
    const int aps = 1 + static_cast<int>(rng() % 4), mps = 1 + static_cast<int>(rng() % 4);
    for (int i = 0; i < aps; ++i) nodes.push_back({"ap" + std::to_string(i), NodeKind::AP, {w * u(rng), h * u(rng)}});
    for (int i = 0; i < mps; ++i) nodes.push_back({"mp" + std::to_string(i), NodeKind::MP, {w * u(rng), h * u(rng)}});
    std::vector<std::pair<std::string, std::string>> links;
    if (trial % 2 == 1) links.emplace_back("ap0", "mp0");
    std::vector<Room> rooms{{"r", {0.0, 0.0}, {w * 0.5, h}}};
    const auto t = make_topology(w, h, 1e9 + 5e9 * u(rng), nodes, links, rooms);

    std::ostringstream out;
    write_topology(out, t);
    std::istringstream in(out.str());
    REQUIRE(parse_topology(in) == t);
  }
}

TEST_CASE("rss and fix streams: parsing and validation") {
  const auto t = small();
  std::istringstream rss("timestamp,ap_id,mp_id,rss_dbm\n0.5,A,M,-50\n0.7, B ,M,-60.25\n");
  const auto samples = parse_rss_samples(rss, t);
  REQUIRE(samples.size() == 2);
  CHECK(samples[1].ap == "B");
  CHECK(samples[1].rss == -60.25);

  std::istringstream unknown("0.5,A,X,-50\n");
  CHECK_THROWS_AS(parse_rss_samples(unknown, t), ValidationError);
  std::istringstream positive("0.5,A,M,3\n");
  CHECK_THROWS_AS(parse_rss_samples(positive, t), ValidationError);
  std::istringstream garbage("0.5,A,M\n");
  CHECK_THROWS_AS(parse_rss_samples(garbage, t), ParseError);

  std::istringstream fixes("timestamp,user_id,x,y\n0.5,u1,1,1\n");
  CHECK(parse_fixes(fixes, t).size() == 1);
  std::istringstream outside("0.5,u1,5,1\n");
  CHECK_THROWS_AS(parse_fixes(outside, t), ValidationError);
}

TEST_CASE("windowize: examples") {
  const auto t = small();
  SUBCASE("arithmetic mean per link") {
    const std::vector<RssSample> s{{0.1, "A", "M", -50}, {0.4, "A", "M", -52}, {0.8, "A", "M", -54}};
    const auto w = windowize(t, s, {}, 1.0);
    REQUIRE(w.size() == 1);
    const auto& win = w[0].links.at(0);
    CHECK(win.mean_rss == -52.0);
    CHECK(win.count == 3);
    CHECK(w[0].links.count(1) == 0);  // absent link
  }
  SUBCASE("empty stream") { CHECK(windowize(t, {}, {}, 1.0).empty()); }
  SUBCASE("floor partition") {
    const std::vector<RssSample> s{{0.9, "A", "M", -50}, {1.1, "A", "M", -50}};
    const auto w = windowize(t, s, {}, 1.0);
    REQUIRE(w.size() == 2);
    CHECK(w[0].epoch == 0);
    CHECK(w[1].epoch == 1);
  }
  SUBCASE("fixes attach to their epoch") {
    const std::vector<RssSample> s{{0.2, "A", "M", -50}, {2.2, "A", "M", -50}};
    const std::vector<DeviceBasedFix> f{{0.5, "u", {1, 1}}, {1.5, "u", {2, 2}}, {2.9, "u", {3, 3}}};
    const auto w = windowize(t, s, f, 1.0);
    REQUIRE(w.size() == 2);
    CHECK(w[0].fixes.size() == 1);
    CHECK(w[1].epoch == 2);
    REQUIRE(w[1].fixes.size() == 1);
    CHECK(w[1].fixes[0].pos == Point2D{3, 3});
  }
  SUBCASE("unsorted input names the offending timestamp") {
    const std::vector<RssSample> s{{0.2, "A", "M", -50}, {1.7, "A", "M", -50}, {1.2, "B", "M", -50}};
    try {
      windowize(t, s, {}, 1.0);
      FAIL("expected an error");
    } catch (const InputError& e) {
      CHECK(std::string(e.what()).find("1.2") != std::string::npos);
    }
    CHECK_THROWS_AS(windowize(t, {}, {}, 0.0), InputError);
  }
}

TEST_CASE("property: window counts sum to the per-link sample count, deterministically") {
  const auto t = small();
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> dt(0.0, 0.4), rss(-90.0, -30.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<RssSample> s;
    double time = 0.0;
    std::size_t per_link[2] = {0, 0};
    for (int i = 0; i < 300; ++i) {
      time += dt(rng);
      const bool b = rng() % 2;
      s.push_back({time, b ? "B" : "A", "M", rss(rng)});
      per_link[b ? 1 : 0] += 1;
    }
    const auto w = windowize(t, s, {}, 0.5 + trial * 0.1);
    std::size_t got[2] = {0, 0};
    for (const auto& e : w)
      for (const auto& [link, win] : e.links) got[link] += win.count;
    CHECK(got[0] == per_link[0]);
    CHECK(got[1] == per_link[1]);

    const auto again = windowize(t, s, {}, 0.5 + trial * 0.1);
    REQUIRE(again.size() == w.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
      CHECK(again[i].epoch == w[i].epoch);
      for (const auto& [link, win] : w[i].links) CHECK(again[i].links.at(link).mean_rss == win.mean_rss);
    }
  }
}

TEST_CASE("number formatting round-trips") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double v = u(rng);
    CHECK(parse_number(format_number(v)) == v);
  }
  CHECK(format_number(-0.0) == "0");
  CHECK(format_number(0.1) == "0.1");
  CHECK_THROWS_AS(parse_number("1.5x"), std::invalid_argument);
  CHECK_THROWS_AS(parse_number(""), std::invalid_argument);
}
