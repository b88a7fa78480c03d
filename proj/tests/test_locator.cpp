#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "radiographer/errors.hpp"
#include "radiographer/locator.hpp"

using namespace radiographer;

namespace {

Fingerprint store(const std::vector<std::pair<CellIndex, std::vector<double>>>& records) {
  const std::size_t k = records.empty() ? 2 : records.front().second.size();
  std::vector<std::string> links;
  for (std::size_t j = 0; j < k; ++j) links.push_back("L" + std::to_string(j));
  Fingerprint fp(make_grid(7, 7, 0.55), links, {});
  for (const auto& [cell, v] : records) fp.fold(cell, EpochVector(v.begin(), v.end()));
  return fp;
}

// Squared distances over every record; the first minimum in row-major order wins.
std::size_t brute_force(const Fingerprint& fp, const std::vector<double>& t) {
  std::size_t best = 0;
  double best_sq = INFINITY;
  for (const auto& [k, r] : fp.records()) {
    double sq = 0.0;
    for (std::size_t j = 0; j < t.size(); ++j) sq += (t[j] - r.mean_rss[j]) * (t[j] - r.mean_rss[j]);
    if (sq < best_sq) best_sq = sq, best = k;
  }
  return best;
}

}  // namespace

TEST_CASE("localize examples") {
  const auto fp = store({{{1, 0}, {-50, -60}}, {{2, 0}, {-55, -65}}});
  const auto e = localize(fp, {0, {-51, -61}});
  CHECK(e.cell == CellIndex{1, 0});
  CHECK(e.distance == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(e.center.x == doctest::Approx(1.5 * 0.55));

  const auto same = localize(fp, {0, {-55, -65}});
  CHECK(same.cell == CellIndex{2, 0});
  CHECK(same.distance == 0.0);

  // Equidistant: (4,1) has the lower row-major index than (0,2).
  const auto tie = store({{{0, 2}, {-50, -60}}, {{4, 1}, {-54, -60}}});
  CHECK(localize(tie, {0, {-52, -60}}).cell == CellIndex{4, 1});
}

TEST_CASE("localize errors") {
  CHECK_THROWS_AS(localize(store({}), {0, {-50, -50}}), PipelineError);
  CHECK_THROWS_AS(localize(store({{{0, 0}, {-50, -60}}}), {0, {-50}}), ValidationError);
}

TEST_CASE("localization error examples") {
  const auto g = make_grid(7, 7, 0.55);
  CHECK(localization_error({{0, 0}, {0, 0}, 0}, {0, 0}) == 0.0);
  CHECK(localization_error({{0, 0}, {0, 0}, 0}, {3, 4}) == 5.0);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 7.0);
  for (int i = 0; i < 5000; ++i) {
    const Point2D p{u(rng), u(rng)};
    const auto c = cell_of(g, p);
    CHECK(localization_error({c, g.center(c), 0}, p) <= g.cell_size * std::sqrt(2.0) / 2 + 1e-12);
  }
}

TEST_CASE("exhaustive: nearest neighbour with ties on a small store") {
  // Three cells drawn from a 3-value alphabet on 2 links, every test vector on the same
  // alphabet: ties are frequent and must resolve to the lowest cell index.
  const double values[] = {-50, -51, -52};
  const CellIndex cells[] = {{3, 0}, {0, 1}, {5, 4}};
  int cases = 0;
  for (int a = 0; a < 9; ++a)
    for (int b = 0; b < 9; ++b)
      for (int c = 0; c < 9; ++c) {
        const int code[] = {a, b, c};
        std::vector<std::pair<CellIndex, std::vector<double>>> recs;
        for (int i = 0; i < 3; ++i) recs.push_back({cells[i], {values[code[i] % 3], values[code[i] / 3]}});
        const auto fp = store(recs);
        for (int t = 0; t < 9; ++t) {
          const std::vector<double> tv{values[t % 3], values[t / 3]};
          REQUIRE(fp.grid().linear(localize(fp, {0, tv}).cell) == brute_force(fp, tv));
          ++cases;
        }
      }
  CHECK(cases == 729 * 9);
}

TEST_CASE("property: agreement with brute force and offset invariance") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<std::pair<CellIndex, std::vector<double>>> recs;
    const int n = 1 + static_cast<int>(rng() % 20);
    for (int i = 0; i < n; ++i) {
      std::vector<double> v;
      for (int j = 0; j < 4; ++j) v.push_back(-30.0 - static_cast<double>(rng() % 40));
      recs.push_back({{static_cast<int>(rng() % 13), static_cast<int>(rng() % 13)}, v});
    }
    std::vector<double> tv;
    for (int j = 0; j < 4; ++j) tv.push_back(-30.0 - static_cast<double>(rng() % 40));

    const auto fp = store(recs);
    const auto e = localize(fp, {0, tv});
    CHECK(fp.grid().linear(e.cell) == brute_force(fp, tv));

    // Integer dB values keep the shifted distances exact.
    const double shift = -static_cast<double>(rng() % 10);
    auto shifted = recs;
    for (auto& r : shifted)
      for (auto& v : r.second) v += shift;
    auto tv2 = tv;
    for (auto& v : tv2) v += shift;
    // Re-folding overlapping cells averages them; compare against the same averaging.
    const auto fp2 = store(shifted);
    CHECK(localize(fp2, {0, tv2}).cell == e.cell);
  }
}

TEST_CASE("test vector construction and files") {
  EpochWindows w{4, {}, {}};
  w.links[2] = {4, 2, -61.5, 3};
  const std::size_t links[] = {0, 2};
  const auto t = make_test_vector(w, links);
  CHECK(t.epoch == 4);
  CHECK(t.rss == std::vector<double>{kRssFloor, -61.5});

  const std::vector<std::string> names{"A:M", "B:M"};
  std::istringstream header("epoch,B:M,A:M\n3,-40,-41\n4,,-42\n");
  const auto v = parse_test_vectors(header, names);
  REQUIRE(v.size() == 2);
  CHECK(v[0].rss == std::vector<double>{-41, -40});
  CHECK(v[1].rss == std::vector<double>{-42, kRssFloor});

  std::istringstream bare("3,-40,-41\n");
  CHECK(parse_test_vectors(bare, names)[0].rss == std::vector<double>{-40, -41});
  std::istringstream short_row("3,-40\n");
  CHECK_THROWS_AS(parse_test_vectors(short_row, names), InputError);
  std::istringstream unknown("epoch,C:M,A:M\n3,-40,-41\n");
  CHECK_THROWS_AS(parse_test_vectors(unknown, names), InputError);

  std::ostringstream out;
  write_test_vectors(out, names, v);
  std::istringstream back(out.str());
  const auto again = parse_test_vectors(back, names);
  REQUIRE(again.size() == 2);
  CHECK(again[1].rss == v[1].rss);
  CHECK(again[1].epoch == 4);
}
