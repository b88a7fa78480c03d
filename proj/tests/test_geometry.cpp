#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "radiographer/geometry.hpp"

using namespace radiographer;

namespace {

RadioLink link_3m() { return RadioLink("AP", "MP", {0.0, 0.0}, {3.0, 0.0}, 2.4e9); }

// Closed forms evaluated independently of the library.
double zone_radius_oracle(double f, double D, int z, double d1) {
  const double lambda = 2.99792458e8 / f;
  const double d2 = D - d1;
  return std::sqrt(z * lambda * d1 * d2 / D);
}

double max_radius_oracle(double f, double D, int z) { return std::sqrt(z * 2.99792458e8 * D / (4.0 * f)); }

// Principal-axis frame test (x/a)^2 + (y/b)^2 for the ellipse.
double canonical_form(const FresnelEllipse& e, const Point2D& p) {
  const auto& a = e.link.ap_pos();
  const auto& b = e.link.mp_pos();
  const double len = e.link.length();
  const double ux = (b.x - a.x) / len, uy = (b.y - a.y) / len;
  const double cx = (a.x + b.x) / 2.0, cy = (a.y + b.y) / 2.0;
  const double x = (p.x - cx) * ux + (p.y - cy) * uy;
  const double y = -(p.x - cx) * uy + (p.y - cy) * ux;
  return (x / e.semi_major) * (x / e.semi_major) + (y / e.semi_minor) * (y / e.semi_minor);
}

RadioLink random_link(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> coord(0.0, 20.0);
  std::uniform_real_distribution<double> freq(0.9e9, 6e9);
  while (true) {
    Point2D a{coord(rng), coord(rng)}, b{coord(rng), coord(rng)};
    if (distance(a, b) > 0.1) return RadioLink("A", "M", a, b, freq(rng));
  }
}

}  // namespace

TEST_CASE("zone radius at a point on a 3 m 2.4 GHz link") {
  const auto link = link_3m();
  CHECK(std::abs(fresnel_radius_at(link, 1, 1.5) - 0.30619) < 1e-3);
  CHECK(std::abs(fresnel_radius_at(link, 1, 1.0) - 0.28868) < 1e-3);
  CHECK(std::abs(fresnel_radius_at(link, 1, 1.0) - zone_radius_oracle(2.4e9, 3.0, 1, 1.0)) < 1e-12);
  CHECK(fresnel_radius_at(link, 1, 1.5) == doctest::Approx(max_fresnel_radius(link, 1)).epsilon(1e-14));
}

TEST_CASE("zone radius rejects points not strictly between the nodes") {
  const auto link = link_3m();
  CHECK_THROWS_AS(fresnel_radius_at(link, 1, 0.0), std::domain_error);
  CHECK_THROWS_AS(fresnel_radius_at(link, 1, 3.0), std::domain_error);
  CHECK_THROWS_AS(fresnel_radius_at(link, 1, -0.5), std::domain_error);
  CHECK_THROWS_AS(fresnel_radius_at(link, 0, 1.5), std::invalid_argument);
}

TEST_CASE("maximum zone radius") {
  const auto link = link_3m();
  CHECK(std::abs(max_fresnel_radius(link, 1) - 0.30619) < 1e-3);
  CHECK(std::abs(max_fresnel_radius(link, 5) - 0.68465) < 1e-3);
  CHECK(std::abs(max_fresnel_radius(link, 5) - max_radius_oracle(2.4e9, 3.0, 5)) < 1e-12);
  CHECK(max_fresnel_radius(link, 4) == doctest::Approx(2.0 * max_fresnel_radius(link, 1)).epsilon(1e-15));
}

TEST_CASE("ellipse construction") {
  const auto e1 = ellipse_of(link_3m(), 1);
  CHECK(std::abs(e1.semi_major - 1.53093) < 1e-3);
  CHECK(std::abs(e1.semi_minor - 0.30619) < 1e-3);
  CHECK(e1.semi_major == doctest::Approx(std::sqrt(e1.semi_minor * e1.semi_minor + 2.25)).epsilon(1e-15));
  CHECK(std::abs(ellipse_of(link_3m(), 5).semi_minor - 0.68465) < 1e-3);

  CHECK_THROWS_AS(RadioLink("A", "M", {0, 0}, {3, 0}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(RadioLink("A", "M", {0, 0}, {3, 0}, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(RadioLink("A", "M", {1, 1}, {1, 1}, 2.4e9), std::invalid_argument);
  CHECK_THROWS_AS(RadioLink("A", "M", {NAN, 1}, {1, 1}, 2.4e9), std::invalid_argument);
}

TEST_CASE("ellipse membership") {
  const auto e = ellipse_of(link_3m(), 1);
  CHECK(contains(e, {1.5, 0.30}));
  CHECK_FALSE(contains(e, {1.5, 0.31}));
  CHECK(contains(e, {0.0, 0.0}));
  CHECK(contains(e, {3.0, 0.0}));
  // On the major-axis vertex the distance sum equals 2a exactly.
  CHECK(contains(e, {1.5 + e.semi_major, 0.0}));
}

TEST_CASE("property: radius bounded by the midpoint radius, equal only at the midpoint") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> order(1, 9);
  std::uniform_real_distribution<double> frac(0.001, 0.999);
  for (int i = 0; i < 2000; ++i) {
    const auto link = random_link(rng);
    const int z = order(rng);
    const double d1 = frac(rng) * link.length();
    const double r = fresnel_radius_at(link, z, d1);
    const double big = max_fresnel_radius(link, z);
    REQUIRE(r > 0.0);
    REQUIRE(r <= big * (1.0 + 1e-12));
    if (std::abs(d1 - link.length() / 2.0) > 1e-6 * link.length()) REQUIRE(r < big);
  }
}

TEST_CASE("property: radii grow with order and length, shrink with frequency") {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 1000; ++i) {
    const auto link = random_link(rng);
    const RadioLink longer(link.ap(), link.mp(), link.ap_pos(),
                           {link.mp_pos().x + (link.mp_pos().x - link.ap_pos().x), link.mp_pos().y + (link.mp_pos().y - link.ap_pos().y)},
                           link.frequency());
    const RadioLink faster(link.ap(), link.mp(), link.ap_pos(), link.mp_pos(), link.frequency() * 1.5);
    for (int z = 1; z < 9; ++z) {
      REQUIRE(max_fresnel_radius(link, z + 1) > max_fresnel_radius(link, z));
      REQUIRE(max_fresnel_radius(longer, z) > max_fresnel_radius(link, z));
      REQUIRE(max_fresnel_radius(faster, z) < max_fresnel_radius(link, z));
      const double d1 = link.length() / 3.0;
      REQUIRE(fresnel_radius_at(link, z + 1, d1) > fresnel_radius_at(link, z, d1));
      REQUIRE(fresnel_radius_at(faster, z, d1) < fresnel_radius_at(link, z, d1));
      REQUIRE(fresnel_radius_at(longer, z, 2.0 * d1) > fresnel_radius_at(link, z, d1));
    }
  }
}

TEST_CASE("property: nesting, symmetry and canonical-form agreement") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    const auto link = random_link(rng);
    const int z = 1 + static_cast<int>(rng() % 8);
    const auto e = ellipse_of(link, z);
    const auto outer = ellipse_of(link, z + 1);

    // Sample around the ellipse in its own frame, then map back to the floor.
    const double len = link.length();
    const double ux = (link.mp_pos().x - link.ap_pos().x) / len, uy = (link.mp_pos().y - link.ap_pos().y) / len;
    const double cx = (link.ap_pos().x + link.mp_pos().x) / 2.0, cy = (link.ap_pos().y + link.mp_pos().y) / 2.0;
    const double lx = 1.3 * e.semi_major * unit(rng), ly = 1.3 * e.semi_minor * unit(rng);
    auto to_floor = [&](double x, double y) { return Point2D{cx + x * ux - y * uy, cy + x * uy + y * ux}; };

    const Point2D p = to_floor(lx, ly);
    const bool inside = contains(e, p);
    if (inside) REQUIRE(contains(outer, p));

    const double g = canonical_form(e, p);
    if (std::abs(g - 1.0) > 1e-9) REQUIRE(inside == (g <= 1.0));

    // Mirror images across the link axis and the perpendicular bisector.
    for (const auto& q : {to_floor(lx, -ly), to_floor(-lx, ly), to_floor(-lx, -ly)}) {
      if (std::abs(canonical_form(e, q) - 1.0) > 1e-9) REQUIRE(contains(e, q) == inside);
    }
  }
}
