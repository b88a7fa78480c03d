#pragma once

#include <cmath>
#include <string>

namespace radiographer {

inline constexpr double kSpeedOfLight = 2.99792458e8;  // m/s

struct Point2D {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2D&, const Point2D&) = default;
};

inline double distance(const Point2D& a, const Point2D& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

/// A directed AP -> MP radio link on the floor plan.
///
/// Construction enforces a positive link length and a positive, finite carrier
/// frequency; every Fresnel computation below relies on both.
class RadioLink {
 public:
  RadioLink(std::string ap, std::string mp, Point2D ap_pos, Point2D mp_pos, double frequency_hz);

  const std::string& ap() const { return ap_; }
  const std::string& mp() const { return mp_; }
  const Point2D& ap_pos() const { return ap_pos_; }
  const Point2D& mp_pos() const { return mp_pos_; }
  double frequency() const { return frequency_; }
  double length() const { return length_; }
  double wavelength() const { return kSpeedOfLight / frequency_; }

 private:
  std::string ap_;
  std::string mp_;
  Point2D ap_pos_;
  Point2D mp_pos_;
  double frequency_;
  double length_;
};

/// Radius of the given Fresnel zone at distance d1 from the AP along the link.
/// Throws std::domain_error unless 0 < d1 < D, std::invalid_argument if order < 1.
double fresnel_radius_at(const RadioLink& link, int order, double d1);

/// Radius of the given zone at the link midpoint, where it is largest.
double max_fresnel_radius(const RadioLink& link, int order);

/// Planar Fresnel ellipse with the link endpoints as foci.
struct FresnelEllipse {
  RadioLink link;
  int order;
  double semi_major;
  double semi_minor;
};

FresnelEllipse ellipse_of(const RadioLink& link, int order);

/// Focal-distance test; points on the boundary are inside.
bool contains(const FresnelEllipse& ellipse, const Point2D& p);

}  // namespace radiographer
