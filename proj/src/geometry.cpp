#include "radiographer/geometry.hpp"

#include <stdexcept>
#include <utility>

namespace radiographer {

namespace {

bool finite(const Point2D& p) { return std::isfinite(p.x) && std::isfinite(p.y); }

void require_order(int order) {
  if (order < 1) throw std::invalid_argument("Fresnel zone order must be >= 1, got " + std::to_string(order));
}

}  // namespace

RadioLink::RadioLink(std::string ap, std::string mp, Point2D ap_pos, Point2D mp_pos, double frequency_hz)
    : ap_(std::move(ap)), mp_(std::move(mp)), ap_pos_(ap_pos), mp_pos_(mp_pos), frequency_(frequency_hz) {
  if (!finite(ap_pos_) || !finite(mp_pos_)) throw std::invalid_argument("link " + ap_ + "->" + mp_ + ": non-finite node position");
  if (!(std::isfinite(frequency_) && frequency_ > 0.0))
    throw std::invalid_argument("link " + ap_ + "->" + mp_ + ": frequency must be positive");
  length_ = distance(ap_pos_, mp_pos_);
  if (!(length_ > 0.0)) throw std::invalid_argument("link " + ap_ + "->" + mp_ + ": endpoints coincide");
}

double fresnel_radius_at(const RadioLink& link, int order, double d1) {
  require_order(order);
  const double total = link.length();
  if (!(d1 > 0.0 && d1 < total))
    throw std::domain_error("fresnel_radius_at: d1=" + std::to_string(d1) + " is not strictly between the link nodes");
  const double d2 = total - d1;
  return std::sqrt(order * link.wavelength() * d1 * d2 / (d1 + d2));
}

double max_fresnel_radius(const RadioLink& link, int order) {
  require_order(order);
  return std::sqrt(order * kSpeedOfLight * link.length() / (4.0 * link.frequency()));
}

FresnelEllipse ellipse_of(const RadioLink& link, int order) {
  const double minor = max_fresnel_radius(link, order);
  const double half = link.length() / 2.0;
  return FresnelEllipse{link, order, std::sqrt(minor * minor + half * half), minor};
}

bool contains(const FresnelEllipse& ellipse, const Point2D& p) {
  return distance(p, ellipse.link.ap_pos()) + distance(p, ellipse.link.mp_pos()) <= 2.0 * ellipse.semi_major;
}

}  // namespace radiographer
