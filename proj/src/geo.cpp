#include "crowdship/geo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace crowdship {
namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kRadToDeg = 180.0 / std::numbers::pi;

double central_angle(const LatLon& a, const LatLon& b) {
    const double phi1 = a.lat * kDegToRad;
    const double phi2 = b.lat * kDegToRad;
    const double dphi = phi2 - phi1;
    const double dlambda = (b.lon - a.lon) * kDegToRad;
    const double s1 = std::sin(dphi / 2.0);
    const double s2 = std::sin(dlambda / 2.0);
    const double h = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
    return 2.0 * std::asin(std::sqrt(std::min(1.0, h)));
}

}  // namespace

double distance(const LatLon& a, const LatLon& b) {
    return kEarthRadiusMeters * central_angle(a, b);
}

LatLon interpolate(const LatLon& a, const LatLon& b, double fraction) {
    fraction = std::clamp(fraction, 0.0, 1.0);
    if (fraction == 0.0) return a;
    if (fraction == 1.0) return b;
    const double delta = central_angle(a, b);
    if (delta < 1e-12) return a;

    const double phi1 = a.lat * kDegToRad, lambda1 = a.lon * kDegToRad;
    const double phi2 = b.lat * kDegToRad, lambda2 = b.lon * kDegToRad;
    const double wa = std::sin((1.0 - fraction) * delta) / std::sin(delta);
    const double wb = std::sin(fraction * delta) / std::sin(delta);
    const double x = wa * std::cos(phi1) * std::cos(lambda1) + wb * std::cos(phi2) * std::cos(lambda2);
    const double y = wa * std::cos(phi1) * std::sin(lambda1) + wb * std::cos(phi2) * std::sin(lambda2);
    const double z = wa * std::sin(phi1) + wb * std::sin(phi2);
    return {std::atan2(z, std::hypot(x, y)) * kRadToDeg, std::atan2(y, x) * kRadToDeg};
}

LatLon offset(const LatLon& origin, double bearing_rad, double meters) {
    const double angular = meters / kEarthRadiusMeters;
    const double phi1 = origin.lat * kDegToRad;
    const double lambda1 = origin.lon * kDegToRad;
    const double phi2 = std::asin(std::sin(phi1) * std::cos(angular) +
                                  std::cos(phi1) * std::sin(angular) * std::cos(bearing_rad));
    const double lambda2 =
        lambda1 + std::atan2(std::sin(bearing_rad) * std::sin(angular) * std::cos(phi1),
                             std::cos(angular) - std::sin(phi1) * std::sin(phi2));
    return {phi2 * kRadToDeg, lambda2 * kRadToDeg};
}

LatLon advance_toward(const LatLon& from, const LatLon& to, double meters) {
    const double remaining = distance(from, to);
    if (meters >= remaining) return to;
    return interpolate(from, to, meters / remaining);
}

}  // namespace crowdship
