#pragma once

#include <cmath>
#include <random>

namespace crowdship {

/// WGS84 position in degrees.
struct LatLon {
    double lat = 0.0;
    double lon = 0.0;

    friend bool operator==(const LatLon&, const LatLon&) = default;
};

inline constexpr double kEarthRadiusMeters = 6371000.0;

/// Great-circle (haversine) distance in meters.
double distance(const LatLon& a, const LatLon& b);

/// Point at `fraction` of the way along the great circle from `a` to `b`.
/// fraction is clamped to [0, 1].
LatLon interpolate(const LatLon& a, const LatLon& b, double fraction);

/// Destination reached by travelling `meters` from `origin` on initial
/// bearing `bearing_rad` (clockwise from north).
LatLon offset(const LatLon& origin, double bearing_rad, double meters);

/// Advance from `from` toward `to` by at most `meters`. Returns the new point;
/// lands exactly on `to` when the budget covers the remaining distance.
LatLon advance_toward(const LatLon& from, const LatLon& to, double meters);

/// Uniform point on the spherical cap of radius `radius_m` around `center`.
template <typename Rng>
LatLon sample_in_disk(const LatLon& center, double radius_m, Rng& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    constexpr double two_pi = 6.283185307179586;
    for (;;) {
        // sqrt(u) gives an area-uniform radius on a flat disk; at 1.5 km the
        // curvature error is far below a meter, the containment check is exact.
        const double r = radius_m * std::sqrt(unit(rng));
        const double theta = two_pi * unit(rng);
        const LatLon p = offset(center, theta, r);
        if (distance(center, p) <= radius_m) return p;
    }
}

}  // namespace crowdship
