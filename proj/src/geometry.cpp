#include "uavsim/geometry.hpp"

#include <algorithm>
#include <sstream>

#include "uavsim/errors.hpp"

namespace uavsim {

double distance(const Point3& a, const Point3& b) {
    return norm(a - b);
}

double horizontal_distance(const Point3& a, const Point3& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

double elevation_angle(const Point3& ground, const Point3& air) {
    const double dz = air.z - ground.z;
    const double h = horizontal_distance(ground, air);
    if (h == 0.0) {
        if (dz <= 0.0)
            throw DomainError("elevation_angle: undefined for coincident column (air not above ground)");
        return 90.0;
    }
    return std::atan2(dz, h) * (180.0 / 3.141592653589793238462643383279502884);
}

double project_parameter(const Segment& seg, const Point3& p) {
    const Point3 d = seg.end - seg.start;
    const double len2 = dot(d, d);
    if (len2 == 0.0)
        return 0.0;
    return std::clamp(dot(p - seg.start, d) / len2, 0.0, 1.0);
}

Point3 project_onto_segment(const Segment& seg, const Point3& p) {
    return seg.at(project_parameter(seg, p));
}

Point3 advance(const Point3& position, const Segment& segment, double speed, double dt) {
    if (speed < 0.0)
        throw DomainError("advance: negative speed");
    const double t = project_parameter(segment, position);
    const Point3 on_seg = segment.at(t);
    const double off = distance(position, on_seg);
    if (off > 1e-6) {
        std::ostringstream msg;
        msg << "advance: position is " << off << " m off the segment (tolerance 1e-6)";
        throw DomainError(msg.str());
    }
    if (segment.is_hover() || speed == 0.0 || dt == 0.0)
        return on_seg;
    const double remaining = (1.0 - t) * segment.length();
    const double step = std::min(speed * dt, remaining);
    if (step >= remaining)
        return segment.end;
    return segment.at(t + step / segment.length());
}

Point3 SphericalCrown::project(const Point3& p) const {
    if (empty())
        throw DomainError("SphericalCrown::project: empty region");
    if (contains(p))
        return p;

    // Lift onto the altitude plane; if that lands inside the ball the
    // plane was the only violated constraint.
    Point3 q = p;
    q.z = std::max(p.z, min_altitude);
    if (distance(q, center) <= radius)
        return q;

    // Surface cases target a hair-smaller ball so rounding can never
    // push the result outside the closed region.
    const double r_in = radius * (1.0 - 1e-12);

    // Ball-surface projection, valid when it stays above the plane.
    const Point3 d = p - center;
    const double dn = norm(d);
    if (dn > 0.0) {
        const Point3 b = center + (r_in / dn) * d;
        if (b.z >= min_altitude)
            return b;
    }

    // Otherwise the projection lies on the rim circle where the ball
    // meets the plane.
    const double dz = min_altitude - center.z;          // |dz| <= radius since not empty
    const double rho = std::sqrt(std::max(0.0, r_in * r_in - dz * dz));
    const double hx = p.x - center.x;
    const double hy = p.y - center.y;
    const double hn = std::hypot(hx, hy);
    if (hn == 0.0)
        return {center.x + rho, center.y, min_altitude};  // any rim point; fixed tie-break
    return {center.x + rho * hx / hn, center.y + rho * hy / hn, min_altitude};
}

} // namespace uavsim
