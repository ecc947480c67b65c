#ifndef UAVSIM_GEOMETRY_HPP
#define UAVSIM_GEOMETRY_HPP

#include <cmath>

namespace uavsim {

// Flat-earth Cartesian frame. z is altitude above the ground plane.
struct Point3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

inline Point3 operator+(const Point3& a, const Point3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Point3 operator-(const Point3& a, const Point3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Point3 operator*(double s, const Point3& p) { return {s * p.x, s * p.y, s * p.z}; }
inline bool operator==(const Point3& a, const Point3& b) { return a.x == b.x && a.y == b.y && a.z == b.z; }

inline double dot(const Point3& a, const Point3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm(const Point3& p) { return std::sqrt(dot(p, p)); }

double distance(const Point3& a, const Point3& b);
double horizontal_distance(const Point3& a, const Point3& b);

// Elevation of `air` as seen from `ground`, in degrees. 90 when the
// points are vertically aligned. Throws DomainError when the points
// coincide horizontally and air is not above ground (angle undefined).
double elevation_angle(const Point3& ground, const Point3& air);

struct Segment {
    Point3 start;
    Point3 end;

    double length() const { return distance(start, end); }
    bool is_hover() const { return start == end; }
    Point3 at(double t) const { return start + t * (end - start); }
};

// Parameter t in [0,1] of the point on `seg` closest to `p`.
double project_parameter(const Segment& seg, const Point3& p);
Point3 project_onto_segment(const Segment& seg, const Point3& p);

// Move `position` along `segment` toward segment.end by speed*dt,
// clamping at the end point. `position` must lie on the segment to
// within 1e-6 m; it is re-projected first so per-slot drift cannot
// accumulate.
Point3 advance(const Point3& position, const Segment& segment, double speed, double dt);

// Ball around `center` cut by the minimum-altitude plane z >= min_altitude.
struct SphericalCrown {
    Point3 center;
    double radius = 0.0;
    double min_altitude = 0.0;

    bool contains(const Point3& p) const {
        return distance(p, center) <= radius && p.z >= min_altitude;
    }
    bool empty() const { return center.z + radius < min_altitude; }

    // Euclidean projection onto the crown (exact; the crown is the
    // intersection of two convex sets). Throws DomainError when empty.
    Point3 project(const Point3& p) const;

    // Highest point of the crown.
    Point3 apex() const { return {center.x, center.y, center.z + radius}; }
};

} // namespace uavsim

#endif
