#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace crossing {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double norm() const { return std::hypot(x, y); }
};

inline double distance(const Vec2& a, const Vec2& b) { return (a - b).norm(); }

/// Ordered 2D waypoints with per-point cumulative arc length.
struct WaypointPath {
    std::vector<Vec2> points;
    std::vector<double> cum_length;

    std::size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }
    double length() const { return cum_length.empty() ? 0.0 : cum_length.back(); }
};

WaypointPath make_path(std::vector<Vec2> points);

/// Continuous position along a path: segment index plus fraction in [0,1).
struct PathProgress {
    std::size_t index = 0;
    double fraction = 0.0;
};

/// Arc-length coordinate of a progress marker.
double progress_arc_length(const WaypointPath& path, const PathProgress& p);

/// Projects a point onto the path polyline; returns the closest progress marker.
PathProgress project_onto_path(const WaypointPath& path, const Vec2& pose);

/// Position at a progress marker.
Vec2 point_at_progress(const WaypointPath& path, const PathProgress& p);

/// Signed perpendicular distance from pose to the polyline; positive = left of
/// the local path direction.
double signed_cross_track(const WaypointPath& path, const Vec2& pose);

/// Curvature at waypoint i from the circumcircle of (i-1, i, i+1); exact for
/// waypoints sampled on a circular arc. Endpoints copy their neighbor.
double curvature_at(const WaypointPath& path, std::size_t i);

/// Curvature linearly interpolated at a progress marker.
double curvature_at_progress(const WaypointPath& path, const PathProgress& p);

}  // namespace crossing
