#include "crossing/geometry.hpp"

#include <algorithm>
#include <limits>

namespace crossing {

WaypointPath make_path(std::vector<Vec2> points) {
    if (points.size() < 2) throw std::invalid_argument("path needs at least two waypoints");
    WaypointPath path;
    path.points = std::move(points);
    path.cum_length.resize(path.points.size());
    double s = 0.0;
    for (std::size_t i = 0; i < path.points.size(); ++i) {
        if (i > 0) s += distance(path.points[i - 1], path.points[i]);
        path.cum_length[i] = s;
    }
    return path;
}

double progress_arc_length(const WaypointPath& path, const PathProgress& p) {
    if (path.empty()) throw std::invalid_argument("empty path");
    std::size_t i = std::min(p.index, path.size() - 1);
    if (i + 1 >= path.size()) return path.cum_length[i];
    double seg = path.cum_length[i + 1] - path.cum_length[i];
    return path.cum_length[i] + p.fraction * seg;
}

PathProgress project_onto_path(const WaypointPath& path, const Vec2& pose) {
    if (path.empty()) throw std::invalid_argument("empty path");
    if (path.size() == 1) return {0, 0.0};
    double best_d2 = std::numeric_limits<double>::infinity();
    PathProgress best;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        Vec2 a = path.points[i];
        Vec2 b = path.points[i + 1];
        Vec2 ab = b - a;
        double len2 = ab.dot(ab);
        double t = len2 > 0.0 ? std::clamp((pose - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
        Vec2 q = a + ab * t;
        double d2 = (pose - q).dot(pose - q);
        if (d2 < best_d2) {
            best_d2 = d2;
            best = {i, t};
        }
    }
    // Normalize a fraction of exactly 1 onto the next segment start.
    if (best.fraction >= 1.0 && best.index + 2 < path.size()) {
        best.index += 1;
        best.fraction = 0.0;
    }
    return best;
}

Vec2 point_at_progress(const WaypointPath& path, const PathProgress& p) {
    if (path.empty()) throw std::invalid_argument("empty path");
    std::size_t i = std::min(p.index, path.size() - 1);
    if (i + 1 >= path.size()) return path.points[i];
    Vec2 a = path.points[i];
    Vec2 b = path.points[i + 1];
    return a + (b - a) * p.fraction;
}

double signed_cross_track(const WaypointPath& path, const Vec2& pose) {
    PathProgress p = project_onto_path(path, pose);
    std::size_t i = std::min(p.index, path.size() - 2);
    Vec2 dir = path.points[i + 1] - path.points[i];
    double len = dir.norm();
    if (len <= 0.0) return 0.0;
    Vec2 q = point_at_progress(path, p);
    Vec2 off = pose - q;
    // z-component of dir x off: positive when pose is left of the direction.
    double cross = dir.x * off.y - dir.y * off.x;
    double mag = off.norm();
    return cross >= 0.0 ? mag : -mag;
}

double curvature_at(const WaypointPath& path, std::size_t i) {
    std::size_t n = path.size();
    if (n < 3) return 0.0;
    if (i == 0) i = 1;
    if (i >= n - 1) i = n - 2;
    Vec2 a = path.points[i - 1];
    Vec2 b = path.points[i];
    Vec2 c = path.points[i + 1];
    double area2 = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
    double la = distance(a, b);
    double lb = distance(b, c);
    double lc = distance(a, c);
    double denom = la * lb * lc;
    if (denom <= 1e-12) return 0.0;
    return 2.0 * area2 / denom;  // signed: positive for left turns
}

double curvature_at_progress(const WaypointPath& path, const PathProgress& p) {
    if (path.size() < 3) return 0.0;
    std::size_t i = std::min(p.index, path.size() - 1);
    double k0 = curvature_at(path, i);
    double k1 = curvature_at(path, std::min(i + 1, path.size() - 1));
    return k0 + (k1 - k0) * std::clamp(p.fraction, 0.0, 1.0);
}

}  // namespace crossing
