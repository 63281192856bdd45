#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "crossing/geometry.hpp"

namespace crossing {

enum class Leg { North, South, East, West };

const char* leg_name(Leg leg);
std::optional<Leg> parse_leg(const std::string& name);

struct WorldConfig {
    double lane_width = 5.0;        // m
    double junction_half = 6.6;     // m, half side of the junction box
    double leg_length = 50.0;       // m
    double spacing = 2.0;           // m, target waypoint spacing
    double left_turn_radius = 4.5;  // m, must stay below lane_width
    double speed_limit = 25.0 / 3.6;  // m/s
};

struct GraphEdge {
    int to = -1;
    double cost = 0.0;
};

struct GraphNode {
    Vec2 pos;
    std::vector<GraphEdge> out;
};

/// One sampled lane chain: consecutive node ids along a leg or a junction
/// connector, in driving direction.
struct Chain {
    std::vector<int> nodes;
};

/// Four-leg cross intersection with right-hand traffic. Immutable once built.
struct IntersectionMap {
    WorldConfig cfg;
    std::vector<GraphNode> nodes;
    std::vector<Chain> chains;

    // Far endpoint node of each leg's entry/exit lane, indexed by Leg.
    int entry_node[4] = {-1, -1, -1, -1};
    int exit_node[4] = {-1, -1, -1, -1};

    bool inside_junction(const Vec2& p, double margin = 0.0) const {
        double b = cfg.junction_half + margin;
        return p.x >= -b && p.x <= b && p.y >= -b && p.y <= b;
    }
};

IntersectionMap build_intersection(const WorldConfig& cfg);

/// Minimum-arc-length route between leg far endpoints (A*, Euclidean
/// heuristic). Throws std::invalid_argument when entry == exit and
/// std::runtime_error when the graph is disconnected.
WaypointPath plan_route(const IntersectionMap& map, Leg entry, Leg exit);

/// Dijkstra reference for the A* route cost; test oracle.
double shortest_route_cost(const IntersectionMap& map, Leg entry, Leg exit);

struct ConflictPoint {
    Vec2 position;
    std::size_t ego_index = 0;
    std::size_t north_index = 0;
};

/// First shared waypoint along path_a (minimum a-index); waypoints must match
/// within 1e-6 m. Empty when the paths share no waypoint.
std::optional<ConflictPoint> find_conflict_point(const WaypointPath& path_a,
                                                 const WaypointPath& path_b);

/// Arc length from the pose's projection on the path to the target waypoint;
/// positive when the target lies ahead.
double path_distance_to(const WaypointPath& path, const Vec2& pose,
                        std::size_t target_index);
double path_distance_to(const WaypointPath& path, const PathProgress& progress,
                        std::size_t target_index);

}  // namespace crossing
