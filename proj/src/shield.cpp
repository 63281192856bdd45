#include "crossing/shield.hpp"

#include <limits>
#include <stdexcept>

namespace crossing {

double time_to_reach(double d_c, double v, double v_eps) {
    if (d_c < 0.0) return -std::numeric_limits<double>::infinity();
    if (v <= v_eps) return std::numeric_limits<double>::infinity();
    return d_c / v;
}

double safe_distance(double v_i, double v_f, double a_lon_max) {
    if (a_lon_max >= 0.0) throw std::invalid_argument("a_lon_max must be negative");
    return (v_f * v_f - v_i * v_i) / (2.0 * a_lon_max);
}

bool at_intersection(const VehicleState& state, const IntersectionMap& map, double margin) {
    return map.inside_junction({state.x, state.y}, margin);
}

ShieldDecision shield_step(const ShieldConfig& cfg, const VehicleState& ego,
                           const VehicleState& north, const WaypointPath& ego_path,
                           const WaypointPath& north_path, const ConflictPoint& conflict,
                           const Action& a_safe, const Action& a_learn,
                           bool both_at_intersection) {
    if (conflict.ego_index >= ego_path.size() || conflict.north_index >= north_path.size())
        throw std::invalid_argument("conflict indices out of range");

    ShieldDecision d;
    d.d_c_ego = path_distance_to(ego_path, Vec2{ego.x, ego.y}, conflict.ego_index);
    double d_c_north = path_distance_to(north_path, Vec2{north.x, north.y}, conflict.north_index);
    d.ttr_ego = time_to_reach(d.d_c_ego, ego.v, cfg.v_eps);
    d.ttr_north = time_to_reach(d_c_north, north.v, cfg.v_eps);
    d.d_safe = safe_distance(ego.v, 0.0, cfg.a_lon_max);

    // Once either vehicle is past the conflict waypoint the paths can no
    // longer meet there; the gate falls back to the learned action.
    bool conflict_cleared = d.d_c_ego < 0.0 || d_c_north < 0.0;

    bool brake = false;
    if (both_at_intersection && !conflict_cleared &&
        !(d.ttr_north - d.ttr_ego > cfg.ttr_threshold)) {
        std::size_t stop_index =
            conflict.ego_index >= static_cast<std::size_t>(cfg.stop_margin_waypoints)
                ? conflict.ego_index - cfg.stop_margin_waypoints
                : 0;
        double d_stop = path_distance_to(ego_path, Vec2{ego.x, ego.y}, stop_index);
        brake = d.d_safe >= d_stop;
    }

    d.chosen = brake ? ChosenAction::Safe : ChosenAction::Learned;
    d.adas_active = brake;
    d.action = brake ? a_safe : a_learn;
    return d;
}

}  // namespace crossing
