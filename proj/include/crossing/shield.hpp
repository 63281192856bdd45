#pragma once

#include "crossing/vehicle.hpp"
#include "crossing/world.hpp"

namespace crossing {

struct ShieldConfig {
    double ttr_threshold = 2.0;        // s, gap required to cut
    double a_lon_max = -5.0;           // m/s^2, signed deceleration target
    int stop_margin_waypoints = 1;     // stop this many waypoints before the conflict
    double intersection_margin = 30.0; // m, junction box inflation for the gate;
                                       // wide enough that the gate opens before a
                                       // full-speed ego passes its last stopping point
    double v_eps = 0.1;                // m/s, below which TTR is infinite
};

enum class ChosenAction { Learned, Safe };

struct ShieldDecision {
    ChosenAction chosen = ChosenAction::Learned;
    bool adas_active = false;  // the auxiliary state s*
    double ttr_ego = 0.0;
    double ttr_north = 0.0;
    double d_safe = 0.0;
    double d_c_ego = 0.0;
    Action action;
};

/// Time to reach a point d_c ahead at speed v; +infinity below v_eps.
double time_to_reach(double d_c, double v, double v_eps = 0.1);

/// Minimum stopping distance from v_i to v_f at constant deceleration
/// a_lon_max (negative). Throws when a_lon_max >= 0.
double safe_distance(double v_i, double v_f, double a_lon_max);

/// True iff the vehicle center lies inside the junction box inflated by
/// margin (closed region).
bool at_intersection(const VehicleState& state, const IntersectionMap& map, double margin);

/// Per-tick emergency-braking arbitration between the learned and the safety
/// action. Pure function of its inputs.
ShieldDecision shield_step(const ShieldConfig& cfg, const VehicleState& ego,
                           const VehicleState& north, const WaypointPath& ego_path,
                           const WaypointPath& north_path, const ConflictPoint& conflict,
                           const Action& a_safe, const Action& a_learn,
                           bool both_at_intersection);

}  // namespace crossing
