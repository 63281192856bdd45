#pragma once

#include "crossing/geometry.hpp"

namespace crossing {

/// Normalized control triple; components are clamped before the plant sees
/// them.
struct Action {
    double throttle = 0.0;  // [0, 1]
    double brake = 0.0;     // [0, 1]
    double steer = 0.0;     // [-1, 1]

    Action clamped() const;
};

struct DynamicsParams {
    double max_drive_accel = 4.0;   // m/s^2 at full throttle
    double max_brake_decel = 8.0;   // m/s^2 at full brake
    double drag_coeff = 0.0148;     // 1/m, quadratic in speed
    double rolling_resist = 0.3;    // m/s^2
    double wheelbase = 2.7;         // m
    double max_steer_angle = 35.0 * 0.017453292519943295;  // rad
    double dt = 0.02;               // s, 50 Hz
};

struct VehicleState {
    double x = 0.0;
    double y = 0.0;
    double heading = 0.0;  // rad
    double v = 0.0;        // m/s, never negative
    double a_lon = 0.0;    // m/s^2, realized longitudinal acceleration
    double a_lat = 0.0;    // m/s^2, from path curvature
    PathProgress path_progress;
};

/// Point-mass longitudinal + kinematic-bicycle lateral update, forward Euler
/// at params.dt. Pure and deterministic.
VehicleState step_vehicle(const VehicleState& state, const Action& action,
                          const DynamicsParams& params, const WaypointPath& path);

/// Signed perpendicular deviation of the vehicle center from the path;
/// positive = left of the path direction.
double cross_track_error(const VehicleState& state, const WaypointPath& path);

/// Longitudinal acceleration from the speed change, lateral from path
/// curvature at the new progress marker.
struct Accels {
    double a_lon = 0.0;
    double a_lat = 0.0;
};
Accels measure_accels(const VehicleState& prev, const VehicleState& next, double dt,
                      const WaypointPath& path);

/// Places a vehicle at rest on a path waypoint, heading along the path.
VehicleState spawn_on_path(const WaypointPath& path, double speed = 0.0);

}  // namespace crossing
