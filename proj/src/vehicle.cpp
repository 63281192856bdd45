#include "crossing/vehicle.hpp"

#include <algorithm>

namespace crossing {

Action Action::clamped() const {
    return {std::clamp(throttle, 0.0, 1.0), std::clamp(brake, 0.0, 1.0),
            std::clamp(steer, -1.0, 1.0)};
}

VehicleState step_vehicle(const VehicleState& state, const Action& action,
                          const DynamicsParams& params, const WaypointPath& path) {
    Action a = action.clamped();
    double dt = params.dt;

    double a_cmd = a.throttle * params.max_drive_accel - a.brake * params.max_brake_decel;
    if (state.v > 0.0) a_cmd -= params.rolling_resist + params.drag_coeff * state.v * state.v;
    double v_next = std::max(0.0, state.v + a_cmd * dt);

    VehicleState next = state;
    next.v = v_next;
    double steer_angle = a.steer * params.max_steer_angle;
    next.heading = state.heading + (v_next / params.wheelbase) * std::tan(steer_angle) * dt;
    next.x = state.x + v_next * std::cos(next.heading) * dt;
    next.y = state.y + v_next * std::sin(next.heading) * dt;
    next.path_progress = project_onto_path(path, {next.x, next.y});

    Accels acc = measure_accels(state, next, dt, path);
    next.a_lon = acc.a_lon;
    next.a_lat = acc.a_lat;
    return next;
}

double cross_track_error(const VehicleState& state, const WaypointPath& path) {
    return signed_cross_track(path, {state.x, state.y});
}

Accels measure_accels(const VehicleState& prev, const VehicleState& next, double dt,
                      const WaypointPath& path) {
    if (dt <= 0.0) throw std::invalid_argument("dt must be positive");
    Accels acc;
    acc.a_lon = (next.v - prev.v) / dt;
    acc.a_lat = next.v * next.v * curvature_at_progress(path, next.path_progress);
    return acc;
}

VehicleState spawn_on_path(const WaypointPath& path, double speed) {
    if (path.size() < 2) throw std::invalid_argument("path needs at least two waypoints");
    VehicleState s;
    s.x = path.points[0].x;
    s.y = path.points[0].y;
    Vec2 dir = path.points[1] - path.points[0];
    s.heading = std::atan2(dir.y, dir.x);
    s.v = speed;
    s.path_progress = {0, 0.0};
    return s;
}

}  // namespace crossing
