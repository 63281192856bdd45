#include "crossing/control.hpp"

#include <algorithm>
#include <stdexcept>

namespace crossing {

PidResult pid_step(const PidConfig& config, const PidState& state, double error) {
    if (config.out_min >= config.out_max || config.dt <= 0.0)
        throw std::invalid_argument("invalid PID config");

    PidState next = state;
    next.integral = state.integral + error * config.dt;
    if (config.ki != 0.0) {
        double lo = config.out_min / config.ki;
        double hi = config.out_max / config.ki;
        if (lo > hi) std::swap(lo, hi);
        next.integral = std::clamp(next.integral, lo, hi);
    }
    double derivative = state.initialized ? (error - state.prev_error) / config.dt : 0.0;
    next.prev_error = error;
    next.initialized = true;

    double u = config.kp * error + config.ki * next.integral + config.kd * derivative;
    return {std::clamp(u, config.out_min, config.out_max), next};
}

PidConfig brake_pid_config(double dt) { return {0.3, 0.40, 0.1, 0.0, 1.0, dt}; }
PidConfig throttle_pid_config(double dt) { return {1.5, 0.05, 0.002, 0.0, 0.7, dt}; }
PidConfig lka_pid_config(double dt) { return {0.2, 0.01, 0.02, -1.0, 1.0, dt}; }

PidResult safety_brake(const PidConfig& config, const PidState& state,
                       double a_lon_measured, double a_lon_max) {
    return pid_step(config, state, a_lon_measured - a_lon_max);
}

PidResult throttle_tracking(const PidConfig& config, const PidState& state, double v,
                            double v_lim) {
    return pid_step(config, state, v_lim - v);
}

PidResult lka_steering(const PidConfig& config, const PidState& state, double lka_error) {
    return pid_step(config, state, -lka_error);
}

}  // namespace crossing
