#pragma once

namespace crossing {

struct PidConfig {
    double kp = 0.0;
    double ki = 0.0;
    double kd = 0.0;
    double out_min = 0.0;
    double out_max = 1.0;
    double dt = 0.02;
};

struct PidState {
    double integral = 0.0;    // accumulated error * s, anti-windup clamped
    double prev_error = 0.0;
    bool initialized = false;
};

struct PidResult {
    double output = 0.0;
    PidState state;
};

/// One discrete PID step: rectangular integration, derivative on error (zero
/// on the first call), output and ki*integral clamped to [out_min, out_max].
PidResult pid_step(const PidConfig& config, const PidState& state, double error);

// Gain sets for the three controllers: braking, throttle tracking, lane
// keeping.
PidConfig brake_pid_config(double dt = 0.02);     // 0.3 / 0.40 / 0.1, [0, 1]
PidConfig throttle_pid_config(double dt = 0.02);  // 1.5 / 0.05 / 0.002, [0, 0.7]
PidConfig lka_pid_config(double dt = 0.02);       // 0.2 / 0.01 / 0.02, [-1, 1]

/// Emergency braking command tracking a target deceleration a_lon_max
/// (negative). Error convention: measured - target, so that insufficient
/// deceleration raises the brake command.
PidResult safety_brake(const PidConfig& config, const PidState& state,
                       double a_lon_measured, double a_lon_max);

/// Throttle toward the speed limit; error = v_lim - v.
PidResult throttle_tracking(const PidConfig& config, const PidState& state, double v,
                            double v_lim);

/// Steering from signed cross-track deviation; positive (left) deviation
/// yields negative steer.
PidResult lka_steering(const PidConfig& config, const PidState& state, double lka_error);

}  // namespace crossing
