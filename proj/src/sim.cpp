#include "crossing/sim.hpp"

#include <algorithm>
#include <cmath>

namespace crossing {

const char* EpisodeSummary::regime() const {
    if (t_ego_cross >= 0.0 && (t_north_cross < 0.0 || t_ego_cross < t_north_cross)) return "cut";
    if (t_north_cross >= 0.0) return "yield";
    return "none";
}

PolicyDecision FixedThrottlePolicy::decide(const Observation&, Rng&) {
    PolicyDecision d;
    d.throttle = throttle_;
    return d;
}

NetworkPolicy::NetworkPolicy(Network net, RunningNormalizer obs_norm, bool stochastic,
                             bool update_norm)
    : net_(std::move(net)),
      obs_norm_(std::move(obs_norm)),
      stochastic_(stochastic),
      update_norm_(update_norm) {}

std::vector<float> NetworkPolicy::normalized(const Observation& obs, bool update) {
    std::vector<double> raw(obs.begin(), obs.end());
    std::vector<double> n = obs_norm_.normalize(raw, update);
    return std::vector<float>(n.begin(), n.end());
}

PolicyDecision NetworkPolicy::decide(const Observation& obs, Rng& rng) {
    std::vector<float> in = normalized(obs, update_norm_);
    return policy_decide(net_, in, stochastic_ ? &rng : nullptr);
}

double steering_command(const VehicleState& state, const WaypointPath& path,
                        const DynamicsParams& dyn, const PidConfig& lka_cfg,
                        PidState& lka_state) {
    double kappa = curvature_at_progress(path, state.path_progress);
    double feedforward = std::atan(dyn.wheelbase * kappa) / dyn.max_steer_angle;
    double cte = cross_track_error(state, path);
    PidResult pr = lka_steering(lka_cfg, lka_state, cte);
    lka_state = pr.state;
    return std::clamp(feedforward + pr.output, -1.0, 1.0);
}

Env::Env(const ScenarioConfig& cfg, bool shield_enabled)
    : cfg_(cfg), shield_enabled_(shield_enabled), map_(build_intersection(cfg.world)) {
    ego_path_ = plan_route(map_, cfg.ego_entry, cfg.ego_exit);
    north_path_ = plan_route(map_, cfg.north_entry, cfg.north_exit);
    auto conflict = find_conflict_point(ego_path_, north_path_);
    if (!conflict) throw std::invalid_argument("routes do not conflict");
    conflict_ = *conflict;
    Rng dummy(0);
    reset(dummy);
}

void Env::reset(Rng& rng) {
    ego_ = spawn_on_path(ego_path_, cfg_.episode.ego_spawn_speed);
    north_ = spawn_on_path(north_path_, 0.0);
    ego_lka_ = ego_brake_ = north_lka_ = north_throttle_ = PidState{};
    t_ = 0.0;
    north_delay_ = forced_delay_ >= 0.0
                       ? forced_delay_
                       : cfg_.north.delay_min +
                             (cfg_.north.delay_max - cfg_.north.delay_min) *
                                 std::pow(rng.uniform(), cfg_.north.delay_exponent);
    north_spawned_ = false;
    done_ = false;
    summary_ = EpisodeSummary{};
    summary_.north_delay = north_delay_;
    speed_sum_ = 0.0;
    stall_time_ = 0.0;
    abs_a_lon_.clear();
}

Env::StepOut Env::step(double throttle) {
    StepOut out;
    if (done_) throw std::logic_error("step() after episode end");
    TraceRow& row = out.row;
    row.t = t_;

    if (!north_spawned_ && t_ >= north_delay_) {
        north_spawned_ = true;
        north_.v = cfg_.north.target_speed;  // enters the scene at speed
    }
    bool north_driving =
        north_spawned_ && progress_arc_length(north_path_, north_.path_progress) <
                              north_path_.length() - 1e-9;

    // Learned action: policy throttle, no brake, path-following steering.
    Action learned;
    learned.throttle = std::clamp(throttle, 0.0, 1.0);
    PidState lka_after = ego_lka_;
    learned.steer = steering_command(ego_, ego_path_, cfg_.dynamics, cfg_.pid_lka, lka_after);

    // Safety action: emergency braking toward a_lon_max, same steering.
    Action safe;
    PidResult brake = safety_brake(cfg_.pid_brake, ego_brake_, ego_.a_lon, cfg_.shield.a_lon_max);
    safe.brake = brake.output;
    safe.steer = learned.steer;

    bool gate = at_intersection(ego_, map_, cfg_.shield.intersection_margin) &&
                north_driving &&
                at_intersection(north_, map_, cfg_.shield.intersection_margin);
    ShieldDecision decision;
    if (shield_enabled_) {
        decision = shield_step(cfg_.shield, ego_, north_, ego_path_, north_path_, conflict_,
                               safe, learned, gate);
    } else {
        decision.action = learned;
        decision.d_c_ego = path_distance_to(ego_path_, ego_.path_progress, conflict_.ego_index);
    }
    ego_lka_ = lka_after;
    if (decision.chosen == ChosenAction::Safe)
        ego_brake_ = brake.state;  // the brake PID only advances when applied
    else
        ego_brake_ = PidState{};

    ego_ = step_vehicle(ego_, decision.action, cfg_.dynamics, ego_path_);

    if (north_driving) {
        Action na;
        PidResult nth = throttle_tracking(cfg_.pid_throttle, north_throttle_, north_.v,
                                          cfg_.north.target_speed);
        north_throttle_ = nth.state;
        na.throttle = nth.output;
        na.steer = steering_command(north_, north_path_, cfg_.dynamics, cfg_.pid_lka, north_lka_);
        north_ = step_vehicle(north_, na, cfg_.dynamics, north_path_);
    } else {
        north_.v = 0.0;  // parked before its delay and after its route ends
        north_.a_lon = north_.a_lat = 0.0;
    }

    t_ += cfg_.dynamics.dt;

    double cte = cross_track_error(ego_, ego_path_);
    row.reward = compute_reward(cfg_.reward, decision.adas_active, ego_.v, cte, ego_.a_lon,
                                ego_.a_lat);
    row.ego = ego_;
    row.north = north_;
    row.north_active = north_driving;
    row.learned = learned;
    row.applied = decision.action;
    row.adas_active = decision.adas_active;
    row.chosen = decision.chosen;
    row.ttr_ego = decision.ttr_ego;
    row.ttr_north = decision.ttr_north;
    row.d_safe = decision.d_safe;
    row.d_c_ego = decision.d_c_ego;
    row.gap = std::hypot(ego_.x - north_.x, ego_.y - north_.y);

    summary_.steps += 1;
    summary_.duration = t_;
    speed_sum_ += ego_.v;
    summary_.cumulative_reward += row.reward.total;
    if (decision.adas_active) summary_.adas_ticks += 1;
    if (north_spawned_) summary_.min_gap = std::min(summary_.min_gap, row.gap);
    abs_a_lon_.push_back(std::fabs(ego_.a_lon));
    if (summary_.t_ego_cross < 0.0 &&
        path_distance_to(ego_path_, ego_.path_progress, conflict_.ego_index) < 0.0)
        summary_.t_ego_cross = t_;
    if (summary_.t_north_cross < 0.0 && north_spawned_ &&
        path_distance_to(north_path_, north_.path_progress, conflict_.north_index) < 0.0)
        summary_.t_north_cross = t_;

    // Standing still is only legitimate while yielding at the safety hold:
    // gate open and the conflict not yet crossed by either vehicle. Anywhere
    // else a sustained stop just farms reward and ends the episode early.
    bool conflict_crossed = summary_.t_ego_cross >= 0.0 || summary_.t_north_cross >= 0.0;
    bool holding = gate && !conflict_crossed;
    if (ego_.v < cfg_.episode.stall_speed && !holding)
        stall_time_ += cfg_.dynamics.dt;
    else
        stall_time_ = 0.0;

    if (north_spawned_ && row.gap < cfg_.episode.collision_distance) {
        summary_.collided = true;
        done_ = true;
    } else if (progress_arc_length(ego_path_, ego_.path_progress) >=
               ego_path_.length() - 1e-9) {
        summary_.completed = true;
        done_ = true;
    } else if (t_ >= cfg_.episode.timeout ||
               (cfg_.episode.stall_timeout > 0.0 &&
                stall_time_ >= cfg_.episode.stall_timeout)) {
        summary_.timed_out = true;
        done_ = true;
    }
    out.done = done_;
    return out;
}

EpisodeSummary Env::finish_summary() {
    if (summary_.steps > 0) {
        summary_.mean_speed = speed_sum_ / summary_.steps;
        summary_.adas_rate = static_cast<double>(summary_.adas_ticks) / summary_.steps;
        std::vector<double> sorted = abs_a_lon_;
        std::sort(sorted.begin(), sorted.end());
        std::size_t idx = static_cast<std::size_t>(
            std::ceil(0.95 * static_cast<double>(sorted.size()))) - 1;
        summary_.p95_abs_a_lon = sorted[std::min(idx, sorted.size() - 1)];
        summary_.max_abs_a_lon = sorted.back();
    }
    return summary_;
}

EpisodeResult run_episode(Env& env, ThrottlePolicy& policy, Rng& rng, bool record_trace) {
    env.reset(rng);
    EpisodeResult result;
    while (!env.done()) {
        PolicyDecision d = policy.decide(env.observation(), rng);
        Env::StepOut s = env.step(d.throttle);
        if (record_trace) result.trace.push_back(s.row);
    }
    result.summary = env.finish_summary();
    return result;
}

}  // namespace crossing
