#pragma once

#include <memory>
#include <vector>

#include "crossing/config.hpp"
#include "crossing/control.hpp"
#include "crossing/rl.hpp"
#include "crossing/shield.hpp"

namespace crossing {

/// One simulation tick as recorded for traces and plots.
struct TraceRow {
    double t = 0.0;
    VehicleState ego, north;
    bool north_active = false;
    Action learned, applied;
    bool adas_active = false;
    ChosenAction chosen = ChosenAction::Learned;
    double ttr_ego = 0.0, ttr_north = 0.0, d_safe = 0.0, d_c_ego = 0.0;
    RewardBreakdown reward;
    double gap = 0.0;  // inter-center distance
};

struct EpisodeSummary {
    int steps = 0;
    double duration = 0.0;
    bool collided = false;
    bool completed = false;
    bool timed_out = false;
    double cumulative_reward = 0.0;
    int adas_ticks = 0;
    double adas_rate = 0.0;
    double min_gap = 1e18;
    double north_delay = 0.0;
    double t_ego_cross = -1.0;    // first time past the conflict waypoint
    double t_north_cross = -1.0;
    double p95_abs_a_lon = 0.0;
    double max_abs_a_lon = 0.0;
    double mean_speed = 0.0;  // m/s

    // "cut": ego clears the conflict first; "yield": the north vehicle does.
    const char* regime() const;
};

struct EpisodeResult {
    EpisodeSummary summary;
    std::vector<TraceRow> trace;
};

/// Maps raw observations to a throttle decision.
class ThrottlePolicy {
  public:
    virtual ~ThrottlePolicy() = default;
    virtual PolicyDecision decide(const Observation& obs, Rng& rng) = 0;
};

class FixedThrottlePolicy : public ThrottlePolicy {
  public:
    explicit FixedThrottlePolicy(double throttle) : throttle_(throttle) {}
    PolicyDecision decide(const Observation& obs, Rng& rng) override;

  private:
    double throttle_;
};

/// Network policy with observation normalization. Stochastic for rollouts,
/// mean action for evaluation; statistics freeze when update_norm is off.
class NetworkPolicy : public ThrottlePolicy {
  public:
    NetworkPolicy(Network net, RunningNormalizer obs_norm, bool stochastic, bool update_norm);

    PolicyDecision decide(const Observation& obs, Rng& rng) override;
    std::vector<float> normalized(const Observation& obs, bool update);

    Network& net() { return net_; }
    RunningNormalizer& obs_norm() { return obs_norm_; }

  private:
    Network net_;
    RunningNormalizer obs_norm_;
    bool stochastic_, update_norm_;
};

/// Steering command for path following: kinematic curvature feedforward plus
/// the lane-keeping PID on the signed cross-track deviation.
double steering_command(const VehicleState& state, const WaypointPath& path,
                        const DynamicsParams& dyn, const PidConfig& lka_cfg, PidState& lka_state);

/// Deterministic single-lane crossing episode. Step order per tick: observe,
/// learned action, safety action, shield arbitration, plant updates, rewards,
/// termination.
class Env {
  public:
    Env(const ScenarioConfig& cfg, bool shield_enabled);

    void reset(Rng& rng);

    /// Overrides the sampled north spawn delay on subsequent resets
    /// (negative clears the override).
    void force_delay(double delay) { forced_delay_ = delay; }

    struct StepOut {
        TraceRow row;
        bool done = false;
    };
    StepOut step(double throttle);

    Observation observation() const { return observe(ego_, north_); }
    const EpisodeSummary& summary() const { return summary_; }
    EpisodeSummary finish_summary();  // fills the percentile fields

    const ScenarioConfig& config() const { return cfg_; }
    const IntersectionMap& map() const { return map_; }
    const WaypointPath& ego_path() const { return ego_path_; }
    const WaypointPath& north_path() const { return north_path_; }
    const ConflictPoint& conflict() const { return conflict_; }
    bool done() const { return done_; }

    /// Per-tick |a_lon| samples for the current episode (percentile pooling).
    const std::vector<double>& abs_a_lon_samples() const { return abs_a_lon_; }

  private:
    ScenarioConfig cfg_;
    bool shield_enabled_;
    IntersectionMap map_;
    WaypointPath ego_path_, north_path_;
    ConflictPoint conflict_;

    VehicleState ego_, north_;
    PidState ego_lka_, ego_brake_, north_lka_, north_throttle_;
    double t_ = 0.0;
    double north_delay_ = 0.0;
    double forced_delay_ = -1.0;
    bool north_spawned_ = false;
    bool done_ = false;
    EpisodeSummary summary_;
    double speed_sum_ = 0.0;
    double stall_time_ = 0.0;
    std::vector<double> abs_a_lon_;
};

EpisodeResult run_episode(Env& env, ThrottlePolicy& policy, Rng& rng, bool record_trace);

}  // namespace crossing
