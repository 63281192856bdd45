#pragma once

#include <string>

#include "crossing/control.hpp"
#include "crossing/nn.hpp"
#include "crossing/rl.hpp"
#include "crossing/shield.hpp"
#include "crossing/vehicle.hpp"
#include "crossing/world.hpp"

namespace crossing {

struct NorthConfig {
    double target_speed = 8.0;  // m/s
    double delay_min = 0.0;     // s, spawn delay window
    double delay_max = 12.0;
    // Spawn delay = min + (max - min) * u^delay_exponent for u ~ U[0, 1].
    // 1 = uniform; > 1 oversamples short delays, where the learned policy
    // must yield and which a uniform draw rarely exercises.
    double delay_exponent = 2.0;
};

struct EpisodeConfig {
    double timeout = 60.0;            // s
    double collision_distance = 4.5;  // m, center-to-center
    double ego_spawn_speed = 0.0;         // m/s; spawns at rest
    double stall_speed = 1.5;             // m/s; below this the ego counts as stalled
    double stall_timeout = 5.0;           // s stopped without a safety hold ends the
                                          // episode; <= 0 disables
};

/// Full scenario: world geometry, plant, controllers, shield, rewards,
/// training schedule, and the two routes.
struct ScenarioConfig {
    WorldConfig world;
    DynamicsParams dynamics;
    PidConfig pid_brake = brake_pid_config();
    PidConfig pid_throttle = throttle_pid_config();
    PidConfig pid_lka = lka_pid_config();
    ShieldConfig shield;
    RewardConfig reward;
    PpoConfig ppo;
    MlpSpec mlp;
    NorthConfig north;
    EpisodeConfig episode;

    Leg ego_entry = Leg::South;
    Leg ego_exit = Leg::West;
    Leg north_entry = Leg::North;
    Leg north_exit = Leg::South;

    std::uint64_t seed = 1;
    std::int64_t train_steps = 200000;
    int train_envs = 16;  // parallel rollout instances per update
    std::int64_t checkpoint_every = 50000;  // env steps between checkpoints
};

/// Parses "key = value" lines ('#' comments, blank lines allowed). Unknown
/// keys and malformed values raise std::invalid_argument. Starts from
/// defaults; the file only needs the keys it overrides.
ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::string& path);

/// Emits every key so that parse_config(serialize_config(c)) == c.
std::string serialize_config(const ScenarioConfig& cfg);

/// Structural checks plus a feasibility check: the ego spawn must leave
/// enough room to stop for the conflict from 5 km/h above the speed limit.
/// Throws std::invalid_argument with a specific message.
void validate_config(const ScenarioConfig& cfg);

}  // namespace crossing
