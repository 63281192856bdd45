#include "crossing/config.hpp"

#include <cinttypes>
#include <cstdio>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "crossing/geometry.hpp"

namespace crossing {

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double parse_double(const std::string& s) {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing characters in number '" + s + "'");
    return v;
}

std::int64_t parse_int(const std::string& s) {
    std::size_t pos = 0;
    long long v = std::stoll(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing characters in integer '" + s + "'");
    return v;
}

std::string fmt_knots(const RewardCurve& c) {
    std::string out;
    for (std::size_t i = 0; i < c.knots.size(); ++i) {
        if (i) out += ",";
        out += fmt_double(c.knots[i].first) + ":" + fmt_double(c.knots[i].second);
    }
    return out;
}

RewardCurve parse_knots(const std::string& s) {
    RewardCurve c;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto colon = item.find(':');
        if (colon == std::string::npos)
            throw std::invalid_argument("knot '" + item + "' is not x:y");
        c.knots.emplace_back(parse_double(item.substr(0, colon)),
                             parse_double(item.substr(colon + 1)));
    }
    if (c.knots.size() < 2) throw std::invalid_argument("knot list needs at least two points");
    for (std::size_t i = 1; i < c.knots.size(); ++i)
        if (c.knots[i].first <= c.knots[i - 1].first)
            throw std::invalid_argument("knot x values must increase");
    return c;
}

std::string fmt_hidden(const std::vector<int>& h) {
    std::string out;
    for (std::size_t i = 0; i < h.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(h[i]);
    }
    return out;
}

std::vector<int> parse_hidden(const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(static_cast<int>(parse_int(item)));
    if (out.empty()) throw std::invalid_argument("hidden layer list is empty");
    return out;
}

Leg parse_leg_strict(const std::string& s) {
    auto leg = parse_leg(s);
    if (!leg) throw std::invalid_argument("unknown leg '" + s + "'");
    return *leg;
}

struct Binding {
    std::string key;
    std::function<std::string(const ScenarioConfig&)> get;
    std::function<void(ScenarioConfig&, const std::string&)> set;
};

std::vector<Binding> make_bindings() {
    std::vector<Binding> b;
    auto d = [&b](const std::string& key, std::function<double&(ScenarioConfig&)> ref) {
        b.push_back({key,
                     [ref](const ScenarioConfig& c) {
                         return fmt_double(ref(const_cast<ScenarioConfig&>(c)));
                     },
                     [ref](ScenarioConfig& c, const std::string& v) { ref(c) = parse_double(v); }});
    };
    auto i64 = [&b](const std::string& key, std::function<std::int64_t&(ScenarioConfig&)> ref) {
        b.push_back({key,
                     [ref](const ScenarioConfig& c) {
                         return std::to_string(ref(const_cast<ScenarioConfig&>(c)));
                     },
                     [ref](ScenarioConfig& c, const std::string& v) { ref(c) = parse_int(v); }});
    };
    auto i32 = [&b](const std::string& key, std::function<int&(ScenarioConfig&)> ref) {
        b.push_back({key,
                     [ref](const ScenarioConfig& c) {
                         return std::to_string(ref(const_cast<ScenarioConfig&>(c)));
                     },
                     [ref](ScenarioConfig& c, const std::string& v) {
                         ref(c) = static_cast<int>(parse_int(v));
                     }});
    };
    auto leg = [&b](const std::string& key, std::function<Leg&(ScenarioConfig&)> ref) {
        b.push_back({key,
                     [ref](const ScenarioConfig& c) {
                         return std::string(leg_name(ref(const_cast<ScenarioConfig&>(c))));
                     },
                     [ref](ScenarioConfig& c, const std::string& v) { ref(c) = parse_leg_strict(v); }});
    };
    auto knots = [&b](const std::string& key, std::function<RewardCurve&(ScenarioConfig&)> ref) {
        b.push_back({key,
                     [ref](const ScenarioConfig& c) {
                         return fmt_knots(ref(const_cast<ScenarioConfig&>(c)));
                     },
                     [ref](ScenarioConfig& c, const std::string& v) { ref(c) = parse_knots(v); }});
    };
    auto pid = [&d](const std::string& prefix, std::function<PidConfig&(ScenarioConfig&)> ref) {
        d(prefix + ".kp", [ref](ScenarioConfig& c) -> double& { return ref(c).kp; });
        d(prefix + ".ki", [ref](ScenarioConfig& c) -> double& { return ref(c).ki; });
        d(prefix + ".kd", [ref](ScenarioConfig& c) -> double& { return ref(c).kd; });
        d(prefix + ".out_min", [ref](ScenarioConfig& c) -> double& { return ref(c).out_min; });
        d(prefix + ".out_max", [ref](ScenarioConfig& c) -> double& { return ref(c).out_max; });
    };

    d("world.lane_width", [](ScenarioConfig& c) -> double& { return c.world.lane_width; });
    d("world.junction_half", [](ScenarioConfig& c) -> double& { return c.world.junction_half; });
    d("world.leg_length", [](ScenarioConfig& c) -> double& { return c.world.leg_length; });
    d("world.spacing", [](ScenarioConfig& c) -> double& { return c.world.spacing; });
    d("world.left_turn_radius",
      [](ScenarioConfig& c) -> double& { return c.world.left_turn_radius; });
    d("world.speed_limit", [](ScenarioConfig& c) -> double& { return c.world.speed_limit; });

    d("dynamics.max_drive_accel",
      [](ScenarioConfig& c) -> double& { return c.dynamics.max_drive_accel; });
    d("dynamics.max_brake_decel",
      [](ScenarioConfig& c) -> double& { return c.dynamics.max_brake_decel; });
    d("dynamics.drag_coeff", [](ScenarioConfig& c) -> double& { return c.dynamics.drag_coeff; });
    d("dynamics.rolling_resist",
      [](ScenarioConfig& c) -> double& { return c.dynamics.rolling_resist; });
    d("dynamics.wheelbase", [](ScenarioConfig& c) -> double& { return c.dynamics.wheelbase; });
    d("dynamics.max_steer_angle",
      [](ScenarioConfig& c) -> double& { return c.dynamics.max_steer_angle; });
    d("dynamics.dt", [](ScenarioConfig& c) -> double& { return c.dynamics.dt; });

    pid("pid.brake", [](ScenarioConfig& c) -> PidConfig& { return c.pid_brake; });
    pid("pid.throttle", [](ScenarioConfig& c) -> PidConfig& { return c.pid_throttle; });
    pid("pid.lka", [](ScenarioConfig& c) -> PidConfig& { return c.pid_lka; });

    d("shield.ttr_threshold",
      [](ScenarioConfig& c) -> double& { return c.shield.ttr_threshold; });
    d("shield.a_lon_max", [](ScenarioConfig& c) -> double& { return c.shield.a_lon_max; });
    i32("shield.stop_margin_waypoints",
        [](ScenarioConfig& c) -> int& { return c.shield.stop_margin_waypoints; });
    d("shield.intersection_margin",
      [](ScenarioConfig& c) -> double& { return c.shield.intersection_margin; });
    d("shield.v_eps", [](ScenarioConfig& c) -> double& { return c.shield.v_eps; });

    d("reward.adas_penalty",
      [](ScenarioConfig& c) -> double& { return c.reward.adas_penalty; });
    knots("reward.velocity_kmh",
          [](ScenarioConfig& c) -> RewardCurve& { return c.reward.velocity_kmh; });
    knots("reward.lka_m", [](ScenarioConfig& c) -> RewardCurve& { return c.reward.lka_m; });
    knots("reward.a_lon", [](ScenarioConfig& c) -> RewardCurve& { return c.reward.a_lon; });
    knots("reward.a_lat", [](ScenarioConfig& c) -> RewardCurve& { return c.reward.a_lat; });

    d("ppo.gamma", [](ScenarioConfig& c) -> double& { return c.ppo.gamma; });
    d("ppo.lambda", [](ScenarioConfig& c) -> double& { return c.ppo.lambda; });
    i32("ppo.horizon", [](ScenarioConfig& c) -> int& { return c.ppo.horizon; });
    d("ppo.lr", [](ScenarioConfig& c) -> double& { return c.ppo.lr; });
    d("ppo.clip_range", [](ScenarioConfig& c) -> double& { return c.ppo.clip_range; });
    d("ppo.entropy_coef", [](ScenarioConfig& c) -> double& { return c.ppo.entropy_coef; });
    d("ppo.vf_coef", [](ScenarioConfig& c) -> double& { return c.ppo.vf_coef; });
    d("ppo.grad_clip", [](ScenarioConfig& c) -> double& { return c.ppo.grad_clip; });
    i32("ppo.minibatches", [](ScenarioConfig& c) -> int& { return c.ppo.minibatches; });
    i32("ppo.epochs", [](ScenarioConfig& c) -> int& { return c.ppo.epochs; });

    d("mlp.init_policy_bias",
      [](ScenarioConfig& c) -> double& { return c.mlp.init_policy_bias; });
    b.push_back({"mlp.hidden",
                 [](const ScenarioConfig& c) { return fmt_hidden(c.mlp.hidden); },
                 [](ScenarioConfig& c, const std::string& v) { c.mlp.hidden = parse_hidden(v); }});
    b.push_back({"mlp.activation",
                 [](const ScenarioConfig& c) {
                     return std::string(activation_name(c.mlp.activation));
                 },
                 [](ScenarioConfig& c, const std::string& v) {
                     c.mlp.activation = parse_activation(v);
                 }});

    d("north.target_speed", [](ScenarioConfig& c) -> double& { return c.north.target_speed; });
    d("north.delay_min", [](ScenarioConfig& c) -> double& { return c.north.delay_min; });
    d("north.delay_max", [](ScenarioConfig& c) -> double& { return c.north.delay_max; });
    d("north.delay_exponent",
      [](ScenarioConfig& c) -> double& { return c.north.delay_exponent; });

    d("episode.timeout", [](ScenarioConfig& c) -> double& { return c.episode.timeout; });
    d("episode.collision_distance",
      [](ScenarioConfig& c) -> double& { return c.episode.collision_distance; });
    d("episode.ego_spawn_speed",
      [](ScenarioConfig& c) -> double& { return c.episode.ego_spawn_speed; });
    d("episode.stall_speed", [](ScenarioConfig& c) -> double& { return c.episode.stall_speed; });
    d("episode.stall_timeout",
      [](ScenarioConfig& c) -> double& { return c.episode.stall_timeout; });

    leg("route.ego_entry", [](ScenarioConfig& c) -> Leg& { return c.ego_entry; });
    leg("route.ego_exit", [](ScenarioConfig& c) -> Leg& { return c.ego_exit; });
    leg("route.north_entry", [](ScenarioConfig& c) -> Leg& { return c.north_entry; });
    leg("route.north_exit", [](ScenarioConfig& c) -> Leg& { return c.north_exit; });

    b.push_back({"train.seed",
                 [](const ScenarioConfig& c) { return std::to_string(c.seed); },
                 [](ScenarioConfig& c, const std::string& v) {
                     c.seed = static_cast<std::uint64_t>(parse_int(v));
                 }});
    i64("train.steps", [](ScenarioConfig& c) -> std::int64_t& { return c.train_steps; });
    i32("train.envs", [](ScenarioConfig& c) -> int& { return c.train_envs; });
    i64("train.checkpoint_every",
        [](ScenarioConfig& c) -> std::int64_t& { return c.checkpoint_every; });
    return b;
}

const std::vector<Binding>& bindings() {
    static const std::vector<Binding> b = make_bindings();
    return b;
}

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t z = s.find_last_not_of(" \t\r");
    return s.substr(a, z - a + 1);
}

}  // namespace

ScenarioConfig parse_config(const std::string& text) {
    ScenarioConfig cfg;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        bool found = false;
        for (const auto& binding : bindings()) {
            if (binding.key == key) {
                try {
                    binding.set(cfg, value);
                } catch (const std::exception& e) {
                    throw std::invalid_argument("line " + std::to_string(lineno) + " (" + key +
                                                "): " + e.what());
                }
                found = true;
                break;
            }
        }
        if (!found)
            throw std::invalid_argument("line " + std::to_string(lineno) + ": unknown key '" +
                                        key + "'");
    }
    return cfg;
}

ScenarioConfig load_config(const std::string& path) { return parse_config(read_file(path)); }

std::string serialize_config(const ScenarioConfig& cfg) {
    std::string out;
    for (const auto& binding : bindings()) out += binding.key + " = " + binding.get(cfg) + "\n";
    return out;
}

void validate_config(const ScenarioConfig& cfg) {
    auto require = [](bool ok, const std::string& msg) {
        if (!ok) throw std::invalid_argument("config: " + msg);
    };
    require(cfg.dynamics.dt > 0.0 && cfg.dynamics.dt <= 0.1, "dt must be in (0, 0.1]");
    require(cfg.dynamics.max_drive_accel > 0.0, "max_drive_accel must be positive");
    require(cfg.dynamics.max_brake_decel > 0.0, "max_brake_decel must be positive");
    require(cfg.dynamics.wheelbase > 0.0, "wheelbase must be positive");
    require(cfg.shield.a_lon_max < 0.0, "shield.a_lon_max must be negative");
    require(cfg.shield.ttr_threshold > 0.0, "shield.ttr_threshold must be positive");
    require(cfg.shield.stop_margin_waypoints >= 0, "stop_margin_waypoints must be >= 0");
    require(cfg.north.delay_min >= 0.0 && cfg.north.delay_max >= cfg.north.delay_min,
            "north delay window is inverted");
    require(cfg.north.delay_exponent > 0.0, "north.delay_exponent must be positive");
    require(cfg.north.target_speed > 0.0, "north.target_speed must be positive");
    require(cfg.episode.timeout > 0.0, "episode.timeout must be positive");
    require(cfg.episode.collision_distance > 0.0, "collision_distance must be positive");
    require(cfg.episode.ego_spawn_speed >= 0.0, "ego_spawn_speed must be >= 0");
    require(cfg.episode.stall_speed >= 0.0, "stall_speed must be >= 0");
    require(cfg.ppo.horizon > 0 && cfg.ppo.minibatches > 0 && cfg.ppo.epochs > 0,
            "ppo horizon/minibatches/epochs must be positive");
    require(cfg.ppo.gamma > 0.0 && cfg.ppo.gamma < 1.0, "ppo.gamma must be in (0, 1)");
    require(cfg.ppo.lambda >= 0.0 && cfg.ppo.lambda <= 1.0, "ppo.lambda must be in [0, 1]");
    require(cfg.train_steps >= 0, "train.steps must be >= 0");
    require(cfg.train_envs >= 1, "train.envs must be >= 1");
    for (int h : cfg.mlp.hidden) require(h > 0, "mlp hidden widths must be positive");
    require(cfg.ego_entry != cfg.ego_exit, "ego route entry == exit");
    require(cfg.north_entry != cfg.north_exit, "north route entry == exit");

    // Geometry + feasibility: building throws on bad dimensions; then make
    // sure the routes conflict and the ego can stop for the conflict from
    // 5 km/h above the speed limit.
    IntersectionMap map = build_intersection(cfg.world);
    WaypointPath ego_path = plan_route(map, cfg.ego_entry, cfg.ego_exit);
    WaypointPath north_path = plan_route(map, cfg.north_entry, cfg.north_exit);
    auto conflict = find_conflict_point(ego_path, north_path);
    require(conflict.has_value(), "routes do not share a conflict waypoint");
    std::size_t stop_idx = conflict->ego_index >
                                   static_cast<std::size_t>(cfg.shield.stop_margin_waypoints)
                               ? conflict->ego_index - cfg.shield.stop_margin_waypoints
                               : 0;
    double room = ego_path.cum_length[stop_idx];
    double v_hot = cfg.world.speed_limit + 5.0 / 3.6;
    double need = safe_distance(v_hot, 0.0, cfg.shield.a_lon_max);
    require(room > need, "infeasible scenario: " + fmt_double(room) +
                             " m to the stop waypoint but " + fmt_double(need) +
                             " m needed to stop from " + fmt_double(v_hot * 3.6) + " km/h");
}

}  // namespace crossing
