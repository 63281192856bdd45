#pragma once

#include <string>
#include <vector>

#include "crossing/sim.hpp"

namespace crossing {

struct TrainOptions {
    std::uint64_t seed = 1;
    bool shield = true;
    std::string checkpoint_dir;  // periodic checkpoints land here when set
};

struct TrainResult {
    PolicyCheckpoint checkpoint;
    int episodes = 0;
    std::int64_t steps = 0;
    std::string metrics_csv;                 // one row per PPO iteration
    std::vector<double> episode_returns;     // raw (unnormalized) totals
    double mean_return_first_window = 0.0;   // first / last 10% of episodes
    double mean_return_last_window = 0.0;
};

/// PPO training against the shielded (or unshielded) environment. Honors
/// cfg.train_steps; zero steps still yields a valid freshly initialized
/// checkpoint.
TrainResult train(const ScenarioConfig& cfg, const TrainOptions& opt);

struct EvalOptions {
    std::vector<double> delays;  // forced north spawn delays; empty = sampled
    int episodes_per_delay = 1;
    std::uint64_t seed = 1;
    bool shield = true;
    bool record_first_trace = false;
};

struct EvalResult {
    int episodes = 0;
    int collisions = 0;
    int completed = 0;
    int timeouts = 0;
    int episodes_with_adas = 0;
    int cut_count = 0;
    int yield_count = 0;
    double mean_return = 0.0;
    double mean_adas_rate = 0.0;
    double p95_abs_a_lon = 0.0;  // pooled over all ticks
    std::vector<EpisodeSummary> summaries;
    std::vector<TraceRow> first_trace;
};

/// Deterministic-policy evaluation of a checkpoint with frozen normalizer
/// statistics.
EvalResult evaluate(const ScenarioConfig& cfg, const PolicyCheckpoint& ckpt,
                    const EvalOptions& opt);

/// Evaluation driver shared with the acceptance harness: any policy, any
/// delay grid.
EvalResult evaluate_policy(const ScenarioConfig& cfg, ThrottlePolicy& policy,
                           const EvalOptions& opt);

struct AblateResult {
    TrainResult with_penalty;
    TrainResult without_penalty;
    EvalResult eval_with;
    EvalResult eval_without;
};

/// Trains twice (full reward vs. zeroed braking penalty) and evaluates both
/// with the shield on.
AblateResult ablate(const ScenarioConfig& cfg, const TrainOptions& opt,
                    const EvalOptions& eval_opt);

std::string format_eval_report(const EvalResult& r);

}  // namespace crossing
