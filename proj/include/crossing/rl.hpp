#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "crossing/nn.hpp"
#include "crossing/rng.hpp"
#include "crossing/vehicle.hpp"

namespace crossing {

// ---------------------------------------------------------------------------
// Observation

using Observation = std::array<double, 6>;  // x^e, y^e, v^e, x^n, y^n, v^n

Observation observe(const VehicleState& ego, const VehicleState& north);

// ---------------------------------------------------------------------------
// Rewards

/// Continuous piecewise-linear curve; flat beyond the outer knots.
struct RewardCurve {
    std::vector<std::pair<double, double>> knots;  // sorted by x
    double eval(double x) const;
};

struct RewardConfig {
    double adas_penalty = -25.0;
    // Velocity curve is keyed in km/h; the others in SI units.
    RewardCurve velocity_kmh = {{{0, -1}, {5, 0}, {25, 1}, {30, 1}, {35, 0}, {50, -1}}};
    RewardCurve lka_m = {{{-3, -1}, {-1.5, 0}, {0, 1}, {1.5, 0}, {3, -1}}};
    RewardCurve a_lon = {{{-10, -1}, {-5, 0}, {0, 1}, {5, 0}, {10, -1}}};
    RewardCurve a_lat = {{{-6, -1}, {-3, 0}, {0, 1}, {3, 0}, {6, -1}}};
};

struct RewardBreakdown {
    double r_adas = 0.0;
    double r_lka = 0.0;
    double r_v = 0.0;
    double r_a_lon = 0.0;
    double r_a_lat = 0.0;
    double total = 0.0;
};

double reward_adas(const RewardConfig& cfg, bool adas_active);
double reward_velocity(const RewardConfig& cfg, double v_ms);
double reward_lka(const RewardConfig& cfg, double deviation_m);
double reward_a_lon(const RewardConfig& cfg, double a);
double reward_a_lat(const RewardConfig& cfg, double a);

RewardBreakdown compute_reward(const RewardConfig& cfg, bool adas_active, double v_ms,
                               double deviation_m, double a_lon, double a_lat);

// ---------------------------------------------------------------------------
// Running normalization (Welford)

class RunningNormalizer {
  public:
    explicit RunningNormalizer(std::size_t dim, double clip = 10.0);

    /// When update is set, folds x into the statistics first. Identity while
    /// fewer than two samples have been seen.
    std::vector<double> normalize(const std::vector<double>& x, bool update);

    double count() const { return count_; }
    const std::vector<double>& mean() const { return mean_; }
    std::vector<double> variance() const;

    NormalizerSnapshot snapshot() const;  // var field carries the M2 sums
    static RunningNormalizer from_snapshot(const NormalizerSnapshot& snap);

  private:
    double count_ = 0.0;
    std::vector<double> mean_, m2_;
    double clip_;
};

/// Scales rewards by the running standard deviation of the discounted return.
class RewardNormalizer {
  public:
    explicit RewardNormalizer(double gamma, double clip = 10.0);

    double normalize(double reward, bool episode_done, bool update);
    /// Shared scale statistics with a caller-owned discounted-return
    /// accumulator, for interleaved streams.
    double normalize(double reward, bool episode_done, bool update, double& running_return);

    NormalizerSnapshot snapshot() const { return rms_.snapshot(); }
    static RewardNormalizer from_snapshot(const NormalizerSnapshot& snap, double gamma);

  private:
    RunningNormalizer rms_;
    double gamma_;
    double clip_;
    double running_return_ = 0.0;
};

// ---------------------------------------------------------------------------
// Policy distribution: Gaussian over a pre-squash variable, tanh-squashed and
// mapped to throttle in [0, 1].

double throttle_from_presquash(double u);
double presquash_logprob(double mean, double log_std, double u);
double gaussian_entropy(double log_std);

struct PolicyDecision {
    double presquash = 0.0;
    double throttle = 0.0;
    double logprob = 0.0;
    double value = 0.0;
};

/// Samples from the current policy (stochastic) or takes the mean action
/// (deterministic evaluation).
PolicyDecision policy_decide(const Network& net, const std::vector<float>& obs, Rng* rng);

// ---------------------------------------------------------------------------
// Rollout storage, GAE, PPO

struct RolloutBuffer {
    int horizon = 128;
    std::vector<std::vector<float>> obs;
    std::vector<float> presquash, logprob, value, reward;
    std::vector<std::uint8_t> done;
    std::vector<double> advantage, returns;

    void clear();
    bool full() const { return static_cast<int>(reward.size()) >= horizon; }
    int size() const { return static_cast<int>(reward.size()); }
};

/// Generalized advantage estimation with done masking; returns = adv + value.
void compute_gae(RolloutBuffer& buf, double gamma, double lambda, double bootstrap_value);

struct PpoConfig {
    double gamma = 0.99;
    double lambda = 0.9;
    int horizon = 128;
    double lr = 2.5e-4;
    double clip_range = 0.2;
    double entropy_coef = 0.01;
    double vf_coef = 0.5;
    double grad_clip = 0.5;
    int minibatches = 4;
    int epochs = 4;
};

struct PpoStats {
    double policy_loss = 0.0;
    double value_loss = 0.0;
    double entropy = 0.0;
};

/// Clipped-surrogate PPO update over the full buffer. Standardizes advantages
/// across the buffer, then runs epochs x shuffled minibatches of Adam steps.
/// Throws std::runtime_error on a non-finite loss.
PpoStats ppo_update(Network& net, AdamState& adam, RolloutBuffer& buf, const PpoConfig& cfg,
                    Rng& rng);

}  // namespace crossing
