#include "crossing/rl.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace crossing {

namespace {
constexpr double kLogSqrt2Pi = 0.9189385332046727;  // log(sqrt(2*pi))
}

Observation observe(const VehicleState& ego, const VehicleState& north) {
    return {ego.x, ego.y, ego.v, north.x, north.y, north.v};
}

double RewardCurve::eval(double x) const {
    if (knots.empty()) throw std::invalid_argument("reward curve has no knots");
    if (x <= knots.front().first) return knots.front().second;
    if (x >= knots.back().first) return knots.back().second;
    for (std::size_t i = 1; i < knots.size(); ++i) {
        if (x <= knots[i].first) {
            auto [x0, y0] = knots[i - 1];
            auto [x1, y1] = knots[i];
            double t = (x - x0) / (x1 - x0);
            return y0 + t * (y1 - y0);
        }
    }
    return knots.back().second;
}

double reward_adas(const RewardConfig& cfg, bool adas_active) {
    return adas_active ? cfg.adas_penalty : 0.0;
}

double reward_velocity(const RewardConfig& cfg, double v_ms) {
    return cfg.velocity_kmh.eval(v_ms * 3.6);
}

double reward_lka(const RewardConfig& cfg, double deviation_m) {
    return cfg.lka_m.eval(deviation_m);
}

double reward_a_lon(const RewardConfig& cfg, double a) { return cfg.a_lon.eval(a); }

double reward_a_lat(const RewardConfig& cfg, double a) { return cfg.a_lat.eval(a); }

RewardBreakdown compute_reward(const RewardConfig& cfg, bool adas_active, double v_ms,
                               double deviation_m, double a_lon, double a_lat) {
    RewardBreakdown b;
    b.r_adas = reward_adas(cfg, adas_active);
    b.r_v = reward_velocity(cfg, v_ms);
    b.r_lka = reward_lka(cfg, deviation_m);
    b.r_a_lon = reward_a_lon(cfg, a_lon);
    b.r_a_lat = reward_a_lat(cfg, a_lat);
    b.total = b.r_adas + b.r_v + b.r_lka + b.r_a_lon + b.r_a_lat;
    return b;
}

// ---------------------------------------------------------------------------

RunningNormalizer::RunningNormalizer(std::size_t dim, double clip)
    : mean_(dim, 0.0), m2_(dim, 0.0), clip_(clip) {
    if (dim == 0) throw std::invalid_argument("normalizer dim must be positive");
    if (clip <= 0.0) throw std::invalid_argument("normalizer clip must be positive");
}

std::vector<double> RunningNormalizer::normalize(const std::vector<double>& x, bool update) {
    if (x.size() != mean_.size()) throw std::invalid_argument("normalizer dim mismatch");
    if (update) {
        count_ += 1.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            double delta = x[i] - mean_[i];
            mean_[i] += delta / count_;
            m2_[i] += delta * (x[i] - mean_[i]);
        }
    }
    if (count_ < 2.0) return x;
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        double var = m2_[i] / count_;
        double z = (x[i] - mean_[i]) / std::sqrt(var + 1e-8);
        out[i] = std::clamp(z, -clip_, clip_);
    }
    return out;
}

std::vector<double> RunningNormalizer::variance() const {
    std::vector<double> var(m2_.size(), 0.0);
    if (count_ >= 1.0)
        for (std::size_t i = 0; i < m2_.size(); ++i) var[i] = m2_[i] / count_;
    return var;
}

NormalizerSnapshot RunningNormalizer::snapshot() const {
    NormalizerSnapshot s;
    s.count = count_;
    s.mean = mean_;
    s.var = m2_;  // raw M2 sums so the round trip is exact
    s.clip = clip_;
    return s;
}

RunningNormalizer RunningNormalizer::from_snapshot(const NormalizerSnapshot& snap) {
    if (snap.mean.size() != snap.var.size() || snap.mean.empty())
        throw std::runtime_error("malformed normalizer snapshot");
    RunningNormalizer n(snap.mean.size(), snap.clip);
    n.count_ = snap.count;
    n.mean_ = snap.mean;
    n.m2_ = snap.var;
    return n;
}

RewardNormalizer::RewardNormalizer(double gamma, double clip)
    : rms_(1, clip), gamma_(gamma), clip_(clip) {}

double RewardNormalizer::normalize(double reward, bool episode_done, bool update) {
    return normalize(reward, episode_done, update, running_return_);
}

double RewardNormalizer::normalize(double reward, bool episode_done, bool update,
                                   double& running_return) {
    if (update) {
        running_return = running_return * gamma_ + reward;
        rms_.normalize({running_return}, true);
    }
    double out = reward;
    if (rms_.count() >= 2.0) {
        double var = rms_.variance()[0];
        out = std::clamp(reward / std::sqrt(var + 1e-8), -clip_, clip_);
    }
    if (episode_done) running_return = 0.0;
    return out;
}

RewardNormalizer RewardNormalizer::from_snapshot(const NormalizerSnapshot& snap, double gamma) {
    RewardNormalizer n(gamma, snap.clip);
    n.rms_ = RunningNormalizer::from_snapshot(snap);
    return n;
}

// ---------------------------------------------------------------------------

double throttle_from_presquash(double u) { return 0.5 * (std::tanh(u) + 1.0); }

double presquash_logprob(double mean, double log_std, double u) {
    double std = std::exp(log_std);
    double z = (u - mean) / std;
    double gauss = -0.5 * z * z - log_std - kLogSqrt2Pi;
    // log |d throttle / du| = log(0.5 * sech^2 u), evaluated stably.
    double au = std::fabs(u);
    double log_sech2 = std::log(4.0) - 2.0 * au - 2.0 * std::log1p(std::exp(-2.0 * au));
    double log_jac = std::log(0.5) + log_sech2;
    return gauss - log_jac;
}

double gaussian_entropy(double log_std) { return 0.5 + 0.5 * std::log(2.0 * M_PI) + log_std; }

PolicyDecision policy_decide(const Network& net, const std::vector<float>& obs, Rng* rng) {
    Network::Output out = net.forward(obs);
    double mean = out.mean;
    double log_std = net.log_std();
    PolicyDecision d;
    d.value = out.value;
    d.presquash = rng ? mean + std::exp(log_std) * rng->normal() : mean;
    d.throttle = throttle_from_presquash(d.presquash);
    d.logprob = presquash_logprob(mean, log_std, d.presquash);
    return d;
}

// ---------------------------------------------------------------------------

void RolloutBuffer::clear() {
    obs.clear();
    presquash.clear();
    logprob.clear();
    value.clear();
    reward.clear();
    done.clear();
    advantage.clear();
    returns.clear();
}

void compute_gae(RolloutBuffer& buf, double gamma, double lambda, double bootstrap_value) {
    int n = buf.size();
    buf.advantage.assign(n, 0.0);
    buf.returns.assign(n, 0.0);
    double adv = 0.0;
    double next_value = bootstrap_value;
    for (int t = n - 1; t >= 0; --t) {
        double mask = buf.done[t] ? 0.0 : 1.0;
        double delta = buf.reward[t] + gamma * next_value * mask - buf.value[t];
        adv = delta + gamma * lambda * mask * adv;
        buf.advantage[t] = adv;
        buf.returns[t] = adv + buf.value[t];
        next_value = buf.value[t];
    }
}

PpoStats ppo_update(Network& net, AdamState& adam, RolloutBuffer& buf, const PpoConfig& cfg,
                    Rng& rng) {
    int n = buf.size();
    if (n == 0) throw std::invalid_argument("ppo_update on empty buffer");
    if (buf.advantage.size() != static_cast<std::size_t>(n))
        throw std::invalid_argument("ppo_update before compute_gae");

    // Standardize advantages across the whole buffer.
    double mean = 0.0;
    for (double a : buf.advantage) mean += a;
    mean /= n;
    double var = 0.0;
    for (double a : buf.advantage) var += (a - mean) * (a - mean);
    var /= n;
    double sd = std::sqrt(var);
    std::vector<double> adv_std(n);
    for (int i = 0; i < n; ++i)
        adv_std[i] = sd > 1e-8 ? (buf.advantage[i] - mean) / sd : buf.advantage[i] - mean;

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);

    PpoStats stats;
    int stat_batches = 0;
    std::vector<float> grad;
    Network::Cache cache;

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        // Fisher-Yates driven by the trainer RNG for determinism.
        for (int i = n - 1; i > 0; --i) {
            int j = static_cast<int>(rng.uniform_int(0, i));
            std::swap(order[i], order[j]);
        }
        for (int mb = 0; mb < cfg.minibatches; ++mb) {
            int lo = static_cast<int>(static_cast<long long>(n) * mb / cfg.minibatches);
            int hi = static_cast<int>(static_cast<long long>(n) * (mb + 1) / cfg.minibatches);
            if (hi <= lo) continue;
            int m = hi - lo;

            grad.assign(net.param_count(), 0.0f);
            double pol_loss = 0.0, val_loss = 0.0, ent = 0.0;
            double log_std = net.log_std();
            double inv_var = std::exp(-2.0 * log_std);

            for (int k = lo; k < hi; ++k) {
                int idx = order[k];
                Network::Output out = net.forward(buf.obs[idx], &cache);
                double u = buf.presquash[idx];
                double lp = presquash_logprob(out.mean, log_std, u);
                double ratio = std::exp(lp - buf.logprob[idx]);
                double adv = adv_std[idx];

                bool clipped = (adv >= 0.0 && ratio > 1.0 + cfg.clip_range) ||
                               (adv < 0.0 && ratio < 1.0 - cfg.clip_range);
                double surr = clipped ? std::clamp(ratio, 1.0 - cfg.clip_range,
                                                   1.0 + cfg.clip_range) * adv
                                      : ratio * adv;
                pol_loss += -surr;
                // d(-surr)/d logprob is -ratio*adv unless the clip is active.
                double dlp = clipped ? 0.0 : -ratio * adv;
                double diff = u - out.mean;
                double d_mean = dlp * (diff * inv_var);            // dlp * d lp/d mean
                double d_log_std = dlp * (diff * diff * inv_var - 1.0);

                double verr = out.value - buf.returns[idx];
                val_loss += 0.5 * verr * verr;
                double d_value = cfg.vf_coef * verr;

                double h = gaussian_entropy(log_std);
                ent += h;
                d_log_std += -cfg.entropy_coef;  // d(-coef*H)/d log_std

                net.backward(cache, static_cast<float>(d_mean / m),
                             static_cast<float>(d_value / m), grad);
                grad.back() += static_cast<float>(d_log_std / m);
            }

            double loss = pol_loss / m + cfg.vf_coef * (val_loss / m) -
                          cfg.entropy_coef * (ent / m);
            if (!std::isfinite(loss))
                throw std::runtime_error("ppo_update: non-finite loss (policy=" +
                                         std::to_string(pol_loss / m) +
                                         " value=" + std::to_string(val_loss / m) + ")");

            clip_global_norm(grad, cfg.grad_clip);
            AdamConfig ac;
            ac.lr = cfg.lr;
            adam_step(net.params(), grad, ac, adam);

            stats.policy_loss += pol_loss / m;
            stats.value_loss += val_loss / m;
            stats.entropy += ent / m;
            ++stat_batches;
        }
    }
    if (stat_batches > 0) {
        stats.policy_loss /= stat_batches;
        stats.value_loss /= stat_batches;
        stats.entropy /= stat_batches;
    }
    return stats;
}

}  // namespace crossing
