#include "crossing/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

namespace crossing {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

double mean_of(const std::vector<double>& v, std::size_t lo, std::size_t hi) {
    if (hi <= lo) return 0.0;
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += v[i];
    return s / static_cast<double>(hi - lo);
}

double percentile(std::vector<double> v, double p) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    std::size_t idx =
        static_cast<std::size_t>(std::ceil(p * static_cast<double>(v.size())));
    return v[std::min(idx > 0 ? idx - 1 : 0, v.size() - 1)];
}

}  // namespace

TrainResult train(const ScenarioConfig& cfg, const TrainOptions& opt) {
    validate_config(cfg);
    Rng rng(opt.seed);

    Network net(cfg.mlp);
    net.init_weights(rng);
    AdamState adam;
    RunningNormalizer obs_norm(6);
    RewardNormalizer ret_norm(cfg.ppo.gamma);

    // Independent rollout instances; each owns its reset stream and
    // discounted-return accumulator. Collection is sequential and
    // deterministic; the batch per update is train_envs * horizon.
    int n_envs = cfg.train_envs;
    std::vector<Env> envs;
    std::vector<Rng> env_rngs;
    std::vector<double> running_returns(n_envs, 0.0);
    envs.reserve(n_envs);
    for (int i = 0; i < n_envs; ++i) {
        envs.emplace_back(cfg, opt.shield);
        env_rngs.emplace_back(opt.seed + static_cast<std::uint64_t>(i));
        envs.back().reset(env_rngs.back());
    }

    TrainResult result;
    std::ostringstream metrics;
    metrics << "steps,episodes,mean_return,policy_loss,value_loss,entropy,mean_r_v,mean_r_lka,mean_r_a_lon,mean_r_a_lat,mean_r_adas,adas_count,adas_rate\n";

    std::vector<double> window_returns;
    std::int64_t window_adas = 0, window_ticks = 0;
    double window_r_v = 0.0, window_r_lka = 0.0, window_r_a_lon = 0.0,
           window_r_a_lat = 0.0, window_r_adas = 0.0;

    auto normalize_obs = [&](const Observation& o, bool update) {
        std::vector<double> raw(o.begin(), o.end());
        std::vector<double> n = obs_norm.normalize(raw, update);
        return std::vector<float>(n.begin(), n.end());
    };

    std::vector<RolloutBuffer> bufs(n_envs);
    RolloutBuffer batch;
    std::int64_t next_checkpoint = cfg.checkpoint_every;

    while (result.steps < cfg.train_steps) {
        for (int e = 0; e < n_envs; ++e) {
            RolloutBuffer& buf = bufs[e];
            buf.horizon = cfg.ppo.horizon;
            buf.clear();
            Env& env = envs[e];
            bool last_done = false;
            for (int step = 0; step < cfg.ppo.horizon; ++step) {
                std::vector<float> fobs = normalize_obs(env.observation(), true);
                PolicyDecision d = policy_decide(net, fobs, &rng);
                Env::StepOut s = env.step(d.throttle);

                double norm_r =
                    ret_norm.normalize(s.row.reward.total, s.done, true, running_returns[e]);
                buf.obs.push_back(std::move(fobs));
                buf.presquash.push_back(static_cast<float>(d.presquash));
                buf.logprob.push_back(static_cast<float>(d.logprob));
                buf.value.push_back(static_cast<float>(d.value));
                buf.reward.push_back(static_cast<float>(norm_r));
                buf.done.push_back(s.done ? 1 : 0);
                last_done = s.done;
                if (s.row.adas_active) ++window_adas;
                ++window_ticks;
                window_r_v += s.row.reward.r_v;
                window_r_lka += s.row.reward.r_lka;
                window_r_a_lon += s.row.reward.r_a_lon;
                window_r_a_lat += s.row.reward.r_a_lat;
                window_r_adas += s.row.reward.r_adas;

                if (s.done) {
                    EpisodeSummary sum = env.finish_summary();
                    result.episode_returns.push_back(sum.cumulative_reward);
                    window_returns.push_back(sum.cumulative_reward);
                    ++result.episodes;
                    env.reset(env_rngs[e]);
                }
            }
            double bootstrap = 0.0;
            if (!last_done) {
                std::vector<float> next = normalize_obs(env.observation(), false);
                bootstrap = net.forward(next).value;
            }
            compute_gae(buf, cfg.ppo.gamma, cfg.ppo.lambda, bootstrap);
        }

        // Merge the per-env windows (advantages already computed) into one
        // update batch.
        batch.clear();
        batch.horizon = cfg.ppo.horizon * n_envs;
        for (RolloutBuffer& buf : bufs) {
            batch.obs.insert(batch.obs.end(), std::make_move_iterator(buf.obs.begin()),
                             std::make_move_iterator(buf.obs.end()));
            batch.presquash.insert(batch.presquash.end(), buf.presquash.begin(),
                                   buf.presquash.end());
            batch.logprob.insert(batch.logprob.end(), buf.logprob.begin(), buf.logprob.end());
            batch.value.insert(batch.value.end(), buf.value.begin(), buf.value.end());
            batch.reward.insert(batch.reward.end(), buf.reward.begin(), buf.reward.end());
            batch.done.insert(batch.done.end(), buf.done.begin(), buf.done.end());
            batch.advantage.insert(batch.advantage.end(), buf.advantage.begin(),
                                   buf.advantage.end());
            batch.returns.insert(batch.returns.end(), buf.returns.begin(), buf.returns.end());
        }
        PpoStats st = ppo_update(net, adam, batch, cfg.ppo, rng);
        result.steps += static_cast<std::int64_t>(cfg.ppo.horizon) * n_envs;

        metrics << result.steps << ',' << result.episodes << ','
                << fmt(mean_of(window_returns, 0, window_returns.size())) << ','
                << fmt(st.policy_loss) << ',' << fmt(st.value_loss) << ','
                << fmt(st.entropy) << ',';
        double inv = window_ticks ? 1.0 / static_cast<double>(window_ticks) : 0.0;
        metrics << fmt(window_r_v * inv) << ',' << fmt(window_r_lka * inv) << ','
                << fmt(window_r_a_lon * inv) << ',' << fmt(window_r_a_lat * inv) << ','
                << fmt(window_r_adas * inv) << ',' << window_adas << ','
                << fmt(window_adas * inv) << '\n';
        window_returns.clear();
        window_adas = window_ticks = 0;
        window_r_v = window_r_lka = window_r_a_lon = window_r_a_lat = window_r_adas = 0.0;

        if (!opt.checkpoint_dir.empty() && cfg.checkpoint_every > 0 &&
            result.steps >= next_checkpoint) {
            PolicyCheckpoint ck{net, adam, obs_norm.snapshot(), ret_norm.snapshot(),
                                rng.state()};
            write_file(opt.checkpoint_dir + "/ckpt_" + std::to_string(result.steps) + ".json",
                       checkpoint_save(ck));
            while (next_checkpoint <= result.steps) next_checkpoint += cfg.checkpoint_every;
        }
    }

    result.checkpoint =
        PolicyCheckpoint{net, adam, obs_norm.snapshot(), ret_norm.snapshot(), rng.state()};
    result.metrics_csv = metrics.str();

    std::size_t n = result.episode_returns.size();
    std::size_t w = std::max<std::size_t>(1, n / 10);
    if (n > 0) {
        result.mean_return_first_window = mean_of(result.episode_returns, 0, w);
        result.mean_return_last_window = mean_of(result.episode_returns, n - w, n);
    }
    return result;
}

EvalResult evaluate_policy(const ScenarioConfig& cfg, ThrottlePolicy& policy,
                           const EvalOptions& opt) {
    Env env(cfg, opt.shield);
    Rng rng(opt.seed);
    EvalResult r;
    std::vector<double> pooled_a_lon;
    std::vector<double> delays = opt.delays.empty() ? std::vector<double>{-1.0} : opt.delays;
    bool first = true;
    for (double delay : delays) {
        env.force_delay(delay);
        for (int e = 0; e < opt.episodes_per_delay; ++e) {
            bool record = first && opt.record_first_trace;
            EpisodeResult ep = run_episode(env, policy, rng, record);
            if (record) r.first_trace = std::move(ep.trace);
            first = false;
            const EpisodeSummary& s = ep.summary;
            ++r.episodes;
            if (s.collided) ++r.collisions;
            if (s.completed) ++r.completed;
            if (s.timed_out) ++r.timeouts;
            if (s.adas_ticks > 0) ++r.episodes_with_adas;
            const std::string regime = s.regime();
            if (regime == "cut") ++r.cut_count;
            if (regime == "yield") ++r.yield_count;
            r.mean_return += s.cumulative_reward;
            r.mean_adas_rate += s.adas_rate;
            pooled_a_lon.insert(pooled_a_lon.end(), env.abs_a_lon_samples().begin(),
                                env.abs_a_lon_samples().end());
            r.summaries.push_back(s);
        }
    }
    if (r.episodes > 0) {
        r.mean_return /= r.episodes;
        r.mean_adas_rate /= r.episodes;
    }
    r.p95_abs_a_lon = percentile(std::move(pooled_a_lon), 0.95);
    return r;
}

EvalResult evaluate(const ScenarioConfig& cfg, const PolicyCheckpoint& ckpt,
                    const EvalOptions& opt) {
    NetworkPolicy policy(ckpt.net, RunningNormalizer::from_snapshot(ckpt.obs_norm),
                         /*stochastic=*/false, /*update_norm=*/false);
    return evaluate_policy(cfg, policy, opt);
}

AblateResult ablate(const ScenarioConfig& cfg, const TrainOptions& opt,
                    const EvalOptions& eval_opt) {
    AblateResult r;
    r.with_penalty = train(cfg, opt);
    ScenarioConfig no_pen = cfg;
    no_pen.reward.adas_penalty = 0.0;
    r.without_penalty = train(no_pen, opt);
    // Both policies are judged in the full-reward, shield-on environment.
    r.eval_with = evaluate(cfg, r.with_penalty.checkpoint, eval_opt);
    r.eval_without = evaluate(cfg, r.without_penalty.checkpoint, eval_opt);
    return r;
}

std::string format_eval_report(const EvalResult& r) {
    std::ostringstream os;
    os << "episodes=" << r.episodes << " collisions=" << r.collisions
       << " completed=" << r.completed << " timeouts=" << r.timeouts << "\n"
       << "mean_return=" << fmt(r.mean_return) << " mean_adas_rate=" << fmt(r.mean_adas_rate)
       << " episodes_with_adas=" << r.episodes_with_adas << "\n"
       << "cut=" << r.cut_count << " yield=" << r.yield_count
       << " p95_abs_a_lon=" << fmt(r.p95_abs_a_lon) << "\n";
    return os.str();
}

}  // namespace crossing
