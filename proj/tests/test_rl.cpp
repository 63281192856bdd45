#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "crossing/rl.hpp"

using namespace crossing;

TEST_CASE("reward curve: knot values, interpolation, flat tails") {
    RewardConfig cfg;
    CHECK(cfg.velocity_kmh.eval(0.0) == doctest::Approx(-1.0));
    CHECK(cfg.velocity_kmh.eval(5.0) == doctest::Approx(0.0));
    CHECK(cfg.velocity_kmh.eval(25.0) == doctest::Approx(1.0));
    CHECK(cfg.velocity_kmh.eval(30.0) == doctest::Approx(1.0));
    CHECK(cfg.velocity_kmh.eval(35.0) == doctest::Approx(0.0));
    CHECK(cfg.velocity_kmh.eval(50.0) == doctest::Approx(-1.0));
    // linear between knots
    CHECK(cfg.velocity_kmh.eval(15.0) == doctest::Approx(0.5));
    CHECK(cfg.velocity_kmh.eval(27.5) == doctest::Approx(1.0));
    // flat beyond the outer knots
    CHECK(cfg.velocity_kmh.eval(-20.0) == doctest::Approx(-1.0));
    CHECK(cfg.velocity_kmh.eval(80.0) == doctest::Approx(-1.0));
    // 25 km/h dominates 4 km/h
    CHECK(cfg.velocity_kmh.eval(25.0) > cfg.velocity_kmh.eval(4.0));
}

TEST_CASE("reward curve is continuous at every knot") {
    RewardConfig cfg;
    for (const RewardCurve* c : {&cfg.velocity_kmh, &cfg.lka_m, &cfg.a_lon, &cfg.a_lat}) {
        for (const auto& [x, y] : c->knots) {
            CHECK(c->eval(x - 1e-9) == doctest::Approx(y).epsilon(1e-6));
            CHECK(c->eval(x + 1e-9) == doctest::Approx(y).epsilon(1e-6));
        }
    }
}

TEST_CASE("reward components and total") {
    RewardConfig cfg;
    RewardBreakdown r = compute_reward(cfg, false, 25.0 / 3.6, 0.0, 0.0, 0.0);
    CHECK(r.r_adas == doctest::Approx(0.0));
    CHECK(r.r_v == doctest::Approx(1.0));
    CHECK(r.r_lka == doctest::Approx(1.0));
    CHECK(r.r_a_lon == doctest::Approx(1.0));
    CHECK(r.r_a_lat == doctest::Approx(1.0));
    CHECK(r.total == doctest::Approx(4.0));

    RewardBreakdown braked = compute_reward(cfg, true, 25.0 / 3.6, 0.0, 0.0, 0.0);
    CHECK(braked.r_adas == doctest::Approx(-25.0));
    CHECK(braked.total == doctest::Approx(-21.0));

    // deviation of 1.5 m zeroes the LKA term regardless of sign
    CHECK(reward_lka(cfg, 1.5) == doctest::Approx(0.0));
    CHECK(reward_lka(cfg, -1.5) == doctest::Approx(0.0));
    CHECK(reward_a_lon(cfg, -5.0) == doctest::Approx(0.0));
    CHECK(reward_a_lat(cfg, 3.0) == doctest::Approx(0.0));
}

TEST_CASE("observation packs both vehicle states") {
    VehicleState e, n;
    e.x = 1.0; e.y = -2.0; e.v = 3.0;
    n.x = -4.0; n.y = 5.0; n.v = 6.0;
    Observation o = observe(e, n);
    CHECK(o[0] == 1.0);
    CHECK(o[1] == -2.0);
    CHECK(o[2] == 3.0);
    CHECK(o[3] == -4.0);
    CHECK(o[4] == 5.0);
    CHECK(o[5] == 6.0);
}

TEST_CASE("running normalizer matches a two-pass oracle") {
    Rng rng(12);
    RunningNormalizer norm(2, 100.0);
    std::vector<std::vector<double>> data;
    for (int i = 0; i < 10000; ++i) {
        std::vector<double> x = {3.0 + 2.0 * rng.normal(), -1.0 + 0.5 * rng.normal()};
        data.push_back(x);
        norm.normalize(x, true);
    }
    for (int d = 0; d < 2; ++d) {
        double mean = 0.0;
        for (auto& x : data) mean += x[d];
        mean /= data.size();
        double var = 0.0;
        for (auto& x : data) var += (x[d] - mean) * (x[d] - mean);
        var /= data.size();
        CHECK(norm.mean()[d] == doctest::Approx(mean).epsilon(1e-8));
        CHECK(norm.variance()[d] == doctest::Approx(var).epsilon(1e-8));
    }
    // normalized output is standardized
    std::vector<double> z = norm.normalize({3.0, -1.0}, false);
    CHECK(std::abs(z[0]) < 0.05);
    CHECK(std::abs(z[1]) < 0.05);
}

TEST_CASE("running normalizer is the identity before two samples") {
    RunningNormalizer norm(1);
    std::vector<double> z = norm.normalize({42.0}, true);
    CHECK(z[0] == 42.0);
}

TEST_CASE("running normalizer snapshot round-trips") {
    Rng rng(4);
    RunningNormalizer norm(3);
    for (int i = 0; i < 57; ++i)
        norm.normalize({rng.normal(), rng.normal() * 3.0, 7.0 + rng.normal()}, true);
    RunningNormalizer back = RunningNormalizer::from_snapshot(norm.snapshot());
    CHECK(back.count() == norm.count());
    std::vector<double> x = {0.3, -1.2, 6.5};
    CHECK(back.normalize(x, false) == norm.normalize(x, false));
}

TEST_CASE("reward normalizer scales without shifting and resets streams") {
    RewardNormalizer norm(0.99);
    Rng rng(3);
    // warm up the scale
    for (int i = 0; i < 2000; ++i) norm.normalize(rng.normal() * 2.0, i % 100 == 99, true);
    double a = norm.normalize(1.0, false, false);
    double b = norm.normalize(2.0, false, false);
    CHECK(b == doctest::Approx(2.0 * a));  // pure scaling, no centering
    CHECK(norm.normalize(0.0, false, false) == doctest::Approx(0.0));
}

TEST_CASE("GAE matches brute force on 100 random buffers") {
    Rng rng(77);
    for (int trial = 0; trial < 100; ++trial) {
        int n = 1 + static_cast<int>(rng.uniform() * 32);
        RolloutBuffer buf;
        buf.horizon = n;
        for (int i = 0; i < n; ++i) {
            buf.reward.push_back(static_cast<float>(rng.normal()));
            buf.value.push_back(static_cast<float>(rng.normal()));
            buf.done.push_back(rng.uniform() < 0.15 ? 1 : 0);
        }
        double gamma = 0.9 + 0.09 * rng.uniform();
        double lambda = rng.uniform();
        double bootstrap = rng.normal();
        compute_gae(buf, gamma, lambda, bootstrap);

        // brute force: A_t = sum_k (gamma*lambda)^k delta_{t+k}, truncated at
        // the first done flag (exclusive of later deltas)
        for (int t = 0; t < n; ++t) {
            double adv = 0.0, w = 1.0;
            for (int k = t; k < n; ++k) {
                double next_v = buf.done[k] ? 0.0 : (k + 1 < n ? buf.value[k + 1] : bootstrap);
                double delta = buf.reward[k] + gamma * next_v - buf.value[k];
                adv += w * delta;
                if (buf.done[k]) break;
                w *= gamma * lambda;
            }
            CHECK(std::abs(buf.advantage[t] - adv) < 1e-10 * std::max(1.0, std::abs(adv)));
            CHECK(buf.returns[t] == doctest::Approx(buf.advantage[t] + buf.value[t]));
        }
    }
}

TEST_CASE("throttle squash maps pre-squash space onto (0, 1)") {
    CHECK(throttle_from_presquash(0.0) == doctest::Approx(0.5));
    CHECK(throttle_from_presquash(100.0) == doctest::Approx(1.0));
    CHECK(throttle_from_presquash(-100.0) == doctest::Approx(0.0));
    CHECK(throttle_from_presquash(1.25) > 0.9);
}

TEST_CASE("presquash logprob matches a numeric change-of-variables check") {
    // integrate the implied throttle density over a grid: must be ~1
    double mean = 0.3, log_std = -0.5;
    double total = 0.0, du = 1e-3;
    for (double u = -8.0; u < 8.0; u += du) {
        double jac = 0.5 * (1.0 - std::tanh(u) * std::tanh(u));
        total += std::exp(presquash_logprob(mean, log_std, u)) * jac * du;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-3));
    // log-density difference between two samples equals the Gaussian part
    // plus the Jacobian part
    double lp1 = presquash_logprob(0.0, 0.0, 0.5);
    double z = 0.5;
    double gauss = -0.5 * z * z - 0.5 * std::log(2.0 * M_PI);
    double jac = std::log(0.5 * (1.0 - std::tanh(0.5) * std::tanh(0.5)));
    CHECK(lp1 == doctest::Approx(gauss - jac));
}

TEST_CASE("gaussian entropy closed form") {
    CHECK(gaussian_entropy(0.0) == doctest::Approx(0.5 * std::log(2.0 * M_PI * M_E)));
    CHECK(gaussian_entropy(1.0) - gaussian_entropy(0.0) == doctest::Approx(1.0));
}

TEST_CASE("policy_decide: mean action without rng, reproducible with") {
    Rng rng_init(8);
    Network net(MlpSpec{});
    net.init_weights(rng_init);
    std::vector<float> obs(6, 0.3f);

    PolicyDecision det = policy_decide(net, obs, nullptr);
    CHECK(det.presquash == doctest::Approx(net.forward(obs).mean));

    Rng a(5), b(5);
    PolicyDecision da = policy_decide(net, obs, &a);
    PolicyDecision db = policy_decide(net, obs, &b);
    CHECK(da.presquash == db.presquash);
    CHECK(da.logprob == db.logprob);
}

TEST_CASE("ppo_update: ratio 1 at start, zero advantage means no policy motion") {
    Rng rng(21);
    Network net(MlpSpec{6, {16, 16}, Activation::Tanh, 0.0});
    net.init_weights(rng);
    AdamState adam;

    RolloutBuffer buf;
    buf.horizon = 32;
    for (int i = 0; i < 32; ++i) {
        std::vector<float> obs(6);
        for (float& v : obs) v = static_cast<float>(rng.normal());
        PolicyDecision d = policy_decide(net, obs, &rng);
        buf.obs.push_back(obs);
        buf.presquash.push_back(static_cast<float>(d.presquash));
        buf.logprob.push_back(static_cast<float>(d.logprob));
        buf.value.push_back(static_cast<float>(d.value));
        buf.reward.push_back(0.0f);
        buf.done.push_back(0);
    }
    // identical value targets and zero advantages: only the entropy term acts
    buf.advantage.assign(32, 0.0f);
    for (int i = 0; i < 32; ++i) buf.returns.push_back(buf.value[i]);

    std::vector<float> before = net.params();
    PpoConfig cfg;
    cfg.lr = 0.0;  // freeze: stats still computed
    PpoStats st = ppo_update(net, adam, buf, cfg, rng);
    CHECK(net.params() == before);
    CHECK(st.entropy == doctest::Approx(gaussian_entropy(net.log_std())));
    CHECK(st.value_loss == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("ppo_update rejects a buffer without advantages") {
    Rng rng(2);
    Network net(MlpSpec{6, {8}, Activation::Tanh, 0.0});
    net.init_weights(rng);
    AdamState adam;
    RolloutBuffer buf;
    buf.horizon = 4;
    for (int i = 0; i < 4; ++i) {
        buf.obs.push_back(std::vector<float>(6, 0.0f));
        buf.presquash.push_back(0.0f);
        buf.logprob.push_back(-1.0f);
        buf.value.push_back(0.0f);
        buf.reward.push_back(0.0f);
        buf.done.push_back(0);
    }
    PpoConfig cfg;
    CHECK_THROWS_AS(ppo_update(net, adam, buf, cfg, rng), std::invalid_argument);
}

TEST_CASE("ppo learns a one-state bandit with optimum throttle 0.7") {
    // reward = -(throttle - 0.7)^2 on a constant observation; PPO's mean
    // action must converge near 0.7. Independent oracle for the whole
    // sample -> advantage -> gradient -> Adam chain.
    Rng rng(31);
    Network net(MlpSpec{6, {16, 16}, Activation::Tanh, 0.0});
    net.init_weights(rng);
    AdamState adam;
    PpoConfig cfg;
    cfg.lr = 5e-3;
    std::vector<float> obs(6, 0.5f);

    for (int update = 0; update < 300; ++update) {
        RolloutBuffer buf;
        buf.horizon = 64;
        for (int i = 0; i < 64; ++i) {
            PolicyDecision d = policy_decide(net, obs, &rng);
            double r = -(d.throttle - 0.7) * (d.throttle - 0.7);
            buf.obs.push_back(obs);
            buf.presquash.push_back(static_cast<float>(d.presquash));
            buf.logprob.push_back(static_cast<float>(d.logprob));
            buf.value.push_back(static_cast<float>(d.value));
            buf.reward.push_back(static_cast<float>(r));
            buf.done.push_back(1);  // one-step episodes
        }
        compute_gae(buf, cfg.gamma, cfg.lambda, 0.0);
        ppo_update(net, adam, buf, cfg, rng);
    }
    double throttle = throttle_from_presquash(net.forward(obs).mean);
    CHECK(throttle == doctest::Approx(0.7).epsilon(0.08));
}
