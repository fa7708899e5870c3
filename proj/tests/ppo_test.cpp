#include <doctest.h>

#include <cmath>

#include "ranlab/ppo.hpp"

using namespace ranlab;
using namespace ranlab::drl;

namespace {

Trajectory constant_reward_traj(size_t n, double reward) {
    Trajectory t;
    for (size_t i = 0; i < n; ++i) {
        t.states.push_back({0.0});
        t.actions.push_back(0);
        t.log_probs.push_back(0.0);
        t.rewards.push_back(reward);
        t.values.push_back(0.0);
    }
    return t;
}

PpoBatch random_batch(const Mlp& actor, size_t n, size_t state_dim, size_t n_actions,
                      Rng& rng) {
    PpoBatch batch;
    for (size_t i = 0; i < n; ++i) {
        std::vector<double> s(state_dim);
        for (double& v : s) v = rng.next_double() * 2.0 - 1.0;
        const auto logits = actor.forward(s);
        const auto lp = log_softmax(logits);
        const int a = static_cast<int>(rng.next_below(n_actions));
        batch.states.push_back(std::move(s));
        batch.actions.push_back(a);
        // old policy differs from the current one -> ratios away from 1
        batch.log_probs_old.push_back(lp[a] + (rng.next_double() - 0.5) * 0.4);
        batch.advantages.push_back(rng.next_double() * 4.0 - 2.0);
        batch.returns.push_back(rng.next_double() * 2.0 - 1.0);
    }
    return batch;
}

double objective_value(const PpoBatch& batch, const Mlp& actor, const Mlp& critic,
                       const PpoConfig& cfg) {
    return ppo_total_objective(batch, actor, critic, cfg).total;
}

}  // namespace

TEST_SUITE_BEGIN("ppo");

TEST_CASE("infinite-horizon constant reward return approaches 1/(1-gamma)") {
    const auto traj = constant_reward_traj(200, 1.0);
    auto [adv, returns] = compute_advantages(traj, 0.5, 0.95, false);
    CHECK(returns[0] == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("lambda zero reduces GAE to the one-step TD error") {
    Trajectory t;
    t.states = {{0.0}, {0.0}, {0.0}};
    t.actions = {0, 0, 0};
    t.log_probs = {0.0, 0.0, 0.0};
    t.rewards = {1.0, -2.0, 0.5};
    t.values = {0.3, 0.7, -0.1};
    t.bootstrap_value = 0.4;
    const double gamma = 0.9;
    auto [adv, returns] = compute_advantages(t, gamma, 0.0, false);
    CHECK(adv[0] == doctest::Approx(1.0 + gamma * 0.7 - 0.3));
    CHECK(adv[1] == doctest::Approx(-2.0 + gamma * (-0.1) - 0.7));
    CHECK(adv[2] == doctest::Approx(0.5 + gamma * 0.4 - (-0.1)));
}

TEST_CASE("gamma zero makes returns the instantaneous rewards") {
    Trajectory t = constant_reward_traj(5, 0.0);
    t.rewards = {1.0, 2.0, 3.0, 4.0, 5.0};
    auto [adv, returns] = compute_advantages(t, 0.0, 0.95, false);
    CHECK(returns == std::vector<double>{1.0, 2.0, 3.0, 4.0, 5.0});
}

TEST_CASE("normalized advantages have zero mean and unit variance") {
    Trajectory t = constant_reward_traj(64, 0.0);
    Rng rng(3);
    for (auto& r : t.rewards) r = rng.next_double() * 10.0 - 5.0;
    auto [adv, returns] = compute_advantages(t, 0.99, 0.95, true);
    double mean = 0.0, var = 0.0;
    for (double a : adv) mean += a;
    mean /= adv.size();
    for (double a : adv) var += (a - mean) * (a - mean);
    var /= adv.size();
    CHECK(mean == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(var == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("empty trajectory is rejected") {
    CHECK_THROWS_AS(compute_advantages(Trajectory{}, 0.99, 0.95), std::invalid_argument);
}

TEST_CASE("clip term truth table") {
    CHECK(ppo_clip_term(1.0, 2.0, 0.2) == 2.0);
    CHECK(ppo_clip_term(1.5, 1.0, 0.2) == doctest::Approx(1.2));
    CHECK(ppo_clip_term(0.5, -1.0, 0.2) == doctest::Approx(-0.8));
}

TEST_CASE("clip term is a pessimistic lower bound of q*A") {
    Rng rng(0xC11F);
    for (int i = 0; i < 1'000'000; ++i) {
        const double q = rng.next_double() * 3.0 + 1e-6;
        const double adv = rng.next_double() * 20.0 - 10.0;
        const double eps = rng.next_double() * 0.5 + 1e-3;
        CHECK(ppo_clip_term(q, adv, eps) <= q * adv);
    }
}

TEST_CASE("clip gradient dies outside the trust region") {
    // q > 1+eps with positive advantage: moving q further changes nothing
    const double eps = 0.2;
    const double h = 1e-7;
    CHECK(ppo_clip_term(1.5 + h, 1.0, eps) == ppo_clip_term(1.5, 1.0, eps));
    // q < 1-eps with negative advantage
    CHECK(ppo_clip_term(0.5 - h, -1.0, eps) == ppo_clip_term(0.5, -1.0, eps));
}

TEST_CASE("on-policy batch has zero clip term after normalization") {
    Rng rng(12);
    PpoConfig cfg;
    auto agent = PpoAgent::make(3, 4, cfg, rng);
    PpoBatch batch;
    std::vector<double> advantages;
    for (int i = 0; i < 32; ++i) {
        std::vector<double> s{rng.next_double(), rng.next_double(), rng.next_double()};
        auto [a, logp] = agent.act(s, rng);
        batch.states.push_back(s);
        batch.actions.push_back(a);
        batch.log_probs_old.push_back(logp);  // theta == theta_old -> q = 1
        advantages.push_back(rng.next_double() * 2.0 - 1.0);
        batch.returns.push_back(0.0);
    }
    // normalize advantages as the updater would
    double mean = 0.0;
    for (double a : advantages) mean += a;
    mean /= advantages.size();
    double var = 0.0;
    for (double a : advantages) var += (a - mean) * (a - mean);
    var /= advantages.size();
    for (double a : advantages)
        batch.advantages.push_back((a - mean) / (std::sqrt(var) + 1e-8));
    const auto obj = ppo_total_objective(batch, agent.actor, agent.critic, cfg);
    CHECK(obj.clip_term == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("c1 = c2 = 0 reduces the objective to the clip term") {
    Rng rng(13);
    PpoConfig cfg;
    cfg.c1 = 0.0;
    cfg.c2 = 0.0;
    auto agent = PpoAgent::make(2, 3, cfg, rng);
    const auto batch = random_batch(agent.actor, 16, 2, 3, rng);
    const auto obj = ppo_total_objective(batch, agent.actor, agent.critic, cfg);
    CHECK(obj.total == doctest::Approx(obj.clip_term).epsilon(1e-12));
}

TEST_CASE("full objective gradient matches central finite differences") {
    Rng rng(14);
    PpoConfig cfg;  // c1, c2 at their defaults so every term participates
    auto agent = PpoAgent::make(3, 5, cfg, rng);
    const auto batch = random_batch(agent.actor, 24, 3, 5, rng);
    const auto obj = ppo_total_objective(batch, agent.actor, agent.critic, cfg);

    const double h = 1e-5;
    Rng pick(1555);
    int checked = 0;
    for (int k = 0; k < 150; ++k) {
        const size_t i = pick.next_below(agent.actor.param_count());
        Mlp probe = agent.actor;
        probe.params()[i] += h;
        const double up = objective_value(batch, probe, agent.critic, cfg);
        probe.params()[i] -= 2 * h;
        const double down = objective_value(batch, probe, agent.critic, cfg);
        const double fd = (up - down) / (2 * h);
        if (std::abs(fd) < 1e-10 && std::abs(obj.actor_grads[i]) < 1e-10) continue;
        const double denom = std::max({std::abs(fd), std::abs(obj.actor_grads[i]), 1e-8});
        CHECK(std::abs(fd - obj.actor_grads[i]) / denom < 1e-4);
        ++checked;
    }
    CHECK(checked > 50);

    for (int k = 0; k < 80; ++k) {
        const size_t i = pick.next_below(agent.critic.param_count());
        Mlp probe = agent.critic;
        probe.params()[i] += h;
        const double up = objective_value(batch, agent.actor, probe, cfg);
        probe.params()[i] -= 2 * h;
        const double down = objective_value(batch, agent.actor, probe, cfg);
        const double fd = (up - down) / (2 * h);
        if (std::abs(fd) < 1e-10 && std::abs(obj.critic_grads[i]) < 1e-10) continue;
        const double denom = std::max({std::abs(fd), std::abs(obj.critic_grads[i]), 1e-8});
        CHECK(std::abs(fd - obj.critic_grads[i]) / denom < 1e-4);
    }
}

TEST_CASE("NaN inputs abort the update with diagnostics") {
    Rng rng(15);
    PpoConfig cfg;
    auto agent = PpoAgent::make(2, 3, cfg, rng);
    auto batch = random_batch(agent.actor, 4, 2, 3, rng);
    batch.advantages[0] = std::nan("");
    CHECK_THROWS_AS(ppo_total_objective(batch, agent.actor, agent.critic, cfg),
                    std::runtime_error);
}

TEST_CASE("dominant logits select that action with probability ~1") {
    Mlp actor({1, 3}, {Activation::Linear});
    // logits = b: one-hot dominant bias
    actor.params() = {0, 0, 0, 0.0, 100.0, 0.0};
    Rng rng(16);
    for (int i = 0; i < 200; ++i) {
        auto [a, logp] = select_action_ppo(actor, std::vector<double>{0.0}, rng);
        CHECK(a == 1);
        CHECK(logp == doctest::Approx(0.0).epsilon(1e-9));
    }
}

TEST_CASE("uniform logits sample uniformly within 3 sigma") {
    Mlp actor({1, 10}, {Activation::Linear});  // all-zero params -> uniform
    Rng rng(17);
    const int n = 100'000;
    std::array<int, 10> counts{};
    for (int i = 0; i < n; ++i) {
        auto [a, logp] = select_action_ppo(actor, std::vector<double>{0.0}, rng);
        counts[a]++;
    }
    const double p = 0.1;
    const double sigma = std::sqrt(p * (1 - p) * n);
    for (int c : counts) CHECK(std::abs(c - n * p) <= 3 * sigma);
}

TEST_CASE("returned log-prob equals log-softmax at the sampled index") {
    Rng rng(18);
    auto agent = PpoAgent::make(2, 4, PpoConfig{}, rng);
    for (int i = 0; i < 100; ++i) {
        const std::vector<double> s{rng.next_double(), rng.next_double()};
        auto [a, logp] = agent.act(s, rng);
        const auto lp = log_softmax(agent.actor.forward(s));
        CHECK(logp == lp[a]);
    }
}

TEST_SUITE_END();
