#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "ranlab/mlp.hpp"

namespace ranlab::drl {

struct PpoConfig {
    double gamma = 0.99;        // grid values 0.5 / 0.99
    double clip_eps = 0.2;
    double c1 = 0.5;            // value-loss coefficient
    double c2 = 0.01;           // entropy bonus coefficient
    double gae_lambda = 0.95;
    double lr = 1e-3;
    int epochs = 4;
    int minibatch = 25;
    int horizon = 100;          // decisions per rollout chunk
    bool normalize_advantages = true;
};

// On-policy rollout: aligned (s_t, a_t, log-prob under theta_old, r_t, V(s_t)).
struct Trajectory {
    std::vector<std::vector<double>> states;
    std::vector<int> actions;
    std::vector<double> log_probs;
    std::vector<double> rewards;
    std::vector<double> values;
    double bootstrap_value = 0.0;  // V(s_T) at the chunk end

    size_t size() const { return rewards.size(); }
};

// GAE(lambda) advantages plus discounted returns (value targets, bootstrapped
// with V(s_T)). Advantages optionally normalized to zero mean / unit variance.
std::pair<std::vector<double>, std::vector<double>> compute_advantages(
    const Trajectory& traj, double gamma, double gae_lambda, bool normalize = true);

// min(q*A, clip(q, 1-eps, 1+eps)*A) — the per-sample clipped surrogate term.
double ppo_clip_term(double q, double advantage, double clip_eps);

struct PpoBatch {
    std::vector<std::vector<double>> states;
    std::vector<int> actions;
    std::vector<double> log_probs_old;
    std::vector<double> advantages;
    std::vector<double> returns;
};

struct PpoObjective {
    double total = 0.0;     // mean clip - c1*vf + c2*entropy (ascent direction)
    double clip_term = 0.0;
    double value_loss = 0.0;
    double entropy = 0.0;
    std::vector<double> actor_grads;   // d(total)/d(actor params)
    std::vector<double> critic_grads;  // d(total)/d(critic params)
};

// Empirical mean of the per-sample objective and its exact gradients.
// Throws on NaN in any term.
PpoObjective ppo_total_objective(const PpoBatch& batch, const Mlp& actor, const Mlp& critic,
                                 const PpoConfig& cfg);

// Categorical sample from softmax logits; returns (action, log-prob).
std::pair<int, double> select_action_ppo(const Mlp& actor, std::span<const double> state,
                                         Rng& rng);

// Actor-critic pair: 3 hidden layers of 30 tanh units each, linear heads.
struct PpoAgent {
    Mlp actor;
    Mlp critic;
    PpoConfig cfg;
    AdamState actor_opt;
    AdamState critic_opt;

    static PpoAgent make(size_t state_dim, size_t n_actions, const PpoConfig& cfg, Rng& rng);

    std::pair<int, double> act(std::span<const double> state, Rng& rng) const {
        return select_action_ppo(actor, state, rng);
    }
    int act_greedy(std::span<const double> state) const;
    double value(std::span<const double> state) const;

    // One PPO update over a completed rollout chunk (epochs x minibatches).
    // Returns the objective value of the first pass.
    double update(const Trajectory& traj, Rng& rng);
};

}  // namespace ranlab::drl
