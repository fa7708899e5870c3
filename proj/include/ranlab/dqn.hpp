#pragma once

#include <cstdint>
#include <deque>
#include <vector>

#include "ranlab/mlp.hpp"

namespace ranlab::drl {

struct DqnConfig {
    double gamma = 0.95;
    double epsilon = 0.1;       // epsilon-greedy exploration
    double lr = 1e-3;
    int target_sync_period = 100;  // gradient steps between hard syncs
    int batch_size = 32;
    size_t buffer_capacity = 10000;
};

struct Experience {
    std::vector<double> state;
    int action = 0;
    double reward = 0.0;
    std::vector<double> next_state;
};

// FIFO ring of experience tuples e = (s, a, r, s'). push never fails.
class ReplayBuffer {
public:
    explicit ReplayBuffer(size_t capacity) : capacity_(capacity) {}

    void push(Experience e) {
        if (buf_.size() == capacity_) buf_.pop_front();
        buf_.push_back(std::move(e));
    }
    size_t size() const { return buf_.size(); }
    size_t capacity() const { return capacity_; }
    const Experience& at(size_t i) const { return buf_[i]; }

    // Uniform sample without replacement within the batch.
    std::vector<const Experience*> sample(size_t batch_size, Rng& rng) const;

private:
    size_t capacity_;
    std::deque<Experience> buf_;
};

// Bellman target r + gamma * max_a' Q_target(s', a'). Continuing task: every
// transition is non-terminal.
double dqn_td_target(double reward, std::span<const double> next_state, double gamma,
                     const Mlp& target_net);

// Epsilon-greedy over precomputed Q-values; ties resolve to the lowest index.
int select_action_dqn(std::span<const double> q_values, double epsilon, Rng& rng);

struct DqnUpdateResult {
    bool applied = false;   // false when the buffer is short (counted no-op)
    double loss = 0.0;
    bool synced = false;
};

// Q net: 5 hidden layers of 50 relu units, linear head.
struct DqnAgent {
    Mlp q_net;
    Mlp target_net;
    DqnConfig cfg;
    ReplayBuffer buffer;
    AdamState opt;
    long grad_steps = 0;
    long skipped_updates = 0;

    static DqnAgent make(size_t state_dim, size_t n_actions, const DqnConfig& cfg, Rng& rng);

    int act(std::span<const double> state, Rng& rng) const {
        return select_action_dqn(q_net.forward(state), cfg.epsilon, rng);
    }
    int act_greedy(std::span<const double> state) const {
        return select_action_dqn(q_net.forward(state), 0.0, rng_dummy());
    }

    // One minibatch squared-TD-error Adam step; hard-syncs the target net
    // every target_sync_period gradient steps.
    DqnUpdateResult update(Rng& rng);

    void sync_target() { target_net = q_net; }

private:
    static Rng& rng_dummy() {
        static Rng r(0);
        return r;
    }
};

// Loss + gradients for a fixed batch (used by the optimizer and the frozen-
// batch tests): mean squared TD error against the target net.
double dqn_batch_loss(const std::vector<const Experience*>& batch, const Mlp& q_net,
                      const Mlp& target_net, double gamma,
                      std::vector<double>* grads = nullptr);

}  // namespace ranlab::drl
