#include "ranlab/dqn.hpp"

#include <algorithm>
#include <numeric>

namespace ranlab::drl {

std::vector<const Experience*> ReplayBuffer::sample(size_t batch_size, Rng& rng) const {
    if (batch_size > buf_.size())
        throw std::invalid_argument("ReplayBuffer::sample: batch larger than buffer");
    // partial Fisher-Yates over an index array
    std::vector<size_t> idx(buf_.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::vector<const Experience*> out;
    out.reserve(batch_size);
    for (size_t k = 0; k < batch_size; ++k) {
        const size_t pick = k + rng.next_below(idx.size() - k);
        std::swap(idx[k], idx[pick]);
        out.push_back(&buf_[idx[k]]);
    }
    return out;
}

double dqn_td_target(double reward, std::span<const double> next_state, double gamma,
                     const Mlp& target_net) {
    if (gamma == 0.0) return reward;
    const auto q = target_net.forward(next_state);
    const double best = *std::max_element(q.begin(), q.end());
    return reward + gamma * best;
}

int select_action_dqn(std::span<const double> q_values, double epsilon, Rng& rng) {
    if (q_values.empty()) throw std::invalid_argument("select_action_dqn: empty q_values");
    if (epsilon > 0.0 && rng.next_double() < epsilon)
        return static_cast<int>(rng.next_below(q_values.size()));
    return static_cast<int>(
        std::max_element(q_values.begin(), q_values.end()) - q_values.begin());
}

double dqn_batch_loss(const std::vector<const Experience*>& batch, const Mlp& q_net,
                      const Mlp& target_net, double gamma, std::vector<double>* grads) {
    if (batch.empty()) throw std::invalid_argument("dqn_batch_loss: empty batch");
    if (grads) grads->assign(q_net.param_count(), 0.0);
    double loss = 0.0;
    const double inv_n = 1.0 / static_cast<double>(batch.size());
    for (const Experience* e : batch) {
        const double target = dqn_td_target(e->reward, e->next_state, gamma, target_net);
        Mlp::Tape tape;
        const auto q = q_net.forward(e->state, tape);
        const double err = q[e->action] - target;
        loss += err * err * inv_n;
        if (grads) {
            std::vector<double> upstream(q.size(), 0.0);
            upstream[e->action] = 2.0 * err * inv_n;
            const auto g = q_net.backward(tape, upstream);
            for (size_t i = 0; i < g.size(); ++i) (*grads)[i] += g[i];
        }
    }
    return loss;
}

DqnAgent DqnAgent::make(size_t state_dim, size_t n_actions, const DqnConfig& cfg, Rng& rng) {
    if (cfg.epsilon < 0.0 || cfg.epsilon > 1.0)
        throw std::invalid_argument("DqnConfig: epsilon must be in [0, 1]");
    if (cfg.gamma < 0.0 || cfg.gamma > 1.0)
        throw std::invalid_argument("DqnConfig: gamma must be in [0, 1]");
    DqnAgent agent{Mlp(), Mlp(), cfg, ReplayBuffer(cfg.buffer_capacity), {}, 0, 0};
    agent.q_net = Mlp::random(
        {state_dim, 50, 50, 50, 50, 50, n_actions},
        {Activation::Relu, Activation::Relu, Activation::Relu, Activation::Relu,
         Activation::Relu, Activation::Linear},
        rng);
    agent.target_net = agent.q_net;
    return agent;
}

DqnUpdateResult DqnAgent::update(Rng& rng) {
    DqnUpdateResult res;
    if (buffer.size() < static_cast<size_t>(cfg.batch_size)) {
        ++skipped_updates;
        return res;
    }
    const auto batch = buffer.sample(cfg.batch_size, rng);
    std::vector<double> grads;
    res.loss = dqn_batch_loss(batch, q_net, target_net, cfg.gamma, &grads);
    if (!std::isfinite(res.loss))
        throw std::runtime_error("dqn update diverged: non-finite loss after " +
                                 std::to_string(grad_steps) + " gradient steps");
    adam_step(q_net.params(), grads, opt, cfg.lr);
    ++grad_steps;
    res.applied = true;
    if (cfg.target_sync_period > 0 && grad_steps % cfg.target_sync_period == 0) {
        sync_target();
        res.synced = true;
    }
    return res;
}

}  // namespace ranlab::drl
