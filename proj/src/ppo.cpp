#include "ranlab/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ranlab::drl {

std::pair<std::vector<double>, std::vector<double>> compute_advantages(
    const Trajectory& traj, double gamma, double gae_lambda, bool normalize) {
    const size_t n = traj.size();
    if (n == 0) throw std::invalid_argument("compute_advantages: empty trajectory");
    if (traj.values.size() != n || traj.rewards.size() != n)
        throw std::invalid_argument("compute_advantages: misaligned trajectory");

    std::vector<double> advantages(n, 0.0);
    std::vector<double> returns(n, 0.0);

    double next_value = traj.bootstrap_value;
    double next_adv = 0.0;
    double next_ret = traj.bootstrap_value;
    for (size_t i = n; i-- > 0;) {
        const double delta = traj.rewards[i] + gamma * next_value - traj.values[i];
        next_adv = delta + gamma * gae_lambda * next_adv;
        advantages[i] = next_adv;
        next_ret = traj.rewards[i] + gamma * next_ret;
        returns[i] = next_ret;
        next_value = traj.values[i];
    }

    if (normalize) {
        double mean = std::accumulate(advantages.begin(), advantages.end(), 0.0) /
                      static_cast<double>(n);
        double var = 0.0;
        for (double a : advantages) var += (a - mean) * (a - mean);
        var /= static_cast<double>(n);
        const double sd = std::sqrt(var) + 1e-8;
        for (double& a : advantages) a = (a - mean) / sd;
    }
    return {advantages, returns};
}

double ppo_clip_term(double q, double advantage, double clip_eps) {
    const double unclipped = q * advantage;
    const double clipped = std::clamp(q, 1.0 - clip_eps, 1.0 + clip_eps) * advantage;
    return std::min(unclipped, clipped);
}

PpoObjective ppo_total_objective(const PpoBatch& batch, const Mlp& actor, const Mlp& critic,
                                 const PpoConfig& cfg) {
    const size_t n = batch.states.size();
    if (n == 0 || batch.actions.size() != n || batch.log_probs_old.size() != n ||
        batch.advantages.size() != n || batch.returns.size() != n)
        throw std::invalid_argument("ppo_total_objective: misaligned batch");

    PpoObjective out;
    out.actor_grads.assign(actor.param_count(), 0.0);
    out.critic_grads.assign(critic.param_count(), 0.0);
    const double inv_n = 1.0 / static_cast<double>(n);

    for (size_t i = 0; i < n; ++i) {
        Mlp::Tape actor_tape, critic_tape;
        const auto logits = actor.forward(batch.states[i], actor_tape);
        const auto logp = log_softmax(logits);
        const auto p = softmax(logits);
        const int a = batch.actions[i];
        if (a < 0 || static_cast<size_t>(a) >= logits.size())
            throw std::invalid_argument("ppo_total_objective: action out of range");

        const double adv = batch.advantages[i];
        const double q = std::exp(logp[a] - batch.log_probs_old[i]);
        const double unclipped = q * adv;
        const double clipped = std::clamp(q, 1.0 - cfg.clip_eps, 1.0 + cfg.clip_eps) * adv;
        const double clip_val = std::min(unclipped, clipped);

        // d(clip)/dq: the unclipped branch when it attains the min, else the
        // clip derivative (zero outside the trust interval).
        double dclip_dq;
        if (unclipped <= clipped)
            dclip_dq = adv;
        else
            dclip_dq = (q > 1.0 - cfg.clip_eps && q < 1.0 + cfg.clip_eps) ? adv : 0.0;

        double entropy = 0.0;
        for (size_t k = 0; k < p.size(); ++k)
            if (p[k] > 0.0) entropy -= p[k] * logp[k];

        // actor upstream: dclip/dlogits + c2 * dS/dlogits
        std::vector<double> upstream(logits.size(), 0.0);
        for (size_t k = 0; k < logits.size(); ++k) {
            const double indicator = (static_cast<size_t>(a) == k) ? 1.0 : 0.0;
            const double dq_dlogit = q * (indicator - p[k]);
            const double ds_dlogit = -p[k] * (logp[k] + entropy);
            upstream[k] = (dclip_dq * dq_dlogit + cfg.c2 * ds_dlogit) * inv_n;
        }
        const auto ga = actor.backward(actor_tape, upstream);
        for (size_t k = 0; k < ga.size(); ++k) out.actor_grads[k] += ga[k];

        const auto vout = critic.forward(batch.states[i], critic_tape);
        const double v = vout[0];
        const double verr = v - batch.returns[i];
        const double vf = verr * verr;
        std::vector<double> vupstream{-cfg.c1 * 2.0 * verr * inv_n};
        const auto gc = critic.backward(critic_tape, vupstream);
        for (size_t k = 0; k < gc.size(); ++k) out.critic_grads[k] += gc[k];

        out.clip_term += clip_val * inv_n;
        out.value_loss += vf * inv_n;
        out.entropy += entropy * inv_n;
    }

    out.total = out.clip_term - cfg.c1 * out.value_loss + cfg.c2 * out.entropy;
    if (!std::isfinite(out.total))
        throw std::runtime_error("ppo_total_objective: non-finite objective (clip=" +
                                 std::to_string(out.clip_term) +
                                 " vf=" + std::to_string(out.value_loss) +
                                 " H=" + std::to_string(out.entropy) + ")");
    for (double g : out.actor_grads)
        if (!std::isfinite(g)) throw std::runtime_error("ppo_total_objective: NaN actor grad");
    for (double g : out.critic_grads)
        if (!std::isfinite(g)) throw std::runtime_error("ppo_total_objective: NaN critic grad");
    return out;
}

std::pair<int, double> select_action_ppo(const Mlp& actor, std::span<const double> state,
                                         Rng& rng) {
    const auto logits = actor.forward(state);
    const auto logp = log_softmax(logits);
    const auto p = softmax(logits);
    const double u = rng.next_double();
    double acc = 0.0;
    int pick = static_cast<int>(p.size()) - 1;
    for (size_t k = 0; k < p.size(); ++k) {
        acc += p[k];
        if (u < acc) {
            pick = static_cast<int>(k);
            break;
        }
    }
    return {pick, logp[pick]};
}

PpoAgent PpoAgent::make(size_t state_dim, size_t n_actions, const PpoConfig& cfg, Rng& rng) {
    if (cfg.gamma <= 0.0 || cfg.gamma > 1.0)
        throw std::invalid_argument("PpoConfig: gamma must be in (0, 1]");
    if (cfg.clip_eps <= 0.0) throw std::invalid_argument("PpoConfig: clip_eps must be > 0");
    PpoAgent agent;
    agent.cfg = cfg;
    agent.actor = Mlp::random({state_dim, 30, 30, 30, n_actions},
                              {Activation::Tanh, Activation::Tanh, Activation::Tanh,
                               Activation::Linear},
                              rng);
    agent.critic = Mlp::random({state_dim, 30, 30, 30, 1},
                               {Activation::Tanh, Activation::Tanh, Activation::Tanh,
                                Activation::Linear},
                               rng);
    return agent;
}

int PpoAgent::act_greedy(std::span<const double> state) const {
    const auto logits = actor.forward(state);
    return static_cast<int>(
        std::max_element(logits.begin(), logits.end()) - logits.begin());
}

double PpoAgent::value(std::span<const double> state) const {
    return critic.forward(state)[0];
}

double PpoAgent::update(const Trajectory& traj, Rng& rng) {
    auto [advantages, returns] =
        compute_advantages(traj, cfg.gamma, cfg.gae_lambda, cfg.normalize_advantages);

    const size_t n = traj.size();
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), 0);

    double first_objective = 0.0;
    bool first = true;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        for (size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.next_below(i)]);
        size_t done = 0;
        while (done < n) {
            const size_t take = std::min<size_t>(cfg.minibatch, n - done);
            PpoBatch batch;
            for (size_t k = 0; k < take; ++k) {
                const size_t idx = order[done + k];
                batch.states.push_back(traj.states[idx]);
                batch.actions.push_back(traj.actions[idx]);
                batch.log_probs_old.push_back(traj.log_probs[idx]);
                batch.advantages.push_back(advantages[idx]);
                batch.returns.push_back(returns[idx]);
            }
            const auto obj = ppo_total_objective(batch, actor, critic, cfg);
            if (first) {
                first_objective = obj.total;
                first = false;
            }
            // ascend the objective: Adam minimizes, so feed negated gradients
            std::vector<double> neg_a(obj.actor_grads.size());
            for (size_t k = 0; k < neg_a.size(); ++k) neg_a[k] = -obj.actor_grads[k];
            std::vector<double> neg_c(obj.critic_grads.size());
            for (size_t k = 0; k < neg_c.size(); ++k) neg_c[k] = -obj.critic_grads[k];
            adam_step(actor.params(), neg_a, actor_opt, cfg.lr);
            adam_step(critic.params(), neg_c, critic_opt, cfg.lr);
            done += take;
        }
    }
    return first_objective;
}

}  // namespace ranlab::drl
