#include "ranlab/mlp.hpp"

#include <algorithm>
#include <cmath>

namespace ranlab::drl {

std::string_view activation_name(Activation a) {
    switch (a) {
        case Activation::Tanh: return "tanh";
        case Activation::Relu: return "relu";
        case Activation::Linear: return "linear";
    }
    throw std::logic_error("bad Activation");
}

Activation activation_from_name(std::string_view name) {
    if (name == "tanh") return Activation::Tanh;
    if (name == "relu") return Activation::Relu;
    if (name == "linear") return Activation::Linear;
    throw std::invalid_argument("unknown activation: " + std::string(name));
}

Mlp::Mlp(std::vector<size_t> sizes, std::vector<Activation> acts)
    : sizes_(std::move(sizes)), acts_(std::move(acts)) {
    if (sizes_.size() < 2 || acts_.size() != sizes_.size() - 1)
        throw std::invalid_argument("Mlp: sizes/activations mismatch");
    size_t total = 0;
    for (size_t l = 0; l + 1 < sizes_.size(); ++l) {
        offsets_.push_back(total);
        total += sizes_[l] * sizes_[l + 1] + sizes_[l + 1];
    }
    params_.assign(total, 0.0);
}

Mlp Mlp::random(std::vector<size_t> sizes, std::vector<Activation> acts, Rng& rng) {
    Mlp net(std::move(sizes), std::move(acts));
    for (size_t l = 0; l < net.num_layers(); ++l) {
        const size_t in = net.sizes_[l];
        const size_t out = net.sizes_[l + 1];
        const double bound = std::sqrt(6.0 / static_cast<double>(in + out));
        double* w = net.params_.data() + net.weight_offset(l);
        for (size_t i = 0; i < in * out; ++i) w[i] = (2.0 * rng.next_double() - 1.0) * bound;
        // biases stay zero
    }
    return net;
}

namespace {

double apply_act(Activation a, double x) {
    switch (a) {
        case Activation::Tanh: return std::tanh(x);
        case Activation::Relu: return x > 0.0 ? x : 0.0;
        case Activation::Linear: return x;
    }
    return x;
}

double act_grad(Activation a, double pre, double post) {
    switch (a) {
        case Activation::Tanh: return 1.0 - post * post;
        case Activation::Relu: return pre > 0.0 ? 1.0 : 0.0;
        case Activation::Linear: return 1.0;
    }
    return 1.0;
}

}  // namespace

std::vector<double> Mlp::forward(std::span<const double> x) const {
    Tape tape;
    return forward(x, tape);
}

std::vector<double> Mlp::forward(std::span<const double> x, Tape& tape) const {
    if (x.size() != input_size())
        throw std::invalid_argument("Mlp::forward: input dimension mismatch");
    tape.input.assign(x.begin(), x.end());
    tape.pre.assign(num_layers(), {});
    tape.post.assign(num_layers(), {});

    std::vector<double> cur(x.begin(), x.end());
    for (size_t l = 0; l < num_layers(); ++l) {
        const size_t in = sizes_[l];
        const size_t out = sizes_[l + 1];
        const double* w = params_.data() + weight_offset(l);
        const double* b = params_.data() + bias_offset(l);
        std::vector<double> pre(out);
        for (size_t o = 0; o < out; ++o) {
            double acc = b[o];
            const double* row = w + o * in;
            for (size_t i = 0; i < in; ++i) acc += row[i] * cur[i];
            pre[o] = acc;
        }
        std::vector<double> post(out);
        for (size_t o = 0; o < out; ++o) post[o] = apply_act(acts_[l], pre[o]);
        tape.pre[l] = pre;
        tape.post[l] = post;
        cur = std::move(post);
    }
    return cur;
}

std::vector<double> Mlp::backward(const Tape& tape, std::span<const double> upstream,
                                  std::vector<double>* input_grad) const {
    if (upstream.size() != output_size())
        throw std::invalid_argument("Mlp::backward: upstream dimension mismatch");
    std::vector<double> grads(params_.size(), 0.0);
    std::vector<double> delta(upstream.begin(), upstream.end());

    for (size_t l = num_layers(); l-- > 0;) {
        const size_t in = sizes_[l];
        const size_t out = sizes_[l + 1];
        const auto& pre = tape.pre[l];
        const auto& post = tape.post[l];
        const std::vector<double>& below = (l == 0) ? tape.input : tape.post[l - 1];

        for (size_t o = 0; o < out; ++o) delta[o] *= act_grad(acts_[l], pre[o], post[o]);

        double* gw = grads.data() + weight_offset(l);
        double* gb = grads.data() + bias_offset(l);
        for (size_t o = 0; o < out; ++o) {
            double* row = gw + o * in;
            for (size_t i = 0; i < in; ++i) row[i] += delta[o] * below[i];
            gb[o] += delta[o];
        }

        if (l > 0 || input_grad) {
            const double* w = params_.data() + weight_offset(l);
            std::vector<double> next(in, 0.0);
            for (size_t o = 0; o < out; ++o) {
                const double* row = w + o * in;
                for (size_t i = 0; i < in; ++i) next[i] += row[i] * delta[o];
            }
            delta = std::move(next);
        }
    }
    if (input_grad) *input_grad = delta;
    return grads;
}

bool Mlp::params_finite() const {
    return std::all_of(params_.begin(), params_.end(),
                       [](double p) { return std::isfinite(p); });
}

void adam_step(std::vector<double>& params, std::span<const double> grads, AdamState& state,
               double lr, double beta1, double beta2, double eps) {
    if (params.size() != grads.size())
        throw std::invalid_argument("adam_step: shape mismatch");
    if (state.m.size() != params.size()) {
        state.m.assign(params.size(), 0.0);
        state.v.assign(params.size(), 0.0);
        state.t = 0;
    }
    state.t += 1;
    const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(state.t));
    const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(state.t));
    for (size_t i = 0; i < params.size(); ++i) {
        state.m[i] = beta1 * state.m[i] + (1.0 - beta1) * grads[i];
        state.v[i] = beta2 * state.v[i] + (1.0 - beta2) * grads[i] * grads[i];
        const double mhat = state.m[i] / bc1;
        const double vhat = state.v[i] / bc2;
        params[i] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
}

std::vector<double> softmax(std::span<const double> logits) {
    std::vector<double> out = log_softmax(logits);
    for (double& v : out) v = std::exp(v);
    return out;
}

std::vector<double> log_softmax(std::span<const double> logits) {
    const double mx = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (double v : logits) sum += std::exp(v - mx);
    const double lse = mx + std::log(sum);
    std::vector<double> out(logits.begin(), logits.end());
    for (double& v : out) v -= lse;
    return out;
}

}  // namespace ranlab::drl
