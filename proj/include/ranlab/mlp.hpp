#pragma once

#include <span>
#include <vector>

#include "ranlab/common.hpp"

namespace ranlab::drl {

enum class Activation { Tanh, Relu, Linear };

std::string_view activation_name(Activation a);
Activation activation_from_name(std::string_view name);

// Dense feed-forward net, 64-bit throughout. Weights are row-major
// (out x in); params are exposed flattened for the optimizer, serialization
// and finite-difference checks (layout: per layer, weights then biases).
class Mlp {
public:
    Mlp() = default;
    // sizes = {in, h1, ..., out}; acts has sizes.size()-1 entries.
    Mlp(std::vector<size_t> sizes, std::vector<Activation> acts);

    // Xavier-uniform init from the given stream.
    static Mlp random(std::vector<size_t> sizes, std::vector<Activation> acts, Rng& rng);

    size_t input_size() const { return sizes_.front(); }
    size_t output_size() const { return sizes_.back(); }
    size_t num_layers() const { return acts_.size(); }
    const std::vector<size_t>& sizes() const { return sizes_; }
    const std::vector<Activation>& activations() const { return acts_; }

    std::vector<double> forward(std::span<const double> x) const;

    // Forward pass recording pre-/post-activation values for backward().
    struct Tape {
        std::vector<double> input;
        std::vector<std::vector<double>> pre;   // per layer
        std::vector<std::vector<double>> post;  // per layer
    };
    std::vector<double> forward(std::span<const double> x, Tape& tape) const;

    // Exact reverse-mode gradients of sum(upstream .* output) w.r.t. all
    // parameters; optionally also w.r.t. the input.
    std::vector<double> backward(const Tape& tape, std::span<const double> upstream,
                                 std::vector<double>* input_grad = nullptr) const;

    size_t param_count() const { return params_.size(); }
    std::vector<double>& params() { return params_; }
    const std::vector<double>& params() const { return params_; }

    bool params_finite() const;
    bool operator==(const Mlp& other) const {
        return sizes_ == other.sizes_ && acts_ == other.acts_ && params_ == other.params_;
    }

private:
    size_t weight_offset(size_t layer) const { return offsets_[layer]; }
    size_t bias_offset(size_t layer) const {
        return offsets_[layer] + sizes_[layer] * sizes_[layer + 1];
    }

    std::vector<size_t> sizes_;
    std::vector<Activation> acts_;
    std::vector<size_t> offsets_;   // flat offset of each layer's weights
    std::vector<double> params_;
};

// Standard Adam with bias correction (beta1=0.9, beta2=0.999, eps=1e-8).
struct AdamState {
    std::vector<double> m, v;
    long t = 0;
};

void adam_step(std::vector<double>& params, std::span<const double> grads, AdamState& state,
               double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);

// log-softmax / softmax helpers shared by PPO and the action samplers.
std::vector<double> softmax(std::span<const double> logits);
std::vector<double> log_softmax(std::span<const double> logits);

}  // namespace ranlab::drl
