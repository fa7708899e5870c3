#include <doctest.h>

#include <cmath>

#include "ranlab/mlp.hpp"

using namespace ranlab;
using namespace ranlab::drl;

namespace {

// Independent forward pass used as the dual-implementation oracle: plain
// nested loops over explicitly indexed parameters.
std::vector<double> reference_forward(const Mlp& net, const std::vector<double>& x) {
    std::vector<double> cur = x;
    size_t offset = 0;
    for (size_t l = 0; l < net.num_layers(); ++l) {
        const size_t in = net.sizes()[l];
        const size_t out = net.sizes()[l + 1];
        std::vector<double> next(out);
        for (size_t o = 0; o < out; ++o) {
            double acc = net.params()[offset + in * out + o];  // bias after weights
            for (size_t i = 0; i < in; ++i) acc += net.params()[offset + o * in + i] * cur[i];
            switch (net.activations()[l]) {
                case Activation::Tanh: acc = std::tanh(acc); break;
                case Activation::Relu: acc = acc > 0 ? acc : 0; break;
                case Activation::Linear: break;
            }
            next[o] = acc;
        }
        offset += in * out + out;
        cur = std::move(next);
    }
    return cur;
}

double scalar_output(const Mlp& net, const std::vector<double>& x,
                     const std::vector<double>& upstream) {
    const auto y = net.forward(x);
    double s = 0.0;
    for (size_t i = 0; i < y.size(); ++i) s += upstream[i] * y[i];
    return s;
}

}  // namespace

TEST_SUITE_BEGIN("mlp");

TEST_CASE("zero-parameter tanh net outputs zero") {
    Mlp net({4, 8, 2}, {Activation::Tanh, Activation::Tanh});
    const std::vector<double> x{1.0, -2.0, 3.0, 0.5};
    for (double v : net.forward(x)) CHECK(v == 0.0);
}

TEST_CASE("identity 1x1 linear net") {
    Mlp net({1, 1}, {Activation::Linear});
    net.params() = {1.0, 0.0};  // w=1, b=0
    CHECK(net.forward(std::vector<double>{3.5})[0] == 3.5);
    CHECK(net.forward(std::vector<double>{-2.0})[0] == -2.0);
}

TEST_CASE("forward matches the independently coded oracle") {
    Rng rng(2024);
    Mlp net = Mlp::random({5, 7, 4, 3},
                          {Activation::Tanh, Activation::Relu, Activation::Linear}, rng);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> x(5);
        for (double& v : x) v = rng.next_double() * 4.0 - 2.0;
        const auto got = net.forward(x);
        const auto want = reference_forward(net, x);
        REQUIRE(got.size() == want.size());
        for (size_t i = 0; i < got.size(); ++i)
            CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-12));
    }
}

TEST_CASE("dimension mismatch is rejected") {
    Mlp net({3, 2}, {Activation::Linear});
    CHECK_THROWS_AS(net.forward(std::vector<double>{1.0}), std::invalid_argument);
}

TEST_CASE("gradients match central finite differences on a 3x30 tanh net") {
    Rng rng(7);
    Mlp net = Mlp::random({3, 30, 2}, {Activation::Tanh, Activation::Linear}, rng);
    std::vector<double> x{0.3, -0.8, 1.2};
    std::vector<double> upstream{0.7, -1.3};

    Mlp::Tape tape;
    net.forward(x, tape);
    const auto grads = net.backward(tape, upstream);

    const double h = 1e-5;
    Rng pick(99);
    for (int k = 0; k < 200; ++k) {
        const size_t i = pick.next_below(net.param_count());
        Mlp probe = net;
        probe.params()[i] += h;
        const double up = scalar_output(probe, x, upstream);
        probe.params()[i] -= 2 * h;
        const double down = scalar_output(probe, x, upstream);
        const double fd = (up - down) / (2 * h);
        const double denom = std::max({std::abs(fd), std::abs(grads[i]), 1e-8});
        CHECK(std::abs(fd - grads[i]) / denom < 1e-4);
    }
}

TEST_CASE("zero upstream gradient kills all gradients") {
    Rng rng(8);
    Mlp net = Mlp::random({4, 6, 3}, {Activation::Relu, Activation::Linear}, rng);
    Mlp::Tape tape;
    net.forward(std::vector<double>{1, 2, 3, 4}, tape);
    const auto grads = net.backward(tape, std::vector<double>{0.0, 0.0, 0.0});
    for (double g : grads) CHECK(g == 0.0);
}

TEST_CASE("linear 1x1 net: d(wx)/dw at x=2 is 2") {
    Mlp net({1, 1}, {Activation::Linear});
    net.params() = {1.5, 0.0};
    Mlp::Tape tape;
    net.forward(std::vector<double>{2.0}, tape);
    const auto grads = net.backward(tape, std::vector<double>{1.0});
    CHECK(grads[0] == 2.0);  // weight grad
    CHECK(grads[1] == 1.0);  // bias grad
}

TEST_CASE("adam leaves params untouched on zero gradients") {
    std::vector<double> params{1.0, -2.0, 3.0};
    std::vector<double> grads{0.0, 0.0, 0.0};
    AdamState state;
    for (int t = 0; t < 10; ++t) adam_step(params, grads, state, 1e-3);
    CHECK(params == std::vector<double>{1.0, -2.0, 3.0});
    for (double m : state.m) CHECK(m == 0.0);
    for (double v : state.v) CHECK(v == 0.0);
}

TEST_CASE("adam step size approaches lr*sign(g) under constant gradients") {
    std::vector<double> params{0.0, 0.0};
    const std::vector<double> grads{2.5, -0.3};
    AdamState state;
    const double lr = 1e-3;
    double prev0 = params[0];
    for (int t = 0; t < 500; ++t) adam_step(params, grads, state, lr);
    prev0 = params[0];
    adam_step(params, grads, state, lr);
    // steady-state per-step displacement: -lr*sign(g)
    CHECK(params[0] - prev0 == doctest::Approx(-lr).epsilon(1e-3));
    CHECK(params[1] > 0.0);  // moves against the negative gradient
}

TEST_CASE("adam is deterministic") {
    auto run = [] {
        Rng rng(4);
        Mlp net = Mlp::random({3, 5, 1}, {Activation::Tanh, Activation::Linear}, rng);
        AdamState state;
        for (int t = 0; t < 50; ++t) {
            Mlp::Tape tape;
            net.forward(std::vector<double>{0.1, 0.2, 0.3}, tape);
            const auto grads = net.backward(tape, std::vector<double>{1.0});
            adam_step(net.params(), grads, state, 1e-3);
        }
        return net.params();
    };
    CHECK(run() == run());
}

TEST_CASE("softmax helpers are consistent") {
    const std::vector<double> logits{1.0, 2.0, 3.0};
    const auto p = softmax(logits);
    const auto lp = log_softmax(logits);
    double sum = 0.0;
    for (size_t i = 0; i < p.size(); ++i) {
        sum += p[i];
        CHECK(std::log(p[i]) == doctest::Approx(lp[i]).epsilon(1e-12));
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_SUITE_END();
