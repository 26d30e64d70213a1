#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "helpers.hpp"
#include "scengen/errors.hpp"
#include "scengen/nn.hpp"
#include "scengen/rng.hpp"

using namespace scengen;

namespace {

MlpNetwork small_generator() {
    return MlpNetwork::make(NetRole::generator,
                            {{2, 2, Activation::tanh}, {2, 1, Activation::sigmoid}});
}

MlpNetwork small_discriminator() {
    return MlpNetwork::make(NetRole::discriminator,
                            {{2, 2, Activation::leaky_relu, 0.2}, {2, 1, Activation::linear}});
}

Matrix two_row_input() {
    Matrix x(2, 2);
    x(0, 0) = 0.4;
    x(0, 1) = -0.6;
    x(1, 0) = -1.2;
    x(1, 1) = 0.35;
    return x;
}

}  // namespace

TEST_CASE("activation names round-trip") {
    for (Activation a : {Activation::linear, Activation::relu, Activation::leaky_relu,
                         Activation::tanh, Activation::sigmoid}) {
        CHECK(activation_from_name(activation_name(a)) == a);
    }
    CHECK_THROWS_AS(activation_from_name("softmax"), ValidationError);
}

TEST_CASE("make rejects malformed layer stacks") {
    CHECK_THROWS_AS(MlpNetwork::make(NetRole::generator, {}), ValidationError);
    CHECK_THROWS_AS(
        MlpNetwork::make(NetRole::generator, {{2, 0, Activation::sigmoid}}), ValidationError);
    // widths must chain
    CHECK_THROWS_AS(MlpNetwork::make(NetRole::generator, {{2, 3, Activation::tanh},
                                                          {4, 1, Activation::sigmoid}}),
                    ValidationError);
    // generator must end in sigmoid
    CHECK_THROWS_AS(
        MlpNetwork::make(NetRole::generator, {{2, 2, Activation::tanh}}), ValidationError);
    // discriminator must end linear with one output
    CHECK_THROWS_AS(
        MlpNetwork::make(NetRole::discriminator, {{2, 1, Activation::sigmoid}}), ValidationError);
    CHECK_THROWS_AS(
        MlpNetwork::make(NetRole::discriminator, {{2, 2, Activation::linear}}), ValidationError);
    // leaky slope outside (0, 1)
    CHECK_THROWS_AS(MlpNetwork::make(NetRole::discriminator,
                                     {{2, 2, Activation::leaky_relu, 1.5},
                                      {2, 1, Activation::linear}}),
                    ValidationError);
}

TEST_CASE("param_count counts weights plus biases per layer") {
    CHECK(param_count(small_generator()) == 2 * 2 + 2 + 2 * 1 + 1);
    auto deep = MlpNetwork::make(
        NetRole::discriminator,
        {{5, 7, Activation::relu}, {7, 3, Activation::tanh}, {3, 1, Activation::linear}});
    CHECK(param_count(deep) == (5 * 7 + 7) + (7 * 3 + 3) + (3 * 1 + 1));
}

TEST_CASE("init_weights stays in the fan bound, zeroes biases, and is seed-deterministic") {
    auto net = MlpNetwork::make(
        NetRole::discriminator,
        {{6, 4, Activation::leaky_relu, 0.2}, {4, 1, Activation::linear}});
    auto theta = init_weights(net, 42);
    REQUIRE(theta.size() == param_count(net));

    const double bound0 = std::sqrt(6.0 / (6 + 4));
    for (std::size_t i = 0; i < 6 * 4; ++i) {
        CHECK(std::fabs(theta[i]) <= bound0);
    }
    for (std::size_t i = 6 * 4; i < 6 * 4 + 4; ++i) {
        CHECK(theta[i] == 0.0);  // layer 0 biases
    }
    const double bound1 = std::sqrt(6.0 / (4 + 1));
    for (std::size_t i = 6 * 4 + 4; i < 6 * 4 + 4 + 4; ++i) {
        CHECK(std::fabs(theta[i]) <= bound1);
    }
    CHECK(theta.back() == 0.0);  // layer 1 bias

    CHECK(init_weights(net, 42) == theta);
    CHECK(init_weights(net, 43) != theta);
}

TEST_CASE("forward matches hand-computed two-layer values") {
    // theta laid out as [W0 row-major, b0, W1, b1]
    ParameterVector theta_g = {0.5, -0.25, 0.75, 0.1, 0.1, -0.2, 1.5, -2.0, 0.3};
    auto trace = forward(small_generator(), theta_g, two_row_input());
    REQUIRE(trace.output().rows == 2);
    REQUIRE(trace.output().cols == 1);
    CHECK(trace.output()(0, 0) == doctest::Approx(0.7011732746905583).epsilon(1e-12));
    CHECK(trace.output()(1, 0) == doctest::Approx(0.7470607628676694).epsilon(1e-12));
    // pre-activations are cached for the backward pass
    CHECK(trace.pre[0](0, 0) == doctest::Approx(0.45).epsilon(1e-12));
    CHECK(trace.pre[0](1, 1) == doctest::Approx(-1.065).epsilon(1e-12));

    ParameterVector theta_d = {-0.8, 0.3, 0.45, 0.9, 0.05, -0.1, 1.25, -0.5, -0.75};
    auto d_trace = forward(small_discriminator(), theta_d, two_row_input());
    CHECK(d_trace.output()(0, 0) == doctest::Approx(-0.8165).epsilon(1e-12));
    CHECK(d_trace.output()(1, 0) == doctest::Approx(0.67625).epsilon(1e-12));
}

TEST_CASE("forward validates batch and parameter shapes") {
    auto net = small_generator();
    auto theta = init_weights(net, 1);
    CHECK_THROWS_AS(forward(net, theta, Matrix(0, 2)), ValidationError);
    CHECK_THROWS_AS(forward(net, theta, Matrix(3, 5)), ValidationError);
    theta.pop_back();
    CHECK_THROWS_AS(forward(net, theta, Matrix(3, 2)), ValidationError);
}

TEST_CASE("backward parameter and input gradients match central differences") {
    struct Case {
        MlpNetwork net;
        std::uint64_t seed;
    };
    std::vector<Case> cases;
    cases.push_back({MlpNetwork::make(NetRole::generator, {{3, 4, Activation::tanh},
                                                           {4, 2, Activation::sigmoid}}),
                     11});
    cases.push_back({MlpNetwork::make(NetRole::discriminator,
                                      {{5, 3, Activation::leaky_relu, 0.2},
                                       {3, 1, Activation::linear}}),
                     12});
    cases.push_back({MlpNetwork::make(NetRole::generator, {{2, 3, Activation::relu},
                                                           {3, 3, Activation::tanh},
                                                           {3, 2, Activation::sigmoid}}),
                     13});

    for (const auto& c : cases) {
        CAPTURE(c.seed);
        auto rng = RngStream::child(c.seed, 1);
        auto theta = init_weights(c.net, rng);
        const std::size_t m = 3;
        Matrix x(m, c.net.input_width());
        for (double& v : x.data) v = rng.normal();
        // objective: fixed random weighting of every output entry
        Matrix coeff(m, c.net.output_width());
        for (double& v : coeff.data) v = rng.normal();

        auto objective_theta = [&](const std::vector<double>& th) {
            auto tr = forward(c.net, th, x);
            double s = 0.0;
            for (std::size_t i = 0; i < tr.output().size(); ++i) {
                s += coeff.data[i] * tr.output().data[i];
            }
            return s;
        };
        auto trace = forward(c.net, theta, x);
        auto analytic = backward(c.net, theta, trace, coeff);
        auto fd = testutil::central_difference(objective_theta, theta);
        CHECK(testutil::max_rel_err(analytic.param_grad, fd) < 1e-5);

        auto objective_input = [&](const std::vector<double>& flat) {
            Matrix xi = x;
            xi.data = flat;
            auto tr = forward(c.net, theta, xi);
            double s = 0.0;
            for (std::size_t i = 0; i < tr.output().size(); ++i) {
                s += coeff.data[i] * tr.output().data[i];
            }
            return s;
        };
        auto fd_input = testutil::central_difference(objective_input, x.data);
        CHECK(testutil::max_rel_err(analytic.input_grad.data, fd_input) < 1e-5);
    }
}

TEST_CASE("backward over a batch equals the sum of per-row backwards") {
    auto net = small_discriminator();
    auto theta = init_weights(net, 21);
    auto x = two_row_input();
    Matrix up(2, 1);
    up(0, 0) = 0.7;
    up(1, 0) = -1.3;

    auto batch_grad = backward(net, theta, forward(net, theta, x), up).param_grad;

    ParameterVector sum(theta.size(), 0.0);
    for (std::size_t i = 0; i < 2; ++i) {
        Matrix row(1, 2);
        row(0, 0) = x(i, 0);
        row(0, 1) = x(i, 1);
        Matrix u(1, 1, up(i, 0));
        sum = param_add(sum, backward(net, theta, forward(net, theta, row), u).param_grad);
    }
    // same accumulation order, so equality is exact
    CHECK(batch_grad == sum);
}

TEST_CASE("backward rejects mismatched traces and gradient shapes") {
    auto net = small_generator();
    auto theta = init_weights(net, 3);
    auto trace = forward(net, theta, two_row_input());
    CHECK_THROWS_AS(backward(net, theta, trace, Matrix(2, 2)), ValidationError);
    CHECK_THROWS_AS(backward(net, theta, trace, Matrix(1, 1)), ValidationError);
}

TEST_CASE("parameter vector helpers") {
    ParameterVector a = {1.0, -2.0, 3.0};
    ParameterVector b = {0.5, 0.25, -1.0};
    CHECK(param_add(a, b) == ParameterVector{1.5, -1.75, 2.0});
    CHECK(param_sub(a, b) == ParameterVector{0.5, -2.25, 4.0});
    CHECK(param_scale(a, -2.0) == ParameterVector{-2.0, 4.0, -6.0});
    CHECK(param_mul(a, b) == ParameterVector{0.5, -0.5, -3.0});
    CHECK_THROWS_AS(param_add(a, ParameterVector{1.0}), ValidationError);
    CHECK_THROWS_AS(param_mul(a, ParameterVector{}), ValidationError);

    CHECK(all_finite(a));
    CHECK_FALSE(all_finite({1.0, std::nan(""), 2.0}));
    CHECK_FALSE(all_finite({std::numeric_limits<double>::infinity()}));
}
