// Copyright 2026 The qwb Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "qwb/error.hpp"
#include "qwb/neural.hpp"
#include "qwb/optimize.hpp"

using namespace qwb;

namespace {

std::vector<LabeledPoint> separable_set(std::mt19937_64 &rng, int count, double margin) {
    std::uniform_real_distribution<double> u(-1.0, 3.0);
    std::vector<LabeledPoint> out;
    while (static_cast<int>(out.size()) < count) {
        Eigen::Vector2d x(u(rng), u(rng));
        const double signed_distance = (x.sum() - 1.0) / std::sqrt(2.0);
        if (std::abs(signed_distance) < margin) continue;
        out.push_back({x, signed_distance > 0 ? 1 : 0});
    }
    return out;
}

std::vector<LabeledPoint> xor_set() {
    return {{Eigen::Vector2d(0, 0), 0}, {Eigen::Vector2d(1, 1), 0}, {Eigen::Vector2d(0, 1), 1}, {Eigen::Vector2d(1, 0), 1}};
}

double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

}  // namespace

TEST(neural, forward_examples) {
    auto net = FeedforwardNetwork::zeros({3, 2});
    net.biases[0] << 0.25, -4.0;
    const auto y = forward(net, Eigen::Vector3d(1, 2, 3));
    EXPECT_EQ(y(0), 0.25);
    EXPECT_EQ(y(1), -4.0);
    EXPECT_THROW(forward(net, Eigen::Vector2d(1, 2)), Error);
}

TEST(neural, sigmoid_net_matches_hand_arithmetic) {
    FeedforwardNetwork net = FeedforwardNetwork::zeros({2, 2, 1});
    net.activations = {{ActivationKind::Sigmoid}, {ActivationKind::Sigmoid}};
    net.weights[0] << 0.5, -1.0, 2.0, 0.25;
    net.biases[0] << 0.1, -0.2;
    net.weights[1] << 1.5, -0.75;
    net.biases[1] << 0.3;
    const double x0 = 0.4, x1 = -1.2;
    const double h0 = sigmoid(0.1 + 0.5 * x0 - 1.0 * x1);
    const double h1 = sigmoid(-0.2 + 2.0 * x0 + 0.25 * x1);
    const double expected = sigmoid(0.3 + 1.5 * h0 - 0.75 * h1);
    EXPECT_NEAR(forward(net, Eigen::Vector2d(x0, x1))(0), expected, 1e-12);
}

TEST(neural, heaviside_neuron_is_a_perceptron) {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 200; ++trial) {
        PerceptronModel p;
        p.weights = Eigen::Vector2d(g(rng), g(rng));
        p.bias = g(rng);
        auto net = FeedforwardNetwork::zeros({2, 1});
        net.weights[0] = p.weights.transpose();
        net.activations = {{ActivationKind::Heaviside, -p.bias}};
        const Eigen::Vector2d x(g(rng), g(rng));
        EXPECT_EQ(forward(net, x)(0), classify_perceptron(p, x));
    }
}

TEST(neural, loss_examples) {
    auto net = FeedforwardNetwork::zeros({2, 2});
    const std::vector<TrainingPair> pairs{{Eigen::Vector2d(1, 1), Eigen::Vector2d(3, 4)},
                                          {Eigen::Vector2d(0, 1), Eigen::Vector2d(1, 0)}};
    EXPECT_EQ(loss(net, pairs), 25.0 + 1.0);
    net.weights[0] = Eigen::Matrix2d::Identity();
    const std::vector<TrainingPair> exact{{Eigen::Vector2d(1, 2), Eigen::Vector2d(1, 2)}};
    EXPECT_EQ(loss(net, exact), 0.0);
    const std::vector<TrainingPair> scalar{{Eigen::Vector2d(0, 0), Eigen::Vector2d(0, 0.5)}};
    EXPECT_EQ(loss(net, scalar), 0.25);
    const std::vector<TrainingPair> bad{{Eigen::Vector2d(0, 0), Eigen::Vector3d(0, 0, 0)}};
    EXPECT_THROW(loss(net, bad), Error);
}

TEST(neural, backprop_matches_finite_differences) {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 20; ++trial) {
        auto net = FeedforwardNetwork::random({3, 4, 3}, {{ActivationKind::Sigmoid}, {ActivationKind::Identity}}, 1.0,
                                              trial);
        std::vector<TrainingPair> pairs;
        for (int k = 0; k < 5; ++k) pairs.push_back({Eigen::Vector3d(g(rng), g(rng), g(rng)), Eigen::Vector3d(g(rng), g(rng), g(rng))});
        const Eigen::VectorXd analytic = loss_gradient(net, pairs);
        const Eigen::VectorXd theta = flatten_parameters(net);
        const Objective f = [&](std::span<const double> p) {
            auto copy = net;
            assign_parameters(copy, Eigen::Map<const Eigen::VectorXd>(p.data(), static_cast<Eigen::Index>(p.size())));
            return loss(copy, pairs);
        };
        const auto numeric = finite_difference_gradient(f, std::vector<double>(theta.data(), theta.data() + theta.size()), 1e-5);
        const Eigen::Map<const Eigen::VectorXd> fd(numeric.data(), static_cast<Eigen::Index>(numeric.size()));
        EXPECT_LE((analytic - fd).norm() / std::max(1.0, fd.norm()), 1e-5) << "net " << trial;
    }
    auto step = FeedforwardNetwork::zeros({1, 1});
    step.activations = {{ActivationKind::Heaviside}};
    EXPECT_THROW(loss_gradient(step, {{Eigen::VectorXd::Ones(1), Eigen::VectorXd::Ones(1)}}), Error);
}

TEST(neural, parameter_round_trip) {
    auto net = FeedforwardNetwork::random({2, 3, 2}, {{ActivationKind::Sigmoid}, {ActivationKind::Identity}}, 0.5, 9);
    EXPECT_EQ(net.parameter_count(), 2u * 3 + 3 + 3 * 2 + 2);
    const auto flat = flatten_parameters(net);
    EXPECT_EQ(flat(1), net.weights[0](1, 0));  // column-major
    auto other = FeedforwardNetwork::zeros({2, 3, 2});
    assign_parameters(other, flat);
    EXPECT_EQ(flatten_parameters(other), flat);
    EXPECT_THROW(assign_parameters(other, Eigen::VectorXd::Zero(3)), Error);
}

TEST(neural, classify_examples) {
    PerceptronModel p;
    p.weights = Eigen::Vector2d(1, 0);
    p.bias = 0.0;
    EXPECT_EQ(classify_perceptron(p, Eigen::Vector2d(-1, 5)), 0);
    EXPECT_EQ(classify_perceptron(p, Eigen::Vector2d(0, 5)), 1);  // on the hyperplane
    std::mt19937_64 rng(13);
    std::normal_distribution<double> g;
    for (int k = 0; k < 100; ++k) {
        PerceptronModel q;
        q.weights = Eigen::Vector2d(g(rng), g(rng));
        q.bias = g(rng);
        PerceptronModel scaled = q;
        const double lambda = std::exp(g(rng));
        scaled.weights *= lambda;
        scaled.bias *= lambda;
        const Eigen::Vector2d x(g(rng), g(rng));
        EXPECT_EQ(classify_perceptron(q, x), classify_perceptron(scaled, x));
    }
}

TEST(neural, perceptron_separates_separable_sets) {
    std::mt19937_64 rng(17);
    PerceptronHyperparameters hyper;
    for (int trial = 0; trial < 100; ++trial) {
        const auto data = separable_set(rng, 20, 0.2);
        const auto r = train_perceptron(data, hyper, trial);
        EXPECT_FALSE(r.capped);
        EXPECT_LT(r.error, hyper.error_threshold);
        EXPECT_LE(r.iterations, hyper.max_iterations);
        for (const auto &p : data) EXPECT_EQ(classify_perceptron(r.model, p.x), p.label);
    }
}

TEST(neural, perceptron_stops_immediately_when_correct) {
    std::vector<LabeledPoint> data{{Eigen::Vector2d(2, 2), 1}, {Eigen::Vector2d(-2, -2), 0}};
    const auto r = train_perceptron(data, {}, 0, Eigen::Vector2d(1, 1), 0.0);
    EXPECT_EQ(r.iterations, 0);
    EXPECT_EQ(r.error, 0.0);
    EXPECT_EQ(r.model.weights, Eigen::Vector2d(1, 1));
}

TEST(neural, perceptron_xor_hits_cap) {
    PerceptronHyperparameters hyper;
    hyper.max_iterations = 100;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto r = train_perceptron(xor_set(), hyper, seed);
        EXPECT_TRUE(r.capped);
        EXPECT_EQ(r.iterations, 100);
        EXPECT_GE(r.error, hyper.error_threshold);
    }
}

TEST(neural, perceptron_errors) {
    EXPECT_THROW(train_perceptron({}, {}, 0), Error);
    EXPECT_THROW(train_perceptron({{Eigen::Vector2d(0, 0), 2}}, {}, 0), Error);
    EXPECT_THROW(train_perceptron({{Eigen::Vector2d(0, 0), 1}, {Eigen::Vector3d(0, 0, 0), 0}}, {}, 0), Error);
    PerceptronHyperparameters bad;
    bad.learning_rate = 0.0;
    EXPECT_THROW(train_perceptron(xor_set(), bad, 0), Error);
}

TEST(neural, perceptron_is_deterministic) {
    std::mt19937_64 rng(19);
    const auto data = separable_set(rng, 20, 0.2);
    const auto a = train_perceptron(data, {}, 4);
    const auto b = train_perceptron(data, {}, 4);
    EXPECT_EQ(a.model.weights, b.model.weights);
    EXPECT_EQ(a.model.bias, b.model.bias);
    EXPECT_EQ(a.iterations, b.iterations);
}

TEST(neural, autoencoder_fits_a_repeated_point) {
    const std::vector<Eigen::VectorXd> data(4, Eigen::Vector3d(0.3, -0.7, 1.1));
    AutoencoderOptions options;
    options.epochs = 2000;
    const auto r = train_autoencoder(data, options);
    EXPECT_LE(r.loss_trace.back(), 1e-4);
    EXPECT_EQ(r.loss_trace.size(), 2001u);
}

TEST(neural, autoencoder_compresses_a_line) {
    std::vector<Eigen::VectorXd> data;
    const Eigen::Vector3d origin(0.2, -0.1, 0.4), direction(0.6, 0.3, -0.5);
    for (int k = 0; k < 20; ++k) data.push_back(origin + (k / 19.0 - 0.5) * direction);
    AutoencoderOptions options;
    options.epochs = 5000;
    const auto r = train_autoencoder(data, options);
    EXPECT_LE(r.loss_trace.back(), 0.01 * r.loss_trace.front());
    EXPECT_NEAR(reconstruction_loss(r.model, data), r.loss_trace.back(), 1e-12);
    const auto code = encode(r.model, data[3]);
    EXPECT_EQ(code.size(), 1);
    EXPECT_EQ(code, encode(r.model, data[3]));
    EXPECT_LE((decode(r.model, code) - data[3]).squaredNorm(), r.loss_trace.back());
}

TEST(neural, autoencoder_trace_behaviour) {
    std::vector<Eigen::VectorXd> data{Eigen::Vector3d(1, 0, 0), Eigen::Vector3d(0, 1, 0), Eigen::Vector3d(0, 0, 1),
                                      Eigen::Vector3d(1, 1, 0)};
    AutoencoderOptions options;
    options.epochs = 200;
    options.learning_rate = 0.0;
    const auto frozen = train_autoencoder(data, options);
    for (double v : frozen.loss_trace) EXPECT_EQ(v, frozen.loss_trace.front());
    options.learning_rate = 1e-3;
    const auto slow = train_autoencoder(data, options);
    for (std::size_t k = 1; k < slow.loss_trace.size(); ++k) EXPECT_LE(slow.loss_trace[k], slow.loss_trace[k - 1]);
}

TEST(neural, autoencoder_errors) {
    const std::vector<Eigen::VectorXd> data{Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 1)};
    AutoencoderOptions options;
    options.code_size = 2;
    EXPECT_THROW(train_autoencoder(data, options), Error);
    options.code_size = 1;
    EXPECT_THROW(train_autoencoder({}, options), Error);
    EXPECT_THROW(train_autoencoder({Eigen::Vector2d(1, 0), Eigen::Vector3d(0, 1, 0)}, options), Error);
    options.learning_rate = 1e6;
    options.init_scale = 5.0;
    try {
        train_autoencoder({Eigen::Vector2d(1e3, -1e3), Eigen::Vector2d(-1e3, 1e3)}, options);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::Numerical);
        EXPECT_NE(std::string(e.context()).find("epoch"), std::string::npos);
    }
    const auto r = train_autoencoder(data, AutoencoderOptions{});
    EXPECT_THROW(encode(r.model, Eigen::Vector3d(1, 2, 3)), Error);
}
