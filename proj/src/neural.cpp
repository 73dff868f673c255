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

#include "qwb/neural.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "qwb/error.hpp"

namespace qwb {

namespace {

double activate(const Activation &a, double v) {
    switch (a.kind) {
        case ActivationKind::Heaviside: return v >= a.threshold ? 1.0 : 0.0;
        case ActivationKind::Sigmoid: return 1.0 / (1.0 + std::exp(-v));
        case ActivationKind::Identity: return v;
    }
    return v;
}

// Derivative expressed through the activation output.
double activation_slope(const Activation &a, double output) {
    return a.kind == ActivationKind::Sigmoid ? output * (1.0 - output) : 1.0;
}

void check_input(const FeedforwardNetwork &net, const Eigen::VectorXd &x) {
    if (x.size() != net.input_size()) {
        throw Error(ErrorCode::InvalidArgument, "input has " + std::to_string(x.size()) +
                                                    " components, network expects " + std::to_string(net.input_size()));
    }
}

void check_pair(const FeedforwardNetwork &net, const TrainingPair &p) {
    check_input(net, p.input);
    if (p.target.size() != net.output_size()) {
        throw Error(ErrorCode::InvalidArgument, "target has " + std::to_string(p.target.size()) +
                                                    " components, network outputs " + std::to_string(net.output_size()));
    }
}

// Outputs of every layer, input included.
std::vector<Eigen::VectorXd> forward_all(const FeedforwardNetwork &net, const Eigen::VectorXd &x) {
    std::vector<Eigen::VectorXd> outs{x};
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        Eigen::VectorXd z = net.biases[l] + net.weights[l] * outs.back();
        for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = activate(net.activations[l], z(i));
        outs.push_back(std::move(z));
    }
    return outs;
}

}  // namespace

FeedforwardNetwork FeedforwardNetwork::zeros(std::vector<int> layer_sizes) {
    FeedforwardNetwork net;
    net.layer_sizes = std::move(layer_sizes);
    for (std::size_t l = 0; l + 1 < net.layer_sizes.size(); ++l) {
        net.weights.push_back(Eigen::MatrixXd::Zero(net.layer_sizes[l + 1], net.layer_sizes[l]));
        net.biases.push_back(Eigen::VectorXd::Zero(net.layer_sizes[l + 1]));
        net.activations.push_back({ActivationKind::Identity, 0.0});
    }
    validate(net);
    return net;
}

FeedforwardNetwork FeedforwardNetwork::random(std::vector<int> layer_sizes, std::vector<Activation> activations,
                                              double scale, std::uint64_t seed) {
    auto net = zeros(std::move(layer_sizes));
    net.activations = std::move(activations);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-scale, scale);
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        for (Eigen::Index c = 0; c < net.weights[l].cols(); ++c) {
            for (Eigen::Index r = 0; r < net.weights[l].rows(); ++r) net.weights[l](r, c) = unit(rng);
        }
        for (Eigen::Index r = 0; r < net.biases[l].size(); ++r) net.biases[l](r) = unit(rng);
    }
    validate(net);
    return net;
}

std::size_t FeedforwardNetwork::parameter_count() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l < weights.size(); ++l) n += static_cast<std::size_t>(weights[l].size() + biases[l].size());
    return n;
}

void validate(const FeedforwardNetwork &net) {
    const auto layers = net.layer_sizes.size();
    if (layers < 2) throw Error(ErrorCode::InvalidArgument, "a network needs at least two layers");
    if (net.weights.size() != layers - 1 || net.biases.size() != layers - 1 || net.activations.size() != layers - 1) {
        throw Error(ErrorCode::InvalidArgument, "network parameter lists do not match the layer count");
    }
    for (std::size_t l = 0; l + 1 < layers; ++l) {
        if (net.layer_sizes[l] < 1 || net.layer_sizes[l + 1] < 1) {
            throw Error(ErrorCode::InvalidArgument, "layer sizes must be positive");
        }
        if (net.weights[l].rows() != net.layer_sizes[l + 1] || net.weights[l].cols() != net.layer_sizes[l] ||
            net.biases[l].size() != net.layer_sizes[l + 1]) {
            throw Error(ErrorCode::InvalidArgument, "weight shape mismatch at layer " + std::to_string(l + 1));
        }
        if (!net.weights[l].allFinite() || !net.biases[l].allFinite()) {
            throw Error(ErrorCode::InvalidArgument, "non-finite parameter at layer " + std::to_string(l + 1));
        }
    }
}

Eigen::VectorXd forward(const FeedforwardNetwork &net, const Eigen::VectorXd &x) {
    check_input(net, x);
    return forward_all(net, x).back();
}

double loss(const FeedforwardNetwork &net, const std::vector<TrainingPair> &pairs) {
    double total = 0.0;
    for (const auto &p : pairs) {
        check_pair(net, p);
        total += (p.target - forward_all(net, p.input).back()).squaredNorm();
    }
    return total;
}

Eigen::VectorXd flatten_parameters(const FeedforwardNetwork &net) {
    Eigen::VectorXd flat(static_cast<Eigen::Index>(net.parameter_count()));
    Eigen::Index at = 0;
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        flat.segment(at, net.weights[l].size()) = net.weights[l].reshaped();
        at += net.weights[l].size();
        flat.segment(at, net.biases[l].size()) = net.biases[l];
        at += net.biases[l].size();
    }
    return flat;
}

void assign_parameters(FeedforwardNetwork &net, const Eigen::VectorXd &flat) {
    if (flat.size() != static_cast<Eigen::Index>(net.parameter_count())) {
        throw Error(ErrorCode::InvalidArgument, "parameter vector length does not match the network");
    }
    Eigen::Index at = 0;
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        net.weights[l].reshaped() = flat.segment(at, net.weights[l].size());
        at += net.weights[l].size();
        net.biases[l] = flat.segment(at, net.biases[l].size());
        at += net.biases[l].size();
    }
}

Eigen::VectorXd loss_gradient(const FeedforwardNetwork &net, const std::vector<TrainingPair> &pairs) {
    for (const auto &a : net.activations) {
        if (a.kind == ActivationKind::Heaviside) {
            throw Error(ErrorCode::InvalidArgument, "Heaviside layers have no gradient");
        }
    }
    std::vector<Eigen::MatrixXd> gw;
    std::vector<Eigen::VectorXd> gb;
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        gw.push_back(Eigen::MatrixXd::Zero(net.weights[l].rows(), net.weights[l].cols()));
        gb.push_back(Eigen::VectorXd::Zero(net.biases[l].size()));
    }
    for (const auto &p : pairs) {
        check_pair(net, p);
        const auto outs = forward_all(net, p.input);
        // dL/d(output) for the squared error.
        Eigen::VectorXd delta = 2.0 * (outs.back() - p.target);
        for (std::size_t l = net.weights.size(); l-- > 0;) {
            const auto &out = outs[l + 1];
            for (Eigen::Index i = 0; i < delta.size(); ++i) delta(i) *= activation_slope(net.activations[l], out(i));
            gw[l] += delta * outs[l].transpose();
            gb[l] += delta;
            if (l > 0) delta = net.weights[l].transpose() * delta;
        }
    }
    Eigen::VectorXd flat(static_cast<Eigen::Index>(net.parameter_count()));
    Eigen::Index at = 0;
    for (std::size_t l = 0; l < gw.size(); ++l) {
        flat.segment(at, gw[l].size()) = gw[l].reshaped();
        at += gw[l].size();
        flat.segment(at, gb[l].size()) = gb[l];
        at += gb[l].size();
    }
    return flat;
}

// ---------------------------------------------------------------------------

int classify_perceptron(const PerceptronModel &model, const Eigen::VectorXd &x) {
    if (x.size() != model.weights.size()) {
        throw Error(ErrorCode::InvalidArgument, "point has " + std::to_string(x.size()) +
                                                    " components, perceptron expects " +
                                                    std::to_string(model.weights.size()));
    }
    return model.weights.dot(x) + model.bias >= 0.0 ? 1 : 0;
}

PerceptronTraining train_perceptron(const std::vector<LabeledPoint> &data, const PerceptronHyperparameters &hyper,
                                    std::uint64_t seed) {
    if (data.empty()) throw Error(ErrorCode::InvalidArgument, "empty training set");
    const auto dim = data.front().x.size();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> small(-0.05, 0.05);
    const double bias = small(rng);
    Eigen::VectorXd w(dim);
    for (Eigen::Index i = 0; i < dim; ++i) w(i) = small(rng);
    return train_perceptron(data, hyper, seed, w, bias);
}

PerceptronTraining train_perceptron(const std::vector<LabeledPoint> &data, const PerceptronHyperparameters &hyper,
                                    std::uint64_t seed, const Eigen::VectorXd &initial_weights, double initial_bias) {
    if (data.empty()) throw Error(ErrorCode::InvalidArgument, "empty training set");
    if (!(hyper.learning_rate > 0.0) || !(hyper.error_threshold > 0.0) || hyper.max_iterations < 1) {
        throw Error(ErrorCode::InvalidArgument, "perceptron needs r > 0, gamma > 0 and N >= 1");
    }
    const auto dim = initial_weights.size();
    for (std::size_t j = 0; j < data.size(); ++j) {
        if (data[j].label != 0 && data[j].label != 1) {
            throw Error(ErrorCode::InvalidArgument, "labels must be 0 or 1", std::to_string(j));
        }
        if (data[j].x.size() != dim) {
            throw Error(ErrorCode::InvalidArgument, "training points differ in dimension", std::to_string(j));
        }
    }

    PerceptronTraining out;
    out.model.weights = initial_weights;
    out.model.bias = initial_bias;
    out.model.hyperparameters = hyper;

    // Seeded cyclic visiting order; the cursor moves past each update.
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), std::mt19937_64(seed ^ 0x9e3779b97f4a7c15ULL));
    std::size_t cursor = 0;

    std::vector<int> predicted(data.size());
    const double m = static_cast<double>(data.size());
    for (;;) {
        double wrong = 0.0;
        for (std::size_t j = 0; j < data.size(); ++j) {
            predicted[j] = classify_perceptron(out.model, data[j].x);
            wrong += std::abs(data[j].label - predicted[j]);
        }
        out.error = wrong / m;
        if (out.error < hyper.error_threshold) break;
        if (out.iterations == hyper.max_iterations) {
            out.capped = true;
            break;
        }
        std::size_t pick = order[cursor];
        for (std::size_t step = 0; step < order.size(); ++step) {
            const std::size_t j = order[(cursor + step) % order.size()];
            if (predicted[j] != data[j].label) {
                pick = j;
                cursor = (cursor + step + 1) % order.size();
                break;
            }
        }
        const double scale = hyper.learning_rate * static_cast<double>(data[pick].label - predicted[pick]);
        out.model.bias += scale;  // constant-1 input
        out.model.weights += scale * data[pick].x;
        ++out.iterations;
    }
    return out;
}

// ---------------------------------------------------------------------------

Eigen::VectorXd encode(const AutoencoderModel &model, const Eigen::VectorXd &x) {
    const auto &net = model.network;
    check_input(net, x);
    Eigen::VectorXd z = net.biases[0] + net.weights[0] * x;
    for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = activate(net.activations[0], z(i));
    return z;
}

Eigen::VectorXd decode(const AutoencoderModel &model, const Eigen::VectorXd &code) {
    const auto &net = model.network;
    if (code.size() != model.code_size()) {
        throw Error(ErrorCode::InvalidArgument, "code has " + std::to_string(code.size()) + " components, expected " +
                                                    std::to_string(model.code_size()));
    }
    Eigen::VectorXd y = net.biases[1] + net.weights[1] * code;
    for (Eigen::Index i = 0; i < y.size(); ++i) y(i) = activate(net.activations[1], y(i));
    return y;
}

double reconstruction_loss(const AutoencoderModel &model, const std::vector<Eigen::VectorXd> &data) {
    double total = 0.0;
    for (const auto &x : data) total += (x - decode(model, encode(model, x))).squaredNorm();
    return total;
}

AutoencoderTraining train_autoencoder(const std::vector<Eigen::VectorXd> &data, const AutoencoderOptions &options) {
    if (data.empty()) throw Error(ErrorCode::InvalidArgument, "empty training set");
    const int m = static_cast<int>(data.front().size());
    if (options.code_size < 1 || options.code_size >= m) {
        throw Error(ErrorCode::InvalidArgument,
                    "code size " + std::to_string(options.code_size) + " must be in [1, " + std::to_string(m) + ")");
    }
    if (options.epochs < 1) throw Error(ErrorCode::InvalidArgument, "epochs must be >= 1");
    if (!(options.learning_rate >= 0.0)) throw Error(ErrorCode::InvalidArgument, "learning rate must be >= 0");

    std::vector<TrainingPair> pairs;
    for (const auto &x : data) {
        if (x.size() != m) throw Error(ErrorCode::InvalidArgument, "training vectors differ in dimension");
        pairs.push_back({x, x});
    }

    AutoencoderTraining out;
    out.model.network = FeedforwardNetwork::random(
        {m, options.code_size, m}, {{ActivationKind::Sigmoid, 0.0}, {ActivationKind::Identity, 0.0}},
        options.init_scale, options.seed);
    auto &net = out.model.network;
    Eigen::VectorXd params = flatten_parameters(net);
    out.loss_trace.push_back(loss(net, pairs));
    for (int epoch = 1; epoch <= options.epochs; ++epoch) {
        params -= options.learning_rate * loss_gradient(net, pairs);
        if (!params.allFinite()) {
            throw Error(ErrorCode::Numerical, "autoencoder training diverged", "epoch " + std::to_string(epoch));
        }
        assign_parameters(net, params);
        const double l = loss(net, pairs);
        if (!std::isfinite(l)) {
            throw Error(ErrorCode::Numerical, "autoencoder loss is not finite", "epoch " + std::to_string(epoch));
        }
        out.loss_trace.push_back(l);
    }
    return out;
}

}  // namespace qwb
