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

#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace qwb {

enum class ActivationKind { Heaviside, Sigmoid, Identity };

struct Activation {
    ActivationKind kind = ActivationKind::Identity;
    double threshold = 0.0;  // Heaviside only: 1 iff input >= threshold
};

/// Layered network; layer l (1-based) computes
/// alpha_l(biases[l-1] + weights[l-1] * previous).
struct FeedforwardNetwork {
    std::vector<int> layer_sizes;
    std::vector<Eigen::MatrixXd> weights;  // weights[l]: sizes[l+1] x sizes[l]
    std::vector<Eigen::VectorXd> biases;   // biases[l]: sizes[l+1]
    std::vector<Activation> activations;   // one per non-input layer

    /// Zero weights and biases, identity activations.
    static FeedforwardNetwork zeros(std::vector<int> layer_sizes);
    /// Weights and biases uniform in [-scale, scale].
    static FeedforwardNetwork random(std::vector<int> layer_sizes, std::vector<Activation> activations, double scale,
                                     std::uint64_t seed);

    int input_size() const { return layer_sizes.front(); }
    int output_size() const { return layer_sizes.back(); }
    std::size_t parameter_count() const;
};

/// Shapes agree and every parameter is finite; throws InvalidArgument.
void validate(const FeedforwardNetwork &net);

Eigen::VectorXd forward(const FeedforwardNetwork &net, const Eigen::VectorXd &x);

struct TrainingPair {
    Eigen::VectorXd input;
    Eigen::VectorXd target;
};

/// Sum over pairs of ||target - F(input)||^2.
double loss(const FeedforwardNetwork &net, const std::vector<TrainingPair> &pairs);

/// Gradient of `loss` by backpropagation, flattened in the order of
/// `flatten_parameters`. Heaviside layers are rejected.
Eigen::VectorXd loss_gradient(const FeedforwardNetwork &net, const std::vector<TrainingPair> &pairs);

/// weights[0] (column-major), biases[0], weights[1], biases[1], ...
Eigen::VectorXd flatten_parameters(const FeedforwardNetwork &net);
void assign_parameters(FeedforwardNetwork &net, const Eigen::VectorXd &flat);

// ---------------------------------------------------------------------------
// Perceptron

struct PerceptronHyperparameters {
    double learning_rate = 0.1;  // r
    double error_threshold = 1e-6;  // gamma
    int max_iterations = 10000;  // N
};

struct PerceptronModel {
    Eigen::VectorXd weights;
    double bias = 0.0;
    PerceptronHyperparameters hyperparameters;
};

struct LabeledPoint {
    Eigen::VectorXd x;
    int label = 0;  // 0 or 1
};

struct PerceptronTraining {
    PerceptronModel model;
    double error = 0.0;  // e at termination
    int iterations = 0;  // updates performed
    bool capped = false; // stopped by the iteration cap with e >= gamma
};

/// 1 iff <w, x> + b >= 0; points on the hyperplane count as class 1.
int classify_perceptron(const PerceptronModel &model, const Eigen::VectorXd &x);

/// Error-driven training. Each step computes e = mean |c - y| over the whole
/// set, stops when e < gamma or after N updates, and otherwise updates with
/// the next misclassified point of a seeded cyclic order. Initial weights
/// and bias are uniform in [-0.05, 0.05].
PerceptronTraining train_perceptron(const std::vector<LabeledPoint> &data, const PerceptronHyperparameters &hyper,
                                    std::uint64_t seed);

/// Same as above from explicit initial parameters.
PerceptronTraining train_perceptron(const std::vector<LabeledPoint> &data, const PerceptronHyperparameters &hyper,
                                    std::uint64_t seed, const Eigen::VectorXd &initial_weights, double initial_bias);

// ---------------------------------------------------------------------------
// Autoencoder

/// Three layers m -> k -> m: sigmoid code layer, identity output layer.
struct AutoencoderModel {
    FeedforwardNetwork network;
    int code_size() const { return network.layer_sizes[1]; }
    int input_size() const { return network.layer_sizes[0]; }
};

struct AutoencoderOptions {
    int code_size = 1;
    int epochs = 1000;
    double learning_rate = 0.01;
    std::uint64_t seed = 0;
    double init_scale = 0.5;
};

struct AutoencoderTraining {
    AutoencoderModel model;
    /// Loss before the first update followed by the loss after every epoch.
    std::vector<double> loss_trace;
};

/// Full-batch gradient descent on sum_k ||x_k - decode(encode(x_k))||^2.
AutoencoderTraining train_autoencoder(const std::vector<Eigen::VectorXd> &data, const AutoencoderOptions &options);

Eigen::VectorXd encode(const AutoencoderModel &model, const Eigen::VectorXd &x);
Eigen::VectorXd decode(const AutoencoderModel &model, const Eigen::VectorXd &code);
double reconstruction_loss(const AutoencoderModel &model, const std::vector<Eigen::VectorXd> &data);

}  // namespace qwb
