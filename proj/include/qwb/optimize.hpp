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
#include <functional>
#include <span>
#include <string_view>
#include <vector>

namespace qwb {

using Objective = std::function<double(std::span<const double>)>;
using Gradient = std::function<std::vector<double>(std::span<const double>)>;

enum class OptimizerKind { NelderMead, Spsa, GradientDescent };

std::string_view to_string(OptimizerKind kind);
OptimizerKind parse_optimizer_kind(std::string_view s);

/// Spall's gain sequences a_k = a / (k + 1 + A)^alpha, c_k = c / (k + 1)^gamma.
struct SpsaGains {
    double a = 0.2;
    double c = 0.1;
    double alpha = 0.602;
    double gamma = 0.101;
    double stability = 0.0;  // A
};

struct OptimizerConfig {
    OptimizerKind kind = OptimizerKind::NelderMead;
    int max_iterations = 100;
    /// Nelder-Mead stops once the vertex values spread less than this and
    /// the simplex extent is below its square root.
    double tolerance = 1e-8;
    SpsaGains spsa;
    double learning_rate = 0.1;
    /// Central-difference step used by gradient descent without a gradient.
    double gradient_step = 1e-6;
    /// Offset of the extra simplex vertices from x0 along each axis.
    double simplex_step = 0.05;
    std::uint64_t seed = 0;
};

/// Throws InvalidArgument on non-positive constants.
void validate(const OptimizerConfig &config);

struct OptimizationResult {
    std::vector<double> x;  // best point seen, x0 included
    double value = 0.0;
    /// Best value seen after each iteration; non-increasing.
    std::vector<double> trace;
    int iterations = 0;
    int evaluations = 0;
    bool converged = false;
};

/// Minimizes `f` from `x0`. Deterministic for a fixed config and seed. A
/// non-finite objective value raises Numerical with the offending point in
/// the error context. `gradient` is only consulted by gradient descent.
OptimizationResult minimize(const Objective &f, std::vector<double> x0, const OptimizerConfig &config,
                            const Gradient &gradient = {});

/// (f(x + h e_i) - f(x - h e_i)) / 2h for every coordinate.
std::vector<double> finite_difference_gradient(const Objective &f, std::span<const double> x, double h);

}  // namespace qwb
