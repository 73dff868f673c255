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
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qwb/similarity.hpp"

namespace qwb {

struct EmbeddedPoints {
    std::vector<std::string> ids;
    Eigen::MatrixXd coordinates;  // one row per entity
    int dimensions = 2;
    double norm_exponent = 2.0;
    double stress = 0.0;
    /// Negative eigenvalues clamped to zero by classical MDS.
    int clamped_eigenvalues = 0;
};

/// Torgerson scaling: double-centre the squared distances and keep the top
/// `dimensions` eigenpairs. Each axis is oriented so that its
/// largest-magnitude coordinate is positive.
EmbeddedPoints classical_mds(const DistanceMatrix &d, int dimensions);

enum class SmacofInit { Random, Classical };

struct SmacofOptions {
    int dimensions = 2;
    int max_iterations = 300;
    double tolerance = 1e-9;
    std::uint64_t seed = 0;
    SmacofInit init = SmacofInit::Random;
    /// Exponent for the reported stress; majorization itself is Euclidean.
    double norm_exponent = 2.0;
};

struct SmacofResult {
    EmbeddedPoints points;
    /// Euclidean raw stress before the first and after every iteration.
    std::vector<double> stress_trace;
    int iterations = 0;
};

/// Stress majorization with unweighted Guttman transforms. The trace is
/// non-increasing; a transform that would raise stress (round-off at
/// convergence) ends the run with the previous configuration.
SmacofResult smacof(const DistanceMatrix &d, const SmacofOptions &options);

/// Sum over i < j of (d_ij - ||x_i - x_j||_p)^2.
double stress(const Eigen::MatrixXd &points, const DistanceMatrix &d, double p = 2.0);
double minkowski_distance(const Eigen::Ref<const Eigen::RowVectorXd> &a, const Eigen::Ref<const Eigen::RowVectorXd> &b,
                          double p);

/// Mean-centred projection onto the top `dimensions` principal axes, in
/// descending eigenvalue order with the same sign convention as MDS.
EmbeddedPoints pca(const Eigen::MatrixXd &vectors, int dimensions, std::vector<std::string> ids = {});

}  // namespace qwb
