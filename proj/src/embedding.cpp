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

#include "qwb/embedding.hpp"

#include <cmath>
#include <random>

#include "qwb/error.hpp"

namespace qwb {

namespace {

// Flip each column so its largest-magnitude entry (first on ties) is positive.
void orient_columns(Eigen::MatrixXd &m) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
        Eigen::Index best = 0;
        for (Eigen::Index r = 1; r < m.rows(); ++r) {
            if (std::abs(m(r, c)) > std::abs(m(best, c))) best = r;
        }
        if (m.rows() > 0 && m(best, c) < 0.0) m.col(c) = -m.col(c);
    }
}

void check_dimensions(const DistanceMatrix &d, int dimensions) {
    validate(d);
    const auto order = static_cast<int>(d.order());
    if (dimensions < 1 || dimensions >= order) {
        throw Error(ErrorCode::InvalidArgument, "embedding dimension " + std::to_string(dimensions) +
                                                    " must be in [1, " + std::to_string(order) + ")");
    }
}

Eigen::MatrixXd euclidean_distances(const Eigen::MatrixXd &x) {
    const Eigen::Index n = x.rows();
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            out(i, j) = out(j, i) = (x.row(i) - x.row(j)).norm();
        }
    }
    return out;
}

double raw_stress(const Eigen::MatrixXd &target, const Eigen::MatrixXd &actual) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < target.rows(); ++i) {
        for (Eigen::Index j = i + 1; j < target.cols(); ++j) {
            const double r = target(i, j) - actual(i, j);
            s += r * r;
        }
    }
    return s;
}

}  // namespace

double minkowski_distance(const Eigen::Ref<const Eigen::RowVectorXd> &a, const Eigen::Ref<const Eigen::RowVectorXd> &b,
                          double p) {
    if (p == 2.0) return (a - b).norm();
    double sum = 0.0;
    for (Eigen::Index k = 0; k < a.size(); ++k) sum += std::pow(std::abs(a(k) - b(k)), p);
    return std::pow(sum, 1.0 / p);
}

double stress(const Eigen::MatrixXd &points, const DistanceMatrix &d, double p) {
    const auto n = static_cast<Eigen::Index>(d.order());
    if (points.rows() != n || d.values.rows() != n || d.values.cols() != n) {
        throw Error(ErrorCode::InvalidArgument, "stress: point count " + std::to_string(points.rows()) +
                                                    " does not match matrix order " + std::to_string(n));
    }
    if (!(p >= 1.0)) throw Error(ErrorCode::InvalidArgument, "norm exponent must be >= 1");
    double s = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double r = d.values(i, j) - minkowski_distance(points.row(i), points.row(j), p);
            s += r * r;
        }
    }
    return s;
}

EmbeddedPoints classical_mds(const DistanceMatrix &d, int dimensions) {
    check_dimensions(d, dimensions);
    const auto n = static_cast<Eigen::Index>(d.order());
    const Eigen::MatrixXd squared = d.values.array().square().matrix();
    const Eigen::MatrixXd centering =
        Eigen::MatrixXd::Identity(n, n) - Eigen::MatrixXd::Constant(n, n, 1.0 / static_cast<double>(n));
    Eigen::MatrixXd gram = -0.5 * centering * squared * centering;
    gram = 0.5 * (gram + gram.transpose());

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
    EmbeddedPoints out;
    out.ids = d.ids;
    out.dimensions = dimensions;
    out.coordinates.resize(n, dimensions);
    // Eigenvalues come back ascending.
    const double scale = std::max(1.0, std::abs(eig.eigenvalues()(n - 1)));
    for (int k = 0; k < dimensions; ++k) {
        const Eigen::Index src = n - 1 - k;
        double lambda = eig.eigenvalues()(src);
        if (lambda < 0.0) {
            // Round-off around zero is not a diagnostic, only genuinely
            // non-Euclidean input is.
            if (lambda < -1e-9 * scale) ++out.clamped_eigenvalues;
            lambda = 0.0;
        }
        out.coordinates.col(k) = eig.eigenvectors().col(src) * std::sqrt(lambda);
    }
    orient_columns(out.coordinates);
    out.stress = stress(out.coordinates, d, out.norm_exponent);
    return out;
}

SmacofResult smacof(const DistanceMatrix &d, const SmacofOptions &options) {
    check_dimensions(d, options.dimensions);
    if (options.max_iterations < 1) throw Error(ErrorCode::InvalidArgument, "max iterations must be >= 1");
    if (!(options.tolerance > 0.0)) throw Error(ErrorCode::InvalidArgument, "tolerance must be positive");
    if (!(options.norm_exponent >= 1.0)) throw Error(ErrorCode::InvalidArgument, "norm exponent must be >= 1");

    const auto n = static_cast<Eigen::Index>(d.order());
    Eigen::MatrixXd x;
    if (options.init == SmacofInit::Classical) {
        x = classical_mds(d, options.dimensions).coordinates;
    } else {
        std::mt19937_64 rng(options.seed);
        std::uniform_real_distribution<double> unit(-1.0, 1.0);
        const double scale = d.values.maxCoeff() > 0.0 ? d.values.maxCoeff() : 1.0;
        x.resize(n, options.dimensions);
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index k = 0; k < options.dimensions; ++k) x(i, k) = scale * unit(rng);
        }
    }

    SmacofResult out;
    Eigen::MatrixXd current = euclidean_distances(x);
    double s = raw_stress(d.values, current);
    out.stress_trace.push_back(s);
    Eigen::MatrixXd b(n, n);
    for (int iter = 0; iter < options.max_iterations; ++iter) {
        b.setZero();
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < n; ++j) {
                if (i != j && current(i, j) > 0.0) b(i, j) = -d.values(i, j) / current(i, j);
            }
            b(i, i) = -b.row(i).sum();
        }
        Eigen::MatrixXd next = b * x / static_cast<double>(n);
        Eigen::MatrixXd next_dist = euclidean_distances(next);
        const double next_s = raw_stress(d.values, next_dist);
        ++out.iterations;
        if (next_s > s) break;
        x = std::move(next);
        current = std::move(next_dist);
        const double delta = s - next_s;
        s = next_s;
        out.stress_trace.push_back(s);
        if (delta < options.tolerance) break;
    }

    out.points.ids = d.ids;
    out.points.dimensions = options.dimensions;
    out.points.norm_exponent = options.norm_exponent;
    out.points.coordinates = std::move(x);
    out.points.stress = stress(out.points.coordinates, d, options.norm_exponent);
    return out;
}

EmbeddedPoints pca(const Eigen::MatrixXd &vectors, int dimensions, std::vector<std::string> ids) {
    if (vectors.rows() < 2) throw Error(ErrorCode::InvalidArgument, "PCA needs at least two vectors");
    if (dimensions < 1 || dimensions > vectors.cols()) {
        throw Error(ErrorCode::InvalidArgument, "PCA dimension " + std::to_string(dimensions) + " must be in [1, " +
                                                    std::to_string(vectors.cols()) + "]");
    }
    if (!ids.empty() && static_cast<Eigen::Index>(ids.size()) != vectors.rows()) {
        throw Error(ErrorCode::InvalidArgument, "PCA id list does not match vector count");
    }
    const Eigen::RowVectorXd mean = vectors.colwise().mean();
    const Eigen::MatrixXd centred = vectors.rowwise() - mean;
    const Eigen::MatrixXd cov = centred.transpose() * centred / static_cast<double>(vectors.rows() - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    const Eigen::Index dim = vectors.cols();
    Eigen::MatrixXd axes(dim, dimensions);
    for (int k = 0; k < dimensions; ++k) axes.col(k) = eig.eigenvectors().col(dim - 1 - k);

    EmbeddedPoints out;
    out.ids = std::move(ids);
    out.dimensions = dimensions;
    out.coordinates = centred * axes;
    orient_columns(out.coordinates);
    return out;
}

}  // namespace qwb
