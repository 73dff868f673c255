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

#include <random>

#include "qwb/embedding.hpp"
#include "qwb/error.hpp"

using namespace qwb;

namespace {

DistanceMatrix from_points(const Eigen::MatrixXd &x) {
    DistanceMatrix d;
    d.values.resize(x.rows(), x.rows());
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        d.ids.push_back("p" + std::to_string(i));
        for (Eigen::Index j = 0; j < x.rows(); ++j) d.values(i, j) = (x.row(i) - x.row(j)).norm();
    }
    return d;
}

DistanceMatrix uniform(int n, double value) {
    DistanceMatrix d;
    d.values = Eigen::MatrixXd::Constant(n, n, value);
    d.values.diagonal().setZero();
    for (int i = 0; i < n; ++i) d.ids.push_back("p" + std::to_string(i));
    return d;
}

Eigen::MatrixXd random_points(std::mt19937_64 &rng, int n, int dims) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::MatrixXd x(n, dims);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < dims; ++k) x(i, k) = u(rng);
    return x;
}

double pair_distance(const EmbeddedPoints &e, int i, int j) { return (e.coordinates.row(i) - e.coordinates.row(j)).norm(); }

// Minimum 1-D stress over a grid, with the first point fixed at 0.
double grid_stress_1d(const DistanceMatrix &d) {
    double best = std::numeric_limits<double>::infinity();
    Eigen::MatrixXd x(3, 1);
    x(0, 0) = 0.0;
    for (int a = -200; a <= 200; ++a) {
        for (int b = -200; b <= 200; ++b) {
            x(1, 0) = a / 100.0;
            x(2, 0) = b / 100.0;
            double s = 0.0;
            for (int i = 0; i < 3; ++i)
                for (int j = i + 1; j < 3; ++j) {
                    const double r = d.values(i, j) - std::abs(x(i, 0) - x(j, 0));
                    s += r * r;
                }
            best = std::min(best, s);
        }
    }
    return best;
}

}  // namespace

TEST(embedding, equilateral_triangle_mds) {
    const auto e = classical_mds(uniform(3, 1.0), 2);
    ASSERT_EQ(e.coordinates.rows(), 3);
    ASSERT_EQ(e.coordinates.cols(), 2);
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j) EXPECT_NEAR(pair_distance(e, i, j), 1.0, 1e-9);
    EXPECT_LE(e.stress, 1e-12);
    EXPECT_EQ(e.clamped_eigenvalues, 0);
}

TEST(embedding, euclidean_points_reembed_exactly) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const auto x = random_points(rng, 3 + trial % 8, 2);
        const auto d = from_points(x);
        EXPECT_LE(classical_mds(d, 2).stress, 1e-8);
        SmacofOptions options;
        options.seed = trial;
        options.tolerance = 1e-14;
        options.max_iterations = 5000;
        options.init = SmacofInit::Classical;
        EXPECT_LE(smacof(d, options).points.stress, 1e-6);
    }
}

TEST(embedding, smacof_from_exact_start_stops_early) {
    std::mt19937_64 rng(3);
    const auto d = from_points(random_points(rng, 6, 2));
    SmacofOptions options;
    options.init = SmacofInit::Classical;
    const auto r = smacof(d, options);
    EXPECT_LE(r.points.stress, options.tolerance);
    EXPECT_LE(r.iterations, 2);
}

TEST(embedding, smacof_trace_is_non_increasing) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        DistanceMatrix d = uniform(8, 0.0);
        std::uniform_real_distribution<double> u(0.1, 2.0);
        for (int i = 0; i < 8; ++i)
            for (int j = i + 1; j < 8; ++j) d.values(i, j) = d.values(j, i) = u(rng);
        SmacofOptions options;
        options.seed = trial;
        const auto r = smacof(d, options);
        ASSERT_GE(r.stress_trace.size(), 1u);
        for (std::size_t k = 1; k < r.stress_trace.size(); ++k) EXPECT_LE(r.stress_trace[k], r.stress_trace[k - 1]);
    }
}

TEST(embedding, triangle_on_a_line_has_positive_stress) {
    const auto d = uniform(3, 1.0);
    SmacofOptions options;
    options.dimensions = 1;
    options.max_iterations = 1000;
    const auto r = smacof(d, options);
    const double oracle = grid_stress_1d(d);
    EXPECT_GT(r.points.stress, 0.0);
    EXPECT_GE(r.points.stress, oracle - 1e-3);
    EXPECT_NEAR(r.points.stress, oracle, 1e-3);
}

TEST(embedding, smacof_is_deterministic) {
    std::mt19937_64 rng(9);
    const auto d = from_points(random_points(rng, 7, 3));
    SmacofOptions options;
    options.seed = 42;
    const auto a = smacof(d, options);
    const auto b = smacof(d, options);
    EXPECT_EQ(a.points.coordinates, b.points.coordinates);
    EXPECT_EQ(a.stress_trace, b.stress_trace);
}

TEST(embedding, stress_examples) {
    DistanceMatrix d = uniform(2, 1.0);
    Eigen::MatrixXd x(2, 2);
    x << 0, 0, 1, 1;
    // Euclidean distance sqrt(2) against target 1.
    EXPECT_NEAR(stress(x, d, 2.0), (std::sqrt(2.0) - 1) * (std::sqrt(2.0) - 1), 1e-15);
    EXPECT_NEAR(stress(x, d, 1.0), 1.0, 1e-15);
    EXPECT_THROW(stress(x, d, 0.5), Error);
    EXPECT_THROW(stress(Eigen::MatrixXd::Zero(3, 2), d, 2.0), Error);
    Eigen::RowVectorXd a(2), b(2);
    a << 0, 0;
    b << 3, 4;
    EXPECT_NEAR(minkowski_distance(a, b, 2.0), 5.0, 1e-15);
    EXPECT_NEAR(minkowski_distance(a, b, 1.0), 7.0, 1e-15);
}

TEST(embedding, identical_entities_coincide) {
    DistanceMatrix d = uniform(5, 1.0);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) d.values(i, j) = 0.0;
    const auto e = classical_mds(d, 2);
    EXPECT_LE(pair_distance(e, 0, 1), 1e-9);
    EXPECT_LE(pair_distance(e, 1, 2), 1e-9);
}

TEST(embedding, mds_is_permutation_equivariant) {
    std::mt19937_64 rng(21);
    const auto d = from_points(random_points(rng, 6, 3));
    const std::vector<int> perm{3, 0, 5, 1, 4, 2};
    DistanceMatrix p = d;
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) p.values(i, j) = d.values(perm[i], perm[j]);
    const auto a = classical_mds(d, 2);
    const auto b = classical_mds(p, 2);
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) EXPECT_NEAR(pair_distance(b, i, j), pair_distance(a, perm[i], perm[j]), 1e-9);
}

TEST(embedding, mds_orientation_and_clamping) {
    std::mt19937_64 rng(2);
    const auto e = classical_mds(from_points(random_points(rng, 5, 2)), 2);
    for (int k = 0; k < 2; ++k) {
        Eigen::Index arg;
        e.coordinates.col(k).cwiseAbs().maxCoeff(&arg);
        EXPECT_GT(e.coordinates(arg, k), 0.0);
    }
    // Two long pairs among unit distances: Gram spectrum {4.5, 4.5, 0, -0.3, -3.5}.
    DistanceMatrix bad = uniform(5, 1.0);
    bad.values(0, 1) = bad.values(1, 0) = bad.values(2, 3) = bad.values(3, 2) = 3.0;
    EXPECT_EQ(classical_mds(bad, 4).clamped_eigenvalues, 1);
    EXPECT_EQ(classical_mds(bad, 2).clamped_eigenvalues, 0);
}

TEST(embedding, argument_errors) {
    const auto d = uniform(3, 1.0);
    EXPECT_THROW(classical_mds(d, 0), Error);
    EXPECT_THROW(classical_mds(d, 3), Error);
    SmacofOptions options;
    options.max_iterations = 0;
    EXPECT_THROW(smacof(d, options), Error);
    options = {};
    options.tolerance = 0.0;
    EXPECT_THROW(smacof(d, options), Error);
    DistanceMatrix asym = d;
    asym.values(0, 1) = 2.0;
    EXPECT_THROW(classical_mds(asym, 2), Error);
}

TEST(embedding, pca_examples) {
    Eigen::MatrixXd x(4, 3);
    x << 1, 0, 0,
        -1, 0, 0,
         0, 0.5, 0,
         0, -0.5, 0;
    const auto e = pca(x, 2, {"a", "b", "c", "d"});
    // First axis is the x direction (variance 0.5), second the y direction.
    EXPECT_NEAR(std::abs(e.coordinates(0, 0)), 1.0, 1e-12);
    EXPECT_NEAR(std::abs(e.coordinates(2, 1)), 0.5, 1e-12);
    EXPECT_NEAR(e.coordinates(0, 1), 0.0, 1e-12);
    EXPECT_EQ(e.ids.size(), 4u);

    std::mt19937_64 rng(8);
    const auto y = random_points(rng, 10, 3);
    const auto full = pca(y, 3);
    for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 10; ++j)
            EXPECT_NEAR((full.coordinates.row(i) - full.coordinates.row(j)).norm(), (y.row(i) - y.row(j)).norm(), 1e-9);
    EXPECT_THROW(pca(y, 4), Error);
    EXPECT_THROW(pca(y.topRows(1), 1), Error);
}
