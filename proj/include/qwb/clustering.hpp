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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "qwb/embedding.hpp"
#include "qwb/optimize.hpp"
#include "qwb/quantumsim.hpp"
#include "qwb/similarity.hpp"

namespace qwb {

struct WeightedEdge {
    int i = 0;
    int j = 0;  // i < j
    double weight = 0.0;
};

class WeightedGraph {
  public:
    WeightedGraph() = default;
    /// Throws InvalidArgument on self-loops, duplicate edges, i >= j,
    /// out-of-range endpoints and negative or non-finite weights.
    WeightedGraph(std::vector<std::string> node_ids, std::vector<WeightedEdge> edges);

    int size() const noexcept { return static_cast<int>(node_ids_.size()); }
    const std::vector<std::string> &node_ids() const noexcept { return node_ids_; }
    const std::vector<WeightedEdge> &edges() const noexcept { return edges_; }
    double total_weight() const;

    /// Subgraph over `nodes` (indices into this graph), renumbered in order.
    WeightedGraph induced(std::span<const int> nodes) const;

  private:
    std::vector<std::string> node_ids_;
    std::vector<WeightedEdge> edges_;
};

/// Bit i of a basis index is node i; bit value 1 puts the node in S.
using CutBits = std::vector<std::uint8_t>;

struct CutAssignment {
    CutBits bits;
    double value = 0.0;
};

/// Complete graph weighted by the distances; with a threshold, edges lighter
/// than it are dropped.
WeightedGraph graph_from_distance_matrix(const DistanceMatrix &d, std::optional<double> edge_threshold = std::nullopt);

/// Total weight of the edges crossing the partition.
double cut_value(const WeightedGraph &g, std::span<const std::uint8_t> bits);
double cut_value(const WeightedGraph &g, std::uint64_t basis_index);
/// The binary cost with its leading 1/2 factor, i.e. cut_value / 2. Same
/// argmax as cut_value.
double half_scaled_binary_cost(const WeightedGraph &g, std::span<const std::uint8_t> bits);
/// sum over edges of w * (1 - z_i z_j) / 2 for spins z in {-1, +1}.
double ising_cost(const WeightedGraph &g, std::span<const int> spins);

CutBits bits_from_index(std::uint64_t index, int n);
std::uint64_t index_from_bits(std::span<const std::uint8_t> bits);
/// Flips every bit when node 0 is in S, so node 0 always lands in T.
CutBits canonical(CutBits bits);

inline constexpr int kBruteForceLimit = 24;

/// Exhaustive search with node 0 fixed in T; ties resolve to the smallest
/// bitstring.
CutAssignment brute_force_maxcut(const WeightedGraph &g);

/// Best single-flip local optimum over seeded random restarts (restart r is
/// seeded with seed + r).
CutAssignment local_search_maxcut(const WeightedGraph &g, int restarts, std::uint64_t seed);

/// entry_x = (w_s(x) - w_d(x)) / 2, i.e. total/2 - cut_value(x). Its minimal
/// entries index exactly the maximum cuts.
struct MaxCutDiagonal {
    int qubits = 0;
    std::vector<double> diagonal;

    DiagonalObservable observable() const { return {qubits, diagonal}; }
};

MaxCutDiagonal maxcut_diagonal(const WeightedGraph &g, int qubit_cap = kDefaultQubitCap);

/// cut_value(x) for every basis index x.
DiagonalObservable cut_value_diagonal(const WeightedGraph &g, int qubit_cap = kDefaultQubitCap);

struct QaoaOptions {
    int reps = 1;
    OptimizerConfig optimizer{.kind = OptimizerKind::Spsa, .max_iterations = 100};
    std::uint64_t seed = 0;
    /// Read the answer from `shots` samples instead of the statevector argmax.
    bool sample_readout = false;
    std::uint64_t shots = 1024;
    int qubit_cap = kDefaultQubitCap;
};

struct QaoaResult {
    CutAssignment assignment;
    /// Best expected cut value after each optimizer iteration.
    std::vector<double> expectation_trace;
    std::vector<double> parameters;  // gamma_1, beta_1, ..., gamma_p, beta_p
    double expectation = 0.0;
};

/// Expected cut value of the QAOA state for the given (gamma, beta) pairs.
double qaoa_expectation(const WeightedGraph &g, std::span<const double> parameters, int qubit_cap = kDefaultQubitCap);
/// |+>^n followed by p layers of exp(-i gamma C) and prod RX(2 beta).
StateVector qaoa_state(const DiagonalObservable &cut_diagonal, std::span<const double> parameters,
                       int qubit_cap = kDefaultQubitCap);

QaoaResult qaoa_maxcut(const WeightedGraph &g, const QaoaOptions &options);

enum class Entanglement { Linear, Full, Circular };
std::string_view to_string(Entanglement e);
Entanglement parse_entanglement(std::string_view s);

struct VqeOptions {
    int reps = 1;
    Entanglement entanglement = Entanglement::Linear;
    OptimizerConfig optimizer{.kind = OptimizerKind::NelderMead, .max_iterations = 2000, .tolerance = 1e-10,
                              .simplex_step = 0.5};
    /// Independent optimizer runs from seeded random angles; the best wins.
    int starts = 4;
    std::uint64_t seed = 0;
    int qubit_cap = kDefaultQubitCap;
};

struct VqeResult {
    double eigenvalue = 0.0;
    std::uint64_t basis_state = 0;
    std::vector<double> parameters;
    /// Every expectation evaluated during optimization, in call order.
    std::vector<double> evaluations;
    std::vector<double> trace;
};

/// Number of RY angles of the two-local ansatz: (reps + 1) * qubits.
int vqe_parameter_count(int qubits, int reps);
/// Per rep an RY layer then CNOT entanglement, followed by a final RY layer.
StateVector vqe_state(int qubits, int reps, Entanglement entanglement, std::span<const double> parameters,
                      int qubit_cap = kDefaultQubitCap);

VqeResult vqe_min_eigen(const DiagonalObservable &obs, const VqeOptions &options);

enum class MaxCutMethod { BruteForce, LocalSearch, Qaoa, Vqe };
std::string_view to_string(MaxCutMethod m);
MaxCutMethod parse_maxcut_method(std::string_view s);

struct ClusterOptions {
    MaxCutMethod method = MaxCutMethod::BruteForce;
    int clusters = 2;  // power of two
    int restarts = 8;
    QaoaOptions qaoa;
    VqeOptions vqe;
    std::uint64_t seed = 0;
    std::optional<double> edge_threshold;
};

struct SplitRecord {
    std::vector<std::string> members;
    CutAssignment cut;
    std::vector<double> trace;  // optimizer trace for variational methods
};

struct ClusterResult {
    std::vector<int> labels;  // aligned with the distance matrix ids
    std::vector<SplitRecord> splits;
    /// Parts that were too small to split further.
    std::vector<std::string> diagnostics;
};

/// 2^k clusters by recursive max-cut bisection.
ClusterResult maxcut_cluster(const DistanceMatrix &d, const ClusterOptions &options);

struct KMeansResult {
    std::vector<int> labels;
    Eigen::MatrixXd centroids;
    double inertia = 0.0;
    std::vector<double> inertia_trace;
    int iterations = 0;
};

/// k-means++ seeding followed by Lloyd iterations.
KMeansResult kmeans(const Eigen::MatrixXd &points, int k, int max_iterations, std::uint64_t seed);

}  // namespace qwb
