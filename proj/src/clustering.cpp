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

#include "qwb/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <set>

#include "qwb/error.hpp"

namespace qwb {

// ---------------------------------------------------------------------------
// Graphs and cut costs

WeightedGraph::WeightedGraph(std::vector<std::string> node_ids, std::vector<WeightedEdge> edges)
    : node_ids_(std::move(node_ids)), edges_(std::move(edges)) {
    const int n = size();
    std::set<std::pair<int, int>> seen;
    for (const auto &e : edges_) {
        const std::string where = std::to_string(e.i) + "-" + std::to_string(e.j);
        if (e.i == e.j) throw Error(ErrorCode::InvalidArgument, "self-loop in graph", where);
        if (e.i < 0 || e.j >= n || e.i > e.j) {
            throw Error(ErrorCode::InvalidArgument, "edge endpoints must satisfy 0 <= i < j < n", where);
        }
        if (!std::isfinite(e.weight) || e.weight < 0.0) {
            throw Error(ErrorCode::InvalidArgument, "edge weights must be finite and non-negative", where);
        }
        if (!seen.emplace(e.i, e.j).second) throw Error(ErrorCode::InvalidArgument, "duplicate edge", where);
    }
}

double WeightedGraph::total_weight() const {
    double s = 0.0;
    for (const auto &e : edges_) s += e.weight;
    return s;
}

WeightedGraph WeightedGraph::induced(std::span<const int> nodes) const {
    std::vector<int> position(node_ids_.size(), -1);
    std::vector<std::string> ids;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        position[static_cast<std::size_t>(nodes[k])] = static_cast<int>(k);
        ids.push_back(node_ids_[static_cast<std::size_t>(nodes[k])]);
    }
    std::vector<WeightedEdge> edges;
    for (const auto &e : edges_) {
        const int a = position[static_cast<std::size_t>(e.i)];
        const int b = position[static_cast<std::size_t>(e.j)];
        if (a < 0 || b < 0) continue;
        edges.push_back({std::min(a, b), std::max(a, b), e.weight});
    }
    std::sort(edges.begin(), edges.end(),
              [](const WeightedEdge &x, const WeightedEdge &y) { return std::pair(x.i, x.j) < std::pair(y.i, y.j); });
    return WeightedGraph(std::move(ids), std::move(edges));
}

WeightedGraph graph_from_distance_matrix(const DistanceMatrix &d, std::optional<double> edge_threshold) {
    validate(d);
    const int n = static_cast<int>(d.order());
    std::vector<WeightedEdge> edges;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double w = d.values(i, j);
            if (edge_threshold && w < *edge_threshold) continue;
            edges.push_back({i, j, w});
        }
    }
    return WeightedGraph(d.ids, std::move(edges));
}

namespace {

void check_length(const WeightedGraph &g, std::size_t length) {
    if (length != static_cast<std::size_t>(g.size())) {
        throw Error(ErrorCode::InvalidArgument, "assignment length " + std::to_string(length) +
                                                    " does not match graph size " + std::to_string(g.size()));
    }
}

}  // namespace

double cut_value(const WeightedGraph &g, std::span<const std::uint8_t> bits) {
    check_length(g, bits.size());
    double s = 0.0;
    for (const auto &e : g.edges()) {
        const int xi = bits[static_cast<std::size_t>(e.i)] ? 1 : 0;
        const int xj = bits[static_cast<std::size_t>(e.j)] ? 1 : 0;
        s += e.weight * static_cast<double>(xi * (1 - xj) + xj * (1 - xi));
    }
    return s;
}

double cut_value(const WeightedGraph &g, std::uint64_t basis_index) {
    double s = 0.0;
    for (const auto &e : g.edges()) {
        if (((basis_index >> e.i) ^ (basis_index >> e.j)) & 1U) s += e.weight;
    }
    return s;
}

double half_scaled_binary_cost(const WeightedGraph &g, std::span<const std::uint8_t> bits) {
    return 0.5 * cut_value(g, bits);
}

double ising_cost(const WeightedGraph &g, std::span<const int> spins) {
    check_length(g, spins.size());
    for (std::size_t i = 0; i < spins.size(); ++i) {
        if (spins[i] != 1 && spins[i] != -1) {
            throw Error(ErrorCode::InvalidArgument, "spins must be +1 or -1", std::to_string(i));
        }
    }
    double s = 0.0;
    for (const auto &e : g.edges()) {
        const int zz = spins[static_cast<std::size_t>(e.i)] * spins[static_cast<std::size_t>(e.j)];
        s += e.weight * (0.5 * static_cast<double>(1 - zz));
    }
    return s;
}

CutBits bits_from_index(std::uint64_t index, int n) {
    CutBits bits(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) bits[static_cast<std::size_t>(i)] = (index >> i) & 1U;
    return bits;
}

std::uint64_t index_from_bits(std::span<const std::uint8_t> bits) {
    std::uint64_t x = 0;
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i]) x |= std::uint64_t{1} << i;
    }
    return x;
}

CutBits canonical(CutBits bits) {
    if (!bits.empty() && bits[0]) {
        for (auto &b : bits) b = b ? 0 : 1;
    }
    return bits;
}

// ---------------------------------------------------------------------------
// Classical solvers

CutAssignment brute_force_maxcut(const WeightedGraph &g) {
    const int n = g.size();
    if (n < 1) throw Error(ErrorCode::InvalidArgument, "graph has no nodes");
    if (n > kBruteForceLimit) {
        throw Error(ErrorCode::Capacity, "brute force is limited to " + std::to_string(kBruteForceLimit) + " nodes");
    }
    // Node 0 stays in T (even indices only). With two or more nodes the
    // trivial partition is skipped: both sides of a cut are non-empty.
    const std::uint64_t end = std::uint64_t{1} << n;
    std::uint64_t best = 0;
    double best_value = -1.0;
    for (std::uint64_t x = n >= 2 ? 2 : 0; x < end; x += 2) {
        const double v = cut_value(g, x);
        if (v > best_value) {
            best_value = v;
            best = x;
        }
    }
    return {bits_from_index(best, n), best_value};
}

CutAssignment local_search_maxcut(const WeightedGraph &g, int restarts, std::uint64_t seed) {
    const int n = g.size();
    if (n < 1) throw Error(ErrorCode::InvalidArgument, "graph has no nodes");
    if (restarts < 1) throw Error(ErrorCode::InvalidArgument, "restarts must be >= 1");
    std::vector<std::vector<std::pair<int, double>>> adjacency(static_cast<std::size_t>(n));
    for (const auto &e : g.edges()) {
        adjacency[static_cast<std::size_t>(e.i)].emplace_back(e.j, e.weight);
        adjacency[static_cast<std::size_t>(e.j)].emplace_back(e.i, e.weight);
    }
    std::optional<CutAssignment> best;
    for (int r = 0; r < restarts; ++r) {
        std::mt19937_64 rng(seed + static_cast<std::uint64_t>(r));
        std::bernoulli_distribution coin(0.5);
        CutBits bits(static_cast<std::size_t>(n));
        for (auto &b : bits) b = coin(rng) ? 1 : 0;
        // Best-improvement single flips until no flip gains.
        for (;;) {
            int flip = -1;
            double best_gain = 1e-12;
            for (int v = 0; v < n; ++v) {
                double gain = 0.0;
                for (const auto &[u, w] : adjacency[static_cast<std::size_t>(v)]) {
                    gain += bits[static_cast<std::size_t>(u)] == bits[static_cast<std::size_t>(v)] ? w : -w;
                }
                if (gain > best_gain) {
                    best_gain = gain;
                    flip = v;
                }
            }
            if (flip < 0) break;
            bits[static_cast<std::size_t>(flip)] ^= 1U;
        }
        CutAssignment candidate{canonical(bits), 0.0};
        candidate.value = cut_value(g, candidate.bits);
        if (!best || candidate.value > best->value ||
            (candidate.value == best->value && index_from_bits(candidate.bits) < index_from_bits(best->bits))) {
            best = std::move(candidate);
        }
    }
    return *best;
}

namespace {

void check_cap(const WeightedGraph &g, int cap) {
    if (g.size() < 1) throw Error(ErrorCode::InvalidArgument, "graph has no nodes");
    if (g.size() > cap) {
        throw Error(ErrorCode::Capacity,
                    std::to_string(g.size()) + " nodes exceed the qubit cap of " + std::to_string(cap));
    }
}

}  // namespace

MaxCutDiagonal maxcut_diagonal(const WeightedGraph &g, int qubit_cap) {
    check_cap(g, qubit_cap);
    MaxCutDiagonal out;
    out.qubits = g.size();
    out.diagonal.resize(std::size_t{1} << out.qubits);
    for (std::uint64_t x = 0; x < out.diagonal.size(); ++x) {
        double same = 0.0, different = 0.0;
        for (const auto &e : g.edges()) {
            if (((x >> e.i) ^ (x >> e.j)) & 1U) {
                different += e.weight;
            } else {
                same += e.weight;
            }
        }
        out.diagonal[x] = 0.5 * (same - different);
    }
    return out;
}

DiagonalObservable cut_value_diagonal(const WeightedGraph &g, int qubit_cap) {
    check_cap(g, qubit_cap);
    DiagonalObservable out{g.size(), std::vector<double>(std::size_t{1} << g.size())};
    for (std::uint64_t x = 0; x < out.diagonal.size(); ++x) out.diagonal[x] = cut_value(g, x);
    return out;
}

// ---------------------------------------------------------------------------
// QAOA

StateVector qaoa_state(const DiagonalObservable &cut_diagonal, std::span<const double> parameters, int qubit_cap) {
    if (parameters.empty() || parameters.size() % 2 != 0) {
        throw Error(ErrorCode::InvalidArgument, "QAOA needs (gamma, beta) pairs");
    }
    StateVector state(cut_diagonal.qubits, qubit_cap);
    for (int q = 0; q < state.qubits(); ++q) state.h(q);
    for (std::size_t layer = 0; layer < parameters.size(); layer += 2) {
        apply_diagonal_phase(state, cut_diagonal, parameters[layer]);
        for (int q = 0; q < state.qubits(); ++q) state.rx(q, 2.0 * parameters[layer + 1]);
    }
    return state;
}

double qaoa_expectation(const WeightedGraph &g, std::span<const double> parameters, int qubit_cap) {
    const auto diagonal = cut_value_diagonal(g, qubit_cap);
    return expectation_diagonal(qaoa_state(diagonal, parameters, qubit_cap), diagonal);
}

namespace {

std::uint64_t readout(const StateVector &state, bool sampled, std::uint64_t shots, std::uint64_t seed) {
    if (!sampled) return most_probable_state(state);
    const auto counts = sample(state, shots, seed);
    std::uint64_t best = 0, best_count = 0;
    for (const auto &[index, count] : counts) {
        if (count > best_count) {
            best = index;
            best_count = count;
        }
    }
    return best;
}

}  // namespace

QaoaResult qaoa_maxcut(const WeightedGraph &g, const QaoaOptions &options) {
    check_cap(g, options.qubit_cap);
    if (options.reps < 1) throw Error(ErrorCode::InvalidArgument, "QAOA reps must be >= 1");
    const auto diagonal = cut_value_diagonal(g, options.qubit_cap);

    std::mt19937_64 rng(options.seed);
    std::uniform_real_distribution<double> angle(0.0, std::numbers::pi / 2);
    std::vector<double> x0(2 * static_cast<std::size_t>(options.reps));
    for (auto &v : x0) v = angle(rng);

    auto objective = [&](std::span<const double> params) {
        return -expectation_diagonal(qaoa_state(diagonal, params, options.qubit_cap), diagonal);
    };
    auto config = options.optimizer;
    config.seed = options.seed;
    const auto opt = minimize(objective, x0, config);

    QaoaResult out;
    out.parameters = opt.x;
    out.expectation = -opt.value;
    for (double v : opt.trace) out.expectation_trace.push_back(-v);
    const auto state = qaoa_state(diagonal, opt.x, options.qubit_cap);
    const auto index = readout(state, options.sample_readout, options.shots, options.seed);
    out.assignment.bits = canonical(bits_from_index(index, g.size()));
    out.assignment.value = cut_value(g, out.assignment.bits);
    return out;
}

// ---------------------------------------------------------------------------
// VQE

std::string_view to_string(Entanglement e) {
    switch (e) {
        case Entanglement::Linear: return "linear";
        case Entanglement::Full: return "full";
        case Entanglement::Circular: return "circular";
    }
    return "unknown";
}

Entanglement parse_entanglement(std::string_view s) {
    if (s == "linear") return Entanglement::Linear;
    if (s == "full") return Entanglement::Full;
    if (s == "circular") return Entanglement::Circular;
    throw Error(ErrorCode::InvalidArgument, "unknown entanglement '" + std::string(s) + "'", std::string(s));
}

int vqe_parameter_count(int qubits, int reps) { return (reps + 1) * qubits; }

StateVector vqe_state(int qubits, int reps, Entanglement entanglement, std::span<const double> parameters,
                      int qubit_cap) {
    if (reps < 1) throw Error(ErrorCode::InvalidArgument, "VQE reps must be >= 1");
    if (static_cast<int>(parameters.size()) != vqe_parameter_count(qubits, reps)) {
        throw Error(ErrorCode::InvalidArgument, "VQE ansatz expects " +
                                                    std::to_string(vqe_parameter_count(qubits, reps)) +
                                                    " parameters, got " + std::to_string(parameters.size()));
    }
    StateVector state(qubits, qubit_cap);
    std::size_t p = 0;
    auto rotation_layer = [&] {
        for (int q = 0; q < qubits; ++q) state.ry(q, parameters[p++]);
    };
    for (int r = 0; r < reps; ++r) {
        rotation_layer();
        switch (entanglement) {
            case Entanglement::Full:
                for (int i = 0; i < qubits; ++i) {
                    for (int j = i + 1; j < qubits; ++j) state.cnot(i, j);
                }
                break;
            case Entanglement::Circular:
                if (qubits > 1) state.cnot(qubits - 1, 0);
                [[fallthrough]];
            case Entanglement::Linear:
                for (int i = 0; i + 1 < qubits; ++i) state.cnot(i, i + 1);
                break;
        }
    }
    rotation_layer();
    return state;
}

VqeResult vqe_min_eigen(const DiagonalObservable &obs, const VqeOptions &options) {
    validate(obs);
    if (obs.qubits > options.qubit_cap) {
        throw Error(ErrorCode::Capacity,
                    std::to_string(obs.qubits) + " qubits exceed the cap of " + std::to_string(options.qubit_cap));
    }
    if (options.reps < 1) throw Error(ErrorCode::InvalidArgument, "VQE reps must be >= 1");

    if (options.starts < 1) throw Error(ErrorCode::InvalidArgument, "VQE starts must be >= 1");

    std::mt19937_64 rng(options.seed);
    std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
    const auto count = static_cast<std::size_t>(vqe_parameter_count(obs.qubits, options.reps));

    VqeResult out;
    auto objective = [&](std::span<const double> params) {
        const double e =
            expectation_diagonal(vqe_state(obs.qubits, options.reps, options.entanglement, params, options.qubit_cap), obs);
        out.evaluations.push_back(e);
        return e;
    };
    bool first = true;
    for (int start = 0; start < options.starts; ++start) {
        std::vector<double> x0(count);
        for (auto &v : x0) v = angle(rng);
        auto config = options.optimizer;
        config.seed = options.seed + static_cast<std::uint64_t>(start);
        const auto opt = minimize(objective, x0, config);
        const double previous = first ? std::numeric_limits<double>::infinity() : out.eigenvalue;
        for (double v : opt.trace) out.trace.push_back(std::min(v, previous));
        if (first || opt.value < out.eigenvalue) {
            out.eigenvalue = opt.value;
            out.parameters = opt.x;
        }
        first = false;
    }
    out.basis_state = most_probable_state(
        vqe_state(obs.qubits, options.reps, options.entanglement, out.parameters, options.qubit_cap));
    return out;
}

// ---------------------------------------------------------------------------
// Clustering

std::string_view to_string(MaxCutMethod m) {
    switch (m) {
        case MaxCutMethod::BruteForce: return "bruteforce";
        case MaxCutMethod::LocalSearch: return "localsearch";
        case MaxCutMethod::Qaoa: return "qaoa";
        case MaxCutMethod::Vqe: return "vqe";
    }
    return "unknown";
}

MaxCutMethod parse_maxcut_method(std::string_view s) {
    if (s == "bruteforce") return MaxCutMethod::BruteForce;
    if (s == "localsearch") return MaxCutMethod::LocalSearch;
    if (s == "qaoa") return MaxCutMethod::Qaoa;
    if (s == "vqe") return MaxCutMethod::Vqe;
    throw Error(ErrorCode::InvalidArgument, "unknown max-cut method '" + std::string(s) + "'", std::string(s));
}

namespace {

SplitRecord solve_split(const WeightedGraph &g, const ClusterOptions &options, std::uint64_t seed) {
    SplitRecord record;
    record.members = g.node_ids();
    switch (options.method) {
        case MaxCutMethod::BruteForce: record.cut = brute_force_maxcut(g); break;
        case MaxCutMethod::LocalSearch: record.cut = local_search_maxcut(g, options.restarts, seed); break;
        case MaxCutMethod::Qaoa: {
            auto qaoa = options.qaoa;
            qaoa.seed = seed;
            auto result = qaoa_maxcut(g, qaoa);
            record.cut = std::move(result.assignment);
            record.trace = std::move(result.expectation_trace);
            break;
        }
        case MaxCutMethod::Vqe: {
            auto vqe = options.vqe;
            vqe.seed = seed;
            const auto diagonal = maxcut_diagonal(g, vqe.qubit_cap);
            auto result = vqe_min_eigen(diagonal.observable(), vqe);
            record.cut.bits = canonical(bits_from_index(result.basis_state, g.size()));
            record.cut.value = cut_value(g, record.cut.bits);
            record.trace = std::move(result.trace);
            break;
        }
    }
    return record;
}

}  // namespace

ClusterResult maxcut_cluster(const DistanceMatrix &d, const ClusterOptions &options) {
    const int n = static_cast<int>(d.order());
    if (options.clusters < 1 || (options.clusters & (options.clusters - 1)) != 0) {
        throw Error(ErrorCode::InvalidArgument,
                    "cluster count " + std::to_string(options.clusters) + " is not a power of two");
    }
    if (options.clusters > n) {
        throw Error(ErrorCode::InvalidArgument, "cluster count " + std::to_string(options.clusters) +
                                                    " exceeds entity count " + std::to_string(n));
    }
    const auto graph = graph_from_distance_matrix(d, options.edge_threshold);

    ClusterResult out;
    std::vector<std::vector<int>> parts{std::vector<int>(static_cast<std::size_t>(n))};
    for (int i = 0; i < n; ++i) parts[0][static_cast<std::size_t>(i)] = i;
    std::uint64_t split_index = 0;
    for (int remaining = options.clusters; remaining > 1; remaining /= 2) {
        std::vector<std::vector<int>> next;
        for (auto &part : parts) {
            if (part.size() < 2) {
                out.diagnostics.push_back("part {" + d.ids[static_cast<std::size_t>(part[0])] +
                                          "} is too small to split");
                next.push_back(std::move(part));
                continue;
            }
            auto record = solve_split(graph.induced(part), options, options.seed + split_index++);
            std::vector<int> t, s;
            for (std::size_t k = 0; k < part.size(); ++k) (record.cut.bits[k] ? s : t).push_back(part[k]);
            out.splits.push_back(std::move(record));
            if (s.empty()) {
                out.diagnostics.push_back("split " + std::to_string(out.splits.size() - 1) +
                                          " found no non-trivial cut");
                next.push_back(std::move(part));
                continue;
            }
            next.push_back(std::move(t));
            next.push_back(std::move(s));
        }
        parts = std::move(next);
    }
    out.labels.assign(static_cast<std::size_t>(n), 0);
    for (std::size_t p = 0; p < parts.size(); ++p) {
        for (int i : parts[p]) out.labels[static_cast<std::size_t>(i)] = static_cast<int>(p);
    }
    return out;
}

// ---------------------------------------------------------------------------
// k-means

KMeansResult kmeans(const Eigen::MatrixXd &points, int k, int max_iterations, std::uint64_t seed) {
    const auto n = points.rows();
    if (k < 1 || k > n) {
        throw Error(ErrorCode::InvalidArgument,
                    "k = " + std::to_string(k) + " must be in [1, " + std::to_string(n) + "]");
    }
    if (max_iterations < 1) throw Error(ErrorCode::InvalidArgument, "max iterations must be >= 1");

    std::mt19937_64 rng(seed);
    KMeansResult out;
    out.centroids.resize(k, points.cols());
    std::vector<char> chosen(static_cast<std::size_t>(n), 0);
    {
        std::uniform_int_distribution<Eigen::Index> first(0, n - 1);
        const auto c0 = first(rng);
        out.centroids.row(0) = points.row(c0);
        chosen[static_cast<std::size_t>(c0)] = 1;
    }
    std::vector<double> d2(static_cast<std::size_t>(n));
    for (int c = 1; c < k; ++c) {
        double total = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (int j = 0; j < c; ++j) best = std::min(best, (points.row(i) - out.centroids.row(j)).squaredNorm());
            d2[static_cast<std::size_t>(i)] = chosen[static_cast<std::size_t>(i)] ? 0.0 : best;
            total += d2[static_cast<std::size_t>(i)];
        }
        Eigen::Index pick = -1;
        if (total > 0.0) {
            std::discrete_distribution<Eigen::Index> weighted(d2.begin(), d2.end());
            pick = weighted(rng);
        } else {
            // Only duplicates left; take the first unused point.
            for (Eigen::Index i = 0; i < n && pick < 0; ++i) {
                if (!chosen[static_cast<std::size_t>(i)]) pick = i;
            }
        }
        out.centroids.row(c) = points.row(pick);
        chosen[static_cast<std::size_t>(pick)] = 1;
    }

    out.labels.assign(static_cast<std::size_t>(n), -1);
    for (int iter = 0; iter < max_iterations; ++iter) {
        bool changed = false;
        double inertia = 0.0;
        std::vector<double> own(static_cast<std::size_t>(n));
        for (Eigen::Index i = 0; i < n; ++i) {
            int best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (int c = 0; c < k; ++c) {
                const double dd = (points.row(i) - out.centroids.row(c)).squaredNorm();
                if (dd < best_d) {
                    best_d = dd;
                    best = c;
                }
            }
            if (out.labels[static_cast<std::size_t>(i)] != best) changed = true;
            out.labels[static_cast<std::size_t>(i)] = best;
            own[static_cast<std::size_t>(i)] = best_d;
            inertia += best_d;
        }
        ++out.iterations;
        out.inertia_trace.push_back(inertia);
        out.inertia = inertia;
        if (!changed || iter + 1 == max_iterations) break;

        Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, points.cols());
        std::vector<int> counts(static_cast<std::size_t>(k), 0);
        for (Eigen::Index i = 0; i < n; ++i) {
            sums.row(out.labels[static_cast<std::size_t>(i)]) += points.row(i);
            ++counts[static_cast<std::size_t>(out.labels[static_cast<std::size_t>(i)])];
        }
        for (int c = 0; c < k; ++c) {
            if (counts[static_cast<std::size_t>(c)] > 0) {
                out.centroids.row(c) = sums.row(c) / counts[static_cast<std::size_t>(c)];
                continue;
            }
            // Empty cluster: move it to the point farthest from its centroid.
            const auto far = std::distance(own.begin(), std::max_element(own.begin(), own.end()));
            out.centroids.row(c) = points.row(far);
            own[static_cast<std::size_t>(far)] = 0.0;
        }
    }
    return out;
}

}  // namespace qwb
