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

#include "qwb/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <string>

#include "qwb/error.hpp"

namespace qwb {

std::string_view to_string(OptimizerKind kind) {
    switch (kind) {
        case OptimizerKind::NelderMead: return "nelderMead";
        case OptimizerKind::Spsa: return "spsa";
        case OptimizerKind::GradientDescent: return "gradientDescent";
    }
    return "unknown";
}

OptimizerKind parse_optimizer_kind(std::string_view s) {
    if (s == "nelderMead") return OptimizerKind::NelderMead;
    if (s == "spsa") return OptimizerKind::Spsa;
    if (s == "gradientDescent") return OptimizerKind::GradientDescent;
    throw Error(ErrorCode::InvalidArgument, "unknown optimizer '" + std::string(s) + "'", std::string(s));
}

void validate(const OptimizerConfig &config) {
    auto positive = [](double v, const char *name) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw Error(ErrorCode::InvalidArgument, std::string("optimizer constant '") + name + "' must be positive",
                        name);
        }
    };
    if (config.max_iterations < 1) throw Error(ErrorCode::InvalidArgument, "max iterations must be >= 1");
    positive(config.tolerance, "tolerance");
    positive(config.spsa.a, "spsa.a");
    positive(config.spsa.c, "spsa.c");
    positive(config.spsa.alpha, "spsa.alpha");
    positive(config.spsa.gamma, "spsa.gamma");
    if (!(config.spsa.stability >= 0.0)) throw Error(ErrorCode::InvalidArgument, "spsa stability must be >= 0");
    positive(config.learning_rate, "learningRate");
    positive(config.gradient_step, "gradientStep");
    positive(config.simplex_step, "simplexStep");
}

namespace {

std::string format_point(std::span<const double> x) {
    std::ostringstream os;
    os.precision(17);
    os << '[';
    for (std::size_t i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
    os << ']';
    return os.str();
}

double checked_call(const Objective &f, std::span<const double> x) {
    const double v = f(x);
    if (!std::isfinite(v)) {
        throw Error(ErrorCode::Numerical, "objective returned a non-finite value", format_point(x));
    }
    return v;
}

// Counts evaluations and remembers the best point seen.
class Tracker {
  public:
    explicit Tracker(const Objective &f) : f_(f) {}

    double operator()(std::span<const double> x) {
        const double v = checked_call(f_, x);
        ++evaluations_;
        if (best_x_.empty() || v < best_value_) {
            best_value_ = v;
            best_x_.assign(x.begin(), x.end());
        }
        return v;
    }

    void finish(OptimizationResult &out) const {
        out.x = best_x_;
        out.value = best_value_;
        out.evaluations = evaluations_;
    }
    double best() const { return best_value_; }

  private:
    const Objective &f_;
    std::vector<double> best_x_;
    double best_value_ = 0.0;
    int evaluations_ = 0;
};

void nelder_mead(Tracker &eval, const std::vector<double> &x0, const OptimizerConfig &cfg, OptimizationResult &out) {
    constexpr double kReflect = 1.0, kExpand = 2.0, kContract = 0.5, kShrink = 0.5;
    const std::size_t dim = x0.size();
    std::vector<std::vector<double>> simplex(dim + 1, x0);
    for (std::size_t i = 0; i < dim; ++i) simplex[i + 1][i] += cfg.simplex_step;
    std::vector<double> values(dim + 1);
    for (std::size_t i = 0; i <= dim; ++i) values[i] = eval(simplex[i]);

    std::vector<std::size_t> order(dim + 1);
    auto sort_simplex = [&] {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
        std::vector<std::vector<double>> s;
        std::vector<double> v;
        for (std::size_t i : order) {
            s.push_back(simplex[i]);
            v.push_back(values[i]);
        }
        simplex = std::move(s);
        values = std::move(v);
    };
    auto affine = [&](const std::vector<double> &base, const std::vector<double> &toward, double t) {
        std::vector<double> p(dim);
        for (std::size_t k = 0; k < dim; ++k) p[k] = base[k] + t * (toward[k] - base[k]);
        return p;
    };

    for (int iter = 0; iter < cfg.max_iterations; ++iter) {
        sort_simplex();
        std::vector<double> centroid(dim, 0.0);
        for (std::size_t i = 0; i < dim; ++i) {
            for (std::size_t k = 0; k < dim; ++k) centroid[k] += simplex[i][k] / static_cast<double>(dim);
        }
        auto &worst = simplex[dim];
        const auto reflected = affine(centroid, worst, -kReflect);
        const double fr = eval(reflected);
        if (fr < values[0]) {
            const auto expanded = affine(centroid, reflected, kExpand);
            const double fe = eval(expanded);
            if (fe < fr) {
                worst = expanded;
                values[dim] = fe;
            } else {
                worst = reflected;
                values[dim] = fr;
            }
        } else if (fr < values[dim - 1]) {
            worst = reflected;
            values[dim] = fr;
        } else {
            bool accepted = false;
            if (fr < values[dim]) {
                const auto outside = affine(centroid, reflected, kContract);
                const double fc = eval(outside);
                if (fc <= fr) {
                    worst = outside;
                    values[dim] = fc;
                    accepted = true;
                }
            } else {
                const auto inside = affine(centroid, worst, kContract);
                const double fc = eval(inside);
                if (fc < values[dim]) {
                    worst = inside;
                    values[dim] = fc;
                    accepted = true;
                }
            }
            if (!accepted) {
                for (std::size_t i = 1; i <= dim; ++i) {
                    simplex[i] = affine(simplex[0], simplex[i], kShrink);
                    values[i] = eval(simplex[i]);
                }
            }
        }
        ++out.iterations;
        out.trace.push_back(eval.best());
        // A simplex straddling the minimum can have equal values at its
        // vertices, so its extent must have collapsed as well.
        const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
        double extent = 0.0;
        for (std::size_t i = 1; i <= dim; ++i) {
            for (std::size_t k = 0; k < dim; ++k) extent = std::max(extent, std::abs(simplex[i][k] - simplex[0][k]));
        }
        if (*hi - *lo < cfg.tolerance && extent <= std::sqrt(cfg.tolerance)) {
            out.converged = true;
            break;
        }
    }
}

void spsa(Tracker &eval, std::vector<double> x, const OptimizerConfig &cfg, OptimizationResult &out) {
    const std::size_t dim = x.size();
    std::mt19937_64 rng(cfg.seed);
    std::bernoulli_distribution coin(0.5);
    std::vector<double> delta(dim), plus(dim), minus(dim);
    // A perturbation orthogonal to the gradient yields a zero step, so one
    // small step proves nothing; a run of them does.
    constexpr int kQuietSteps = 20;
    int quiet = 0;
    for (int k = 0; k < cfg.max_iterations; ++k) {
        const double ak = cfg.spsa.a / std::pow(k + 1 + cfg.spsa.stability, cfg.spsa.alpha);
        const double ck = cfg.spsa.c / std::pow(k + 1, cfg.spsa.gamma);
        for (std::size_t i = 0; i < dim; ++i) {
            delta[i] = coin(rng) ? 1.0 : -1.0;
            plus[i] = x[i] + ck * delta[i];
            minus[i] = x[i] - ck * delta[i];
        }
        const double diff = eval(plus) - eval(minus);
        double step_norm = 0.0;
        for (std::size_t i = 0; i < dim; ++i) {
            const double step = ak * diff / (2.0 * ck * delta[i]);
            x[i] -= step;
            step_norm += step * step;
        }
        eval(x);
        ++out.iterations;
        out.trace.push_back(eval.best());
        quiet = std::sqrt(step_norm) < cfg.tolerance ? quiet + 1 : 0;
        if (quiet == kQuietSteps) {
            out.converged = true;
            break;
        }
    }
}

void gradient_descent(Tracker &eval, const Objective &f, std::vector<double> x, const OptimizerConfig &cfg,
                      const Gradient &gradient, OptimizationResult &out) {
    for (int k = 0; k < cfg.max_iterations; ++k) {
        const auto g = gradient ? gradient(x) : finite_difference_gradient(f, x, cfg.gradient_step);
        double norm = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (!std::isfinite(g[i])) throw Error(ErrorCode::Numerical, "non-finite gradient", format_point(x));
            norm += g[i] * g[i];
        }
        if (std::sqrt(norm) < cfg.tolerance) {
            out.converged = true;
            break;
        }
        for (std::size_t i = 0; i < x.size(); ++i) x[i] -= cfg.learning_rate * g[i];
        eval(x);
        ++out.iterations;
        out.trace.push_back(eval.best());
    }
}

}  // namespace

OptimizationResult minimize(const Objective &f, std::vector<double> x0, const OptimizerConfig &config,
                            const Gradient &gradient) {
    validate(config);
    if (x0.empty()) throw Error(ErrorCode::InvalidArgument, "optimizer needs at least one parameter");
    for (double v : x0) {
        if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "x0 must be finite", format_point(x0));
    }
    OptimizationResult out;
    Tracker eval(f);
    eval(x0);
    switch (config.kind) {
        case OptimizerKind::NelderMead: nelder_mead(eval, x0, config, out); break;
        case OptimizerKind::Spsa: spsa(eval, x0, config, out); break;
        case OptimizerKind::GradientDescent: gradient_descent(eval, f, x0, config, gradient, out); break;
    }
    eval.finish(out);
    return out;
}

std::vector<double> finite_difference_gradient(const Objective &f, std::span<const double> x, double h) {
    if (!(h > 0.0)) throw Error(ErrorCode::InvalidArgument, "finite-difference step must be positive");
    std::vector<double> point(x.begin(), x.end());
    std::vector<double> g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double orig = point[i];
        point[i] = orig + h;
        const double up = checked_call(f, point);
        point[i] = orig - h;
        const double down = checked_call(f, point);
        point[i] = orig;
        g[i] = (up - down) / (2.0 * h);
    }
    return g;
}

}  // namespace qwb
