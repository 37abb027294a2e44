#include "loctime/graph.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <set>
#include <utility>

namespace loctime {

namespace {

constexpr double kRowSumTolerance = 1e-12;
// Rows already within a few ulps of 1 are left untouched, so a matrix that
// was normalized once reloads bit-identically.
constexpr double kRenormalizeSkip = 64 * std::numeric_limits<double>::epsilon();

void require_square(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols() || m.rows() < 1) {
        throw ValidationError("matrix must be square with size >= 1, got " +
                              std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    }
}

}  // namespace

void Graph::validate() const {
    if (vertex_count <= 0) {
        throw GraphError("vertex_count must be positive");
    }
    std::set<std::pair<int, int>> seen;
    std::vector<double> out_weight(static_cast<size_t>(vertex_count), 0.0);
    for (const Edge& e : edges) {
        if (e.from < 0 || e.from >= vertex_count || e.to < 0 || e.to >= vertex_count) {
            throw GraphError("edge (" + std::to_string(e.from) + " -> " +
                             std::to_string(e.to) + ") out of range for " +
                             std::to_string(vertex_count) + " vertices");
        }
        if (!(e.weight >= 0.0)) {
            throw GraphError("edge (" + std::to_string(e.from) + " -> " +
                             std::to_string(e.to) + ") has negative weight " +
                             std::to_string(e.weight));
        }
        if (!seen.insert({e.from, e.to}).second) {
            throw GraphError("duplicate edge (" + std::to_string(e.from) + " -> " +
                             std::to_string(e.to) + ")");
        }
        out_weight[static_cast<size_t>(e.from)] += e.weight;
    }
    for (int v = 0; v < vertex_count; ++v) {
        if (out_weight[static_cast<size_t>(v)] <= 0.0) {
            throw GraphError("vertex " + std::to_string(v) +
                             " has no outgoing edge with positive weight");
        }
    }
}

Eigen::MatrixXd Graph::weight_matrix() const {
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(vertex_count, vertex_count);
    for (const Edge& e : edges) {
        w(e.from, e.to) = e.weight;
    }
    return w;
}

TransitionMatrix TransitionMatrix::validate_stochastic(const Eigen::MatrixXd& raw) {
    require_square(raw);
    const int n = static_cast<int>(raw.rows());
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (!(raw(i, j) >= 0.0)) {
                throw NegativeEntry(i, j, raw(i, j));
            }
        }
    }
    Eigen::MatrixXd entries = raw;
    for (int i = 0; i < n; ++i) {
        const double sum = entries.row(i).sum();
        if (std::abs(sum - 1.0) > kRowSumTolerance) {
            throw RowSumViolation(i, sum);
        }
        if (std::abs(sum - 1.0) > kRenormalizeSkip) {
            entries.row(i) /= sum;
        }
    }
    return TransitionMatrix(std::move(entries));
}

TransitionMatrix TransitionMatrix::from_adjacency(const Eigen::MatrixXd& weights) {
    require_square(weights);
    const int n = static_cast<int>(weights.rows());
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (!(weights(i, j) >= 0.0)) {
                throw NegativeEntry(i, j, weights(i, j));
            }
        }
    }
    Eigen::MatrixXd entries(n, n);
    for (int i = 0; i < n; ++i) {
        const double sum = weights.row(i).sum();
        if (sum <= 0.0) {
            throw ZeroRow(i);
        }
        entries.row(i) = weights.row(i) / sum;
    }
    return TransitionMatrix(std::move(entries));
}

void check_vertex(const TransitionMatrix& P, int vertex) {
    if (vertex < 0 || vertex >= P.size()) {
        throw ValidationError("vertex " + std::to_string(vertex) + " out of range for " +
                              std::to_string(P.size()) + " vertices");
    }
}

void check_spec(const TransitionMatrix& P, const EnsembleSpec& spec) {
    check_vertex(P, spec.start);
    if (!spec.endpoint.is_free()) {
        check_vertex(P, spec.endpoint.vertex());
    }
    if (spec.horizon < 0) {
        throw ValidationError("horizon must be nonnegative, got " +
                              std::to_string(spec.horizon));
    }
}

bool strongly_connected(const TransitionMatrix& P) {
    const int n = P.size();
    // Reachability from vertex 0 in the graph and its reverse.
    const auto reaches_all = [&](bool reversed) {
        std::vector<char> seen(static_cast<size_t>(n), 0);
        std::vector<int> stack = {0};
        seen[0] = 1;
        int count = 1;
        while (!stack.empty()) {
            const int u = stack.back();
            stack.pop_back();
            for (int v = 0; v < n; ++v) {
                const double p = reversed ? P(v, u) : P(u, v);
                if (p > 0.0 && !seen[static_cast<size_t>(v)]) {
                    seen[static_cast<size_t>(v)] = 1;
                    ++count;
                    stack.push_back(v);
                }
            }
        }
        return count == n;
    };
    return reaches_all(false) && reaches_all(true);
}

Eigen::RowVectorXd occupation_row(const TransitionMatrix& P, int from, int steps) {
    check_vertex(P, from);
    if (steps < 0) {
        throw ValidationError("step count must be nonnegative");
    }
    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(P.size());
    row(from) = 1.0;
    for (int m = 0; m < steps; ++m) {
        row = row * P.matrix();
    }
    return row;
}

double n_step_probability(const TransitionMatrix& P, int from, int to, int steps) {
    check_vertex(P, to);
    return occupation_row(P, from, steps)(to);
}

std::vector<double> bracket_sequence(const TransitionMatrix& P, int from, int to,
                                     int max_steps) {
    check_vertex(P, from);
    check_vertex(P, to);
    if (max_steps < 0) {
        throw ValidationError("step count must be nonnegative");
    }
    std::vector<double> out(static_cast<size_t>(max_steps) + 1);
    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(P.size());
    row(from) = 1.0;
    out[0] = row(to);
    for (int m = 1; m <= max_steps; ++m) {
        row = row * P.matrix();
        out[static_cast<size_t>(m)] = row(to);
    }
    return out;
}

}  // namespace loctime
